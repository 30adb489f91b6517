#pragma once

// Periodic fractional derivatives with sliding memory length L.
//
// For alpha in (m-1, m), m = ceil(alpha), the substitution
// tau = t - L y^(1/(m-alpha)) turns the sliding-memory Caputo derivative into
//
//   D^alpha f(t) = L^(m-alpha) / Gamma(m-alpha+1) * int_0^1 f^(m)(t - L y^(1/(m-alpha))) dy,
//
// which has no endpoint singularity. FgpsFim discretizes this integral with
// Gegenbauer-Gauss quadrature applied to the m-th derivatives of the Fourier
// cardinal functions.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fgps/fourier.hpp"
#include "fgps/gegenbauer.hpp"

namespace fgps::fracderiv {

using RealFunction = std::function<double(double)>;

/// Order alpha > 0, alpha not an integer, with memory length L > 0.
class FractionalOrder {
 public:
  FractionalOrder(double alpha, double memory);

  double alpha() const { return alpha_; }
  int ceiling() const { return m_; }
  double memory() const { return memory_; }
  /// m - alpha, in (0, 1).
  double gap() const { return static_cast<double>(m_) - alpha_; }
  /// L^(m-alpha) / Gamma(m-alpha+1).
  double scale() const;

 private:
  double alpha_;
  int m_;
  double memory_;
};

/// Truncated Grunwald-Letnikov sum h^-alpha sum_{k=0}^{n} (-1)^k binom(alpha,k) f(t-kh),
/// n = floor((t-a)/h). Requires h > 0 and n >= 1.
double gl_derivative(const RealFunction& f, double alpha, double a, double t, double h);

/// m-th derivative by the central finite-difference stencil with 2*half+1
/// points (Fornberg weights), accurate to O(h^(2 half - 2 floor((m-1)/2))).
double stencil_derivative(const RealFunction& f, int m, double t, double h, int half = 6);

struct OracleResult {
  double value = 0.0;
  double last_delta = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

/// Reduced-form derivative from f^(m) by composite 16-point Gauss-Legendre,
/// doubling the panel count from `panels` until successive values differ by
/// less than 1e-12 (at most 2^14 panels).
OracleResult reduced_fd_oracle(const RealFunction& fm, const FractionalOrder& order, double t,
                               std::size_t panels = 16);

/// (1/2) sum_i P_i F_j^(m)(t_l - L zhat_i^(1/(m-alpha))).
double fgpsq_entry(const fourier::FourierGrid& grid, const gegenbauer::QuadratureRule& rule,
                   const FractionalOrder& order, std::size_t l, std::size_t j);

/// Integration matrix Q and the prefactor that turns Q f into D^alpha f at the nodes.
struct FgpsFim {
  fourier::FourierGrid grid;
  gegenbauer::QuadratureRule rule;
  FractionalOrder order;
  Eigen::MatrixXd entries;
  double scale;

  double max_abs_entry() const { return entries.cwiseAbs().maxCoeff(); }
};

struct BuildOptions {
  bool verify = false;     // recompute a few entries directly and compare
  std::uint64_t seed = 42;
  int verify_entries = 5;
};

/// Builds column 0 by quadrature and fills the rest by circulant rotation,
/// entries(l, j) = col0[(l - j) mod N]. With verify set, a mismatch above
/// 1e-12 relative to the largest entry throws NumericalError.
FgpsFim build_fim(const fourier::FourierGrid& grid, const gegenbauer::QuadratureRule& rule,
                  const FractionalOrder& order, const BuildOptions& options = {});

/// Every entry by its own quadrature; O(N) times slower than build_fim.
FgpsFim build_fim_direct(const fourier::FourierGrid& grid,
                         const gegenbauer::QuadratureRule& rule, const FractionalOrder& order);

/// scale * (Q samples): the derivative approximated at every grid node.
std::vector<double> approx_fd_at_nodes(const FgpsFim& fim, std::span<const double> samples);

}  // namespace fgps::fracderiv
