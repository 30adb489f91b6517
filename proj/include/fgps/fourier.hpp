#pragma once

// T-periodic trigonometric cardinal functions on an equispaced grid.
//
// F_j(t) = (1/N) sum'_{|k| <= N/2} cos(w_k (t - t_j)),  w_k = 2 pi k / T,
// where the primed sum weights the two edge modes k = +-N/2 by 1/2.

#include <cstddef>
#include <span>
#include <vector>

#include "fgps/common.hpp"

namespace fgps::fourier {

class FourierGrid {
 public:
  /// Throws std::invalid_argument unless period > 0 and n is even and positive.
  FourierGrid(double period, std::size_t n);

  double period() const { return period_; }
  std::size_t size() const { return n_; }
  double node(std::size_t j) const { return period_ * static_cast<double>(j) / static_cast<double>(n_); }
  const std::vector<double>& nodes() const { return nodes_; }
  /// Angular frequency of mode k.
  double omega(double k) const;

 private:
  double period_;
  std::size_t n_;
  std::vector<double> nodes_;
};

/// F_0(s); every cardinal function is a translate of this kernel.
double kernel(const FourierGrid& grid, double s);
/// m-th derivative of F_0 at s, m >= 1.
double kernel_deriv(const FourierGrid& grid, int m, double s);
/// m-th derivative of F_0 at s as sign and log-magnitude; safe for large m.
SignedLog kernel_deriv_log(const FourierGrid& grid, int m, double s);

double cardinal(const FourierGrid& grid, std::size_t j, double t);
double cardinal_deriv(const FourierGrid& grid, std::size_t j, int m, double t);
SignedLog cardinal_deriv_log(const FourierGrid& grid, std::size_t j, int m, double t);

/// I_N f(t) = sum_j samples[j] F_j(t). Throws on length mismatch.
double interpolate(const FourierGrid& grid, std::span<const double> samples, double t);

/// Interpolant evaluated at each of ts.
std::vector<double> interpolate(const FourierGrid& grid, std::span<const double> samples,
                                 std::span<const double> ts);

}  // namespace fgps::fourier
