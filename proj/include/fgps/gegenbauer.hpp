#pragma once

// Gegenbauer polynomials normalized so that C_l(1) = 1, their Gauss points,
// and interpolatory integration weights on [-1, 1].
//
// With this normalization the lambda -> 0 limit is the Chebyshev polynomial
// of the first kind and lambda = 1/2 gives Legendre polynomials.

#include <cstddef>
#include <span>
#include <vector>

namespace fgps::gegenbauer {

/// Largest degree parameter accepted by make_rule. Beyond this the dense
/// weight solve is not trusted.
inline constexpr std::size_t kMaxDegree = 2048;

/// Index lambda of the Gegenbauer family; must satisfy lambda > -1/2.
class GegenbauerIndex {
 public:
  explicit GegenbauerIndex(double lambda);
  double value() const { return lambda_; }

 private:
  double lambda_;
};

/// Gauss-point quadrature on [-1, 1] and its image on [0, 1].
struct QuadratureRule {
  GegenbauerIndex lambda{0.0};
  std::size_t ng = 0;                 // degree parameter; rule has ng+1 points
  std::vector<double> nodes;          // zeros of C_{ng+1}, increasing
  std::vector<double> shifted_nodes;  // (node + 1) / 2
  std::vector<double> weights;        // row vector P, sums to 2
  bool ill_conditioned = false;
};

struct InterpolatoryWeights {
  std::vector<double> weights;
  double min_gap = 0.0;
  bool ill_conditioned = false;  // min_gap < 1e-12
};

/// C_l^lambda(x) by three-term recurrence.
double poly(std::size_t l, GegenbauerIndex lambda, double x);

/// Value and first derivative of C_l^lambda at x.
struct PolyValue {
  double value;
  double derivative;
};
PolyValue poly_with_derivative(std::size_t l, GegenbauerIndex lambda, double x);

/// The n+1 zeros of C_{n+1}^lambda, strictly increasing and symmetric about 0.
/// Throws NumericalError if the bracketing or refinement fails.
std::vector<double> gauss_nodes(std::size_t n, GegenbauerIndex lambda);

/// Affine image (z + 1) / 2 of nodes in (-1, 1).
std::vector<double> shift_nodes(std::span<const double> nodes);

/// Weights P_i = integral over [-1, 1] of the Lagrange cardinal polynomial of
/// node i. Solved as a Chebyshev-basis moment system.
InterpolatoryWeights integration_vector(std::span<const double> nodes);

/// Gauss points, shifted points and weights for degree parameter ng.
QuadratureRule make_rule(std::size_t ng, GegenbauerIndex lambda);

/// Leading coefficient K_l = 2^(2l-1) G(2lambda+1) G(l+lambda) / (G(lambda+1) G(l+2lambda)).
double leading_coeff(std::size_t l, GegenbauerIndex lambda);
/// Natural log of leading_coeff; finite for every l.
double log_leading_coeff(std::size_t l, GegenbauerIndex lambda);

}  // namespace fgps::gegenbauer
