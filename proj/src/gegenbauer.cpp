#include "fgps/gegenbauer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fgps/common.hpp"

namespace fgps::gegenbauer {

GegenbauerIndex::GegenbauerIndex(double lambda) : lambda_(lambda) {
  if (!(lambda > -0.5) || !std::isfinite(lambda)) {
    throw std::domain_error("Gegenbauer index must satisfy lambda > -1/2, got " +
                            std::to_string(lambda));
  }
}

// Normalized recurrence:
//   (l + 2 lambda) C_{l+1} = 2 (l + lambda) x C_l - l C_{l-1},  C_0 = 1, C_1 = x.
// At lambda = 0 this is the Chebyshev recurrence for l >= 1.
PolyValue poly_with_derivative(std::size_t l, GegenbauerIndex lambda, double x) {
  const double lam = lambda.value();
  if (l == 0) return {1.0, 0.0};
  double prev = 1.0;
  double cur = x;
  for (std::size_t k = 1; k < l; ++k) {
    const double kd = static_cast<double>(k);
    const double next = (2.0 * (kd + lam) * x * cur - kd * prev) / (kd + 2.0 * lam);
    prev = cur;
    cur = next;
  }
  // (1 - x^2) C_l' = l (C_{l-1} - x C_l); at the endpoints use
  // C_l'(+-1) = (+-1)^(l-1) l (l + 2 lambda) / (2 lambda + 1).
  const double ld = static_cast<double>(l);
  const double one_minus_x2 = 1.0 - x * x;
  double deriv;
  if (std::fabs(one_minus_x2) < 1e-14) {
    const double s = (x > 0 || l % 2 == 1) ? 1.0 : -1.0;
    deriv = s * ld * (ld + 2.0 * lam) / (2.0 * lam + 1.0);
  } else {
    deriv = ld * (prev - x * cur) / one_minus_x2;
  }
  return {cur, deriv};
}

double poly(std::size_t l, GegenbauerIndex lambda, double x) {
  return poly_with_derivative(l, lambda, x).value;
}

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRootTolerance = 1e-14;

// Hybrid Newton/bisection inside a sign-change bracket [a, b].
double refine_root(std::size_t degree, GegenbauerIndex lambda, double a, double b) {
  double fa = poly(degree, lambda, a);
  double x = 0.5 * (a + b);
  for (int it = 0; it < kMaxIterations; ++it) {
    const auto [fx, dfx] = poly_with_derivative(degree, lambda, x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::fabs(next - x);
    x = next;
    if (step <= kRootTolerance * std::max(1.0, std::fabs(x)) || b - a <= kRootTolerance) {
      // A few Newton steps, kept only while the residual shrinks.
      for (int k = 0; k < 3; ++k) {
        const auto [f, df] = poly_with_derivative(degree, lambda, x);
        if (f == 0.0 || df == 0.0) break;
        const double polished = x - f / df;
        if (!(std::fabs(poly(degree, lambda, polished)) < std::fabs(f))) break;
        x = polished;
      }
      return x;
    }
  }
  throw NumericalError("gauss_nodes: root refinement did not converge for degree " +
                       std::to_string(degree));
}

}  // namespace

std::vector<double> gauss_nodes(std::size_t n, GegenbauerIndex lambda) {
  const std::size_t degree = n + 1;
  const std::size_t count = degree;

  // Sample on a grid uniform in theta = acos(x); the zeros are roughly
  // equispaced in theta, so a grid several times finer brackets every one.
  for (std::size_t samples = std::max<std::size_t>(64, 8 * (degree + 1));
       samples <= 64 * (degree + 1) + 1024; samples *= 2) {
    std::vector<double> roots;
    roots.reserve(count);
    double x_prev = -1.0;
    double f_prev = poly(degree, lambda, x_prev);
    for (std::size_t s = 1; s <= samples; ++s) {
      const double theta = std::numbers::pi * static_cast<double>(samples - s) /
                           static_cast<double>(samples);
      const double x = (s == samples) ? 1.0 : std::cos(theta);
      const double fx = poly(degree, lambda, x);
      if (fx == 0.0) {
        roots.push_back(x);
      } else if (f_prev != 0.0 && (fx > 0) != (f_prev > 0)) {
        roots.push_back(refine_root(degree, lambda, x_prev, x));
      }
      x_prev = x;
      f_prev = fx;
    }
    if (roots.size() != count) continue;

    // Symmetrize: C_{n+1} has parity (-1)^(n+1).
    for (std::size_t i = 0; i < count / 2; ++i) {
      const double r = 0.5 * (roots[count - 1 - i] - roots[i]);
      roots[i] = -r;
      roots[count - 1 - i] = r;
    }
    if (count % 2 == 1) roots[count / 2] = 0.0;
    return roots;
  }
  throw NumericalError("gauss_nodes: failed to bracket all " + std::to_string(count) +
                       " zeros");
}

std::vector<double> shift_nodes(std::span<const double> nodes) {
  std::vector<double> out(nodes.size());
  std::transform(nodes.begin(), nodes.end(), out.begin(),
                 [](double z) { return 0.5 * (z + 1.0); });
  return out;
}

InterpolatoryWeights integration_vector(std::span<const double> nodes) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (n == 0) throw std::invalid_argument("integration_vector: empty node set");

  InterpolatoryWeights result;
  result.min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::fabs(nodes[i]) < 1.0)) {
      throw std::invalid_argument("integration_vector: nodes must lie in (-1, 1)");
    }
    for (Eigen::Index k = i + 1; k < n; ++k) {
      result.min_gap = std::min(result.min_gap, std::fabs(nodes[i] - nodes[k]));
    }
  }
  if (result.min_gap == 0.0) {
    throw std::invalid_argument("integration_vector: nodes must be distinct");
  }
  result.ill_conditioned = result.min_gap < 1e-12;

  // Row k: sum_i P_i T_k(z_i) = integral of T_k over [-1, 1].
  Eigen::MatrixXd basis(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = nodes[i];
    double prev = 1.0;
    double cur = z;
    basis(0, i) = 1.0;
    if (n > 1) basis(1, i) = z;
    for (Eigen::Index k = 2; k < n; ++k) {
      const double next = 2.0 * z * cur - prev;
      prev = cur;
      cur = next;
      basis(k, i) = cur;
    }
  }
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < n; k += 2) {
    const double kd = static_cast<double>(k);
    moments(k) = 2.0 / (1.0 - kd * kd);
  }
  const Eigen::VectorXd w = basis.partialPivLu().solve(moments);
  result.weights.assign(w.data(), w.data() + n);
  return result;
}

QuadratureRule make_rule(std::size_t ng, GegenbauerIndex lambda) {
  if (ng > kMaxDegree) {
    throw std::invalid_argument("make_rule: degree parameter " + std::to_string(ng) +
                                " exceeds the supported maximum " +
                                std::to_string(kMaxDegree));
  }
  QuadratureRule rule;
  rule.lambda = lambda;
  rule.ng = ng;
  rule.nodes = gauss_nodes(ng, lambda);
  rule.shifted_nodes = shift_nodes(rule.nodes);
  auto w = integration_vector(rule.nodes);
  rule.weights = std::move(w.weights);
  rule.ill_conditioned = w.ill_conditioned;
  return rule;
}

double log_leading_coeff(std::size_t l, GegenbauerIndex lambda) {
  // K_0 = 1 for every lambda (limit of G(lambda)/G(2 lambda) is 2 at lambda = 0).
  if (l == 0) return 0.0;
  const double lam = lambda.value();
  const double ld = static_cast<double>(l);
  return (2.0 * ld - 1.0) * std::numbers::ln2 + std::lgamma(2.0 * lam + 1.0) +
         std::lgamma(ld + lam) - std::lgamma(lam + 1.0) - std::lgamma(ld + 2.0 * lam);
}

double leading_coeff(std::size_t l, GegenbauerIndex lambda) {
  return std::exp(log_leading_coeff(l, lambda));
}

}  // namespace fgps::gegenbauer
