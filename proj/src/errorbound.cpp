#include "fgps/errorbound.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fgps::errorbound {

void BoundConstants::validate() const {
  if (!(d_lambda > 0.0)) throw std::invalid_argument("D^lambda must be positive");
  if (!(b1_lambda >= 1.0)) throw std::invalid_argument("B1^lambda must be at least 1");
}

SignedLog psi(const fourier::FourierGrid& grid, const fracderiv::FractionalOrder& order,
              std::size_t ng, std::size_t j, double y, double t) {
  if (!(y > 0.0 && y <= 1.0)) {
    throw std::invalid_argument("psi: y must lie in (0, 1]");
  }
  const double gap = order.gap();
  const int m = order.ceiling();
  const double power = static_cast<double>(ng + 1);
  // L/(alpha-m) is negative: the factor's sign is (-1)^(NG+1).
  const double log_base = std::log(order.memory() / gap) + (1.0 + order.alpha() - m) / gap * std::log(y);
  const SignedLog factor{(ng + 1) % 2 == 0 ? 1 : -1, power * log_base};
  const double tau = t - order.memory() * std::exp(std::log(y) / gap);
  const auto deriv = fourier::cardinal_deriv_log(grid, j, static_cast<int>(ng) + m + 1, tau);
  return factor * deriv;
}

ResolvedBranch select_branch(std::size_t ng, double lambda) {
  if (!(lambda > -0.5)) throw std::invalid_argument("lambda must exceed -1/2");
  if (lambda >= 0.0) return ResolvedBranch::NonNegativeLambda;
  return ng % 2 == 1 ? ResolvedBranch::OddNg : ResolvedBranch::EvenNg;
}

double log_branch_factor(ResolvedBranch branch, std::size_t ng, double lambda,
                         const BoundConstants& constants) {
  const double g = static_cast<double>(ng);
  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  switch (branch) {
    case ResolvedBranch::NonNegativeLambda:
      return 0.0;
    case ResolvedBranch::OddNg:
      return std::lgamma(g / 2.0 + 1.0) + std::lgamma(lambda + 0.5) - log_sqrt_pi -
             std::lgamma(g / 2.0 + lambda + 1.0);
    case ResolvedBranch::EvenNg:
      return std::log(2.0) + std::lgamma((g + 3.0) / 2.0) + std::lgamma(lambda + 0.5) -
             log_sqrt_pi - 0.5 * std::log((g + 1.0) * (g + 2.0 * lambda + 1.0)) -
             std::lgamma((g + 1.0) / 2.0 + lambda);
    case ResolvedBranch::Asymptotic:
      return std::log(constants.b1_lambda) - lambda * std::log(g + 1.0);
  }
  return 0.0;
}

SignedLog truncation_bound(const BoundParams& p) {
  p.constants.validate();
  const fracderiv::FractionalOrder order(p.alpha, p.memory);
  if (p.n == 0) throw std::invalid_argument("truncation_bound: N must be positive");
  if (!(p.zeta > 0.0 && p.zeta <= 1.0)) {
    throw std::invalid_argument("truncation_bound: zeta must lie in (0, 1]");
  }
  ResolvedBranch branch = select_branch(p.ng, p.lambda);
  if (p.branch == Branch::Asymptotic) {
    if (p.lambda >= 0.0) {
      throw std::invalid_argument("asymptotic branch applies only to -1/2 < lambda < 0");
    }
    branch = ResolvedBranch::Asymptotic;
  }

  const double g = static_cast<double>(p.ng);
  const double m = order.ceiling();
  const double gap = order.gap();
  const double zeta_exp = (1.0 + p.alpha - m) / gap;

  double log_bound = std::log(p.constants.d_lambda) + (g + m) * std::log(static_cast<double>(p.n)) +
                     (g + 1.0) * (std::log(p.memory / gap) + zeta_exp * std::log(p.zeta)) -
                     (2.0 * g + 1.0) * std::numbers::ln2 + g;
  if (p.ng == 0) {
    // NG^(lambda - 3/2) diverges at NG = 0.
    log_bound = std::numeric_limits<double>::infinity();
  } else {
    log_bound += (p.lambda - g - 1.5) * std::log(g);
  }
  log_bound += log_branch_factor(branch, p.ng, p.lambda, p.constants);
  return {1, log_bound};
}

std::vector<ReportRow> bound_report(const ReportSweep& sweep) {
  std::vector<ReportRow> rows;
  for (double memory : sweep.memories) {
    BoundParams p = sweep.base;
    p.memory = memory;
    rows.push_back({"L", memory, truncation_bound(p).log10_abs()});
  }
  for (std::size_t n : sweep.grid_sizes) {
    BoundParams p = sweep.base;
    p.n = n;
    rows.push_back({"N", static_cast<double>(n), truncation_bound(p).log10_abs()});
  }
  for (int m : sweep.ceilings) {
    BoundParams p = sweep.base;
    p.alpha = m - sweep.gap;
    rows.push_back({"m", static_cast<double>(m), truncation_bound(p).log10_abs()});
  }
  return rows;
}

}  // namespace fgps::errorbound
