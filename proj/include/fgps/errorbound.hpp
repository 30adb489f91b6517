#pragma once

// Truncation error of the Gegenbauer quadrature behind each integration
// matrix entry: the kernel psi of the error form and the upper bound
//
//   |E| <= D N^(NG+m) (L/(m-alpha) zeta^((1+alpha-m)/(m-alpha)))^(NG+1)
//          2^(-2NG-1) e^NG NG^(lambda-NG-3/2) * branch(NG, lambda).
//
// D and B1 are unspecified constants depending only on lambda; they default
// to 1, so reported values carry every parameter dependency but not the
// absolute scale. Everything is evaluated in log space.

#include <cstddef>
#include <string>
#include <vector>

#include "fgps/common.hpp"
#include "fgps/fourier.hpp"
#include "fgps/fracderiv.hpp"

namespace fgps::errorbound {

struct BoundConstants {
  double d_lambda = 1.0;   // > 0
  double b1_lambda = 1.0;  // > 1 is required by the bound; 1 is the supremum default
  void validate() const;
};

/// psi(y; t) = (L/(alpha-m) y^(-(m-alpha-1)/(m-alpha)))^(NG+1) F_j^(NG+m+1)(t - L y^(1/(m-alpha))).
SignedLog psi(const fourier::FourierGrid& grid, const fracderiv::FractionalOrder& order,
              std::size_t ng, std::size_t j, double y, double t);

enum class Branch {
  Auto,        // one of the three exact branches, chosen from (NG, lambda)
  Asymptotic,  // NG -> infinity with -1/2 < lambda < 0
};

enum class ResolvedBranch { NonNegativeLambda, OddNg, EvenNg, Asymptotic };

/// The exact branch that applies to (NG, lambda); total over NG >= 0, lambda > -1/2.
ResolvedBranch select_branch(std::size_t ng, double lambda);

/// Natural log of the branch factor.
double log_branch_factor(ResolvedBranch branch, std::size_t ng, double lambda,
                         const BoundConstants& constants);

struct BoundParams {
  std::size_t n;  // grid size N
  double alpha;
  double memory;
  double lambda;
  std::size_t ng;
  double zeta = 1.0;  // in (0, 1]; 1 is the supremum of the zeta factor
  BoundConstants constants{};
  Branch branch = Branch::Auto;
};

/// Bound as sign/log; sign is +1. Throws std::invalid_argument for an
/// asymptotic request with lambda >= 0 or parameters out of range.
SignedLog truncation_bound(const BoundParams& params);

struct ReportRow {
  std::string param;  // "L", "N" or "m"
  double value;
  double bound_log10;
};

struct ReportSweep {
  std::vector<double> memories{10.0, 30.0, 90.0};
  std::vector<std::size_t> grid_sizes{8, 16};
  std::vector<int> ceilings{1, 2};
  // Values held fixed while the others vary. alpha = m - gap in the m sweep.
  BoundParams base{8, 1.5, 30.0, 0.0, 100};
  double gap = 0.5;
};

std::vector<ReportRow> bound_report(const ReportSweep& sweep);

}  // namespace fgps::errorbound
