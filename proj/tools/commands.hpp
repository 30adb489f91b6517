#pragma once

// Subcommands of the fgps executable. Each returns a process exit code:
// 0 success, 1 numerical non-convergence, 2 input error.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgps/nlp.hpp"

namespace fgps::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNonConvergence = 1;
inline constexpr int kExitInput = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string out_dir;  // empty: $FGPS_OUT_DIR, then "."
  bool svg = false;
  int jobs = 1;
  std::uint64_t seed = 42;
  bool verify = false;  // spot-check the circulant integration matrix
};

struct QuadratureArgs {
  std::size_t ng = 1000;
  double lambda = 0.0;
};

struct NodesArgs {
  std::size_t ng = 0;
  double lambda = 0.0;
};

struct FracderivArgs {
  std::string f = "sin";  // sin, cos or an expression in t
  double alpha = 1.5;
  double memory = 30.0;
  std::size_t n = 100;
  double period = 2.0 * std::numbers::pi;
  QuadratureArgs quad;
};

struct ConvergenceArgs {
  std::string f = "sin";
  std::vector<double> alphas{1.1, 1.3, 1.5, 1.7, 1.9, 1.99};
  std::vector<std::size_t> ns{4, 12, 40, 100};
  double memory = 30.0;
  double period = 2.0 * std::numbers::pi;
  QuadratureArgs quad;
};

struct BoundArgs {
  std::size_t n = 8;
  double alpha = 1.5;
  double memory = 30.0;
  double lambda = 0.0;
  std::size_t ng = 100;
  double zeta = 1.0;
  double gap = 0.5;
  double d_lambda = 1.0;
  double b1_lambda = 1.0;
  std::string branch = "auto";
};

struct ProblemArgs {
  std::string problem = "gaitsgory-proper-periodic";  // registry name or JSON file
  std::optional<double> memory;
  std::size_t n = 100;
  QuadratureArgs quad;
  nlp::SolveOptions nlp;
  bool trace = false;
};

struct SolveArgs {
  ProblemArgs base;
  std::optional<double> alpha;
};

struct SweepArgs {
  ProblemArgs base;
  std::vector<double> alphas{0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999};
};

struct JnArgs {
  ProblemArgs base;
  std::optional<double> alpha;
  std::vector<std::size_t> ns{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
};

int cmd_nodes(const NodesArgs& args, const Common& common);
int cmd_fracderiv(const FracderivArgs& args, const Common& common);
int cmd_convergence(const ConvergenceArgs& args, const Common& common);
int cmd_bound(const BoundArgs& args, const Common& common);
int cmd_solve(const SolveArgs& args, const Common& common);
int cmd_sweep_alpha(const SweepArgs& args, const Common& common);
int cmd_jn_table(const JnArgs& args, const Common& common);

/// Runs body, mapping input errors to 2 and numerical failures to 1 with a
/// message on stderr.
int guarded(const std::function<int()>& body);

/// Shortest round-trip decimal form, used in file names.
std::string short_number(double v);
/// 17 significant digits.
std::string csv_number(double v);

}  // namespace fgps::cli
