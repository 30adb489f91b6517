#pragma once

// Periodic fractional optimal control problems and their direct transcription.
//
//   minimize   J = (1/T) int_0^T g(x, u, t) dt
//   subject to D^alpha x = f(x, u, t),  c(x, u, t) <= 0,  box bounds on x and u,
//
// with x, u T-periodic. States and controls are sampled on the N-point
// equispaced grid and D^alpha x_j is replaced by scale * Q x_j.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fgps/expr.hpp"
#include "fgps/fourier.hpp"
#include "fgps/fracderiv.hpp"
#include "fgps/gegenbauer.hpp"
#include "fgps/nlp.hpp"

namespace fgps::ocp {

struct Bound {
  double lower;
  double upper;
};

struct OcpProblem {
  std::string name;
  double period = 1.0;
  std::size_t n_x = 0;
  std::size_t n_u = 0;
  fracderiv::FractionalOrder order{0.5, 1.0};
  expr::Expr g;
  std::vector<expr::Expr> f;
  std::vector<expr::Expr> c;
  std::vector<Bound> state_bounds;
  std::vector<Bound> control_bounds;

  std::size_t n_constraints() const { return c.size(); }
  /// Throws std::invalid_argument on inconsistent arities or inverted bounds.
  void validate() const;
};

/// Builds and validates a problem from expression text.
OcpProblem make_problem(std::string name, double period, double alpha, double memory,
                        std::string_view g, const std::vector<std::string>& f,
                        const std::vector<std::string>& c, std::vector<Bound> state_bounds,
                        std::vector<Bound> control_bounds);

/// Malformed or inconsistent problem file. `where` locates the fault.
class ProblemFileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem from the JSON schema
/// {"period", "alpha", "memory", "g", "f": [...], "c": [...],
///  "state_bounds": [[lo, hi], ...], "control_bounds": [[lo, hi], ...]}.
OcpProblem problem_from_json(std::string_view text, std::string name = "custom");

inline constexpr std::string_view kBenchmarkName = "gaitsgory-proper-periodic";

/// T = pi, g = u1^2 - y1^2, f = [y2, -4 y1 - 0.3 y2 + u1], |y_i| <= 5, |u| <= 1.
OcpProblem benchmark_problem(double alpha, double memory);

std::vector<std::string> registry_names();
/// Throws std::invalid_argument for unknown names.
OcpProblem registry_lookup(std::string_view name, double alpha, double memory);

/// Finite-dimensional image of an OcpProblem. Decision vector layout:
/// x_1(t_0..t_{N-1}), ..., x_{n_x}(...), u_1(...), ..., u_{n_u}(...).
/// Residual (j, l) is stored at j * N + l.
class TranscribedNlp {
 public:
  TranscribedNlp(OcpProblem problem, std::size_t n, const gegenbauer::QuadratureRule& rule,
                 double fd_step = 1e-6);

  const OcpProblem& problem() const { return problem_; }
  const fourier::FourierGrid& grid() const { return fim_.grid; }
  const fracderiv::FgpsFim& fim() const { return fim_; }
  std::size_t n() const { return n_; }
  std::size_t n_vars() const { return n_ * (problem_.n_x + problem_.n_u); }
  std::size_t n_eq() const { return n_ * problem_.n_x; }
  std::size_t n_ineq() const { return n_ * problem_.c.size(); }
  std::size_t state_index(std::size_t j, std::size_t l) const { return j * n_ + l; }
  std::size_t control_index(std::size_t i, std::size_t l) const {
    return (problem_.n_x + i) * n_ + l;
  }

  double objective(const nlp::Vector& x) const;
  nlp::Vector objective_gradient(const nlp::Vector& x) const;
  nlp::Vector eq_residuals(const nlp::Vector& x) const;
  nlp::Matrix eq_jacobian(const nlp::Vector& x) const;
  nlp::Vector ineq_residuals(const nlp::Vector& x) const;
  nlp::Matrix ineq_jacobian(const nlp::Vector& x) const;
  nlp::Vector lower() const;
  nlp::Vector upper() const;

  /// Solver view; refers to *this, which must outlive it.
  nlp::Problem as_problem() const;

 private:
  struct NodeValues {
    std::vector<double> y;
    std::vector<double> u;
  };
  NodeValues node_values(const nlp::Vector& x, std::size_t l) const;
  double eval_at(const expr::Expr& e, const char* role, std::size_t index,
                 const NodeValues& v, std::size_t l) const;
  // Central-difference derivatives of e at node l w.r.t. (y, u).
  std::vector<double> local_gradient(const expr::Expr& e, const char* role, std::size_t index,
                                     NodeValues v, std::size_t l) const;

  OcpProblem problem_;
  std::size_t n_;
  fracderiv::FgpsFim fim_;
  double fd_step_;
};

struct OcpSolution {
  Eigen::MatrixXd states;    // N x n_x
  Eigen::MatrixXd controls;  // N x n_u
  nlp::Vector decision;
  double objective = 0.0;
  std::vector<double> adfe;  // N * n_x, residual (j, l) at j * N + l
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<nlp::TraceRow> trace;
  nlp::Vector solver_residuals;

  double max_adfe() const;
  /// Largest ADFE among the residuals at node l.
  double max_adfe_at_node(std::size_t l) const;
};

/// |eq residual| at every (state, node) from a freshly built integration matrix.
std::vector<double> adfe(const OcpProblem& problem, std::size_t n,
                         const gegenbauer::QuadratureRule& rule, const nlp::Vector& x);

struct OcpSolveOptions {
  nlp::SolveOptions nlp;
  /// Besides the given start (or all ones), also try all ones with negated
  /// controls, the box midpoint, and all ones with a first-harmonic control.
  bool restarts = true;
};

/// Deterministic start vectors in the order they are tried.
std::vector<nlp::Vector> start_points(const TranscribedNlp& nlp, const OcpSolveOptions& options);

OcpSolution solve(const TranscribedNlp& nlp, const OcpSolveOptions& options = {});
OcpSolution solve(const OcpProblem& problem, std::size_t n,
                  const gegenbauer::QuadratureRule& rule, const OcpSolveOptions& options = {});

struct AlphaRun {
  double alpha;
  std::optional<OcpSolution> solution;
  std::string error;
};

/// Solves family(alpha) for each alpha in turn, warm-starting each solve from
/// the previous solution. A failure is recorded and the sweep continues.
std::vector<AlphaRun> evolve_alpha(const std::function<OcpProblem(double)>& family,
                                   const std::vector<double>& alphas, std::size_t n,
                                   const gegenbauer::QuadratureRule& rule,
                                   const OcpSolveOptions& options = {});

}  // namespace fgps::ocp
