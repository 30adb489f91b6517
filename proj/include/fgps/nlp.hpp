#pragma once

// Augmented Lagrangian solver for
//
//   minimize f(x)  subject to  c_E(x) = 0,  c_I(x) <= 0,  lower <= x <= upper,
//
// with a projected limited-memory BFGS inner loop. Derivatives that a problem
// does not supply are taken by central finite differences.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fgps::nlp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

struct Problem {
  std::size_t n_vars = 0;
  ScalarFn objective;
  std::function<Vector(const Vector&)> objective_gradient;  // optional
  std::size_t n_eq = 0;
  VectorFn eq_residuals;     // required when n_eq > 0
  JacobianFn eq_jacobian;    // optional, n_eq x n_vars
  std::size_t n_ineq = 0;
  VectorFn ineq_residuals;   // c_I(x) <= 0; required when n_ineq > 0
  JacobianFn ineq_jacobian;  // optional
  Vector lower;              // empty means unbounded
  Vector upper;
};

struct SolveOptions {
  Vector x0;  // empty: all ones
  double tol_step = 1e-9;
  double tol_obj = 1e-9;
  double tol_feas = 1e-8;
  double tol_grad = 1e-6;  // projected-gradient tolerance of the inner loop
  int max_outer = 50;
  int max_inner = 500;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e10;
  double multiplier_max = 1e8;
  double fd_step = 1e-6;
  int memory = 10;  // L-BFGS pairs
  bool record_trace = false;

  void validate() const;
};

struct TraceRow {
  int outer;
  int inner;
  double objective;
  double max_eq_residual;
  double step_norm;
};

struct Result {
  Vector x;
  double objective = 0.0;
  double max_eq_residual = 0.0;
  double max_ineq_violation = 0.0;
  Vector eq_residuals;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<TraceRow> trace;
};

/// Central differences with per-coordinate step fd_step * (1 + |x_i|).
/// Throws NumericalError naming the coordinate if a probe is non-finite.
Vector gradient(const ScalarFn& f, const Vector& x, double fd_step);
Matrix jacobian(const VectorFn& f, const Vector& x, std::size_t rows, double fd_step);

/// Componentwise clamp onto [lower, upper].
Vector project(const Vector& x, const Vector& lower, const Vector& upper);

Result solve(const Problem& problem, const SolveOptions& options = {});

}  // namespace fgps::nlp
