#include "fgps/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <Eigen/Cholesky>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fgps/common.hpp"

namespace fgps::nlp {

void SolveOptions::validate() const {
  if (!(tol_step > 0 && tol_obj > 0 && tol_feas > 0 && tol_grad > 0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(penalty_growth > 1.0)) throw std::invalid_argument("penalty_growth must exceed 1");
  if (!(penalty_init > 0.0)) throw std::invalid_argument("penalty_init must be positive");
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
  if (max_outer < 1 || max_inner < 1 || memory < 1) {
    throw std::invalid_argument("iteration limits and memory must be positive");
  }
}

Vector gradient(const ScalarFn& f, const Vector& x, double fd_step) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step * (1.0 + std::fabs(x(i)));
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericalError("gradient: non-finite probe at coordinate " + std::to_string(i));
    }
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

Matrix jacobian(const VectorFn& f, const Vector& x, std::size_t rows, double fd_step) {
  Matrix jac(static_cast<Eigen::Index>(rows), x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step * (1.0 + std::fabs(x(i)));
    probe(i) = x(i) + h;
    const Vector up = f(probe);
    probe(i) = x(i) - h;
    const Vector down = f(probe);
    probe(i) = x(i);
    if (!up.allFinite() || !down.allFinite()) {
      throw NumericalError("jacobian: non-finite probe at coordinate " + std::to_string(i));
    }
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

Vector project(const Vector& x, const Vector& lower, const Vector& upper) {
  Vector out = x;
  if (lower.size() == x.size()) out = out.cwiseMax(lower);
  if (upper.size() == x.size()) out = out.cwiseMin(upper);
  return out;
}

namespace {

struct Multipliers {
  Vector eq;
  Vector ineq;
  double penalty;
};

// Augmented Lagrangian value and gradient for fixed multipliers.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const Problem& p, const SolveOptions& o) : p_(p), o_(o) {}

  double value(const Vector& x, const Multipliers& mult) const {
    double v = p_.objective(x);
    if (!std::isfinite(v)) throw NumericalError("non-finite objective value");
    if (p_.n_eq > 0) {
      const Vector c = p_.eq_residuals(x);
      v += mult.eq.dot(c) + 0.5 * mult.penalty * c.squaredNorm();
    }
    if (p_.n_ineq > 0) {
      const Vector g = p_.ineq_residuals(x);
      const Vector shifted = (mult.ineq + mult.penalty * g).cwiseMax(0.0);
      v += (shifted.squaredNorm() - mult.ineq.squaredNorm()) / (2.0 * mult.penalty);
    }
    if (!std::isfinite(v)) throw NumericalError("non-finite augmented Lagrangian value");
    return v;
  }

  Vector grad(const Vector& x, const Multipliers& mult) const {
    Vector g = p_.objective_gradient ? p_.objective_gradient(x)
                                     : gradient(p_.objective, x, o_.fd_step);
    if (p_.n_eq > 0) {
      const Vector c = p_.eq_residuals(x);
      const Matrix jac = p_.eq_jacobian ? p_.eq_jacobian(x)
                                        : jacobian(p_.eq_residuals, x, p_.n_eq, o_.fd_step);
      g.noalias() += jac.transpose() * (mult.eq + mult.penalty * c);
    }
    if (p_.n_ineq > 0) {
      const Vector c = p_.ineq_residuals(x);
      const Matrix jac = p_.ineq_jacobian
                             ? p_.ineq_jacobian(x)
                             : jacobian(p_.ineq_residuals, x, p_.n_ineq, o_.fd_step);
      g.noalias() += jac.transpose() * (mult.ineq + mult.penalty * c).cwiseMax(0.0);
    }
    if (!g.allFinite()) throw NumericalError("non-finite gradient");
    return g;
  }

 private:
  const Problem& p_;
  const SolveOptions& o_;
};

struct InnerResult {
  int iterations = 0;
  bool converged = false;
};

// Initial inverse-Hessian model for the two-loop recursion: the Gauss-Newton
// part of the augmented Lagrangian, penalty * J^T J, plus sigma I for the
// objective. Applied on the free variables only.
class Preconditioner {
 public:
  Preconditioner(Matrix gauss_newton, double sigma)
      : gauss_newton_(std::move(gauss_newton)), sigma_(sigma) {}

  Vector apply(const Vector& q, const std::vector<Eigen::Index>& free) {
    if (free != free_) factor(free);
    Vector rhs(static_cast<Eigen::Index>(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = q(free[i]);
    const Vector sol = llt_.solve(rhs);
    Vector out = Vector::Zero(q.size());
    for (std::size_t i = 0; i < free.size(); ++i) out(free[i]) = sol(static_cast<Eigen::Index>(i));
    return out;
  }

 private:
  void factor(const std::vector<Eigen::Index>& free) {
    free_ = free;
    const auto k = static_cast<Eigen::Index>(free.size());
    Matrix reduced(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) reduced(a, b) = gauss_newton_(free[a], free[b]);
      reduced(a, a) += sigma_;
    }
    llt_.compute(reduced);
  }

  Matrix gauss_newton_;
  double sigma_;
  std::vector<Eigen::Index> free_{-1};
  Eigen::LLT<Matrix> llt_;
};

// Projected L-BFGS. Variables held at a bound by the gradient are frozen for
// the direction computation; the step is projected back onto the box.
InnerResult minimize_box(const AugmentedLagrangian& al, const Multipliers& mult,
                         const Vector& lower, const Vector& upper, const SolveOptions& o,
                         Preconditioner* precond, Vector& x) {
  const Eigen::Index n = x.size();
  const bool has_lower = lower.size() == n;
  const bool has_upper = upper.size() == n;
  std::deque<std::pair<Vector, Vector>> history;

  double f = al.value(x, mult);
  Vector g = al.grad(x, mult);
  InnerResult result;
  std::vector<Eigen::Index> free;

  for (int it = 0; it < o.max_inner; ++it) {
    result.iterations = it + 1;
    const Vector pg = x - project(x - g, lower, upper);
    if (pg.lpNorm<Eigen::Infinity>() <= o.tol_grad) {
      result.converged = true;
      return result;
    }

    Vector mask = Vector::Ones(n);
    free.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lower = has_lower && x(i) <= lower(i) && g(i) > 0;
      const bool at_upper = has_upper && x(i) >= upper(i) && g(i) < 0;
      if (at_lower || at_upper) {
        mask(i) = 0.0;
      } else {
        free.push_back(i);
      }
    }

    // Two-loop recursion restricted to the free variables.
    Vector q = g.cwiseProduct(mask);
    const std::size_t k = history.size();
    std::vector<double> rho(k), a(k);
    for (std::size_t i = k; i-- > 0;) {
      const Vector s = history[i].first.cwiseProduct(mask);
      const Vector y = history[i].second.cwiseProduct(mask);
      const double sy = s.dot(y);
      rho[i] = sy > 0 ? 1.0 / sy : 0.0;
      a[i] = rho[i] * s.dot(q);
      q -= a[i] * y;
    }
    if (precond) {
      q = precond->apply(q, free);
    } else if (k > 0) {
      const Vector s = history.back().first.cwiseProduct(mask);
      const Vector y = history.back().second.cwiseProduct(mask);
      const double yy = y.squaredNorm();
      if (yy > 0 && s.dot(y) > 0) q *= s.dot(y) / yy;
    }
    for (std::size_t i = 0; i < k; ++i) {
      const Vector s = history[i].first.cwiseProduct(mask);
      const Vector y = history[i].second.cwiseProduct(mask);
      const double b = rho[i] * y.dot(q);
      q += (a[i] - b) * s;
    }
    Vector d = -q.cwiseProduct(mask);
    double slope = g.dot(d);
    if (!(slope < 0)) {
      history.clear();
      d = -g.cwiseProduct(mask);
      slope = g.dot(d);
    }

    double t = 1.0;
    if (history.empty() && !precond) {
      t = std::min(1.0, 1.0 / std::max(d.lpNorm<Eigen::Infinity>(), 1e-300));
    }

    bool accepted = false;
    Vector x_new;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = project(x + t * d, lower, upper);
      const double decrease = g.dot(x_new - x);
      if (decrease < 0) {
        f_new = al.value(x_new, mult);
        if (f_new <= f + 1e-4 * decrease) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!history.empty()) {
        history.clear();
        continue;
      }
      return result;  // no descent possible at this precision
    }

    const Vector g_new = al.grad(x_new, mult);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      history.emplace_back(s, y);
      if (static_cast<int>(history.size()) > o.memory) history.pop_front();
    }
    const double change = std::fabs(f - f_new);
    x = x_new;
    f = f_new;
    g = g_new;
    if (s.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>()) &&
        change <= 1e-16 * (1.0 + std::fabs(f))) {
      return result;
    }
  }
  return result;
}

// Objective curvature scale from one directional difference of the gradient.
double curvature_scale(const Problem& p, const SolveOptions& o, const Vector& x) {
  const auto grad = [&](const Vector& z) {
    return p.objective_gradient ? p.objective_gradient(z) : gradient(p.objective, z, o.fd_step);
  };
  const Eigen::Index n = x.size();
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(n));
  const double h = 1e-4 * (1.0 + x.lpNorm<Eigen::Infinity>());
  const double c = (grad(x + h * v) - grad(x)).norm() / h;
  return std::isfinite(c) ? std::max(c, 1e-8) : 1.0;
}

Preconditioner make_preconditioner(const Problem& p, const SolveOptions& o,
                                   const Multipliers& mult, const Vector& x) {
  const Eigen::Index n = x.size();
  Matrix gn = Matrix::Zero(n, n);
  if (p.n_eq > 0) {
    const Matrix jac = p.eq_jacobian ? p.eq_jacobian(x) : jacobian(p.eq_residuals, x, p.n_eq, o.fd_step);
    gn.noalias() += mult.penalty * jac.transpose() * jac;
  }
  if (p.n_ineq > 0) {
    const Matrix jac = p.ineq_jacobian ? p.ineq_jacobian(x)
                                       : jacobian(p.ineq_residuals, x, p.n_ineq, o.fd_step);
    const Vector gi = p.ineq_residuals(x);
    for (Eigen::Index r = 0; r < jac.rows(); ++r) {
      if (mult.ineq(r) + mult.penalty * gi(r) > 0) {
        gn.noalias() += mult.penalty * jac.row(r).transpose() * jac.row(r);
      }
    }
  }
  return Preconditioner(std::move(gn), curvature_scale(p, o, x));
}

}  // namespace

Result solve(const Problem& problem, const SolveOptions& options) {
  options.validate();
  const auto n = static_cast<Eigen::Index>(problem.n_vars);
  if (!problem.objective) throw std::invalid_argument("solve: problem has no objective");
  if (problem.n_eq > 0 && !problem.eq_residuals) {
    throw std::invalid_argument("solve: equality residuals missing");
  }
  if (problem.n_ineq > 0 && !problem.ineq_residuals) {
    throw std::invalid_argument("solve: inequality residuals missing");
  }
  if ((problem.lower.size() != 0 && problem.lower.size() != n) ||
      (problem.upper.size() != 0 && problem.upper.size() != n)) {
    throw std::invalid_argument("solve: bound vectors have the wrong length");
  }
  Vector x0 = options.x0.size() == 0 ? Vector::Ones(n) : options.x0;
  if (x0.size() != n) {
    throw std::invalid_argument("solve: x0 has length " + std::to_string(x0.size()) +
                                ", expected " + std::to_string(n));
  }

  const AugmentedLagrangian al(problem, options);
  Multipliers mult{Vector::Zero(static_cast<Eigen::Index>(problem.n_eq)),
                   Vector::Zero(static_cast<Eigen::Index>(problem.n_ineq)),
                   options.penalty_init};

  Result result;
  Vector x = project(x0, problem.lower, problem.upper);
  Vector x_prev = x;
  double obj_prev = problem.objective(x);
  double viol_prev = std::numeric_limits<double>::infinity();

  for (int outer = 1; outer <= options.max_outer; ++outer) {
    Preconditioner precond = make_preconditioner(problem, options, mult, x);
    const InnerResult inner =
        minimize_box(al, mult, problem.lower, problem.upper, options, &precond, x);
    result.inner_iterations += inner.iterations;
    result.outer_iterations = outer;

    const double obj = problem.objective(x);
    if (!std::isfinite(obj)) throw NumericalError("non-finite objective value");
    Vector c = problem.n_eq > 0 ? problem.eq_residuals(x) : Vector();
    Vector gi = problem.n_ineq > 0 ? problem.ineq_residuals(x) : Vector();
    const double viol_eq = c.size() > 0 ? c.lpNorm<Eigen::Infinity>() : 0.0;
    const double viol_in = gi.size() > 0 ? std::max(0.0, gi.maxCoeff()) : 0.0;
    const double viol = std::max(viol_eq, viol_in);
    // An outer step that loses feasibility is retried from the previous
    // iterate with a larger penalty.
    if (viol > options.tol_feas && viol > 1.1 * viol_prev && mult.penalty < options.penalty_max) {
      mult.penalty = std::min(mult.penalty * options.penalty_growth, options.penalty_max);
      x = x_prev;
      continue;
    }
    const double step = (x - x_prev).norm();
    const double obj_change = std::fabs(obj - obj_prev);

    if (options.record_trace) {
      result.trace.push_back({outer, inner.iterations, obj, viol_eq, step});
    }
    result.x = x;
    result.objective = obj;
    result.max_eq_residual = viol_eq;
    result.max_ineq_violation = viol_in;
    result.eq_residuals = c;

    if (viol <= options.tol_feas &&
        (step < options.tol_step || obj_change < options.tol_obj || inner.converged)) {
      result.converged = true;
      result.message = "converged";
      return result;
    }

    const double cap = options.multiplier_max;
    if (problem.n_eq > 0) {
      mult.eq = (mult.eq + mult.penalty * c).cwiseMax(-cap).cwiseMin(cap);
    }
    if (problem.n_ineq > 0) {
      mult.ineq = (mult.ineq + mult.penalty * gi).cwiseMax(0.0).cwiseMin(cap);
    }
    if (viol > 0.25 * viol_prev) {
      mult.penalty = std::min(mult.penalty * options.penalty_growth, options.penalty_max);
    }
    viol_prev = viol;
    x_prev = x;
    obj_prev = obj;
  }
  result.message = "iteration limit reached";
  return result;
}

}  // namespace fgps::nlp
