#include "fgps/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numbers>

#include "fgps/common.hpp"

namespace fgps::ocp {

void OcpProblem::validate() const {
  if (!(period > 0.0)) throw std::invalid_argument("problem period must be positive");
  if (f.size() != n_x) {
    throw std::invalid_argument("problem has " + std::to_string(f.size()) +
                                " dynamics expressions for " + std::to_string(n_x) + " states");
  }
  if (state_bounds.size() != n_x || control_bounds.size() != n_u) {
    throw std::invalid_argument("bound count does not match state/control arity");
  }
  const auto check_arity = [&](const expr::Expr& e, const std::string& what) {
    if (e.n_x() != n_x || e.n_u() != n_u) {
      throw std::invalid_argument(what + " was parsed with a different arity");
    }
  };
  check_arity(g, "objective integrand");
  for (std::size_t j = 0; j < f.size(); ++j) check_arity(f[j], "dynamics f" + std::to_string(j + 1));
  for (std::size_t p = 0; p < c.size(); ++p) check_arity(c[p], "constraint c" + std::to_string(p + 1));
  for (const auto* bounds : {&state_bounds, &control_bounds}) {
    for (const Bound& b : *bounds) {
      if (!(b.lower <= b.upper)) throw std::invalid_argument("bound with lower > upper");
    }
  }
}

OcpProblem make_problem(std::string name, double period, double alpha, double memory,
                        std::string_view g, const std::vector<std::string>& f,
                        const std::vector<std::string>& c, std::vector<Bound> state_bounds,
                        std::vector<Bound> control_bounds) {
  OcpProblem p;
  p.name = std::move(name);
  p.period = period;
  p.n_x = f.size();
  p.n_u = control_bounds.size();
  p.order = fracderiv::FractionalOrder(alpha, memory);
  p.g = expr::parse(g, p.n_x, p.n_u);
  for (const auto& text : f) p.f.push_back(expr::parse(text, p.n_x, p.n_u));
  for (const auto& text : c) p.c.push_back(expr::parse(text, p.n_x, p.n_u));
  p.state_bounds = std::move(state_bounds);
  p.control_bounds = std::move(control_bounds);
  p.validate();
  return p;
}

namespace {

std::vector<Bound> bounds_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  std::vector<Bound> out;
  for (const auto& pair : j.at(key)) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ProblemFileError(std::string("'") + key + "' entries must be [lo, hi] pairs");
    }
    out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

}  // namespace

OcpProblem problem_from_json(std::string_view text, std::string name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProblemFileError("malformed problem JSON at byte " + std::to_string(e.byte) + ": " +
                           e.what());
  }
  try {
    for (const char* key : {"period", "alpha", "memory", "g", "f"}) {
      if (!j.contains(key)) throw ProblemFileError(std::string("problem JSON lacks '") + key + "'");
    }
    std::vector<std::string> f = j.at("f").get<std::vector<std::string>>();
    std::vector<std::string> c;
    if (j.contains("c")) c = j.at("c").get<std::vector<std::string>>();
    auto state_bounds = bounds_from_json(j, "state_bounds");
    auto control_bounds = bounds_from_json(j, "control_bounds");
    if (state_bounds.empty()) {
      const double inf = std::numeric_limits<double>::infinity();
      state_bounds.assign(f.size(), Bound{-inf, inf});
    }
    return make_problem(std::move(name), j.at("period").get<double>(),
                        j.at("alpha").get<double>(), j.at("memory").get<double>(),
                        j.at("g").get<std::string>(), f, c, std::move(state_bounds),
                        std::move(control_bounds));
  } catch (const nlohmann::json::exception& e) {
    throw ProblemFileError(std::string("invalid problem JSON: ") + e.what());
  } catch (const expr::SyntaxError& e) {
    throw ProblemFileError(std::string("expression syntax error: ") + e.what());
  } catch (const expr::ArityError& e) {
    throw ProblemFileError(std::string("expression arity error: ") + e.what());
  }
}

OcpProblem benchmark_problem(double alpha, double memory) {
  return make_problem(std::string(kBenchmarkName), std::numbers::pi, alpha, memory,
                      "u1^2 - y1^2", {"y2", "-4*y1 - 0.3*y2 + u1"}, {},
                      {{-5.0, 5.0}, {-5.0, 5.0}}, {{-1.0, 1.0}});
}

std::vector<std::string> registry_names() { return {std::string(kBenchmarkName)}; }

OcpProblem registry_lookup(std::string_view name, double alpha, double memory) {
  if (name == kBenchmarkName) return benchmark_problem(alpha, memory);
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

TranscribedNlp::TranscribedNlp(OcpProblem problem, std::size_t n,
                               const gegenbauer::QuadratureRule& rule, double fd_step)
    : problem_(std::move(problem)),
      n_(n),
      fim_(fracderiv::build_fim(fourier::FourierGrid(problem_.period, n), rule, problem_.order)),
      fd_step_(fd_step) {
  problem_.validate();
}

TranscribedNlp::NodeValues TranscribedNlp::node_values(const nlp::Vector& x,
                                                        std::size_t l) const {
  NodeValues v{std::vector<double>(problem_.n_x), std::vector<double>(problem_.n_u)};
  for (std::size_t j = 0; j < problem_.n_x; ++j) {
    v.y[j] = x(static_cast<Eigen::Index>(state_index(j, l)));
  }
  for (std::size_t i = 0; i < problem_.n_u; ++i) {
    v.u[i] = x(static_cast<Eigen::Index>(control_index(i, l)));
  }
  return v;
}

double TranscribedNlp::eval_at(const expr::Expr& e, const char* role, std::size_t index,
                               const NodeValues& v, std::size_t l) const {
  try {
    return e.eval({grid().node(l), v.y, v.u});
  } catch (const expr::EvalError& err) {
    std::string what = role;
    if (index > 0) what += std::to_string(index);
    throw NumericalError(what + " = '" + e.source() + "' failed at node " + std::to_string(l) +
                         ": " + err.what());
  }
}

std::vector<double> TranscribedNlp::local_gradient(const expr::Expr& e, const char* role,
                                                   std::size_t index, NodeValues v,
                                                   std::size_t l) const {
  std::vector<double> grad;
  grad.reserve(problem_.n_x + problem_.n_u);
  for (auto* values : {&v.y, &v.u}) {
    for (double& value : *values) {
      const double saved = value;
      const double h = fd_step_ * (1.0 + std::fabs(saved));
      value = saved + h;
      const double up = eval_at(e, role, index, v, l);
      value = saved - h;
      const double down = eval_at(e, role, index, v, l);
      value = saved;
      grad.push_back((up - down) / (2.0 * h));
    }
  }
  return grad;
}

double TranscribedNlp::objective(const nlp::Vector& x) const {
  double sum = 0.0;
  for (std::size_t l = 0; l < n_; ++l) sum += eval_at(problem_.g, "g", 0, node_values(x, l), l);
  return sum / static_cast<double>(n_);
}

nlp::Vector TranscribedNlp::objective_gradient(const nlp::Vector& x) const {
  nlp::Vector grad = nlp::Vector::Zero(static_cast<Eigen::Index>(n_vars()));
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t l = 0; l < n_; ++l) {
    const auto local = local_gradient(problem_.g, "g", 0, node_values(x, l), l);
    for (std::size_t k = 0; k < problem_.n_x; ++k) {
      grad(static_cast<Eigen::Index>(state_index(k, l))) = inv_n * local[k];
    }
    for (std::size_t k = 0; k < problem_.n_u; ++k) {
      grad(static_cast<Eigen::Index>(control_index(k, l))) = inv_n * local[problem_.n_x + k];
    }
  }
  return grad;
}

nlp::Vector TranscribedNlp::eq_residuals(const nlp::Vector& x) const {
  const auto n = static_cast<Eigen::Index>(n_);
  nlp::Vector r(static_cast<Eigen::Index>(n_eq()));
  for (std::size_t j = 0; j < problem_.n_x; ++j) {
    const auto offset = static_cast<Eigen::Index>(state_index(j, 0));
    r.segment(offset, n).noalias() = fim_.scale * (fim_.entries * x.segment(offset, n));
  }
  for (std::size_t l = 0; l < n_; ++l) {
    const NodeValues v = node_values(x, l);
    for (std::size_t j = 0; j < problem_.n_x; ++j) {
      r(static_cast<Eigen::Index>(state_index(j, l))) -= eval_at(problem_.f[j], "f", j + 1, v, l);
    }
  }
  return r;
}

nlp::Matrix TranscribedNlp::eq_jacobian(const nlp::Vector& x) const {
  const auto n = static_cast<Eigen::Index>(n_);
  nlp::Matrix jac = nlp::Matrix::Zero(static_cast<Eigen::Index>(n_eq()),
                                      static_cast<Eigen::Index>(n_vars()));
  for (std::size_t j = 0; j < problem_.n_x; ++j) {
    const auto offset = static_cast<Eigen::Index>(state_index(j, 0));
    jac.block(offset, offset, n, n) = fim_.scale * fim_.entries;
  }
  for (std::size_t l = 0; l < n_; ++l) {
    const NodeValues v = node_values(x, l);
    for (std::size_t j = 0; j < problem_.n_x; ++j) {
      const auto row = static_cast<Eigen::Index>(state_index(j, l));
      const auto local = local_gradient(problem_.f[j], "f", j + 1, v, l);
      for (std::size_t k = 0; k < problem_.n_x; ++k) {
        jac(row, static_cast<Eigen::Index>(state_index(k, l))) -= local[k];
      }
      for (std::size_t k = 0; k < problem_.n_u; ++k) {
        jac(row, static_cast<Eigen::Index>(control_index(k, l))) -= local[problem_.n_x + k];
      }
    }
  }
  return jac;
}

nlp::Vector TranscribedNlp::ineq_residuals(const nlp::Vector& x) const {
  nlp::Vector r(static_cast<Eigen::Index>(n_ineq()));
  for (std::size_t l = 0; l < n_; ++l) {
    const NodeValues v = node_values(x, l);
    for (std::size_t p = 0; p < problem_.c.size(); ++p) {
      r(static_cast<Eigen::Index>(p * n_ + l)) = eval_at(problem_.c[p], "c", p + 1, v, l);
    }
  }
  return r;
}

nlp::Matrix TranscribedNlp::ineq_jacobian(const nlp::Vector& x) const {
  nlp::Matrix jac = nlp::Matrix::Zero(static_cast<Eigen::Index>(n_ineq()),
                                      static_cast<Eigen::Index>(n_vars()));
  for (std::size_t l = 0; l < n_; ++l) {
    const NodeValues v = node_values(x, l);
    for (std::size_t p = 0; p < problem_.c.size(); ++p) {
      const auto row = static_cast<Eigen::Index>(p * n_ + l);
      const auto local = local_gradient(problem_.c[p], "c", p + 1, v, l);
      for (std::size_t k = 0; k < problem_.n_x; ++k) {
        jac(row, static_cast<Eigen::Index>(state_index(k, l))) = local[k];
      }
      for (std::size_t k = 0; k < problem_.n_u; ++k) {
        jac(row, static_cast<Eigen::Index>(control_index(k, l))) = local[problem_.n_x + k];
      }
    }
  }
  return jac;
}

nlp::Vector TranscribedNlp::lower() const {
  nlp::Vector lo(static_cast<Eigen::Index>(n_vars()));
  for (std::size_t l = 0; l < n_; ++l) {
    for (std::size_t j = 0; j < problem_.n_x; ++j) {
      lo(static_cast<Eigen::Index>(state_index(j, l))) = problem_.state_bounds[j].lower;
    }
    for (std::size_t i = 0; i < problem_.n_u; ++i) {
      lo(static_cast<Eigen::Index>(control_index(i, l))) = problem_.control_bounds[i].lower;
    }
  }
  return lo;
}

nlp::Vector TranscribedNlp::upper() const {
  nlp::Vector hi(static_cast<Eigen::Index>(n_vars()));
  for (std::size_t l = 0; l < n_; ++l) {
    for (std::size_t j = 0; j < problem_.n_x; ++j) {
      hi(static_cast<Eigen::Index>(state_index(j, l))) = problem_.state_bounds[j].upper;
    }
    for (std::size_t i = 0; i < problem_.n_u; ++i) {
      hi(static_cast<Eigen::Index>(control_index(i, l))) = problem_.control_bounds[i].upper;
    }
  }
  return hi;
}

nlp::Problem TranscribedNlp::as_problem() const {
  nlp::Problem p;
  p.n_vars = n_vars();
  p.objective = [this](const nlp::Vector& x) { return objective(x); };
  p.objective_gradient = [this](const nlp::Vector& x) { return objective_gradient(x); };
  p.n_eq = n_eq();
  p.eq_residuals = [this](const nlp::Vector& x) { return eq_residuals(x); };
  p.eq_jacobian = [this](const nlp::Vector& x) { return eq_jacobian(x); };
  p.n_ineq = n_ineq();
  if (p.n_ineq > 0) {
    p.ineq_residuals = [this](const nlp::Vector& x) { return ineq_residuals(x); };
    p.ineq_jacobian = [this](const nlp::Vector& x) { return ineq_jacobian(x); };
  }
  p.lower = lower();
  p.upper = upper();
  return p;
}

// ---------------------------------------------------------------------------

double OcpSolution::max_adfe() const {
  return adfe.empty() ? 0.0 : *std::max_element(adfe.begin(), adfe.end());
}

double OcpSolution::max_adfe_at_node(std::size_t l) const {
  const auto n = static_cast<std::size_t>(states.rows());
  double worst = 0.0;
  for (std::size_t j = 0; j * n + l < adfe.size(); ++j) worst = std::max(worst, adfe[j * n + l]);
  return worst;
}

std::vector<double> adfe(const OcpProblem& problem, std::size_t n,
                         const gegenbauer::QuadratureRule& rule, const nlp::Vector& x) {
  const TranscribedNlp fresh(problem, n, rule);
  if (x.size() != static_cast<Eigen::Index>(fresh.n_vars())) {
    throw std::invalid_argument("adfe: decision vector has the wrong length");
  }
  const nlp::Vector r = fresh.eq_residuals(x);
  std::vector<double> out(static_cast<std::size_t>(r.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) out[static_cast<std::size_t>(i)] = std::fabs(r(i));
  return out;
}

std::vector<nlp::Vector> start_points(const TranscribedNlp& nlp, const OcpSolveOptions& options) {
  const auto n_vars = static_cast<Eigen::Index>(nlp.n_vars());
  const auto& problem = nlp.problem();
  std::vector<nlp::Vector> starts;
  starts.push_back(options.nlp.x0.size() == n_vars ? options.nlp.x0 : nlp::Vector::Ones(n_vars));
  if (!options.restarts) return starts;

  nlp::Vector negated = nlp::Vector::Ones(n_vars);
  nlp::Vector midpoint = nlp::Vector::Zero(n_vars);
  nlp::Vector harmonic = nlp::Vector::Ones(n_vars);
  const nlp::Vector lo = nlp.lower();
  const nlp::Vector hi = nlp.upper();
  for (Eigen::Index i = 0; i < n_vars; ++i) {
    if (std::isfinite(lo(i)) && std::isfinite(hi(i))) midpoint(i) = 0.5 * (lo(i) + hi(i));
  }
  for (std::size_t l = 0; l < nlp.n(); ++l) {
    const double phase = nlp.grid().omega(1.0) * nlp.grid().node(l);
    for (std::size_t i = 0; i < problem.n_u; ++i) {
      const auto k = static_cast<Eigen::Index>(nlp.control_index(i, l));
      negated(k) = -1.0;
      harmonic(k) = std::cos(phase);
    }
  }
  // The all-ones, negated and midpoint starts are constant in time; for an
  // autonomous problem the iterates then stay constant. The harmonic start
  // lets the solver leave that invariant set.
  starts.push_back(negated);
  starts.push_back(midpoint);
  starts.push_back(harmonic);
  return starts;
}

namespace {

OcpSolution package(const TranscribedNlp& nlp, const nlp::Result& r) {
  const auto n = static_cast<Eigen::Index>(nlp.n());
  const auto& problem = nlp.problem();
  OcpSolution sol;
  sol.states.resize(n, static_cast<Eigen::Index>(problem.n_x));
  sol.controls.resize(n, static_cast<Eigen::Index>(problem.n_u));
  for (Eigen::Index l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < problem.n_x; ++j) {
      sol.states(l, static_cast<Eigen::Index>(j)) =
          r.x(static_cast<Eigen::Index>(nlp.state_index(j, static_cast<std::size_t>(l))));
    }
    for (std::size_t i = 0; i < problem.n_u; ++i) {
      sol.controls(l, static_cast<Eigen::Index>(i)) =
          r.x(static_cast<Eigen::Index>(nlp.control_index(i, static_cast<std::size_t>(l))));
    }
  }
  sol.decision = r.x;
  sol.objective = r.objective;
  sol.iterations = r.inner_iterations;
  sol.converged = r.converged;
  sol.message = r.message;
  sol.trace = r.trace;
  sol.solver_residuals = r.eq_residuals;
  sol.adfe = adfe(problem, nlp.n(), nlp.fim().rule, r.x);
  return sol;
}

// Feasible beats infeasible; among feasible runs the lower objective wins.
bool better(const nlp::Result& a, const nlp::Result& b, double feas_tol) {
  const double va = std::max(a.max_eq_residual, a.max_ineq_violation);
  const double vb = std::max(b.max_eq_residual, b.max_ineq_violation);
  const bool fa = va <= feas_tol;
  const bool fb = vb <= feas_tol;
  if (fa != fb) return fa;
  if (!fa) return va < vb;
  return a.objective < b.objective - 1e-12;
}

}  // namespace

OcpSolution solve(const TranscribedNlp& nlp, const OcpSolveOptions& options) {
  const nlp::Problem problem = nlp.as_problem();
  std::optional<nlp::Result> best;
  for (const nlp::Vector& start : start_points(nlp, options)) {
    nlp::SolveOptions opts = options.nlp;
    opts.x0 = start;
    nlp::Result r = nlp::solve(problem, opts);
    if (!best || better(r, *best, std::max(opts.tol_feas, 1e-6))) best = std::move(r);
  }
  return package(nlp, *best);
}

OcpSolution solve(const OcpProblem& problem, std::size_t n,
                  const gegenbauer::QuadratureRule& rule, const OcpSolveOptions& options) {
  const TranscribedNlp nlp(problem, n, rule, options.nlp.fd_step);
  return solve(nlp, options);
}

std::vector<AlphaRun> evolve_alpha(const std::function<OcpProblem(double)>& family,
                                   const std::vector<double>& alphas, std::size_t n,
                                   const gegenbauer::QuadratureRule& rule,
                                   const OcpSolveOptions& options) {
  std::vector<AlphaRun> runs;
  std::optional<nlp::Vector> warm;
  for (double alpha : alphas) {
    AlphaRun run{alpha, std::nullopt, {}};
    try {
      OcpSolveOptions opts = options;
      if (warm) opts.nlp.x0 = *warm;
      run.solution = solve(family(alpha), n, rule, opts);
      warm = run.solution->decision;
    } catch (const std::exception& e) {
      run.error = e.what();
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace fgps::ocp
