#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "fgps/common.hpp"
#include "fgps/nlp.hpp"
#include "fgps/ocp.hpp"

using namespace fgps;
using namespace fgps::nlp;

namespace {

const gegenbauer::QuadratureRule& rule1000() {
  static const auto r = gegenbauer::make_rule(1000, gegenbauer::GegenbauerIndex(0.0));
  return r;
}

}  // namespace

TEST_SUITE("nlp") {
  TEST_CASE("finite-difference gradient") {
    const ScalarFn sq = [](const Vector& x) { return x.squaredNorm(); };
    const Vector g = gradient(sq, Vector(Eigen::Vector2d(1, 2)), 1e-6);
    CHECK(std::fabs(g(0) - 2) < 1e-7);
    CHECK(std::fabs(g(1) - 4) < 1e-7);
    const ScalarFn lin = [](const Vector& x) { return 3 * x(0) - 2 * x(1) + 0.5 * x(2); };
    const Vector gl = gradient(lin, Vector::Constant(3, 0.7), 1e-6);
    CHECK(std::fabs(gl(0) - 3) < 1e-9);
    CHECK(std::fabs(gl(1) + 2) < 1e-9);
    CHECK(std::fabs(gl(2) - 0.5) < 1e-9);

    const ScalarFn blow = [](const Vector& x) {
      return x(1) > 1 ? std::numeric_limits<double>::infinity() : x(0);
    };
    try {
      gradient(blow, Vector(Eigen::Vector2d(0, 1)), 1e-6);
      FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
    }
  }

  TEST_CASE("benchmark objective gradient matches one-sided differences") {
    const ocp::TranscribedNlp tn(ocp::benchmark_problem(0.99999, 30.0), 20, rule1000());
    const Vector x = Vector::Ones(static_cast<Eigen::Index>(tn.n_vars()));
    const Vector g = gradient([&](const Vector& z) { return tn.objective(z); }, x, 1e-6);
    const double f0 = tn.objective(x), h = 1e-7;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector p = x;
      p(i) += h;
      CHECK(std::fabs(g(i) - (tn.objective(p) - f0) / h) < 1e-4);
    }
  }

  TEST_CASE("projection") {
    const Vector lo = Vector::Constant(3, -1), hi = Vector::Constant(3, 2);
    const Vector p = project(Vector(Eigen::Vector3d(-5, 0.5, 9)), lo, hi);
    CHECK(p(0) == -1);
    CHECK(p(1) == 0.5);
    CHECK(p(2) == 2);
    CHECK(project(Vector(Eigen::Vector3d(-5, 0.5, 9)), Vector(), Vector())(0) == -5);
  }

  TEST_CASE("strictly convex quadratic with interior optimum") {
    const Eigen::Index n = 6;
    Vector a(n);
    a << 1.5, -2.0, 0.25, 7.0, -9.5, 3.0;
    Problem p;
    p.n_vars = n;
    p.objective = [a](const Vector& x) { return (x - a).squaredNorm(); };
    p.lower = Vector::Constant(n, -10);
    p.upper = Vector::Constant(n, 10);
    const Result r = solve(p);
    CHECK(r.converged);
    CHECK((r.x - a).lpNorm<Eigen::Infinity>() < 1e-8);
  }

  TEST_CASE("equality-constrained closed form") {
    Problem p;
    p.n_vars = 2;
    p.objective = [](const Vector& x) { return x.squaredNorm(); };
    p.n_eq = 1;
    p.eq_residuals = [](const Vector& x) { return Vector::Constant(1, x(0) + x(1) - 1); };
    const Result r = solve(p);
    CHECK(r.converged);
    CHECK(std::fabs(r.x(0) - 0.5) < 1e-6);
    CHECK(std::fabs(r.x(1) - 0.5) < 1e-6);
    CHECK(r.max_eq_residual <= 1e-8);
  }

  TEST_CASE("inequality-constrained closed form") {
    Problem p;
    p.n_vars = 2;
    p.objective = [](const Vector& x) { return x.squaredNorm(); };
    p.n_ineq = 1;
    p.ineq_residuals = [](const Vector& x) { return Vector::Constant(1, 1 - x(0) - x(1)); };
    const Result r = solve(p);
    CHECK(r.converged);
    CHECK(std::fabs(r.x(0) - 0.5) < 1e-6);
    CHECK(std::fabs(r.x(1) - 0.5) < 1e-6);
  }

  TEST_CASE("active box bounds are met exactly") {
    Problem p;
    p.n_vars = 3;
    p.objective = [](const Vector& x) { return (x - Vector(Eigen::Vector3d(5, -5, 0.2))).squaredNorm(); };
    p.lower = Vector::Constant(3, -1);
    p.upper = Vector::Constant(3, 1);
    const Result r = solve(p);
    CHECK(r.x(0) == 1.0);
    CHECK(r.x(1) == -1.0);
    CHECK(std::fabs(r.x(2) - 0.2) < 1e-8);
  }

  TEST_CASE("input validation") {
    Problem p;
    p.n_vars = 2;
    p.objective = [](const Vector& x) { return x.squaredNorm(); };
    SolveOptions o;
    o.x0 = Vector::Ones(3);
    CHECK_THROWS_AS(solve(p, o), std::invalid_argument);
    SolveOptions bad;
    bad.penalty_growth = 1.0;
    CHECK_THROWS_AS(solve(p, bad), std::invalid_argument);
    SolveOptions neg;
    neg.tol_feas = 0.0;
    CHECK_THROWS_AS(solve(p, neg), std::invalid_argument);

    Problem nan = p;
    nan.objective = [](const Vector& x) { return x(0) < 0.5 ? std::nan("") : x(0); };
    CHECK_THROWS_AS(solve(nan), NumericalError);
  }

  TEST_CASE("iteration cap yields a flagged partial result") {
    Problem p;
    p.n_vars = 2;
    p.objective = [](const Vector& x) { return std::pow(1 - x(0), 2) + 100 * std::pow(x(1) - x(0) * x(0), 2); };
    p.n_eq = 1;
    p.eq_residuals = [](const Vector& x) { return Vector::Constant(1, x(0) * x(0) + x(1) * x(1) - 4); };
    SolveOptions o;
    o.x0 = Vector(Eigen::Vector2d(-1.5, 0.5));
    o.max_outer = 1;
    o.max_inner = 2;
    const Result r = solve(p, o);
    CHECK_FALSE(r.converged);
    CHECK(r.message == "iteration limit reached");
    CHECK(r.x.size() == 2);
  }

  TEST_CASE("benchmark: determinism and outer feasibility") {
    const ocp::TranscribedNlp tn(ocp::benchmark_problem(0.99999, 30.0), 40, rule1000());
    const Problem p = tn.as_problem();
    ocp::OcpSolveOptions o;
    o.nlp.record_trace = true;
    const auto starts = ocp::start_points(tn, o);
    SolveOptions so = o.nlp;
    so.x0 = starts.back();
    const Result a = solve(p, so), b = solve(p, so);
    REQUIRE(a.x.size() == b.x.size());
    CHECK(std::memcmp(a.x.data(), b.x.data(), sizeof(double) * static_cast<std::size_t>(a.x.size())) == 0);
    REQUIRE(a.trace.size() >= 2);
    for (std::size_t k = 1; k < a.trace.size(); ++k) {
      CHECK(a.trace[k].max_eq_residual <= 1.1 * a.trace[k - 1].max_eq_residual);
    }
    const Vector lo = tn.lower(), hi = tn.upper();
    CHECK((a.x - lo).minCoeff() >= 0.0);
    CHECK((hi - a.x).minCoeff() >= 0.0);
  }
}
