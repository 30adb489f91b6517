#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fgps/errorbound.hpp"

using namespace fgps;
using namespace fgps::errorbound;

namespace {

// The bound multiplied out in plain floating point; usable while nothing overflows.
double direct_bound(const BoundParams& p) {
  const fracderiv::FractionalOrder o(p.alpha, p.memory);
  const double g = static_cast<double>(p.ng), m = o.ceiling(), lam = p.lambda;
  double v = p.constants.d_lambda * std::pow(double(p.n), g + m) *
             std::pow(p.memory / o.gap() * std::pow(p.zeta, (1 + p.alpha - m) / o.gap()), g + 1) *
             std::pow(2.0, -2 * g - 1) * std::exp(g) * std::pow(g, lam - g - 1.5);
  if (p.branch == Branch::Asymptotic) return v * p.constants.b1_lambda * std::pow(g + 1, -lam);
  if (lam >= 0) return v;
  const double sp = std::sqrt(std::numbers::pi);
  if (p.ng % 2 == 1) {
    return v * std::tgamma(g / 2 + 1) * std::tgamma(lam + 0.5) / (sp * std::tgamma(g / 2 + lam + 1));
  }
  return v * 2 * std::tgamma((g + 3) / 2) * std::tgamma(lam + 0.5) /
         (sp * std::sqrt((g + 1) * (g + 2 * lam + 1)) * std::tgamma((g + 1) / 2 + lam));
}

}  // namespace

TEST_SUITE("errorbound") {
  TEST_CASE("psi at y = 1") {
    const fourier::FourierGrid grid(std::numbers::pi, 8);
    const fracderiv::FractionalOrder order(1.5, 30.0);
    for (std::size_t ng : {0u, 3u, 6u}) {
      const double t = 0.4;
      const double expect = std::pow(30.0 / (1.5 - 2.0), double(ng + 1)) *
                            fourier::cardinal_deriv(grid, 2, static_cast<int>(ng) + 3, t - 30.0);
      CHECK(psi(grid, order, ng, 2, 1.0, t).value() == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK_THROWS(psi(grid, order, 3, 0, 0.0, 0.1));
    CHECK_THROWS(psi(grid, order, 3, 0, 1.5, 0.1));
  }

  TEST_CASE("psi at m = 1 is the first-order kernel") {
    const fourier::FourierGrid grid(2 * std::numbers::pi, 8);
    for (double alpha : {0.3, 0.8}) {
      const fracderiv::FractionalOrder order(alpha, 10.0);
      for (double y : {0.2, 0.6, 0.95}) {
        for (std::size_t ng : {1u, 4u}) {
          const double kernel = std::pow(10.0 / (alpha - 1) * std::pow(y, alpha / (1 - alpha)), double(ng + 1)) *
                                fourier::cardinal_deriv(grid, 1, static_cast<int>(ng) + 2,
                                                        0.7 - 10.0 * std::pow(y, 1 / (1 - alpha)));
          CHECK(psi(grid, order, ng, 1, y, 0.7).value() == doctest::Approx(kernel).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("psi against the chain-rule product in tau") {
    const fourier::FourierGrid grid(2 * std::numbers::pi, 8);
    const fracderiv::FractionalOrder order(1.5, 30.0);
    const std::size_t ng = 3;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uy(0.05, 1.0), ut(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < 10; ++i) {
      const double y = uy(rng), t = ut(rng);
      const double tau = t - 30.0 * std::pow(y, 1 / order.gap());
      const double bracket = std::pow(30.0, order.gap()) / (1.5 - 2.0) * std::pow(t - tau, -2 + 1.5 + 1);
      const double expect = std::pow(bracket, double(ng + 1)) * fourier::cardinal_deriv(grid, 5, 6, tau);
      const auto got = psi(grid, order, ng, 5, y, t);
      CHECK(got.sign == (expect > 0 ? 1 : -1));
      CHECK(got.value() == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  TEST_CASE("branch selection is total") {
    for (std::size_t ng = 0; ng < 50; ++ng) {
      for (double lam : {-0.49, -0.2, -1e-9, 0.0, 0.5, 3.0}) {
        const auto b = select_branch(ng, lam);
        if (lam >= 0) {
          CHECK(b == ResolvedBranch::NonNegativeLambda);
        } else {
          CHECK(b == (ng % 2 ? ResolvedBranch::OddNg : ResolvedBranch::EvenNg));
        }
      }
    }
    CHECK_THROWS(select_branch(3, -0.5));
    CHECK(log_branch_factor(ResolvedBranch::NonNegativeLambda, 10, 0.5, {}) == 0.0);
  }

  TEST_CASE("log-space bound equals direct evaluation") {
    for (double lam : {-0.3, 0.0, 0.7}) {
      for (std::size_t ng = 1; ng <= 20; ++ng) {
        for (double alpha : {0.4, 1.5}) {
          BoundParams p{8, alpha, 30.0, lam, ng, 0.6, {1.7, 2.0}, Branch::Auto};
          const double direct = direct_bound(p);
          CHECK(truncation_bound(p).value() == doctest::Approx(direct).epsilon(1e-10));
          if (lam < 0) {
            p.branch = Branch::Asymptotic;
            CHECK(truncation_bound(p).value() == doctest::Approx(direct_bound(p)).epsilon(1e-10));
          }
        }
      }
    }
  }

  TEST_CASE("bound properties") {
    BoundParams base{8, 1.5, 30.0, 0.0, 100};
    base.ng = 200;
    const double at200 = truncation_bound(base).log_abs;
    base.ng = 100;
    const double at100 = truncation_bound(base).log_abs;
    CHECK(at200 < at100);

    BoundParams z = base;
    z.zeta = 0.3;
    CHECK(truncation_bound(z).log_abs <= at100);

    BoundParams zero = base;
    zero.ng = 0;
    CHECK(std::isinf(truncation_bound(zero).log_abs));

    BoundParams asym = base;
    asym.branch = Branch::Asymptotic;
    CHECK_THROWS_AS(truncation_bound(asym), std::invalid_argument);
    BoundParams badz = base;
    badz.zeta = 0.0;
    CHECK_THROWS(truncation_bound(badz));
    BoundParams badd = base;
    badd.constants.d_lambda = 0.0;
    CHECK_THROWS(truncation_bound(badd));
  }

  TEST_CASE("report grows with L, N and m") {
    const auto rows = bound_report(ReportSweep{});
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].param == "L");
    CHECK(rows[0].bound_log10 < rows[1].bound_log10);
    CHECK(rows[1].bound_log10 < rows[2].bound_log10);
    CHECK(rows[3].param == "N");
    CHECK(rows[4].bound_log10 - rows[3].bound_log10 ==
          doctest::Approx((100 + 2) * std::log10(2.0)).epsilon(1e-12));
    CHECK(rows[5].param == "m");
    CHECK(rows[6].bound_log10 > rows[5].bound_log10);
  }
}
