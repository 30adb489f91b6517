#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "fgps/fourier.hpp"

using namespace fgps::fourier;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct term-by-term cosine sum with the k = N/2 mode halved.
double cosine_sum(const FourierGrid& g, std::size_t j, int m, double t) {
  const int half = static_cast<int>(g.size() / 2);
  double s = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double w = std::abs(k) == half ? 0.5 : 1.0;
    const double om = 2 * kPi * k / g.period();
    const double arg = om * (t - g.node(j));
    double d;
    switch (m % 4) {
      case 0: d = std::cos(arg); break;
      case 1: d = -std::sin(arg); break;
      case 2: d = -std::cos(arg); break;
      default: d = std::sin(arg); break;
    }
    s += w * std::pow(om, m) * d;
  }
  return s / static_cast<double>(g.size());
}

}  // namespace

TEST_SUITE("fourier") {
  TEST_CASE("grid invariants") {
    const FourierGrid g(kPi, 10);
    CHECK(g.node(0) == 0.0);
    for (std::size_t j = 1; j < g.size(); ++j) {
      CHECK(g.nodes()[j] > g.nodes()[j - 1]);
      CHECK(g.node(j) - g.node(j - 1) == doctest::Approx(kPi / 10).epsilon(1e-15));
    }
    CHECK(g.omega(3) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK_THROWS_AS(FourierGrid(kPi, 7), std::invalid_argument);
    CHECK_THROWS_AS(FourierGrid(kPi, 0), std::invalid_argument);
    CHECK_THROWS_AS(FourierGrid(-1.0, 8), std::invalid_argument);
  }

  TEST_CASE("cardinality, periodicity, translation") {
    for (std::size_t n : {2u, 8u, 16u, 64u}) {
      const FourierGrid g(2.5, n);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          CHECK(std::fabs(cardinal(g, j, g.node(k)) - (j == k ? 1.0 : 0.0)) < 1e-12);
        }
      }
      CHECK(cardinal(g, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
      std::mt19937_64 rng(n);
      std::uniform_real_distribution<double> ut(-10, 10);
      for (int i = 0; i < 20; ++i) {
        const double t = ut(rng);
        const std::size_t j = static_cast<std::size_t>(i) % n;
        CHECK(std::fabs(cardinal(g, j, t + g.period()) - cardinal(g, j, t)) < 1e-12);
        CHECK(cardinal(g, j, t) == kernel(g, t - g.node(j)));
      }
    }
  }

  TEST_CASE("partition of unity and its derivatives") {
    const FourierGrid g(2 * kPi, 32);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(0, 2 * kPi);
    for (int i = 0; i < 100; ++i) {
      const double t = ut(rng);
      double s = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) s += cardinal(g, j, t);
      CHECK(std::fabs(s - 1.0) < 1e-12);
      for (int m = 1; m <= 3; ++m) {
        double d = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) d += cardinal_deriv(g, j, m, t);
        CHECK(std::fabs(d) < 1e-10 * std::pow(2 * kPi * 32 / (2 * g.period()), m));
      }
    }
  }

  TEST_CASE("derivative at own node vanishes for m = 1") {
    const FourierGrid g(kPi, 20);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::fabs(cardinal_deriv(g, j, 1, g.node(j))) < 1e-12);
  }

  TEST_CASE("derivatives against finite differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(-3, 9);
    for (std::size_t n : {8u, 16u}) {
      const FourierGrid g(2 * kPi, n);
      for (int m = 1; m <= 3; ++m) {
        for (int i = 0; i < 50; ++i) {
          const double t = ut(rng), h = 1e-5;
          const auto f = [&](double s) {
            return m == 1 ? cardinal(g, 2, s) : cardinal_deriv(g, 2, m - 1, s);
          };
          const double fd = (f(t + h) - f(t - h)) / (2 * h);
          CHECK(std::fabs(cardinal_deriv(g, 2, m, t) - fd) < 1e-6 * std::pow(double(n), m));
        }
      }
    }
  }

  TEST_CASE("derivatives against the term-by-term sum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ut(-40, 40);
    const FourierGrid g(kPi, 12);
    for (int i = 0; i < 20; ++i) {
      const double t = ut(rng);
      CHECK(std::fabs(cardinal_deriv(g, 3, 2, t) - cosine_sum(g, 3, 2, t)) < 1e-10);
    }
    for (int m = 1; m <= 7; ++m) {
      for (int i = 0; i < 10; ++i) {
        const double t = ut(rng);
        const double ref = cosine_sum(g, 5, m, t);
        CHECK(std::fabs(cardinal_deriv(g, 5, m, t) - ref) < 1e-12 * std::pow(12.0, m));
      }
    }
  }

  TEST_CASE("log-scaled derivative agrees with the direct one") {
    const FourierGrid g(kPi, 16);
    for (int m : {1, 2, 5, 9}) {
      for (double t : {0.13, 1.7, -25.0}) {
        const double direct = cardinal_deriv(g, 4, m, t);
        const auto lg = cardinal_deriv_log(g, 4, m, t);
        CHECK(lg.value() == doctest::Approx(direct).epsilon(1e-10));
      }
    }
    const auto huge = cardinal_deriv_log(g, 0, 400, 0.3);
    CHECK(std::isfinite(huge.log_abs));
    CHECK(huge.log_abs > 700.0);
  }

  TEST_CASE("range reduction for huge arguments") {
    const FourierGrid g(2 * kPi, 8);
    const double t = 0.37;
    const double far = t + 2 * kPi * 4e6;
    CHECK(std::fabs(cardinal(g, 1, far) - cardinal(g, 1, t)) < 1e-6);
  }

  TEST_CASE("interpolation") {
    const double T = 3.0;
    const FourierGrid g8(T, 8);
    std::vector<double> s(8);
    for (std::size_t j = 0; j < 8; ++j) s[j] = std::cos(2 * kPi * g8.node(j) / T);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ut(-T, 2 * T);
    for (int i = 0; i < 100; ++i) {
      const double t = ut(rng);
      CHECK(std::fabs(interpolate(g8, s, t) - std::cos(2 * kPi * t / T)) < 1e-12);
    }
    const std::vector<double> c(8, 2.75);
    for (int i = 0; i < 20; ++i) CHECK(std::fabs(interpolate(g8, c, ut(rng)) - 2.75) < 1e-12);
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::fabs(interpolate(g8, s, g8.node(k)) - s[k]) < 1e-12);

    const FourierGrid g16(T, 16);
    std::vector<double> s4(16);
    for (std::size_t j = 0; j < 16; ++j) s4[j] = std::sin(4 * 2 * kPi * g16.node(j) / T);
    std::vector<double> ts;
    for (int i = 0; i < 25; ++i) ts.push_back(ut(rng));
    const auto vals = interpolate(g16, s4, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CHECK(std::fabs(vals[i] - std::sin(4 * 2 * kPi * ts[i] / T)) < 1e-11);
    }
    CHECK_THROWS(interpolate(g16, s, 0.1));
  }

  TEST_CASE("derivative growth is O(N^m)") {
    const auto max_abs = [](std::size_t n, int m) {
      const FourierGrid g(2 * kPi, n);
      double best = 0.0;
      for (int i = 0; i <= 4000; ++i) {
        best = std::max(best, std::fabs(cardinal_deriv(g, 0, m, 2 * kPi * i / 4000.0)));
      }
      return best;
    };
    for (int m = 1; m <= 3; ++m) {
      for (std::size_t n : {8u, 16u}) {
        CHECK(max_abs(2 * n, m) / max_abs(n, m) <= std::pow(2.0, m) * 1.2);
      }
    }
  }
}
