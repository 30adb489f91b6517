#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fgps/expr.hpp"

using namespace fgps::expr;

namespace {

double ev(const std::string& s, double t = 0.0, std::vector<double> y = {}, std::vector<double> u = {}) {
  const Expr e = parse(s, y.size(), u.size());
  return e.eval({t, y, u});
}

std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  switch (pick(rng)) {
    case 0: {
      std::uniform_real_distribution<double> v(0.0, 50.0);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v(rng));
      return buf;
    }
    case 1: return std::vector<std::string>{"t", "y1", "y2"}[rng() % 3];
    case 2: return "u1";
    case 3: return "-" + random_expr(rng, depth - 1);
    case 4: return "(" + random_expr(rng, depth - 1) + ")";
    case 5: {
      const char* fn[] = {"sin", "cos", "exp", "abs", "tanh", "sqrt"};
      return std::string(fn[rng() % 6]) + "(" + random_expr(rng, depth - 1) + ")";
    }
    default: {
      const char ops[] = {'+', '-', '*', '/', '^'};
      return random_expr(rng, depth - 1) + " " + ops[rng() % 5] + " " + random_expr(rng, depth - 1);
    }
  }
}

}  // namespace

TEST_SUITE("exprdsl") {
  TEST_CASE("benchmark expressions") {
    CHECK(ev("u1^2 - y1^2", 0, {2, 0}, {1}) == -3.0);
    CHECK(ev("-4*y1 - 0.3*y2 + u1", 0, {1, 2}, {0.5}) == doctest::Approx(-4 - 0.6 + 0.5).epsilon(1e-15));
    CHECK(ev("sin(t)", std::numbers::pi / 2) == 1.0);
    CHECK(ev("2^3^2") == 512.0);
  }

  TEST_CASE("precedence corpus") {
    const std::vector<std::pair<std::string, double>> corpus{
        {"1+2*3", 7},          {"(1+2)*3", 9},       {"2*3+4", 10},      {"10-4-3", 3},
        {"10-(4-3)", 9},       {"24/4/3", 2},        {"24/(4/3)", 18},   {"2^3^2", 512},
        {"(2^3)^2", 64},       {"-2^2", -4},         {"(-2)^2", 4},      {"2^-1", 0.5},
        {"-3*-2", 6},          {"--3", 3},           {"+3-+2", 1},       {"2*3^2", 18},
        {"2^2*3", 12},         {"8/2^2", 2},         {"1-2+3", 2},       {"2*(3+4)*5", 70},
        {"abs(-7)+1", 8},      {"sqrt(16)*2", 8},    {"exp(0)*5", 5},    {"cos(0)-sin(0)", 1},
        {"tanh(0)+3", 3},      {"-(1+2)^2", -9},     {"3-2^2*2", -5},    {"1.5e1/3", 5},
        {"16^0.5^2", 2}, {"2*-3^2", -18}};
    for (const auto& [text, value] : corpus) {
      INFO(text);
      CHECK(ev(text) == value);
    }
    CHECK(corpus.size() == 30);
  }

  TEST_CASE("variables and arity") {
    CHECK(ev("t*y1 + u2", 2.0, {3.0}, {0.0, 4.0}) == 10.0);
    CHECK_THROWS_AS(parse("y3 + 1", 2, 1), ArityError);
    CHECK_THROWS_AS(parse("u2", 2, 1), ArityError);
    CHECK_THROWS_AS(parse("y0", 2, 1), SyntaxError);
    const Expr e = parse("y2", 2, 0);
    std::vector<double> y{1.0};
    try {
      e.eval({0.0, y, {}});
      FAIL("expected an arity mismatch");
    } catch (const EvalError& err) {
      CHECK(err.kind() == EvalError::Kind::ArityMismatch);
    }
  }

  TEST_CASE("syntax errors carry offsets") {
    const std::vector<std::pair<std::string, std::size_t>> bad{
        {"1 +", 3}, {"(1+2", 4}, {"1 2", 2}, {"foo(1)", 0}, {"sin 1", 4}, {"2 * # 3", 4}, {"", 0}, {"1)", 1}};
    for (const auto& [text, offset] : bad) {
      INFO(text);
      try {
        parse(text, 1, 1);
        FAIL("expected a syntax error");
      } catch (const SyntaxError& e) {
        CHECK(e.offset() == offset);
      }
    }
  }

  TEST_CASE("evaluation errors are distinct") {
    const auto kind_of = [](const std::string& s) {
      try {
        ev(s);
      } catch (const EvalError& e) {
        return static_cast<int>(e.kind());
      }
      return -1;
    };
    CHECK(kind_of("1/0") == static_cast<int>(EvalError::Kind::DivisionByZero));
    CHECK(kind_of("sqrt(-1)") == static_cast<int>(EvalError::Kind::NegativeSqrt));
    CHECK(kind_of("exp(1000)") == static_cast<int>(EvalError::Kind::NonFinite));
    CHECK(kind_of("(-8)^0.5") == static_cast<int>(EvalError::Kind::NonFinite));
    CHECK(ev("sqrt(0)") == 0.0);
  }

  TEST_CASE("print round trip") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
      const std::string text = random_expr(rng, 5);
      INFO(text);
      const Expr e = parse(text, 2, 1);
      const Expr back = parse(print(e), 2, 1);
      CHECK(structurally_equal(e.root(), back.root()));
    }
    CHECK_FALSE(structurally_equal(parse("1+2", 0, 0).root(), parse("2+1", 0, 0).root()));
  }

  TEST_CASE("evaluation is deterministic") {
    const Expr e = parse("sin(y1)^2 + exp(-u1) / (1 + t^2)", 1, 1);
    std::vector<double> y{0.3}, u{1.7};
    const double a = e.eval({0.9, y, u}), b = e.eval({0.9, y, u});
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}
