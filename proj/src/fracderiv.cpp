#include "fgps/fracderiv.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgps/common.hpp"

namespace fgps::fracderiv {

FractionalOrder::FractionalOrder(double alpha, double memory) : alpha_(alpha), memory_(memory) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("fractional order must be positive, got " + std::to_string(alpha));
  }
  if (alpha == std::floor(alpha)) {
    throw std::invalid_argument("fractional order must not be an integer, got " +
                                std::to_string(alpha));
  }
  if (!(memory > 0.0) || !std::isfinite(memory)) {
    throw std::invalid_argument("memory length must be positive, got " + std::to_string(memory));
  }
  m_ = static_cast<int>(std::ceil(alpha));
}

double FractionalOrder::scale() const {
  // m - alpha + 1 lies in (1, 2), so lgamma needs no reflection.
  return std::exp(gap() * std::log(memory_) - std::lgamma(gap() + 1.0));
}

double gl_derivative(const RealFunction& f, double alpha, double a, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("gl_derivative: step must be positive");
  const double span = (t - a) / h;
  if (!(span >= 1.0)) {
    throw std::invalid_argument("gl_derivative: need at least one step between a and t");
  }
  const auto n = static_cast<std::size_t>(std::floor(span));
  // (-1)^k binom(alpha, k) = w_{k-1} (1 - (alpha + 1) / k); bounded for alpha > 0.
  double w = 1.0;
  double sum = f(t);
  for (std::size_t k = 1; k <= n; ++k) {
    w *= 1.0 - (alpha + 1.0) / static_cast<double>(k);
    sum += w * f(t - static_cast<double>(k) * h);
  }
  return sum * std::pow(h, -alpha);
}

namespace {

// Positive half of the 16-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGl16Nodes = {
    0.095012509837637440185, 0.28160355077925891323, 0.45801677765722738634,
    0.61787624440264374845,  0.7554044083550030339,  0.86563120238783174388,
    0.94457502307323257608,  0.9894009349916499326};
constexpr std::array<double, 8> kGl16Weights = {
    0.18945061045506849629, 0.18260341504492358887, 0.16915651939500253819,
    0.14959598881657673208, 0.12462897125553387205, 0.09515851168249278481,
    0.062253523938647892863, 0.027152459411754094852};

constexpr std::size_t kMaxPanels = std::size_t{1} << 14;
constexpr double kOracleTolerance = 1e-12;

double composite_gl(const std::function<double(double)>& g, std::size_t panels) {
  const double h = 1.0 / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    double s = 0.0;
    for (std::size_t i = 0; i < kGl16Nodes.size(); ++i) {
      const double dx = 0.5 * h * kGl16Nodes[i];
      s += kGl16Weights[i] * (g(mid - dx) + g(mid + dx));
    }
    total += 0.5 * h * s;
  }
  return total;
}

// L zhat^(1/(m-alpha)) for every shifted node.
std::vector<double> memory_offsets(const gegenbauer::QuadratureRule& rule,
                                   const FractionalOrder& order) {
  std::vector<double> out(rule.shifted_nodes.size());
  const double inv_gap = 1.0 / order.gap();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = order.memory() * std::exp(std::log(rule.shifted_nodes[i]) * inv_gap);
  }
  return out;
}

double quadrature_at(const fourier::FourierGrid& grid, const gegenbauer::QuadratureRule& rule,
                     int m, std::span<const double> offsets, double s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    sum += rule.weights[i] * fourier::kernel_deriv(grid, m, s - offsets[i]);
  }
  return 0.5 * sum;
}

void check_consistent(const fourier::FourierGrid& grid, const gegenbauer::QuadratureRule& rule) {
  if (rule.weights.size() != rule.shifted_nodes.size() || rule.weights.empty()) {
    throw std::invalid_argument("quadrature rule has mismatched nodes and weights");
  }
  if (grid.size() == 0) throw std::invalid_argument("empty Fourier grid");
}

}  // namespace

double stencil_derivative(const RealFunction& f, int m, double t, double h, int half) {
  if (m < 0) throw std::invalid_argument("stencil_derivative: negative order");
  if (half < 1 || 2 * half < m) throw std::invalid_argument("stencil_derivative: stencil too small");
  if (!(h > 0.0)) throw std::invalid_argument("stencil_derivative: step must be positive");
  // Fornberg's recursion for weights on offsets -half..half, expansion point 0.
  const int np = 2 * half + 1;
  std::vector<double> x(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i) x[static_cast<std::size_t>(i)] = i - half;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(np),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i < np; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    double c2 = 1.0;
    const int mn = std::min(i, m);
    for (int j = 0; j < i; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double c3 = x[ui] - x[uj];
      c2 *= c3;
      for (int k = mn; k >= 0; --k) {
        const auto uk = static_cast<std::size_t>(k);
        if (j == i - 1) {
          c[ui][uk] = c1 * ((k > 0 ? k * c[ui - 1][uk - 1] : 0.0) - x[ui - 1] * c[ui - 1][uk]) / c2;
        }
        c[uj][uk] = (x[ui] * c[uj][uk] - (k > 0 ? k * c[uj][uk - 1] : 0.0)) / c3;
      }
    }
    c1 = c2;
  }
  double sum = 0.0;
  for (int i = 0; i < np; ++i) {
    const double w = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
    if (w != 0.0) sum += w * f(t + x[static_cast<std::size_t>(i)] * h);
  }
  return sum / std::pow(h, m);
}

OracleResult reduced_fd_oracle(const RealFunction& fm, const FractionalOrder& order, double t,
                               std::size_t panels) {
  if (panels == 0) throw std::invalid_argument("reduced_fd_oracle: panels must be >= 1");
  const double inv_gap = 1.0 / order.gap();
  const double memory = order.memory();
  const auto integrand = [&](double y) {
    return fm(t - memory * std::exp(std::log(y) * inv_gap));
  };
  const double scale = order.scale();

  OracleResult result;
  double previous = scale * composite_gl(integrand, panels);
  while (panels < kMaxPanels) {
    panels *= 2;
    const double current = scale * composite_gl(integrand, panels);
    result.last_delta = std::fabs(current - previous);
    result.value = current;
    result.panels = panels;
    previous = current;
    if (result.last_delta < kOracleTolerance) {
      result.converged = true;
      return result;
    }
  }
  result.value = previous;
  result.panels = panels;
  return result;
}

double fgpsq_entry(const fourier::FourierGrid& grid, const gegenbauer::QuadratureRule& rule,
                   const FractionalOrder& order, std::size_t l, std::size_t j) {
  check_consistent(grid, rule);
  if (l >= grid.size() || j >= grid.size()) {
    throw std::out_of_range("fgpsq_entry: index outside the grid");
  }
  const auto offsets = memory_offsets(rule, order);
  return quadrature_at(grid, rule, order.ceiling(), offsets, grid.node(l) - grid.node(j));
}

FgpsFim build_fim(const fourier::FourierGrid& grid, const gegenbauer::QuadratureRule& rule,
                  const FractionalOrder& order, const BuildOptions& options) {
  check_consistent(grid, rule);
  const std::size_t n = grid.size();
  const int m = order.ceiling();
  const auto offsets = memory_offsets(rule, order);

  std::vector<double> column(n);
  for (std::size_t l = 0; l < n; ++l) column[l] = quadrature_at(grid, rule, m, offsets, grid.node(l));

  Eigen::MatrixXd entries(n, n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < n; ++j) {
      entries(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = column[(l + n - j) % n];
    }
  }
  FgpsFim fim{grid, rule, order, std::move(entries), order.scale()};

  if (options.verify) {
    const double max_entry = fim.max_abs_entry();
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int k = 0; k < options.verify_entries; ++k) {
      const std::size_t l = pick(rng);
      const std::size_t j = pick(rng);
      const double direct =
          quadrature_at(grid, rule, m, offsets, grid.node(l) - grid.node(j));
      const double stored = fim.entries(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
      if (std::fabs(direct - stored) > 1e-12 * max_entry) {
        throw NumericalError("build_fim: circulant entry (" + std::to_string(l) + ", " +
                             std::to_string(j) + ") disagrees with direct quadrature");
      }
    }
  }
  return fim;
}

FgpsFim build_fim_direct(const fourier::FourierGrid& grid,
                         const gegenbauer::QuadratureRule& rule, const FractionalOrder& order) {
  check_consistent(grid, rule);
  const std::size_t n = grid.size();
  const int m = order.ceiling();
  const auto offsets = memory_offsets(rule, order);
  Eigen::MatrixXd entries(n, n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < n; ++j) {
      entries(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
          quadrature_at(grid, rule, m, offsets, grid.node(l) - grid.node(j));
    }
  }
  return FgpsFim{grid, rule, order, std::move(entries), order.scale()};
}

std::vector<double> approx_fd_at_nodes(const FgpsFim& fim, std::span<const double> samples) {
  const auto n = fim.entries.rows();
  if (static_cast<Eigen::Index>(samples.size()) != n) {
    throw std::invalid_argument("approx_fd_at_nodes: expected " + std::to_string(n) +
                                " samples, got " + std::to_string(samples.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> f(samples.data(), n);
  const Eigen::VectorXd d = fim.scale * (fim.entries * f);
  return {d.data(), d.data() + n};
}

}  // namespace fgps::fracderiv
