#include "fgps/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fgps::fourier {

FourierGrid::FourierGrid(double period, std::size_t n) : period_(period), n_(n) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw std::invalid_argument("FourierGrid: period must be positive and finite");
  }
  if (n == 0 || n % 2 != 0) {
    throw std::invalid_argument("FourierGrid: N must be even and positive, got " +
                                std::to_string(n));
  }
  nodes_.resize(n);
  for (std::size_t j = 0; j < n; ++j) nodes_[j] = node(j);
}

double FourierGrid::omega(double k) const { return 2.0 * std::numbers::pi * k / period_; }

namespace {

double reduce(const FourierGrid& grid, double s) {
  const double period = grid.period();
  if (std::fabs(s) > 1e6 * period) return std::fmod(s, period);
  return s;
}

// sum'_{k != 0} (k/scale)^m phi(w_k s), folded onto k > 0. phi is cos for
// even m and sin for odd m.
double folded_sum(const FourierGrid& grid, int m, double s, double scale) {
  const std::size_t half = grid.size() / 2;
  const double w1 = grid.omega(1.0);
  const bool even = (m % 2 == 0);
  double sum = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double kd = static_cast<double>(k);
    const double arg = w1 * kd * s;
    const double phi = even ? std::cos(arg) : std::sin(arg);
    const double weight = (k == half) ? 1.0 : 2.0;
    sum += weight * std::pow(kd / scale, m) * phi;
  }
  return sum;
}

int derivative_sign(int m) { return ((m + 1) / 2) % 2 == 0 ? 1 : -1; }

}  // namespace

double kernel(const FourierGrid& grid, double s) {
  s = reduce(grid, s);
  const std::size_t n = grid.size();
  const std::size_t half = n / 2;
  const double w1 = grid.omega(1.0);
  double sum = 1.0;
  for (std::size_t k = 1; k < half; ++k) sum += 2.0 * std::cos(w1 * static_cast<double>(k) * s);
  sum += std::cos(w1 * static_cast<double>(half) * s);
  return sum / static_cast<double>(n);
}

double kernel_deriv(const FourierGrid& grid, int m, double s) {
  if (m < 1) throw std::invalid_argument("kernel_deriv: derivative order must be >= 1");
  s = reduce(grid, s);
  const double prefactor = std::pow(grid.omega(1.0), m) / static_cast<double>(grid.size());
  return derivative_sign(m) * prefactor * folded_sum(grid, m, s, 1.0);
}

SignedLog kernel_deriv_log(const FourierGrid& grid, int m, double s) {
  if (m < 1) throw std::invalid_argument("kernel_deriv_log: derivative order must be >= 1");
  s = reduce(grid, s);
  const double half = static_cast<double>(grid.size() / 2);
  const double sum = folded_sum(grid, m, s, half);
  if (sum == 0.0) return {};
  const double log_prefactor = m * std::log(grid.omega(1.0)) + m * std::log(half) -
                               std::log(static_cast<double>(grid.size()));
  const int sign = derivative_sign(m) * (sum > 0 ? 1 : -1);
  return {sign, log_prefactor + std::log(std::fabs(sum))};
}

double cardinal(const FourierGrid& grid, std::size_t j, double t) {
  return kernel(grid, t - grid.node(j));
}

double cardinal_deriv(const FourierGrid& grid, std::size_t j, int m, double t) {
  return kernel_deriv(grid, m, t - grid.node(j));
}

SignedLog cardinal_deriv_log(const FourierGrid& grid, std::size_t j, int m, double t) {
  return kernel_deriv_log(grid, m, t - grid.node(j));
}

double interpolate(const FourierGrid& grid, std::span<const double> samples, double t) {
  if (samples.size() != grid.size()) {
    throw std::invalid_argument("interpolate: expected " + std::to_string(grid.size()) +
                                " samples, got " + std::to_string(samples.size()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) sum += samples[j] * cardinal(grid, j, t);
  return sum;
}

std::vector<double> interpolate(const FourierGrid& grid, std::span<const double> samples,
                                 std::span<const double> ts) {
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(interpolate(grid, samples, t));
  return out;
}

}  // namespace fgps::fourier
