#include "cosz/kernel.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "cosz/constants.hpp"
#include "cosz/poly.hpp"

namespace cosz::kernel {

namespace {

void require_finite_angle(double x) {
  if (!std::isfinite(x) || x < 0.0 || x > constants::two_pi) {
    throw std::domain_error("angle must be finite and lie in [0, 2pi]");
  }
}

void require_open_angle(double x) {
  if (!std::isfinite(x) || x <= 0.0 || x >= constants::two_pi) {
    throw std::domain_error("angle must lie in the open interval (0, 2pi)");
  }
}

}  // namespace

KernelParams KernelParams::of(int n) {
  if (n < 0) throw std::invalid_argument("kernel degree must be nonnegative");
  return {n, n + 0.5};
}

void check_power_range(int n, int r) {
  if (r < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (n <= 1 || r == 0) return;
  if (r * std::log(static_cast<double>(n)) >=
      std::log(std::numeric_limits<double>::max()) - 1.0) {
    throw std::overflow_error("n^r overflows for n=" + std::to_string(n) +
                              ", r=" + std::to_string(r));
  }
}

double dirichlet(int n, double x) {
  const auto p = KernelParams::of(n);
  require_finite_angle(x);
  const double half = std::sin(0.5 * x);
  if (std::abs(half) >= constants::theta0) {
    return 0.5 + std::sin(p.T * x) / (2.0 * half);
  }
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) sum += std::cos(k * x);
  return sum;
}

double dirichlet_deriv(int n, int r, double x) {
  KernelParams::of(n);
  check_power_range(n, r);
  if (!std::isfinite(x)) throw std::domain_error("angle must be finite");
  if (r == 0) return dirichlet(n, x);
  // d^r/dx^r cos(kx) = k^r cos(kx + r pi/2): cycle of cos, -sin, -cos, sin.
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double kx = k * x;
    double term = 0.0;
    switch (r % 4) {
      case 0: term = std::cos(kx); break;
      case 1: term = -std::sin(kx); break;
      case 2: term = -std::cos(kx); break;
      default: term = std::sin(kx); break;
    }
    sum += std::pow(static_cast<double>(k), r) * term;
  }
  return sum;
}

double envelope_s(double x) {
  require_open_angle(x);
  return 1.0 / (2.0 * std::sin(0.5 * x));
}

double b_deriv(int r, double x) {
  if (r < 0 || r > 8) throw std::invalid_argument("b_deriv supports 0 <= r <= 8");
  require_open_angle(x);
  // Work in u = x/2, where B = csc(u) and d/dx = (1/2) d/du. The derivative
  // of csc^a cot^b is -a csc^a cot^(b+1) - b csc^(a+2) cot^(b-1).
  std::map<std::pair<int, int>, long long> terms{{{1, 0}, 1}};
  for (int step = 0; step < r; ++step) {
    std::map<std::pair<int, int>, long long> next;
    for (const auto& [powers, coeff] : terms) {
      const auto [a, b] = powers;
      if (a != 0) next[{a, b + 1}] -= a * coeff;
      if (b != 0) next[{a + 2, b - 1}] -= b * coeff;
    }
    terms = std::move(next);
  }
  const double u = 0.5 * x;
  const double csc = 1.0 / std::sin(u);
  const double cot = std::cos(u) / std::sin(u);
  double value = 0.0;
  for (const auto& [powers, coeff] : terms) {
    value += static_cast<double>(coeff) * std::pow(csc, powers.first) *
             std::pow(cot, powers.second);
  }
  return std::ldexp(value, -r);
}

double slow_curve_phi(const CoeffMask& mask, double x) {
  require_open_angle(x);
  return 2.0 * std::sin(0.5 * x) * (poly::eval_g(mask, x) - 0.5);
}

}  // namespace cosz::kernel
