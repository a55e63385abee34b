#include "cosz/poly.hpp"

#include <cmath>
#include <stdexcept>

#include "cosz/constants.hpp"
#include "cosz/kernel.hpp"

namespace cosz {

DiffPoly::DiffPoly(int n, CoeffMask mask) : n_(n), mask_(std::move(mask)) {
  if (n_ < 0) throw std::invalid_argument("n must be nonnegative");
  if (!mask_.empty() && mask_.degree() > n_) {
    throw std::invalid_argument("mask degree m must not exceed n");
  }
}

SlowCurve::SlowCurve(const CoeffMask& mask) {
  const int m = mask.degree();
  coeff_.assign(static_cast<std::size_t>(m + 1), 0);
  coeff_[0] = 2 * mask.bit(0) - mask.bit(1) - 1;
  for (int j = 1; j <= m; ++j) coeff_[j] = mask.bit(j) - mask.bit(j + 1);
  bounds_.assign(5, 0.0);
  for (int j = 0; j <= m; ++j) {
    const double a = std::abs(coeff_[j]);
    const double w = j + 0.5;
    double p = 1.0;
    for (int r = 0; r < 5; ++r, p *= w) bounds_[r] += a * p;
  }
}

SlowCurve::Value SlowCurve::eval(double x) const {
  // z = exp(i (j + 1/2) x), advanced by exp(i x); resynchronised every 64
  // terms to keep the rotation error at the level of a few ulps.
  constexpr int kResync = 64;
  const double step_c = std::cos(x);
  const double step_s = std::sin(x);
  double phi = 0.0;
  double dphi = 0.0;
  double zc = 0.0;
  double zs = 0.0;
  const int count = static_cast<int>(coeff_.size());
  for (int j = 0; j < count; ++j) {
    if (j % kResync == 0) {
      zc = std::cos((j + 0.5) * x);
      zs = std::sin((j + 0.5) * x);
    } else {
      const double c = zc * step_c - zs * step_s;
      zs = zs * step_c + zc * step_s;
      zc = c;
    }
    const int a = coeff_[j];
    if (a != 0) {
      phi += a * zs;
      dphi += a * (j + 0.5) * zc;
    }
  }
  return {phi, dphi};
}

namespace poly {

double eval_g(const CoeffMask& mask, double x) {
  double sum = 0.0;
  for (int k : mask.indices()) sum += std::cos(k * x);
  return sum;
}

double eval_g_deriv(const CoeffMask& mask, int r, double x) {
  kernel::check_power_range(mask.degree(), r);
  if (r == 0) return eval_g(mask, x);
  double sum = 0.0;
  for (int k : mask.indices()) {
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

double eval_f(const DiffPoly& f, double x) {
  if (!std::isfinite(x) || x < 0.0 || x > constants::two_pi) {
    throw std::domain_error("eval_f: angle must lie in [0, 2pi]");
  }
  const double half = std::sin(0.5 * x);
  if (std::abs(half) >= constants::theta0) {
    const double phi = 2.0 * half * (eval_g(f.mask(), x) - 0.5);
    return (std::sin(f.T() * x) - phi) / (2.0 * half);
  }
  return kernel::dirichlet(f.n(), x) - eval_g(f.mask(), x);
}

double eval_f_direct(const DiffPoly& f, double x) {
  const auto& mask = f.mask();
  double sum = 0.0;
  for (int k = 0; k <= f.n(); ++k) {
    if (!mask.bit(k)) sum += std::cos(k * x);
  }
  return sum;
}

double eval_f_deriv(const DiffPoly& f, int r, double x) {
  return kernel::dirichlet_deriv(f.n(), r, x) - eval_g_deriv(f.mask(), r, x);
}

IndexSet to_index_set(const DiffPoly& f) {
  IndexSet out;
  out.values.reserve(static_cast<std::size_t>(f.n() + 1 - f.mask().ones()));
  for (int k = 0; k <= f.n(); ++k) {
    if (!f.mask().bit(k)) out.values.push_back(k);
  }
  return out;
}

long long value_at_zero(const DiffPoly& f) {
  return static_cast<long long>(f.n()) + 1 - f.mask().ones();
}

long long value_at_pi(const DiffPoly& f) {
  long long g = 0;
  for (int k : f.mask().indices()) g += (k % 2 == 0) ? 1 : -1;
  return (f.n() % 2 == 0 ? 1 : 0) - g;
}

long long second_derivative_at_pi(const DiffPoly& f) {
  // sum_{k=0}^{n} k^2 (-1)^k = (-1)^n n (n + 1) / 2.
  const long long n = f.n();
  long long full = n * (n + 1) / 2;
  if (n % 2 != 0) full = -full;
  long long masked = 0;
  for (int k : f.mask().indices()) {
    const long long k2 = static_cast<long long>(k) * k;
    masked += (k % 2 == 0) ? k2 : -k2;
  }
  return -(full - masked);
}

double fourth_derivative_bound(const DiffPoly& f) {
  const double n = f.n();
  double full = n * (n + 1) * (2 * n + 1) * (3 * n * n + 3 * n - 1) / 30.0;
  for (int k : f.mask().indices()) full -= std::pow(static_cast<double>(k), 4);
  return full;
}

}  // namespace poly
}  // namespace cosz
