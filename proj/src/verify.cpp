#include "cosz/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cosz/constants.hpp"
#include "cosz/ensemble.hpp"
#include "cosz/envelope.hpp"
#include "cosz/kernel.hpp"
#include "cosz/parallel.hpp"
#include "cosz/rng.hpp"
#include "cosz/zeros.hpp"

namespace cosz::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double pi = constants::pi;

CheckOutcome make(std::string name, Mode mode, bool hard) {
  CheckOutcome out;
  out.name = std::move(name);
  out.mode = mode;
  out.hard = hard;
  return out;
}

void settle(CheckOutcome& out) {
  switch (out.mode) {
    case Mode::upper: out.passed = out.ratio <= 1.0; break;
    case Mode::lower: out.passed = out.ratio >= 1.0; break;
    case Mode::report: out.passed = true; break;
  }
}

CheckOutcome empty_domain(std::string name, Mode mode, bool hard, Interval domain) {
  auto out = make(std::move(name), mode, hard);
  out.domain_empty = true;
  out.passed = true;
  out.ratio = mode == Mode::lower ? kInf : 0.0;
  out.witness.lo = domain.lo;
  out.witness.hi = domain.hi;
  out.detail = "stated domain is empty";
  return out;
}

double unit(std::uint64_t seed, std::uint64_t index, std::uint32_t lane) {
  return rng::to_unit(rng::words(seed, index, lane, 0)[0]);
}

// Largest |fn| on [a, b]: dense grid, then golden-section refinement of the
// ten largest grid values on their neighbouring cells.
template <class Fn>
std::pair<double, double> sup_abs(Fn&& fn, double a, double b, int points = 10000) {
  std::vector<double> xs(static_cast<std::size_t>(points) + 1);
  std::vector<double> ys(xs.size());
  const double h = (b - a) / points;
  for (int i = 0; i <= points; ++i) {
    xs[i] = i == points ? b : a + i * h;
    ys[i] = std::abs(fn(xs[i]));
  }
  std::vector<int> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  const int top = std::min<int>(10, static_cast<int>(order.size()));
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](int i, int j) { return ys[i] > ys[j]; });
  double best = ys[order[0]];
  double arg = xs[order[0]];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k < top; ++k) {
    double lo = std::max(a, xs[order[k]] - h);
    double hi = std::min(b, xs[order[k]] + h);
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = std::abs(fn(c));
    double fd = std::abs(fn(d));
    for (int it = 0; it < 60 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - g * (hi - lo);
        fc = std::abs(fn(c));
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + g * (hi - lo);
        fd = std::abs(fn(d));
      }
    }
    for (auto [x, y] : {std::pair{c, fc}, std::pair{d, fd}}) {
      if (y > best) {
        best = y;
        arg = x;
      }
    }
  }
  return {best, arg};
}

std::vector<double> roots_on(const DiffPoly& f, Interval I, int* uncertified = nullptr) {
  CountOptions opts;
  opts.want_roots = true;
  const auto report = count_on(f, I, Method::fast_slow, opts);
  if (uncertified) *uncertified = report.uncertified;
  return *report.roots;
}

int roots_in(const std::vector<double>& roots, double lo, double hi) {
  const auto a = std::upper_bound(roots.begin(), roots.end(), lo);
  const auto b = std::upper_bound(roots.begin(), roots.end(), hi);
  return static_cast<int>(b - a);
}

// Largest number of sorted roots inside any closed window of length len,
// with the window's left end.
std::pair<int, double> densest_window(const std::vector<double>& roots, double len) {
  int best = 0;
  double at = roots.empty() ? 0.0 : roots.front();
  std::size_t i = 0;
  for (std::size_t j = 0; j < roots.size(); ++j) {
    while (roots[j] - roots[i] > len) ++i;
    const int c = static_cast<int>(j - i + 1);
    if (c > best) {
      best = c;
      at = roots[i];
    }
  }
  return {best, at};
}

double binomial(int r, int i) {
  double c = 1.0;
  for (int k = 1; k <= i; ++k) c = c * (r - i + k) / k;
  return c;
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::upper: return "upper";
    case Mode::lower: return "lower";
    case Mode::report: return "report";
  }
  return "unknown";
}

bool any_hard_failure(const std::vector<CheckOutcome>& outcomes) {
  return std::any_of(outcomes.begin(), outcomes.end(),
                     [](const CheckOutcome& o) { return o.hard && !o.passed; });
}

// ---- kernel ---------------------------------------------------------------

double dirichlet_deriv_product(int n, int r, double x) {
  if (r < 0 || r > 8) throw std::invalid_argument("product rule supports 0 <= r <= 8");
  const double T = n + 0.5;
  double sum = r == 0 ? 0.5 : 0.0;
  for (int i = 0; i <= r; ++i) {
    const int k = r - i;
    const double a = 0.5 * std::pow(T, k) * std::sin(T * x + k * 0.5 * pi);
    sum += binomial(r, i) * a * kernel::b_deriv(i, x);
  }
  return sum;
}

std::vector<CheckOutcome> check_kernel_bounds(int n, int r_max, int grid_density,
                                              const KernelCheckOptions& options) {
  if (n < 1 || r_max < 1 || r_max > 8 || grid_density < 2) {
    throw std::invalid_argument("check_kernel_bounds: need n >= 1, 1 <= r_max <= 8, grid >= 2");
  }
  if (!(options.delta > 0.0 && options.delta < 1.0)) {
    throw std::invalid_argument("check_kernel_bounds: delta must lie in (0, 1)");
  }
  if (constants::kernel_domain / n >= pi) {
    throw std::domain_error("check_kernel_bounds: [2^15/n, pi] is empty");
  }
  const double T = n + 0.5;
  const double delta = options.delta;
  std::vector<CheckOutcome> out;

  for (int r = 1; r <= r_max; ++r) {
    const double lo = constants::kernel_domain * r / n;
    const std::string name = "kernel_upper_r" + std::to_string(r);
    if (lo >= pi) {
      out.push_back(empty_domain(name, Mode::upper, true, {lo, pi}));
      continue;
    }
    auto o = make(name, Mode::upper, true);
    // Log-spaced grid: the bound is tightest near the lower end.
    const double step = std::log(pi / lo) / (grid_density - 1);
    for (int i = 0; i < grid_density; ++i) {
      const double x = i == grid_density - 1 ? pi : lo * std::exp(i * step);
      const double d = dirichlet_deriv_product(n, r, x);
      const double bound = constants::kernel_upper * std::pow(T, r) / x;
      const double ratio = std::abs(d) / bound;
      if (ratio > o.ratio) {
        o.ratio = ratio;
        o.witness = {x, x, {{"value", d}, {"bound", bound}}};
      }
    }
    settle(o);
    out.push_back(o);
  }

  for (int r = 1; r <= r_max; ++r) {
    const double lo = constants::kernel_domain * r / (delta * n);
    const double len = delta / n;
    const std::string name = "kernel_lower_r" + std::to_string(r);
    if (lo + len > pi) {
      out.push_back(empty_domain(name, Mode::lower, true, {lo, pi}));
      continue;
    }
    auto o = make(name, Mode::lower, true);
    o.ratio = kInf;
    for (int w = 0; w < options.windows; ++w) {
      const double a = lo + (pi - len - lo) * unit(options.seed, w, 1);
      double best = 0.0;
      double arg = a;
      for (int k = 0; k <= options.subsamples; ++k) {
        const double x = a + len * k / options.subsamples;
        const double v = std::abs(dirichlet_deriv_product(n, r, x)) /
                         (constants::kernel_lower * delta * std::pow(T, r) / x);
        if (v > best) {
          best = v;
          arg = x;
        }
      }
      if (best < o.ratio) {
        o.ratio = best;
        o.witness = {a, a + len, {{"x0", arg}}};
      }
    }
    settle(o);
    out.push_back(o);
  }

  {
    auto o = make("b_factorial_bound", Mode::upper, true);
    for (int r = 0; r <= r_max; ++r) {
      const double fact = std::tgamma(r + 1.0);
      const double lo = 1e-4;
      const double step = std::log(pi / lo) / (grid_density - 1);
      for (int i = 0; i < grid_density; ++i) {
        const double x = i == grid_density - 1 ? pi : lo * std::exp(i * step);
        const double b = kernel::b_deriv(r, x);
        const double bound = std::ldexp(fact, r + 3) / std::pow(x, r + 1);
        const double ratio = std::abs(b) / bound;
        if (ratio > o.ratio) {
          o.ratio = ratio;
          o.witness = {x, x, {{"r", r}, {"value", b}, {"bound", bound}}};
        }
      }
    }
    settle(o);
    out.push_back(o);
  }

  {
    auto o = make("large_sine", Mode::lower, true);
    o.ratio = kInf;
    const int fn = options.fact_n;
    const double Tf = fn + 0.5;
    const double len = delta / fn;
    for (int r = 0; r <= r_max; ++r) {
      for (int w = 0; w < options.windows; ++w) {
        const double a = (pi - len) * unit(options.seed, w, 2);
        double best = 0.0;
        double arg = a;
        for (int k = 0; k <= options.subsamples; ++k) {
          const double x = a + len * k / options.subsamples;
          const double v = std::abs(std::sin(Tf * x + r * 0.5 * pi)) / (constants::large_sin * delta);
          if (v > best) {
            best = v;
            arg = x;
          }
        }
        if (best < o.ratio) {
          o.ratio = best;
          o.witness = {a, a + len, {{"r", r}, {"x0", arg}, {"n", fn}}};
        }
      }
    }
    settle(o);
    out.push_back(o);
  }
  return out;
}

// ---- mean value -----------------------------------------------------------

CheckOutcome check_mean_value(const DiffPoly& f, Interval I, int ell) {
  if (ell < 0) throw std::invalid_argument("check_mean_value: ell must be >= 0");
  if (!(I.hi > I.lo) || I.lo < 0.0 || I.hi > constants::two_pi) {
    throw std::invalid_argument("check_mean_value: I must be a nonempty subinterval of [0, 2 pi]");
  }
  if (ell > 0) {
    const Method method = f.n() <= constants::oracle_max_n ? Method::oracle : Method::fast_slow;
    const int certified = count_on(f, I, method).certified;
    if (certified < ell) {
      throw std::invalid_argument("check_mean_value: f has fewer than ell certified zeros in I");
    }
  }
  const double eta = I.length();
  const auto [sup_f, arg_f] = sup_abs([&](double x) { return poly::eval_f(f, x); }, I.lo, I.hi);
  const auto [sup_d, arg_d] =
      ell == 0 ? std::pair{sup_f, arg_f}
               : sup_abs([&](double x) { return poly::eval_f_deriv(f, ell, x); }, I.lo, I.hi);
  auto o = make("mean_value_l" + std::to_string(ell), Mode::upper, true);
  const double bound = std::pow(eta, ell) * sup_d;
  o.ratio = bound > 0.0 ? sup_f / (constants::sup_slack * bound) : (sup_f > 0.0 ? kInf : 0.0);
  o.witness = {I.lo, I.hi,
               {{"sup_f", sup_f}, {"at", arg_f}, {"sup_derivative", sup_d}, {"derivative_at", arg_d},
                {"bound", bound}}};
  settle(o);
  return o;
}

// ---- short intervals ------------------------------------------------------

double short_interval_bound(int n, double delta) {
  return std::log(3.0 * n) / std::log(1.0 / delta) + 1.0;
}

std::vector<CheckOutcome> check_short_interval_bounds(const DiffPoly& f, double alpha,
                                                      double delta,
                                                      const ShortIntervalOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (f.degenerate()) throw std::domain_error("f vanishes identically");
  const int n = f.n();
  const int m = f.mask().degree();
  const double len = delta / n;
  const double extended_lo = 4.0 / n;
  int uncertified = 0;
  const auto roots = roots_on(f, {extended_lo, pi}, &uncertified);
  const bool low_degree = m <= std::pow(static_cast<double>(n), 1.0 - alpha) + 1e-9;
  std::vector<CheckOutcome> out;

  // Windows holding at most 2/alpha roots. The densest window over all
  // placements dominates every tiling; uncertified candidates are added as if
  // they all fell into it.
  {
    const double bound = 2.0 / alpha;
    const double literal = constants::short_window_cut / (alpha * n);
    const bool applicable = low_degree && delta <= constants::delta_short;
    auto evaluate = [&](std::string name, double lo, bool hard) {
      auto o = make(std::move(name), Mode::upper, hard);
      std::vector<double> inside;
      for (double x : roots) {
        if (x >= lo) inside.push_back(x);
      }
      const auto [count, at] = densest_window(inside, len);
      const int worst = count + uncertified;
      o.ratio = worst / bound;
      o.witness = {at, at + len, {{"roots", worst}, {"bound", bound}}};
      settle(o);
      return o;
    };
    if (!applicable) {
      auto o = empty_domain("short_window_roots", Mode::upper, true, {literal, pi});
      o.detail = "hypotheses not met: needs deg g <= n^(1-alpha) and delta <= 2^-14";
      out.push_back(o);
    } else if (literal + len > pi) {
      out.push_back(empty_domain("short_window_roots", Mode::upper, true, {literal, pi}));
    } else {
      out.push_back(evaluate("short_window_roots", literal, true));
    }
    if (applicable) out.push_back(evaluate("short_window_roots_extended", extended_lo, false));
  }

  // High derivatives of g on windows with at least t + 2 roots.
  if (low_degree) {
    const int t = static_cast<int>(std::lround(1.0 / alpha));
    auto o = make("high_derivative_extended", Mode::lower, false);
    o.ratio = kInf;
    int windows = 0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      while (roots[j] - roots[i] > len) ++i;
      if (static_cast<int>(j - i + 1) < t + 2) continue;
      ++windows;
      const double a = roots[i];
      const double b = a + len;
      const double mt =
          sup_abs([&](double x) { return poly::eval_g_deriv(f.mask(), t, x); }, a, b, 256).first;
      const double mt2 =
          sup_abs([&](double x) { return poly::eval_g_deriv(f.mask(), t + 2, x); }, a, b, 256)
              .first;
      const double lhs = mt + len * len * mt2;
      const double rhs = constants::high_derivative * delta * std::pow(n, t) / b;
      if (lhs / rhs < o.ratio) {
        o.ratio = lhs / rhs;
        o.witness = {a, b, {{"lhs", lhs}, {"rhs", rhs}}};
      }
    }
    o.detail = std::to_string(windows) + " windows with at least t+2 roots";
    settle(o);
    out.push_back(o);
  }

  // Windows not inside E'_n(g). For delta >= 1/4 only the extended,
  // non-hard evaluation is made.
  {
    const bool applicable = delta < 0.25;
    const double bound = short_interval_bound(n, delta);
    const double literal = constants::kernel_domain / (delta * n);
    const auto eprime = envelope::envelope_prime_set(f.mask(), n);
    auto evaluate = [&](std::string name, double lo, bool hard) {
      auto o = make(std::move(name), Mode::upper, hard);
      int checked = 0;
      for (double b = pi; b - len >= lo; b -= len) {
        const Interval w{b - len, b};
        if (eprime.covers(w)) continue;
        ++checked;
        const int c = roots_in(roots, w.lo, w.hi) + uncertified;
        if (c / bound > o.ratio) {
          o.ratio = c / bound;
          o.witness = {w.lo, w.hi, {{"roots", c}, {"bound", bound}}};
        }
      }
      o.detail = std::to_string(checked) + " windows outside E'";
      if (checked == 0) o.witness.values["bound"] = bound;
      settle(o);
      return o;
    };
    if (!applicable || literal + len > pi) {
      auto o = empty_domain("derivative_window_roots", Mode::upper, true, {literal, pi});
      o.witness.values["bound"] = bound;
      if (!applicable) o.detail = "hypotheses not met: needs delta < 1/4";
      out.push_back(o);
    } else {
      out.push_back(evaluate("derivative_window_roots", literal, true));
    }
    out.push_back(evaluate("derivative_window_roots_extended", extended_lo, false));
  }

  // Empirical constant of Z_I <= C alpha^-1 (n|I| + 1).
  if (low_degree) {
    auto o = make("short_interval_constant", Mode::report, false);
    for (int k = 0; k < options.intervals; ++k) {
      // Log-uniform length between 1/n and the whole range.
      const double span = pi - extended_lo;
      const double length = std::exp(std::log(1.0 / n) + std::log(span * n) * unit(options.seed, k, 3));
      const double a = extended_lo + (span - length) * unit(options.seed, k, 4);
      const int z = roots_in(roots, a, a + length);
      const double c = z / ((n * length + 1.0) / alpha);
      if (c > o.ratio) {
        o.ratio = c;
        o.witness = {a, a + length, {{"roots", z}}};
      }
    }
    settle(o);
    out.push_back(o);
  }
  return out;
}

// ---- envelope statements --------------------------------------------------

CheckOutcome check_sandwich(const DiffPoly& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const int n = f.n();
  const int m = f.mask().degree();
  if (m > std::pow(static_cast<double>(n), 1.0 - alpha) + 1e-9) {
    throw std::invalid_argument("check_sandwich requires deg g <= n^(1-alpha)");
  }
  const auto report = count_total(f);
  const double z = report.total();
  const double measure = envelope::envelope_set(f.mask()).measure();
  const double lower = n * measure / constants::two_pi - constants::sandwich_lower * m;
  auto o = make("sandwich_lower", Mode::lower, true);
  o.ratio = lower > 0.0 ? z / lower : kInf;
  o.witness = {0.0, pi,
               {{"Z", z},
                {"measure", measure},
                {"lower", lower},
                {"upper_constant", z / (n * measure + m + std::pow(n, 0.6))}}};
  settle(o);
  return o;
}

CheckOutcome check_interval_count(const CoeffMask& mask) {
  const int m = mask.degree();
  const int bound = constants::envelope_count_slope * m + constants::envelope_count_offset;
  auto o = make("envelope_interval_count", Mode::upper, true);
  try {
    const int count = envelope::envelope_set(mask, {.polish = false}).count();
    o.ratio = static_cast<double>(count) / bound;
    o.witness.values = {{"count", count}, {"bound", bound}, {"m", m}};
  } catch (const std::logic_error& e) {
    o.ratio = kInf;
    o.detail = e.what();
  }
  settle(o);
  return o;
}

CheckOutcome check_danger(const DiffPoly& f) {
  // Exact zeros with |phi| = 1 sit on the boundary; allow rounding there.
  constexpr double tol = 1e-9;
  auto o = make("zeros_in_envelope", Mode::upper, true);
  const auto roots = roots_on(f, {0.0, pi});
  for (double x : roots) {
    if (x <= 0.0) continue;
    const double phi = kernel::slow_curve_phi(f.mask(), x);
    const double ratio = std::abs(phi) / (1.0 + tol);
    if (ratio > o.ratio) {
      o.ratio = ratio;
      o.witness = {x, x, {{"phi", phi}}};
    }
  }
  o.detail = std::to_string(roots.size()) + " zeros";
  settle(o);
  return o;
}

CheckOutcome check_root_floor(const DiffPoly& f) {
  auto o = make("envelope_root_floor", Mode::lower, true);
  o.ratio = kInf;
  const auto e = envelope::envelope_set(f.mask());
  for (const auto& J : e.intervals()) {
    const int floor_count = static_cast<int>(std::floor(f.T() * J.length() / constants::two_pi));
    if (floor_count < 1) continue;
    const int z = count_on(f, J).certified;
    const double ratio = static_cast<double>(z) / floor_count;
    if (ratio < o.ratio) {
      o.ratio = ratio;
      o.witness = {J.lo, J.hi, {{"zeros", z}, {"floor", floor_count}}};
    }
  }
  settle(o);
  return o;
}

CheckOutcome check_transfer(const CoeffMask& mask, int n, double delta, int windows,
                            std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (n < 2 || mask.degree() > n) throw std::invalid_argument("check_transfer needs deg g <= n");
  const bool hard = delta <= 1.0 / constants::derivative_envelope;
  auto o = make("transfer_to_plus", Mode::upper, hard);
  const double len = delta / n;
  const double lo = 4.0 / n;
  if (lo + len > pi) return empty_domain(o.name, Mode::upper, hard, {lo, pi});
  const auto e = envelope::restrict(envelope::envelope_set(mask), {lo, pi});
  const auto q = envelope::envelope_prime_set(mask, n);
  if (e.empty()) {
    o.detail = "E(g) misses [4/n, pi]";
    settle(o);
    return o;
  }
  int checked = 0;
  for (int k = 0; k < windows; ++k) {
    // A point of E chosen by measure, then a window through it.
    double target = e.measure() * unit(seed, k, 5);
    double x = e.intervals().back().hi;
    for (const auto& J : e.intervals()) {
      if (target <= J.length()) {
        x = J.lo + target;
        break;
      }
      target -= J.length();
    }
    const double a = std::clamp(x - len * unit(seed, k, 6), lo, pi - len);
    const Interval I{a, a + len};
    if (!q.covers(I)) continue;
    ++checked;
    for (int i = 0; i <= 16; ++i) {
      const double y = a + len * i / 16;
      const double v = std::abs(poly::eval_g(mask, y) - 0.5) /
                       (constants::plus_envelope * kernel::envelope_s(y) * constants::sup_slack);
      if (v > o.ratio) {
        o.ratio = v;
        o.witness = {I.lo, I.hi, {{"x", y}}};
      }
    }
  }
  o.detail = std::to_string(checked) + " windows inside E'";
  settle(o);
  return o;
}

// ---- measure of E' and E+ -------------------------------------------------

double eprime_plus_measure(const CoeffMask& mask, int n) {
  const envelope::ScanOptions scan{.polish = false};
  const auto q = envelope::envelope_prime_set(mask, n, scan);
  const auto p = envelope::envelope_plus_set(mask, scan);
  return envelope::restrict(q.intersect(p), {std::pow(n, -0.1), pi}).measure();
}

namespace {

double measure_mean(int n, int m, long long trials, std::uint64_t seed, int threads) {
  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(values.size(), threads, [&](std::size_t i) {
    values[i] = eprime_plus_measure(ensemble::sample_mask(m, seed, i), n);
  });
  return ensemble::summarize(ensemble::Kind::envelope_measure, n, m, seed, values).mean;
}

}  // namespace

double measure_calibration(long long trials, std::uint64_t seed, int threads) {
  const int n = 512;
  return measure_mean(n, n, trials, seed, threads) * n * n / std::pow(n, 1.1);
}

CheckOutcome check_measure_Eprime_plus(int n, int m, long long trials, std::uint64_t seed,
                                       double calibration, int threads) {
  if (m > n || m < std::pow(static_cast<double>(n), 0.99)) {
    throw std::domain_error("check_measure_Eprime_plus requires n^0.99 <= m <= n");
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const double mean = measure_mean(n, m, trials, seed, threads);
  const double product = mean * m * static_cast<double>(m) / std::pow(n, 1.1);
  auto o = make("eprime_plus_measure_n" + std::to_string(n), Mode::upper, false);
  o.ratio = std::max(mean / pi, product / (4.0 * calibration));
  o.witness = {std::pow(n, -0.1), pi,
               {{"mean", mean}, {"product", product}, {"calibration", calibration}}};
  settle(o);
  return o;
}

CheckOutcome check_stability(std::string name, const std::vector<double>& values, double factor) {
  auto o = make(std::move(name), Mode::upper, false);
  if (values.empty()) throw std::invalid_argument("check_stability needs values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  o.ratio = *lo > 0.0 ? (*hi / *lo) / factor : kInf;
  o.witness.values = {{"min", *lo}, {"max", *hi}, {"factor", factor}};
  settle(o);
  return o;
}

// ---- Erdos-Turan ----------------------------------------------------------

CheckOutcome check_et(const DiffPoly& f, const std::vector<Interval>& intervals) {
  const int n = f.n();
  if (n < 2) throw std::domain_error("check_et requires n >= 2");
  if (intervals.empty()) throw std::invalid_argument("check_et needs intervals");
  const double scale = std::sqrt(n * std::log(static_cast<double>(n)));
  auto o = make("erdos_turan_constant", Mode::report, false);
  o.ratio = -kInf;
  double full = -kInf;
  for (const auto& I : intervals) {
    if (I.lo < 0.0 || I.hi > constants::two_pi || !(I.hi > I.lo)) {
      throw std::invalid_argument("check_et: intervals must lie in [0, 2 pi]");
    }
    const int z = count_on(f, I).total();
    const double k = (z - n * I.length() / constants::two_pi) / scale;
    full = std::max(full, (z - n * I.length() / pi) / scale);
    if (k > o.ratio) {
      o.ratio = k;
      o.witness = {I.lo, I.hi, {{"zeros", z}}};
    }
  }
  o.witness.values["K_full"] = full;
  settle(o);
  return o;
}

// ---- identities -----------------------------------------------------------

std::vector<CheckOutcome> identity_suite(const IdentityOptions& options) {
  std::vector<CheckOutcome> out;
  const std::array<int, 4> degrees{10, 100, 1000, 2000};
  std::vector<CheckOutcome> fact(degrees.size());
  parallel_for(degrees.size(), options.threads, [&](std::size_t idx) {
    const int n = degrees[idx];
    const auto mask = ensemble::sample_mask(n, options.seed, idx, 7);
    const DiffPoly f(n, mask);
    auto o = make("factorization_n" + std::to_string(n), Mode::upper, true);
    const double tol = 1e-9 * (n + 1);
    for (int i = 0; i < options.points; ++i) {
      const double x = 1e-3 + (constants::two_pi - 2e-3) * unit(options.seed, i, 8 + idx);
      const double factored =
          kernel::envelope_s(x) * (std::sin(f.T() * x) - kernel::slow_curve_phi(mask, x));
      const double err = std::abs(factored - poly::eval_f_direct(f, x));
      if (err / tol > o.ratio) {
        o.ratio = err / tol;
        o.witness = {x, x, {{"error", err}, {"tolerance", tol}}};
      }
    }
    settle(o);
    fact[idx] = o;
  });
  out.insert(out.end(), fact.begin(), fact.end());

  {
    auto o = make("dirichlet_envelope", Mode::upper, true);
    for (int n : {0, 1, 7, 64, 513, 2048}) {
      for (int i = 0; i < options.points; ++i) {
        const double x = 1e-6 + (constants::two_pi - 2e-6) * unit(options.seed, i, 20);
        const double v = std::abs(kernel::dirichlet(n, x) - 0.5) /
                         (kernel::envelope_s(x) * (1.0 + 1e-12));
        if (v > o.ratio) {
          o.ratio = v;
          o.witness = {x, x, {{"n", n}}};
        }
      }
    }
    settle(o);
    out.push_back(o);
  }

  {
    const int m = options.variance_m;
    std::vector<double> xs;
    for (std::uint64_t i = 0; static_cast<int>(xs.size()) < options.variance_points; ++i) {
      const double x = pi * unit(options.seed, i, 21);
      if (std::min(x, pi - x) >= constants::two_pi / m) xs.push_back(x);
    }
    std::vector<double> z(xs.size());
    std::vector<double> empirical(xs.size());
    parallel_for(xs.size(), options.threads, [&](std::size_t p) {
      const double x = xs[p];
      const int bytes = (m + 1 + 7) / 8;
      std::vector<double> table(static_cast<std::size_t>(bytes) * 256);
      for (int b = 0; b < bytes; ++b) {
        for (int v = 0; v < 256; ++v) {
          double s = 0.0;
          for (int k = 0; k < 8; ++k) {
            if ((v >> k) & 1) s += std::cos((8.0 * b + k) * x);
          }
          table[static_cast<std::size_t>(b) * 256 + v] = s;
        }
      }
      const long long samples = options.variance_samples;
      std::vector<double> g(static_cast<std::size_t>(samples));
      for (long long t = 0; t < samples; ++t) {
        const auto words = ensemble::sample_words(m, options.seed + 1000 + p, t);
        double s = 0.0;
        for (int b = 0; b < bytes; ++b) {
          s += table[static_cast<std::size_t>(b) * 256 + ((words[b / 8] >> (8 * (b % 8))) & 0xFFu)];
        }
        g[t] = s;
      }
      double mean = 0.0;
      for (double v : g) mean += v;
      mean /= samples;
      double var = 0.0;
      double fourth = 0.0;
      for (double v : g) {
        const double d = v - mean;
        var += d * d;
        fourth += d * d * d * d;
      }
      var /= samples - 1;
      fourth /= samples;
      const double analytic = (m + 1 + kernel::dirichlet(m, std::fmod(2 * x, constants::two_pi))) / 8;
      const double se = std::sqrt(std::max(fourth - var * var, 0.0) / samples);
      empirical[p] = var;
      z[p] = std::abs(var - analytic) / se;
    });
    auto o = make("variance_identity", Mode::upper, true);
    for (std::size_t p = 0; p < xs.size(); ++p) {
      if (z[p] / 5.0 > o.ratio) {
        o.ratio = z[p] / 5.0;
        o.witness = {xs[p], xs[p], {{"empirical", empirical[p]}, {"standard_errors", z[p]}}};
      }
    }
    settle(o);
    out.push_back(o);
  }

  {
    auto o = make("covariance_identity", Mode::upper, true);
    for (int m : {16, 64, 256}) {
      for (int j = m / 2; j <= m - 1; ++j) {
        const double a = pi * j / m;
        const double b = pi * (j + 1) / m;
        double sum = 0.0;
        for (int k = 0; k <= m; ++k) sum += std::cos(k * a) * std::cos(k * b);
        if (std::abs(sum) / 1e-10 > o.ratio) {
          o.ratio = std::abs(sum) / 1e-10;
          o.witness = {a, b, {{"m", m}, {"j", j}, {"sum", sum}}};
        }
      }
    }
    settle(o);
    out.push_back(o);
  }
  return out;
}

// ---- suites ---------------------------------------------------------------

std::vector<std::string_view> suite_names() {
  return {"identities", "kernel", "short", "sandwich", "envelope", "measure", "et", "all"};
}

namespace {

std::vector<CheckOutcome> kernel_suite(const SuiteOptions& o) {
  KernelCheckOptions k;
  k.seed = o.seed;
  auto out = check_kernel_bounds(1 << 20, 8, 100000, k);
  const DiffPoly cosine(1, CoeffMask::from_string("1"));
  out.push_back(check_mean_value(cosine, {pi / 2 - 0.1, pi / 2 + 0.1}, 1));
  out.push_back(check_mean_value(cosine, {pi / 2 - 0.1, pi / 2 + 0.1}, 0));
  return out;
}

std::vector<CheckOutcome> short_suite(const SuiteOptions& o) {
  auto out = check_short_interval_bounds(DiffPoly(2048, ensemble::sample_mask(4, o.seed)), 0.5,
                                         constants::delta_short, {.intervals = 100, .seed = o.seed});
  const int n = 1024;
  auto big = check_short_interval_bounds(DiffPoly(n, ensemble::sample_nondegenerate(n, 900, o.seed, 0)),
                                         0.5, std::pow(n, -0.1), {.intervals = 100, .seed = o.seed});
  out.insert(out.end(), big.begin(), big.end());
  return out;
}

std::vector<CheckOutcome> sandwich_suite(const SuiteOptions& o) {
  std::vector<std::pair<int, int>> cells;
  for (int t = 0; t < 40; ++t) cells.push_back({t % 2 ? 1024 : 256, t % 4 < 2 ? 4 : 16});
  std::vector<CheckOutcome> out(cells.size());
  parallel_for(cells.size(), o.threads, [&](std::size_t i) {
    const auto [n, m] = cells[i];
    out[i] = check_sandwich(DiffPoly(n, ensemble::sample_mask(m, o.seed, i)), 0.5);
    out[i].name += "_n" + std::to_string(n) + "_m" + std::to_string(m) + "_t" + std::to_string(i);
  });
  out.push_back(check_sandwich(DiffPoly(512, CoeffMask{}), 0.5));
  return out;
}

std::vector<CheckOutcome> envelope_suite(const SuiteOptions& o) {
  const int masks = 1000;
  const int instances = 100;
  std::vector<CheckOutcome> counts(masks);
  parallel_for(counts.size(), o.threads, [&](std::size_t i) {
    counts[i] = check_interval_count(ensemble::sample_mask(1 + static_cast<int>(i % 256), o.seed, i));
  });
  std::vector<std::array<CheckOutcome, 3>> per(instances);
  parallel_for(per.size(), o.threads, [&](std::size_t i) {
    const int n = 64 + 16 * static_cast<int>(i);
    const int m = 2 + static_cast<int>(i % 30);
    const DiffPoly f(n, ensemble::sample_nondegenerate(n, m, o.seed + 1, i));
    per[i] = {check_danger(f), check_root_floor(f), check_transfer(f.mask(), n, 1.0 / 128, 200, o.seed + i)};
  });
  std::vector<CheckOutcome> out;
  // Collapse each family to its worst member.
  auto worst = [](std::vector<CheckOutcome> family) {
    CheckOutcome w = family.front();
    int failures = 0;
    for (const auto& c : family) {
      if (!c.passed) ++failures;
      const bool worse = c.mode == Mode::lower ? c.ratio < w.ratio : c.ratio > w.ratio;
      if (worse) w = c;
    }
    w.passed = failures == 0;
    w.detail = std::to_string(family.size()) + " cases, " + std::to_string(failures) + " failures";
    return w;
  };
  out.push_back(worst(counts));
  for (int k = 0; k < 3; ++k) {
    std::vector<CheckOutcome> family;
    for (const auto& p : per) family.push_back(p[k]);
    out.push_back(worst(family));
  }
  return out;
}

std::vector<CheckOutcome> measure_suite(const SuiteOptions& o) {
  const double calibration = measure_calibration(100, o.seed + 100, o.threads);
  std::vector<CheckOutcome> out;
  std::vector<double> products;
  for (int n : {512, 2048}) {
    out.push_back(check_measure_Eprime_plus(n, n, 200, o.seed, calibration, o.threads));
    products.push_back(out.back().witness.values.at("product"));
  }
  out.push_back(check_stability("eprime_plus_measure_stability", products, 4.0));
  out.push_back([] {
    auto e = make("eprime_plus_empty_mask", Mode::upper, true);
    const int n = 1000;
    const double expected = pi - std::pow(n, -0.1);
    e.ratio = std::abs(eprime_plus_measure(CoeffMask{}, n) - expected) / 1e-12;
    settle(e);
    return e;
  }());
  return out;
}

std::vector<CheckOutcome> et_suite(const SuiteOptions& o) {
  const int n = 1024;
  std::vector<Interval> intervals;
  for (int k = 0; k < 50; ++k) {
    const double a = constants::two_pi * unit(o.seed, k, 30);
    const double b = constants::two_pi * unit(o.seed, k, 31);
    intervals.push_back({std::min(a, b), std::max(a, b)});
  }
  auto plain = check_et(DiffPoly(n, CoeffMask{}), intervals);
  plain.name += "_empty_mask";
  auto random = check_et(DiffPoly(n, ensemble::sample_mask(512, 4)), intervals);
  random.name += "_m512";
  return {plain, random, check_et(DiffPoly(2, CoeffMask::from_string("1")), {{0.0, constants::two_pi}})};
}

}  // namespace

std::vector<CheckOutcome> run_suite(std::string_view suite, const SuiteOptions& options) {
  if (suite == "identities") {
    return identity_suite({.seed = options.seed, .threads = options.threads});
  }
  if (suite == "kernel") return kernel_suite(options);
  if (suite == "short") return short_suite(options);
  if (suite == "sandwich") return sandwich_suite(options);
  if (suite == "envelope") return envelope_suite(options);
  if (suite == "measure") return measure_suite(options);
  if (suite == "et") return et_suite(options);
  if (suite == "all") {
    std::vector<CheckOutcome> out;
    for (auto name : suite_names()) {
      if (name == "all") continue;
      auto part = run_suite(name, options);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw std::invalid_argument("unknown verify suite '" + std::string(suite) + "'");
}

}  // namespace cosz::verify
