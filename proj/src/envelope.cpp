#include "cosz/envelope.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosz/constants.hpp"
#include "cosz/poly.hpp"

namespace cosz::envelope {

namespace {

// ---- sampled g, g', g'' on x_i = 2 pi i / N, i = 0..N/2 --------------------

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (ptr == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

// Plan creation is not thread-safe in FFTW; execution on fresh arrays is.
fftw_plan c2r_plan(int n) {
  static std::mutex mutex;
  static std::map<int, fftw_plan> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  FftwBuffer in(sizeof(fftw_complex) * static_cast<std::size_t>(n / 2 + 1));
  FftwBuffer out(sizeof(double) * static_cast<std::size_t>(n));
  fftw_plan plan = fftw_plan_dft_c2r_1d(n, static_cast<fftw_complex*>(in.ptr),
                                        static_cast<double*>(out.ptr), FFTW_ESTIMATE);
  if (plan == nullptr) throw std::runtime_error("fftw: cannot create plan");
  cache.emplace(n, plan);
  return plan;
}

// Samples sum_k eps_k k^order cos(kx + order pi / 2) on the half grid.
std::vector<double> sample_derivative(const CoeffMask& mask, int order, int n) {
  const std::size_t half = static_cast<std::size_t>(n / 2 + 1);
  FftwBuffer in(sizeof(fftw_complex) * half);
  FftwBuffer out(sizeof(double) * static_cast<std::size_t>(n));
  auto* spec = static_cast<fftw_complex*>(in.ptr);
  for (std::size_t k = 0; k < half; ++k) spec[k][0] = spec[k][1] = 0.0;
  // Output is X_0 + 2 Re sum_{k>=1} X_k e^{ikx}; i^order rotates cos into
  // the derivative of the requested order.
  const std::complex<double> rot = std::pow(std::complex<double>(0.0, 1.0), order);
  for (int k : mask.indices()) {
    const double scale = (k == 0 ? (order == 0 ? 1.0 : 0.0) : 0.5 * std::pow(k, order));
    const std::complex<double> c = scale * rot;
    spec[k][0] = c.real();
    spec[k][1] = c.imag();
  }
  fftw_execute_dft_c2r(c2r_plan(n), spec, static_cast<double*>(out.ptr));
  const auto* y = static_cast<const double*>(out.ptr);
  return std::vector<double>(y, y + half);
}

// ---- level functions ------------------------------------------------------

struct Point {
  double v;
  double dv;
};

// phi(x) = 2 sin(x/2) (g - 1/2).
struct PhiLevel {
  explicit PhiLevel(const CoeffMask& mask) : curve(mask) {}
  Point exact(double x) const {
    const auto p = curve.eval(x);
    return {p.phi, p.dphi};
  }
  SlowCurve curve;
};

// w(x) = 2 sin(x/2) g'(x).
struct SlopeLevel {
  explicit SlopeLevel(const CoeffMask& mask) : mask(&mask) {}
  Point exact(double x) const {
    double d1 = 0.0;
    double d2 = 0.0;
    for (int k : mask->indices()) {
      const double kk = k;
      d1 -= kk * std::sin(kk * x);
      d2 -= kk * kk * std::cos(kk * x);
    }
    const double sh = std::sin(0.5 * x);
    const double ch = std::cos(0.5 * x);
    return {2.0 * sh * d1, ch * d1 + 2.0 * sh * d2};
  }
  const CoeffMask* mask;
};

struct Grid {
  std::vector<double> x;
  std::vector<Point> p;
};

Grid phi_grid(const CoeffMask& mask) {
  const int n = scan_size(mask.degree());
  const auto g = sample_derivative(mask, 0, n);
  const auto g1 = sample_derivative(mask, 1, n);
  const int half = n / 2;
  long long g_pi = 0;
  for (int k : mask.indices()) g_pi += (k % 2 == 0) ? 1 : -1;
  Grid grid;
  grid.x.resize(half + 1);
  grid.p.resize(half + 1);
  for (int i = 0; i <= half; ++i) {
    const double x = (i == half) ? constants::pi : constants::two_pi * i / n;
    const double sh = (i == half) ? 1.0 : std::sin(0.5 * x);
    const double ch = (i == half) ? 0.0 : std::cos(0.5 * x);
    const double gv = (i == half) ? static_cast<double>(g_pi) : g[i];
    const double gd = (i == half) ? 0.0 : g1[i];
    grid.x[i] = x;
    grid.p[i] = {2.0 * sh * (gv - 0.5), ch * (gv - 0.5) + 2.0 * sh * gd};
  }
  grid.p[0] = {0.0, grid.p[0].dv};
  return grid;
}

Grid slope_grid(const CoeffMask& mask) {
  const int n = scan_size(mask.degree());
  const auto g1 = sample_derivative(mask, 1, n);
  const auto g2 = sample_derivative(mask, 2, n);
  const int half = n / 2;
  double g2_pi = 0.0;
  for (int k : mask.indices()) {
    const double kk = static_cast<double>(k) * k;
    g2_pi += (k % 2 == 0) ? -kk : kk;
  }
  Grid grid;
  grid.x.resize(half + 1);
  grid.p.resize(half + 1);
  for (int i = 0; i <= half; ++i) {
    const double x = (i == half) ? constants::pi : constants::two_pi * i / n;
    const double sh = (i == half) ? 1.0 : std::sin(0.5 * x);
    const double ch = (i == half) ? 0.0 : std::cos(0.5 * x);
    const double gd = (i == half) ? 0.0 : g1[i];
    const double gdd = (i == half) ? g2_pi : g2[i];
    grid.x[i] = x;
    grid.p[i] = {2.0 * sh * gd, ch * gd + 2.0 * sh * gdd};
  }
  grid.p[0] = {0.0, 0.0};
  return grid;
}

// ---- crossing location ----------------------------------------------------

// Cubic Hermite interpolant on a cell of width h, in the local variable t.
struct Hermite {
  Point a;
  Point b;
  double h;
  double operator()(double t) const {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a.v + (t3 - 2 * t2 + t) * h * a.dv +
           (-2 * t3 + 3 * t2) * b.v + (t3 - t2) * h * b.dv;
  }
};

// Solves H(t) = target on [lo, hi] given opposite signs of H - target at the
// ends (falls back to the ends' labels if the interpolant disagrees).
double solve_cubic(const Hermite& H, double target, double lo, double hi, bool rising) {
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((H(mid) > target) == rising) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <class Level>
double polish(const Level& level, double x, double target, double lo, double hi) {
  for (int it = 0; it < 8; ++it) {
    const Point p = level.exact(x);
    if (p.dv == 0.0) break;
    const double next = x - (p.v - target) / p.dv;
    if (!(next >= lo && next <= hi)) break;
    const double step = std::abs(next - x);
    x = next;
    if (step < 1e-13) break;
  }
  return x;
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

// Sublevel set {|v| < level} (strict) or {|v| <= level} on [0, pi].
template <class Level>
IntervalSet scan(const Level& level, const Grid& grid, double bound, bool strict,
                 const ScanOptions& options) {
  auto inside = [&](double v) { return strict ? std::abs(v) < bound : std::abs(v) <= bound; };
  std::vector<Interval> out;
  bool in = inside(grid.p[0].v);
  double start = grid.x[0];
  auto locate = [&](std::size_t i, double target, double t_lo, double t_hi, bool rising) {
    const double h = grid.x[i + 1] - grid.x[i];
    const Hermite H{grid.p[i], grid.p[i + 1], h};
    const double t = solve_cubic(H, target, t_lo, t_hi, rising);
    const double x = grid.x[i] + t * h;
    if (!options.polish) return x;
    return polish(level, x, target, grid.x[i] + t_lo * h, grid.x[i] + t_hi * h);
  };
  auto toggle = [&](double x) {
    if (in) {
      out.push_back({start, x});
    } else {
      start = x;
    }
    in = !in;
  };
  for (std::size_t i = 0; i + 1 < grid.x.size(); ++i) {
    const double va = grid.p[i].v;
    const double vb = grid.p[i + 1].v;
    const bool ina = inside(va);
    const bool inb = inside(vb);
    if (ina != inb && i + 2 == grid.x.size() && std::abs(vb) == bound) {
      // Both defining functions are stationary at pi with exact values there,
      // so a boundary value at pi is a tangency at pi itself.
      toggle(constants::pi);
    } else if (ina != inb) {
      const double outer = ina ? vb : va;
      const double target = sign_of(outer) * bound;
      // Rising means H - target goes from negative to positive.
      const bool rising = ina ? (target > 0) : (target < 0);
      toggle(locate(i, target, 0.0, 1.0, rising));
    } else if (!ina && sign_of(va) != sign_of(vb)) {
      // The whole band is crossed inside one cell: enter and leave.
      const double h = grid.x[i + 1] - grid.x[i];
      const Hermite H{grid.p[i], grid.p[i + 1], h};
      const bool up = va < vb;
      const double t0 = solve_cubic(H, 0.0, 0.0, 1.0, up);
      const double first = sign_of(va) * bound;
      const double second = sign_of(vb) * bound;
      toggle(locate(i, first, 0.0, t0, up));
      toggle(locate(i, second, t0, 1.0, up));
    }
  }
  if (in) out.push_back({start, constants::pi});
  return IntervalSet::from_intervals(std::move(out));
}

}  // namespace

int scan_size(int m) {
  const long long need = 128LL * (static_cast<long long>(m) + 2);
  long long n = 256;
  while (n < need) n *= 2;
  if (n > (1LL << 30)) throw std::length_error("envelope scan grid too large");
  return static_cast<int>(n);
}

IntervalSet envelope_set(const CoeffMask& mask, const ScanOptions& options) {
  const PhiLevel level(mask);
  IntervalSet set = scan(level, phi_grid(mask), 1.0, true, options);
  const int limit = constants::envelope_count_slope * mask.degree() +
                    constants::envelope_count_offset;
  if (set.count() > limit) {
    throw std::logic_error("envelope set has " + std::to_string(set.count()) +
                           " intervals, above the bound " + std::to_string(limit));
  }
  return set;
}

IntervalSet envelope_plus_set(const CoeffMask& mask, const ScanOptions& options) {
  const PhiLevel level(mask);
  return scan(level, phi_grid(mask), constants::plus_envelope, false, options);
}

IntervalSet envelope_prime_set(const CoeffMask& mask, int n, const ScanOptions& options) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  const SlopeLevel level(mask);
  return scan(level, slope_grid(mask), constants::derivative_envelope * n, false, options);
}

IntervalSet restrict(const IntervalSet& set, Interval window) {
  if (!(window.lo <= window.hi)) throw std::invalid_argument("restrict: empty window");
  return set.intersect(IntervalSet::from_intervals({window}));
}

bool in_envelope(const CoeffMask& mask, double x) {
  return std::abs(poly::eval_g(mask, x) - 0.5) < 0.5 / std::sin(0.5 * x);
}

bool in_envelope_plus(const CoeffMask& mask, double x) {
  return std::abs(poly::eval_g(mask, x) - 0.5) <=
         constants::plus_envelope * 0.5 / std::sin(0.5 * x);
}

bool in_envelope_prime(const CoeffMask& mask, int n, double x) {
  return std::abs(poly::eval_g_deriv(mask, 1, x)) <=
         constants::derivative_envelope * n * 0.5 / std::sin(0.5 * x);
}

}  // namespace cosz::envelope
