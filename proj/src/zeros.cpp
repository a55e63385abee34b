#include "cosz/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cosz {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::fast_slow: return "fast_slow";
    case Method::grid: return "grid";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "fast_slow") return Method::fast_slow;
  if (name == "grid") return Method::grid;
  if (name == "oracle") return Method::oracle;
  throw std::invalid_argument("unknown counting method '" + std::string(name) + "'");
}

std::string_view to_string(BranchStatus status) {
  switch (status) {
    case BranchStatus::one_root: return "one_root";
    case BranchStatus::no_root: return "no_root";
    case BranchStatus::unresolved: return "unresolved";
  }
  return "unknown";
}

namespace {

// Zero is treated as positive throughout, so that every counter applies the
// same tie rule to exact floating-point zeros.
int sign_of(double v) { return v < 0.0 ? -1 : 1; }

void require_query(const DiffPoly& f, Interval q) {
  if (!std::isfinite(q.lo) || !std::isfinite(q.hi) || q.lo > q.hi || q.lo < 0.0 ||
      q.hi > constants::two_pi) {
    throw std::domain_error("query interval must satisfy 0 <= lo <= hi <= 2pi");
  }
  if (f.degenerate()) throw std::domain_error("f vanishes identically");
}

// Accumulates the outcome of one query.
struct Tally {
  int certified = 0;
  int uncertified = 0;
  std::vector<double> roots;
  bool want_roots = false;
  bool prev_candidate = false;

  void root(double x) {
    ++certified;
    if (want_roots) roots.push_back(x);
    prev_candidate = false;
  }
  void candidate() {
    if (!prev_candidate) ++uncertified;
    prev_candidate = true;
  }
  void resolved() { prev_candidate = false; }
};

// Each counter excludes a guard neighbourhood around every exact zero, so
// that tangential zeros there never reach the sign-change machinery.
struct Plan {
  std::vector<Interval> parts;
};

Plan plan_segments(const DiffPoly& f, Interval q, bool include_pi, Tally& tally) {
  std::vector<Interval> holes;
  for (const auto& z : exact_zeros(f)) {
    if (z.x + z.guard < q.lo || z.x - z.guard > q.hi) continue;
    holes.push_back({z.x - z.guard, z.x + z.guard});
    const bool counted = z.q != 1 || include_pi;
    if (counted && q.lo < z.x && z.x <= q.hi) {
      if (z.order > 0) {
        tally.root(z.x);
      } else {
        tally.candidate();
      }
    }
  }
  Plan plan;
  std::sort(holes.begin(), holes.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double cursor = q.lo;
  for (const auto& h : holes) {
    if (h.lo > cursor) plan.parts.push_back({cursor, std::min(h.lo, q.hi)});
    cursor = std::max(cursor, h.hi);
    if (cursor >= q.hi) break;
  }
  if (cursor < q.hi) plan.parts.push_back({cursor, q.hi});
  std::erase_if(plan.parts, [](const Interval& iv) { return !(iv.hi > iv.lo); });
  return plan;
}

// ---------------------------------------------------------------------------
// Fast-slow counter.

struct Sample {
  double x;
  double psi;   // sin(Tx) - phi(x)
  double dpsi;  // T cos(Tx) - phi'(x)
  double phi;
  double s;     // sin(Tx)
};

enum class Verdict { none, one, split };

class FastSlow {
 public:
  FastSlow(const DiffPoly& f, const CountOptions& options)
      : curve_(f.mask()), T_(f.T()), options_(options) {
    L1_ = curve_.derivative_bound(1);
    M2_ = T_ * T_ + curve_.derivative_bound(2);
    M3_ = T_ * T_ * T_ + curve_.derivative_bound(3);
    // Rounding budget of one evaluation of psi and psi' (argument reduction
    // of sin(Tx) for x <= 2 pi, rotation drift of the slow curve).
    const double ulp = 4.0 * std::numeric_limits<double>::epsilon();
    eps_ = ulp * (1.0 + constants::two_pi * (T_ + L1_) + 64.0 * curve_.derivative_bound(0));
    deps_ = ulp * (T_ + constants::two_pi * (T_ * T_ + M2_) + 64.0 * L1_);
  }

  Sample at(double x) const {
    const auto v = curve_.eval(x);
    const double s = std::sin(T_ * x);
    const double c = std::cos(T_ * x);
    return {x, s - v.phi, T_ * c - v.dphi, v.phi, s};
  }

  // Classifies the cell [a, b] (inside one monotone half-branch) using its
  // midpoint c.
  Verdict test(const Sample& a, const Sample& c, const Sample& b) const {
    const double h = b.x - a.x;
    const bool change = sign_of(a.psi) != sign_of(b.psi);
    // Range of phi over the cell, and the part of the sweep of sin(Tx) that
    // can meet it.
    const double r = 0.5 * L1_ * h + eps_;
    const double lo = std::max(std::min(a.s, b.s), c.phi - r);
    const double hi = std::min(std::max(a.s, b.s), c.phi + r);
    if (lo > hi) return certify_none(change);
    // On the band where sin(Tx) can equal phi, |cos(Tx)| >= cmin, so psi is
    // strictly monotone there and keeps one sign elsewhere.
    const double top = std::max(lo * lo, hi * hi);
    const double cmin = top < 1.0 ? std::sqrt(1.0 - top) : 0.0;
    if (T_ * cmin > L1_ + deps_) return change ? Verdict::one : Verdict::none;
    // Second-order bound: |psi - linear interpolant| <= M2 h^2 / 8.
    const double quad = 0.125 * h * h;
    if (!change && std::min(std::abs(a.psi), std::abs(b.psi)) > M2_ * quad + eps_) {
      return Verdict::none;
    }
    // psi' bounded away from zero: psi is monotone on the cell.
    if (sign_of(a.dpsi) == sign_of(b.dpsi) &&
        std::min(std::abs(a.dpsi), std::abs(b.dpsi)) > M3_ * quad + deps_) {
      return change ? Verdict::one : Verdict::none;
    }
    return Verdict::split;
  }

  void resolve(const Sample& a, const Sample& c, const Sample& b, int depth,
               Tally& tally) const {
    switch (test(a, c, b)) {
      case Verdict::none:
        tally.resolved();
        return;
      case Verdict::one:
        tally.root(tally.want_roots ? refine(a, b) : c.x);
        return;
      case Verdict::split:
        break;
    }
    const double h = b.x - a.x;
    if (depth >= options_.max_depth || 0.125 * M2_ * h * h < eps_) {
      // Below this scale the Taylor remainder is lost in rounding noise.
      if (sign_of(a.psi) != sign_of(b.psi) && std::abs(a.psi) > eps_ &&
          std::abs(b.psi) > eps_) {
        tally.root(c.x);
      } else {
        tally.candidate();
      }
      return;
    }
    const Sample left = at(0.5 * (a.x + c.x));
    const Sample right = at(0.5 * (c.x + b.x));
    resolve(a, left, c, depth + 1, tally);
    resolve(c, right, b, depth + 1, tally);
  }

  double refine(Sample a, Sample b) const {
    const double tol = constants::root_tol * std::max(1.0, 1.0 / T_);
    double lo = a.x;
    double hi = b.x;
    const int slo = sign_of(a.psi);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (sign_of(at(mid).psi) == slo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  double T() const { return T_; }

 private:
  Verdict certify_none(bool change) const {
    if (change) {
      throw std::logic_error("fast_slow: range certificate contradicts endpoint signs");
    }
    return Verdict::none;
  }

  SlowCurve curve_;
  double T_;
  CountOptions options_;
  double L1_ = 0.0;
  double M2_ = 0.0;
  double M3_ = 0.0;
  double eps_ = 0.0;
  double deps_ = 0.0;
};

template <class Visit>
void for_each_branch(double T, Interval part, Visit&& visit) {
  const double width = constants::pi / T;
  const long first = static_cast<long>(std::floor(part.lo / width + 0.5));
  const long last = static_cast<long>(std::floor(part.hi / width + 0.5));
  for (long j = first; j <= last; ++j) {
    const double lo = std::max(part.lo, (j - 0.5) * width);
    const double hi = std::min(part.hi, (j + 0.5) * width);
    if (hi > lo) visit(j, lo, hi);
  }
}

void require_pole_free(Interval q, const CountOptions& options) {
  if (q.lo < options.pole_zone || q.hi > constants::two_pi - options.pole_zone) {
    throw std::domain_error("fast_slow: query must avoid the pole zone (eps, 2pi - eps)");
  }
}

void fast_slow_into(const DiffPoly& f, Interval q, bool include_pi,
                    const CountOptions& options, Tally& tally) {
  const FastSlow solver(f, options);
  const Plan plan = plan_segments(f, q, include_pi, tally);
  for (const auto& part : plan.parts) {
    Sample left = solver.at(part.lo);
    for_each_branch(solver.T(), part, [&](long, double lo, double hi) {
      const Sample right = solver.at(hi);
      const Sample mid = solver.at(0.5 * (lo + hi));
      solver.resolve(left, mid, right, 0, tally);
      left = right;
    });
  }
}

// ---------------------------------------------------------------------------
// Grid counter.

template <class Eval>
double bisect(const Eval& eval, double lo, double hi, int slo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sign_of(eval(mid)) == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for the minimum of sigma * f on [lo, hi]. Returns the
// abscissa of the smallest value seen, stopping early if it turns negative.
template <class Eval>
std::pair<double, double> dip(const Eval& eval, int sigma, double lo, double hi) {
  constexpr double kInv = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - kInv * (b - a);
  double x2 = a + kInv * (b - a);
  double v1 = sigma * eval(x1);
  double v2 = sigma * eval(x2);
  for (int it = 0; it < 80 && v1 >= 0.0 && v2 >= 0.0; ++it) {
    if (v1 < v2) {
      b = x2;
      x2 = x1;
      v2 = v1;
      x1 = b - kInv * (b - a);
      v1 = sigma * eval(x1);
    } else {
      a = x1;
      x1 = x2;
      v1 = v2;
      x2 = a + kInv * (b - a);
      v2 = sigma * eval(x2);
    }
    if (b - a < 1e-15) break;
  }
  return v1 < v2 ? std::pair{x1, v1} : std::pair{x2, v2};
}

template <class Eval>
void grid_into(const DiffPoly& f, Interval q, double step, double root_tol, bool include_pi,
               const CountOptions& options, const Eval& eval, Tally& tally) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  const double tangency = options.tangency_tol * (f.n() + 1);
  const Plan plan = plan_segments(f, q, include_pi, tally);
  for (const auto& part : plan.parts) {
    const auto intervals =
        static_cast<long>(std::ceil(part.length() / step - 1e-12));
    const long count = std::max(1L, intervals) + 1;
    const double h = part.length() / static_cast<double>(count - 1);
    std::vector<double> xs(static_cast<std::size_t>(count));
    std::vector<double> vs(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      xs[i] = (i == count - 1) ? part.hi : part.lo + static_cast<double>(i) * h;
      vs[i] = eval(xs[i]);
    }
    for (long i = 1; i < count; ++i) {
      const int s0 = sign_of(vs[i - 1]);
      if (s0 != sign_of(vs[i])) {
        tally.root(tally.want_roots ? bisect(eval, xs[i - 1], xs[i], s0, root_tol)
                                    : 0.5 * (xs[i - 1] + xs[i]));
        continue;
      }
      // Sign-preserving local minimum of |f| at sample i - 1: two close zeros
      // or a tangency may hide between the neighbouring samples.
      const long k = i - 1;
      if (k < 1 || sign_of(vs[k - 1]) != s0) continue;
      const double y0 = s0 * vs[k - 1];
      const double y1 = s0 * vs[k];
      const double y2 = s0 * vs[k + 1];
      if (!(y1 < y0 && y1 <= y2)) continue;
      const double curvature = y0 - 2.0 * y1 + y2;
      const double vertex = curvature > 0.0 ? y1 - (y2 - y0) * (y2 - y0) / (8.0 * curvature) : y1;
      if (vertex > 0.5 * y1 && y1 > tangency) continue;
      const auto [xm, vm] = dip(eval, s0, xs[k - 1], xs[k + 1]);
      if (vm < -tangency) {
        if (tally.want_roots) {
          tally.root(bisect(eval, xs[k - 1], xm, s0, root_tol));
          tally.root(bisect(eval, xm, xs[k + 1], -s0, root_tol));
        } else {
          tally.root(xm);
          tally.root(xm);
        }
      } else if (vm < tangency) {
        tally.candidate();
      }
    }
  }
}

ZeroReport finish(Tally& tally, Interval q, Method method) {
  ZeroReport report;
  report.certified = tally.certified;
  report.uncertified = tally.uncertified;
  report.interval = q;
  report.method = method;
  if (tally.want_roots) {
    std::sort(tally.roots.begin(), tally.roots.end());
    report.roots = std::move(tally.roots);
  }
  return report;
}

double oracle_step(const DiffPoly& f) {
  return constants::pi / (constants::samples_per_branch * f.T());
}

void require_oracle_size(const DiffPoly& f) {
  if (f.n() > constants::oracle_max_n) {
    throw std::length_error("oracle_count supports n <= " +
                            std::to_string(constants::oracle_max_n));
  }
}

void count_into(const DiffPoly& f, Interval q, Method method, bool include_pi,
                const CountOptions& options, Tally& tally) {
  const auto fast_eval = [&f](double x) { return poly::eval_f(f, x); };
  const double grid_tol = constants::root_tol * std::max(1.0, 1.0 / f.T());
  switch (method) {
    case Method::oracle: {
      require_oracle_size(f);
      const auto direct = [&f](double x) { return poly::eval_f_direct(f, x); };
      grid_into(f, q, oracle_step(f), constants::oracle_root_tol, include_pi, options, direct,
                tally);
      return;
    }
    case Method::grid:
      grid_into(f, q, oracle_step(f), grid_tol, include_pi, options, fast_eval, tally);
      return;
    case Method::fast_slow: {
      const double eps = options.pole_zone;
      const double lo_cut = std::min(q.hi, eps);
      const double hi_cut = std::max(q.lo, constants::two_pi - eps);
      if (q.lo < lo_cut) {
        grid_into(f, {q.lo, lo_cut}, oracle_step(f), grid_tol, include_pi, options, fast_eval,
                  tally);
      }
      const Interval middle{std::max(q.lo, eps), std::min(q.hi, constants::two_pi - eps)};
      if (middle.hi > middle.lo) fast_slow_into(f, middle, include_pi, options, tally);
      if (hi_cut < q.hi) {
        grid_into(f, {hi_cut, q.hi}, oracle_step(f), grid_tol, include_pi, options, fast_eval,
                  tally);
      }
      return;
    }
  }
}

}  // namespace

ZeroReport count_fast_slow(const DiffPoly& f, Interval query, const CountOptions& options) {
  require_query(f, query);
  require_pole_free(query, options);
  Tally tally;
  tally.want_roots = options.want_roots;
  fast_slow_into(f, query, true, options, tally);
  return finish(tally, query, Method::fast_slow);
}

std::vector<BranchClassification> classify_branches(const DiffPoly& f, Interval query) {
  require_query(f, query);
  const CountOptions options;
  require_pole_free(query, options);
  const FastSlow solver(f, options);
  std::vector<BranchClassification> out;
  Sample left = solver.at(query.lo);
  for_each_branch(solver.T(), query, [&](long j, double lo, double hi) {
    const Sample right = solver.at(hi);
    const Sample mid = solver.at(0.5 * (lo + hi));
    BranchStatus status = BranchStatus::unresolved;
    switch (solver.test(left, mid, right)) {
      case Verdict::none: status = BranchStatus::no_root; break;
      case Verdict::one: status = BranchStatus::one_root; break;
      case Verdict::split: break;
    }
    out.push_back({j, {lo, hi}, status});
    left = right;
  });
  return out;
}

ZeroReport count_grid(const DiffPoly& f, Interval query, double step,
                      const CountOptions& options) {
  require_query(f, query);
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (step > query.length() && query.length() > 0.0) {
    throw std::invalid_argument("grid step must not exceed the query length");
  }
  Tally tally;
  tally.want_roots = options.want_roots;
  const auto eval = [&f](double x) { return poly::eval_f(f, x); };
  grid_into(f, query, step, constants::root_tol * std::max(1.0, 1.0 / f.T()), true, options,
            eval, tally);
  return finish(tally, query, Method::grid);
}

ZeroReport oracle_count(const DiffPoly& f, Interval query, const CountOptions& options) {
  require_query(f, query);
  require_oracle_size(f);
  Tally tally;
  tally.want_roots = options.want_roots;
  count_into(f, query, Method::oracle, true, options, tally);
  return finish(tally, query, Method::oracle);
}

ZeroReport count_on(const DiffPoly& f, Interval query, Method method,
                    const CountOptions& options) {
  require_query(f, query);
  Tally tally;
  tally.want_roots = options.want_roots;
  count_into(f, query, method, true, options, tally);
  return finish(tally, query, method);
}

ZeroReport count_total(const DiffPoly& f, Method method, const CountOptions& options) {
  if (f.degenerate()) throw std::domain_error("f vanishes identically");
  Tally half;
  half.want_roots = options.want_roots;
  count_into(f, {0.0, constants::pi}, method, false, options, half);

  ZeroReport report;
  report.interval = {0.0, constants::two_pi};
  report.method = method;
  report.certified = 2 * half.certified;
  report.uncertified = 2 * half.uncertified + (poly::value_at_pi(f) == 0 ? 1 : 0);
  if (options.want_roots) {
    std::vector<double> roots = half.roots;
    roots.reserve(2 * half.roots.size());
    for (double r : half.roots) roots.push_back(constants::two_pi - r);
    std::sort(roots.begin(), roots.end());
    report.roots = std::move(roots);
  }
  return report;
}

}  // namespace cosz
