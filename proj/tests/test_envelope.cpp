#include <cmath>

#include "cosz/envelope.hpp"
#include "cosz/ensemble.hpp"
#include "cosz/interval.hpp"
#include "cosz/kernel.hpp"
#include "cosz/poly.hpp"
#include "cosz/zeros.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cosz;
using testing::kPi;

namespace {

enum class Which { plain, plus, prime };

// Midpoint-rule measure of the indicator on a uniform grid of step pi / cells.
double grid_measure(const CoeffMask& mask, Which which, int n, Interval window = {0.0, kPi},
                    int cells = 1000000) {
  const double h = kPi / cells;
  double total = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double x = (i + 0.5) * h;
    if (x < window.lo || x > window.hi) continue;
    bool in = false;
    switch (which) {
      case Which::plain: in = envelope::in_envelope(mask, x); break;
      case Which::plus: in = envelope::in_envelope_plus(mask, x); break;
      case Which::prime: in = envelope::in_envelope_prime(mask, n, x); break;
    }
    if (in) total += h;
  }
  return total;
}

bool near_endpoint(const IntervalSet& set, double x, double tol) {
  for (const auto& iv : set.intervals()) {
    if (std::abs(x - iv.lo) < tol || std::abs(x - iv.hi) < tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("interval set algebra") {
  const auto a = IntervalSet::from_intervals({{3, 4}, {0, 1}, {0.5, 2}, {5, 5}, {4, 4.5}});
  REQUIRE(a.count() == 2);
  CHECK(a.intervals()[0] == Interval{0, 2});
  CHECK(a.intervals()[1] == Interval{3, 4.5});
  CHECK(a.measure() == doctest::Approx(3.5));
  CHECK(a.contains(1.5));
  CHECK(!a.contains(2.5));
  CHECK(a.covers({3.2, 4.4}));
  CHECK(!a.covers({1.5, 3.5}));
  CHECK(a.meets({1.9, 2.9}));
  CHECK(!a.meets({2.1, 2.9}));
  const auto b = IntervalSet::from_intervals({{1, 3.5}});
  const auto c = a.intersect(b);
  REQUIRE(c.count() == 2);
  CHECK(c.intervals()[0] == Interval{1, 2});
  CHECK(c.intervals()[1] == Interval{3, 3.5});
  CHECK(IntervalSet{}.intersect(b).empty());
}

TEST_CASE("envelope of constant masks") {
  for (const auto& mask : {CoeffMask{}, CoeffMask::from_string("1")}) {
    const auto e = envelope::envelope_set(mask);
    REQUIRE(e.count() == 1);
    CHECK(e.intervals()[0].lo == 0.0);
    CHECK(e.measure() == kPi);
    CHECK(!envelope::in_envelope(mask, kPi));
    CHECK(envelope::in_envelope(mask, kPi - 0.01));
  }
  CHECK(envelope::envelope_plus_set(CoeffMask{}).measure() == doctest::Approx(kPi));
  CHECK(envelope::envelope_prime_set(CoeffMask{}, 7).measure() == doctest::Approx(kPi));
  CHECK(envelope::envelope_prime_set(CoeffMask::from_string("01"), 1).measure() ==
        doctest::Approx(kPi));
}

TEST_CASE("envelope sets against the fine-grid measure") {
  const auto m11 = ensemble::sample_mask(16, 11);
  const auto e = envelope::envelope_set(m11);
  CHECK(e.count() <= 8 * 16 + 4);
  CHECK(std::abs(e.measure() - grid_measure(m11, Which::plain, 0)) < 1e-4);

  const auto plus = envelope::envelope_plus_set(m11);
  for (const auto& iv : e.intervals()) CHECK(plus.covers(iv));

  const auto m2 = ensemble::sample_mask(32, 2);
  const auto e2 = envelope::envelope_set(m2);
  const auto p2 = envelope::envelope_plus_set(m2);
  CHECK(p2.measure() >= e2.measure());
  CHECK(std::abs(e2.measure() - grid_measure(m2, Which::plain, 0)) < 1e-4);
  CHECK(std::abs(p2.measure() - grid_measure(m2, Which::plus, 0)) < 1e-4);

  const auto m5 = ensemble::sample_mask(64, 5);
  const auto q = envelope::envelope_prime_set(m5, 256);
  CHECK(std::abs(q.measure() - grid_measure(m5, Which::prime, 256)) < 1e-4);

  // A mask whose derivative envelope is a proper subset.
  const auto dense = ensemble::sample_mask(400, 6);
  const auto qd = envelope::envelope_prime_set(dense, 20);
  CHECK(qd.measure() < kPi);
  CHECK(std::abs(qd.measure() - grid_measure(dense, Which::prime, 20)) < 1e-4);
}

TEST_CASE("restriction") {
  const auto full = IntervalSet::from_intervals({{0.0, kPi}});
  const auto r = envelope::restrict(full, {1.0, 2.0});
  REQUIRE(r.count() == 1);
  CHECK(r.intervals()[0] == Interval{1.0, 2.0});
  CHECK(envelope::restrict(IntervalSet{}, {1.0, 2.0}).empty());

  const auto m11 = ensemble::sample_mask(16, 11);
  const Interval window{std::pow(1000.0, -0.9), kPi};
  const auto cut = envelope::restrict(envelope::envelope_set(m11), window);
  CHECK(std::abs(cut.measure() - grid_measure(m11, Which::plain, 0, window)) < 1e-4);
}

TEST_CASE("interval count bound over random masks") {
  int worst_slack = 1 << 30;
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 1 + trial % 256;
    const auto e = envelope::envelope_set(ensemble::sample_mask(m, 71, trial),
                                          envelope::ScanOptions{.polish = false});
    CHECK(e.count() <= 8 * m + 4);
    worst_slack = std::min(worst_slack, 8 * m + 4 - e.count());
  }
  MESSAGE("smallest slack in 8m+4: " << worst_slack);
}

TEST_CASE("membership agrees with pointwise evaluation") {
  testing::Gen gen(401);
  for (int i = 0; i < 20; ++i) {
    const auto mask = ensemble::sample_mask(gen.integer(1, 200), 402, i);
    const int n = gen.integer(mask.degree(), 4 * mask.degree() + 4);
    const auto e = envelope::envelope_set(mask);
    const auto p = envelope::envelope_plus_set(mask);
    const auto q = envelope::envelope_prime_set(mask, n);
    for (int j = 0; j < 50; ++j) {
      const double x = gen.real(1e-6, kPi);
      if (!near_endpoint(e, x, 1e-9)) CHECK(e.contains(x) == envelope::in_envelope(mask, x));
      if (!near_endpoint(p, x, 1e-9)) CHECK(p.contains(x) == envelope::in_envelope_plus(mask, x));
      if (!near_endpoint(q, x, 1e-9)) {
        CHECK(q.contains(x) == envelope::in_envelope_prime(mask, n, x));
      }
    }
  }
}

TEST_CASE("unpolished scans agree with polished ones") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto mask = ensemble::sample_mask(300, 403, trial);
    const auto a = envelope::envelope_set(mask);
    const auto b = envelope::envelope_set(mask, envelope::ScanOptions{.polish = false});
    REQUIRE(a.count() == b.count());
    CHECK(std::abs(a.measure() - b.measure()) < 1e-8);
  }
}

TEST_CASE("zeros live in the envelope and fill it") {
  CountOptions opts;
  opts.want_roots = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 64 + 4 * trial;
    const int m = 2 + trial % 16;
    const DiffPoly f(n, ensemble::sample_mask(m, 404, trial));
    if (f.degenerate()) continue;
    const auto e = envelope::envelope_set(f.mask());
    const auto r = count_on(f, {1e-3, kPi}, Method::fast_slow, opts);
    for (double x : *r.roots) {
      // Exact zeros where |phi| = 1 (e.g. at pi/3) sit on the boundary of the
      // strict set and belong to its closure.
      const bool boundary = near_endpoint(e, x, 1e-12) || x == kPi;
      CHECK((e.contains(x) || (boundary && std::abs(kernel::slow_curve_phi(f.mask(), x)) <=
                                               1 + 1e-12)));
    }
    for (const auto& J : e.intervals()) {
      const Interval inner{std::max(J.lo, 1e-3), J.hi};
      if (inner.hi <= inner.lo) continue;
      const int floor_count = static_cast<int>(std::floor(f.T() * inner.length() / (2 * kPi)));
      CHECK(count_on(f, inner).total() >= floor_count);
    }
  }
}

TEST_CASE("short windows in the derivative envelope that meet the envelope lie in the plus set") {
  // delta = 2^-7: the sup of |g'| over the window is then at most s(x) on top
  // of |g'| at its centre, which keeps the window inside E+.
  testing::Gen gen(405);
  const double delta = 1.0 / 128;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = gen.integer(2, 128);
    const int n = gen.integer(m, 8 * m);
    const auto mask = ensemble::sample_mask(m, 406, trial);
    const auto e = envelope::envelope_set(mask);
    const auto p = envelope::envelope_plus_set(mask);
    const auto q = envelope::envelope_prime_set(mask, n);
    const double len = delta / n;
    for (const auto& J : e.intervals()) {
      for (int k = 0; k < 5; ++k) {
        const double x = gen.real(J.lo, J.hi);
        const double lo = std::max(1e-9, x - gen.real(0.0, len));
        const Interval I{lo, std::min(kPi, lo + len)};
        if (!q.covers(I)) continue;
        ++checked;
        CHECK(p.covers(I));
      }
    }
  }
  CHECK(checked > 1000);
}
