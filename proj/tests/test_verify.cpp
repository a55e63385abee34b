#include <cmath>

#include "cosz/constants.hpp"
#include "cosz/ensemble.hpp"
#include "cosz/kernel.hpp"
#include "cosz/verify.hpp"
#include "cosz/zeros.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cosz;
using testing::kPi;

namespace {

const verify::CheckOutcome& find(const std::vector<verify::CheckOutcome>& all,
                                 const std::string& name) {
  for (const auto& o : all) {
    if (o.name == name) return o;
  }
  throw std::runtime_error("missing outcome " + name);
}

}  // namespace

TEST_CASE("product-rule derivatives agree with direct summation") {
  testing::Gen gen(601);
  for (int i = 0; i < 200; ++i) {
    const int n = gen.integer(1, 300);
    const int r = gen.integer(0, 8);
    const double x = gen.real(0.05, kPi);
    const double direct = kernel::dirichlet_deriv(n, r, x);
    const double product = verify::dirichlet_deriv_product(n, r, x);
    const double scale = std::pow(n + 0.5, r) / x;
    CHECK(std::abs(direct - product) <= 1e-9 * scale);
  }
}

TEST_CASE("kernel bounds") {
  const auto all = verify::check_kernel_bounds(1 << 20, 8, 100000);
  CHECK(!verify::any_hard_failure(all));
  const auto& upper = find(all, "kernel_upper_r1");
  CHECK(upper.passed);
  CHECK(upper.ratio < 1.0);
  CHECK(!upper.domain_empty);
  for (int r = 1; r <= 8; ++r) {
    CHECK(find(all, "kernel_lower_r" + std::to_string(r)).passed);
  }
  const auto& fact = find(all, "b_factorial_bound");
  CHECK(fact.ratio == doctest::Approx(kPi / 8).epsilon(1e-9));
  CHECK(fact.witness.lo == doctest::Approx(kPi));
  const auto& sine = find(all, "large_sine");
  CHECK(sine.passed);
  CHECK(sine.witness.values.at("n") == 64.0);

  // Only r = 1 fits into (0, pi] at n = 20000.
  const auto mid = verify::check_kernel_bounds(20000, 3, 1000);
  CHECK(!find(mid, "kernel_upper_r1").domain_empty);
  CHECK(find(mid, "kernel_upper_r2").domain_empty);
  CHECK(find(mid, "kernel_upper_r2").passed);

  CHECK_THROWS_AS(verify::check_kernel_bounds(1000, 1, 100), std::domain_error);
  CHECK_THROWS_AS(verify::check_kernel_bounds(1 << 20, 9, 100), std::invalid_argument);
}

TEST_CASE("mean value inequality") {
  const DiffPoly cosine(1, CoeffMask::from_string("1"));
  const Interval I{kPi / 2 - 0.1, kPi / 2 + 0.1};
  const auto one = verify::check_mean_value(cosine, I, 1);
  CHECK(one.passed);
  CHECK(one.witness.values.at("sup_f") == doctest::Approx(std::sin(0.1)).epsilon(1e-9));
  CHECK(one.witness.values.at("sup_derivative") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(one.ratio == doctest::Approx(std::sin(0.1) / (0.2 * constants::sup_slack)).epsilon(1e-6));

  const auto zero = verify::check_mean_value(cosine, I, 0);
  CHECK(zero.passed);
  CHECK(zero.ratio == doctest::Approx(1.0 / constants::sup_slack));

  CHECK_THROWS_AS(verify::check_mean_value(cosine, {0.1, 0.2}, 1), std::invalid_argument);

  // Random instances with two zeros in a width-0.01 window.
  int found = 0;
  for (int trial = 0; trial < 400 && found < 5; ++trial) {
    const DiffPoly f(400, ensemble::sample_mask(8, 602, trial));
    if (f.degenerate()) continue;
    CountOptions opts;
    opts.want_roots = true;
    const auto roots = *count_on(f, {0.05, kPi}, Method::fast_slow, opts).roots;
    for (std::size_t i = 1; i < roots.size(); ++i) {
      if (roots[i] - roots[i - 1] < 0.008) {
        const double mid = 0.5 * (roots[i] + roots[i - 1]);
        const auto o = verify::check_mean_value(f, {mid - 0.005, mid + 0.005}, 2);
        CHECK(o.passed);
        ++found;
        break;
      }
    }
  }
  CHECK(found == 5);
}

TEST_CASE("short interval bounds") {
  const DiffPoly f(2048, ensemble::sample_mask(4, 1));
  const auto all = verify::check_short_interval_bounds(f, 0.5, constants::delta_short);
  CHECK(!verify::any_hard_failure(all));
  const auto& literal = find(all, "short_window_roots");
  CHECK(literal.domain_empty);
  const auto& extended = find(all, "short_window_roots_extended");
  CHECK(extended.passed);
  CHECK(extended.witness.values.at("roots") <= 4);
  CHECK(extended.witness.values.at("bound") == 4.0);
  CHECK(find(all, "short_interval_constant").passed);

  CHECK(verify::short_interval_bound(1024, std::pow(1024.0, -0.1)) ==
        doctest::Approx(std::log(3072.0) / (0.1 * std::log(1024.0)) + 1));

  const int n = 1024;
  const DiffPoly big(n, ensemble::sample_nondegenerate(n, 900, 1, 0));
  const auto large = verify::check_short_interval_bounds(big, 0.5, std::pow(n, -0.1));
  CHECK(find(large, "short_window_roots").domain_empty);
  const auto& windows = find(large, "derivative_window_roots_extended");
  CHECK(windows.passed);
  CHECK(windows.witness.values.at("bound") == doctest::Approx(12.58).epsilon(1e-3));

  // Low-degree g with a tiny delta.
  const DiffPoly sparse(64, CoeffMask::from_string("11111"));
  for (const auto& o : verify::check_short_interval_bounds(sparse, 0.5, 1.0 / 16384)) {
    CHECK(o.passed);
  }

  CHECK_THROWS_AS(verify::check_short_interval_bounds(f, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(verify::check_short_interval_bounds(f, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("sandwich lower bound") {
  const auto dirichlet = verify::check_sandwich(DiffPoly(512, CoeffMask{}), 0.5);
  CHECK(dirichlet.passed);
  CHECK(dirichlet.witness.values.at("Z") == 1024.0);
  CHECK(dirichlet.witness.values.at("lower") == doctest::Approx(256.0));

  const auto seeded = verify::check_sandwich(DiffPoly(256, ensemble::sample_mask(4, 9)), 0.5);
  CHECK(seeded.passed);
  CHECK(seeded.hard);

  const auto constant = verify::check_sandwich(DiffPoly(300, CoeffMask::from_string("1")), 0.5);
  CHECK(constant.passed);
  CHECK(constant.witness.values.at("lower") ==
        doctest::Approx(300 * constant.witness.values.at("measure") / (2 * kPi)));
  CHECK(std::isfinite(constant.witness.values.at("upper_constant")));

  CHECK_THROWS_AS(verify::check_sandwich(DiffPoly(64, ensemble::sample_mask(40, 1)), 0.5),
                  std::invalid_argument);
}

TEST_CASE("envelope statements on random instances") {
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 64 + 24 * trial;
    const int m = 2 + trial % 20;
    const DiffPoly f(n, ensemble::sample_nondegenerate(n, m, 603, trial));
    CHECK(verify::check_interval_count(f.mask()).passed);
    CHECK(verify::check_danger(f).passed);
    CHECK(verify::check_root_floor(f).passed);
    const auto t = verify::check_transfer(f.mask(), n, 1.0 / 128, 100, trial);
    CHECK(t.hard);
    CHECK(t.passed);
  }
  CHECK(!verify::check_transfer(CoeffMask::from_string("1"), 64, 0.5, 10, 1).hard);
  CHECK(verify::check_interval_count(CoeffMask{}).witness.values.at("bound") == 4.0);
}

TEST_CASE("measure of the derivative and plus envelopes") {
  const int n = 1000;
  CHECK(verify::eprime_plus_measure(CoeffMask{}, n) ==
        doctest::Approx(kPi - std::pow(n, -0.1)).epsilon(1e-12));
  const auto o = verify::check_measure_Eprime_plus(256, 256, 20, 1, 200.0);
  CHECK(o.witness.values.at("mean") <= kPi);
  CHECK(o.witness.values.at("product") ==
        doctest::Approx(o.witness.values.at("mean") * 256 * 256 / std::pow(256, 1.1)));
  CHECK_THROWS_AS(verify::check_measure_Eprime_plus(1024, 512, 10, 1, 1.0), std::domain_error);

  CHECK(verify::check_stability("s", {1.0, 3.9}, 4.0).passed);
  CHECK(!verify::check_stability("s", {1.0, 4.1}, 4.0).passed);
}

TEST_CASE("erdos-turan constant") {
  const auto small = verify::check_et(DiffPoly(2, CoeffMask::from_string("1")), {{0.0, 2 * kPi}});
  CHECK(std::isfinite(small.ratio));
  CHECK(small.passed);
  CHECK_THROWS_AS(verify::check_et(DiffPoly(1, CoeffMask::from_string("1")), {{0.0, 1.0}}),
                  std::domain_error);

  testing::Gen gen(604);
  std::vector<Interval> intervals;
  for (int k = 0; k < 50; ++k) {
    const double a = gen.real(0.0, 2 * kPi);
    const double b = gen.real(0.0, 2 * kPi);
    intervals.push_back({std::min(a, b), std::max(a, b)});
  }
  const auto plain = verify::check_et(DiffPoly(1024, CoeffMask{}), intervals);
  CHECK(plain.witness.values.at("K_full") <= 2.0);
  MESSAGE("K with n|I|/(2 pi): " << plain.ratio << ", with n|I|/pi: "
                                 << plain.witness.values.at("K_full"));
}

TEST_CASE("identity suite") {
  verify::IdentityOptions opts;
  opts.points = 2000;
  opts.variance_samples = 20000;
  opts.variance_points = 5;
  opts.threads = 4;
  const auto all = verify::identity_suite(opts);
  CHECK(all.size() == 7);
  for (const auto& o : all) {
    CHECK(o.hard);
    CHECK_MESSAGE(o.passed, o.name);
  }
}

TEST_CASE("suites") {
  CHECK_THROWS_AS(verify::run_suite("nope"), std::invalid_argument);
  for (auto name : {"short", "et"}) {
    const auto all = verify::run_suite(name, {.seed = 3, .threads = 2});
    CHECK(!all.empty());
    CHECK(!verify::any_hard_failure(all));
  }
  verify::CheckOutcome bad;
  bad.hard = true;
  bad.passed = false;
  CHECK(verify::any_hard_failure({bad}));
  bad.hard = false;
  CHECK(!verify::any_hard_failure({bad}));
}
