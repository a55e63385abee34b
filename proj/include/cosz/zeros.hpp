#pragma once

// Certified counting of the real zeros of f = D_n - g.
//
// Conventions shared by every counter:
//  * zeros are distinct points, not counted with multiplicity;
//  * a query [lo, hi] counts zeros in the half-open (lo, hi], so a zero on a
//    shared endpoint of adjacent queries belongs to the left one;
//  * "certified" zeros are established by a sign change or, at the points
//    pi p/q with q <= 6, by exact evaluation; sign-preserving near-zeros are
//    reported as "uncertified" tangency candidates and never counted as
//    certified.

#include <optional>
#include <string_view>
#include <vector>

#include "cosz/constants.hpp"
#include "cosz/interval.hpp"
#include "cosz/poly.hpp"

namespace cosz {

enum class Method { fast_slow, grid, oracle };

std::string_view to_string(Method method);
/// Throws std::invalid_argument on unknown names.
Method parse_method(std::string_view name);

struct ZeroReport {
  int certified = 0;
  int uncertified = 0;
  /// Sorted abscissae of the certified zeros, when requested.
  std::optional<std::vector<double>> roots;
  Interval interval;
  Method method = Method::fast_slow;

  int total() const { return certified + uncertified; }
};

enum class BranchStatus { one_root, no_root, unresolved };

std::string_view to_string(BranchStatus status);

/// A monotone half-branch [(j - 1/2) pi/T, (j + 1/2) pi/T] of sin(Tx),
/// clipped to the query.
struct BranchClassification {
  long j = 0;
  Interval span;
  BranchStatus status = BranchStatus::unresolved;
};

/// A zero of f at a point x = pi p/q with q <= 6, 0 < p/q < 2. At these
/// points cos(x) lies in Q(sqrt D), D in {1, 2, 3, 5}, so f(x), f'(x) and
/// f''(x) are decided exactly in integer arithmetic.
struct ExactZero {
  int p = 0;
  int q = 1;
  double x = 0.0;
  /// 1 for a simple zero, 2 for a double zero, 0 when f'' also vanishes.
  int order = 0;
  /// No other zero of f lies within `guard` of x.
  double guard = 0.0;
};

/// All exact zeros in (0, 2 pi), ordered by x.
std::vector<ExactZero> exact_zeros(const DiffPoly& f);

struct CountOptions {
  bool want_roots = false;
  int max_depth = constants::max_branch_depth;
  /// Multiplied by (n + 1).
  double tangency_tol = constants::tangency_tol;
  double pole_zone = constants::pole_zone;
};

/// Counts solutions of sin(Tx) = phi(x) on the query by classifying each
/// monotone half-branch of sin(Tx) against certified range bounds on phi and
/// bisecting unresolved branches. The query must avoid the pole zone.
ZeroReport count_fast_slow(const DiffPoly& f, Interval query,
                           const CountOptions& options = {});

/// Branch-level classification without subdivision.
std::vector<BranchClassification> classify_branches(const DiffPoly& f, Interval query);

/// Sign sampling at spacing <= step, bisection of every sign change and
/// refinement of sign-preserving local minima of |f|.
ZeroReport count_grid(const DiffPoly& f, Interval query, double step,
                      const CountOptions& options = {});

/// Brute-force reference: direct summation over the exponent set, grid step
/// pi / (64 T), bisection to 1e-13. Requires n <= 512.
ZeroReport oracle_count(const DiffPoly& f, Interval query, const CountOptions& options = {});

/// Counts on any query inside [0, 2 pi] with the given method; for
/// fast_slow the pole zones near 0 and 2 pi are delegated to count_grid.
ZeroReport count_on(const DiffPoly& f, Interval query, Method method = Method::fast_slow,
                    const CountOptions& options = {});

/// Z(f) on [0, 2 pi], with x = 0 and x = 2 pi identified. Uses evenness:
/// 2 x (zeros in (0, pi)) plus the point pi, which is always a zero of even
/// order when f(pi) = 0 and is then reported as uncertified.
/// Throws std::domain_error when f vanishes identically.
ZeroReport count_total(const DiffPoly& f, Method method = Method::fast_slow,
                       const CountOptions& options = {});

}  // namespace cosz
