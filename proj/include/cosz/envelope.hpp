#pragma once

// Envelope sets on (0, pi] as unions of intervals:
//
//   E(g)    = { x : |g(x) - 1/2| <  s(x) }      (only place f = D_n - g can vanish)
//   E+(g)   = { x : |g(x) - 1/2| <= 4 s(x) }
//   E'_n(g) = { x : |g'(x)|      <= 2^7 n s(x) }
//
// Multiplying through by 2 sin(x/2) turns each into a sublevel set of a
// trigonometric polynomial: |phi| < 1, |phi| <= 4 and |2 sin(x/2) g'| <= 2^7 n.
// Members are returned as closed intervals; the strict/non-strict distinction
// only affects isolated endpoints and is honoured by the `in_*` predicates.

#include "cosz/interval.hpp"
#include "cosz/mask.hpp"

namespace cosz::envelope {

struct ScanOptions {
  /// Refine every crossing to ~1e-12 with exact evaluations. Without it,
  /// crossings come from cubic Hermite interpolation of the sampled grid,
  /// which is accurate to roughly 1e-9 / m and adequate for measures.
  bool polish = true;
};

/// E(g). Asserts the structural bound of at most 8m + 4 intervals and throws
/// std::logic_error if the computed set violates it.
IntervalSet envelope_set(const CoeffMask& mask, const ScanOptions& options = {});

/// E'_n(g).
IntervalSet envelope_prime_set(const CoeffMask& mask, int n, const ScanOptions& options = {});

/// E+(g).
IntervalSet envelope_plus_set(const CoeffMask& mask, const ScanOptions& options = {});

/// Intersection with a window inside (0, pi].
IntervalSet restrict(const IntervalSet& set, Interval window);

/// Pointwise membership by direct evaluation of the defining inequality.
bool in_envelope(const CoeffMask& mask, double x);
bool in_envelope_plus(const CoeffMask& mask, double x);
bool in_envelope_prime(const CoeffMask& mask, int n, double x);

/// Grid size used by the scans for a mask of degree m: the smallest power of
/// two N >= 128 (m + 2), giving sample spacing 2 pi / N <= pi / (64 (m + 2)).
int scan_size(int m);

}  // namespace cosz::envelope
