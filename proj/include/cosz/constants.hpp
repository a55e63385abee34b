#pragma once

// Numerical constants used across the library. The first block holds the
// fixed numbers appearing in the inequalities that the verify module checks;
// the second block holds tuning knobs of the numerical machinery.

#include <numbers>

namespace cosz::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ---- inequality constants -------------------------------------------------

/// Window length factor for the short-interval root bound: windows have
/// length delta_short / n.
inline constexpr double delta_short = 1.0 / 16384.0;  // 2^-14

/// Lower cut of the short-interval root bound is 2^31 / (alpha n).
inline constexpr double short_window_cut = 2147483648.0;  // 2^31

/// Domain constant of the kernel derivative bounds: x >= 2^15 r / n.
inline constexpr double kernel_domain = 32768.0;  // 2^15

/// |D^(r)(x)| <= 2^6 T^r / x.
inline constexpr double kernel_upper = 64.0;  // 2^6

/// |D^(r)(x0)| >= 2^-5 delta T^r / x0.
inline constexpr double kernel_lower = 1.0 / 32.0;  // 2^-5

/// High-derivative lemma: M_t + (delta/n)^2 M_{t+2} >= 2^-6 delta n^t / x0.
inline constexpr double high_derivative = 1.0 / 64.0;  // 2^-6
inline constexpr double high_derivative_cut = 1073741824.0;  // 2^30

/// Derivative envelope: |g'(x)| <= 2^7 n s(x).
inline constexpr double derivative_envelope = 128.0;  // 2^7

/// Enlarged envelope: |g(x) - 1/2| <= 4 s(x).
inline constexpr double plus_envelope = 4.0;

/// Explicit lower constant in the zeros/measure sandwich.
inline constexpr double sandwich_lower = 9.0;

/// Interval count bound of the envelope set: 8m + 4.
inline constexpr int envelope_count_slope = 8;
inline constexpr int envelope_count_offset = 4;

/// Existence bound for |C_r(T x0)| >= delta / 4.
inline constexpr double large_sin = 0.25;

/// Small-ball diameter 2^-5 and its distance-from-pi*Z requirement 2^8 / m.
inline constexpr double small_ball_diameter = 1.0 / 32.0;
inline constexpr double small_ball_margin = 256.0;

/// Relaxed finite-m level for the sign-change probability (limit is 1/4).
inline constexpr double sign_change_floor = 0.20;

// ---- numerical machinery --------------------------------------------------

/// Closed-form / direct-sum switchover on |sin(x/2)|.
inline constexpr double theta0 = 1e-6;

/// Width of the pole zone (0, pole_zone] handled by direct-sum grid counting.
inline constexpr double pole_zone = 1e-3;

/// Samples per half-branch pi/T for grid and oracle counting.
inline constexpr int samples_per_branch = 64;

/// Maximum bisection depth inside a half-branch.
inline constexpr int max_branch_depth = 40;

/// Root bracketing width is root_tol * max(1, 1/T); the oracle uses 1e-13.
inline constexpr double root_tol = 1e-12;
inline constexpr double oracle_root_tol = 1e-13;

/// Largest n accepted by the brute-force oracle.
inline constexpr int oracle_max_n = 512;

/// |f| threshold (times n+1) below which a sign-preserving local minimum
/// is reported as a tangency candidate.
inline constexpr double tangency_tol = 1e-9;

/// Slack factor applied to grid-estimated suprema in upper-bound checks.
inline constexpr double sup_slack = 1.001;

/// Per-trial raw values are retained only up to this many trials.
inline constexpr long long per_trial_limit = 10000;

}  // namespace cosz::constants
