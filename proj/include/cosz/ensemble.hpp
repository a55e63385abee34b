#pragma once

// Random {0,1}-cosine polynomials with fair independent coefficients, Monte
// Carlo estimators over them, scaling fits and the explicit few-zero
// construction.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cosz/mask.hpp"
#include "cosz/poly.hpp"

namespace cosz::ensemble {

/// Packed fair bits eps_0..eps_m for trial `trial` of stream `seed`; redraw
/// `draw` selects an independent replacement for the same trial.
std::vector<std::uint64_t> sample_words(int m, std::uint64_t seed, std::uint64_t trial = 0,
                                        std::uint32_t draw = 0);

/// Fair Bernoulli mask of degree bound m, bit k keyed by (seed, trial, k).
CoeffMask sample_mask(int m, std::uint64_t seed, std::uint64_t trial = 0,
                      std::uint32_t draw = 0);

/// First non-degenerate mask among the redraws of a trial: masks for which
/// D_n - g vanishes identically (possible only when m = n) are replaced.
CoeffMask sample_nondegenerate(int n, int m, std::uint64_t seed, std::uint64_t trial);

enum class Kind { zeros, envelope_measure, sign_change, small_ball };

std::string_view to_string(Kind kind);
Kind parse_kind(std::string_view name);

struct ExperimentRecord {
  Kind kind = Kind::zeros;
  int n = 0;
  int m = 0;
  /// Extra parameters by name (j, x, center_a, center_b, ...).
  std::map<std::string, double> extra;
  std::uint64_t seed = 0;
  long long trials = 0;
  double mean = 0.0;
  /// Sample standard deviation / sqrt(trials).
  double std_error = 0.0;
  /// Raw per-trial values, kept when trials <= 10^4.
  std::optional<std::vector<double>> per_trial;
};

struct RunOptions {
  /// Worker count; 0 means hardware concurrency. Results do not depend on it.
  int threads = 1;
};

/// Summary of `values`, reduced in index order.
ExperimentRecord summarize(Kind kind, int n, int m, std::uint64_t seed,
                           const std::vector<double>& values);

/// Mean of Z(f) over f = D_n - g, g sampled with degree bound m.
/// Requires 1 <= m <= n and trials >= 1.
ExperimentRecord mc_expected_zeros(int n, int m, long long trials, std::uint64_t seed,
                                   const RunOptions& options = {});

/// Same estimator with a fixed mask in every trial.
ExperimentRecord mc_expected_zeros(int n, const CoeffMask& mask, long long trials,
                                   const RunOptions& options = {});

/// Mean measure of E(g). Requires m >= 2.
ExperimentRecord mc_envelope_measure(int m, long long trials, std::uint64_t seed,
                                     const RunOptions& options = {});

/// Frequency of at least one zero on [pi j/m, pi (j+1)/m].
/// Requires m <= n and m/2 <= j <= m - 1.
ExperimentRecord mc_sign_change_prob(int n, int m, int j, long long trials, std::uint64_t seed,
                                     const RunOptions& options = {});

/// Frequency with which (|g(x)|, |g'(x)| / m) falls in the open ball of
/// diameter 2^-5 around `center`. Requires dist(x, pi Z) >= 2^8 / m.
ExperimentRecord mc_small_ball(int m, double x, std::pair<double, double> center,
                               long long trials, std::uint64_t seed,
                               const RunOptions& options = {});

/// q(m) = n log(m) / sqrt(m) + m.
double scaling_model(int n, int m);

/// argmin of q over integer m in [2, n], ties toward smaller m. Requires n >= 16.
int optimal_m(int n);

struct Construction {
  int N = 0;
  int m = 0;
  int t = 0;
  int n = 0;
  long long Z = 0;
  int certified = 0;
  int uncertified = 0;
  /// Z / (N log N)^(2/3).
  double ratio = 0.0;
  double envelope_measure = 0.0;
  int attempt = 0;
  CoeffMask mask;
  IndexSet A;
};

/// Few-zero set of cardinality exactly N: m = round((N log N)^(2/3)); among
/// `attempts` seeded masks keep the one with the smallest |E(g)|, then set
/// n = N - 1 + t so that |A| = n + 1 - t = N. Requires N >= 64.
Construction construct_few_zeros(int N, int attempts, std::uint64_t seed,
                                 const RunOptions& options = {});

class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScalingCell {
  int n = 0;
  int m = 0;
  double mean = 0.0;
  double model = 0.0;
  double ratio = 0.0;
};

struct ScalingFit {
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<ScalingCell> cells;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// Root mean square of mean - model.
  double rms_residual = 0.0;
};

/// Least squares fit of mean ~ c1 n log(m)/sqrt(m) + c2 m over zeros records.
/// Requires >= 6 records spanning >= 2 values of n and >= 3 values of m;
/// throws RankError if the two regressors are collinear.
ScalingFit fit_scaling(const std::vector<ExperimentRecord>& records);

}  // namespace cosz::ensemble
