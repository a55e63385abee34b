#include "cosz/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "cosz/constants.hpp"
#include "cosz/envelope.hpp"
#include "cosz/parallel.hpp"
#include "cosz/rng.hpp"
#include "cosz/zeros.hpp"

namespace cosz::ensemble {

std::vector<std::uint64_t> sample_words(int m, std::uint64_t seed, std::uint64_t trial,
                                        std::uint32_t draw) {
  if (m < 0) throw std::invalid_argument("m must be nonnegative");
  const int bits = m + 1;
  const int count = (bits + 63) / 64;
  std::vector<std::uint64_t> words(static_cast<std::size_t>(count));
  for (int w = 0; w < count; w += 2) {
    const auto block = rng::words(seed, trial, draw, static_cast<std::uint32_t>(w / 2));
    words[w] = block[0];
    if (w + 1 < count) words[w + 1] = block[1];
  }
  if (bits % 64 != 0) words.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
  return words;
}

CoeffMask sample_mask(int m, std::uint64_t seed, std::uint64_t trial, std::uint32_t draw) {
  return CoeffMask::from_words(sample_words(m, seed, trial, draw), m + 1);
}

CoeffMask sample_nondegenerate(int n, int m, std::uint64_t seed, std::uint64_t trial) {
  for (std::uint32_t draw = 0;; ++draw) {
    CoeffMask mask = sample_mask(m, seed, trial, draw);
    if (mask.ones() != n + 1) return mask;
  }
}

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::zeros: return "zeros";
    case Kind::envelope_measure: return "envelope";
    case Kind::sign_change: return "signchange";
    case Kind::small_ball: return "smallball";
  }
  return "unknown";
}

Kind parse_kind(std::string_view name) {
  if (name == "zeros") return Kind::zeros;
  if (name == "envelope") return Kind::envelope_measure;
  if (name == "signchange") return Kind::sign_change;
  if (name == "smallball") return Kind::small_ball;
  throw std::invalid_argument("unknown experiment kind '" + std::string(name) + "'");
}

namespace {

// Running mean / sum of squared deviations (Chan et al. merge).
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    count += 1.0;
    const double d = v - mean;
    mean += d / count;
    m2 += d * (v - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / total;
    m2 += o.m2 + d * d * count * o.count / total;
    count = total;
  }
};

constexpr long long kChunk = 4096;

// Evaluates value(i) for every trial in fixed-size chunks; chunk moments are
// merged in chunk order, so the result is independent of the worker count.
template <class Value>
ExperimentRecord run_trials(Kind kind, int n, int m, std::uint64_t seed, long long trials,
                            const RunOptions& options, Value&& value) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const long long chunks = (trials + kChunk - 1) / kChunk;
  const bool keep = trials <= constants::per_trial_limit;
  std::vector<Moments> moments(static_cast<std::size_t>(chunks));
  std::vector<double> raw(keep ? static_cast<std::size_t>(trials) : 0);
  parallel_for(static_cast<std::size_t>(chunks), options.threads, [&](std::size_t c) {
    const long long begin = static_cast<long long>(c) * kChunk;
    const long long end = std::min(trials, begin + kChunk);
    Moments local;
    for (long long i = begin; i < end; ++i) {
      const double v = value(static_cast<std::uint64_t>(i));
      local.add(v);
      if (keep) raw[static_cast<std::size_t>(i)] = v;
    }
    moments[c] = local;
  });
  Moments total;
  for (const auto& part : moments) total.merge(part);
  ExperimentRecord record;
  record.kind = kind;
  record.n = n;
  record.m = m;
  record.seed = seed;
  record.trials = trials;
  record.mean = total.mean;
  record.std_error =
      trials > 1 ? std::sqrt(total.m2 / (total.count - 1.0)) / std::sqrt(total.count) : 0.0;
  if (keep) record.per_trial = std::move(raw);
  return record;
}

}  // namespace

ExperimentRecord summarize(Kind kind, int n, int m, std::uint64_t seed,
                           const std::vector<double>& values) {
  return run_trials(kind, n, m, seed, static_cast<long long>(values.size()), RunOptions{},
                    [&](std::uint64_t i) { return values[i]; });
}

ExperimentRecord mc_expected_zeros(int n, int m, long long trials, std::uint64_t seed,
                                   const RunOptions& options) {
  if (m < 1 || m > n) throw std::invalid_argument("mc_expected_zeros requires 1 <= m <= n");
  return run_trials(Kind::zeros, n, m, seed, trials, options, [&](std::uint64_t i) {
    const DiffPoly f(n, sample_nondegenerate(n, m, seed, i));
    return static_cast<double>(count_total(f).total());
  });
}

ExperimentRecord mc_expected_zeros(int n, const CoeffMask& mask, long long trials,
                                   const RunOptions& options) {
  const DiffPoly f(n, mask);
  const double z = static_cast<double>(count_total(f).total());
  return run_trials(Kind::zeros, n, mask.degree(), 0, trials, options,
                    [&](std::uint64_t) { return z; });
}

ExperimentRecord mc_envelope_measure(int m, long long trials, std::uint64_t seed,
                                     const RunOptions& options) {
  if (m < 2) throw std::invalid_argument("mc_envelope_measure requires m >= 2");
  const envelope::ScanOptions scan{.polish = false};
  return run_trials(Kind::envelope_measure, 0, m, seed, trials, options, [&](std::uint64_t i) {
    return envelope::envelope_set(sample_mask(m, seed, i), scan).measure();
  });
}

ExperimentRecord mc_sign_change_prob(int n, int m, int j, long long trials, std::uint64_t seed,
                                     const RunOptions& options) {
  if (m < 1 || m > n) throw std::invalid_argument("mc_sign_change_prob requires 1 <= m <= n");
  if (2 * j < m || j > m - 1) {
    throw std::invalid_argument("mc_sign_change_prob requires m/2 <= j <= m - 1");
  }
  const Interval window{constants::pi * j / m, constants::pi * (j + 1) / m};
  auto record =
      run_trials(Kind::sign_change, n, m, seed, trials, options, [&](std::uint64_t i) {
        const DiffPoly f(n, sample_mask(m, seed, i));
        if (f.degenerate()) return 1.0;
        return count_on(f, window).total() >= 1 ? 1.0 : 0.0;
      });
  record.extra["j"] = j;
  return record;
}

ExperimentRecord mc_small_ball(int m, double x, std::pair<double, double> center,
                               long long trials, std::uint64_t seed,
                               const RunOptions& options) {
  if (m < 1) throw std::invalid_argument("mc_small_ball requires m >= 1");
  const double dist = std::abs(x - constants::pi * std::round(x / constants::pi));
  if (dist < constants::small_ball_margin / m) {
    throw std::domain_error("mc_small_ball: x is closer than 2^8/m to a multiple of pi");
  }
  // Byte-sliced tables: entry [p][v] holds the contribution of the bits of
  // byte value v at byte position p to g(x) and to -g'(x)/m.
  const int bytes = (m + 1 + 7) / 8;
  std::vector<std::array<double, 2>> table(static_cast<std::size_t>(bytes) * 256);
  for (int p = 0; p < bytes; ++p) {
    std::array<double, 8> c{};
    std::array<double, 8> s{};
    for (int b = 0; b < 8; ++b) {
      const double k = 8 * p + b;
      c[b] = std::cos(k * x);
      s[b] = k * std::sin(k * x) / m;
    }
    for (int v = 0; v < 256; ++v) {
      double a = 0.0;
      double d = 0.0;
      for (int b = 0; b < 8; ++b) {
        if ((v >> b) & 1) {
          a += c[b];
          d += s[b];
        }
      }
      table[static_cast<std::size_t>(p) * 256 + v] = {a, d};
    }
  }
  const double radius = 0.5 * constants::small_ball_diameter;
  auto record = run_trials(Kind::small_ball, 0, m, seed, trials, options, [&](std::uint64_t i) {
    const auto words = sample_words(m, seed, i);
    double a = 0.0;
    double d = 0.0;
    for (int p = 0; p < bytes; ++p) {
      const auto v = static_cast<unsigned>((words[p / 8] >> (8 * (p % 8))) & 0xFFu);
      const auto& e = table[static_cast<std::size_t>(p) * 256 + v];
      a += e[0];
      d += e[1];
    }
    const double da = std::abs(a) - center.first;
    const double dd = std::abs(d) - center.second;
    return da * da + dd * dd < radius * radius ? 1.0 : 0.0;
  });
  record.extra["x"] = x;
  record.extra["center_a"] = center.first;
  record.extra["center_b"] = center.second;
  return record;
}

double scaling_model(int n, int m) {
  return n * std::log(static_cast<double>(m)) / std::sqrt(static_cast<double>(m)) + m;
}

int optimal_m(int n) {
  if (n < 16) throw std::invalid_argument("optimal_m requires n >= 16");
  int best = 2;
  double best_q = scaling_model(n, 2);
  for (int m = 3; m <= n; ++m) {
    const double q = scaling_model(n, m);
    if (q < best_q) {
      best_q = q;
      best = m;
    }
  }
  return best;
}

Construction construct_few_zeros(int N, int attempts, std::uint64_t seed,
                                 const RunOptions& options) {
  if (N < 64) throw std::invalid_argument("construct_few_zeros requires N >= 64");
  if (attempts < 1) throw std::invalid_argument("attempts must be >= 1");
  const double scale = std::pow(N * std::log(static_cast<double>(N)), 2.0 / 3.0);
  const int m = static_cast<int>(std::lround(scale));
  std::vector<double> measure(static_cast<std::size_t>(attempts));
  parallel_for(measure.size(), options.threads, [&](std::size_t a) {
    measure[a] = envelope::envelope_set(sample_mask(m, seed, a)).measure();
  });
  const auto best = static_cast<int>(std::min_element(measure.begin(), measure.end()) -
                                     measure.begin());
  Construction out;
  out.N = N;
  out.m = m;
  out.attempt = best;
  out.mask = sample_mask(m, seed, static_cast<std::uint64_t>(best));
  out.t = out.mask.ones();
  out.n = N - 1 + out.t;
  out.envelope_measure = measure[best];
  const DiffPoly f(out.n, out.mask);
  const ZeroReport report = count_total(f);
  out.certified = report.certified;
  out.uncertified = report.uncertified;
  out.Z = report.total();
  out.ratio = static_cast<double>(out.Z) / scale;
  out.A = poly::to_index_set(f);
  if (static_cast<int>(out.A.size()) != N) {
    throw std::logic_error("construct_few_zeros: cardinality bookkeeping failed");
  }
  return out;
}

ScalingFit fit_scaling(const std::vector<ExperimentRecord>& records) {
  if (records.size() < 6) throw std::invalid_argument("fit_scaling needs at least 6 records");
  std::set<int> ns;
  std::set<int> ms;
  for (const auto& r : records) {
    if (r.kind != Kind::zeros) throw std::invalid_argument("fit_scaling needs zeros records");
    if (r.m < 1 || r.n < 1) throw std::invalid_argument("fit_scaling needs n, m >= 1");
    ns.insert(r.n);
    ms.insert(r.m);
  }
  if (ns.size() < 2 || ms.size() < 3) {
    throw std::invalid_argument("fit_scaling needs >= 2 distinct n and >= 3 distinct m");
  }
  // Normal equations on column-scaled regressors.
  std::vector<double> u;
  std::vector<double> v;
  for (const auto& r : records) {
    u.push_back(r.n * std::log(static_cast<double>(r.m)) / std::sqrt(static_cast<double>(r.m)));
    v.push_back(r.m);
  }
  double su = 0.0;
  double sv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su = std::max(su, std::abs(u[i]));
    sv = std::max(sv, std::abs(v[i]));
  }
  if (su == 0.0 || sv == 0.0) throw RankError("fit_scaling: a regressor vanishes on every cell");
  double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double p = u[i] / su;
    const double q = v[i] / sv;
    a11 += p * p;
    a12 += p * q;
    a22 += q * q;
    b1 += p * records[i].mean;
    b2 += q * records[i].mean;
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 1e-12 * a11 * a22)) {
    throw RankError("fit_scaling: design matrix is singular");
  }
  ScalingFit fit;
  fit.c1 = (a22 * b1 - a12 * b2) / det / su;
  fit.c2 = (a11 * b2 - a12 * b1) / det / sv;
  fit.min_ratio = std::numeric_limits<double>::infinity();
  fit.max_ratio = -std::numeric_limits<double>::infinity();
  double ss = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    ScalingCell cell;
    cell.n = records[i].n;
    cell.m = records[i].m;
    cell.mean = records[i].mean;
    cell.model = fit.c1 * u[i] + fit.c2 * v[i];
    cell.ratio = cell.model > 0.0 ? cell.mean / cell.model
                                  : std::numeric_limits<double>::infinity();
    fit.min_ratio = std::min(fit.min_ratio, cell.ratio);
    fit.max_ratio = std::max(fit.max_ratio, cell.ratio);
    ss += (cell.mean - cell.model) * (cell.mean - cell.model);
    fit.cells.push_back(cell);
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(records.size()));
  return fit;
}

}  // namespace cosz::ensemble
