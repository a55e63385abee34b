#include "cosz/cli.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cosz/envelope.hpp"
#include "cosz/poly.hpp"

#ifndef COSZ_VERSION
#define COSZ_VERSION "0.0.0"
#endif

namespace cosz::cli {

using nlohmann::json;

std::string_view tool_version() { return COSZ_VERSION; }

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::optional<long long> to_integer(std::string_view s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_real(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string shortest(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

json header(std::string_view command, json params) {
  return {{"schema", kSchema},
          {"tool", "cosz"},
          {"version", tool_version()},
          {"command", command},
          {"params", std::move(params)}};
}

void write_text(const std::string& path, const std::string& text, bool append, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, append ? std::ios::app : std::ios::trunc);
  if (!file) throw UsageError("--out: cannot open '" + path + "'");
  file << text;
  if (!file) throw UsageError("--out: write failed for '" + path + "'");
}

bool file_has_content(const std::string& path) {
  std::ifstream in(path);
  return in && in.peek() != std::ifstream::traits_type::eof();
}

int parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  const auto v = to_integer(text);
  if (!v || *v < 1 || *v > 4096) throw UsageError("--threads: expected a positive integer or 'auto'");
  return static_cast<int>(*v);
}

// ---- options shared by the subcommands ------------------------------------

struct Registry {
  std::set<std::string> flags;
};

struct MaskSource {
  std::string bits;
  std::string file;
  int m = -1;
  std::uint64_t seed = 1;
  std::uint64_t trial = 0;

  void attach(CLI::App* sub) {
    sub->add_option("--mask", bits, "Coefficient bits eps_0 eps_1 ... as a 0/1 string");
    sub->add_option("--mask-file", file, "Mask file (JSON or bit string)");
    sub->add_option("--m", m, "Sample a fair mask of degree bound m");
    sub->add_option("--seed", seed, "Sampling seed");
    sub->add_option("--trial", trial, "Trial index within the seed stream");
  }

  // n < 0 skips the degree check and samples without the redraw rule.
  CoeffMask resolve(const CLI::App* sub, int n) const {
    const int sources = static_cast<int>(sub->count("--mask") > 0) +
                        static_cast<int>(sub->count("--mask-file") > 0) +
                        static_cast<int>(sub->count("--m") > 0);
    if (sources != 1) throw UsageError("--mask/--mask-file/--m: give exactly one mask source");
    CoeffMask mask;
    if (sub->count("--mask") > 0) {
      try {
        mask = CoeffMask::from_string(bits);
      } catch (const std::exception& e) {
        throw UsageError(std::string("--mask: ") + e.what());
      }
    } else if (sub->count("--mask-file") > 0) {
      try {
        mask = read_mask_file(file);
      } catch (const std::exception& e) {
        throw UsageError(std::string("--mask-file: ") + e.what());
      }
    } else {
      if (m < 0) throw UsageError("--m: must be nonnegative");
      if (n >= 0 && m > n) throw UsageError("--m: must satisfy m <= n");
      mask = n >= 0 ? ensemble::sample_nondegenerate(n, m, seed, trial)
                    : ensemble::sample_mask(m, seed, trial);
    }
    if (n >= 0 && mask.degree() > n) throw UsageError("--mask: degree exceeds n");
    return mask;
  }

  void echo(const CLI::App* sub, json& params) const {
    if (sub->count("--m") > 0) {
      params["m"] = m;
      params["seed"] = seed;
      params["trial"] = trial;
    }
  }
};

// ---- zeros ----------------------------------------------------------------

struct ZerosCmd {
  int n = -1;
  MaskSource source;
  std::string interval;
  std::string method = "fast_slow";
  bool roots = false;
  double tangency = constants::tangency_tol;
  double pole_zone = constants::pole_zone;
  int max_depth = constants::max_branch_depth;
  std::string out;

  void attach(CLI::App* sub, Registry& reg) {
    sub->add_option("--n", n, "Degree of the Dirichlet kernel")->required();
    source.attach(sub);
    sub->add_option("--interval", interval, "Query a:b (default: all of [0, 2pi])");
    sub->add_option("--method", method, "fast_slow, grid or oracle");
    sub->add_flag("--roots", roots, "Include certified root abscissae");
    reg.flags.insert("roots");
    sub->add_option("--tol-tangency", tangency, "Tangency tolerance, times (n + 1)");
    sub->add_option("--tol-pole-zone", pole_zone, "Half-width of the zone around x = 0");
    sub->add_option("--tol-max-depth", max_depth, "Branch bisection depth");
    sub->add_option("--out", out, "Output path (default stdout)");
  }

  int execute(const CLI::App* sub, std::ostream& out_stream) const {
    if (n < 0) throw UsageError("--n: must be nonnegative");
    const CoeffMask mask = source.resolve(sub, n);
    Method m;
    try {
      m = parse_method(method);
    } catch (const std::exception&) {
      throw UsageError("--method: expected fast_slow, grid or oracle");
    }
    if (m == Method::oracle && n > 512) throw UsageError("--method: oracle requires n <= 512");
    if (!(tangency > 0)) throw UsageError("--tol-tangency: must be positive");
    if (!(pole_zone > 0 && pole_zone < 1)) throw UsageError("--tol-pole-zone: must lie in (0, 1)");
    if (max_depth < 1 || max_depth > 60) throw UsageError("--tol-max-depth: must lie in [1, 60]");
    CountOptions opts;
    opts.want_roots = roots;
    opts.tangency_tol = tangency;
    opts.pole_zone = pole_zone;
    opts.max_depth = max_depth;

    const DiffPoly f(n, mask);
    json params = {{"n", n},
                   {"mask", mask.to_string()},
                   {"method", to_string(m)},
                   {"roots", roots},
                   {"tol_tangency", tangency},
                   {"tol_pole_zone", pole_zone},
                   {"tol_max_depth", max_depth}};
    source.echo(sub, params);
    ZeroReport report;
    if (interval.empty()) {
      params["interval"] = nullptr;
      report = count_total(f, m, opts);
    } else {
      const Interval I = parse_interval(interval);
      if (!(0 <= I.lo && I.lo < I.hi && I.hi <= 2 * kPi)) {
        throw UsageError("--interval: need 0 <= a < b <= 2pi");
      }
      params["interval"] = {I.lo, I.hi};
      report = count_on(f, I, m, opts);
    }
    json doc = header("zeros", std::move(params));
    doc.update(to_json(report));
    write_text(out, doc.dump(2) + "\n", false, out_stream);
    return 0;
  }
};

// ---- envelope -------------------------------------------------------------

struct EnvelopeCmd {
  MaskSource source;
  std::string set = "E";
  int n = -1;
  std::string window;
  bool no_polish = false;
  std::string out;

  void attach(CLI::App* sub, Registry& reg) {
    source.attach(sub);
    sub->add_option("--set", set, "E, plus or prime");
    sub->add_option("--n", n, "Degree for the derivative envelope");
    sub->add_option("--window", window, "Restrict to a:b inside (0, pi]");
    sub->add_flag("--no-polish", no_polish, "Skip Newton refinement of endpoints");
    reg.flags.insert("no-polish");
    sub->add_option("--out", out, "Output path (default stdout)");
  }

  int execute(const CLI::App* sub, std::ostream& out_stream) const {
    const CoeffMask mask = source.resolve(sub, -1);
    envelope::ScanOptions opts;
    opts.polish = !no_polish;
    json params = {{"mask", mask.to_string()}, {"set", set}, {"polish", !no_polish}};
    source.echo(sub, params);
    IntervalSet result;
    if (set == "E") {
      result = envelope::envelope_set(mask, opts);
    } else if (set == "plus") {
      result = envelope::envelope_plus_set(mask, opts);
    } else if (set == "prime") {
      if (n < 1) throw UsageError("--n: the derivative envelope needs n >= 1");
      params["n"] = n;
      result = envelope::envelope_prime_set(mask, n, opts);
    } else {
      throw UsageError("--set: expected E, plus or prime");
    }
    if (!window.empty()) {
      const Interval w = parse_interval(window);
      if (!(0 <= w.lo && w.lo < w.hi && w.hi <= kPi)) {
        throw UsageError("--window: need 0 <= a < b <= pi");
      }
      params["window"] = {w.lo, w.hi};
      result = envelope::restrict(result, w);
    }
    json doc = header("envelope", std::move(params));
    doc.update(to_json(result));
    write_text(out, doc.dump(2) + "\n", false, out_stream);
    return 0;
  }
};

// ---- mc -------------------------------------------------------------------

struct McCmd {
  std::string kind;
  std::vector<std::string> n_sweep;
  std::vector<std::string> m_sweep;
  long long trials = 1000;
  std::uint64_t seed = 1;
  int j = -1;
  double x = 1.0;
  std::string center = "0,0";
  bool per_trial = false;
  std::string threads = "1";
  std::string format = "jsonl";
  std::string out;

  void attach(CLI::App* sub, Registry& reg) {
    sub->add_option("--kind", kind, "zeros, envelope, signchange or smallball")->required();
    sub->add_option("--n", n_sweep, "Sweep of n, e.g. 256,512,1024")->expected(1, 3);
    sub->add_option("--m", m_sweep, "Sweep of m, e.g. 8..512 geom 4")->expected(1, 3)->required();
    sub->add_option("--trials", trials, "Trials per cell");
    sub->add_option("--seed", seed, "Seed");
    sub->add_option("--j", j, "signchange: window index (default floor(3m/4))");
    sub->add_option("--x", x, "smallball: evaluation point");
    sub->add_option("--center", center, "smallball: ball center a,b");
    sub->add_flag("--per-trial", per_trial, "Keep per-trial values (trials <= 10^4)");
    reg.flags.insert("per-trial");
    sub->add_option("--threads", threads, "Worker count or 'auto'");
    sub->add_option("--format", format, "jsonl, json or csv");
    sub->add_option("--out", out, "Output path, appended to (default stdout)");
  }

  static std::vector<int> sweep(const std::vector<std::string>& tokens, std::string_view flag) {
    std::string joined;
    for (const auto& t : tokens) joined += (joined.empty() ? "" : " ") + t;
    try {
      return parse_sweep(joined);
    } catch (const std::exception& e) {
      throw UsageError(std::string(flag) + ": " + e.what());
    }
  }

  int execute(std::ostream& out_stream, std::ostream& err) const {
    ensemble::Kind k;
    try {
      k = ensemble::parse_kind(kind);
    } catch (const std::exception&) {
      throw UsageError("--kind: expected zeros, envelope, signchange or smallball");
    }
    if (trials < 1) throw UsageError("--trials: must be positive");
    if (format != "jsonl" && format != "json" && format != "csv") {
      throw UsageError("--format: expected jsonl, json or csv");
    }
    const int workers = parse_threads(threads);
    const std::vector<int> ms = sweep(m_sweep, "--m");
    const bool uses_n = k != ensemble::Kind::envelope_measure && k != ensemble::Kind::small_ball;
    std::vector<int> ns{0};
    if (uses_n) {
      if (n_sweep.empty()) throw UsageError("--n: required for kind " + kind);
      ns = sweep(n_sweep, "--n");
    }
    const auto cparts = split(center, ',');
    const auto ca = cparts.size() == 2 ? to_real(cparts[0]) : std::nullopt;
    const auto cb = cparts.size() == 2 ? to_real(cparts[1]) : std::nullopt;
    if (!ca || !cb) throw UsageError("--center: expected a,b");

    json params = {{"kind", kind},
                   {"n", uses_n ? json(ns) : json(nullptr)},
                   {"m", ms},
                   {"trials", trials},
                   {"seed", seed},
                   {"per_trial", per_trial}};
    if (k == ensemble::Kind::sign_change) params["j"] = j < 0 ? json("3m/4") : json(j);
    if (k == ensemble::Kind::small_ball) {
      params["x"] = x;
      params["center"] = {*ca, *cb};
    }

    const ensemble::RunOptions run{.threads = workers};
    std::vector<ensemble::ExperimentRecord> records;
    for (const int n : ns) {
      for (const int m : ms) {
        if (uses_n && m > n) {
          err << "mc: skipping cell n=" << n << " m=" << m << " (m > n)\n";
          continue;
        }
        try {
          switch (k) {
            case ensemble::Kind::zeros:
              records.push_back(ensemble::mc_expected_zeros(n, m, trials, seed, run));
              break;
            case ensemble::Kind::envelope_measure:
              records.push_back(ensemble::mc_envelope_measure(m, trials, seed, run));
              break;
            case ensemble::Kind::sign_change:
              records.push_back(ensemble::mc_sign_change_prob(n, m, j < 0 ? 3 * m / 4 : j, trials,
                                                              seed, run));
              break;
            case ensemble::Kind::small_ball:
              records.push_back(ensemble::mc_small_ball(m, x, {*ca, *cb}, trials, seed, run));
              break;
          }
        } catch (const std::invalid_argument& e) {
          throw UsageError(std::string("cell n=") + std::to_string(n) + " m=" + std::to_string(m) +
                           ": " + e.what());
        }
        if (!per_trial) records.back().per_trial.reset();
      }
    }

    std::string text;
    if (format == "csv") {
      if (out.empty() || out == "-" || !file_has_content(out)) text += std::string(csv_header());
      for (const auto& r : records) text += csv_row(r);
      write_text(out, text, true, out_stream);
      return 0;
    }
    json lines = json::array();
    for (const auto& r : records) {
      json doc = header("mc", params);
      doc.update(to_json(r));
      lines.push_back(std::move(doc));
    }
    if (format == "json") {
      write_text(out, lines.dump(2) + "\n", false, out_stream);
    } else {
      for (const auto& l : lines) text += l.dump() + "\n";
      write_text(out, text, true, out_stream);
    }
    return 0;
  }
};

// ---- construct ------------------------------------------------------------

struct ConstructCmd {
  int N = 0;
  int attempts = 50;
  std::uint64_t seed = 1;
  std::string threads = "1";
  std::string out;
  std::string set_format = "lines";
  std::string summary;

  void attach(CLI::App* sub, Registry&) {
    sub->add_option("--N", N, "Target cardinality |A|")->required();
    sub->add_option("--attempts", attempts, "Masks tried");
    sub->add_option("--seed", seed, "Seed");
    sub->add_option("--threads", threads, "Worker count or 'auto'");
    sub->add_option("--out", out, "Index set output path (the summary goes to stdout)");
    sub->add_option("--set-format", set_format, "lines or json");
    sub->add_option("--summary", summary, "Also write the JSON summary here");
  }

  int execute(std::ostream& out_stream) const {
    if (N < 64) throw UsageError("--N: must be at least 64");
    if (attempts < 1) throw UsageError("--attempts: must be positive");
    if (set_format != "lines" && set_format != "json") {
      throw UsageError("--set-format: expected lines or json");
    }
    const auto c = ensemble::construct_few_zeros(N, attempts, seed, {.threads = parse_threads(threads)});
    if (!out.empty()) {
      if (out == "-") throw UsageError("--out: give a file path for the index set");
      std::string text;
      if (set_format == "json") {
        text = json(c.A.values).dump() + "\n";
      } else {
        for (const int a : c.A.values) text += std::to_string(a) + "\n";
      }
      write_text(out, text, false, out_stream);
    }
    json doc = header("construct", {{"N", N}, {"attempts", attempts}, {"seed", seed}});
    doc.update({{"N", c.N},
                {"m", c.m},
                {"t", c.t},
                {"n", c.n},
                {"size", c.A.size()},
                {"Z", c.Z},
                {"certified", c.certified},
                {"uncertified", c.uncertified},
                {"ratio", c.ratio},
                {"envelope_measure", c.envelope_measure},
                {"attempt", c.attempt},
                {"mask", c.mask.to_string()}});
    const std::string text = doc.dump() + "\n";
    if (!summary.empty()) write_text(summary, text, false, out_stream);
    out_stream << text;
    return 0;
  }
};

// ---- verify ---------------------------------------------------------------

struct VerifyCmd {
  std::string suite = "all";
  std::uint64_t seed = 1;
  std::string threads = "1";
  bool quiet = false;
  std::string out;

  void attach(CLI::App* sub, Registry& reg) {
    sub->add_option("--suite", suite, "identities, kernel, short, sandwich, envelope, measure, et or all");
    sub->add_option("--seed", seed, "Seed");
    sub->add_option("--threads", threads, "Worker count or 'auto'");
    sub->add_flag("--quiet", quiet, "No per-check lines on stderr");
    reg.flags.insert("quiet");
    sub->add_option("--out", out, "Output path (default stdout)");
  }

  int execute(std::ostream& out_stream, std::ostream& err) const {
    const auto names = verify::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
      throw UsageError("--suite: unknown suite '" + suite + "'");
    }
    const auto outcomes = verify::run_suite(suite, {.seed = seed, .threads = parse_threads(threads)});
    int hard_failures = 0;
    json list = json::array();
    for (const auto& o : outcomes) {
      if (o.hard && !o.passed) ++hard_failures;
      list.push_back(to_json(o));
      if (!quiet) {
        const char* tag = o.domain_empty ? "EMPTY" : o.passed ? "PASS " : "FAIL ";
        err << tag << ' ' << (o.hard ? "hard " : "soft ") << o.name << " ratio=" << shortest(o.ratio)
            << '\n';
      }
    }
    json doc = header("verify", {{"suite", suite}, {"seed", seed}});
    doc["outcomes"] = std::move(list);
    doc["hard_failures"] = hard_failures;
    write_text(out, doc.dump(2) + "\n", false, out_stream);
    return hard_failures > 0 ? 1 : 0;
  }
};

// ---- fit ------------------------------------------------------------------

struct FitCmd {
  std::string records;
  std::string out;

  void attach(CLI::App* sub, Registry&) {
    sub->add_option("records", records, "JSONL file of zeros records")->required();
    sub->add_option("--out", out, "Output path (default stdout)");
  }

  int execute(std::ostream& out_stream, std::ostream& err) const {
    std::ifstream in(records);
    if (!in) throw UsageError("records: cannot open '" + records + "'");
    std::vector<ensemble::ExperimentRecord> rs;
    int line_no = 0;
    int skipped = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (trim(line).empty()) continue;
      ensemble::ExperimentRecord r;
      try {
        r = record_from_json(json::parse(line));
      } catch (const std::exception& e) {
        throw UsageError("records: line " + std::to_string(line_no) + ": " + e.what());
      }
      if (r.kind != ensemble::Kind::zeros) {
        ++skipped;
        continue;
      }
      rs.push_back(std::move(r));
    }
    if (skipped > 0) err << "fit: ignored " << skipped << " records of other kinds\n";
    const auto fit = ensemble::fit_scaling(rs);
    json doc = header("fit", {{"records", static_cast<int>(rs.size())}});
    doc.update(to_json(fit));
    write_text(out, doc.dump(2) + "\n", false, out_stream);
    return 0;
  }
};

// Prepends config entries as flags after the subcommand token, skipping
// keys that also appear on the command line.
std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App& app,
                                      const std::map<std::string, Registry>& registries) {
  std::size_t sub_pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (registries.count(args[i])) {
      sub_pos = i;
      sub = app.get_subcommand(args[i]);
      break;
    }
  }
  if (!sub) return args;
  std::string path;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config: missing path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  std::map<std::string, std::string> config;
  try {
    config = parse_config(in);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--config: ") + e.what());
  }
  const auto& flags = registries.at(args[sub_pos]).flags;
  std::vector<std::string> injected;
  for (const auto& [key, value] : config) {
    const std::string flag = "--" + key;
    if (key == "config" || key == "help" || sub->get_option_no_throw(flag) == nullptr) {
      throw UsageError("--config: unknown key '" + key + "' for " + args[sub_pos]);
    }
    const bool on_command_line =
        std::any_of(args.begin() + static_cast<long>(sub_pos) + 1, args.end(),
                    [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    if (on_command_line) continue;
    if (flags.count(key)) {
      if (value == "true" || value == "1") {
        injected.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw UsageError("--config: key '" + key + "' expects true or false");
      }
      continue;
    }
    const auto ws = words(value);
    if (ws.empty()) throw UsageError("--config: key '" + key + "' has no value");
    injected.push_back(flag);
    injected.insert(injected.end(), ws.begin(), ws.end());
  }
  std::vector<std::string> result(args.begin(), args.begin() + static_cast<long>(sub_pos) + 1);
  result.insert(result.end(), injected.begin(), injected.end());
  result.insert(result.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
  return result;
}

}  // namespace

// ---- parsing helpers ------------------------------------------------------

std::vector<int> parse_sweep(std::string_view text) {
  const std::string all = trim(text);
  if (all.empty()) throw std::invalid_argument("empty sweep");
  std::vector<int> values;
  auto push = [&](long long v) {
    if (v < 0 || v > INT_MAX) throw std::invalid_argument("sweep value out of range");
    values.push_back(static_cast<int>(v));
  };
  for (const auto& piece : split(all, ',')) {
    const auto ws = words(piece);
    if (ws.empty()) throw std::invalid_argument("empty sweep item in '" + all + "'");
    const auto dots = ws[0].find("..");
    if (dots == std::string::npos) {
      const auto v = to_integer(ws[0]);
      if (!v || ws.size() != 1) throw std::invalid_argument("malformed sweep item '" + piece + "'");
      push(*v);
      continue;
    }
    const auto a = to_integer(std::string_view(ws[0]).substr(0, dots));
    const auto b = to_integer(std::string_view(ws[0]).substr(dots + 2));
    if (!a || !b || *a > *b) throw std::invalid_argument("malformed range '" + ws[0] + "'");
    std::string mode = "lin";
    std::string step = "1";
    if (ws.size() == 3) {
      mode = ws[1];
      step = ws[2];
    } else if (ws.size() != 1) {
      throw std::invalid_argument("malformed range '" + piece + "'");
    }
    if (mode == "lin") {
      const auto s = to_integer(step);
      if (!s || *s < 1) throw std::invalid_argument("lin step must be a positive integer");
      for (long long v = *a; v <= *b; v += *s) push(v);
    } else if (mode == "geom") {
      const auto r = to_real(step);
      if (!r || !(*r > 1.0)) throw std::invalid_argument("geom ratio must exceed 1");
      if (*a < 1) throw std::invalid_argument("geom range must start at 1 or more");
      for (int k = 0;; ++k) {
        const long long v = std::llround(static_cast<double>(*a) * std::pow(*r, k));
        if (v > *b) break;
        if (values.empty() || values.back() != v) push(v);
      }
    } else {
      throw std::invalid_argument("unknown range mode '" + mode + "' (lin or geom)");
    }
  }
  return values;
}

Interval parse_interval(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw UsageError("interval '" + std::string(text) + "': expected a:b");
  auto side = [&](std::string s) {
    s = trim(s);
    double scale = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
      scale = kPi;
      s.resize(s.size() - 2);
      if (s.empty()) return kPi;
    }
    const auto v = to_real(s);
    if (!v) throw UsageError("interval '" + std::string(text) + "': bad number '" + s + "'");
    return *v * scale;
  };
  return {side(std::string(text.substr(0, colon))), side(std::string(text.substr(colon + 1)))};
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> config;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
    if (config.count(key)) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    config[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return config;
}

CoeffMask read_mask_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = trim(buf.str());
  if (text.empty()) return {};
  if (text.front() != '[' && text.front() != '{' && text.front() != '"') {
    return CoeffMask::from_string(text);
  }
  const json j = json::parse(text);
  auto from_bits = [](const json& arr) {
    std::vector<std::uint8_t> bits;
    for (const auto& b : arr) {
      const int v = b.get<int>();
      if (v != 0 && v != 1) throw std::invalid_argument("mask bits must be 0 or 1");
      bits.push_back(static_cast<std::uint8_t>(v));
    }
    return CoeffMask::from_bits(bits);
  };
  if (j.is_string()) return CoeffMask::from_string(j.get<std::string>());
  if (j.is_array()) return from_bits(j);
  if (j.contains("mask")) return CoeffMask::from_string(j.at("mask").get<std::string>());
  if (j.contains("bits")) return from_bits(j.at("bits"));
  if (j.contains("indices")) {
    const auto idx = j.at("indices").get<std::vector<int>>();
    for (const int k : idx) {
      if (k < 0) throw std::invalid_argument("mask indices must be nonnegative");
    }
    return CoeffMask::from_indices(idx);
  }
  throw std::invalid_argument("expected a bit array or an object with mask, bits or indices");
}

// ---- serialization --------------------------------------------------------

json to_json(const ZeroReport& report) {
  json j = {{"certified", report.certified},
            {"uncertified", report.uncertified},
            {"total", report.total()},
            {"interval", {report.interval.lo, report.interval.hi}},
            {"method", to_string(report.method)}};
  if (report.roots) j["roots"] = *report.roots;
  return j;
}

json to_json(const IntervalSet& set) {
  json intervals = json::array();
  for (const auto& iv : set.intervals()) intervals.push_back({iv.lo, iv.hi});
  return {{"intervals", std::move(intervals)}, {"measure", set.measure()}, {"count", set.count()}};
}

json to_json(const ensemble::ExperimentRecord& r) {
  json j = {{"kind", ensemble::to_string(r.kind)},
            {"n", r.n},
            {"m", r.m},
            {"seed", r.seed},
            {"trials", r.trials},
            {"mean", r.mean},
            {"std_error", r.std_error},
            {"extra", r.extra}};
  if (r.per_trial) j["per_trial"] = *r.per_trial;
  return j;
}

json to_json(const ensemble::ScalingFit& fit) {
  json cells = json::array();
  for (const auto& c : fit.cells) {
    cells.push_back({{"n", c.n}, {"m", c.m}, {"mean", c.mean}, {"model", c.model}, {"ratio", c.ratio}});
  }
  return {{"c1", fit.c1},
          {"c2", fit.c2},
          {"min_ratio", fit.min_ratio},
          {"max_ratio", fit.max_ratio},
          {"rms_residual", fit.rms_residual},
          {"cells", std::move(cells)}};
}

json to_json(const verify::CheckOutcome& o) {
  return {{"name", o.name},
          {"mode", verify::to_string(o.mode)},
          {"hard", o.hard},
          {"passed", o.passed},
          {"domain_empty", o.domain_empty},
          {"ratio", o.ratio},
          {"witness", {{"lo", o.witness.lo}, {"hi", o.witness.hi}, {"values", o.witness.values}}},
          {"detail", o.detail}};
}

ensemble::ExperimentRecord record_from_json(const json& j) {
  ensemble::ExperimentRecord r;
  r.kind = ensemble::parse_kind(j.at("kind").get<std::string>());
  r.n = j.at("n").get<int>();
  r.m = j.at("m").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.trials = j.at("trials").get<long long>();
  r.mean = j.at("mean").get<double>();
  r.std_error = j.value("std_error", 0.0);
  if (j.contains("extra")) r.extra = j.at("extra").get<std::map<std::string, double>>();
  if (j.contains("per_trial")) r.per_trial = j.at("per_trial").get<std::vector<double>>();
  return r;
}

std::string_view csv_header() { return "n,m,trials,mean,stderr\n"; }

std::string csv_row(const ensemble::ExperimentRecord& r) {
  return std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.trials) + "," +
         shortest(r.mean) + "," + shortest(r.std_error) + "\n";
}

// ---- entry point ----------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zeros of {0,1}-cosine polynomials f = D_n - g.\n"
               "Zeros are counted on [0, 2pi] as distinct points, with x = 0 and x = 2pi "
               "identified and counted once.",
               "cosz"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  std::string config_path;

  std::map<std::string, Registry> registries;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key=value file; flags override it");
    registries[name];
    return sub;
  };
  ZerosCmd zeros;
  EnvelopeCmd env;
  McCmd mc;
  ConstructCmd construct;
  VerifyCmd verify_cmd;
  FitCmd fit;
  CLI::App* s_zeros = add("zeros", "Count zeros of f on an interval or on [0, 2pi]");
  CLI::App* s_env = add("envelope", "Envelope sets E, E+ or E' as interval unions");
  CLI::App* s_mc = add("mc", "Monte Carlo experiments over (n, m) sweeps");
  CLI::App* s_construct = add("construct", "Few-zero index set of a given cardinality");
  CLI::App* s_verify = add("verify", "Numerical checks of the deterministic inequalities");
  CLI::App* s_fit = add("fit", "Least-squares scaling fit of zeros records");
  zeros.attach(s_zeros, registries["zeros"]);
  env.attach(s_env, registries["envelope"]);
  mc.attach(s_mc, registries["mc"]);
  construct.attach(s_construct, registries["construct"]);
  verify_cmd.attach(s_verify, registries["verify"]);
  fit.attach(s_fit, registries["fit"]);

  try {
    std::vector<std::string> argv = apply_config(args, app, registries);
    std::reverse(argv.begin(), argv.end());
    try {
      app.parse(argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 2;
    }
    if (s_zeros->parsed()) return zeros.execute(s_zeros, out);
    if (s_env->parsed()) return env.execute(s_env, out);
    if (s_mc->parsed()) return mc.execute(out, err);
    if (s_construct->parsed()) return construct.execute(out);
    if (s_verify->parsed()) return verify_cmd.execute(out, err);
    if (s_fit->parsed()) return fit.execute(out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace cosz::cli
