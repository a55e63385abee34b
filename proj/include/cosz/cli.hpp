#pragma once
// Command-line front end: subcommands zeros, envelope, mc, construct, verify
// and fit, plus the JSON/JSONL/CSV serializers they share.
//
// Exit codes: 0 success, 1 hard verification failure, 2 usage or parameter
// error. Every output embeds the tool version, schema 1 and a parameter echo;
// thread counts and output paths are left out of the echo so that outputs are
// byte-identical across them.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cosz/ensemble.hpp"
#include "cosz/interval.hpp"
#include "cosz/verify.hpp"
#include "cosz/zeros.hpp"
#include "json.hpp"

namespace cosz::cli {

inline constexpr int kSchema = 1;
std::string_view tool_version();

/// Bad flag value or combination; the message names the flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer sweep: "256,512,1024", "8..512" (step 1), "8..512 lin 8",
/// "8..512 geom 4", or a comma list mixing integers and ranges.
std::vector<int> parse_sweep(std::string_view text);

/// "a:b" with each side a real or a multiple of pi ("pi", "2pi", "0.5pi").
Interval parse_interval(std::string_view text);

/// Flat key=value lines; '#' starts a comment, blank lines are ignored.
std::map<std::string, std::string> parse_config(std::istream& in);

/// Mask from a file: a JSON array of 0/1, a JSON object with "mask" (bit
/// string), "bits" (array) or "indices" (array), or a plain bit string.
CoeffMask read_mask_file(const std::string& path);

nlohmann::json to_json(const ZeroReport& report);
nlohmann::json to_json(const IntervalSet& set);
nlohmann::json to_json(const ensemble::ExperimentRecord& record);
nlohmann::json to_json(const ensemble::ScalingFit& fit);
nlohmann::json to_json(const verify::CheckOutcome& outcome);
ensemble::ExperimentRecord record_from_json(const nlohmann::json& j);

/// One CSV row n,m,trials,mean,stderr; see csv_header().
std::string csv_row(const ensemble::ExperimentRecord& record);
std::string_view csv_header();

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cosz::cli
