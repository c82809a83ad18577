#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sigmalab::cli {

using json = nlohmann::ordered_json;

/// Malformed or unknown configuration; `key` names the offending entry.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

inline constexpr std::string_view kSuites[] = {"sigma-verify", "identities", "estimates", "representation",
                                               "all"};

/// Desk profile (dt = 1e-4, 2000 paths) or the heavy profile (dt = 1e-5,
/// 10^4 paths).
json default_config(bool heavy = false);

/// Recursively merges `overlay` into `base`. Every key of the overlay must
/// exist in the base and have a compatible type.
void merge_config(json& base, const json& overlay, const std::string& prefix = "");

/// Sets a scalar leaf addressed by a dotted path; the value is parsed as JSON
/// and falls back to a string.
void apply_override(json& cfg, const std::string& dotted, const std::string& value);

/// Checks names, types and ranges.
void validate_config(const json& cfg);

struct CheckResult {
  std::string suite;
  std::string name;
  std::string statement;  // what is being verified, with its closed form
  bool pass = false;
  bool informational = false;  // reported, excluded from the aggregate verdict
  json metrics = json::object();
  double seconds = 0.0;  // wall time, reported outside the hashed payload
  std::vector<std::pair<std::string, std::string>> csv;  // file stem, contents
};

struct SuiteReport {
  json config;
  std::vector<CheckResult> checks;
  bool pass = false;
  double wall_seconds = 0.0;
  std::string hash;
};

SuiteReport run_suite(const json& cfg, std::size_t workers);

/// Report JSON; the "timing" section is the only part excluded from the hash.
json report_json(const SuiteReport& rep);

/// SHA-256 of the report payload (without timing) and every CSV artifact.
std::string content_hash(const SuiteReport& rep);

/// Writes report.json, the CSV artifacts and hash.txt into `dir`.
void write_outputs(const SuiteReport& rep, const std::string& dir);

/// Text listing each check of a suite and the tolerance it enforces. Throws
/// ConfigError for an unknown suite.
std::string describe(std::string_view suite);

/// Entry point of the command-line tool. Exit codes: 0 pass, 1 check
/// failure, 2 configuration error, 3 internal error.
int main(int argc, char** argv);

} // namespace sigmalab::cli
