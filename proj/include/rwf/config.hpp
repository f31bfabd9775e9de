#pragma once

// JSON configuration documents for the benchmark, fit and verify commands.
// Unknown keys and bad values throw ConfigError naming the field.

#include <string>
#include <vector>

#include "json.hpp"
#include "rwf/bench.hpp"
#include "rwf/verify.hpp"

namespace rwf {

// Everything a run needs beyond BenchConfig.
struct RunConfig {
  BenchConfig bench;
  Method method = Method::Rwf;        // fit
  std::vector<int> sweep_features{25, 50, 100, 200, 400};
  std::string output;                 // empty: stdout
};

// Reads {dataset, method, methods, D, repeats, family, optimizer: {budget,
// init}, pad_factor, ridge, ridge_lambda, exact_opt_subset, sweep: {D},
// seed, threads, output}. Missing keys keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& j);

// Reads {family, s_min, s_max, lower, upper, seed, ...}; keys match the
// VerifyConfig field names.
VerifyConfig verify_config_from_json(const nlohmann::json& j);

nlohmann::json run_config_to_json(const RunConfig& config);

// Parses a file; an empty path yields an empty object.
nlohmann::json read_json_file(const std::string& path);

}  // namespace rwf
