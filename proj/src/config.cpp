#include "rwf/config.hpp"

#include <algorithm>
#include <fstream>

#include "rwf/errors.hpp"
#include "rwf/serialize.hpp"

namespace rwf {

namespace {

using nlohmann::json;

void check_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

template <typename T>
void read(const json& j, const std::string& key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string name = path_of(where, key);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(name + ": expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned() && v.get<long long>() < 0) {
          throw ConfigError(name + ": expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(name + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(name + ": expected a string");
    }
    out = v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(name + ": wrong type");
  }
}

int read_positive_int(const json& j, const std::string& key, int def, const std::string& where) {
  int v = def;
  read(j, key, v, where);
  if (v < 1) throw ConfigError(path_of(where, key) + ": must be >= 1");
  return v;
}

Eigen::VectorXd read_box_edge(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (v.is_number()) return Eigen::VectorXd::Constant(1, v.get<double>());
  try {
    const auto xs = v.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  } catch (const json::exception&) {
    throw ConfigError(path_of(where, key) + ": expected a number or an array of numbers");
  }
}

DatasetSpec dataset_from_json(const json& j, std::uint64_t default_seed) {
  const std::string where = "dataset";
  check_object(j, where);
  check_keys(j, {"kind", "path", "n_train", "n_test", "n_steps", "noise_sd", "test_fraction", "seed"},
             where);
  DatasetSpec spec;
  spec.seed = default_seed;
  read(j, "kind", spec.kind, where);
  read(j, "path", spec.path, where);
  read(j, "n_train", spec.n_train, where);
  read(j, "n_test", spec.n_test, where);
  read(j, "n_steps", spec.n_steps, where);
  read(j, "noise_sd", spec.noise_sd, where);
  read(j, "test_fraction", spec.test_fraction, where);
  read(j, "seed", spec.seed, where);
  if (spec.kind != "multistep" && spec.kind != "csv") {
    throw ConfigError("dataset.kind: unknown kind '" + spec.kind + "' (valid: multistep, csv)");
  }
  if (spec.kind == "csv" && spec.path.empty()) throw ConfigError("dataset.path: required for csv");
  if (spec.n_train < 1) throw ConfigError("dataset.n_train: must be >= 1");
  if (spec.n_test < 0) throw ConfigError("dataset.n_test: must be >= 0");
  if (spec.n_steps < 1) throw ConfigError("dataset.n_steps: must be >= 1");
  if (!(spec.noise_sd >= 0.0)) throw ConfigError("dataset.noise_sd: must be >= 0");
  if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0)) {
    throw ConfigError("dataset.test_fraction: must lie in [0, 1)");
  }
  return spec;
}

HyperParams init_from_json(const json& j, const HyperParams& defaults, const std::string& where) {
  check_object(j, where);
  check_keys(j, {"sigma2", "s_min", "s_max", "gamma", "lengthscale", "log"}, where);
  try {
    return hyper_from_json(j, defaults);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

json read_json_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON (" + e.what() + ")");
  }
}

RunConfig run_config_from_json(const json& j) {
  check_object(j, "config");
  check_keys(j,
             {"dataset", "method", "methods", "D", "repeats", "family", "optimizer", "pad_factor",
              "ridge", "ridge_lambda", "exact_opt_subset", "sweep", "seed", "threads", "output"},
             "config");
  RunConfig rc;
  BenchConfig& b = rc.bench;
  read(j, "seed", b.seed, "");
  b.dataset.seed = b.seed;
  if (j.contains("dataset")) b.dataset = dataset_from_json(j.at("dataset"), b.seed);

  if (j.contains("method")) {
    std::string name;
    read(j, "method", name, "");
    rc.method = parse_method(name);
  }
  if (j.contains("methods")) {
    const json& ms = j.at("methods");
    if (!ms.is_array() || ms.empty()) throw ConfigError("methods: expected a non-empty array");
    b.methods.clear();
    for (const json& m : ms) {
      if (!m.is_string()) throw ConfigError("methods: entries must be strings");
      b.methods.push_back(parse_method(m.get<std::string>()));
    }
  }
  b.num_features = read_positive_int(j, "D", b.num_features, "");
  b.repeats = read_positive_int(j, "repeats", b.repeats, "");
  b.threads = read_positive_int(j, "threads", b.threads, "");
  b.exact_opt_subset = read_positive_int(j, "exact_opt_subset", b.exact_opt_subset, "");
  if (j.contains("family")) {
    std::string name;
    read(j, "family", name, "");
    try {
      b.family = parse_family(name);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("family: ") + e.what());
    }
  }
  read(j, "pad_factor", b.objective.pad_factor, "");
  read(j, "ridge", b.objective.ridge, "");
  read(j, "ridge_lambda", b.objective.ridge_lambda, "");
  if (!(b.objective.ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda: must be >= 0");
  read(j, "output", rc.output, "");

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_object(o, "optimizer");
    check_keys(o, {"budget", "init"}, "optimizer");
    read(o, "budget", b.budget, "optimizer");
    if (b.budget < 10) throw ConfigError("optimizer.budget: must be >= 10");
    if (o.contains("init")) {
      const json& init = o.at("init");
      check_object(init, "optimizer.init");
      const bool per_method = init.contains("rwf") || init.contains("rff") || init.contains("exact");
      if (per_method) {
        check_keys(init, {"rwf", "rff", "exact"}, "optimizer.init");
        if (init.contains("rwf")) b.init_rwf = init_from_json(init.at("rwf"), b.init_rwf, "optimizer.init.rwf");
        if (init.contains("rff")) b.init_rff = init_from_json(init.at("rff"), b.init_rff, "optimizer.init.rff");
        if (init.contains("exact")) {
          b.init_exact = init_from_json(init.at("exact"), b.init_exact, "optimizer.init.exact");
        }
      } else {
        b.init_rwf = init_from_json(init, b.init_rwf, "optimizer.init");
        b.init_rff = init_from_json(init, b.init_rff, "optimizer.init");
        b.init_exact = init_from_json(init, b.init_exact, "optimizer.init");
      }
    }
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_object(s, "sweep");
    check_keys(s, {"D"}, "sweep");
    if (s.contains("D")) {
      try {
        rc.sweep_features = s.at("D").get<std::vector<int>>();
      } catch (const json::exception&) {
        throw ConfigError("sweep.D: expected an array of integers");
      }
      if (rc.sweep_features.empty()) throw ConfigError("sweep.D: must not be empty");
      for (int d : rc.sweep_features) {
        if (d < 1) throw ConfigError("sweep.D: entries must be >= 1");
      }
    }
  }
  return rc;
}

json run_config_to_json(const RunConfig& rc) {
  const BenchConfig& b = rc.bench;
  json methods = json::array();
  for (Method m : b.methods) methods.push_back(std::string(method_name(m)));
  json ds = {{"kind", b.dataset.kind},         {"n_train", b.dataset.n_train},
             {"n_test", b.dataset.n_test},     {"n_steps", b.dataset.n_steps},
             {"noise_sd", b.dataset.noise_sd}, {"test_fraction", b.dataset.test_fraction},
             {"seed", b.dataset.seed}};
  if (!b.dataset.path.empty()) ds["path"] = b.dataset.path;
  return {{"dataset", ds},
          {"method", std::string(method_name(rc.method))},
          {"methods", methods},
          {"D", b.num_features},
          {"repeats", b.repeats},
          {"family", std::string(family_name(b.family))},
          {"optimizer",
           {{"budget", b.budget},
            {"init",
             {{"rwf", hyper_to_json(b.init_rwf)},
              {"rff", hyper_to_json(b.init_rff)},
              {"exact", hyper_to_json(b.init_exact)}}}}},
          {"pad_factor", b.objective.pad_factor},
          {"ridge", b.objective.ridge},
          {"ridge_lambda", b.objective.ridge_lambda},
          {"exact_opt_subset", b.exact_opt_subset},
          {"sweep", {{"D", rc.sweep_features}}},
          {"seed", b.seed},
          {"threads", b.threads}};
}

VerifyConfig verify_config_from_json(const json& j) {
  const std::string where = "verify config";
  check_object(j, where);
  check_keys(j,
             {"family", "s_min", "s_max", "lower", "upper", "seed", "pd_points", "pd_sets",
              "probe_pairs", "unbiased_features", "unbiased_repeats", "grid_points",
              "uniform_features", "uniform_repeats", "stationarity_shift",
              "stationarity_half_width", "moment_scales", "localization_samples"},
             where);
  VerifyConfig c;
  if (j.contains("family")) {
    std::string name;
    read(j, "family", name, "");
    try {
      c.family = parse_family(name);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("family: ") + e.what());
    }
  }
  read(j, "s_min", c.s_min, "");
  read(j, "s_max", c.s_max, "");
  if (!(c.s_min > 0.0 && c.s_min < c.s_max)) throw ConfigError("s_min/s_max: need 0 < s_min < s_max");
  if (j.contains("lower")) {
    const Eigen::VectorXd v = read_box_edge(j, "lower", "");
    if (v.size() != 1) throw ConfigError("lower: the verify suite runs in d = 1");
    c.lower = v[0];
  }
  if (j.contains("upper")) {
    const Eigen::VectorXd v = read_box_edge(j, "upper", "");
    if (v.size() != 1) throw ConfigError("upper: the verify suite runs in d = 1");
    c.upper = v[0];
  }
  if (!(c.lower < c.upper)) throw ConfigError("lower/upper: need lower < upper");
  read(j, "seed", c.seed, "");
  c.pd_points = read_positive_int(j, "pd_points", c.pd_points, "");
  c.pd_sets = read_positive_int(j, "pd_sets", c.pd_sets, "");
  c.probe_pairs = read_positive_int(j, "probe_pairs", c.probe_pairs, "");
  c.unbiased_features = read_positive_int(j, "unbiased_features", c.unbiased_features, "");
  c.unbiased_repeats = read_positive_int(j, "unbiased_repeats", c.unbiased_repeats, "");
  c.grid_points = read_positive_int(j, "grid_points", c.grid_points, "");
  c.uniform_repeats = read_positive_int(j, "uniform_repeats", c.uniform_repeats, "");
  c.localization_samples = read_positive_int(j, "localization_samples", c.localization_samples, "");
  read(j, "stationarity_shift", c.stationarity_shift, "");
  read(j, "stationarity_half_width", c.stationarity_half_width, "");
  if (j.contains("uniform_features")) {
    try {
      c.uniform_features = j.at("uniform_features").get<std::vector<int>>();
    } catch (const json::exception&) {
      throw ConfigError("uniform_features: expected an array of integers");
    }
    if (c.uniform_features.size() < 2) throw ConfigError("uniform_features: need at least 2 entries");
  }
  if (j.contains("moment_scales")) {
    try {
      c.moment_scales = j.at("moment_scales").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError("moment_scales: expected an array of numbers");
    }
    if (c.moment_scales.size() < 2) throw ConfigError("moment_scales: need at least 2 entries");
  }
  return c;
}

}  // namespace rwf
