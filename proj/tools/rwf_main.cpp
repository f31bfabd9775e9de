// rwf: command-line front end.
//
// Exit codes: 0 ok, 2 configuration, 3 data, 4 numerical failure,
// 5 verification failure, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rwf/bench.hpp"
#include "rwf/config.hpp"
#include "rwf/errors.hpp"
#include "rwf/rng.hpp"
#include "rwf/serialize.hpp"
#include "rwf/verify.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitVerify = 5;

struct Globals {
  std::string config;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string output;
  bool seed_given = false;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rwf::ConfigError("output: cannot write '" + path + "'");
  out << text;
  if (!out) throw rwf::ConfigError("output: write failed for '" + path + "'");
}

rwf::RunConfig load_run_config(const Globals& g) {
  rwf::RunConfig rc = rwf::run_config_from_json(rwf::read_json_file(g.config));
  if (g.seed_given) {
    // The flag wins over the config's top-level seed and the dataset seed it implied.
    const bool dataset_followed = rc.bench.dataset.seed == rc.bench.seed;
    rc.bench.seed = g.seed;
    if (dataset_followed) rc.bench.dataset.seed = g.seed;
  }
  if (g.threads != 1) rc.bench.threads = g.threads;
  if (!g.output.empty()) rc.output = g.output;
  return rc;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_fit(const Globals& g, const std::string& method_flag, const std::string& data_path) {
  rwf::RunConfig rc = load_run_config(g);
  if (!method_flag.empty()) rc.method = rwf::parse_method(method_flag);
  if (!data_path.empty()) {
    rc.bench.dataset.kind = "csv";
    rc.bench.dataset.path = data_path;
    rc.bench.dataset.test_fraction = 0.0;
  }
  if (rc.output.empty()) throw rwf::ConfigError("output: fit needs --output for the model file");

  const rwf::Dataset data = rwf::make_dataset(rc.bench.dataset, 0);
  const std::uint64_t seed = rwf::mix_seed(rc.bench.seed, 0);
  const rwf::TrainedModel model = rwf::train_model(rc.bench, rc.method, data, seed);
  rwf::save_model(rc.output, model, data.y_train);

  nlohmann::json report = {{"method", std::string(rwf::method_name(model.method))},
                           {"model", rc.output},
                           {"n_train", data.X_train.rows()},
                           {"log_marginal", model.log_marginal},
                           {"hyperparameters", rwf::hyper_to_json(model.hyper)},
                           {"evaluations", model.opt.evaluations},
                           {"restarts", model.opt.restarts},
                           {"budget_exhausted", model.opt.budget_exhausted},
                           {"opt_seconds", model.opt_seconds},
                           {"fit_seconds", model.fit_seconds}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_predict(const Globals& g, const std::string& model_path, const std::string& input_path) {
  const rwf::TrainedModel model = rwf::load_model(model_path);
  const Eigen::MatrixXd X = rwf::read_csv_matrix(input_path);
  if (X.cols() != model.dim() && X.rows() > 0) {
    throw rwf::DataError(input_path + ": inputs have " + std::to_string(X.cols()) +
                         " columns, the model expects " + std::to_string(model.dim()));
  }
  std::string out = "mean,variance\n";
  if (X.rows() > 0) {
    const rwf::PredictiveDistribution pred = model.predict(X, g.threads);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out += format_double(pred.mean[i]) + ',' + format_double(pred.variance[i]) + '\n';
    }
  }
  write_text(g.output, out);
  return 0;
}

nlohmann::json results_json(const rwf::RunConfig& rc, const std::vector<rwf::MetricsBundle>& rows) {
  nlohmann::json jr = nlohmann::json::array();
  for (const auto& r : rows) jr.push_back(rwf::to_json(r));
  nlohmann::json ja = nlohmann::json::array();
  for (const auto& a : rwf::aggregate(rows)) ja.push_back(rwf::to_json(a));
  return {{"config", rwf::run_config_to_json(rc)}, {"rows", jr}, {"aggregate", ja}};
}

int cmd_benchmark(const Globals& g, const std::string& csv_path) {
  const rwf::RunConfig rc = load_run_config(g);
  const auto rows = rwf::run_benchmark(rc.bench);
  write_text(rc.output, results_json(rc, rows).dump(2) + "\n");
  if (!csv_path.empty()) write_text(csv_path, rwf::metrics_csv(rows));
  return 0;
}

int cmd_sweep(const Globals& g, const std::vector<int>& features, const std::string& csv_path) {
  rwf::RunConfig rc = load_run_config(g);
  if (!features.empty()) rc.sweep_features = features;
  for (int d : rc.sweep_features) {
    if (d < 1) throw rwf::ConfigError("features: entries must be >= 1");
  }
  const auto rows = rwf::sweep(rc.bench, rc.sweep_features);
  write_text(rc.output, results_json(rc, rows).dump(2) + "\n");
  if (!csv_path.empty()) write_text(csv_path, rwf::metrics_csv(rows));
  return 0;
}

int cmd_verify(const Globals& g, const std::vector<std::string>& only, bool controls) {
  rwf::VerifyConfig vc = rwf::verify_config_from_json(rwf::read_json_file(g.config));
  if (g.seed_given) vc.seed = g.seed;
  const auto reports = rwf::run_suite(vc, only, controls);
  nlohmann::json arr = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : reports) {
    nlohmann::json j = rwf::to_json(r);
    if (r.negative_control) {
      // A control that passes means the check lost its power.
      j["expected_fail"] = true;
      j["status"] = r.passed ? "unexpected-pass" : "expected-fail";
      if (r.passed) ok = false;
    } else {
      j["status"] = r.passed ? "pass" : "fail";
      if (!r.passed) ok = false;
    }
    arr.push_back(j);
  }
  write_text(g.output, arr.dump(2) + "\n");
  for (const auto& r : reports) {
    std::cerr << (r.negative_control ? (r.passed ? "UNEXPECTED PASS " : "EXPECTED FAIL   ")
                                     : (r.passed ? "PASS            " : "FAIL            "))
              << r.name << "  statistic=" << r.statistic << " threshold=" << r.threshold << '\n';
  }
  return ok ? 0 : kExitVerify;
}

int cmd_complexity(double B, int d, double diam, double Lz, double eps, double delta) {
  if (!(B > 0.0) || d < 1 || !(diam > 0.0) || !(Lz > 0.0) || !(eps > 0.0) ||
      !(delta > 0.0 && delta < 1.0)) {
    throw rwf::ConfigError("complexity: need B, diam, Lz, eps > 0, d >= 1 and 0 < delta < 1");
  }
  std::cout << rwf::sample_complexity(B, d, diam, Lz, eps, delta) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random wavelet features for Gaussian process regression"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Globals g;
  app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output", g.output, "Output path (model file for fit, stdout when empty)");

  auto* fit = app.add_subcommand("fit", "Optimize hyperparameters, fit and save a model");
  std::string method_flag, data_path;
  fit->add_option("--method", method_flag, "rwf, rff or exact (overrides the config)");
  fit->add_option("--data", data_path, "Training CSV x1..xd,y (overrides the config dataset)")
      ->check(CLI::ExistingFile);

  auto* predict = app.add_subcommand("predict", "Predict with a saved model");
  std::string model_path, input_path;
  predict->add_option("--model", model_path, "Model file written by fit")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--input", input_path, "Input CSV with a header row, columns x1..xd")
      ->required()
      ->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("benchmark", "Run the RMSE/CRPS/NLL benchmark");
  std::string bench_csv;
  bench->add_option("--csv", bench_csv, "Also write per-repeat rows as CSV");

  auto* sweep = app.add_subcommand("sweep", "Benchmark over a list of feature counts");
  std::vector<int> sweep_features;
  std::string sweep_csv;
  sweep->add_option("--features", sweep_features, "Feature counts (default 25 50 100 200 400)")
      ->delimiter(',');
  sweep->add_option("--csv", sweep_csv, "Also write per-repeat rows as CSV");

  auto* verify = app.add_subcommand("verify", "Run the kernel verification suite");
  std::vector<std::string> only;
  bool controls = false;
  verify->add_option("--only", only, "Run only these checks (repeatable)");
  verify->add_flag("--negative-controls", controls, "Also run the negative controls");

  auto* complexity = app.add_subcommand("complexity", "Sufficient D for a uniform error bound");
  double B = 1.0, diam = 1.0, Lz = 1.0, eps = 0.5, delta = 0.1;
  int d = 1;
  complexity->add_option("--B", B, "Feature sup bound");
  complexity->add_option("--d", d, "Input dimension");
  complexity->add_option("--diam", diam, "Domain diameter");
  complexity->add_option("--Lz", Lz, "Feature Lipschitz constant");
  complexity->add_option("--eps", eps, "Uniform error target");
  complexity->add_option("--delta", delta, "Failure probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*fit) return cmd_fit(g, method_flag, data_path);
    if (*predict) return cmd_predict(g, model_path, input_path);
    if (*bench) return cmd_benchmark(g, bench_csv);
    if (*sweep) return cmd_sweep(g, sweep_features, sweep_csv);
    if (*verify) return cmd_verify(g, only, controls);
    if (*complexity) return cmd_complexity(B, d, diam, Lz, eps, delta);
  } catch (const rwf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rwf::ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rwf::UnsupportedError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rwf::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const rwf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
