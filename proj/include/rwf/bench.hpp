#pragma once

// Datasets, predictive metrics and the experiment runner.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwf/hyperopt.hpp"
#include "rwf/model.hpp"
#include "rwf/wavelets.hpp"

namespace rwf {

// Per-column input and output z-score statistics (train rows only).
struct NormStats {
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_std;
  double y_mean = 0.0;
  double y_std = 1.0;

  static NormStats identity(int dim);
};

struct Dataset {
  Eigen::MatrixXd X_train;
  Eigen::VectorXd y_train;
  Eigen::MatrixXd X_test;
  Eigen::VectorXd y_test;
  NormStats stats;          // identity until normalize() runs
  bool normalized = false;

  int dim() const { return static_cast<int>(X_train.cols()); }
};

// f(x) = sum_k heights[k] * 1[x >= centers[k]].
double step_signal(double x, const std::vector<double>& centers, const std::vector<double>& heights);

struct MultistepShape {
  std::vector<double> centers;  // -1 + 2k/(n+1), k = 1..n
  std::vector<double> heights;  // alternating +h, -h, ...
};

// Equally spaced change points; h chosen so the signal has unit variance
// for x ~ U[-1, 1].
MultistepShape multistep_shape(int n_steps);

// x ~ U[-1, 1], y = f(x) + N(0, noise_sd^2). Raw (unnormalized) units.
Dataset gen_multistep(int n_train = 4200, int n_test = 1800, int n_steps = 5,
                      double noise_sd = 0.05, std::uint64_t seed = 42);

// Header row, columns x1..xd,y, comma separated, no quoting. Rows are split
// into train/test by a seeded permutation; n_test = round(test_fraction N),
// keeping at least one training row.
Dataset load_csv(const std::string& path, std::uint64_t split_seed = 42,
                 double test_fraction = 0.1);

// Numeric matrix from a CSV with a header row; `expected_cols` < 0 accepts
// any consistent width.
Eigen::MatrixXd read_csv_matrix(const std::string& path, int expected_cols = -1,
                                std::vector<std::string>* header = nullptr);

// z-scores inputs and outputs with train statistics. Constant columns get
// std 1 and a warning on stderr.
Dataset normalize(const Dataset& ds);

Eigen::MatrixXd normalize_inputs(const NormStats& stats, const Eigen::MatrixXd& X);
PredictiveDistribution denormalize(const NormStats& stats, const PredictiveDistribution& pred);
Eigen::VectorXd denormalize_targets(const NormStats& stats, const Eigen::VectorXd& y);

double rmse(const Eigen::VectorXd& mean, const Eigen::VectorXd& y);
// Mean Gaussian negative log predictive density.
double nll(const PredictiveDistribution& pred, const Eigen::VectorXd& y);
// Mean closed-form Gaussian CRPS.
double crps(const PredictiveDistribution& pred, const Eigen::VectorXd& y);

struct MetricsBundle {
  std::string method;
  int repeat = 0;
  std::uint64_t seed = 0;
  int num_features = 0;  // 0 for the exact GP
  int n_train = 0;
  int n_test = 0;
  double rmse = 0.0;  // original target units
  double rmse_standardized = 0.0;
  double crps = 0.0;
  double nll = 0.0;
  double log_marginal = 0.0;
  double opt_seconds = 0.0;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  HyperParams hyper;
};

struct DatasetSpec {
  std::string kind = "multistep";  // or "csv"
  std::string path;
  int n_train = 4200;
  int n_test = 1800;
  int n_steps = 5;
  double noise_sd = 0.05;
  double test_fraction = 0.1;
  std::uint64_t seed = 42;
};

struct BenchConfig {
  DatasetSpec dataset;
  std::vector<Method> methods{Method::Rwf, Method::Rff};
  int num_features = 200;
  int repeats = 5;
  int budget = 150;
  WaveletFamily family = WaveletFamily::MexicanHat;
  HyperParams init_rwf;
  HyperParams init_rff;
  HyperParams init_exact;
  ObjectiveOptions objective;
  int exact_opt_subset = 800;  // rows used for exact-GP hyperparameter search
  int threads = 1;
  std::uint64_t seed = 42;
};

// The dataset for one repeat, normalized.
Dataset make_dataset(const DatasetSpec& spec, int repeat);

// A fitted model of any method, with the normalization it was trained under.
struct TrainedModel {
  Method method = Method::Rwf;
  std::optional<FeatureRegressor> regressor;  // rwf / rff
  std::optional<ExactGpModel> exact;
  HyperParams hyper;
  NormStats stats;
  double log_marginal = 0.0;
  OptResult opt;
  double opt_seconds = 0.0;
  double fit_seconds = 0.0;

  int dim() const { return static_cast<int>(stats.x_mean.size()); }
  // Predictive moments in normalized units for normalized inputs.
  PredictiveDistribution predict_normalized(const Eigen::MatrixXd& Xn, int workers = 1) const;
  // Raw inputs in, raw-unit moments out.
  PredictiveDistribution predict(const Eigen::MatrixXd& X, int workers = 1) const;
};

// Hyperparameter search and final fit on the (normalized) training split.
TrainedModel train_model(const BenchConfig& config, Method method, const Dataset& data,
                         std::uint64_t seed);

// Optimizes, fits and scores one method on one prepared dataset.
MetricsBundle run_method(const BenchConfig& config, Method method, const Dataset& data, int repeat);

// One MetricsBundle per (repeat, method), repeat-major.
std::vector<MetricsBundle> run_benchmark(const BenchConfig& config);

struct Aggregate {
  std::string method;
  int num_features = 0;
  int count = 0;
  double rmse_mean = 0.0, rmse_std = 0.0;
  double rmse_standardized_mean = 0.0, rmse_standardized_std = 0.0;
  double crps_mean = 0.0, crps_std = 0.0;
  double nll_mean = 0.0, nll_std = 0.0;
  double fit_seconds_mean = 0.0;
};

// Mean and sample std (n - 1) per (method, D), in first-seen order.
std::vector<Aggregate> aggregate(const std::vector<MetricsBundle>& rows);

// run_benchmark for each D; rows carry their D in num_features.
std::vector<MetricsBundle> sweep(const BenchConfig& config, const std::vector<int>& feature_counts);

struct TimingRow {
  int n = 0;
  int num_features = 0;
  double fit_seconds = 0.0;  // median of 3
};

struct TimingTable {
  std::vector<TimingRow> rows;
  double slope = 0.0;  // least-squares d(seconds)/d(x) over the varied axis
};

// Fit time (featurize + posterior) of an RWF model at fixed D for each N.
TimingTable timing_scaling(const std::vector<int>& ns, int num_features, std::uint64_t seed,
                           int threads = 1);
// Same at fixed N for each D.
TimingTable timing_scaling_features(int n, const std::vector<int>& feature_counts,
                                    std::uint64_t seed, int threads = 1);

}  // namespace rwf
