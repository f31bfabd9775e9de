#include "rwf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "rwf/errors.hpp"
#include "rwf/rng.hpp"

namespace rwf {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double parse_cell(const std::string& cell, const std::string& path, int row, int col) {
  const char* begin = cell.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || (end && *end != '\0') || !std::isfinite(v)) {
    throw DataError(path + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                    ": cannot parse '" + cell + "' as a finite number");
  }
  return v;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

NormStats NormStats::identity(int dim) {
  NormStats s;
  s.x_mean = Eigen::VectorXd::Zero(dim);
  s.x_std = Eigen::VectorXd::Ones(dim);
  return s;
}

double step_signal(double x, const std::vector<double>& centers, const std::vector<double>& heights) {
  if (centers.size() != heights.size()) throw ArgumentError("step_signal: size mismatch");
  double f = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (x >= centers[k]) f += heights[k];
  }
  return f;
}

MultistepShape multistep_shape(int n_steps) {
  if (n_steps < 1) throw ArgumentError("multistep: n_steps must be >= 1");
  MultistepShape shape;
  const int n = n_steps;
  // Unit heights give levels 0, 1, 0, 1, ... on n + 1 equal-width pieces.
  std::vector<double> levels(n + 1);
  double level = 0.0;
  for (int k = 0; k <= n; ++k) {
    levels[k] = level;
    level += (k % 2 == 0) ? 1.0 : -1.0;
  }
  const double m = mean_of(levels);
  double var = 0.0;
  for (double l : levels) var += (l - m) * (l - m);
  var /= static_cast<double>(n + 1);
  const double h = 1.0 / std::sqrt(var);
  for (int k = 1; k <= n; ++k) {
    shape.centers.push_back(-1.0 + 2.0 * k / (n + 1));
    shape.heights.push_back(k % 2 == 1 ? h : -h);
  }
  return shape;
}

Dataset gen_multistep(int n_train, int n_test, int n_steps, double noise_sd, std::uint64_t seed) {
  if (n_train < 1 || n_test < 0) throw ArgumentError("gen_multistep: bad sizes");
  if (!(noise_sd >= 0.0)) throw ArgumentError("gen_multistep: noise_sd must be >= 0");
  const MultistepShape shape = multistep_shape(n_steps);
  auto draw = [&](int index, double& x, double& y) {
    CounterStream xs(seed, stream::kDataInputs, static_cast<std::uint64_t>(index));
    CounterStream ns(seed, stream::kDataNoise, static_cast<std::uint64_t>(index));
    x = -1.0 + 2.0 * xs.uniform();
    y = step_signal(x, shape.centers, shape.heights) + noise_sd * ns.normal();
  };
  Dataset ds;
  ds.X_train.resize(n_train, 1);
  ds.y_train.resize(n_train);
  ds.X_test.resize(n_test, 1);
  ds.y_test.resize(n_test);
  for (int i = 0; i < n_train; ++i) draw(i, ds.X_train(i, 0), ds.y_train[i]);
  for (int i = 0; i < n_test; ++i) draw(n_train + i, ds.X_test(i, 0), ds.y_test[i]);
  ds.stats = NormStats::identity(1);
  return ds;
}

Eigen::MatrixXd read_csv_matrix(const std::string& path, int expected_cols,
                                std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> names = split_commas(line);
  const int cols = static_cast<int>(names.size());
  if (expected_cols >= 0 && cols != expected_cols) {
    throw DataError(path + ": expected " + std::to_string(expected_cols) + " columns, header has " +
                    std::to_string(cols));
  }
  if (header) *header = names;
  std::vector<double> values;
  int rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::vector<std::string> cells = split_commas(line);
    if (static_cast<int>(cells.size()) != cols) {
      throw DataError(path + ": row " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " columns, expected " + std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) values.push_back(parse_cell(cells[c], path, line_no, c + 1));
    ++rows;
  }
  Eigen::MatrixXd M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) M(r, c) = values[static_cast<std::size_t>(r) * cols + c];
  }
  return M;
}

Dataset load_csv(const std::string& path, std::uint64_t split_seed, double test_fraction) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in [0, 1)");
  }
  const Eigen::MatrixXd M = read_csv_matrix(path);
  if (M.cols() < 2) throw DataError(path + ": need at least one input column and a target");
  const int n = static_cast<int>(M.rows());
  if (n < 1) throw DataError(path + ": no data rows");
  int n_test = static_cast<int>(std::lround(test_fraction * n));
  n_test = std::clamp(n_test, 0, n - 1);

  // Seeded permutation: sort rows by an independent uniform key.
  std::vector<std::pair<double, int>> keys(n);
  for (int i = 0; i < n; ++i) {
    CounterStream rng(split_seed, stream::kSplit, static_cast<std::uint64_t>(i));
    keys[i] = {rng.uniform(), i};
  }
  std::sort(keys.begin(), keys.end());

  const int d = static_cast<int>(M.cols()) - 1;
  Dataset ds;
  ds.X_train.resize(n - n_test, d);
  ds.y_train.resize(n - n_test);
  ds.X_test.resize(n_test, d);
  ds.y_test.resize(n_test);
  for (int r = 0; r < n; ++r) {
    const int src = keys[r].second;
    if (r < n_test) {
      ds.X_test.row(r) = M.row(src).head(d);
      ds.y_test[r] = M(src, d);
    } else {
      ds.X_train.row(r - n_test) = M.row(src).head(d);
      ds.y_train[r - n_test] = M(src, d);
    }
  }
  ds.stats = NormStats::identity(d);
  return ds;
}

Dataset normalize(const Dataset& ds) {
  if (ds.normalized) return ds;
  const Eigen::Index n = ds.X_train.rows();
  if (n < 1) throw DataError("normalize: empty training set");
  NormStats st;
  st.x_mean = ds.X_train.colwise().mean().transpose();
  st.x_std.resize(ds.X_train.cols());
  for (Eigen::Index c = 0; c < ds.X_train.cols(); ++c) {
    const double sd =
        n > 1 ? std::sqrt((ds.X_train.col(c).array() - st.x_mean[c]).square().sum() / (n - 1)) : 0.0;
    if (!(sd > 0.0)) {
      std::cerr << "warning: input column " << c + 1 << " is constant; using std 1\n";
      st.x_std[c] = 1.0;
    } else {
      st.x_std[c] = sd;
    }
  }
  st.y_mean = ds.y_train.mean();
  const double ysd =
      n > 1 ? std::sqrt((ds.y_train.array() - st.y_mean).square().sum() / (n - 1)) : 0.0;
  if (!(ysd > 0.0)) {
    std::cerr << "warning: target column is constant; using std 1\n";
    st.y_std = 1.0;
  } else {
    st.y_std = ysd;
  }
  Dataset out;
  out.stats = st;
  out.normalized = true;
  out.X_train = normalize_inputs(st, ds.X_train);
  out.X_test = normalize_inputs(st, ds.X_test);
  out.y_train = (ds.y_train.array() - st.y_mean) / st.y_std;
  out.y_test = (ds.y_test.array() - st.y_mean) / st.y_std;
  return out;
}

Eigen::MatrixXd normalize_inputs(const NormStats& stats, const Eigen::MatrixXd& X) {
  if (X.cols() != stats.x_mean.size()) throw DataError("normalize_inputs: dimension mismatch");
  Eigen::MatrixXd out = X;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    out.col(c) = (X.col(c).array() - stats.x_mean[c]) / stats.x_std[c];
  }
  return out;
}

PredictiveDistribution denormalize(const NormStats& stats, const PredictiveDistribution& pred) {
  PredictiveDistribution out;
  out.mean = (pred.mean.array() * stats.y_std + stats.y_mean).matrix();
  out.variance = pred.variance * (stats.y_std * stats.y_std);
  return out;
}

Eigen::VectorXd denormalize_targets(const NormStats& stats, const Eigen::VectorXd& y) {
  return (y.array() * stats.y_std + stats.y_mean).matrix();
}

double rmse(const Eigen::VectorXd& mean, const Eigen::VectorXd& y) {
  if (mean.size() != y.size()) throw ArgumentError("rmse: length mismatch");
  if (y.size() == 0) throw ArgumentError("rmse: empty input");
  return std::sqrt((mean - y).squaredNorm() / static_cast<double>(y.size()));
}

namespace {

void check_pred(const PredictiveDistribution& pred, const Eigen::VectorXd& y, const char* what) {
  if (pred.mean.size() != y.size() || pred.variance.size() != y.size()) {
    throw ArgumentError(std::string(what) + ": length mismatch");
  }
  if (y.size() == 0) throw ArgumentError(std::string(what) + ": empty input");
  if (!(pred.variance.array() > 0.0).all()) {
    throw ArgumentError(std::string(what) + ": predictive variances must be positive");
  }
}

}  // namespace

double nll(const PredictiveDistribution& pred, const Eigen::VectorXd& y) {
  check_pred(pred, y, "nll");
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double r = y[i] - pred.mean[i];
    total += 0.5 * (log2pi + std::log(pred.variance[i])) + r * r / (2.0 * pred.variance[i]);
  }
  return total / static_cast<double>(y.size());
}

double crps(const PredictiveDistribution& pred, const Eigen::VectorXd& y) {
  check_pred(pred, y, "crps");
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sd = std::sqrt(pred.variance[i]);
    const double z = (y[i] - pred.mean[i]) / sd;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * z * z);
    total += sd * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - inv_sqrt_pi);
  }
  return total / static_cast<double>(y.size());
}

Dataset make_dataset(const DatasetSpec& spec, int repeat) {
  const std::uint64_t seed = mix_seed(spec.seed, static_cast<std::uint64_t>(repeat));
  if (spec.kind == "multistep") {
    return normalize(gen_multistep(spec.n_train, spec.n_test, spec.n_steps, spec.noise_sd, seed));
  }
  if (spec.kind == "csv") {
    if (spec.path.empty()) throw ConfigError("dataset.path is required for kind \"csv\"");
    return normalize(load_csv(spec.path, seed, spec.test_fraction));
  }
  throw ConfigError("dataset.kind must be \"multistep\" or \"csv\", got \"" + spec.kind + "\"");
}

PredictiveDistribution TrainedModel::predict_normalized(const Eigen::MatrixXd& Xn,
                                                       int workers) const {
  if (Xn.cols() != dim()) {
    throw DataError("predict: inputs have " + std::to_string(Xn.cols()) +
                    " columns, the model expects " + std::to_string(dim()));
  }
  if (regressor) return regressor->predict(Xn, workers);
  if (exact) return exact_gp_predict(*exact, Xn);
  throw ArgumentError("predict: empty model");
}

PredictiveDistribution TrainedModel::predict(const Eigen::MatrixXd& X, int workers) const {
  if (X.cols() != dim()) {
    throw DataError("predict: inputs have " + std::to_string(X.cols()) +
                    " columns, the model expects " + std::to_string(dim()));
  }
  return denormalize(stats, predict_normalized(normalize_inputs(stats, X), workers));
}

TrainedModel train_model(const BenchConfig& config, Method method, const Dataset& data,
                         std::uint64_t seed) {
  TrainedModel tm;
  tm.method = method;
  tm.stats = data.stats;
  const int d = data.dim();
  ObjectiveOptions oopts = config.objective;
  oopts.workers = config.threads;

  if (method == Method::Exact) {
    const Eigen::Index sub = std::min<Eigen::Index>(config.exact_opt_subset, data.X_train.rows());
    auto t0 = std::chrono::steady_clock::now();
    const Objective obj = Objective::exact(data.X_train.topRows(sub), data.y_train.head(sub));
    tm.opt = optimize(obj, config.init_exact, config.budget, seed);
    tm.opt_seconds = seconds_since(t0);
    tm.hyper = tm.opt.best;
    t0 = std::chrono::steady_clock::now();
    const double g = tm.hyper.gamma();
    tm.exact = exact_gp_fit(data.X_train, data.y_train, tm.hyper.lengthscale(), g * g,
                            tm.hyper.sigma2());
    tm.fit_seconds = seconds_since(t0);
    tm.log_marginal = exact_gp_log_marginal(*tm.exact, data.y_train);
    return tm;
  }

  const int D = config.num_features;
  if (D < 1) throw ConfigError("D must be >= 1");
  auto t0 = std::chrono::steady_clock::now();
  std::optional<Objective> obj;
  HyperParams init;
  if (method == Method::Rwf) {
    init = config.init_rwf;
    const MotherWavelet w = MotherWavelet::make(config.family, d);
    const double pad = oopts.pad_factor >= 0.0 ? oopts.pad_factor : w.radius();
    const SamplingDistribution dist =
        SamplingDistribution::around_data(data.X_train, init.s_min(), init.s_max(), pad);
    obj = Objective::rwf(FeatureMap::sample_rwf(w, dist, D, seed), data.X_train, data.y_train,
                         oopts);
  } else {
    init = config.init_rff;
    obj = Objective::rff(FeatureMap::sample_rff(init.lengthscale(), d, D, seed), data.X_train,
                         data.y_train, oopts);
  }
  tm.opt = optimize(*obj, init, config.budget, seed);
  tm.opt_seconds = seconds_since(t0);
  tm.hyper = tm.opt.best;
  tm.log_marginal = tm.opt.best_objective;
  const FeatureMap map = obj->map_for(tm.hyper);
  t0 = std::chrono::steady_clock::now();
  tm.regressor = fit_feature_regressor(map, tm.hyper.gamma(), data.X_train, data.y_train,
                                       tm.hyper.sigma2(), config.threads);
  tm.fit_seconds = seconds_since(t0);
  return tm;
}

MetricsBundle run_method(const BenchConfig& config, Method method, const Dataset& data, int repeat) {
  const std::uint64_t seed = mix_seed(config.seed, static_cast<std::uint64_t>(repeat));
  MetricsBundle m;
  m.method = std::string(method_name(method));
  m.repeat = repeat;
  m.seed = seed;
  m.num_features = method == Method::Exact ? 0 : config.num_features;
  m.n_train = static_cast<int>(data.X_train.rows());
  m.n_test = static_cast<int>(data.X_test.rows());
  const TrainedModel tm = train_model(config, method, data, seed);
  m.hyper = tm.hyper;
  m.log_marginal = tm.log_marginal;
  m.opt_seconds = tm.opt_seconds;
  m.fit_seconds = tm.fit_seconds;
  if (data.X_test.rows() > 0) {
    const auto t0 = std::chrono::steady_clock::now();
    const PredictiveDistribution pred = tm.predict_normalized(data.X_test, config.threads);
    m.predict_seconds = seconds_since(t0);
    m.rmse_standardized = rmse(pred.mean, data.y_test);
    const PredictiveDistribution raw = denormalize(data.stats, pred);
    const Eigen::VectorXd y_raw = denormalize_targets(data.stats, data.y_test);
    m.rmse = rmse(raw.mean, y_raw);
    m.crps = crps(raw, y_raw);
    m.nll = nll(raw, y_raw);
  }
  return m;
}

std::vector<MetricsBundle> run_benchmark(const BenchConfig& config) {
  if (config.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (config.methods.empty()) throw ConfigError("methods must name at least one method");
  if (config.num_features < 1) throw ConfigError("D must be >= 1");
  const std::size_t n_methods = config.methods.size();
  std::vector<MetricsBundle> rows(static_cast<std::size_t>(config.repeats) * n_methods);
  auto run_repeat = [&](const BenchConfig& c, int r) {
    const Dataset data = make_dataset(c.dataset, r);
    for (std::size_t k = 0; k < n_methods; ++k) {
      rows[static_cast<std::size_t>(r) * n_methods + k] = run_method(c, c.methods[k], data, r);
    }
  };
  const int pool = std::min(config.threads, config.repeats);
  if (pool <= 1) {
    for (int r = 0; r < config.repeats; ++r) run_repeat(config, r);
    return rows;
  }
  // Repeats in parallel, one worker each; results do not depend on the split.
  BenchConfig single = config;
  single.threads = 1;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.repeats));
  std::vector<std::thread> threads;
  for (int t = 0; t < pool; ++t) {
    threads.emplace_back([&, t] {
      for (int r = t; r < config.repeats; r += pool) {
        try {
          run_repeat(single, r);
        } catch (...) {
          errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<Aggregate> aggregate(const std::vector<MetricsBundle>& rows) {
  std::vector<Aggregate> out;
  std::vector<std::vector<const MetricsBundle*>> groups;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Aggregate& a) {
      return a.method == row.method && a.num_features == row.num_features;
    });
    if (it == out.end()) {
      Aggregate a;
      a.method = row.method;
      a.num_features = row.num_features;
      out.push_back(a);
      groups.emplace_back();
      it = out.end() - 1;
    }
    groups[static_cast<std::size_t>(it - out.begin())].push_back(&row);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    std::vector<double> r, rs, c, n, t;
    for (const MetricsBundle* m : groups[g]) {
      r.push_back(m->rmse);
      rs.push_back(m->rmse_standardized);
      c.push_back(m->crps);
      n.push_back(m->nll);
      t.push_back(m->fit_seconds);
    }
    Aggregate& a = out[g];
    a.count = static_cast<int>(r.size());
    a.rmse_mean = mean_of(r);
    a.rmse_std = sample_std(r);
    a.rmse_standardized_mean = mean_of(rs);
    a.rmse_standardized_std = sample_std(rs);
    a.crps_mean = mean_of(c);
    a.crps_std = sample_std(c);
    a.nll_mean = mean_of(n);
    a.nll_std = sample_std(n);
    a.fit_seconds_mean = mean_of(t);
  }
  return out;
}

std::vector<MetricsBundle> sweep(const BenchConfig& config, const std::vector<int>& feature_counts) {
  if (feature_counts.empty()) throw ConfigError("sweep: empty feature-count list");
  std::vector<MetricsBundle> rows;
  for (int D : feature_counts) {
    BenchConfig c = config;
    c.num_features = D;
    c.methods.erase(std::remove(c.methods.begin(), c.methods.end(), Method::Exact), c.methods.end());
    if (c.methods.empty()) throw ConfigError("sweep: needs rwf and/or rff");
    for (auto& row : run_benchmark(c)) rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double time_fit(const FeatureMap& map, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                int threads) {
  std::vector<double> t;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const FeatureRegressor reg = fit_feature_regressor(map, 2.0, X, y, 0.01, threads);
    t.push_back(seconds_since(t0));
    if (!std::isfinite(reg.posterior.mean.sum())) throw NumericalError("timing fit diverged");
  }
  return median3(t);
}

FeatureMap timing_map(const Eigen::MatrixXd& X, int D, std::uint64_t seed) {
  const MotherWavelet w = MotherWavelet::mexican_hat(1);
  return FeatureMap::sample_rwf(w, SamplingDistribution::around_data(X, 0.01, 0.5, 1.0), D, seed);
}

}  // namespace

TimingTable timing_scaling(const std::vector<int>& ns, int num_features, std::uint64_t seed,
                           int threads) {
  TimingTable table;
  std::vector<double> xs, ts;
  for (int n : ns) {
    if (n < 1) throw ArgumentError("timing_scaling: N must be >= 1");
    const Dataset ds = gen_multistep(n, 0, 5, 0.05, seed);
    const FeatureMap map = timing_map(ds.X_train, num_features, seed);
    const double sec = time_fit(map, ds.X_train, ds.y_train, threads);
    table.rows.push_back({n, num_features, sec});
    xs.push_back(n);
    ts.push_back(sec);
  }
  table.slope = ls_slope(xs, ts);
  return table;
}

TimingTable timing_scaling_features(int n, const std::vector<int>& feature_counts,
                                    std::uint64_t seed, int threads) {
  TimingTable table;
  std::vector<double> xs, ts;
  const Dataset ds = gen_multistep(n, 0, 5, 0.05, seed);
  for (int D : feature_counts) {
    if (D < 1) throw ArgumentError("timing_scaling: D must be >= 1");
    const FeatureMap map = timing_map(ds.X_train, D, seed);
    const double sec = time_fit(map, ds.X_train, ds.y_train, threads);
    table.rows.push_back({n, D, sec});
    xs.push_back(D);
    ts.push_back(sec);
  }
  table.slope = ls_slope(xs, ts);
  return table;
}

}  // namespace rwf
