#include "rwf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rwf/errors.hpp"
#include "rwf/kernel_oracle.hpp"
#include "rwf/quadrature.hpp"
#include "rwf/rng.hpp"

namespace rwf {

namespace {

std::span<const double> row_span(const Eigen::MatrixXd& M, Eigen::Index r, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(M.cols()));
  for (Eigen::Index c = 0; c < M.cols(); ++c) buf[static_cast<std::size_t>(c)] = M(r, c);
  return buf;
}

double oracle_at(const MotherWavelet& w, const SamplingDistribution& dist, const Eigen::MatrixXd& X,
                 Eigen::Index i, const Eigen::MatrixXd& Y, Eigen::Index j) {
  std::vector<double> a, b;
  return wavelet_kernel(w, dist, row_span(X, i, a), row_span(Y, j, b));
}

std::vector<double> oracle_pairs(const MotherWavelet& w, const SamplingDistribution& dist,
                                 const ProbePairs& probes) {
  std::vector<double> out(probes.size());
  for (int p = 0; p < probes.size(); ++p) out[p] = oracle_at(w, dist, probes.x, p, probes.y, p);
  return out;
}

// R x P matrix of kernel estimates, one row per independent map.
Eigen::MatrixXd estimates(const MotherWavelet& w, const SamplingDistribution& dist,
                          const ProbePairs& probes, int D, int R, std::uint64_t seed,
                          bool wrong_scale_density) {
  const int P = probes.size();
  const int d = w.dim();
  Eigen::MatrixXd out(R, P);
  for (int r = 0; r < R; ++r) {
    const std::uint64_t sr = mix_seed(seed, static_cast<std::uint64_t>(r));
    if (!wrong_scale_density) {
      const FeatureMap map = FeatureMap::sample_rwf(w, dist, D, sr);
      const Eigen::MatrixXd Zx = featurize(map, probes.x);
      const Eigen::MatrixXd Zy = featurize(map, probes.y);
      for (int p = 0; p < P; ++p) {
        double sum = 0.0;
        for (int i = 0; i < D; ++i) sum += Zx(p, i) * Zy(p, i);
        out(r, p) = sum;
      }
      continue;
    }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(P);
    std::vector<double> t(d), xv(d), yv(d);
    for (int i = 0; i < D; ++i) {
      CounterStream rng(sr, stream::kRwfFeatures, static_cast<std::uint64_t>(i));
      const double s = dist.s_min + rng.uniform() * (dist.s_max - dist.s_min);
      for (int k = 0; k < d; ++k) t[k] = shift_from_draw(rng.uniform(), dist.lower[k], dist.upper[k]);
      for (int p = 0; p < P; ++p) {
        for (int k = 0; k < d; ++k) {
          xv[k] = probes.x(p, k);
          yv[k] = probes.y(p, k);
        }
        acc[p] += eval_atom(w, s, t, xv) * eval_atom(w, s, t, yv);
      }
    }
    out.row(r) = acc.transpose() / static_cast<double>(D);
  }
  return out;
}

void check_probes(const MotherWavelet& w, const ProbePairs& probes) {
  if (probes.size() < 1 || probes.x.rows() != probes.y.rows()) {
    throw ArgumentError("verify: need at least one probe pair");
  }
  if (probes.x.cols() != w.dim() || probes.y.cols() != w.dim()) {
    throw ArgumentError("verify: probe dimension does not match the wavelet");
  }
}

nlohmann::json pairs_json(const ProbePairs& probes) {
  nlohmann::json out = nlohmann::json::array();
  for (int p = 0; p < probes.size(); ++p) {
    nlohmann::json x = nlohmann::json::array(), y = nlohmann::json::array();
    for (Eigen::Index k = 0; k < probes.x.cols(); ++k) {
      x.push_back(probes.x(p, k));
      y.push_back(probes.y(p, k));
    }
    out.push_back({{"x", x}, {"y", y}});
  }
  return out;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

CheckReport finish(CheckReport r) {
  r.passed = r.recompute_passed();
  return r;
}

}  // namespace

nlohmann::json to_json(const CheckReport& report) {
  return {{"name", report.name},
          {"passed", report.passed},
          {"statistic", report.statistic},
          {"threshold", report.threshold},
          {"direction", report.direction == Direction::AtMost ? "at_most" : "at_least"},
          {"negative_control", report.negative_control},
          {"details", report.details}};
}

ProbePairs random_probe_pairs(const SamplingDistribution& dist, int n, std::uint64_t seed) {
  dist.validate();
  const int d = dist.dim();
  ProbePairs probes;
  probes.x.resize(n, d);
  probes.y.resize(n, d);
  for (int p = 0; p < n; ++p) {
    CounterStream rng(seed, stream::kProbe, static_cast<std::uint64_t>(p));
    for (int k = 0; k < d; ++k) probes.x(p, k) = shift_from_draw(rng.uniform(), dist.lower[k], dist.upper[k]);
    for (int k = 0; k < d; ++k) probes.y(p, k) = shift_from_draw(rng.uniform(), dist.lower[k], dist.upper[k]);
  }
  return probes;
}

CheckReport check_unbiasedness(const MotherWavelet& w, const SamplingDistribution& dist,
                               const ProbePairs& probes, int D, int R, std::uint64_t seed,
                               bool wrong_scale_density) {
  check_probes(w, probes);
  if (D < 1 || R < 2) throw ArgumentError("check_unbiasedness: need D >= 1 and R >= 2");
  const std::vector<double> oracle = oracle_pairs(w, dist, probes);
  const Eigen::MatrixXd est = estimates(w, dist, probes, D, R, seed, wrong_scale_density);
  CheckReport rep;
  rep.name = wrong_scale_density ? "unbiasedness_control" : "unbiasedness";
  rep.negative_control = wrong_scale_density;
  rep.threshold = 1.0;
  rep.statistic = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (int p = 0; p < probes.size(); ++p) {
    const double mean = est.col(p).mean();
    const double var = (est.col(p).array() - mean).square().sum() / (R - 1);
    const double se = std::sqrt(var / R);
    const double band = 4.0 * se + 1e-9;
    const double z = std::abs(mean - oracle[p]) / band;
    rep.statistic = std::max(rep.statistic, z);
    rows.push_back({{"oracle", oracle[p]}, {"mean", mean}, {"std_error", se}, {"normalized_gap", z}});
  }
  rep.details = {{"D", D}, {"R", R}, {"seed", seed}, {"probes", pairs_json(probes)},
                 {"pairs", rows}, {"family", family_name(w.family())},
                 {"scale_density", wrong_scale_density ? "uniform" : "log_uniform"}};
  return finish(rep);
}

std::vector<double> estimator_variances(const MotherWavelet& w, const SamplingDistribution& dist,
                                        const ProbePairs& probes, int D, int R,
                                        std::uint64_t seed) {
  check_probes(w, probes);
  if (D < 1 || R < 2) throw ArgumentError("estimator_variances: need D >= 1 and R >= 2");
  const Eigen::MatrixXd est = estimates(w, dist, probes, D, R, seed, false);
  std::vector<double> out(probes.size());
  for (int p = 0; p < probes.size(); ++p) {
    const double mean = est.col(p).mean();
    out[p] = (est.col(p).array() - mean).square().sum() / (R - 1);
  }
  return out;
}

CheckReport check_variance_bound(const MotherWavelet& w, const SamplingDistribution& dist,
                                 const ProbePairs& probes, int D, int R, std::uint64_t seed) {
  const std::vector<double> var = estimator_variances(w, dist, probes, D, R, seed);
  const double B = constants(w, dist.s_min).feature_bound;
  const double bound = B * B / D * (1.0 + 5.0 / std::sqrt(static_cast<double>(R)));
  CheckReport rep;
  rep.name = "variance_bound";
  rep.threshold = 1.0;
  rep.statistic = *std::max_element(var.begin(), var.end()) / bound;
  rep.details = {{"D", D}, {"R", R}, {"seed", seed}, {"B", B}, {"bound", bound},
                 {"box_volume", dist.box_volume()}, {"variances", var},
                 {"probes", pairs_json(probes)}};
  return finish(rep);
}

CheckReport check_positive_definite(const MotherWavelet& w, const SamplingDistribution& dist,
                                    int n_points, int n_sets, std::uint64_t seed,
                                    double diagonal_shift) {
  if (n_points < 1 || n_sets < 1) throw ArgumentError("check_positive_definite: bad sizes");
  dist.validate();
  const int d = w.dim();
  const PairwiseKernel k = [&](std::span<const double> a, std::span<const double> b) {
    return wavelet_kernel(w, dist, a, b);
  };
  double worst_oracle = std::numeric_limits<double>::infinity();
  double worst_feature = std::numeric_limits<double>::infinity();
  for (int set = 0; set < n_sets; ++set) {
    const std::uint64_t ss = mix_seed(seed, static_cast<std::uint64_t>(set));
    Eigen::MatrixXd X(n_points, d);
    for (int i = 0; i < n_points; ++i) {
      CounterStream rng(ss, stream::kProbe, static_cast<std::uint64_t>(i));
      for (int c = 0; c < d; ++c) X(i, c) = shift_from_draw(rng.uniform(), dist.lower[c], dist.upper[c]);
    }
    Eigen::MatrixXd G = gram(k, X);
    G.diagonal().array() -= diagonal_shift;
    const double lmax = max_eigenvalue(G);
    worst_oracle = std::min(worst_oracle, min_eigenvalue(G) / std::abs(lmax));
    const Eigen::MatrixXd Z = featurize(FeatureMap::sample_rwf(w, dist, 64, ss), X);
    const Eigen::MatrixXd F = Z * Z.transpose();
    const double fmax = max_eigenvalue(F);
    if (fmax > 0.0) worst_feature = std::min(worst_feature, min_eigenvalue(F) / fmax);
  }
  CheckReport rep;
  rep.name = diagonal_shift != 0.0 ? "positive_definite_control" : "positive_definite";
  rep.negative_control = diagonal_shift != 0.0;
  rep.threshold = 1.0;
  rep.statistic = std::max(-worst_oracle / 1e-8, -worst_feature / 1e-10);
  rep.details = {{"n_points", n_points}, {"n_sets", n_sets}, {"seed", seed},
                 {"min_ratio_oracle", worst_oracle}, {"min_ratio_features", worst_feature},
                 {"diagonal_shift", diagonal_shift}, {"family", family_name(w.family())}};
  return finish(rep);
}

UniformErrorTable empirical_uniform_error(const MotherWavelet& w, const SamplingDistribution& dist,
                                          const Eigen::MatrixXd& grid,
                                          const std::vector<int>& feature_counts, int R,
                                          std::uint64_t seed) {
  if (grid.rows() < 1 || grid.cols() != w.dim()) throw ArgumentError("uniform error: bad grid");
  if (feature_counts.empty() || R < 1) throw ArgumentError("uniform error: bad D list or R");
  const Eigen::Index G = grid.rows();
  Eigen::MatrixXd K(G, G);
  for (Eigen::Index i = 0; i < G; ++i) {
    for (Eigen::Index j = i; j < G; ++j) {
      K(i, j) = oracle_at(w, dist, grid, i, grid, j);
      K(j, i) = K(i, j);
    }
  }
  UniformErrorTable table;
  for (Eigen::Index i = 0; i < G; ++i) {
    for (Eigen::Index j = 0; j < G; ++j) {
      table.grid_diameter = std::max(table.grid_diameter, (grid.row(i) - grid.row(j)).norm());
    }
  }
  std::vector<double> lx, ly;
  for (int D : feature_counts) {
    double total = 0.0, worst = 0.0;
    for (int r = 0; r < R; ++r) {
      const std::uint64_t sr = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(D)),
                                        static_cast<std::uint64_t>(r));
      const Eigen::MatrixXd Z = featurize(FeatureMap::sample_rwf(w, dist, D, sr), grid);
      const double err = (Z * Z.transpose() - K).cwiseAbs().maxCoeff();
      total += err;
      worst = std::max(worst, err);
    }
    table.feature_counts.push_back(D);
    table.mean_sup_error.push_back(total / R);
    table.max_sup_error.push_back(worst);
    lx.push_back(std::log(static_cast<double>(D)));
    ly.push_back(std::log(total / R));
  }
  table.slope = feature_counts.size() > 1 ? ls_slope(lx, ly) : 0.0;
  return table;
}

CheckReport check_uniform_convergence(const MotherWavelet& w, const SamplingDistribution& dist,
                                      const Eigen::MatrixXd& grid,
                                      const std::vector<int>& feature_counts, int R,
                                      std::uint64_t seed) {
  if (feature_counts.size() < 2) throw ArgumentError("uniform convergence: need >= 2 values of D");
  const UniformErrorTable t = empirical_uniform_error(w, dist, grid, feature_counts, R, seed);
  const double B = constants(w, dist.s_min).feature_bound;
  CheckReport rep;
  rep.name = "uniform_convergence";
  rep.threshold = 0.2;
  rep.statistic = std::abs(t.slope + 0.5);
  rep.details = {{"slope", t.slope}, {"feature_counts", t.feature_counts},
                 {"mean_sup_error", t.mean_sup_error}, {"max_sup_error", t.max_sup_error},
                 {"two_B_squared", 2.0 * B * B}, {"grid_points", grid.rows()},
                 {"grid_diameter", t.grid_diameter}, {"R", R}, {"seed", seed}};
  return finish(rep);
}

long long sample_complexity(double B, int d, double diam, double L_z, double eps, double delta) {
  if (!(eps > 0.0)) throw ArgumentError("sample_complexity: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("sample_complexity: delta must lie in (0, 1)");
  if (!(B > 0.0) || d < 1 || !(diam >= 0.0) || !(L_z >= 0.0)) {
    throw ArgumentError("sample_complexity: need B > 0, d >= 1, diam >= 0, L_z >= 0");
  }
  const double arg = 4.0 * diam * L_z / eps;
  const double cover = arg > 1.0 ? std::log(arg) : 0.0;
  const double D = 8.0 * B * B / (eps * eps) * (2.0 * d * cover + std::log(2.0 / delta));
  return static_cast<long long>(std::ceil(D));
}

CheckReport check_stationarity(const MotherWavelet& w, double s_min, double s_max,
                               double large_half_width, double tight_lower, double tight_upper,
                               const ProbePairs& probes, double shift) {
  if (w.dim() != 1) throw UnsupportedError("check_stationarity: d = 1 only");
  check_probes(w, probes);
  SamplingDistribution large;
  large.s_min = s_min;
  large.s_max = s_max;
  large.lower = Eigen::VectorXd::Constant(1, -large_half_width);
  large.upper = Eigen::VectorXd::Constant(1, large_half_width);
  SamplingDistribution tight = large;
  tight.lower[0] = tight_lower;
  tight.upper[0] = tight_upper;

  auto diff = [&](const SamplingDistribution& dist, int p) {
    const double x[1] = {probes.x(p, 0)}, y[1] = {probes.y(p, 0)};
    const double xs[1] = {x[0] + shift}, ys[1] = {y[0] + shift};
    return std::abs(wavelet_kernel(w, dist, xs, ys) - wavelet_kernel(w, dist, x, y));
  };
  double large_max = 0.0, tight_max = 0.0;
  std::vector<double> large_d, tight_d;
  for (int p = 0; p < probes.size(); ++p) {
    large_d.push_back(diff(large, p));
    tight_d.push_back(diff(tight, p));
    large_max = std::max(large_max, large_d.back());
    tight_max = std::max(tight_max, tight_d.back());
  }
  CheckReport rep;
  rep.name = "stationarity";
  rep.threshold = 1.0;
  rep.statistic = std::max(large_max / 1e-6, 1e-3 / std::max(tight_max, 1e-300));
  rep.details = {{"shift", shift}, {"large_box_half_width", large_half_width},
                 {"tight_box", {tight_lower, tight_upper}}, {"large_max_diff", large_max},
                 {"tight_max_diff", tight_max}, {"large_diffs", large_d}, {"tight_diffs", tight_d},
                 {"probes", pairs_json(probes)}};
  return finish(rep);
}

double local_contribution(const MotherWavelet& w, const std::function<double(double)>& p,
                          double p_lower, double p_upper, double x, double s) {
  if (w.dim() != 1) throw UnsupportedError("local_contribution: d = 1 only");
  if (!(s > 0.0)) throw ArgumentError("local_contribution: s must be positive");
  // u ranges over supp(psi) intersected with {u : x - s u in [p_lower, p_upper]}.
  double lo, hi;
  if (w.family() == WaveletFamily::Haar) {
    lo = 0.0;
    hi = 1.0;
  } else {
    lo = -w.radius();
    hi = w.radius();
  }
  lo = std::max(lo, (x - p_upper) / s);
  hi = std::min(hi, (x - p_lower) / s);
  if (!(lo < hi)) return 0.0;
  std::vector<double> cuts{lo, hi};
  if (w.family() == WaveletFamily::Haar && 0.5 > lo && 0.5 < hi) cuts.insert(cuts.begin() + 1, 0.5);
  const int panels = w.family() == WaveletFamily::Haar ? 1 : 64;
  const GaussLegendreRule& rule = gauss_legendre(20);
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double width = (cuts[c + 1] - cuts[c]) / panels;
    for (int k = 0; k < panels; ++k) {
      const double a = cuts[c] + k * width;
      const double half = 0.5 * width, mid = a + half;
      double sum = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double u = mid + half * rule.nodes[j];
        sum += rule.weights[j] * w.value(&u) * p(x - s * u);
      }
      total += half * sum;
    }
  }
  return total;
}

CheckReport check_moment_cancellation(const std::vector<MotherWavelet>& wavelets,
                                      const std::vector<double>& scales, double x) {
  if (wavelets.size() != 2) throw ArgumentError("moment cancellation: expects two wavelets");
  if (scales.size() < 2) throw ArgumentError("moment cancellation: need >= 2 scales");
  const auto p = [](double t) { return std::abs(t) <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0; };
  std::vector<double> orders;
  nlohmann::json per = nlohmann::json::array();
  for (const MotherWavelet& w : wavelets) {
    std::vector<double> ls, lg, g;
    for (double s : scales) {
      g.push_back(local_contribution(w, p, -1.0, 1.0, x, s));
      ls.push_back(std::log(s));
      lg.push_back(std::log(std::abs(g.back())));
    }
    orders.push_back(ls_slope(ls, lg));
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) ratios.push_back(std::abs(g[i] / g[i + 1]));
    per.push_back({{"family", family_name(w.family())}, {"vanishing_moments", w.vanishing_moments()},
                   {"values", g}, {"order", orders.back()}, {"ratios", ratios}});
  }
  CheckReport rep;
  rep.name = "moment_cancellation";
  rep.direction = Direction::AtLeast;
  rep.threshold = 0.5;
  rep.statistic = orders[1] - orders[0];
  rep.details = {{"x", x}, {"scales", scales}, {"density", "0.75 (1 - t^2) on [-1, 1]"},
                 {"wavelets", per}};
  return finish(rep);
}

CheckReport check_localization_bounds(const MotherWavelet& w, const SamplingDistribution& dist,
                                      int n_samples, std::uint64_t seed) {
  dist.validate();
  const int d = w.dim();
  const TheoryConstants tc = constants(w, dist.s_min);
  const bool lipschitz = std::isfinite(tc.atom_lipschitz);
  double sup_ratio = 0.0, lip_ratio = 0.0;
  std::vector<double> t(d), x(d), xp(d);
  for (int i = 0; i < n_samples; ++i) {
    CounterStream rng(seed, stream::kProbe, static_cast<std::uint64_t>(i) + (1ULL << 40));
    const double s = scale_from_draw(rng.uniform(), dist.s_min, dist.s_max);
    for (int k = 0; k < d; ++k) {
      t[k] = shift_from_draw(rng.uniform(), dist.lower[k], dist.upper[k]);
      // Points near the atom most of the time, anywhere in a wider box otherwise.
      x[k] = (i % 4 == 0) ? shift_from_draw(rng.uniform(), dist.lower[k] - 1.0, dist.upper[k] + 1.0)
                          : t[k] + 3.0 * s * rng.normal();
      xp[k] = (i % 2 == 0) ? x[k] + 0.1 * s * rng.normal() : x[k] + s * rng.normal();
    }
    const double v = eval_atom(w, s, t, x);
    sup_ratio = std::max(sup_ratio, std::abs(v) / (tc.feature_bound + 1e-12));
    if (lipschitz) {
      double dist2 = 0.0;
      for (int k = 0; k < d; ++k) dist2 += (x[k] - xp[k]) * (x[k] - xp[k]);
      const double dv = std::abs(v - eval_atom(w, s, t, xp));
      lip_ratio = std::max(lip_ratio, dv / (tc.atom_lipschitz * std::sqrt(dist2) + 1e-12));
    }
  }
  CheckReport rep;
  rep.name = "localization_bounds";
  rep.threshold = 1.0;
  rep.statistic = std::max(sup_ratio, lip_ratio);
  rep.details = {{"n_samples", n_samples}, {"seed", seed}, {"B", tc.feature_bound},
                 {"L_psi", lipschitz ? nlohmann::json(tc.atom_lipschitz) : nlohmann::json("inf")},
                 {"max_sup_ratio", sup_ratio}, {"max_lipschitz_ratio", lip_ratio},
                 {"family", family_name(w.family())}};
  return finish(rep);
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "positive_definite", "unbiasedness",        "variance_bound",     "uniform_convergence",
      "stationarity",      "moment_cancellation", "localization_bounds"};
  return names;
}

const std::vector<std::string>& control_names() {
  static const std::vector<std::string> names{"unbiasedness_control", "positive_definite_control"};
  return names;
}

std::vector<CheckReport> run_suite(const VerifyConfig& cfg, const std::vector<std::string>& only,
                                   bool negative_controls) {
  for (const std::string& name : only) {
    const auto& a = check_names();
    const auto& b = control_names();
    if (std::find(a.begin(), a.end(), name) == a.end() &&
        std::find(b.begin(), b.end(), name) == b.end()) {
      std::string valid;
      for (const auto& n : a) valid += (valid.empty() ? "" : ", ") + n;
      throw ConfigError("unknown check '" + name + "' (valid: " + valid + ")");
    }
  }
  auto selected = [&](const std::string& name) {
    return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
  };
  auto control_selected = [&](const std::string& name) {
    if (negative_controls) return selected(name);
    return std::find(only.begin(), only.end(), name) != only.end();
  };
  const MotherWavelet w = MotherWavelet::make(cfg.family, 1);
  SamplingDistribution dist;
  dist.s_min = cfg.s_min;
  dist.s_max = cfg.s_max;
  dist.lower = Eigen::VectorXd::Constant(1, cfg.lower);
  dist.upper = Eigen::VectorXd::Constant(1, cfg.upper);
  dist.validate();
  const ProbePairs probes = random_probe_pairs(dist, cfg.probe_pairs, cfg.seed);

  std::vector<CheckReport> out;
  if (selected("positive_definite")) {
    out.push_back(check_positive_definite(w, dist, cfg.pd_points, cfg.pd_sets, cfg.seed));
  }
  if (selected("unbiasedness")) {
    out.push_back(check_unbiasedness(w, dist, probes, cfg.unbiased_features, cfg.unbiased_repeats,
                                     cfg.seed));
  }
  if (selected("variance_bound")) {
    out.push_back(check_variance_bound(w, dist, probes, cfg.unbiased_features,
                                       cfg.unbiased_repeats, cfg.seed));
  }
  if (selected("uniform_convergence")) {
    Eigen::MatrixXd grid(cfg.grid_points, 1);
    for (int i = 0; i < cfg.grid_points; ++i) {
      grid(i, 0) = cfg.grid_points == 1
                       ? 0.5 * (cfg.lower + cfg.upper)
                       : cfg.lower + (cfg.upper - cfg.lower) * i / (cfg.grid_points - 1);
    }
    out.push_back(check_uniform_convergence(w, dist, grid, cfg.uniform_features,
                                            cfg.uniform_repeats, cfg.seed));
  }
  if (selected("stationarity")) {
    // Pairs close to the upper edge of the data, moved further out by the shift.
    ProbePairs edge;
    edge.x.resize(5, 1);
    edge.y.resize(5, 1);
    const double span = cfg.upper - cfg.lower;
    const double fx[5] = {0.85, 0.9, 0.8, 0.95, 0.65};
    const double fy[5] = {0.95, 0.9, 0.975, 0.875, 0.75};
    for (int p = 0; p < 5; ++p) {
      edge.x(p, 0) = cfg.lower + fx[p] * span;
      edge.y(p, 0) = cfg.lower + fy[p] * span;
    }
    out.push_back(check_stationarity(w, cfg.s_min, cfg.s_max, cfg.stationarity_half_width,
                                     cfg.lower, cfg.upper, edge, cfg.stationarity_shift));
  }
  if (selected("moment_cancellation")) {
    out.push_back(check_moment_cancellation({MotherWavelet::haar(1), MotherWavelet::mexican_hat(1)},
                                            cfg.moment_scales));
  }
  if (selected("localization_bounds")) {
    out.push_back(check_localization_bounds(w, dist, cfg.localization_samples, cfg.seed));
  }
  if (control_selected("unbiasedness_control")) {
    out.push_back(check_unbiasedness(w, dist, probes, cfg.unbiased_features, cfg.unbiased_repeats,
                                     cfg.seed, true));
  }
  if (control_selected("positive_definite_control")) {
    out.push_back(check_positive_definite(w, dist, cfg.pd_points, std::min(cfg.pd_sets, 5),
                                          cfg.seed, 0.5));
  }
  return out;
}

}  // namespace rwf
