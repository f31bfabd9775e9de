#pragma once

// Numerical checks of the kernel's theoretical guarantees. Every check
// reduces to one statistic compared against one threshold, so `passed` can
// be recomputed from the report alone.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rwf/features.hpp"
#include "rwf/wavelets.hpp"

namespace rwf {

enum class Direction { AtMost, AtLeast };

struct CheckReport {
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double threshold = 0.0;
  Direction direction = Direction::AtMost;
  bool negative_control = false;  // expected to fail
  nlohmann::json details = nlohmann::json::object();

  bool recompute_passed() const {
    return direction == Direction::AtMost ? statistic <= threshold : statistic >= threshold;
  }
};

nlohmann::json to_json(const CheckReport& report);

// Pairs of d-vectors stored as rows of two matrices.
struct ProbePairs {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  int size() const { return static_cast<int>(x.rows()); }
};

// n pairs drawn uniformly from the shift box of `dist`.
ProbePairs random_probe_pairs(const SamplingDistribution& dist, int n, std::uint64_t seed);

// Monte Carlo mean of z(x)^T z(y) over R independent maps vs the quadrature
// oracle. Statistic: max over pairs of |mean - k| / (4 se + 1e-9).
// `wrong_scale_density` draws s uniformly on [s_min, s_max] instead of
// log-uniformly (negative control).
CheckReport check_unbiasedness(const MotherWavelet& w, const SamplingDistribution& dist,
                               const ProbePairs& probes, int D, int R, std::uint64_t seed,
                               bool wrong_scale_density = false);

// Statistic: max over pairs of var / (B^2 / D (1 + 5 / sqrt R)).
CheckReport check_variance_bound(const MotherWavelet& w, const SamplingDistribution& dist,
                                 const ProbePairs& probes, int D, int R, std::uint64_t seed);

// Empirical variance of z(x)^T z(y) at each pair (sample variance over R maps).
std::vector<double> estimator_variances(const MotherWavelet& w, const SamplingDistribution& dist,
                                        const ProbePairs& probes, int D, int R,
                                        std::uint64_t seed);

// Smallest-eigenvalue test on oracle Gram matrices of n_sets random point
// sets, and on feature Grams Z Z^T. Statistic: max of
// -lambda_min / (1e-8 lambda_max) (oracle) and -lambda_min / (1e-10 lambda_max)
// (features); passes at <= 1. `diagonal_shift` subtracts that multiple of the
// identity from every oracle Gram (negative control uses 0.5).
CheckReport check_positive_definite(const MotherWavelet& w, const SamplingDistribution& dist,
                                    int n_points, int n_sets, std::uint64_t seed,
                                    double diagonal_shift = 0.0);

struct UniformErrorTable {
  std::vector<int> feature_counts;
  std::vector<double> mean_sup_error;  // averaged over R maps
  std::vector<double> max_sup_error;   // worst single map
  double slope = 0.0;                  // d log(error) / d log(D)
  double grid_diameter = 0.0;
};

// Sup over all grid pairs of |z(x)^T z(y) - k(x, y)|, per D.
UniformErrorTable empirical_uniform_error(const MotherWavelet& w, const SamplingDistribution& dist,
                                          const Eigen::MatrixXd& grid,
                                          const std::vector<int>& feature_counts, int R,
                                          std::uint64_t seed);

// Statistic |slope + 0.5|, threshold 0.2.
CheckReport check_uniform_convergence(const MotherWavelet& w, const SamplingDistribution& dist,
                                      const Eigen::MatrixXd& grid,
                                      const std::vector<int>& feature_counts, int R,
                                      std::uint64_t seed);

// D >= (8 B^2 / eps^2) (2 d log(4 diam L_z / eps) + log(2 / delta)), with the
// first log clamped at 0.
long long sample_complexity(double B, int d, double diam, double L_z, double eps, double delta);

// Translation test in d = 1 with the shift box [-half_width, half_width]
// (large) and the given tight box. Statistic:
// max(max_large_diff / 1e-6, 1e-3 / max_tight_diff); passes at <= 1.
CheckReport check_stationarity(const MotherWavelet& w, double s_min, double s_max,
                               double large_half_width, double tight_lower, double tight_upper,
                               const ProbePairs& probes, double shift);

// g(s) = int psi(u) p(x - s u) du, the atom's pairing with a shift density
// p supported on [p_lower, p_upper] (d = 1).
double local_contribution(const MotherWavelet& w, const std::function<double(double)>& p,
                          double p_lower, double p_upper, double x, double s);

// Local log-log order of |g(s)| for a one-vanishing-moment and a
// two-vanishing-moment wavelet with the truncated quadratic density
// 0.75 (1 - t^2). Statistic: order(second) - order(first), threshold 0.5.
CheckReport check_moment_cancellation(const std::vector<MotherWavelet>& wavelets,
                                      const std::vector<double>& scales, double x = 0.3);

// Sup and Lipschitz bounds on random atoms. Statistic: max of |psi_{s,t}(x)| / B
// and |psi_{s,t}(x) - psi_{s,t}(x')| / (L_psi |x - x'|); passes at <= 1.
CheckReport check_localization_bounds(const MotherWavelet& w, const SamplingDistribution& dist,
                                      int n_samples, std::uint64_t seed);

struct VerifyConfig {
  WaveletFamily family = WaveletFamily::MexicanHat;
  double s_min = 0.1;
  double s_max = 1.0;
  double lower = -1.0;
  double upper = 1.0;
  std::uint64_t seed = 42;

  int pd_points = 20;
  int pd_sets = 50;
  int probe_pairs = 10;
  int unbiased_features = 64;
  int unbiased_repeats = 200;
  int grid_points = 9;
  std::vector<int> uniform_features{16, 32, 64, 128, 256};
  int uniform_repeats = 50;
  double stationarity_shift = 0.5;
  double stationarity_half_width = 50.0;
  std::vector<double> moment_scales{0.1, 0.05, 0.025};
  int localization_samples = 10000;
};

// Names of the regular checks, in suite order.
const std::vector<std::string>& check_names();
// Names of the negative controls.
const std::vector<std::string>& control_names();

// Runs the regular checks (filtered by `only` when non-empty) and, when
// requested, the negative controls. Unknown names throw ConfigError.
std::vector<CheckReport> run_suite(const VerifyConfig& config,
                                   const std::vector<std::string>& only = {},
                                   bool negative_controls = false);

}  // namespace rwf
