#pragma once

// Marginal-likelihood hyperparameter search with common random numbers:
// the base draws of a feature map are sampled once and pushed through every
// candidate distribution, so the objective is a smooth function of the
// hyperparameters.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rwf/features.hpp"

namespace rwf {

enum class Method { Rwf, Rff, Exact };

std::string_view method_name(Method method);
// Throws ConfigError naming the valid options.
Method parse_method(std::string_view name);

struct HyperParams {
  double log_sigma2 = std::log(0.1);
  double log_s_min = std::log(0.01);
  double log_s_max = 0.0;
  double log_gamma = 0.0;
  double log_lengthscale = 0.0;  // RFF / exact only

  double sigma2() const { return std::exp(log_sigma2); }
  double s_min() const { return std::exp(log_s_min); }
  double s_max() const { return std::exp(log_s_max); }
  double gamma() const { return std::exp(log_gamma); }
  double lengthscale() const { return std::exp(log_lengthscale); }
  // Throws ArgumentError on non-finite fields or log_s_min >= log_s_max.
  void validate() const;
};

struct TracePoint {
  int evaluation = 0;
  double best_objective = 0.0;
};

struct NelderMeadOptions {
  int max_evaluations = 200;
  double initial_step = 0.5;
  double ftol = 1e-10;      // relative spread of simplex values
  double collapse = 1e-8;   // simplex diameter treated as collapsed
  std::uint64_t seed = 42;  // restart perturbation
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;
  bool budget_exhausted = false;
  std::vector<TracePoint> trace;  // best-so-far after every evaluation
};

// Maximizes f. Non-finite values count as -inf. Adaptive coefficients
// (reflection 1, expansion 1 + 2/n, contraction 0.75 - 1/2n, shrink 1 - 1/n).
// If the simplex collapses before the values agree, the search restarts
// once from the best point with a seeded random perturbation.
NelderMeadResult nelder_mead_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0, const NelderMeadOptions& opts);

struct ObjectiveOptions {
  // Shift box padding per side, as a multiple of s_max. Negative means the
  // wavelet's radius R_psi.
  double pad_factor = 1.0;
  bool ridge = false;
  double ridge_lambda = 1e-4;
  int workers = 1;
};

// log p(y | theta) for one method with frozen random draws.
class Objective {
 public:
  static Objective rwf(const FeatureMap& base, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ObjectiveOptions& opts = {});
  static Objective rff(const FeatureMap& base, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ObjectiveOptions& opts = {});
  // Squared-exponential GP with signal variance gamma^2.
  static Objective exact(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

  Method method() const { return method_; }
  double operator()(const HyperParams& theta) const;

  // Base draws pushed through theta.
  FeatureMap map_for(const HyperParams& theta) const;
  SamplingDistribution distribution_for(const HyperParams& theta) const;
  double pad_factor() const;

  // Unconstrained coordinates. RWF: (log s2, log s_min, log width, log gamma)
  // with log s_max = log s_min + exp(log width). RFF / exact:
  // (log s2, log l, log gamma).
  Eigen::VectorXd pack(const HyperParams& theta) const;
  HyperParams unpack(const Eigen::VectorXd& v, const HyperParams& like) const;

 private:
  Objective() = default;
  Method method_ = Method::Rwf;
  std::optional<FeatureMap> base_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  ObjectiveOptions opts_;
};

struct OptResult {
  HyperParams best;
  double best_objective = 0.0;
  std::vector<TracePoint> trace;
  int evaluations = 0;
  int restarts = 0;
  bool budget_exhausted = false;
};

// Requires budget >= 10.
OptResult optimize(const Objective& objective, const HyperParams& init, int budget,
                   std::uint64_t seed);

}  // namespace rwf
