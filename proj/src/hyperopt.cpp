#include "rwf/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rwf/errors.hpp"
#include "rwf/model.hpp"
#include "rwf/rng.hpp"

namespace rwf {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::Rwf:
      return "rwf";
    case Method::Rff:
      return "rff";
    case Method::Exact:
      return "exact";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "rwf") return Method::Rwf;
  if (name == "rff") return Method::Rff;
  if (name == "exact") return Method::Exact;
  throw ConfigError("unknown method '" + std::string(name) + "' (valid: rwf, rff, exact)");
}

void HyperParams::validate() const {
  // log_gamma = -inf (gamma = 0) is allowed: it switches the features off.
  if (!std::isfinite(log_sigma2) || !std::isfinite(log_s_min) || !std::isfinite(log_s_max) ||
      !std::isfinite(log_lengthscale) || std::isnan(log_gamma) || log_gamma == HUGE_VAL) {
    throw ArgumentError("hyperparameters must be finite");
  }
  if (!(log_s_min < log_s_max)) throw ArgumentError("hyperparameters: need s_min < s_max");
}

NelderMeadResult nelder_mead_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
  const Eigen::Index n = x0.size();
  if (n < 1) throw ArgumentError("nelder_mead: empty parameter vector");
  if (opts.max_evaluations < n + 1) throw ArgumentError("nelder_mead: budget below n + 1");

  const double nd = static_cast<double>(n);
  const double c_reflect = 1.0;
  const double c_expand = 1.0 + 2.0 / nd;
  const double c_contract = 0.75 - 0.5 / nd;
  const double c_shrink = n > 1 ? 1.0 - 1.0 / nd : 0.5;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  NelderMeadResult res;
  res.x = x0;
  res.value = neg_inf;

  // Minimizes g = -f internally.
  auto eval = [&](const Eigen::VectorXd& x) {
    double v = f(x);
    if (!std::isfinite(v)) v = neg_inf;
    ++res.evaluations;
    if (v > res.value || res.evaluations == 1) {
      res.value = v;
      res.x = x;
    }
    res.trace.push_back({res.evaluations, res.value});
    return -v;
  };
  auto budget_left = [&] { return opts.max_evaluations - res.evaluations; };

  Eigen::VectorXd start = x0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> vals;
    pts.push_back(start);
    if (budget_left() < 1) break;
    vals.push_back(eval(start));
    for (Eigen::Index i = 0; i < n && budget_left() > 0; ++i) {
      Eigen::VectorXd p = start;
      p[i] += opts.initial_step;
      pts.push_back(p);
      vals.push_back(eval(p));
    }
    if (static_cast<Eigen::Index>(pts.size()) < n + 1) break;

    std::vector<int> order(n + 1);
    bool collapsed = false;
    while (true) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
      const int best = order.front();
      const int worst = order.back();
      const int second = order[n - 1];

      const double spread = vals[worst] - vals[best];
      if (std::isfinite(vals[best]) && spread <= opts.ftol * (1.0 + std::abs(vals[best]))) {
        res.converged = true;
        break;
      }
      double diameter = 0.0;
      for (Eigen::Index i = 0; i <= n; ++i) {
        diameter = std::max(diameter, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
      }
      if (diameter < opts.collapse) {
        collapsed = true;
        break;
      }
      if (budget_left() < 1) break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int i = 0; i <= n; ++i) {
        if (i != worst) centroid += pts[i];
      }
      centroid /= nd;

      const Eigen::VectorXd xr = centroid + c_reflect * (centroid - pts[worst]);
      const double fr = eval(xr);
      if (fr < vals[best]) {
        if (budget_left() < 1) {
          pts[worst] = xr;
          vals[worst] = fr;
          continue;
        }
        const Eigen::VectorXd xe = centroid + c_expand * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          pts[worst] = xe;
          vals[worst] = fe;
        } else {
          pts[worst] = xr;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      if (budget_left() < 1) break;
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + c_contract * (xr - centroid))
                                         : Eigen::VectorXd(centroid - c_contract * (centroid - pts[worst]));
      const double fc = eval(xc);
      if (fc < std::min(fr, vals[worst]) || (outside && fc <= fr)) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
      for (int i = 0; i <= n; ++i) {
        if (i == best) continue;
        if (budget_left() < 1) break;
        pts[i] = pts[best] + c_shrink * (pts[i] - pts[best]);
        vals[i] = eval(pts[i]);
      }
    }
    if (!collapsed || attempt == 1) break;
    ++res.restarts;
    CounterStream rng(opts.seed, stream::kOptimizer, 0);
    start = res.x;
    for (Eigen::Index i = 0; i < n; ++i) start[i] += opts.initial_step * (rng.uniform() - 0.5);
  }
  res.budget_exhausted = budget_left() <= 0 && !res.converged;
  return res;
}

Objective Objective::rwf(const FeatureMap& base, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const ObjectiveOptions& opts) {
  if (base.kind() != FeatureKind::Rwf) throw ArgumentError("Objective::rwf: base map is not RWF");
  if (X.rows() != y.size() || X.cols() != base.dim()) {
    throw ArgumentError("Objective::rwf: data shape does not match the feature map");
  }
  Objective obj;
  obj.method_ = Method::Rwf;
  obj.base_ = base;
  obj.X_ = X;
  obj.y_ = y;
  obj.opts_ = opts;
  return obj;
}

Objective Objective::rff(const FeatureMap& base, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const ObjectiveOptions& opts) {
  if (base.kind() != FeatureKind::Rff) throw ArgumentError("Objective::rff: base map is not RFF");
  if (X.rows() != y.size() || X.cols() != base.dim()) {
    throw ArgumentError("Objective::rff: data shape does not match the feature map");
  }
  Objective obj;
  obj.method_ = Method::Rff;
  obj.base_ = base;
  obj.X_ = X;
  obj.y_ = y;
  obj.opts_ = opts;
  return obj;
}

Objective Objective::exact(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw ArgumentError("Objective::exact: data shape mismatch");
  if (X.rows() > kExactGpMaxPoints) {
    throw ArgumentError("Objective::exact: N exceeds the exact-GP limit");
  }
  Objective obj;
  obj.method_ = Method::Exact;
  obj.X_ = X;
  obj.y_ = y;
  return obj;
}

double Objective::pad_factor() const {
  if (opts_.pad_factor >= 0.0) return opts_.pad_factor;
  return base_ && base_->kind() == FeatureKind::Rwf ? base_->wavelet().radius() : 0.0;
}

SamplingDistribution Objective::distribution_for(const HyperParams& theta) const {
  if (method_ != Method::Rwf) throw ArgumentError("distribution_for: not an RWF objective");
  return SamplingDistribution::around_data(X_, theta.s_min(), theta.s_max(), pad_factor());
}

FeatureMap Objective::map_for(const HyperParams& theta) const {
  switch (method_) {
    case Method::Rwf:
      return base_->with_distribution(distribution_for(theta));
    case Method::Rff:
      return base_->with_lengthscale(theta.lengthscale());
    case Method::Exact:
      break;
  }
  throw ArgumentError("map_for: the exact GP has no feature map");
}

double Objective::operator()(const HyperParams& theta) const {
  theta.validate();
  if (method_ == Method::Exact) {
    const double g = theta.gamma();
    const ExactGpModel m = exact_gp_fit(X_, y_, theta.lengthscale(), g * g, theta.sigma2());
    return exact_gp_log_marginal(m, y_);
  }
  const Eigen::MatrixXd Z = featurize(map_for(theta), X_, opts_.workers) * theta.gamma();
  const double lml = blr_log_marginal(Z, y_, theta.sigma2());
  if (!opts_.ridge) return lml;
  const BlrPosterior post = blr_fit(Z, y_, theta.sigma2());
  return lml - opts_.ridge_lambda * post.mean.squaredNorm();
}

Eigen::VectorXd Objective::pack(const HyperParams& theta) const {
  if (method_ == Method::Rwf) {
    Eigen::VectorXd v(4);
    v << theta.log_sigma2, theta.log_s_min, std::log(theta.log_s_max - theta.log_s_min),
        theta.log_gamma;
    return v;
  }
  Eigen::VectorXd v(3);
  v << theta.log_sigma2, theta.log_lengthscale, theta.log_gamma;
  return v;
}

HyperParams Objective::unpack(const Eigen::VectorXd& v, const HyperParams& like) const {
  HyperParams theta = like;
  if (method_ == Method::Rwf) {
    if (v.size() != 4) throw ArgumentError("unpack: RWF expects 4 coordinates");
    theta.log_sigma2 = v[0];
    theta.log_s_min = v[1];
    theta.log_s_max = v[1] + std::exp(v[2]);
    theta.log_gamma = v[3];
  } else {
    if (v.size() != 3) throw ArgumentError("unpack: expects 3 coordinates");
    theta.log_sigma2 = v[0];
    theta.log_lengthscale = v[1];
    theta.log_gamma = v[2];
  }
  return theta;
}

OptResult optimize(const Objective& objective, const HyperParams& init, int budget,
                   std::uint64_t seed) {
  if (budget < 10) throw ArgumentError("optimize: budget must be >= 10");
  init.validate();
  auto f = [&](const Eigen::VectorXd& v) {
    try {
      return objective(objective.unpack(v, init));
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    } catch (const ArgumentError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  NelderMeadOptions opts;
  opts.max_evaluations = budget;
  opts.seed = seed;
  const NelderMeadResult nm = nelder_mead_maximize(f, objective.pack(init), opts);
  OptResult out;
  out.best = objective.unpack(nm.x, init);
  out.best_objective = nm.value;
  out.trace = nm.trace;
  out.evaluations = nm.evaluations;
  out.restarts = nm.restarts;
  out.budget_exhausted = nm.budget_exhausted;
  return out;
}

}  // namespace rwf
