#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "rwf/bench.hpp"
#include "rwf/errors.hpp"
#include "rwf/hyperopt.hpp"
#include "rwf/model.hpp"
#include "rwf/rng.hpp"

using namespace rwf;

namespace {

struct SineData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

SineData sine(int n, double noise, std::uint64_t seed) {
  SineData d{Eigen::MatrixXd(n, 1), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    CounterStream r(seed, stream::kDataInputs, static_cast<std::uint64_t>(i));
    d.X(i, 0) = 2 * r.uniform() - 1;
    d.y[i] = std::sin(3 * d.X(i, 0)) + noise * r.normal();
  }
  return d;
}

}  // namespace

TEST_SUITE("hyperopt") {
  TEST_CASE("method names") {
    CHECK(parse_method("rwf") == Method::Rwf);
    CHECK(parse_method("rff") == Method::Rff);
    CHECK(parse_method("exact") == Method::Exact);
    CHECK(method_name(Method::Rff) == "rff");
    try {
      parse_method("svgp");
      FAIL("no throw");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("svgp") != std::string::npos);
      CHECK(msg.find("rwf, rff, exact") != std::string::npos);
    }
  }

  TEST_CASE("hyperparameter validation") {
    HyperParams h;
    CHECK_NOTHROW(h.validate());
    h.log_s_max = h.log_s_min;
    CHECK_THROWS_AS(h.validate(), ArgumentError);
    h = HyperParams{};
    h.log_sigma2 = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(h.validate(), ArgumentError);
  }

  TEST_CASE("Nelder-Mead finds the maximum of a quadratic") {
    Eigen::VectorXd target(4);
    target << 0.3, -1.2, 2.0, 0.7;
    int calls = 0;
    auto f = [&](const Eigen::VectorXd& v) {
      ++calls;
      return -(v - target).squaredNorm();
    };
    NelderMeadOptions opts;
    opts.max_evaluations = 200;
    const auto res = nelder_mead_maximize(f, Eigen::VectorXd::Zero(4), opts);
    CHECK(res.evaluations <= 200);
    CHECK(calls == res.evaluations);
    CHECK((res.x - target).norm() < 1e-4);
    CHECK(res.value == f(res.x));

    const auto again = nelder_mead_maximize(f, Eigen::VectorXd::Zero(4), opts);
    CHECK(again.x == res.x);
    CHECK(again.value == res.value);
    CHECK(again.evaluations == res.evaluations);
  }

  TEST_CASE("Nelder-Mead treats non-finite values as -inf and reports the budget") {
    auto f = [](const Eigen::VectorXd& v) {
      if (v[0] > 1.0) return std::numeric_limits<double>::quiet_NaN();
      return -(v[0] - 0.9) * (v[0] - 0.9) - v[1] * v[1];
    };
    NelderMeadOptions opts;
    opts.max_evaluations = 15;
    const auto res = nelder_mead_maximize(f, Eigen::VectorXd::Zero(2), opts);
    CHECK(res.budget_exhausted);
    CHECK(res.evaluations == 15);
    CHECK(std::isfinite(res.value));
    CHECK(res.x[0] <= 1.0);
  }

  TEST_CASE("trace is the best-so-far sequence") {
    const auto d = sine(80, 0.05, 3);
    const auto base = FeatureMap::sample_rwf(MotherWavelet::mexican_hat(1), rwf::test::box1(0.01, 1.0), 40, 5);
    const auto obj = Objective::rwf(base, d.X, d.y);
    const auto res = optimize(obj, HyperParams{}, 60, 7);
    REQUIRE(res.trace.size() == static_cast<std::size_t>(res.evaluations));
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      CHECK(res.trace[i].best_objective >= res.trace[i - 1].best_objective);
      CHECK(res.trace[i].evaluation == res.trace[i - 1].evaluation + 1);
    }
    CHECK(res.trace.back().best_objective == res.best_objective);
    CHECK(obj(res.best) == res.best_objective);
    CHECK(res.best.s_min() < res.best.s_max());
  }

  TEST_CASE("objective is deterministic and reduces to pure noise at gamma 0") {
    const auto d = sine(50, 0.1, 4);
    const auto base = FeatureMap::sample_rwf(MotherWavelet::mexican_hat(1), rwf::test::box1(0.01, 1.0), 30, 5);
    const auto obj = Objective::rwf(base, d.X, d.y);
    HyperParams h;
    CHECK(obj(h) == obj(h));
    const double s2 = h.sigma2();
    const double pure = -d.y.squaredNorm() / (2 * s2) - 0.5 * d.y.size() * std::log(2 * M_PI * s2);
    CHECK(blr_log_marginal(Eigen::MatrixXd::Zero(50, 30), d.y, s2) == doctest::Approx(pure).epsilon(1e-13));
    // gamma -> 0 switches every feature off.
    HyperParams tiny;
    tiny.log_gamma = -40.0;
    CHECK(obj(tiny) == doctest::Approx(pure).epsilon(1e-12));
  }

  TEST_CASE("common random numbers make the objective smooth") {
    const auto d = sine(100, 0.1, 5);
    const auto base = FeatureMap::sample_rwf(MotherWavelet::mexican_hat(1), rwf::test::box1(0.01, 1.0), 50, 6);
    const auto obj = Objective::rwf(base, d.X, d.y);
    HyperParams h;
    h.log_s_min = std::log(0.05);
    const double f0 = obj(h);
    for (int k = 0; k < 4; ++k) {
      HyperParams p = h;
      const double delta = 1e-6;
      if (k == 0) p.log_sigma2 += delta;
      if (k == 1) p.log_s_min += delta;
      if (k == 2) p.log_s_max += delta;
      if (k == 3) p.log_gamma += delta;
      CHECK(std::abs(obj(p) - f0) / std::abs(f0) < 1e-3);
    }
    const auto rff = Objective::rff(FeatureMap::sample_rff(1.0, 1, 50, 6), d.X, d.y);
    HyperParams q;
    q.log_lengthscale = std::log(0.4);
    HyperParams q2 = q;
    q2.log_lengthscale += 1e-6;
    CHECK(std::abs(rff(q2) - rff(q)) / std::abs(rff(q)) < 1e-3);
  }

  TEST_CASE("pack and unpack are inverse") {
    const auto d = sine(20, 0.1, 6);
    const auto rwf_obj = Objective::rwf(
        FeatureMap::sample_rwf(MotherWavelet::haar(), rwf::test::box1(0.01, 1.0), 10, 1), d.X, d.y);
    HyperParams h;
    h.log_sigma2 = -3.1;
    h.log_s_min = -2.5;
    h.log_s_max = 0.4;
    h.log_gamma = 0.2;
    const HyperParams back = rwf_obj.unpack(rwf_obj.pack(h), HyperParams{});
    CHECK(back.log_sigma2 == h.log_sigma2);
    CHECK(back.log_s_min == h.log_s_min);
    CHECK(back.log_s_max == doctest::Approx(h.log_s_max).epsilon(1e-15));
    CHECK(back.log_gamma == h.log_gamma);
    // Any unconstrained point maps to an ordered scale range.
    Eigen::VectorXd v(4);
    v << 0.0, 1.0, -30.0, 0.0;
    CHECK(rwf_obj.unpack(v, h).log_s_max > rwf_obj.unpack(v, h).log_s_min);
  }

  TEST_CASE("budget rules") {
    const auto d = sine(30, 0.1, 7);
    const auto obj = Objective::rff(FeatureMap::sample_rff(1.0, 1, 20, 2), d.X, d.y);
    CHECK_THROWS_AS(optimize(obj, HyperParams{}, 9, 1), ArgumentError);
    const auto res = optimize(obj, HyperParams{}, 10, 1);
    CHECK(res.evaluations == 10);
    CHECK(res.budget_exhausted);
    const auto a = optimize(obj, HyperParams{}, 40, 3);
    const auto b = optimize(obj, HyperParams{}, 40, 3);
    CHECK(a.best_objective == b.best_objective);
    CHECK(a.best.log_lengthscale == b.best.log_lengthscale);
    CHECK(a.evaluations == b.evaluations);
  }

  TEST_CASE("a scale range covering the data beats a mis-scaled one") {
    const Dataset data = normalize(gen_multistep(400, 10, 5, 0.05, 11));
    const auto base = FeatureMap::sample_rwf(MotherWavelet::mexican_hat(1), rwf::test::box1(0.01, 1.0), 100, 13);
    const auto obj = Objective::rwf(base, data.X_train, data.y_train);
    // Scale range fixed, noise and output scale optimized.
    auto best_with_range = [&](double s_min, double s_max) {
      auto f = [&](const Eigen::VectorXd& v) {
        HyperParams h;
        h.log_s_min = std::log(s_min);
        h.log_s_max = std::log(s_max);
        h.log_sigma2 = v[0];
        h.log_gamma = v[1];
        return obj(h);
      };
      NelderMeadOptions opts;
      opts.max_evaluations = 120;
      return nelder_mead_maximize(f, Eigen::Vector2d(std::log(0.1), 0.0), opts).value;
    };
    const double covering = best_with_range(0.01, 1.0);
    const double mis_scaled = best_with_range(20.0, 40.0);
    CHECK(covering > mis_scaled);
  }

  TEST_CASE("optimized RFF lengthscale is close to the exact-GP optimum") {
    const auto d = sine(200, 1e-3, 8);
    const auto exact = Objective::exact(d.X, d.y);
    HyperParams h;
    h.log_sigma2 = std::log(1e-4);
    double best_l = 0.0, best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
      h.log_lengthscale = std::log(0.02) + i * (std::log(20.0) - std::log(0.02)) / 49.0;
      const double v = exact(h);
      if (v > best_v) {
        best_v = v;
        best_l = h.lengthscale();
      }
    }
    const auto rff = Objective::rff(FeatureMap::sample_rff(1.0, 1, 200, 9), d.X, d.y);
    const auto res = optimize(rff, HyperParams{}, 150, 10);
    const double ratio = res.best.lengthscale() / best_l;
    CAPTURE(best_l);
    CAPTURE(res.best.lengthscale());
    CHECK(ratio > 1.0 / 3.0);
    CHECK(ratio < 3.0);
  }
}
