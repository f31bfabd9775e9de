#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "rwf/bench.hpp"
#include "rwf/errors.hpp"
#include "rwf/rng.hpp"
#include "rwf/serialize.hpp"

using namespace rwf;
using rwf::test::TempFile;

namespace {

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

BenchConfig tiny_config() {
  BenchConfig c;
  c.dataset.n_train = 120;
  c.dataset.n_test = 30;
  c.num_features = 20;
  c.budget = 20;
  c.exact_opt_subset = 60;
  return c;
}

}  // namespace

TEST_SUITE("serialize") {
  TEST_CASE("base64 test vectors") {
    CHECK(base64_encode(bytes("")) == "");
    CHECK(base64_encode(bytes("f")) == "Zg==");
    CHECK(base64_encode(bytes("fo")) == "Zm8=");
    CHECK(base64_encode(bytes("foo")) == "Zm9v");
    CHECK(base64_encode(bytes("foobar")) == "Zm9vYmFy");
    CHECK(base64_decode("Zm9vYmFy") == bytes("foobar"));
    CHECK(base64_decode("Zm8=") == bytes("fo"));
    CHECK(base64_decode("") == bytes(""));
    CHECK_THROWS_AS(base64_decode("Zm9*"), DataError);
    CHECK_THROWS_AS(base64_decode("Zm9"), DataError);
    CHECK_THROWS_AS(base64_decode("Z==="), DataError);

    std::vector<std::uint8_t> all(256);
    for (int i = 0; i < 256; ++i) all[i] = static_cast<std::uint8_t>(i);
    CHECK(base64_decode(base64_encode(all)) == all);
  }

  TEST_CASE("matrices round-trip bit-exactly") {
    Eigen::MatrixXd M(3, 2);
    M << 1.0 / 3.0, -0.0, std::numeric_limits<double>::denorm_min(), 1e308, -2.5, M_PI;
    const Eigen::MatrixXd back = decode_matrix(encode_matrix(M));
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 2);
    CHECK(std::memcmp(back.data(), M.data(), sizeof(double) * 6) == 0);
    CHECK(decode_matrix(encode_matrix(Eigen::MatrixXd(0, 4))).cols() == 4);

    auto j = encode_matrix(M);
    j["rows"] = 4;
    CHECK_THROWS_AS(decode_matrix(j), DataError);
    CHECK_THROWS_AS(decode_matrix(nlohmann::json::object()), DataError);
  }

  TEST_CASE("feature maps round-trip") {
    SamplingDistribution dist{0.05, 0.8, Eigen::Vector2d(-1, -2), Eigen::Vector2d(1, 0.5)};
    for (const auto& w : {MotherWavelet::mexican_hat(2), MotherWavelet::morlet(2)}) {
      const auto map = FeatureMap::sample_rwf(w, dist, 17, 99);
      const auto back = feature_map_from_json(feature_map_to_json(map));
      CHECK(back.scales() == map.scales());
      CHECK(back.shifts() == map.shifts());
      CHECK(back.wavelet().family() == w.family());
    }
    const auto haar = FeatureMap::sample_rwf(MotherWavelet::haar(), rwf::test::box1(0.1, 1.0), 5, 1);
    CHECK(feature_map_from_json(feature_map_to_json(haar)).shifts() == haar.shifts());
    const auto rff = FeatureMap::sample_rff(0.37, 3, 11, 5);
    const auto rb = feature_map_from_json(feature_map_to_json(rff));
    CHECK(rb.frequencies() == rff.frequencies());
    CHECK(rb.phases() == rff.phases());

    auto j = feature_map_to_json(rff);
    j["format"] = "something.else";
    CHECK_THROWS_AS(feature_map_from_json(j), DataError);
    j = feature_map_to_json(rff);
    j.erase("lengthscale");
    CHECK_THROWS_AS(feature_map_from_json(j), DataError);
  }

  TEST_CASE("hyperparameters") {
    HyperParams h;
    h.log_sigma2 = -4.2;
    h.log_s_min = -3.0;
    h.log_s_max = 0.7;
    h.log_gamma = 0.1;
    h.log_lengthscale = -0.5;
    const HyperParams back = hyper_from_json(hyper_to_json(h));
    CHECK(back.log_sigma2 == h.log_sigma2);
    CHECK(back.log_s_min == h.log_s_min);
    CHECK(back.log_s_max == h.log_s_max);
    CHECK(back.log_gamma == h.log_gamma);
    CHECK(back.log_lengthscale == h.log_lengthscale);

    const HyperParams pos = hyper_from_json({{"sigma2", 0.01}, {"s_min", 0.2}});
    CHECK(pos.sigma2() == doctest::Approx(0.01));
    CHECK(pos.s_min() == doctest::Approx(0.2));
    CHECK(pos.log_s_max == HyperParams{}.log_s_max);
    CHECK_THROWS_AS(hyper_from_json({{"s_min", 2.0}, {"s_max", 1.0}}), ConfigError);
  }

  TEST_CASE("trained models round-trip with identical predictions") {
    const BenchConfig c = tiny_config();
    const Dataset data = make_dataset(c.dataset, 0);
    for (Method m : {Method::Rwf, Method::Rff, Method::Exact}) {
      CAPTURE(method_name(m));
      const TrainedModel model = train_model(c, m, data, 7);
      TempFile f(".json");
      save_model(f.path(), model, data.y_train);
      const TrainedModel back = load_model(f.path());
      CHECK(back.method == m);
      CHECK(back.dim() == 1);
      CHECK(back.hyper.log_sigma2 == model.hyper.log_sigma2);
      const auto a = model.predict(data.X_test);
      const auto b = back.predict(data.X_test);
      CHECK(a.mean == b.mean);
      CHECK(a.variance == b.variance);

      // Saving the loaded model reproduces the file.
      TempFile g(".json");
      save_model(g.path(), back, data.y_train);
      CHECK(rwf::test::slurp(g.path()) == rwf::test::slurp(f.path()));
    }
  }

  TEST_CASE("malformed model files are data errors") {
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), DataError);
    TempFile junk(".json", "{not json");
    CHECK_THROWS_AS(load_model(junk.path()), DataError);
    TempFile wrong(".json", R"({"format": "rwf.model", "version": 1, "method": "svgp"})");
    CHECK_THROWS_AS(load_model(wrong.path()), DataError);
    TempFile empty(".json", "{}");
    CHECK_THROWS_AS(load_model(empty.path()), DataError);
  }

  TEST_CASE("metrics documents") {
    MetricsBundle r;
    r.method = "rwf";
    r.num_features = 200;
    r.rmse = 0.1;
    const auto j = to_json(r);
    CHECK(j["method"] == "rwf");
    CHECK(j["D"] == 200);
    CHECK(j["rmse"].get<double>() == 0.1);
    CHECK(j.contains("hyperparameters"));
    const std::string csv = metrics_csv({r, r});
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.rfind("method,D,repeat", 0) == 0);

    TimingTable t;
    t.rows.push_back({100, 10, 0.5});
    t.slope = 0.01;
    CHECK(to_json(t)["rows"][0]["N"] == 100);
  }
}
