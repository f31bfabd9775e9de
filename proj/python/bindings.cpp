#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

#include "rwf/bench.hpp"
#include "rwf/config.hpp"
#include "rwf/errors.hpp"
#include "rwf/features.hpp"
#include "rwf/kernel_oracle.hpp"
#include "rwf/model.hpp"
#include "rwf/rng.hpp"
#include "rwf/serialize.hpp"
#include "rwf/verify.hpp"

namespace py = pybind11;
using namespace rwf;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd as_matrix(const RowMatrix& X) { return X; }

SamplingDistribution make_dist(double s_min, double s_max, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
  SamplingDistribution d{s_min, s_max, lower, upper};
  d.validate();
  return d;
}

nlohmann::json parse(const std::string& text) {
  try {
    return text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

// A model trained from arrays, with the normalized targets kept for saving.
struct PyModel {
  TrainedModel model;
  Eigen::VectorXd y_train;
};

PyModel fit(const RowMatrix& X, const Eigen::VectorXd& y, const std::string& method,
            const std::string& config_json) {
  if (X.rows() != y.size()) throw ArgumentError("fit: X and y have different row counts");
  const RunConfig rc = run_config_from_json(parse(config_json));
  Dataset raw;
  raw.X_train = X;
  raw.y_train = y;
  raw.X_test.resize(0, X.cols());
  raw.y_test.resize(0);
  raw.stats = NormStats::identity(static_cast<int>(X.cols()));
  const Dataset data = normalize(raw);
  const Method m = method.empty() ? rc.method : parse_method(method);
  return {train_model(rc.bench, m, data, mix_seed(rc.bench.seed, 0)), data.y_train};
}

py::tuple moments(const PredictiveDistribution& p) { return py::make_tuple(p.mean, p.variance); }

}  // namespace

PYBIND11_MODULE(_rwf, m) {
  m.doc() = "Random wavelet features for Gaussian process regression";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "eval_mother",
      [](const std::string& family, const RowMatrix& U) {
        const MotherWavelet w = MotherWavelet::make(parse_family(family), static_cast<int>(U.cols()));
        Eigen::VectorXd out(U.rows());
        for (Eigen::Index i = 0; i < U.rows(); ++i) out(i) = w.value(U.row(i).data());
        return out;
      },
      py::arg("family"), py::arg("u"));

  py::class_<FeatureMap>(m, "FeatureMap")
      .def_static(
          "sample_rwf",
          [](const std::string& family, double s_min, double s_max, const Eigen::VectorXd& lower,
             const Eigen::VectorXd& upper, int num_features, std::uint64_t seed) {
            return FeatureMap::sample_rwf(MotherWavelet::make(parse_family(family), static_cast<int>(lower.size())),
                                          make_dist(s_min, s_max, lower, upper), num_features, seed);
          },
          py::arg("family"), py::arg("s_min"), py::arg("s_max"), py::arg("lower"), py::arg("upper"),
          py::arg("num_features"), py::arg("seed") = 42)
      .def_static("sample_rff", &FeatureMap::sample_rff, py::arg("lengthscale"), py::arg("dim"),
                  py::arg("num_features"), py::arg("seed") = 42)
      .def_property_readonly("num_features", &FeatureMap::num_features)
      .def_property_readonly("dim", &FeatureMap::dim)
      .def_property_readonly("kind", [](const FeatureMap& f) { return f.kind() == FeatureKind::Rwf ? "rwf" : "rff"; })
      .def_property_readonly("scales", &FeatureMap::scales)
      .def_property_readonly("shifts", &FeatureMap::shifts)
      .def_property_readonly("frequencies", &FeatureMap::frequencies)
      .def_property_readonly("phases", &FeatureMap::phases)
      .def(
          "featurize",
          [](const FeatureMap& f, const RowMatrix& X, int workers) {
            if (X.cols() != f.dim()) throw ArgumentError("featurize: input dimension mismatch");
            const Eigen::MatrixXd Xc = as_matrix(X);
            py::gil_scoped_release release;
            return featurize(f, Xc, workers);
          },
          py::arg("x"), py::arg("workers") = 1)
      .def("to_json", [](const FeatureMap& f) { return feature_map_to_json(f).dump(); })
      .def_static("from_json", [](const std::string& s) { return feature_map_from_json(parse(s)); });

  m.def(
      "wavelet_kernel",
      [](const std::string& family, double s_min, double s_max, const Eigen::VectorXd& lower,
         const Eigen::VectorXd& upper, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        const MotherWavelet w = MotherWavelet::make(parse_family(family), static_cast<int>(x.size()));
        return wavelet_kernel(w, make_dist(s_min, s_max, lower, upper), {x.data(), static_cast<std::size_t>(x.size())},
                              {y.data(), static_cast<std::size_t>(y.size())});
      },
      py::arg("family"), py::arg("s_min"), py::arg("s_max"), py::arg("lower"), py::arg("upper"), py::arg("x"),
      py::arg("y"));

  m.def(
      "rbf_kernel",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lengthscale, double variance) {
        return rbf_kernel(lengthscale, variance, {x.data(), static_cast<std::size_t>(x.size())},
                          {y.data(), static_cast<std::size_t>(y.size())});
      },
      py::arg("x"), py::arg("y"), py::arg("lengthscale") = 1.0, py::arg("variance") = 1.0);

  py::class_<BlrPosterior>(m, "BlrPosterior")
      .def_readonly("mean", &BlrPosterior::mean)
      .def_readonly("noise_variance", &BlrPosterior::noise_variance)
      .def("covariance", &BlrPosterior::covariance)
      .def("predict", [](const BlrPosterior& p, const RowMatrix& Zs) { return moments(blr_predict(p, Zs)); },
           py::arg("z"));

  m.def(
      "blr_fit", [](const RowMatrix& Z, const Eigen::VectorXd& y, double s2) { return blr_fit(Z, y, s2); },
      py::arg("z"), py::arg("y"), py::arg("noise_variance"));
  m.def(
      "blr_log_marginal",
      [](const RowMatrix& Z, const Eigen::VectorXd& y, double s2) { return blr_log_marginal(Z, y, s2); },
      py::arg("z"), py::arg("y"), py::arg("noise_variance"));

  m.def(
      "gen_multistep",
      [](int n_train, int n_test, int n_steps, double noise_sd, std::uint64_t seed) {
        const Dataset d = gen_multistep(n_train, n_test, n_steps, noise_sd, seed);
        return py::make_tuple(d.X_train, d.y_train, d.X_test, d.y_test);
      },
      py::arg("n_train") = 4200, py::arg("n_test") = 1800, py::arg("n_steps") = 5, py::arg("noise_sd") = 0.05,
      py::arg("seed") = 42);

  m.def("sample_complexity", &sample_complexity, py::arg("B") = 1.0, py::arg("d") = 1, py::arg("diam") = 1.0,
        py::arg("L_z") = 1.0, py::arg("eps") = 0.5, py::arg("delta") = 0.1);

  m.def(
      "verify",
      [](const std::string& config_json, const std::vector<std::string>& only, bool negative_controls) {
        const VerifyConfig vc = verify_config_from_json(parse(config_json));
        std::vector<CheckReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_suite(vc, only, negative_controls);
        }
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : reports) out.push_back(to_json(r));
        return out.dump();
      },
      py::arg("config") = "", py::arg("only") = std::vector<std::string>{}, py::arg("negative_controls") = false);

  m.def(
      "benchmark",
      [](const std::string& config_json) {
        const RunConfig rc = run_config_from_json(parse(config_json));
        std::vector<MetricsBundle> rows;
        {
          py::gil_scoped_release release;
          rows = run_benchmark(rc.bench);
        }
        nlohmann::json out = {{"rows", nlohmann::json::array()}, {"aggregate", nlohmann::json::array()}};
        for (const auto& r : rows) out["rows"].push_back(to_json(r));
        for (const auto& a : aggregate(rows)) out["aggregate"].push_back(to_json(a));
        return out.dump();
      },
      py::arg("config") = "");

  py::class_<PyModel>(m, "Model")
      .def_static("fit", &fit, py::arg("x"), py::arg("y"), py::arg("method") = "", py::arg("config") = "",
                  py::call_guard<py::gil_scoped_release>())
      .def_static(
          "load",
          [](const std::string& path) {
            PyModel p{load_model(path), {}};
            if (p.model.method == Method::Exact) {
              std::ifstream in(path);
              p.y_train = decode_matrix(nlohmann::json::parse(in).at("targets")).col(0);
            }
            return p;
          },
          py::arg("path"))
      .def("save", [](const PyModel& p, const std::string& path) { save_model(path, p.model, p.y_train); },
           py::arg("path"))
      .def(
          "predict",
          [](const PyModel& p, const RowMatrix& X, int workers) {
            if (X.cols() != p.model.dim()) throw ArgumentError("predict: input dimension mismatch");
            return moments(p.model.predict(X, workers));
          },
          py::arg("x"), py::arg("workers") = 1)
      .def_property_readonly("method", [](const PyModel& p) { return std::string(method_name(p.model.method)); })
      .def_property_readonly("log_marginal", [](const PyModel& p) { return p.model.log_marginal; })
      .def_property_readonly("hyperparameters", [](const PyModel& p) { return hyper_to_json(p.model.hyper).dump(); });
}
