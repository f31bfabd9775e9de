#include "rwf/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rwf/errors.hpp"

namespace rwf {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr int kFormatVersion = 1;

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

const nlohmann::json& field(const nlohmann::json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw DataError(std::string(where) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get_as(const nlohmann::json& j, const char* key, const char* where) {
  try {
    return field(j, key, where).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw DataError("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw DataError("base64: misplaced padding");
      v[k] = decode_char(c);
      if (v[k] < 0) throw DataError("base64: invalid character");
    }
    const std::uint32_t w = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(w >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((w >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(w & 0xff));
  }
  return out;
}

nlohmann::json encode_matrix(const Eigen::MatrixXd& M) {
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(M.size()) * sizeof(double));
  if (!bytes.empty()) std::memcpy(bytes.data(), M.data(), bytes.size());
  return {{"rows", M.rows()}, {"cols", M.cols()}, {"data", base64_encode(bytes)}};
}

Eigen::MatrixXd decode_matrix(const nlohmann::json& j) {
  const auto rows = get_as<long long>(j, "rows", "matrix");
  const auto cols = get_as<long long>(j, "cols", "matrix");
  if (rows < 0 || cols < 0) throw DataError("matrix: negative shape");
  const std::vector<std::uint8_t> bytes = base64_decode(get_as<std::string>(j, "data", "matrix"));
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * sizeof(double)) {
    throw DataError("matrix: data length does not match its shape");
  }
  Eigen::MatrixXd M(rows, cols);
  if (!bytes.empty()) std::memcpy(M.data(), bytes.data(), bytes.size());
  return M;
}

nlohmann::json feature_map_to_json(const FeatureMap& map) {
  nlohmann::json j;
  j["format"] = "rwf.feature_map";
  j["version"] = kFormatVersion;
  j["seed"] = map.seed();
  j["num_features"] = map.num_features();
  j["dim"] = map.dim();
  if (map.kind() == FeatureKind::Rff) {
    j["kind"] = "rff";
    j["lengthscale"] = map.lengthscale();
    return j;
  }
  const MotherWavelet& w = map.wavelet();
  const SamplingDistribution& dist = map.distribution();
  j["kind"] = "rwf";
  j["family"] = std::string(family_name(w.family()));
  if (w.family() == WaveletFamily::Morlet) j["omega0"] = w.omega0();
  j["s_min"] = dist.s_min;
  j["s_max"] = dist.s_max;
  j["lower"] = to_std(dist.lower);
  j["upper"] = to_std(dist.upper);
  return j;
}

FeatureMap feature_map_from_json(const nlohmann::json& j) {
  const char* where = "feature map";
  if (get_as<std::string>(j, "format", where) != "rwf.feature_map") {
    throw DataError("feature map: unexpected format tag");
  }
  if (get_as<int>(j, "version", where) != kFormatVersion) {
    throw DataError("feature map: unsupported version");
  }
  const auto seed = get_as<std::uint64_t>(j, "seed", where);
  const int D = get_as<int>(j, "num_features", where);
  const int dim = get_as<int>(j, "dim", where);
  const std::string kind = get_as<std::string>(j, "kind", where);
  try {
    if (kind == "rff") {
      return FeatureMap::sample_rff(get_as<double>(j, "lengthscale", where), dim, D, seed);
    }
    if (kind != "rwf") throw DataError("feature map: unknown kind '" + kind + "'");
    const WaveletFamily family = parse_family(get_as<std::string>(j, "family", where));
    const MotherWavelet w =
        family == WaveletFamily::Morlet
            ? MotherWavelet::morlet(dim, get_as<std::vector<double>>(j, "omega0", where))
            : MotherWavelet::make(family, dim);
    SamplingDistribution dist;
    dist.s_min = get_as<double>(j, "s_min", where);
    dist.s_max = get_as<double>(j, "s_max", where);
    dist.lower = to_vector(get_as<std::vector<double>>(j, "lower", where));
    dist.upper = to_vector(get_as<std::vector<double>>(j, "upper", where));
    return FeatureMap::sample_rwf(w, dist, D, seed);
  } catch (const ArgumentError& e) {
    throw DataError(std::string("feature map: ") + e.what());
  } catch (const UnsupportedError& e) {
    throw DataError(std::string("feature map: ") + e.what());
  }
}

nlohmann::json hyper_to_json(const HyperParams& h) {
  return {{"sigma2", h.sigma2()},  {"s_min", h.s_min()}, {"s_max", h.s_max()},
          {"gamma", h.gamma()},    {"lengthscale", h.lengthscale()},
          {"log", {h.log_sigma2, h.log_s_min, h.log_s_max, h.log_gamma, h.log_lengthscale}}};
}

HyperParams hyper_from_json(const nlohmann::json& j, const HyperParams& defaults) {
  HyperParams h = defaults;
  if (!j.is_object()) throw ConfigError("hyperparameters: expected an object");
  // The exact log vector wins when present so saved models round-trip bit-exactly.
  if (j.contains("log")) {
    std::vector<double> v;
    try {
      v = j.at("log").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("hyperparameters: field 'log' must be an array of 5 numbers");
    }
    if (v.size() != 5) throw ConfigError("hyperparameters: field 'log' must have 5 entries");
    h.log_sigma2 = v[0];
    h.log_s_min = v[1];
    h.log_s_max = v[2];
    h.log_gamma = v[3];
    h.log_lengthscale = v[4];
    return h;
  }
  auto read_positive = [&](const char* key, double& log_target) {
    if (!j.contains(key)) return;
    const nlohmann::json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("hyperparameters: '") + key + "' must be a number");
    const double x = v.get<double>();
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigError(std::string("hyperparameters: '") + key + "' must be positive");
    }
    log_target = std::log(x);
  };
  read_positive("sigma2", h.log_sigma2);
  read_positive("s_min", h.log_s_min);
  read_positive("s_max", h.log_s_max);
  read_positive("gamma", h.log_gamma);
  read_positive("lengthscale", h.log_lengthscale);
  if (!(h.log_s_min < h.log_s_max)) throw ConfigError("hyperparameters: need s_min < s_max");
  return h;
}

nlohmann::json model_to_json(const TrainedModel& model, const Eigen::VectorXd& y_train) {
  nlohmann::json j;
  j["format"] = "rwf.model";
  j["version"] = kFormatVersion;
  j["method"] = std::string(method_name(model.method));
  j["hyperparameters"] = hyper_to_json(model.hyper);
  j["log_marginal"] = model.log_marginal;
  j["normalization"] = {{"x_mean", to_std(model.stats.x_mean)},
                        {"x_std", to_std(model.stats.x_std)},
                        {"y_mean", model.stats.y_mean},
                        {"y_std", model.stats.y_std}};
  if (model.regressor) {
    const FeatureRegressor& r = *model.regressor;
    j["feature_map"] = feature_map_to_json(r.map);
    j["output_scale"] = r.output_scale;
    j["noise_variance"] = r.posterior.noise_variance;
    j["weights_mean"] = encode_matrix(r.posterior.mean);
    j["cholesky"] = encode_matrix(r.posterior.chol);
  } else if (model.exact) {
    const ExactGpModel& e = *model.exact;
    if (y_train.size() != e.inputs.rows()) {
      throw ArgumentError("model_to_json: exact models need their training targets");
    }
    j["lengthscale"] = e.lengthscale;
    j["signal_variance"] = e.signal_variance;
    j["noise_variance"] = e.noise_variance;
    j["inputs"] = encode_matrix(e.inputs);
    j["targets"] = encode_matrix(y_train);
  } else {
    throw ArgumentError("model_to_json: empty model");
  }
  return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
  const char* where = "model";
  if (get_as<std::string>(j, "format", where) != "rwf.model") {
    throw DataError("model: unexpected format tag");
  }
  if (get_as<int>(j, "version", where) != kFormatVersion) throw DataError("model: unsupported version");
  TrainedModel m;
  try {
    m.method = parse_method(get_as<std::string>(j, "method", where));
  } catch (const ConfigError& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  try {
    m.hyper = hyper_from_json(field(j, "hyperparameters", where));
  } catch (const ConfigError& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  m.log_marginal = get_as<double>(j, "log_marginal", where);
  const nlohmann::json& norm = field(j, "normalization", where);
  m.stats.x_mean = to_vector(get_as<std::vector<double>>(norm, "x_mean", "normalization"));
  m.stats.x_std = to_vector(get_as<std::vector<double>>(norm, "x_std", "normalization"));
  m.stats.y_mean = get_as<double>(norm, "y_mean", "normalization");
  m.stats.y_std = get_as<double>(norm, "y_std", "normalization");
  if (m.stats.x_mean.size() != m.stats.x_std.size()) {
    throw DataError("normalization: x_mean and x_std differ in length");
  }

  if (m.method == Method::Exact) {
    const Eigen::MatrixXd X = decode_matrix(field(j, "inputs", where));
    const Eigen::MatrixXd y = decode_matrix(field(j, "targets", where));
    if (y.cols() != 1 || y.rows() != X.rows() || X.cols() != m.dim()) {
      throw DataError("model: exact-GP training data has inconsistent shapes");
    }
    try {
      m.exact = exact_gp_fit(X, y.col(0), get_as<double>(j, "lengthscale", where),
                             get_as<double>(j, "signal_variance", where),
                             get_as<double>(j, "noise_variance", where));
    } catch (const ArgumentError& e) {
      throw DataError(std::string("model: ") + e.what());
    }
    return m;
  }

  FeatureMap map = feature_map_from_json(field(j, "feature_map", where));
  BlrPosterior post;
  post.mean = decode_matrix(field(j, "weights_mean", where)).col(0);
  post.chol = decode_matrix(field(j, "cholesky", where));
  post.noise_variance = get_as<double>(j, "noise_variance", where);
  const int D = map.num_features();
  if (post.mean.size() != D || post.chol.rows() != D || post.chol.cols() != D) {
    throw DataError("model: posterior shapes do not match the feature map");
  }
  if (map.dim() != m.dim()) throw DataError("model: feature map dimension does not match");
  m.regressor = FeatureRegressor{std::move(map), get_as<double>(j, "output_scale", where),
                                 std::move(post)};
  return m;
}

nlohmann::json to_json(const MetricsBundle& row) {
  return {{"method", row.method},
          {"repeat", row.repeat},
          {"seed", row.seed},
          {"D", row.num_features},
          {"n_train", row.n_train},
          {"n_test", row.n_test},
          {"rmse", row.rmse},
          {"rmse_standardized", row.rmse_standardized},
          {"crps", row.crps},
          {"nll", row.nll},
          {"log_marginal", row.log_marginal},
          {"opt_seconds", row.opt_seconds},
          {"fit_seconds", row.fit_seconds},
          {"predict_seconds", row.predict_seconds},
          {"hyperparameters", hyper_to_json(row.hyper)}};
}

nlohmann::json to_json(const Aggregate& a) {
  return {{"method", a.method},
          {"D", a.num_features},
          {"count", a.count},
          {"rmse_mean", a.rmse_mean},
          {"rmse_std", a.rmse_std},
          {"rmse_standardized_mean", a.rmse_standardized_mean},
          {"rmse_standardized_std", a.rmse_standardized_std},
          {"crps_mean", a.crps_mean},
          {"crps_std", a.crps_std},
          {"nll_mean", a.nll_mean},
          {"nll_std", a.nll_std},
          {"fit_seconds_mean", a.fit_seconds_mean}};
}

nlohmann::json to_json(const TimingTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const TimingRow& r : table.rows) {
    rows.push_back({{"N", r.n}, {"D", r.num_features}, {"fit_seconds", r.fit_seconds}});
  }
  return {{"rows", rows}, {"slope", table.slope}};
}

std::string metrics_csv(const std::vector<MetricsBundle>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "method,D,repeat,seed,rmse,rmse_standardized,crps,nll,log_marginal,opt_seconds,"
         "fit_seconds,predict_seconds\n";
  for (const MetricsBundle& r : rows) {
    out << r.method << ',' << r.num_features << ',' << r.repeat << ',' << r.seed << ',' << r.rmse
        << ',' << r.rmse_standardized << ',' << r.crps << ',' << r.nll << ',' << r.log_marginal
        << ',' << r.opt_seconds << ',' << r.fit_seconds << ',' << r.predict_seconds << '\n';
  }
  return out.str();
}

void save_model(const std::string& path, const TrainedModel& model, const Eigen::VectorXd& y_train) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << model_to_json(model, y_train).dump(1) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": not valid JSON (" + e.what() + ")");
  }
  return model_from_json(j);
}

}  // namespace rwf
