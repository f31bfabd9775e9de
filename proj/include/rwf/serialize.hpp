#pragma once

// JSON persistence for feature maps and trained models. Dense arrays are
// stored as base64 of little-endian doubles so files round-trip bit-exactly.

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rwf/bench.hpp"
#include "rwf/features.hpp"

namespace rwf {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
// Throws DataError on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// {"rows", "cols", "data"}; data is column-major.
nlohmann::json encode_matrix(const Eigen::MatrixXd& M);
Eigen::MatrixXd decode_matrix(const nlohmann::json& j);

// Maps are stored by their generating parameters (seed, D, distribution or
// lengthscale) and re-sampled on load.
nlohmann::json feature_map_to_json(const FeatureMap& map);
FeatureMap feature_map_from_json(const nlohmann::json& j);

nlohmann::json hyper_to_json(const HyperParams& h);
HyperParams hyper_from_json(const nlohmann::json& j, const HyperParams& defaults = {});

// The exact GP keeps its normalized training set and is refitted on load.
// `y_train` is required for exact models and ignored otherwise.
nlohmann::json model_to_json(const TrainedModel& model, const Eigen::VectorXd& y_train = {});
TrainedModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MetricsBundle& row);
nlohmann::json to_json(const Aggregate& agg);
nlohmann::json to_json(const TimingTable& table);
// One line per row: method,D,repeat,seed,rmse,rmse_standardized,crps,nll,...
std::string metrics_csv(const std::vector<MetricsBundle>& rows);

void save_model(const std::string& path, const TrainedModel& model,
                const Eigen::VectorXd& y_train = {});
// DataError when the file is missing or malformed.
TrainedModel load_model(const std::string& path);

}  // namespace rwf
