#pragma once

#include <Eigen/Core>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include <unistd.h>

#include "rwf/features.hpp"

namespace rwf::test {

inline SamplingDistribution box1(double s_min, double s_max, double lo = -1.0, double hi = 1.0) {
  return {s_min, s_max, Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)};
}

inline std::span<const double> one(const double& x) { return {&x, 1}; }

// A file under the temp directory, removed on scope exit.
class TempFile {
 public:
  explicit TempFile(const std::string& suffix, const std::string& content = "") {
    static std::atomic<int> counter{0};
    path_ = (std::filesystem::temp_directory_path() /
             ("rwf_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + suffix))
                .string();
    if (!content.empty()) {
      std::ofstream(path_, std::ios::binary) << content;
    }
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rwf::test
