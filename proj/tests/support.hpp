#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "kernelguard/corpus.hpp"
#include "kernelguard/features.hpp"

namespace kgtest {

// Self-removing scratch directory under the system temp dir.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("kgtest_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Dense values -> sparse vector, ids 0..n-1, not normalized.
inline kernelguard::FeatureVector raw_vector(const std::vector<double>& values) {
  kernelguard::FeatureVector v;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) v.entries.emplace_back(static_cast<std::uint32_t>(i), values[i]);
    sum += values[i] * values[i];
  }
  v.norm = std::sqrt(sum);
  v.all_zero = sum == 0.0;
  return v;
}

inline kernelguard::FeatureVector unit_vector(const std::vector<double>& values) {
  auto v = raw_vector(values);
  v.normalize();
  return v;
}

inline kernelguard::FeatureVector random_unit(std::mt19937_64& gen, std::size_t dim, bool nonnegative = false) {
  std::normal_distribution<double> normal;
  std::vector<double> values(dim);
  for (auto& x : values) x = nonnegative ? std::abs(normal(gen)) : normal(gen);
  return unit_vector(values);
}

inline kernelguard::Page page(std::string id, std::string url, std::string html) {
  return {std::move(id), std::move(url), std::move(html)};
}

inline kernelguard::Website site(std::string id, kernelguard::Label label, std::string root,
                                 std::vector<kernelguard::Page> pages) {
  return {std::move(id), label, std::move(root), std::move(pages)};
}

}  // namespace kgtest
