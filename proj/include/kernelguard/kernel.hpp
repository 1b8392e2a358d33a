#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kernelguard/features.hpp"

namespace kernelguard {

/// Training pages split by binary class, with the owning site of each
/// page. Used both to compute meta-features and, at prediction time, to
/// compare a new page against everything seen in training.
struct ReferenceSets {
  std::vector<FeatureVector> real_pages;
  std::vector<std::string> real_sites;
  std::vector<FeatureVector> fake_pages;
  std::vector<std::string> fake_sites;

  void add(FeatureVector page, std::string site_id, bool fake);
};

/// Average and maximum cosine similarity of a page against the real and
/// fake reference pages.
struct MetaFeatures {
  double avg_real = 0.0;
  double max_real = 0.0;
  double avg_fake = 0.0;
  double max_fake = 0.0;

  std::array<double, 4> as_array() const { return {avg_real, max_real, avg_fake, max_fake}; }
  double dot(const MetaFeatures& other) const;
  bool operator==(const MetaFeatures&) const = default;
};

/// K(x, z) = theta_base * <x, z> + theta_meta * <phi(x), phi(z)>.
struct KernelSpec {
  double theta_base = 1.0;
  double theta_meta = 1.0;
  bool leave_site_out = true;

  /// Throws InvalidArgument for negative weights or a zero sum.
  void validate() const;
};

struct Similarity {
  double value = 0.0;
  bool degenerate = false;  // one side was an all-zero vector
};

/// Cosine of two normalized vectors from the same catalog.
Similarity base_similarity(const FeatureVector& x, const FeatureVector& z);

/// Mean and max similarity against each reference list. With
/// spec.leave_site_out and `exclude_site` set, pages of that site are
/// skipped. Throws DataError when a list is empty after exclusion.
MetaFeatures meta_features(const FeatureVector& x, const ReferenceSets& refs, const KernelSpec& spec,
                           std::optional<std::string_view> exclude_site = std::nullopt);

double composite_kernel(const FeatureVector& x, const FeatureVector& z, const MetaFeatures& phi_x,
                        const MetaFeatures& phi_z, const KernelSpec& spec);

/// Leave-site-out meta-features for every page.
std::vector<MetaFeatures> training_meta_features(std::span<const FeatureVector> pages,
                                                 std::span<const std::string> site_ids,
                                                 const ReferenceSets& refs,
                                                 const KernelSpec& spec);

/// Gram matrix of the composite kernel over `pages` using per-page
/// leave-site-out meta-features. Exactly symmetric.
Eigen::MatrixXd gram_matrix(std::span<const FeatureVector> pages, const ReferenceSets& refs,
                            const KernelSpec& spec, std::span<const std::string> site_ids);

/// Same, from meta-features that were already computed.
Eigen::MatrixXd gram_matrix(std::span<const FeatureVector> pages,
                            std::span<const MetaFeatures> phis, const KernelSpec& spec);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace kernelguard
