#include "kernelguard/kernel.hpp"

#include <algorithm>
#include <limits>

#include "kernelguard/error.hpp"

namespace kernelguard {
namespace {

struct AvgMax {
  double avg = 0.0;
  double max = 0.0;
};

AvgMax summarize(const FeatureVector& x, const std::vector<FeatureVector>& pages,
                 const std::vector<std::string>& sites, std::optional<std::string_view> exclude,
                 std::string_view list_name) {
  double sum = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (exclude && sites[i] == *exclude) continue;
    const double s = base_similarity(x, pages[i]).value;
    sum += s;
    best = std::max(best, s);
    ++used;
  }
  if (used == 0) {
    throw DataError(std::string(list_name) + " reference list is empty" +
                    (exclude ? " after excluding site '" + std::string(*exclude) + "'" : std::string()));
  }
  return {sum / static_cast<double>(used), best};
}

}  // namespace

void ReferenceSets::add(FeatureVector page, std::string site_id, bool fake) {
  if (fake) {
    fake_pages.push_back(std::move(page));
    fake_sites.push_back(std::move(site_id));
  } else {
    real_pages.push_back(std::move(page));
    real_sites.push_back(std::move(site_id));
  }
}

double MetaFeatures::dot(const MetaFeatures& o) const {
  return avg_real * o.avg_real + max_real * o.max_real + avg_fake * o.avg_fake + max_fake * o.max_fake;
}

void KernelSpec::validate() const {
  if (!(theta_base >= 0.0) || !(theta_meta >= 0.0)) {
    throw InvalidArgument("kernel weights must be non-negative");
  }
  if (!(theta_base + theta_meta > 0.0)) throw InvalidArgument("kernel weights must not both be zero");
}

Similarity base_similarity(const FeatureVector& x, const FeatureVector& z) {
  if (x.all_zero || z.all_zero) return {0.0, true};
  return {dot(x, z), false};
}

MetaFeatures meta_features(const FeatureVector& x, const ReferenceSets& refs, const KernelSpec& spec,
                           std::optional<std::string_view> exclude_site) {
  if (!spec.leave_site_out) exclude_site.reset();
  const auto real = summarize(x, refs.real_pages, refs.real_sites, exclude_site, "real");
  const auto fake = summarize(x, refs.fake_pages, refs.fake_sites, exclude_site, "fake");
  return {real.avg, real.max, fake.avg, fake.max};
}

double composite_kernel(const FeatureVector& x, const FeatureVector& z, const MetaFeatures& phi_x,
                        const MetaFeatures& phi_z, const KernelSpec& spec) {
  double k = 0.0;
  if (spec.theta_base != 0.0) k += spec.theta_base * base_similarity(x, z).value;
  if (spec.theta_meta != 0.0) k += spec.theta_meta * phi_x.dot(phi_z);
  return k;
}

std::vector<MetaFeatures> training_meta_features(std::span<const FeatureVector> pages,
                                                 std::span<const std::string> site_ids,
                                                 const ReferenceSets& refs, const KernelSpec& spec) {
  if (pages.size() != site_ids.size()) throw InvalidArgument("pages and site_ids differ in length");
  std::vector<MetaFeatures> phis;
  phis.reserve(pages.size());
  for (std::size_t i = 0; i < pages.size(); ++i) {
    phis.push_back(meta_features(pages[i], refs, spec, site_ids[i]));
  }
  return phis;
}

Eigen::MatrixXd gram_matrix(std::span<const FeatureVector> pages, const ReferenceSets& refs,
                            const KernelSpec& spec, std::span<const std::string> site_ids) {
  if (pages.empty()) throw InvalidArgument("gram matrix of zero pages");
  const auto phis = training_meta_features(pages, site_ids, refs, spec);
  return gram_matrix(pages, phis, spec);
}

Eigen::MatrixXd gram_matrix(std::span<const FeatureVector> pages, std::span<const MetaFeatures> phis,
                            const KernelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(pages.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double k = composite_kernel(pages[ui], pages[uj], phis[ui], phis[uj], spec);
      g(i, j) = k;
      g(j, i) = k;
    }
  }
  return g;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace kernelguard
