#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kernelguard/aggregate.hpp"
#include "kernelguard/corpus.hpp"
#include "kernelguard/kernel.hpp"

namespace kernelguard {

struct PipelineConfig;

struct SiteTruth {
  std::string site_id;
  Label label;
};

/// Site-level evaluation. Detection rate is the recall of one class;
/// it is empty when the class does not occur.
struct EvalReport {
  // confusion[true label][predicted]: predicted 0 = Real, 1 = Fake.
  std::array<std::array<std::uint64_t, 2>, 3> confusion{};
  std::uint64_t total = 0;
  std::uint64_t correct = 0;
  double overall_accuracy = 0.0;
  std::optional<double> detection_rate_fake;
  std::optional<double> detection_rate_real;
  std::optional<double> detection_rate_spoof;
  std::optional<double> detection_rate_concocted;
};

/// Verdicts and truth are matched by site_id (order may differ); a missing
/// or extra site throws DataError.
EvalReport evaluate(const std::vector<SiteVerdict>& verdicts, const std::vector<SiteTruth>& truth);

std::vector<SiteTruth> truth_of(const Corpus& corpus);

std::string to_json(const EvalReport& report);
std::string to_table(const EvalReport& report);

struct FoldResult {
  std::vector<std::string> test_sites;
  std::vector<std::string> reference_sites;  // distinct sites in the trained reference sets
  EvalReport report;
  std::vector<SiteVerdict> verdicts;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;  // sample standard deviation over folds
};

/// Sorted distinct site ids contributing pages to `refs`.
std::vector<std::string> reference_site_ids(const ReferenceSets& refs);

/// Test sites whose id appears in the reference sets.
std::vector<std::string> leaked_sites(const Corpus& test, const ReferenceSets& refs);

/// Stratified site-level fold assignment: sites of each label are shuffled
/// with `seed` and dealt round-robin, continuing the deal across labels.
/// Returns fold index per site in corpus order.
std::vector<int> assign_folds(const Corpus& corpus, int k, std::uint64_t seed);

/// k-fold cross-validation. Each fold rebuilds catalog, selection,
/// references and model from its training sites only, and throws if a
/// test site shows up in the training reference sets.
CrossValidationResult cross_validate(const Corpus& corpus, int k, const PipelineConfig& config,
                                     std::uint64_t seed);

}  // namespace kernelguard
