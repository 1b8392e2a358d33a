#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kernelguard/aggregate.hpp"
#include "kernelguard/corpus.hpp"
#include "kernelguard/features.hpp"
#include "kernelguard/kernel.hpp"
#include "kernelguard/svm.hpp"

namespace kernelguard {

inline constexpr int kModelFormatVersion = 1;

struct PipelineConfig {
  ExtractionConfig extraction;
  std::size_t select_k = 6000;
  KernelSpec kernel;
  TrainConfig train;
  AggregationRule rule = AggregationRule::MeanScore;
  double tau = 0.0;
  std::uint64_t seed = 0;
};

/// Flat-key JSON config. Unknown keys and wrongly typed values throw
/// DataError naming the key. Keys not present keep their current value.
void apply_config_json(PipelineConfig& config, const nlohmann::json& flat);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

/// Everything needed to classify a new site: the selected catalog and the
/// trained model (which carries its reference sets).
struct Detector {
  AttributeCatalog catalog;
  SvmModel model;
  std::string corpus_fingerprint;
};

struct TrainingSummary {
  std::size_t pages = 0;
  std::size_t attributes = 0;
  std::size_t support_vectors = 0;
  std::size_t kkt_violations = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double min_gram_eigenvalue = 0.0;
};

struct TrainedDetector {
  Detector detector;
  TrainingSummary summary;
};

/// Extraction -> catalog -> IG selection -> vectorize -> SVM training.
/// When `selected` is given it is used as the catalog and the first three
/// stages are skipped. The SMO seed is config.seed.
TrainedDetector train_detector(const Corpus& train, const PipelineConfig& config,
                               const AttributeCatalog* selected = nullptr);

/// Builds the training page list (vectors + site ids + binary labels)
/// for a corpus against a catalog, in corpus order.
std::vector<TrainingPage> training_pages(const Corpus& corpus, const AttributeCatalog& catalog);
ReferenceSets reference_sets(std::span<const TrainingPage> pages);

// Serialization -------------------------------------------------------------

nlohmann::ordered_json catalog_to_json(const AttributeCatalog& catalog);
AttributeCatalog catalog_from_json(const nlohmann::json& json);
void save_catalog(const AttributeCatalog& catalog, const std::filesystem::path& path);
AttributeCatalog load_catalog(const std::filesystem::path& path);

/// name, category, doc_freq, ig sorted by IG descending (catalog order
/// breaks ties).
std::string selection_report_tsv(const AttributeCatalog& catalog);

/// Deterministic model file text; equal detectors give equal bytes.
std::string detector_to_string(const Detector& detector);
Detector detector_from_string(const std::string& text);
void save_detector(const Detector& detector, const std::filesystem::path& path);
Detector load_detector(const std::filesystem::path& path);

}  // namespace kernelguard
