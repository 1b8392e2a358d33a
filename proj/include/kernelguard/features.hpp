#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kernelguard/corpus.hpp"

namespace kernelguard {

/// The five fraud-cue families. Every attribute belongs to exactly one.
enum class Category { Text, SourceCode, Url, Image, Linkage };
enum class AttributeKind { Count, Ratio, Flag };

std::string_view to_string(Category category);
std::string_view to_string(AttributeKind kind);
std::optional<Category> parse_category(std::string_view text);
std::optional<AttributeKind> parse_kind(std::string_view text);

/// Category and kind implied by a cue name ("url:ip_host" -> Url/Flag).
/// Open-vocabulary cues (unigrams, tags, external domains) are Counts.
std::optional<Category> cue_category(std::string_view name);
AttributeKind cue_kind(std::string_view name);

/// Name -> value for one page, before catalog indexing.
using RawCues = std::map<std::string, double, std::less<>>;

// Open-vocabulary prefixes.
inline constexpr std::string_view kUnigramPrefix = "text:unigram:";
inline constexpr std::string_view kTagPrefix = "src:tag:";
inline constexpr std::string_view kExternalDomainPrefix = "link:ext_domain:";

/// Structural cues present in every catalog, in catalog order.
std::span<const std::string_view> fixed_cue_names();

/// Extracts all five cue categories from one page. `site` supplies the
/// sibling URLs used by the linkage cues. Bad markup never throws: the
/// extractor falls back to text and URL cues and sets "src:parse_failed".
RawCues extract_page_cues(const Page& page, const Website& site);

/// One RawCues per page, in corpus order (site by site).
std::vector<RawCues> extract_corpus_cues(const Corpus& corpus);

struct AttributeDescriptor {
  std::uint32_t attr_id = 0;
  Category category = Category::Text;
  std::string name;
  AttributeKind kind = AttributeKind::Count;
  double ig_score = 0.0;
  std::uint32_t doc_freq = 0;  // training pages with a nonzero value
};

class AttributeCatalog {
 public:
  AttributeCatalog() = default;
  /// Takes descriptors in attr_id order; throws DataError if ids are not
  /// 0..N-1 or names repeat.
  AttributeCatalog(std::vector<AttributeDescriptor> attributes, std::string provenance);

  const std::vector<AttributeDescriptor>& attributes() const { return attributes_; }
  std::size_t size() const { return attributes_.size(); }
  const std::string& provenance() const { return provenance_; }
  std::optional<std::uint32_t> find(std::string_view name) const;

  /// Hash of (name, kind) in attr_id order. Vectors carry it so a model
  /// can refuse vectors built against another catalog.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<AttributeDescriptor> attributes_;
  std::string provenance_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t fingerprint_ = 0;
};

struct ExtractionConfig {
  int max_vocab_per_category = 2000;
  int min_doc_freq = 2;
};

/// Fixed structural cues plus open vocabularies admitted at
/// doc_freq >= min_doc_freq, capped per vocabulary by descending doc_freq
/// with lexicographic tie-break.
AttributeCatalog build_catalog(const Corpus& train, const ExtractionConfig& config);
AttributeCatalog build_catalog(std::span<const RawCues> page_cues, std::string provenance,
                               const ExtractionConfig& config);

/// Sparse page vector. Entries are sorted by attr_id and hold only nonzero
/// values.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  double norm = 0.0;  // L2 norm of `entries`
  bool all_zero = true;
  std::uint64_t catalog_fingerprint = 0;

  /// Scales to unit L2 norm. An all-zero vector stays zero and flagged.
  void normalize();
};

double dot(const FeatureVector& a, const FeatureVector& b);

/// Drops cues absent from the catalog, applies ln(1+x) to counts and
/// returns the L2-normalized vector.
FeatureVector vectorize_page(const RawCues& cues, const AttributeCatalog& catalog);

}  // namespace kernelguard
