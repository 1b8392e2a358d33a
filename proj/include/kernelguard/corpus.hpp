#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kernelguard {

/// Ground-truth class of a website. Spoof sites replicate an existing
/// legitimate site; concocted sites pose as a unique business.
enum class Label { Real, Concocted, Spoof };

/// Binary class used by the classifier: Real -> -1, any fake -> +1.
constexpr int binary(Label label) { return label == Label::Real ? -1 : +1; }
constexpr bool is_fake(Label label) { return label != Label::Real; }

std::string_view to_string(Label label);
/// Parses "real" | "concocted" | "spoof".
std::optional<Label> parse_label(std::string_view text);

inline constexpr Label kAllLabels[] = {Label::Real, Label::Concocted, Label::Spoof};

struct Page {
  std::string page_id;
  std::string url;
  std::string html;  // UTF-8, invalid sequences already replaced

  bool operator==(const Page&) const = default;
};

struct Website {
  std::string site_id;
  Label label = Label::Real;
  std::string root_url;
  std::vector<Page> pages;

  bool operator==(const Website&) const = default;
};

struct Corpus {
  std::vector<Website> websites;
  std::string provenance;

  std::size_t page_count() const;
  std::size_t count(Label label) const;
  const Website* find(std::string_view site_id) const;
};

/// Stable fingerprint over site ids, labels, page ids, urls and markup.
std::string corpus_fingerprint(const Corpus& corpus);

/// Checks the Website invariants: non-empty pages, distinct page ids,
/// absolute URLs. Throws DataError describing the first violation.
void validate_website(const Website& site);

struct LoadResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

/// Reads `<root>/<dir>/manifest.json` + pages for every subdirectory.
/// Malformed sites are skipped and reported in `warnings`; a missing root
/// or a duplicate site_id throws DataError. Sites are ordered by site_id.
LoadResult load_corpus(const std::filesystem::path& root);

/// Loads a single site directory (one manifest). Throws DataError when the
/// site is unusable.
Website load_site(const std::filesystem::path& site_dir);

/// Writes the on-disk layout read by load_corpus. Existing site
/// directories with the same id are overwritten.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);
void write_site(const Website& site, const std::filesystem::path& site_dir);

/// Stratified train/test split by Label. The test half receives
/// round(test_fraction * n) sites of each label present.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double test_fraction,
                                       std::uint64_t seed);

struct SynthSpec {
  int n_real = 0;
  int n_spoof = 0;
  int n_concocted = 0;
  int pages_per_site = 1;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  Corpus corpus;
  /// spoof site_id -> site_id of the real site it replicates.
  std::map<std::string, std::string> spoof_sources;
  /// spoof site_id -> (source host, spoof host) used for substitution.
  std::map<std::string, std::pair<std::string, std::string>> host_swaps;
};

/// Desk-scale generator. Real sites share a commerce vocabulary plus
/// per-brand words; each spoof copies one real site's pages with the host
/// replaced and fraud markup injected; concocted sites use a disjoint
/// vocabulary and carry fraud markup without duplicating anything.
SyntheticCorpus generate_synthetic_corpus(const SynthSpec& spec);

}  // namespace kernelguard
