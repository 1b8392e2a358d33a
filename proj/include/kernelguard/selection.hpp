#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kernelguard/corpus.hpp"
#include "kernelguard/features.hpp"

namespace kernelguard {

/// 2x2 contingency table for one attribute: counts[v][c] where v is the
/// binarized attribute value and c is 0 for real pages, 1 for fake pages.
struct AttributeStats {
  std::uint32_t attr_id = 0;
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  double ig = 0.0;

  std::uint64_t total() const;
};

/// Count/Flag: present iff value > 0. Ratio: 1 iff value > threshold.
int binarize(double value, AttributeKind kind, double threshold);

/// IG(A) = H(Y) - sum_v p(v) H(Y | A = v), base-2, 0*log0 = 0.
/// Throws InvalidArgument on an empty table.
double information_gain(const AttributeStats& stats);

/// Binary entropy of a two-cell count vector, in bits.
double entropy_bits(std::uint64_t a, std::uint64_t b);

struct LabeledCues {
  const RawCues* cues;
  Label label;
};

/// Per-attribute contingency tables over labelled pages. Ratio attributes
/// use the training median of that attribute as their threshold.
std::vector<AttributeStats> attribute_stats(const AttributeCatalog& catalog,
                                            std::span<const LabeledCues> pages);

/// Keeps the min(k, |catalog|) attributes with the highest IG. Ties go to
/// the higher doc_freq, then the lexicographically smaller name. Ids are
/// re-densified 0..k-1 in rank order; IG and doc_freq are stored.
AttributeCatalog select_top_k(const AttributeCatalog& catalog,
                              std::span<const LabeledCues> pages, std::size_t k);

}  // namespace kernelguard
