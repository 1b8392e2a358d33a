#include "kernelguard/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kernelguard/error.hpp"

namespace kernelguard {
namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

std::uint64_t AttributeStats::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

int binarize(double value, AttributeKind kind, double threshold) {
  if (kind == AttributeKind::Ratio) return value > threshold ? 1 : 0;
  return value > 0.0 ? 1 : 0;
}

double entropy_bits(std::uint64_t a, std::uint64_t b) {
  const double n = static_cast<double>(a + b);
  if (n == 0.0) return 0.0;
  double h = 0.0;
  // fixed summation order so that entropy_bits(a, b) == entropy_bits(b, a) exactly
  for (const auto count : {std::min(a, b), std::max(a, b)}) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double information_gain(const AttributeStats& stats) {
  const auto total = stats.total();
  if (total == 0) throw InvalidArgument("information gain of an empty contingency table");
  const auto& n = stats.counts;
  const double h_y = entropy_bits(n[0][0] + n[1][0], n[0][1] + n[1][1]);
  double h_y_given_a = 0.0;
  for (int v = 0; v < 2; ++v) {
    const auto row = n[v][0] + n[v][1];
    if (row == 0) continue;
    h_y_given_a += static_cast<double>(row) / static_cast<double>(total) * entropy_bits(n[v][0], n[v][1]);
  }
  return std::clamp(h_y - h_y_given_a, 0.0, h_y);
}

std::vector<AttributeStats> attribute_stats(const AttributeCatalog& catalog,
                                            std::span<const LabeledCues> pages) {
  const auto& attrs = catalog.attributes();
  std::vector<AttributeStats> stats(attrs.size());
  std::array<std::uint64_t, 2> class_totals{};
  // present[attr][class] for Count/Flag; raw values for Ratio.
  std::vector<std::array<std::uint64_t, 2>> present(attrs.size(), {0, 0});
  std::vector<std::vector<double>> ratio_values(attrs.size());
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    if (attrs[a].kind == AttributeKind::Ratio) ratio_values[a].assign(pages.size(), 0.0);
  }

  for (std::size_t p = 0; p < pages.size(); ++p) {
    const int cls = is_fake(pages[p].label) ? 1 : 0;
    ++class_totals[static_cast<std::size_t>(cls)];
    for (const auto& [name, value] : *pages[p].cues) {
      const auto id = catalog.find(name);
      if (!id) continue;
      if (attrs[*id].kind == AttributeKind::Ratio) {
        ratio_values[*id][p] = value;
      } else if (binarize(value, attrs[*id].kind, 0.0) == 1) {
        ++present[*id][static_cast<std::size_t>(cls)];
      }
    }
  }

  for (std::size_t a = 0; a < attrs.size(); ++a) {
    auto& s = stats[a];
    s.attr_id = static_cast<std::uint32_t>(a);
    if (attrs[a].kind == AttributeKind::Ratio) {
      const double threshold = median(ratio_values[a]);
      for (std::size_t p = 0; p < pages.size(); ++p) {
        const int cls = is_fake(pages[p].label) ? 1 : 0;
        const int v = binarize(ratio_values[a][p], AttributeKind::Ratio, threshold);
        ++s.counts[static_cast<std::size_t>(v)][static_cast<std::size_t>(cls)];
      }
    } else {
      for (std::size_t c = 0; c < 2; ++c) {
        s.counts[1][c] = present[a][c];
        s.counts[0][c] = class_totals[c] - present[a][c];
      }
    }
    s.ig = information_gain(s);
  }
  return stats;
}

AttributeCatalog select_top_k(const AttributeCatalog& catalog, std::span<const LabeledCues> pages,
                              std::size_t k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (pages.empty()) throw InvalidArgument("attribute selection needs at least one page");
  const auto stats = attribute_stats(catalog, pages);
  const auto& attrs = catalog.attributes();

  std::vector<std::uint32_t> doc_freq(attrs.size(), 0);
  for (const auto& page : pages) {
    for (const auto& [name, value] : *page.cues) {
      if (value <= 0.0) continue;
      if (const auto id = catalog.find(name)) ++doc_freq[*id];
    }
  }

  std::vector<std::size_t> order(attrs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (stats[a].ig != stats[b].ig) return stats[a].ig > stats[b].ig;
    if (doc_freq[a] != doc_freq[b]) return doc_freq[a] > doc_freq[b];
    return attrs[a].name < attrs[b].name;
  });
  order.resize(std::min(k, order.size()));

  std::vector<AttributeDescriptor> selected;
  selected.reserve(order.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    AttributeDescriptor d = attrs[order[rank]];
    d.attr_id = static_cast<std::uint32_t>(rank);
    d.ig_score = stats[order[rank]].ig;
    d.doc_freq = doc_freq[order[rank]];
    selected.push_back(std::move(d));
  }
  return AttributeCatalog(std::move(selected), catalog.provenance());
}

}  // namespace kernelguard
