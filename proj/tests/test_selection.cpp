#include <cmath>
#include <map>

#include "doctest.h"
#include "kernelguard/error.hpp"
#include "kernelguard/features.hpp"
#include "kernelguard/selection.hpp"
#include "pipeline_helpers.hpp"

using namespace kernelguard;

namespace {

AttributeStats table(std::uint64_t r0, std::uint64_t f0, std::uint64_t r1, std::uint64_t f1) {
  AttributeStats s;
  s.counts[0] = {r0, f0};
  s.counts[1] = {r1, f1};
  return s;
}

// IG from an explicit sample list: H(Y) - H(Y|A) as averages of
// -log2 p(y_i) and -log2 p(y_i | a_i) over the samples.
double ig_by_enumeration(const AttributeStats& s) {
  std::vector<std::pair<int, int>> samples;  // (a, y)
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y)
      for (std::uint64_t i = 0; i < s.counts[a][y]; ++i) samples.emplace_back(a, y);
  const double n = static_cast<double>(samples.size());
  std::map<int, double> count_y;
  std::map<std::pair<int, int>, double> count_ay;
  std::map<int, double> count_a;
  for (const auto& [a, y] : samples) {
    count_y[y] += 1;
    count_a[a] += 1;
    count_ay[{a, y}] += 1;
  }
  double h_y = 0.0, h_y_a = 0.0;
  for (const auto& [a, y] : samples) {
    h_y -= std::log(count_y[y] / n) / std::log(2.0) / n;
    h_y_a -= std::log(count_ay[{a, y}] / count_a[a]) / std::log(2.0) / n;
  }
  return h_y - h_y_a;
}

std::vector<RawCues> word_pages(const std::vector<std::string>& texts) {
  std::vector<RawCues> out;
  for (const auto& t : texts) out.push_back({{"text:unigram:" + t, 1.0}});
  return out;
}

}  // namespace

TEST_CASE("binarize") {
  CHECK(binarize(3, AttributeKind::Count, 99) == 1);
  CHECK(binarize(0, AttributeKind::Count, -1) == 0);
  CHECK(binarize(1, AttributeKind::Flag, 5) == 1);
  CHECK(binarize(0.4, AttributeKind::Ratio, 0.5) == 0);
  CHECK(binarize(0.6, AttributeKind::Ratio, 0.5) == 1);
  CHECK(binarize(0.5, AttributeKind::Ratio, 0.5) == 0);
}

TEST_CASE("hand-computed information gain") {
  // 2 fake / 2 real, present on exactly both fakes
  CHECK(information_gain(table(2, 0, 0, 2)) == 1.0);
  // present on one fake and one real
  CHECK(information_gain(table(1, 1, 1, 1)) == 0.0);
  // present on every page
  CHECK(information_gain(table(0, 0, 3, 5)) == 0.0);
  CHECK_THROWS_AS(information_gain(table(0, 0, 0, 0)), InvalidArgument);
}

TEST_CASE("closed form matches enumeration on every table with total <= 12") {
  int tables = 0;
  for (std::uint64_t r0 = 0; r0 <= 12; ++r0)
    for (std::uint64_t f0 = 0; r0 + f0 <= 12; ++f0)
      for (std::uint64_t r1 = 0; r0 + f0 + r1 <= 12; ++r1)
        for (std::uint64_t f1 = 0; r0 + f0 + r1 + f1 <= 12; ++f1) {
          if (r0 + f0 + r1 + f1 == 0) continue;
          const auto s = table(r0, f0, r1, f1);
          const double ig = information_gain(s);
          CHECK(std::abs(ig - ig_by_enumeration(s)) <= 1e-12);
          const double h_y = entropy_bits(r0 + r1, f0 + f1);
          CHECK(ig >= 0.0);
          CHECK(ig <= h_y);
          CHECK(h_y <= 1.0);
          ++tables;
        }
  CHECK(tables == 1819);
}

TEST_CASE("information gain is symmetric under label swap") {
  for (std::uint64_t r0 = 0; r0 <= 6; ++r0)
    for (std::uint64_t f0 = 0; f0 <= 6; ++f0)
      for (std::uint64_t r1 = 0; r1 <= 6; ++r1)
        for (std::uint64_t f1 = 1; f1 <= 6; ++f1)
          CHECK(information_gain(table(r0, f0, r1, f1)) == information_gain(table(f0, r0, f1, r1)));
}

TEST_CASE("stats from pages") {
  const auto cues = word_pages({"fake", "fake", "real", "real"});
  const auto catalog = kgtest::catalog_of({"text:unigram:fake", "text:unigram:real", "text:unigram:none"});
  const std::vector<LabeledCues> pages{
      {&cues[0], Label::Spoof}, {&cues[1], Label::Concocted}, {&cues[2], Label::Real}, {&cues[3], Label::Real}};
  const auto stats = attribute_stats(catalog, pages);
  REQUIRE(stats.size() == 3);
  for (const auto& s : stats) CHECK(s.total() == 4);
  CHECK(stats[0].ig == 1.0);
  CHECK(stats[1].ig == 1.0);
  CHECK(stats[2].ig == 0.0);
}

TEST_CASE("ratio attributes split at the training median") {
  const std::vector<RawCues> cues{{{"link:external_ratio", 0.9}}, {{"link:external_ratio", 0.8}},
                                  {{"link:external_ratio", 0.1}}, {{"link:external_ratio", 0.2}}};
  const auto catalog = kgtest::catalog_of({"link:external_ratio"});
  const std::vector<LabeledCues> pages{
      {&cues[0], Label::Spoof}, {&cues[1], Label::Spoof}, {&cues[2], Label::Real}, {&cues[3], Label::Real}};
  const auto stats = attribute_stats(catalog, pages);
  CHECK(stats[0].counts[1][1] == 2);
  CHECK(stats[0].counts[0][0] == 2);
  CHECK(stats[0].ig == 1.0);
}

TEST_CASE("select_top_k ranks by IG, then doc_freq, then name") {
  // fakes: pages 0,1; reals: pages 2,3
  const std::vector<RawCues> cues{
      {{"text:unigram:perfect", 1}, {"text:unigram:half_a", 1}, {"text:unigram:half_c", 1}, {"text:unigram:all", 1}},
      {{"text:unigram:perfect", 1}, {"text:unigram:half_c", 1}, {"text:unigram:all", 1}},
      {{"text:unigram:half_b", 1}, {"text:unigram:half_c", 1}, {"text:unigram:all", 1}},
      {{"text:unigram:all", 1}}};
  const std::vector<LabeledCues> pages{
      {&cues[0], Label::Spoof}, {&cues[1], Label::Spoof}, {&cues[2], Label::Real}, {&cues[3], Label::Real}};
  const auto catalog = kgtest::catalog_of(
      {"text:unigram:all", "text:unigram:half_b", "text:unigram:half_a", "text:unigram:half_c", "text:unigram:perfect"});

  const auto top3 = select_top_k(catalog, pages, 3);
  REQUIRE(top3.size() == 3);
  CHECK(top3.attributes()[0].name == "text:unigram:perfect");
  CHECK(top3.attributes()[0].ig_score == 1.0);
  CHECK(top3.attributes()[1].name == "text:unigram:half_c");
  CHECK(top3.attributes()[1].doc_freq == 3);
  CHECK(top3.attributes()[2].name == "text:unigram:half_a");
  for (std::uint32_t i = 0; i < 3; ++i) CHECK(top3.attributes()[i].attr_id == i);

  const auto all = select_top_k(catalog, pages, 100);
  CHECK(all.size() == catalog.size());
  CHECK(all.attributes()[3].name == "text:unigram:half_b");
  CHECK(all.attributes()[4].name == "text:unigram:all");
  CHECK(all.attributes()[4].ig_score == 0.0);

  CHECK_THROWS_AS(select_top_k(catalog, pages, 0), InvalidArgument);
  CHECK_THROWS_AS(select_top_k(catalog, std::span<const LabeledCues>{}, 3), InvalidArgument);
}

TEST_CASE("a cap larger than the catalog keeps every attribute") {
  const auto corpus = generate_synthetic_corpus({4, 3, 3, 3, 2}).corpus;
  const auto catalog = build_catalog(corpus, {});
  const auto cues = extract_corpus_cues(corpus);
  const auto pages = kgtest::labeled(corpus, cues);
  const auto selected = select_top_k(catalog, pages, 6000);
  CHECK(catalog.size() < 6000);
  CHECK(selected.size() == catalog.size());
  for (std::size_t i = 1; i < selected.size(); ++i)
    CHECK(selected.attributes()[i - 1].ig_score >= selected.attributes()[i].ig_score);
}

TEST_CASE("selection is deterministic") {
  const auto corpus = generate_synthetic_corpus({4, 3, 3, 3, 2}).corpus;
  const auto catalog = build_catalog(corpus, {});
  const auto cues = extract_corpus_cues(corpus);
  const auto pages = kgtest::labeled(corpus, cues);
  const auto a = select_top_k(catalog, pages, 50);
  const auto b = select_top_k(catalog, pages, 50);
  CHECK(kgtest::catalog_json(a) == kgtest::catalog_json(b));
}
