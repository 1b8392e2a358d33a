#include "kernelguard/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kernelguard/error.hpp"
#include "kernelguard/pipeline.hpp"
#include "kernelguard/rng.hpp"

namespace kernelguard {
namespace {

std::size_t label_index(Label label) {
  switch (label) {
    case Label::Real: return 0;
    case Label::Concocted: return 1;
    case Label::Spoof: return 2;
  }
  return 0;
}

std::optional<double> recall(std::uint64_t hit, std::uint64_t total) {
  if (total == 0) return std::nullopt;
  return static_cast<double>(hit) / static_cast<double>(total);
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * *v);
  return buf;
}

}  // namespace

EvalReport evaluate(const std::vector<SiteVerdict>& verdicts, const std::vector<SiteTruth>& truth) {
  std::map<std::string, Label> expected;
  for (const auto& t : truth) {
    if (!expected.emplace(t.site_id, t.label).second) throw DataError("duplicate truth for site '" + t.site_id + "'");
  }
  if (verdicts.size() != expected.size()) {
    throw DataError("verdict count " + std::to_string(verdicts.size()) + " does not match truth count " +
                    std::to_string(expected.size()));
  }
  EvalReport report;
  std::set<std::string> seen;
  for (const auto& v : verdicts) {
    const auto it = expected.find(v.site_id);
    if (it == expected.end()) throw DataError("no ground truth for site '" + v.site_id + "'");
    if (!seen.insert(v.site_id).second) throw DataError("site '" + v.site_id + "' has two verdicts");
    const auto predicted = v.verdict == Verdict::Fake ? 1u : 0u;
    ++report.confusion[label_index(it->second)][predicted];
    ++report.total;
    if ((predicted == 1) == is_fake(it->second)) ++report.correct;
  }
  const auto& c = report.confusion;
  report.overall_accuracy =
      report.total == 0 ? 0.0 : static_cast<double>(report.correct) / static_cast<double>(report.total);
  report.detection_rate_real = recall(c[0][0], c[0][0] + c[0][1]);
  report.detection_rate_concocted = recall(c[1][1], c[1][0] + c[1][1]);
  report.detection_rate_spoof = recall(c[2][1], c[2][0] + c[2][1]);
  report.detection_rate_fake = recall(c[1][1] + c[2][1], c[1][0] + c[1][1] + c[2][0] + c[2][1]);
  return report;
}

std::vector<SiteTruth> truth_of(const Corpus& corpus) {
  std::vector<SiteTruth> out;
  out.reserve(corpus.websites.size());
  for (const auto& site : corpus.websites) out.push_back({site.site_id, site.label});
  return out;
}

std::string to_json(const EvalReport& r) {
  nlohmann::ordered_json confusion;
  for (Label label : kAllLabels) {
    const auto& row = r.confusion[label_index(label)];
    confusion[std::string(to_string(label))] = {{"real", row[0]}, {"fake", row[1]}};
  }
  nlohmann::ordered_json out{{"total", r.total},
                             {"correct", r.correct},
                             {"overall_accuracy", r.overall_accuracy},
                             {"detection_rate_fake", optional_json(r.detection_rate_fake)},
                             {"detection_rate_real", optional_json(r.detection_rate_real)},
                             {"detection_rate_spoof", optional_json(r.detection_rate_spoof)},
                             {"detection_rate_concocted", optional_json(r.detection_rate_concocted)},
                             {"confusion", std::move(confusion)}};
  return out.dump(2);
}

std::string to_table(const EvalReport& r) {
  std::ostringstream out;
  char line[128];
  out << "true \\ predicted      real      fake\n";
  for (Label label : kAllLabels) {
    const auto& row = r.confusion[label_index(label)];
    std::snprintf(line, sizeof line, "%-18s %8llu  %8llu\n", std::string(to_string(label)).c_str(),
                  static_cast<unsigned long long>(row[0]), static_cast<unsigned long long>(row[1]));
    out << line;
  }
  std::snprintf(line, sizeof line, "overall accuracy   %.2f%% (%llu/%llu)\n", 100.0 * r.overall_accuracy,
                static_cast<unsigned long long>(r.correct), static_cast<unsigned long long>(r.total));
  out << line;
  out << "detection rate     fake " << percent(r.detection_rate_fake) << "  real " << percent(r.detection_rate_real)
      << "  spoof " << percent(r.detection_rate_spoof) << "  concocted " << percent(r.detection_rate_concocted)
      << '\n';
  return out.str();
}

std::vector<std::string> reference_site_ids(const ReferenceSets& refs) {
  std::set<std::string> ids(refs.real_sites.begin(), refs.real_sites.end());
  ids.insert(refs.fake_sites.begin(), refs.fake_sites.end());
  return {ids.begin(), ids.end()};
}

std::vector<std::string> leaked_sites(const Corpus& test, const ReferenceSets& refs) {
  const auto ids = reference_site_ids(refs);
  std::vector<std::string> out;
  for (const auto& site : test.websites) {
    if (std::binary_search(ids.begin(), ids.end(), site.site_id)) out.push_back(site.site_id);
  }
  return out;
}

std::vector<int> assign_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("cross-validation needs k >= 2");
  for (Label label : kAllLabels) {
    const auto n = corpus.count(label);
    if (n > 0 && n < static_cast<std::size_t>(k)) {
      throw InvalidArgument("label '" + std::string(to_string(label)) + "' has " + std::to_string(n) +
                            " sites, fewer than k=" + std::to_string(k));
    }
  }
  Rng rng(seed);
  std::vector<int> folds(corpus.websites.size(), -1);
  std::size_t dealt = 0;
  for (Label label : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.websites.size(); ++i) {
      if (corpus.websites[i].label == label) members.push_back(i);
    }
    rng.shuffle(members);
    for (auto idx : members) folds[idx] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  return folds;
}

CrossValidationResult cross_validate(const Corpus& corpus, int k, const PipelineConfig& config,
                                     std::uint64_t seed) {
  const auto folds = assign_folds(corpus, k, seed);
  CrossValidationResult result;
  for (int fold = 0; fold < k; ++fold) {
    Corpus train, test;
    train.provenance = corpus.provenance;
    test.provenance = corpus.provenance;
    for (std::size_t i = 0; i < corpus.websites.size(); ++i) {
      (folds[i] == fold ? test : train).websites.push_back(corpus.websites[i]);
    }

    PipelineConfig fold_config = config;
    fold_config.seed = seed;
    const auto trained = train_detector(train, fold_config);

    FoldResult fr;
    const auto& refs = trained.detector.model.reference_sets;
    fr.reference_sites = reference_site_ids(refs);
    const auto leaked = leaked_sites(test, refs);
    if (!leaked.empty()) {
      throw Error("fold " + std::to_string(fold) + ": test site '" + leaked.front() +
                  "' leaked into the training reference sets");
    }
    for (const auto& site : test.websites) {
      fr.test_sites.push_back(site.site_id);
      fr.verdicts.push_back(classify_site(site, trained.detector, config.rule, config.tau));
    }
    fr.report = evaluate(fr.verdicts, truth_of(test));
    result.folds.push_back(std::move(fr));
  }

  double sum = 0.0;
  for (const auto& f : result.folds) sum += f.report.overall_accuracy;
  result.mean_accuracy = sum / static_cast<double>(k);
  double sq = 0.0;
  for (const auto& f : result.folds) {
    const double d = f.report.overall_accuracy - result.mean_accuracy;
    sq += d * d;
  }
  result.stddev_accuracy = std::sqrt(sq / static_cast<double>(k - 1));
  return result;
}

}  // namespace kernelguard
