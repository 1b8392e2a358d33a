#include "kernelguard/aggregate.hpp"

#include <algorithm>

#include "json.hpp"
#include "kernelguard/pipeline.hpp"

namespace kernelguard {

std::string_view to_string(AggregationRule rule) {
  return rule == AggregationRule::MeanScore ? "mean" : "majority";
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::Fake ? "fake" : "real"; }

std::optional<AggregationRule> parse_rule(std::string_view text) {
  if (text == "mean" || text == "mean_score") return AggregationRule::MeanScore;
  if (text == "majority" || text == "majority_vote") return AggregationRule::MajorityVote;
  return std::nullopt;
}

SiteVerdict aggregate_pages(std::string site_id, std::vector<PageDecision> pages, AggregationRule rule,
                            double tau, std::size_t skipped_pages) {
  SiteVerdict v;
  v.site_id = std::move(site_id);
  v.rule = rule;
  v.threshold = tau;
  v.skipped_pages = skipped_pages;
  for (auto& page : pages) page.label = page.decision_value >= tau ? Verdict::Fake : Verdict::Real;
  v.per_page = std::move(pages);
  if (v.per_page.empty()) {
    v.insufficient_evidence = true;
    v.verdict = Verdict::Fake;
    return v;
  }

  const auto n = static_cast<double>(v.per_page.size());
  if (rule == AggregationRule::MeanScore) {
    // Sum in sorted order so the verdict does not depend on page order.
    std::vector<double> values;
    values.reserve(v.per_page.size());
    for (const auto& page : v.per_page) values.push_back(page.decision_value);
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double value : values) sum += value;
    v.aggregate_score = sum / n;
    v.verdict = v.aggregate_score >= tau ? Verdict::Fake : Verdict::Real;
  } else {
    const auto fake = std::count_if(v.per_page.begin(), v.per_page.end(),
                                    [](const PageDecision& p) { return p.label == Verdict::Fake; });
    const auto real = static_cast<std::ptrdiff_t>(v.per_page.size()) - fake;
    v.aggregate_score = static_cast<double>(fake - real) / n;
    v.verdict = fake >= real ? Verdict::Fake : Verdict::Real;
  }
  return v;
}

SiteVerdict classify_site(const Website& site, const Detector& detector, AggregationRule rule, double tau) {
  std::vector<PageDecision> decisions;
  std::size_t skipped = 0;
  for (const auto& page : site.pages) {
    const FeatureVector x = vectorize_page(extract_page_cues(page, site), detector.catalog);
    if (x.all_zero) {
      ++skipped;
      continue;
    }
    decisions.push_back({page.page_id, decision_value(detector.model, x), Verdict::Real});
  }
  return aggregate_pages(site.site_id, std::move(decisions), rule, tau, skipped);
}

std::string to_json_line(const SiteVerdict& v) {
  nlohmann::ordered_json pages = nlohmann::ordered_json::array();
  for (const auto& page : v.per_page) {
    pages.push_back({{"page_id", page.page_id},
                     {"decision_value", page.decision_value},
                     {"label", std::string(to_string(page.label))}});
  }
  nlohmann::ordered_json out{{"site_id", v.site_id},
                             {"verdict", std::string(to_string(v.verdict))},
                             {"aggregate_score", v.aggregate_score},
                             {"rule", std::string(to_string(v.rule))},
                             {"threshold", v.threshold},
                             {"insufficient_evidence", v.insufficient_evidence},
                             {"skipped_pages", v.skipped_pages},
                             {"per_page", std::move(pages)}};
  return out.dump();
}

}  // namespace kernelguard
