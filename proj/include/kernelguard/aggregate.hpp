#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kernelguard/corpus.hpp"

namespace kernelguard {

struct Detector;

enum class AggregationRule { MeanScore, MajorityVote };
enum class Verdict { Real, Fake };

std::string_view to_string(AggregationRule rule);
std::string_view to_string(Verdict verdict);
std::optional<AggregationRule> parse_rule(std::string_view text);

struct PageDecision {
  std::string page_id;
  double decision_value = 0.0;
  Verdict label = Verdict::Real;
};

struct SiteVerdict {
  std::string site_id;
  std::vector<PageDecision> per_page;  // pages with a nonzero feature vector
  double aggregate_score = 0.0;
  Verdict verdict = Verdict::Fake;
  AggregationRule rule = AggregationRule::MeanScore;
  double threshold = 0.0;
  bool insufficient_evidence = false;
  std::size_t skipped_pages = 0;  // pages whose vector was all-zero
};

/// Applies the rule to page decisions. MeanScore: Fake iff mean >= tau.
/// MajorityVote: Fake iff #fake >= #real, score = (#fake - #real) / n.
/// A page is fake iff its decision value >= tau. Summation is
/// order-independent. An empty list yields Fake with insufficient_evidence.
SiteVerdict aggregate_pages(std::string site_id, std::vector<PageDecision> pages,
                            AggregationRule rule, double tau, std::size_t skipped_pages = 0);

/// Classifies every page independently and aggregates.
SiteVerdict classify_site(const Website& site, const Detector& detector, AggregationRule rule,
                          double tau = 0.0);

/// One JSON object per line, stable key order.
std::string to_json_line(const SiteVerdict& verdict);

}  // namespace kernelguard
