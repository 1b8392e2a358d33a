// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kernelguard/error.hpp"
#include "kernelguard/evalharness.hpp"
#include "kernelguard/pipeline.hpp"
#include "kernelguard/selection.hpp"
#include "qp_oracle.hpp"
#include "support.hpp"

using namespace kernelguard;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& id, const std::string& title, const Outcome& o) {
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << title << ": " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

template <typename F>
void run(const std::string& id, const std::string& title, F&& body) {
  try {
    report(id, title, body());
  } catch (const std::exception& e) {
    report(id, title, {false, std::string("exception: ") + e.what()});
  }
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// AC1 ------------------------------------------------------------------------

constexpr SynthSpec kBenchCorpus{40, 30, 30, 5, 1};
constexpr std::uint64_t kFoldSeed = 1;

Outcome accuracy_on_synthetic() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = generate_synthetic_corpus(kBenchCorpus).corpus;
  const auto cv = cross_validate(corpus, 5, PipelineConfig{}, kFoldSeed);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<SiteVerdict> verdicts;
  for (const auto& fold : cv.folds) verdicts.insert(verdicts.end(), fold.verdicts.begin(), fold.verdicts.end());
  const auto pooled = evaluate(verdicts, truth_of(corpus));
  const double spoof = pooled.detection_rate_spoof.value_or(0.0);
  const double concocted = pooled.detection_rate_concocted.value_or(0.0);

  const bool pass = cv.mean_accuracy >= 0.95 && seconds < 120.0 && spoof >= concocted - 0.05;
  return {pass, "mean fold accuracy " + fmt(cv.mean_accuracy) + " (>= 0.95), stddev " + fmt(cv.stddev_accuracy) +
                    ", pooled accuracy " + fmt(pooled.overall_accuracy) + ", spoof rate " + fmt(spoof) +
                    " vs concocted " + fmt(concocted) + " (>= concocted - 0.05), " + fmt(seconds) + "s (< 120s)"};
}

// AC2 ------------------------------------------------------------------------

Outcome smo_vs_oracle() {
  std::mt19937_64 gen(20240);
  double worst = 0.0;
  int sign_mismatches = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const auto p = kgtest::random_tiny_problem(gen);
    const auto oracle = kgtest::qp_oracle(p.gram, p.y, p.c);
    const auto dual = solve_dual(p.gram, p.y, {p.c, 1e-10, 50, static_cast<std::uint64_t>(instance)});
    worst = std::max(worst, std::abs(dual.objective - oracle.objective));
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      double f = dual.bias;
      for (std::size_t j = 0; j < p.y.size(); ++j)
        f += dual.alpha[j] * p.y[j] * p.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if ((f >= 0.0) != (oracle.decision[i] >= 0.0)) ++sign_mismatches;
    }
  }

  // 1-D pair x = -1 (real), x = +1 (fake) under the plain cosine kernel.
  std::vector<TrainingPage> pair{{kgtest::raw_vector({-1.0}), "a", -1}, {kgtest::raw_vector({1.0}), "b", 1}};
  const auto two = train(pair, {}, {1.0, 0.0, true}, {});
  const auto& svs = two.model.support_vectors;
  const bool exact = svs.size() == 2 && svs[0].alpha == 0.5 && svs[1].alpha == 0.5 && two.model.bias == 0.0;

  return {worst <= 1e-6 && sign_mismatches == 0 && exact,
          "50 instances, max |objective gap| " + fmt(worst) + " (<= 1e-6), sign mismatches " +
              std::to_string(sign_mismatches) + ", two-point case " + (exact ? "alpha=(0.5,0.5) b=0" : "not exact")};
}

// AC3 ------------------------------------------------------------------------

Outcome kkt_after_training() {
  std::size_t runs = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto corpus = generate_synthetic_corpus({8, 6, 6, 3, seed}).corpus;
    const auto catalog = train_detector(corpus, PipelineConfig{}).detector.catalog;
    const auto pages = training_pages(corpus, catalog);
    const auto refs = reference_sets(pages);
    for (double c : {0.1, 1.0, 10.0}) {
      const auto result = train(pages, refs, {}, {c, 1e-3, 50, seed});
      violations += kkt_report(result.model, pages, result.gram, 1e-3).size();
      ++runs;
    }
  }
  return {violations == 0, std::to_string(runs) + " trainings, " + std::to_string(violations) +
                               " KKT violations at tol 1e-3"};
}

// AC4 ------------------------------------------------------------------------

Outcome gram_psd() {
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto corpus = generate_synthetic_corpus({6, 5, 5, 3, seed}).corpus;
    const auto pages = training_pages(corpus, build_catalog(corpus, {}));
    const auto refs = reference_sets(pages);
    std::vector<std::size_t> idx(pages.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 gen(seed);
    std::shuffle(idx.begin(), idx.end(), gen);
    std::vector<FeatureVector> xs;
    std::vector<std::string> sites;
    for (std::size_t i = 0; i < 30; ++i) {
      xs.push_back(pages[idx[i]].x);
      sites.push_back(pages[idx[i]].site_id);
    }
    worst = std::min(worst, min_eigenvalue(gram_matrix(xs, refs, {}, sites)));
  }
  return {worst >= -1e-8, "20 seeds x 30 pages, smallest eigenvalue " + fmt(worst) + " (>= -1e-8)"};
}

// AC5 ------------------------------------------------------------------------

// Label entropy minus conditional entropy, counted page by page.
double enumerated_ig(int fake1, int real1, int fake0, int real0) {
  std::vector<std::pair<int, int>> pages;  // (attribute, fake)
  for (int i = 0; i < fake1; ++i) pages.emplace_back(1, 1);
  for (int i = 0; i < real1; ++i) pages.emplace_back(1, 0);
  for (int i = 0; i < fake0; ++i) pages.emplace_back(0, 1);
  for (int i = 0; i < real0; ++i) pages.emplace_back(0, 0);
  const double n = static_cast<double>(pages.size());
  auto h = [](const std::vector<int>& labels) {
    double out = 0.0;
    for (int c : {0, 1}) {
      const double p = static_cast<double>(std::count(labels.begin(), labels.end(), c)) / labels.size();
      if (p > 0) out -= p * std::log2(p);
    }
    return out;
  };
  std::vector<int> all, side[2];
  for (const auto& [a, y] : pages) {
    all.push_back(y);
    side[a].push_back(y);
  }
  double conditional = 0.0;
  for (const auto& s : side)
    if (!s.empty()) conditional += s.size() / n * h(s);
  return h(all) - conditional;
}

Outcome information_gain_oracle() {
  int tables = 0;
  double worst = 0.0;
  for (int total = 1; total <= 12; ++total)
    for (int a = 0; a <= total; ++a)
      for (int b = 0; a + b <= total; ++b)
        for (int c = 0; a + b + c <= total; ++c) {
          const int d = total - a - b - c;
          AttributeStats s;
          s.counts[1] = {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(a)};
          s.counts[0] = {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(c)};
          worst = std::max(worst, std::abs(information_gain(s) - enumerated_ig(a, b, c, d)));
          ++tables;
        }
  AttributeStats split;
  split.counts[1] = {0, 2};
  split.counts[0] = {2, 0};
  const double perfect = information_gain(split);
  bool empty_rejected = false;
  try {
    information_gain(AttributeStats{});
  } catch (const Error&) {
    empty_rejected = true;
  }
  return {worst <= 1e-12 && perfect == 1.0 && empty_rejected, std::to_string(tables) + " tables, max |error| " + fmt(worst) +
                                                " (<= 1e-12), perfect split " + fmt(perfect) + " bit, empty table rejected: " +
                                                (empty_rejected ? "yes" : "no")};
}

// AC6 ------------------------------------------------------------------------

Outcome duplication_signal() {
  const auto synth = generate_synthetic_corpus(kBenchCorpus);
  const auto& corpus = synth.corpus;
  const auto folds = assign_folds(corpus, 5, kFoldSeed);
  std::size_t checked = 0, below = 0;
  double lowest = 1.0;
  for (int fold = 0; fold < 5; ++fold) {
    Corpus train_set, test_set;
    for (std::size_t i = 0; i < corpus.websites.size(); ++i)
      (folds[i] == fold ? test_set : train_set).websites.push_back(corpus.websites[i]);
    const auto detector = train_detector(train_set, PipelineConfig{}).detector;
    const auto& refs = detector.model.reference_sets;
    const std::set<std::string> fake_refs(refs.fake_sites.begin(), refs.fake_sites.end());

    for (const auto& site : test_set.websites) {
      if (site.label != Label::Spoof) continue;
      const auto& source = synth.spoof_sources.at(site.site_id);
      const bool duplicated = std::any_of(fake_refs.begin(), fake_refs.end(), [&](const std::string& ref) {
        const auto it = synth.spoof_sources.find(ref);
        return it != synth.spoof_sources.end() && it->second == source;
      });
      if (!duplicated) continue;
      for (const auto& page : site.pages) {
        const auto x = vectorize_page(extract_page_cues(page, site), detector.catalog);
        const double m = meta_features(x, refs, detector.model.kernel_spec).max_fake;
        lowest = std::min(lowest, m);
        ++checked;
        if (m < 0.9) ++below;
      }
    }
  }
  return {checked > 0 && below == 0, std::to_string(checked) + " eligible spoof test pages, min max_fake " +
                                         fmt(lowest) + " (>= 0.9), " + std::to_string(below) + " below"};
}

// AC7 ------------------------------------------------------------------------

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI binary given (--cli)"};
  kgtest::TempDir dir("acceptance_det");
  std::vector<std::string> models;
  for (int run = 0; run < 2; ++run) {
    const auto root = dir.path() / ("run" + std::to_string(run));
    auto p = [&](const char* name) { return "\"" + (root / name).string() + "\""; };
    const std::string bin = "\"" + cli + "\"";
    const std::vector<std::string> steps{
        bin + " synth --out " + p("corpus") + " --real 10 --spoof 8 --concocted 8 --pages 3 --seed 7",
        bin + " extract --corpus " + p("corpus") + " --out " + p("catalog.json"),
        bin + " select --corpus " + p("corpus") + " --catalog " + p("catalog.json") + " --out " + p("selected.json"),
        bin + " train --corpus " + p("corpus") + " --catalog " + p("selected.json") + " --out " + p("model.json") +
            " --seed 7"};
    for (const auto& step : steps)
      if (shell(step) != 0) return {false, "command failed: " + step};
    models.push_back(slurp(root / "model.json"));
  }
  const bool same = !models[0].empty() && models[0] == models[1];
  return {same, "two synth->extract->select->train runs, model files " +
                    std::string(same ? "byte-identical" : "differ") + " (" + std::to_string(models[0].size()) +
                    " bytes)"};
}

// AC8 ------------------------------------------------------------------------

Outcome leakage_guard() {
  const auto corpus = generate_synthetic_corpus({10, 8, 8, 2, 3}).corpus;
  const auto cv = cross_validate(corpus, 5, PipelineConfig{}, 3);
  std::size_t overlaps = 0;
  std::set<std::string> tested;
  for (const auto& fold : cv.folds) {
    const std::set<std::string> refs(fold.reference_sites.begin(), fold.reference_sites.end());
    for (const auto& s : fold.test_sites) {
      overlaps += refs.count(s);
      tested.insert(s);
    }
  }

  // The guard itself must flag a test site that sits in the references.
  const auto pages = training_pages(corpus, build_catalog(corpus, {}));
  const bool flags_leak = !leaked_sites(corpus, reference_sets(pages)).empty();

  const bool pass = overlaps == 0 && tested.size() == corpus.websites.size() && flags_leak;
  return {pass, std::to_string(cv.folds.size()) + " folds, " + std::to_string(overlaps) +
                    " test/reference overlaps, every site tested once: " +
                    (tested.size() == corpus.websites.size() ? "yes" : "no") +
                    ", guard flags a planted leak: " + (flags_leak ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cli;
  app.add_option("--cli", cli, "kernelguard binary for the end-to-end determinism check");
  CLI11_PARSE(app, argc, argv);

  run("AC1", "synthetic 5-fold accuracy", accuracy_on_synthetic);
  run("AC2", "SMO vs brute-force QP oracle", smo_vs_oracle);
  run("AC3", "KKT report after training", kkt_after_training);
  run("AC4", "composite kernel Gram PSD", gram_psd);
  run("AC5", "information gain vs enumeration", information_gain_oracle);
  run("AC6", "spoof duplication meta-feature", duplication_signal);
  run("AC7", "end-to-end determinism", [&] { return determinism(cli); });
  run("AC8", "cross-validation leakage guard", leakage_guard);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
