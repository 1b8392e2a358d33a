#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kernelguard/aggregate.hpp"
#include "kernelguard/error.hpp"
#include "kernelguard/pipeline.hpp"
#include "pipeline_helpers.hpp"
#include "support.hpp"

using namespace kernelguard;

namespace {

const Corpus& corpus() {
  static const Corpus c = generate_synthetic_corpus({6, 5, 5, 3, 21}).corpus;
  return c;
}

const TrainedDetector& trained() {
  static const TrainedDetector t = [] {
    PipelineConfig config;
    config.seed = 5;
    return train_detector(corpus(), config);
  }();
  return t;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults") {
  const PipelineConfig c;
  CHECK(c.extraction.max_vocab_per_category == 2000);
  CHECK(c.extraction.min_doc_freq == 2);
  CHECK(c.select_k == 6000);
  CHECK(c.kernel.theta_base == 1.0);
  CHECK(c.kernel.theta_meta == 1.0);
  CHECK(c.train.C == 1.0);
  CHECK(c.train.kkt_tol == 1e-3);
  CHECK(c.train.max_passes == 50);
  CHECK(c.rule == AggregationRule::MeanScore);
  CHECK(c.tau == 0.0);
}

TEST_CASE("flat config keys") {
  PipelineConfig c;
  apply_config_json(c, nlohmann::json::parse(R"({"k": 50, "theta_meta": 2.5, "C": 4, "rule": "majority",
      "seed": 9, "leave_site_out": false, "min_doc_freq": 3, "tau": -0.1})"));
  CHECK(c.select_k == 50);
  CHECK(c.kernel.theta_meta == 2.5);
  CHECK(c.train.C == 4.0);
  CHECK(c.rule == AggregationRule::MajorityVote);
  CHECK(c.seed == 9);
  CHECK_FALSE(c.kernel.leave_site_out);
  CHECK(c.extraction.min_doc_freq == 3);
  CHECK(c.tau == -0.1);

  PipelineConfig round;
  apply_config_json(round, to_json(c));
  CHECK(to_json(round) == to_json(c));
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const char* text) {
    PipelineConfig c;
    try {
      apply_config_json(c, nlohmann::json::parse(text));
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"gamma": 1})").find("gamma") != std::string::npos);
  CHECK(message(R"({"C": "big"})").find("'C'") != std::string::npos);
  CHECK(message(R"({"k": -3})").find("'k'") != std::string::npos);
  CHECK(message(R"({"rule": "median"})").find("rule") != std::string::npos);
  CHECK(message(R"({"C": -1})") != "no error");
  CHECK(message(R"({"theta_base": 0, "theta_meta": 0})") != "no error");
  CHECK(message("[1, 2]") != "no error");
}

TEST_CASE("config file") {
  kgtest::TempDir dir("config");
  std::ofstream(dir.path() / "cfg.json") << R"({"k": 123, "kkt_tol": 0.0005})";
  const auto c = load_pipeline_config(dir.path() / "cfg.json");
  CHECK(c.select_k == 123);
  CHECK(c.train.kkt_tol == 0.0005);
  std::ofstream(dir.path() / "bad.json") << "{not json";
  CHECK_THROWS_AS(load_pipeline_config(dir.path() / "bad.json"), DataError);
  CHECK_THROWS_AS(load_pipeline_config(dir.path() / "missing.json"), DataError);
}

TEST_CASE("training summary") {
  const auto& t = trained();
  CHECK(t.summary.pages == corpus().page_count());
  CHECK(t.summary.kkt_violations == 0);
  CHECK(t.summary.converged);
  CHECK(t.summary.support_vectors == t.detector.model.support_vectors.size());
  CHECK(t.summary.support_vectors > 0);
  CHECK(t.summary.attributes == t.detector.catalog.size());
  CHECK(t.summary.min_gram_eigenvalue >= -1e-8);
  CHECK(t.detector.corpus_fingerprint == corpus_fingerprint(corpus()));
}

TEST_CASE("training needs both classes") {
  Corpus only_real;
  for (const auto& w : corpus().websites)
    if (w.label == Label::Real) only_real.websites.push_back(w);
  CHECK_THROWS_AS(train_detector(only_real, {}), DataError);
}

TEST_CASE("model round trip") {
  const auto& d = trained().detector;
  const auto text = detector_to_string(d);
  CHECK(text.back() == '\n');
  const auto back = detector_from_string(text);
  CHECK(detector_to_string(back) == text);
  for (const auto& site : corpus().websites) {
    const auto a = classify_site(site, d, AggregationRule::MeanScore, 0.0);
    const auto b = classify_site(site, back, AggregationRule::MeanScore, 0.0);
    CHECK(to_json_line(a) == to_json_line(b));
  }

  kgtest::TempDir dir("model");
  save_detector(d, dir.path() / "m.json");
  CHECK(slurp(dir.path() / "m.json") == text);
  CHECK(detector_to_string(load_detector(dir.path() / "m.json")) == text);
}

TEST_CASE("model file layout") {
  const auto j = nlohmann::ordered_json::parse(detector_to_string(trained().detector));
  std::vector<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.push_back(key);
  CHECK(keys.front() == "format_version");
  for (const char* key : {"kernel_spec", "catalog", "reference_sets", "support_vectors", "bias", "train_config",
                          "corpus_fingerprint"})
    CHECK(j.contains(key));
  const auto& sv = j["support_vectors"][0];
  CHECK(sv.contains("values"));
  CHECK(sv["phi"].size() == 4);
  CHECK(sv.contains("alpha"));
  CHECK(sv.contains("y"));
}

TEST_CASE("loader rejects bad model files") {
  auto j = nlohmann::ordered_json::parse(detector_to_string(trained().detector));
  auto wrong_version = j;
  wrong_version["format_version"] = 99;
  CHECK_THROWS_AS(detector_from_string(wrong_version.dump()), DataError);
  auto wrong_fp = j;
  wrong_fp["catalog_fingerprint"] = "0000000000000000";
  CHECK_THROWS_AS(detector_from_string(wrong_fp.dump()), DataError);
  auto bad_alpha = j;
  bad_alpha["support_vectors"][0]["alpha"] = -1.0;
  CHECK_THROWS_AS(detector_from_string(bad_alpha.dump()), DataError);
  CHECK_THROWS_AS(detector_from_string("{"), DataError);
  CHECK_THROWS_AS(detector_from_string("{}"), DataError);
}

TEST_CASE("training is byte-for-byte deterministic") {
  PipelineConfig config;
  config.seed = 5;
  const auto again = train_detector(corpus(), config);
  CHECK(detector_to_string(again.detector) == detector_to_string(trained().detector));
}

TEST_CASE("training with a preselected catalog") {
  const auto cues = extract_corpus_cues(corpus());
  const auto full = build_catalog(cues, "x", {});
  const auto pages = kgtest::labeled(corpus(), cues);
  const auto selected = select_top_k(full, pages, 40);
  const auto t = train_detector(corpus(), {}, &selected);
  CHECK(t.detector.catalog.size() == 40);
  CHECK(t.summary.kkt_violations == 0);
  CHECK(t.detector.model.catalog_fingerprint == selected.fingerprint());
}

TEST_CASE("catalog json round trip") {
  const auto& cat = trained().detector.catalog;
  const auto back = catalog_from_json(catalog_to_json(cat));
  CHECK(back.fingerprint() == cat.fingerprint());
  CHECK(kgtest::catalog_json(back) == kgtest::catalog_json(cat));
  kgtest::TempDir dir("catalog");
  save_catalog(cat, dir.path() / "c.json");
  CHECK(load_catalog(dir.path() / "c.json").fingerprint() == cat.fingerprint());
  CHECK_THROWS_AS(catalog_from_json(nlohmann::json::object()), DataError);
}

TEST_CASE("selection report") {
  const auto tsv = selection_report_tsv(trained().detector.catalog);
  std::istringstream in(tsv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "name\tcategory\tdoc_freq\tig");
  double previous = 2.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto last = line.rfind('\t');
    const double ig = std::stod(line.substr(last + 1));
    CHECK(ig <= previous);
    previous = ig;
    ++rows;
  }
  CHECK(rows == trained().detector.catalog.size());
}

TEST_CASE("kkt report is empty after training on generated corpora") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto c = generate_synthetic_corpus({5, 4, 4, 3, seed}).corpus;
    for (double C : {0.1, 1.0, 10.0}) {
      PipelineConfig config;
      config.train.C = C;
      config.seed = seed;
      CHECK(train_detector(c, config).summary.kkt_violations == 0);
    }
  }
}

TEST_CASE("pages with empty vectors are skipped at classification") {
  Detector d = trained().detector;
  d.catalog = kgtest::catalog_of({"text:unigram:zzzqqq"});
  d.model.catalog_fingerprint = d.catalog.fingerprint();
  const auto v = classify_site(corpus().websites[0], d, AggregationRule::MeanScore, 0.0);
  CHECK(v.per_page.empty());
  CHECK(v.skipped_pages == corpus().websites[0].pages.size());
  CHECK(v.insufficient_evidence);
  CHECK(v.verdict == Verdict::Fake);
}
