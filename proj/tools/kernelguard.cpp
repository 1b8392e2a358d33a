// kernelguard: command-line front end for the fake-website detection
// pipeline. Each subcommand wraps one chain of library operations.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kernelguard/aggregate.hpp"
#include "kernelguard/corpus.hpp"
#include "kernelguard/error.hpp"
#include "kernelguard/evalharness.hpp"
#include "kernelguard/features.hpp"
#include "kernelguard/fetch.hpp"
#include "kernelguard/pipeline.hpp"
#include "kernelguard/selection.hpp"

namespace fs = std::filesystem;
using namespace kernelguard;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
  const char* env = std::getenv("KERNELGUARD_LOG");
  if (!env) return LogLevel::Warn;
  const std::string value = env;
  if (value == "error") return LogLevel::Error;
  if (value == "info") return LogLevel::Info;
  if (value == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void warn(const std::string& message) {
  if (log_level() >= LogLevel::Warn) std::cerr << "warning: " << message << '\n';
}

void info(const std::string& message) {
  if (log_level() >= LogLevel::Info) std::cerr << "info: " << message << '\n';
}

Corpus load_corpus_logged(const fs::path& dir) {
  auto loaded = load_corpus(dir);
  for (const auto& w : loaded.warnings) warn(w);
  info("loaded " + std::to_string(loaded.corpus.websites.size()) + " sites from " + dir.string());
  return std::move(loaded.corpus);
}

// Command-line overrides for PipelineConfig. Unset options leave the
// config-file value alone.
struct ConfigFlags {
  std::string config_path;
  std::optional<int> max_vocab;
  std::optional<int> min_doc_freq;
  std::optional<std::size_t> k;
  std::optional<double> theta_base;
  std::optional<double> theta_meta;
  std::optional<double> c;
  std::optional<double> kkt_tol;
  std::optional<int> max_passes;
  std::optional<std::string> rule;
  std::optional<double> tau;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app, bool training, bool aggregation, bool k_is_cap = false) {
    app->add_option("--config", config_path, "Flat-key JSON pipeline config");
    app->add_option("--seed", seed, "Seed for every random choice");
    app->add_option("--max-vocab", max_vocab, "Vocabulary cap per open-ended cue family")->check(CLI::NonNegativeNumber);
    app->add_option("--min-doc-freq", min_doc_freq, "Minimum page document frequency for vocabulary cues")
        ->check(CLI::PositiveNumber);
    app->add_option(k_is_cap ? "--k,--select-k" : "--select-k", k, "Number of attributes kept by information gain")
        ->check(CLI::PositiveNumber);
    if (training) {
      app->add_option("--theta-base", theta_base, "Weight of the page cosine term")->check(CLI::NonNegativeNumber);
      app->add_option("--theta-meta", theta_meta, "Weight of the meta-feature term")->check(CLI::NonNegativeNumber);
      app->add_option("--C", c, "SVM soft-margin penalty")->check(CLI::PositiveNumber);
      app->add_option("--kkt-tol", kkt_tol, "KKT tolerance")->check(CLI::PositiveNumber);
      app->add_option("--max-passes", max_passes, "SMO iteration budget in passes over the data")
          ->check(CLI::PositiveNumber);
    }
    if (aggregation) {
      app->add_option("--rule", rule, "Page aggregation rule")->check(CLI::IsMember({"mean", "majority"}));
      app->add_option("--tau", tau, "Site threshold on the aggregate score");
    }
  }

  PipelineConfig resolve() const {
    PipelineConfig config;
    if (!config_path.empty()) config = load_pipeline_config(config_path);
    nlohmann::json overrides = nlohmann::json::object();
    if (max_vocab) overrides["max_vocab_per_category"] = *max_vocab;
    if (min_doc_freq) overrides["min_doc_freq"] = *min_doc_freq;
    if (k) overrides["k"] = *k;
    if (theta_base) overrides["theta_base"] = *theta_base;
    if (theta_meta) overrides["theta_meta"] = *theta_meta;
    if (c) overrides["C"] = *c;
    if (kkt_tol) overrides["kkt_tol"] = *kkt_tol;
    if (max_passes) overrides["max_passes"] = *max_passes;
    if (rule) overrides["rule"] = *rule;
    if (tau) overrides["tau"] = *tau;
    if (seed) overrides["seed"] = *seed;
    apply_config_json(config, overrides);
    return config;
  }
};

std::vector<LabeledCues> labeled(const Corpus& corpus, const std::vector<RawCues>& cues) {
  std::vector<LabeledCues> out;
  std::size_t p = 0;
  for (const auto& site : corpus.websites) {
    for (std::size_t i = 0; i < site.pages.size(); ++i) out.push_back({&cues[p++], site.label});
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernelguard: detect spoof and concocted websites with a composite-kernel SVM"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labelled corpus");
  SynthSpec synth_spec{40, 30, 30, 5, 0};
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output corpus directory")->required();
  synth->add_option("--real", synth_spec.n_real, "Number of real sites")->check(CLI::NonNegativeNumber);
  synth->add_option("--spoof", synth_spec.n_spoof, "Number of spoof sites")->check(CLI::NonNegativeNumber);
  synth->add_option("--concocted", synth_spec.n_concocted, "Number of concocted sites")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--pages", synth_spec.pages_per_site, "Pages per site")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_spec.seed, "Generator seed");

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Crawl one live site into a corpus directory");
  std::string fetch_url, fetch_out, fetch_site_id, fetch_label = "real";
  FetchOptions fetch_options;
  fetch->add_option("--url", fetch_url, "Root URL (http or https)")->required();
  fetch->add_option("--out", fetch_out, "Corpus directory to add the site to")->required();
  fetch->add_option("--max-pages", fetch_options.max_pages, "Page budget")->check(CLI::PositiveNumber);
  fetch->add_option("--max-depth", fetch_options.max_depth, "Link depth budget")->check(CLI::NonNegativeNumber);
  fetch->add_option("--delay-ms", fetch_options.delay_ms, "Delay between requests")->check(CLI::NonNegativeNumber);
  fetch->add_option("--site-id", fetch_site_id, "Override the derived site id");
  fetch->add_option("--label", fetch_label, "Human-assigned label")
      ->check(CLI::IsMember({"real", "concocted", "spoof"}));

  // extract
  auto* extract = app.add_subcommand("extract", "Build the full attribute catalog from a training corpus");
  std::string extract_corpus, extract_out, extract_cues;
  ConfigFlags extract_flags;
  extract->add_option("--corpus", extract_corpus, "Training corpus directory")->required();
  extract->add_option("--out", extract_out, "Catalog JSON output")->required();
  extract->add_option("--cues", extract_cues, "Optional JSON-lines dump of per-page raw cues");
  extract_flags.add_to(extract, false, false);

  // select
  auto* select = app.add_subcommand("select", "Rank catalog attributes by information gain and keep the top k");
  std::string select_corpus, select_catalog, select_out, select_report;
  ConfigFlags select_flags;
  select->add_option("--corpus", select_corpus, "Training corpus directory")->required();
  select->add_option("--catalog", select_catalog, "Catalog from `extract`")->required();
  select->add_option("--out", select_out, "Selected catalog JSON output")->required();
  select->add_option("--report", select_report, "TSV report (name, category, doc_freq, ig)");
  select_flags.add_to(select, false, false, true);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a detector model");
  std::string train_corpus, train_out, train_catalog;
  ConfigFlags train_flags;
  train_cmd->add_option("--corpus", train_corpus, "Training corpus directory")->required();
  train_cmd->add_option("--out", train_out, "Model file output")->required();
  train_cmd->add_option("--catalog", train_catalog, "Selected catalog from `select` (otherwise built here)");
  train_flags.add_to(train_cmd, true, false);

  // classify
  auto* classify = app.add_subcommand("classify", "Classify sites; one JSON verdict per line");
  std::string classify_model, classify_site_dir, classify_corpus;
  ConfigFlags classify_flags;
  classify->add_option("--model", classify_model, "Model file")->required();
  auto* site_opt = classify->add_option("--site", classify_site_dir, "One site directory");
  auto* corpus_opt = classify->add_option("--corpus", classify_corpus, "Corpus directory");
  site_opt->excludes(corpus_opt);
  classify_flags.add_to(classify, false, true);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a model on a labelled corpus");
  std::string eval_model, eval_corpus, eval_format = "both";
  ConfigFlags eval_flags;
  evaluate_cmd->add_option("--model", eval_model, "Model file")->required();
  evaluate_cmd->add_option("--corpus", eval_corpus, "Labelled corpus directory")->required();
  evaluate_cmd->add_option("--format", eval_format, "Output format")
      ->check(CLI::IsMember({"json", "table", "both"}));
  eval_flags.add_to(evaluate_cmd, false, true);

  // crossval
  auto* crossval = app.add_subcommand("crossval", "Stratified site-level k-fold cross-validation");
  std::string cv_corpus, cv_format = "table";
  int cv_k = 5;
  ConfigFlags cv_flags;
  crossval->add_option("--corpus", cv_corpus, "Labelled corpus directory")->required();
  crossval->add_option("--k,--folds", cv_k, "Number of folds")->check(CLI::Range(2, 1000));
  crossval->add_option("--format", cv_format, "Output format")->check(CLI::IsMember({"json", "table"}));
  cv_flags.add_to(crossval, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* scope = &app;
    for (const auto* sub : app.get_subcommands()) scope = sub;
    std::cerr << scope->help();
    return 1;
  }

  try {
    if (*synth) {
      const auto generated = generate_synthetic_corpus(synth_spec);
      write_corpus(generated.corpus, synth_out);
      std::cout << "wrote " << generated.corpus.websites.size() << " sites ("
                << generated.corpus.page_count() << " pages) to " << synth_out << '\n';
    } else if (*fetch) {
      const auto result = fetch_site(fetch_url, fetch_options);
      for (const auto& failure : result.failures) warn("skipped " + failure);
      Website site = result.site;
      if (!fetch_site_id.empty()) site.site_id = fetch_site_id;
      site.label = *parse_label(fetch_label);
      write_site(site, fs::path(fetch_out) / site.site_id);
      std::cout << "fetched " << site.pages.size() << " pages into " << (fs::path(fetch_out) / site.site_id).string()
                << '\n';
    } else if (*extract) {
      const auto config = extract_flags.resolve();
      const Corpus corpus = load_corpus_logged(extract_corpus);
      const auto cues = extract_corpus_cues(corpus);
      const auto catalog = build_catalog(cues, corpus_fingerprint(corpus), config.extraction);
      save_catalog(catalog, extract_out);
      if (!extract_cues.empty()) {
        std::string lines;
        std::size_t p = 0;
        for (const auto& site : corpus.websites) {
          for (const auto& page : site.pages) {
            nlohmann::ordered_json row{{"site_id", site.site_id}, {"page_id", page.page_id}, {"cues", cues[p++]}};
            lines += row.dump() + "\n";
          }
        }
        write_text(extract_cues, lines);
      }
      std::cout << "catalog with " << catalog.size() << " attributes written to " << extract_out << '\n';
    } else if (*select) {
      const auto config = select_flags.resolve();
      const Corpus corpus = load_corpus_logged(select_corpus);
      const auto catalog = load_catalog(select_catalog);
      const auto cues = extract_corpus_cues(corpus);
      const auto pages = labeled(corpus, cues);
      const auto selected = select_top_k(catalog, pages, config.select_k);
      save_catalog(selected, select_out);
      if (!select_report.empty()) write_text(select_report, selection_report_tsv(selected));
      std::cout << "selected " << selected.size() << " of " << catalog.size() << " attributes\n";
    } else if (*train_cmd) {
      const auto config = train_flags.resolve();
      const Corpus corpus = load_corpus_logged(train_corpus);
      std::optional<AttributeCatalog> catalog;
      if (!train_catalog.empty()) catalog = load_catalog(train_catalog);
      const auto trained = train_detector(corpus, config, catalog ? &*catalog : nullptr);
      save_detector(trained.detector, train_out);
      const auto& s = trained.summary;
      std::cout << "trained on " << s.pages << " pages with " << s.attributes << " attributes: "
                << s.support_vectors << " support vectors, KKT violations=" << s.kkt_violations
                << ", iterations=" << s.iterations << ", converged=" << (s.converged ? "yes" : "no") << '\n';
      if (!s.converged) warn("SMO stopped at the iteration budget before converging");
    } else if (*classify) {
      const auto config = classify_flags.resolve();
      const Detector detector = load_detector(classify_model);
      std::vector<Website> sites;
      if (!classify_site_dir.empty()) {
        sites.push_back(load_site(classify_site_dir));
      } else if (!classify_corpus.empty()) {
        sites = load_corpus_logged(classify_corpus).websites;
      } else {
        std::cerr << "classify needs --site or --corpus\n" << classify->help();
        return 1;
      }
      for (const auto& site : sites) {
        const auto verdict = classify_site(site, detector, config.rule, config.tau);
        if (verdict.insufficient_evidence) warn("site '" + site.site_id + "' has no usable pages; defaulting to fake");
        std::cout << to_json_line(verdict) << '\n';
      }
    } else if (*evaluate_cmd) {
      const auto config = eval_flags.resolve();
      const Detector detector = load_detector(eval_model);
      const Corpus corpus = load_corpus_logged(eval_corpus);
      std::vector<SiteVerdict> verdicts;
      for (const auto& site : corpus.websites) verdicts.push_back(classify_site(site, detector, config.rule, config.tau));
      const auto report = evaluate(verdicts, truth_of(corpus));
      if (eval_format != "json") std::cout << to_table(report);
      if (eval_format != "table") std::cout << to_json(report) << '\n';
    } else if (*crossval) {
      const auto config = cv_flags.resolve();
      const Corpus corpus = load_corpus_logged(cv_corpus);
      const auto result = cross_validate(corpus, cv_k, config, config.seed);
      if (cv_format == "json") {
        nlohmann::ordered_json out;
        out["folds"] = nlohmann::ordered_json::array();
        for (const auto& fold : result.folds) out["folds"].push_back(nlohmann::ordered_json::parse(to_json(fold.report)));
        out["mean_accuracy"] = result.mean_accuracy;
        out["stddev_accuracy"] = result.stddev_accuracy;
        std::cout << out.dump(2) << '\n';
      } else {
        for (std::size_t i = 0; i < result.folds.size(); ++i) {
          std::cout << "fold " << i + 1 << "/" << result.folds.size() << " (" << result.folds[i].test_sites.size()
                    << " test sites)\n"
                    << to_table(result.folds[i].report);
        }
        std::cout << "mean accuracy " << result.mean_accuracy << " (stddev " << result.stddev_accuracy << ")\n";
      }
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
