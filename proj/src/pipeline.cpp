#include "kernelguard/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kernelguard/error.hpp"
#include "kernelguard/hash.hpp"
#include "kernelguard/selection.hpp"

namespace kernelguard {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

template <typename T>
T config_number(const json& value, const std::string& key) {
  if constexpr (std::is_same_v<T, double>) {
    if (!value.is_number()) throw DataError("config key '" + key + "' must be a number");
    return value.get<double>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!value.is_number_unsigned()) {
      throw DataError("config key '" + key + "' must be a non-negative integer");
    }
    return value.get<T>();
  } else {
    if (!value.is_number_integer()) throw DataError("config key '" + key + "' must be an integer");
    return value.get<T>();
  }
}

ordered_json vector_json(const FeatureVector& v) {
  ordered_json ids = ordered_json::array();
  ordered_json values = ordered_json::array();
  for (const auto& [id, value] : v.entries) {
    ids.push_back(id);
    values.push_back(value);
  }
  return ordered_json{{"ids", std::move(ids)}, {"values", std::move(values)}};
}

FeatureVector vector_from_json(const json& j, std::uint64_t fingerprint, std::size_t dims) {
  FeatureVector v;
  v.catalog_fingerprint = fingerprint;
  const auto& ids = j.at("ids");
  const auto& values = j.at("values");
  if (ids.size() != values.size()) throw DataError("vector ids and values differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto id = ids[i].get<std::uint32_t>();
    if (id >= dims) throw DataError("vector attribute id out of catalog range");
    if (!v.entries.empty() && v.entries.back().first >= id) throw DataError("vector ids not strictly increasing");
    const double value = values[i].get<double>();
    v.entries.emplace_back(id, value);
    sum += value * value;
  }
  v.norm = std::sqrt(sum);
  v.all_zero = v.entries.empty();
  return v;
}

ordered_json phi_json(const MetaFeatures& phi) {
  return ordered_json::array({phi.avg_real, phi.max_real, phi.avg_fake, phi.max_fake});
}

MetaFeatures phi_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw DataError("meta-features must be an array of 4 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

void apply_config_json(PipelineConfig& config, const json& flat) {
  if (!flat.is_object()) throw DataError("config must be a JSON object of flat keys");
  for (const auto& [key, value] : flat.items()) {
    if (key == "max_vocab_per_category") {
      config.extraction.max_vocab_per_category = config_number<int>(value, key);
    } else if (key == "min_doc_freq") {
      config.extraction.min_doc_freq = config_number<int>(value, key);
    } else if (key == "k" || key == "select_k") {
      config.select_k = config_number<std::size_t>(value, key);
    } else if (key == "theta_base") {
      config.kernel.theta_base = config_number<double>(value, key);
    } else if (key == "theta_meta") {
      config.kernel.theta_meta = config_number<double>(value, key);
    } else if (key == "leave_site_out") {
      if (!value.is_boolean()) throw DataError("config key 'leave_site_out' must be a boolean");
      config.kernel.leave_site_out = value.get<bool>();
    } else if (key == "C") {
      config.train.C = config_number<double>(value, key);
    } else if (key == "kkt_tol") {
      config.train.kkt_tol = config_number<double>(value, key);
    } else if (key == "max_passes") {
      config.train.max_passes = config_number<int>(value, key);
    } else if (key == "rule") {
      const auto rule = value.is_string() ? parse_rule(value.get<std::string>()) : std::nullopt;
      if (!rule) throw DataError("config key 'rule' must be \"mean\" or \"majority\"");
      config.rule = *rule;
    } else if (key == "tau") {
      config.tau = config_number<double>(value, key);
    } else if (key == "seed") {
      config.seed = config_number<std::uint64_t>(value, key);
    } else {
      throw DataError("unknown config key '" + key + "'");
    }
  }
  try {
    config.kernel.validate();
    config.train.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("invalid config: ") + e.what());
  }
  if (config.select_k < 1) throw DataError("config key 'k' must be >= 1");
  if (config.extraction.min_doc_freq < 1) throw DataError("config key 'min_doc_freq' must be >= 1");
  if (config.extraction.max_vocab_per_category < 0) {
    throw DataError("config key 'max_vocab_per_category' must be >= 0");
  }
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  PipelineConfig config;
  json flat;
  try {
    flat = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  apply_config_json(config, flat);
  return config;
}

json to_json(const PipelineConfig& c) {
  return json{{"max_vocab_per_category", c.extraction.max_vocab_per_category},
              {"min_doc_freq", c.extraction.min_doc_freq},
              {"k", c.select_k},
              {"theta_base", c.kernel.theta_base},
              {"theta_meta", c.kernel.theta_meta},
              {"leave_site_out", c.kernel.leave_site_out},
              {"C", c.train.C},
              {"kkt_tol", c.train.kkt_tol},
              {"max_passes", c.train.max_passes},
              {"rule", std::string(to_string(c.rule))},
              {"tau", c.tau},
              {"seed", c.seed}};
}

std::vector<TrainingPage> training_pages(const Corpus& corpus, const AttributeCatalog& catalog) {
  std::vector<TrainingPage> pages;
  pages.reserve(corpus.page_count());
  for (const auto& site : corpus.websites) {
    for (const auto& page : site.pages) {
      pages.push_back({vectorize_page(extract_page_cues(page, site), catalog), site.site_id, binary(site.label)});
    }
  }
  return pages;
}

ReferenceSets reference_sets(std::span<const TrainingPage> pages) {
  ReferenceSets refs;
  for (const auto& page : pages) refs.add(page.x, page.site_id, page.y > 0);
  return refs;
}

TrainedDetector train_detector(const Corpus& train_corpus, const PipelineConfig& config,
                               const AttributeCatalog* selected) {
  if (train_corpus.count(Label::Real) == 0 || train_corpus.count(Label::Real) == train_corpus.websites.size()) {
    throw DataError("training needs at least one real and one fake site");
  }
  const auto cues = extract_corpus_cues(train_corpus);
  AttributeCatalog catalog;
  if (selected) {
    catalog = *selected;
  } else {
    const auto full = build_catalog(cues, corpus_fingerprint(train_corpus), config.extraction);
    std::vector<LabeledCues> labeled;
    labeled.reserve(cues.size());
    std::size_t p = 0;
    for (const auto& site : train_corpus.websites) {
      for (std::size_t i = 0; i < site.pages.size(); ++i) labeled.push_back({&cues[p++], site.label});
    }
    catalog = select_top_k(full, labeled, config.select_k);
  }

  std::vector<TrainingPage> pages;
  pages.reserve(cues.size());
  std::size_t p = 0;
  for (const auto& site : train_corpus.websites) {
    for (std::size_t i = 0; i < site.pages.size(); ++i) {
      pages.push_back({vectorize_page(cues[p++], catalog), site.site_id, binary(site.label)});
    }
  }

  TrainConfig train_cfg = config.train;
  train_cfg.seed = config.seed;
  const auto refs = reference_sets(pages);
  auto result = train(pages, refs, config.kernel, train_cfg);

  TrainedDetector out;
  out.summary.pages = pages.size();
  out.summary.attributes = catalog.size();
  out.summary.support_vectors = result.model.support_vectors.size();
  out.summary.kkt_violations = kkt_report(result.model, pages, result.gram, train_cfg.kkt_tol).size();
  out.summary.iterations = result.model.iterations;
  out.summary.converged = result.model.converged;
  out.summary.min_gram_eigenvalue = result.model.min_gram_eigenvalue;
  out.detector.catalog = std::move(catalog);
  out.detector.model = std::move(result.model);
  out.detector.corpus_fingerprint = corpus_fingerprint(train_corpus);
  return out;
}

ordered_json catalog_to_json(const AttributeCatalog& catalog) {
  ordered_json out = ordered_json::array();
  for (const auto& attr : catalog.attributes()) {
    out.push_back(ordered_json{{"attr_id", attr.attr_id},
                               {"category", std::string(to_string(attr.category))},
                               {"name", attr.name},
                               {"kind", std::string(to_string(attr.kind))},
                               {"ig_score", attr.ig_score},
                               {"doc_freq", attr.doc_freq}});
  }
  return out;
}

AttributeCatalog catalog_from_json(const json& j) {
  if (!j.is_array()) throw DataError("catalog must be a JSON array");
  std::vector<AttributeDescriptor> attrs;
  attrs.reserve(j.size());
  try {
    for (const auto& entry : j) {
      AttributeDescriptor d;
      d.attr_id = entry.at("attr_id").get<std::uint32_t>();
      d.name = entry.at("name").get<std::string>();
      const auto category = parse_category(entry.at("category").get<std::string>());
      const auto kind = parse_kind(entry.at("kind").get<std::string>());
      if (!category || !kind) throw DataError("attribute '" + d.name + "' has an unknown category or kind");
      d.category = *category;
      d.kind = *kind;
      d.ig_score = entry.value("ig_score", 0.0);
      d.doc_freq = entry.value("doc_freq", 0u);
      attrs.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed catalog: ") + e.what());
  }
  std::sort(attrs.begin(), attrs.end(), [](const auto& a, const auto& b) { return a.attr_id < b.attr_id; });
  return AttributeCatalog(std::move(attrs), "");
}

void save_catalog(const AttributeCatalog& catalog, const fs::path& path) {
  write_text(path, catalog_to_json(catalog).dump(2) + "\n");
}

AttributeCatalog load_catalog(const fs::path& path) {
  try {
    return catalog_from_json(json::parse(read_text(path)));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string selection_report_tsv(const AttributeCatalog& catalog) {
  std::vector<const AttributeDescriptor*> rows;
  for (const auto& attr : catalog.attributes()) rows.push_back(&attr);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto* a, const auto* b) { return a->ig_score > b->ig_score; });
  std::ostringstream out;
  out << "name\tcategory\tdoc_freq\tig\n";
  char ig[32];
  for (const auto* attr : rows) {
    std::snprintf(ig, sizeof ig, "%.6f", attr->ig_score);
    out << attr->name << '\t' << to_string(attr->category) << '\t' << attr->doc_freq << '\t' << ig << '\n';
  }
  return out.str();
}

std::string detector_to_string(const Detector& d) {
  const SvmModel& m = d.model;
  auto refs_json = [](const std::vector<FeatureVector>& pages, const std::vector<std::string>& sites) {
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < pages.size(); ++i) {
      ordered_json entry{{"site_id", sites[i]}};
      auto v = vector_json(pages[i]);
      entry["ids"] = std::move(v["ids"]);
      entry["values"] = std::move(v["values"]);
      out.push_back(std::move(entry));
    }
    return out;
  };
  ordered_json svs = ordered_json::array();
  for (const auto& sv : m.support_vectors) {
    auto v = vector_json(sv.x);
    svs.push_back(ordered_json{{"ids", std::move(v["ids"])},
                               {"values", std::move(v["values"])},
                               {"phi", phi_json(sv.phi)},
                               {"y", sv.y},
                               {"alpha", sv.alpha},
                               {"training_index", sv.training_index}});
  }
  ordered_json out{
      {"format_version", kModelFormatVersion},
      {"kernel_spec",
       {{"theta_base", m.kernel_spec.theta_base},
        {"theta_meta", m.kernel_spec.theta_meta},
        {"leave_site_out", m.kernel_spec.leave_site_out}}},
      {"catalog_fingerprint", to_hex(d.catalog.fingerprint())},
      {"catalog", catalog_to_json(d.catalog)},
      {"reference_sets",
       {{"real", refs_json(m.reference_sets.real_pages, m.reference_sets.real_sites)},
        {"fake", refs_json(m.reference_sets.fake_pages, m.reference_sets.fake_sites)}}},
      {"support_vectors", std::move(svs)},
      {"bias", m.bias},
      {"train_config",
       {{"C", m.train_config.C},
        {"kkt_tol", m.train_config.kkt_tol},
        {"max_passes", m.train_config.max_passes},
        {"seed", m.train_config.seed}}},
      {"corpus_fingerprint", d.corpus_fingerprint},
      {"diagnostics",
       {{"iterations", m.iterations},
        {"converged", m.converged},
        {"degenerate", m.degenerate},
        {"min_gram_eigenvalue", m.min_gram_eigenvalue}}}};
  return out.dump() + "\n";
}

Detector detector_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version")) throw DataError("model file has no format_version");
  if (j["format_version"] != kModelFormatVersion) {
    throw DataError("unsupported model format_version " + j["format_version"].dump());
  }
  try {
    Detector d;
    d.catalog = catalog_from_json(j.at("catalog"));
    const auto fingerprint = d.catalog.fingerprint();
    if (j.at("catalog_fingerprint").get<std::string>() != to_hex(fingerprint)) {
      throw DataError("model catalog does not match its recorded fingerprint");
    }
    d.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    SvmModel& m = d.model;
    m.catalog_fingerprint = fingerprint;
    const auto& ks = j.at("kernel_spec");
    m.kernel_spec = {ks.at("theta_base").get<double>(), ks.at("theta_meta").get<double>(),
                     ks.at("leave_site_out").get<bool>()};
    m.kernel_spec.validate();
    const auto& tc = j.at("train_config");
    m.train_config = {tc.at("C").get<double>(), tc.at("kkt_tol").get<double>(), tc.at("max_passes").get<int>(),
                      tc.at("seed").get<std::uint64_t>()};
    m.bias = j.at("bias").get<double>();
    const auto dims = d.catalog.size();
    for (const char* side : {"real", "fake"}) {
      for (const auto& entry : j.at("reference_sets").at(side)) {
        m.reference_sets.add(vector_from_json(entry, fingerprint, dims), entry.at("site_id").get<std::string>(),
                             std::string_view(side) == "fake");
      }
    }
    for (const auto& entry : j.at("support_vectors")) {
      SupportVector sv;
      sv.x = vector_from_json(entry, fingerprint, dims);
      sv.phi = phi_from_json(entry.at("phi"));
      sv.y = entry.at("y").get<int>();
      sv.alpha = entry.at("alpha").get<double>();
      sv.training_index = entry.at("training_index").get<std::size_t>();
      if ((sv.y != 1 && sv.y != -1) || !(sv.alpha > 0.0)) throw DataError("invalid support vector");
      m.support_vectors.push_back(std::move(sv));
    }
    if (const auto diag = j.find("diagnostics"); diag != j.end()) {
      m.iterations = diag->value("iterations", std::size_t{0});
      m.converged = diag->value("converged", false);
      m.degenerate = diag->value("degenerate", false);
      m.min_gram_eigenvalue = diag->value("min_gram_eigenvalue", 0.0);
    }
    return d;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_detector(const Detector& detector, const fs::path& path) {
  write_text(path, detector_to_string(detector));
}

Detector load_detector(const fs::path& path) { return detector_from_string(read_text(path)); }

}  // namespace kernelguard
