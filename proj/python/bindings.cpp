#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"
#include "kernelguard/aggregate.hpp"
#include "kernelguard/corpus.hpp"
#include "kernelguard/error.hpp"
#include "kernelguard/evalharness.hpp"
#include "kernelguard/features.hpp"
#include "kernelguard/pipeline.hpp"
#include "kernelguard/selection.hpp"

namespace py = pybind11;
using namespace kernelguard;

namespace {

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

PipelineConfig config_from(const py::dict& overrides) {
  PipelineConfig config;
  const std::string text = py::str(py::module_::import("json").attr("dumps")(overrides));
  apply_config_json(config, nlohmann::json::parse(text));
  return config;
}

AggregationRule rule_from(const std::string& text) {
  const auto rule = parse_rule(text);
  if (!rule) throw InvalidArgument("unknown aggregation rule '" + text + "'");
  return *rule;
}

std::vector<LabeledCues> labeled(const Corpus& corpus, const std::vector<RawCues>& cues) {
  std::vector<LabeledCues> out;
  std::size_t p = 0;
  for (const auto& site : corpus.websites)
    for (std::size_t i = 0; i < site.pages.size(); ++i) out.push_back({&cues[p++], site.label});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Composite-kernel SVM detector for spoof and concocted websites";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<Page>(m, "Page")
      .def(py::init([](std::string page_id, std::string url, std::string html) {
             return Page{std::move(page_id), std::move(url), std::move(html)};
           }),
           py::arg("page_id"), py::arg("url"), py::arg("html"))
      .def_readwrite("page_id", &Page::page_id)
      .def_readwrite("url", &Page::url)
      .def_readwrite("html", &Page::html);

  py::class_<Website>(m, "Website")
      .def(py::init([](std::string site_id, const std::string& label, std::string root_url, std::vector<Page> pages) {
             const auto parsed = parse_label(label);
             if (!parsed) throw InvalidArgument("unknown label '" + label + "'");
             Website site{std::move(site_id), *parsed, std::move(root_url), std::move(pages)};
             validate_website(site);
             return site;
           }),
           py::arg("site_id"), py::arg("label"), py::arg("root_url"), py::arg("pages"))
      .def_readonly("site_id", &Website::site_id)
      .def_property_readonly("label", [](const Website& w) { return std::string(to_string(w.label)); })
      .def_readonly("root_url", &Website::root_url)
      .def_readonly("pages", &Website::pages);

  py::class_<Corpus>(m, "Corpus")
      .def(py::init([](std::vector<Website> sites) { return Corpus{std::move(sites), ""}; }), py::arg("websites"))
      .def_readonly("websites", &Corpus::websites)
      .def("page_count", &Corpus::page_count)
      .def("__len__", [](const Corpus& c) { return c.websites.size(); })
      .def("count", [](const Corpus& c, const std::string& label) {
        const auto parsed = parse_label(label);
        if (!parsed) throw InvalidArgument("unknown label '" + label + "'");
        return c.count(*parsed);
      });

  py::class_<AttributeCatalog>(m, "AttributeCatalog")
      .def("__len__", &AttributeCatalog::size)
      .def_property_readonly("fingerprint", &AttributeCatalog::fingerprint)
      .def("names",
           [](const AttributeCatalog& c) {
             std::vector<std::string> names;
             for (const auto& a : c.attributes()) names.push_back(a.name);
             return names;
           })
      .def("to_dict", [](const AttributeCatalog& c) { return json_loads(catalog_to_json(c).dump()); })
      .def("report_tsv", &selection_report_tsv)
      .def("save", [](const AttributeCatalog& c, const std::filesystem::path& p) { save_catalog(c, p); });

  py::class_<Detector>(m, "Detector")
      .def(
          "classify",
          [](const Detector& d, const Website& site, const std::string& rule, double tau) {
            return json_loads(to_json_line(classify_site(site, d, rule_from(rule), tau)));
          },
          py::arg("site"), py::arg("rule") = "mean", py::arg("tau") = 0.0)
      .def("save", [](const Detector& d, const std::filesystem::path& p) { save_detector(d, p); })
      .def("to_string", &detector_to_string)
      .def_property_readonly("support_vector_count", [](const Detector& d) { return d.model.support_vectors.size(); })
      .def_property_readonly("catalog", [](const Detector& d) { return d.catalog; });

  m.def(
      "generate_synthetic_corpus",
      [](int n_real, int n_spoof, int n_concocted, int pages_per_site, std::uint64_t seed) {
        return generate_synthetic_corpus({n_real, n_spoof, n_concocted, pages_per_site, seed}).corpus;
      },
      py::arg("n_real"), py::arg("n_spoof"), py::arg("n_concocted"), py::arg("pages_per_site") = 5,
      py::arg("seed") = 0);
  m.def(
      "load_corpus",
      [](const std::filesystem::path& root) {
        auto result = load_corpus(root);
        return py::make_tuple(std::move(result.corpus), result.warnings);
      },
      py::arg("root"), "Returns (corpus, warnings).");
  m.def("write_corpus", &write_corpus, py::arg("corpus"), py::arg("root"));
  m.def("corpus_fingerprint", &corpus_fingerprint, py::arg("corpus"));
  m.def(
      "extract_page_cues",
      [](const Page& page, const Website& site) {
        const auto cues = extract_page_cues(page, site);
        return std::map<std::string, double>(cues.begin(), cues.end());
      },
      py::arg("page"), py::arg("site"));
  m.def(
      "build_catalog",
      [](const Corpus& corpus, int max_vocab_per_category, int min_doc_freq) {
        return build_catalog(corpus, ExtractionConfig{max_vocab_per_category, min_doc_freq});
      },
      py::arg("corpus"), py::arg("max_vocab_per_category") = 2000, py::arg("min_doc_freq") = 2);
  m.def(
      "select_top_k",
      [](const AttributeCatalog& catalog, const Corpus& corpus, std::size_t k) {
        const auto cues = extract_corpus_cues(corpus);
        const auto pages = labeled(corpus, cues);
        return select_top_k(catalog, pages, k);
      },
      py::arg("catalog"), py::arg("corpus"), py::arg("k"));
  m.def(
      "train_detector",
      [](const Corpus& corpus, const py::dict& config) {
        const auto trained = train_detector(corpus, config_from(config));
        py::dict summary;
        summary["pages"] = trained.summary.pages;
        summary["attributes"] = trained.summary.attributes;
        summary["support_vectors"] = trained.summary.support_vectors;
        summary["kkt_violations"] = trained.summary.kkt_violations;
        summary["iterations"] = trained.summary.iterations;
        summary["converged"] = trained.summary.converged;
        summary["min_gram_eigenvalue"] = trained.summary.min_gram_eigenvalue;
        return py::make_tuple(trained.detector, summary);
      },
      py::arg("corpus"), py::arg("config") = py::dict(), "Returns (detector, summary).");
  m.def("load_detector", [](const std::filesystem::path& p) { return load_detector(p); }, py::arg("path"));
  m.def(
      "evaluate",
      [](const Detector& detector, const Corpus& corpus, const std::string& rule, double tau) {
        std::vector<SiteVerdict> verdicts;
        for (const auto& site : corpus.websites) verdicts.push_back(classify_site(site, detector, rule_from(rule), tau));
        return json_loads(to_json(evaluate(verdicts, truth_of(corpus))));
      },
      py::arg("detector"), py::arg("corpus"), py::arg("rule") = "mean", py::arg("tau") = 0.0);
  m.def(
      "cross_validate",
      [](const Corpus& corpus, int k, const py::dict& config) {
        const auto cfg = config_from(config);
        const auto result = cross_validate(corpus, k, cfg, cfg.seed);
        py::list folds;
        for (const auto& fold : result.folds) folds.append(json_loads(to_json(fold.report)));
        py::dict out;
        out["folds"] = folds;
        out["mean_accuracy"] = result.mean_accuracy;
        out["stddev_accuracy"] = result.stddev_accuracy;
        return out;
      },
      py::arg("corpus"), py::arg("k") = 5, py::arg("config") = py::dict());
}
