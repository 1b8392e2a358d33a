#include "kernelguard/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kernelguard/error.hpp"
#include "kernelguard/hash.hpp"
#include "kernelguard/rng.hpp"
#include "kernelguard/text.hpp"
#include "kernelguard/url.hpp"

namespace kernelguard {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Real: return "real";
    case Label::Concocted: return "concocted";
    case Label::Spoof: return "spoof";
  }
  return "real";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "real") return Label::Real;
  if (text == "concocted") return Label::Concocted;
  if (text == "spoof") return Label::Spoof;
  return std::nullopt;
}

std::size_t Corpus::page_count() const {
  std::size_t n = 0;
  for (const auto& site : websites) n += site.pages.size();
  return n;
}

std::size_t Corpus::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      websites.begin(), websites.end(), [label](const Website& w) { return w.label == label; }));
}

const Website* Corpus::find(std::string_view site_id) const {
  for (const auto& site : websites) {
    if (site.site_id == site_id) return &site;
  }
  return nullptr;
}

std::string corpus_fingerprint(const Corpus& corpus) {
  Fnv1a hash;
  for (const auto& site : corpus.websites) {
    hash.field(site.site_id).field(to_string(site.label)).field(site.root_url);
    for (const auto& page : site.pages) hash.field(page.page_id).field(page.url).field(page.html);
  }
  return to_hex(hash.value());
}

void validate_website(const Website& site) {
  if (site.site_id.empty()) throw DataError("website has an empty site_id");
  if (site.pages.empty()) throw DataError("site '" + site.site_id + "' has no pages");
  std::set<std::string> ids;
  for (const auto& page : site.pages) {
    if (!ids.insert(page.page_id).second) {
      throw DataError("site '" + site.site_id + "' repeats page_id '" + page.page_id + "'");
    }
    if (!parse_absolute_url(page.url)) {
      throw DataError("site '" + site.site_id + "' page '" + page.page_id +
                      "' has a non-absolute url '" + page.url + "'");
    }
  }
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

const std::string& required_string(const json& object, const char* key, const fs::path& where) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) {
    throw DataError(where.string() + ": missing or non-string field '" + key + "'");
  }
  return it->get_ref<const std::string&>();
}

bool is_safe_file_name(const std::string& name) {
  return !name.empty() && name != "." && name != ".." && name.find_first_of("/\\") == std::string::npos;
}

// `file` is relative to the site directory; a bare file name is also
// looked up under pages/.
fs::path page_path(const fs::path& site_dir, const std::string& file) {
  const fs::path rel(file);
  if (rel.is_absolute() || std::find(rel.begin(), rel.end(), "..") != rel.end()) {
    throw DataError("page file '" + file + "' escapes the site directory");
  }
  if (fs::exists(site_dir / rel)) return site_dir / rel;
  return site_dir / "pages" / rel;
}

// Loads a site, skipping unreadable pages. Appends page-level problems to
// `warnings`; throws DataError if the manifest itself is unusable.
Website load_site_impl(const fs::path& site_dir, std::vector<std::string>& warnings) {
  const fs::path manifest_path = site_dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw DataError(site_dir.string() + ": no manifest.json");
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  if (!manifest.is_object()) throw DataError(manifest_path.string() + ": not a JSON object");

  Website site;
  site.site_id = required_string(manifest, "site_id", manifest_path);
  const auto label = parse_label(required_string(manifest, "label", manifest_path));
  if (!label) throw DataError(manifest_path.string() + ": unknown label");
  site.label = *label;
  site.root_url = required_string(manifest, "root_url", manifest_path);
  auto pages = manifest.find("pages");
  if (pages == manifest.end() || !pages->is_array()) {
    throw DataError(manifest_path.string() + ": missing 'pages' array");
  }

  std::set<std::string> seen;
  for (const auto& entry : *pages) {
    if (!entry.is_object()) {
      warnings.push_back(manifest_path.string() + ": skipped non-object page entry");
      continue;
    }
    try {
      Page page;
      page.page_id = required_string(entry, "page_id", manifest_path);
      page.url = required_string(entry, "url", manifest_path);
      const auto& file = required_string(entry, "file", manifest_path);
      if (!parse_absolute_url(page.url)) {
        throw DataError("page '" + page.page_id + "' url is not absolute");
      }
      if (!seen.insert(page.page_id).second) {
        throw DataError("duplicate page_id '" + page.page_id + "'");
      }
      page.html = decode_utf8_lossy(read_file(page_path(site_dir, file)));
      site.pages.push_back(std::move(page));
    } catch (const DataError& e) {
      warnings.push_back(site_dir.string() + ": skipped page: " + e.what());
    }
  }
  if (site.pages.empty()) throw DataError(site_dir.string() + ": no readable pages");
  return site;
}

}  // namespace

Website load_site(const fs::path& site_dir) {
  std::vector<std::string> ignored;
  return load_site_impl(site_dir, ignored);
}

LoadResult load_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("corpus directory not found: " + root.string());
  LoadResult result;
  result.corpus.provenance = "loaded from " + root.string();
  if (fs::exists(root / "PROVENANCE")) result.corpus.provenance = read_file(root / "PROVENANCE");

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::set<std::string> ids;
  for (const auto& dir : dirs) {
    Website site;
    try {
      site = load_site_impl(dir, result.warnings);
    } catch (const DataError& e) {
      result.warnings.push_back(std::string("skipped site: ") + e.what());
      continue;
    }
    if (!ids.insert(site.site_id).second) {
      throw DataError("duplicate site_id '" + site.site_id + "' in " + dir.string());
    }
    result.corpus.websites.push_back(std::move(site));
  }
  std::sort(result.corpus.websites.begin(), result.corpus.websites.end(),
            [](const Website& a, const Website& b) { return a.site_id < b.site_id; });
  return result;
}

void write_site(const Website& site, const fs::path& site_dir) {
  validate_website(site);
  for (const auto& page : site.pages) {
    if (!is_safe_file_name(page.page_id)) {
      throw DataError("page_id '" + page.page_id + "' cannot be used as a file name");
    }
  }
  fs::create_directories(site_dir / "pages");
  json pages = json::array();
  for (const auto& page : site.pages) {
    const std::string file = "pages/" + page.page_id + ".html";
    write_file(site_dir / file, page.html);
    pages.push_back({{"page_id", page.page_id}, {"url", page.url}, {"file", file}});
  }
  json manifest = {{"site_id", site.site_id},
                   {"label", std::string(to_string(site.label))},
                   {"root_url", site.root_url},
                   {"pages", std::move(pages)}};
  write_file(site_dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_corpus(const Corpus& corpus, const fs::path& root) {
  fs::create_directories(root);
  for (const auto& site : corpus.websites) {
    if (!is_safe_file_name(site.site_id)) {
      throw DataError("site_id '" + site.site_id + "' cannot be used as a directory name");
    }
    const fs::path dir = root / site.site_id;
    if (fs::exists(dir)) fs::remove_all(dir);
    write_site(site, dir);
  }
  if (!corpus.provenance.empty()) write_file(root / "PROVENANCE", corpus.provenance);
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double test_fraction,
                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test_fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<bool> in_test(corpus.websites.size(), false);
  for (Label label : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.websites.size(); ++i) {
      if (corpus.websites[i].label == label) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw InvalidArgument("label '" + std::string(to_string(label)) +
                            "' needs at least 2 sites to split");
    }
    rng.shuffle(members);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * members.size()));
    for (std::size_t i = 0; i < n_test; ++i) in_test[members[i]] = true;
  }
  Corpus train, test;
  train.provenance = corpus.provenance + " [train split seed=" + std::to_string(seed) + "]";
  test.provenance = corpus.provenance + " [test split seed=" + std::to_string(seed) + "]";
  for (std::size_t i = 0; i < corpus.websites.size(); ++i) {
    (in_test[i] ? test : train).websites.push_back(corpus.websites[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace kernelguard
