#include "kernelguard/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_set>

#include "kernelguard/error.hpp"
#include "kernelguard/hash.hpp"
#include "kernelguard/html.hpp"
#include "kernelguard/text.hpp"
#include "kernelguard/url.hpp"

namespace kernelguard {
namespace {

struct FixedCue {
  std::string_view name;
  AttributeKind kind;
};

constexpr auto C = AttributeKind::Count;
constexpr auto R = AttributeKind::Ratio;
constexpr auto F = AttributeKind::Flag;

constexpr std::array<FixedCue, 38> kFixedCues = {{
    // text
    {"text:token_count", C},
    {"text:distinct_token_count", C},
    {"text:type_token_ratio", R},
    {"text:digit_char_ratio", R},
    {"text:long_token_count", C},
    {"text:urgency_term_count", C},
    // source code
    {"src:tag_count", C},
    {"src:form_count", C},
    {"src:password_input_count", C},
    {"src:hidden_input_count", C},
    {"src:iframe_count", C},
    {"src:script_count", C},
    {"src:event_handler_count", C},
    {"src:meta_refresh", F},
    {"src:external_form_action_count", C},
    {"src:comment_count", C},
    {"src:parse_failed", F},
    // url
    {"url:length", C},
    {"url:host_dot_count", C},
    {"url:hyphen_count", C},
    {"url:digit_count", C},
    {"url:at_sign", F},
    {"url:ip_host", F},
    {"url:path_depth", C},
    {"url:query_param_count", C},
    {"url:https", F},
    {"url:explicit_port", F},
    // image
    {"image:count", C},
    {"image:external", C},
    {"image:alt_missing", C},
    {"image:logo_filename", C},
    // linkage
    {"link:internal_count", C},
    {"link:external_count", C},
    {"link:external_ratio", R},
    {"link:anchor_mismatch_count", C},
    {"link:void_count", C},
    {"link:external_domain_count", C},
    {"link:sibling_count", C},
}};

const std::array<std::string_view, 38> kFixedNames = [] {
  std::array<std::string_view, 38> names{};
  for (std::size_t i = 0; i < kFixedCues.size(); ++i) names[i] = kFixedCues[i].name;
  return names;
}();

const std::unordered_set<std::string> kUrgencyTerms = {
    "verify",   "verification", "suspended", "suspend",  "urgent",    "immediately", "confirm",
    "password", "login",        "update",    "security", "locked",    "unusual",     "expire",
    "expires",  "restricted",   "validate",  "ssn",      "billing",   "unauthorized"};

constexpr std::array<std::string_view, 7> kLogoKeywords = {"logo", "brand", "seal", "badge",
                                                           "secure", "verified", "trust"};

std::size_t count_char(std::string_view s, char c) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), c));
}

std::size_t count_digits(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }));
}

void add_text_cues(std::string_view text, RawCues& cues) {
  const auto tokens = tokenize(text);
  std::set<std::string_view> distinct;
  std::size_t long_tokens = 0, urgency = 0;
  for (const auto& token : tokens) {
    distinct.insert(token);
    if (token.size() >= 12) ++long_tokens;
    if (kUrgencyTerms.count(token)) ++urgency;
    cues[std::string(kUnigramPrefix) + token] += 1.0;
  }
  std::size_t visible = 0;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) ++visible;
  }
  cues["text:token_count"] = static_cast<double>(tokens.size());
  cues["text:distinct_token_count"] = static_cast<double>(distinct.size());
  cues["text:type_token_ratio"] =
      tokens.empty() ? 0.0 : static_cast<double>(distinct.size()) / static_cast<double>(tokens.size());
  cues["text:digit_char_ratio"] =
      visible == 0 ? 0.0 : static_cast<double>(count_digits(text)) / static_cast<double>(visible);
  cues["text:long_token_count"] = static_cast<double>(long_tokens);
  cues["text:urgency_term_count"] = static_cast<double>(urgency);
}

void add_url_cues(std::string_view raw_url, RawCues& cues) {
  const auto url = parse_absolute_url(raw_url);
  cues["url:length"] = static_cast<double>(raw_url.size());
  cues["url:hyphen_count"] = static_cast<double>(count_char(raw_url, '-'));
  cues["url:digit_count"] = static_cast<double>(count_digits(raw_url));
  cues["url:at_sign"] = raw_url.find('@') != std::string_view::npos ? 1.0 : 0.0;
  if (!url) return;
  cues["url:host_dot_count"] = static_cast<double>(count_char(url->host, '.'));
  cues["url:ip_host"] = is_ip_host(url->host) ? 1.0 : 0.0;
  std::size_t depth = 0;
  for (std::size_t i = 0; i < url->path.size(); ++i) {
    if (url->path[i] == '/' && i + 1 < url->path.size() && url->path[i + 1] != '/') ++depth;
  }
  cues["url:path_depth"] = static_cast<double>(depth);
  std::size_t params = 0;
  std::size_t start = 0;
  while (start <= url->query.size() && !url->query.empty()) {
    auto amp = url->query.find('&', start);
    if (amp == std::string::npos) amp = url->query.size();
    if (amp > start) ++params;
    start = amp + 1;
  }
  cues["url:query_param_count"] = static_cast<double>(params);
  cues["url:https"] = url->scheme == "https" ? 1.0 : 0.0;
  cues["url:explicit_port"] = url->port.empty() ? 0.0 : 1.0;
}

// Domain-looking word in anchor text, e.g. "www.example.com".
std::optional<std::string> domain_in_text(std::string_view text) {
  std::string word;
  auto check = [](const std::string& w) -> std::optional<std::string> {
    std::string candidate = w;
    while (!candidate.empty() && candidate.back() == '.') candidate.pop_back();
    const auto dot = candidate.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= candidate.size()) return std::nullopt;
    const auto tld = candidate.substr(candidate.rfind('.') + 1);
    if (tld.size() < 2 || !std::all_of(tld.begin(), tld.end(), [](char c) {
          return std::isalpha(static_cast<unsigned char>(c));
        })) {
      return std::nullopt;
    }
    return candidate;
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '.' || c == '-') {
      word += static_cast<char>(std::tolower(c));
    } else {
      if (auto d = check(word)) return d;
      word.clear();
    }
  }
  return check(word);
}

std::string last_segment(const Url& url) {
  const auto slash = url.path.rfind('/');
  return to_lower_ascii(slash == std::string::npos ? url.path : url.path.substr(slash + 1));
}

std::string normalized_url(std::string_view raw) {
  auto url = parse_absolute_url(raw);
  if (!url) return std::string(raw);
  url->fragment.clear();
  url->host = site_host(url->host);
  return url->to_string();
}

void add_markup_cues(const html::Document& doc, const Url* page_url, const std::set<std::string>& siblings,
                     RawCues& cues) {
  std::size_t tags = 0, forms = 0, passwords = 0, hidden = 0, iframes = 0, scripts = 0, handlers = 0;
  std::size_t external_actions = 0, comments = 0;
  bool refresh = false;
  std::size_t images = 0, external_images = 0, alt_missing = 0, logo_files = 0;
  std::size_t internal_links = 0, external_links = 0, mismatches = 0, void_links = 0, sibling_links = 0;
  std::set<std::string> external_domains;

  // Open anchor: its resolved href and accumulated text.
  std::optional<Url> anchor_target;
  bool in_anchor = false;
  std::string anchor_text;
  auto close_anchor = [&] {
    if (in_anchor && anchor_target) {
      if (auto domain = domain_in_text(anchor_text)) {
        if (site_host(*domain) != site_host(anchor_target->host)) ++mismatches;
      }
    }
    in_anchor = false;
    anchor_target.reset();
    anchor_text.clear();
  };

  for (const auto& token : doc.tokens) {
    switch (token.kind) {
      case html::TokenKind::Comment:
        ++comments;
        break;
      case html::TokenKind::Text:
        if (in_anchor) anchor_text += token.text;
        break;
      case html::TokenKind::EndTag:
        if (token.name == "a") close_anchor();
        break;
      case html::TokenKind::Doctype:
        break;
      case html::TokenKind::StartTag: {
        ++tags;
        cues[std::string(kTagPrefix) + token.name] += 1.0;
        for (const auto& attr : token.attributes) {
          if (attr.name.size() > 2 && attr.name.starts_with("on")) ++handlers;
        }
        const auto resolve = [&](const std::string* ref) -> std::optional<Url> {
          if (!ref || !page_url) return std::nullopt;
          return resolve_url(*page_url, *ref);
        };
        if (token.name == "form") {
          ++forms;
          if (auto action = resolve(token.attribute("action"))) {
            if (!same_site(*action, *page_url)) ++external_actions;
          }
        } else if (token.name == "input") {
          const std::string* type = token.attribute("type");
          const std::string kind = type ? to_lower_ascii(*type) : "";
          if (kind == "password") ++passwords;
          if (kind == "hidden") ++hidden;
        } else if (token.name == "iframe" || token.name == "frame") {
          ++iframes;
        } else if (token.name == "script") {
          ++scripts;
        } else if (token.name == "meta") {
          const std::string* equiv = token.attribute("http-equiv");
          if (equiv && to_lower_ascii(*equiv) == "refresh") refresh = true;
        } else if (token.name == "img") {
          ++images;
          const std::string* alt = token.attribute("alt");
          if (!alt || alt->find_first_not_of(" \t\r\n") == std::string::npos) ++alt_missing;
          if (auto src = resolve(token.attribute("src"))) {
            if (!same_site(*src, *page_url)) ++external_images;
            const auto file = last_segment(*src);
            for (auto keyword : kLogoKeywords) {
              if (file.find(keyword) != std::string::npos) {
                ++logo_files;
                break;
              }
            }
          }
        } else if (token.name == "a") {
          close_anchor();
          in_anchor = !token.self_closing;
          const std::string* href = token.attribute("href");
          if (!href) break;
          const auto first = href->find_first_not_of(" \t\r\n");
          const std::string_view target_text =
              first == std::string::npos ? std::string_view{} : std::string_view(*href).substr(first);
          if (target_text.empty() || target_text == "#" || starts_with_ci(target_text, "javascript:")) {
            ++void_links;
            break;
          }
          auto target = resolve(href);
          if (!target || (target->scheme != "http" && target->scheme != "https")) break;
          anchor_target = target;
          if (same_site(*target, *page_url)) {
            ++internal_links;
            if (siblings.count(normalized_url(target->to_string()))) ++sibling_links;
          } else {
            ++external_links;
            const std::string domain = site_host(target->host);
            external_domains.insert(domain);
            cues[std::string(kExternalDomainPrefix) + domain] += 1.0;
          }
        }
        break;
      }
    }
  }
  close_anchor();

  cues["src:tag_count"] = static_cast<double>(tags);
  cues["src:form_count"] = static_cast<double>(forms);
  cues["src:password_input_count"] = static_cast<double>(passwords);
  cues["src:hidden_input_count"] = static_cast<double>(hidden);
  cues["src:iframe_count"] = static_cast<double>(iframes);
  cues["src:script_count"] = static_cast<double>(scripts);
  cues["src:event_handler_count"] = static_cast<double>(handlers);
  cues["src:meta_refresh"] = refresh ? 1.0 : 0.0;
  cues["src:external_form_action_count"] = static_cast<double>(external_actions);
  cues["src:comment_count"] = static_cast<double>(comments);
  cues["image:count"] = static_cast<double>(images);
  cues["image:external"] = static_cast<double>(external_images);
  cues["image:alt_missing"] = static_cast<double>(alt_missing);
  cues["image:logo_filename"] = static_cast<double>(logo_files);
  cues["link:internal_count"] = static_cast<double>(internal_links);
  cues["link:external_count"] = static_cast<double>(external_links);
  const auto total_links = internal_links + external_links;
  cues["link:external_ratio"] =
      total_links == 0 ? 0.0 : static_cast<double>(external_links) / static_cast<double>(total_links);
  cues["link:anchor_mismatch_count"] = static_cast<double>(mismatches);
  cues["link:void_count"] = static_cast<double>(void_links);
  cues["link:external_domain_count"] = static_cast<double>(external_domains.size());
  cues["link:sibling_count"] = static_cast<double>(sibling_links);
}


}  // namespace

std::string_view to_string(Category category) {
  switch (category) {
    case Category::Text: return "text";
    case Category::SourceCode: return "source_code";
    case Category::Url: return "url";
    case Category::Image: return "image";
    case Category::Linkage: return "linkage";
  }
  return "text";
}

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Count: return "count";
    case AttributeKind::Ratio: return "ratio";
    case AttributeKind::Flag: return "flag";
  }
  return "count";
}

std::optional<Category> parse_category(std::string_view text) {
  for (auto c : {Category::Text, Category::SourceCode, Category::Url, Category::Image, Category::Linkage}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::optional<AttributeKind> parse_kind(std::string_view text) {
  for (auto k : {AttributeKind::Count, AttributeKind::Ratio, AttributeKind::Flag}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<Category> cue_category(std::string_view name) {
  if (name.starts_with("text:")) return Category::Text;
  if (name.starts_with("src:")) return Category::SourceCode;
  if (name.starts_with("url:")) return Category::Url;
  if (name.starts_with("image:")) return Category::Image;
  if (name.starts_with("link:")) return Category::Linkage;
  return std::nullopt;
}

AttributeKind cue_kind(std::string_view name) {
  for (const auto& cue : kFixedCues) {
    if (cue.name == name) return cue.kind;
  }
  return AttributeKind::Count;
}

std::span<const std::string_view> fixed_cue_names() { return kFixedNames; }

RawCues extract_page_cues(const Page& page, const Website& site) {
  RawCues cues;
  for (const auto& cue : kFixedCues) cues[std::string(cue.name)] = 0.0;

  const auto page_url = parse_absolute_url(page.url);
  std::set<std::string> siblings;
  for (const auto& other : site.pages) {
    if (other.page_id != page.page_id) siblings.insert(normalized_url(other.url));
  }

  const html::Document doc = html::tokenize(page.html);
  if (doc.ok) {
    add_text_cues(html::visible_text(doc), cues);
    add_markup_cues(doc, page_url ? &*page_url : nullptr, siblings, cues);
  } else {
    add_text_cues(page.html, cues);
    cues["src:parse_failed"] = 1.0;
  }
  add_url_cues(page.url, cues);
  return cues;
}

std::vector<RawCues> extract_corpus_cues(const Corpus& corpus) {
  std::vector<RawCues> out;
  out.reserve(corpus.page_count());
  for (const auto& site : corpus.websites) {
    for (const auto& page : site.pages) out.push_back(extract_page_cues(page, site));
  }
  return out;
}

AttributeCatalog::AttributeCatalog(std::vector<AttributeDescriptor> attributes, std::string provenance)
    : attributes_(std::move(attributes)), provenance_(std::move(provenance)) {
  Fnv1a hash;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const auto& attr = attributes_[i];
    if (attr.attr_id != i) throw DataError("attribute ids must be contiguous from 0");
    if (!index_.emplace(attr.name, attr.attr_id).second) {
      throw DataError("duplicate attribute name '" + attr.name + "'");
    }
    if (cue_category(attr.name) != attr.category) {
      throw DataError("attribute '" + attr.name + "' has a category that does not match its name");
    }
    hash.field(attr.name).field(to_string(attr.kind));
  }
  fingerprint_ = hash.value();
}

std::optional<std::uint32_t> AttributeCatalog::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

AttributeCatalog build_catalog(const Corpus& train, const ExtractionConfig& config) {
  const auto cues = extract_corpus_cues(train);
  return build_catalog(cues, corpus_fingerprint(train), config);
}

AttributeCatalog build_catalog(std::span<const RawCues> page_cues, std::string provenance,
                               const ExtractionConfig& config) {
  if (page_cues.empty()) throw InvalidArgument("cannot build a catalog from an empty corpus");
  if (config.max_vocab_per_category < 0 || config.min_doc_freq < 1) {
    throw InvalidArgument("max_vocab_per_category must be >= 0 and min_doc_freq >= 1");
  }

  std::map<std::string, std::uint32_t, std::less<>> doc_freq;
  for (const auto& cues : page_cues) {
    for (const auto& [name, value] : cues) {
      if (value > 0.0) ++doc_freq[name];
    }
  }
  auto df = [&](std::string_view name) -> std::uint32_t {
    auto it = doc_freq.find(name);
    return it == doc_freq.end() ? 0 : it->second;
  };

  std::vector<AttributeDescriptor> attributes;
  auto push = [&](std::string name, AttributeKind kind) {
    AttributeDescriptor d;
    d.attr_id = static_cast<std::uint32_t>(attributes.size());
    d.category = *cue_category(name);
    d.kind = kind;
    d.doc_freq = df(name);
    d.name = std::move(name);
    attributes.push_back(std::move(d));
  };
  for (const auto& cue : kFixedCues) push(std::string(cue.name), cue.kind);

  for (std::string_view prefix : {kUnigramPrefix, kTagPrefix, kExternalDomainPrefix}) {
    std::vector<std::pair<std::string, std::uint32_t>> vocab;
    for (auto it = doc_freq.lower_bound(prefix); it != doc_freq.end() && it->first.starts_with(prefix); ++it) {
      if (it->second >= static_cast<std::uint32_t>(config.min_doc_freq)) vocab.emplace_back(it->first, it->second);
    }
    std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (vocab.size() > static_cast<std::size_t>(config.max_vocab_per_category)) {
      vocab.resize(static_cast<std::size_t>(config.max_vocab_per_category));
    }
    for (auto& [name, freq] : vocab) push(std::move(name), AttributeKind::Count);
  }
  return AttributeCatalog(std::move(attributes), std::move(provenance));
}

void FeatureVector::normalize() {
  double sum = 0.0;
  for (const auto& [id, value] : entries) sum += value * value;
  if (sum <= 0.0) {
    entries.clear();
    norm = 0.0;
    all_zero = true;
    return;
  }
  const double scale = 1.0 / std::sqrt(sum);
  double check = 0.0;
  for (auto& [id, value] : entries) {
    value *= scale;
    check += value * value;
  }
  norm = std::sqrt(check);
  all_zero = false;
}

double dot(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      sum += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return sum;
}

FeatureVector vectorize_page(const RawCues& cues, const AttributeCatalog& catalog) {
  FeatureVector v;
  v.catalog_fingerprint = catalog.fingerprint();
  for (const auto& [name, value] : cues) {
    if (value == 0.0) continue;
    const auto id = catalog.find(name);
    if (!id) continue;
    const auto kind = catalog.attributes()[*id].kind;
    const double scaled = kind == AttributeKind::Count ? std::log1p(value) : value;
    v.entries.emplace_back(*id, scaled);
  }
  std::sort(v.entries.begin(), v.entries.end());
  v.normalize();
  return v;
}

}  // namespace kernelguard
