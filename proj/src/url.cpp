#include "kernelguard/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "kernelguard/text.hpp"

namespace kernelguard {
namespace {

bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

// Returns the scheme if `text` starts with "<scheme>:".
std::string_view scheme_of(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) return {};
  if (!std::isalpha(static_cast<unsigned char>(text[0]))) return {};
  for (std::size_t i = 0; i < colon; ++i) {
    if (!is_scheme_char(text[i])) return {};
  }
  return text.substr(0, colon);
}

std::string trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

void split_path_query_fragment(std::string_view rest, Url& url) {
  const auto hash = rest.find('#');
  if (hash != std::string_view::npos) {
    url.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  const auto question = rest.find('?');
  if (question != std::string_view::npos) {
    url.query = std::string(rest.substr(question + 1));
    rest = rest.substr(0, question);
  }
  url.path = std::string(rest);
}

// RFC 3986 section 5.2.4.
std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> segments;
  std::size_t start = 1;
  const bool trailing = path.ends_with("/") || path.ends_with("/.") || path.ends_with("/..");
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    const auto segment = path.substr(start, end - start);
    if (segment == "..") {
      if (!segments.empty()) segments.pop_back();
    } else if (segment != "." && !segment.empty()) {
      segments.push_back(segment);
    } else if (segment.empty() && end != path.size()) {
      segments.push_back(segment);  // keep "//" runs
    }
    start = end + 1;
  }
  std::string out;
  for (const auto& segment : segments) {
    out += '/';
    out += segment;
  }
  if (out.empty() || (trailing && out.back() != '/')) out += '/';
  return out;
}

}  // namespace

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (!port.empty()) out += ":" + port;
  return out;
}

std::string Url::to_string() const {
  std::string out = scheme + "://";
  if (!userinfo.empty()) out += userinfo + "@";
  out += host;
  if (!port.empty()) out += ":" + port;
  out += path;
  if (!query.empty()) out += "?" + query;
  if (!fragment.empty()) out += "#" + fragment;
  return out;
}

std::optional<Url> parse_absolute_url(std::string_view input) {
  const std::string text = trim(input);
  const auto scheme = scheme_of(text);
  if (scheme.empty()) return std::nullopt;
  std::string_view rest = std::string_view(text).substr(scheme.size() + 1);
  if (!rest.starts_with("//")) return std::nullopt;
  rest.remove_prefix(2);

  Url url;
  url.scheme = to_lower_ascii(scheme);
  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

  const auto at = authority.rfind('@');
  if (at != std::string_view::npos) {
    url.userinfo = std::string(authority.substr(0, at));
    authority = authority.substr(at + 1);
  }
  if (authority.starts_with("[")) {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    url.host = to_lower_ascii(authority.substr(0, close + 1));
    authority = authority.substr(close + 1);
    if (authority.starts_with(":")) url.port = std::string(authority.substr(1));
    else if (!authority.empty()) return std::nullopt;
  } else {
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
      url.port = std::string(authority.substr(colon + 1));
      authority = authority.substr(0, colon);
    }
    url.host = to_lower_ascii(authority);
  }
  if (url.host.empty()) return std::nullopt;
  if (!std::all_of(url.port.begin(), url.port.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::nullopt;
  }
  split_path_query_fragment(rest, url);
  if (url.path.empty()) url.path = "/";
  return url;
}

std::optional<Url> resolve_url(const Url& base, std::string_view input) {
  const std::string reference = trim(input);
  const auto scheme = scheme_of(reference);
  if (!scheme.empty()) {
    // Absolute, or an opaque scheme such as mailto:/javascript:.
    return parse_absolute_url(reference);
  }
  if (reference.starts_with("//")) return parse_absolute_url(base.scheme + ":" + reference);

  Url out = base;
  out.fragment.clear();
  if (reference.empty()) return out;
  if (reference.starts_with("#")) {
    out.fragment = reference.substr(1);
    return out;
  }
  Url parts;
  split_path_query_fragment(reference, parts);
  out.fragment = parts.fragment;
  if (parts.path.empty()) {
    out.query = parts.query;  // "?q" keeps the base path
    return out;
  }
  out.query = parts.query;
  if (parts.path.starts_with("/")) {
    out.path = remove_dot_segments(parts.path);
  } else {
    const auto slash = base.path.rfind('/');
    const std::string dir = slash == std::string::npos ? "/" : base.path.substr(0, slash + 1);
    out.path = remove_dot_segments(dir + parts.path);
  }
  return out;
}

bool is_ip_host(std::string_view host) {
  if (host.starts_with("[") && host.ends_with("]")) return true;
  int parts = 0;
  std::size_t start = 0;
  while (true) {
    const auto dot = host.find('.', start);
    const auto part = host.substr(start, dot == std::string_view::npos ? host.npos : dot - start);
    if (part.empty() || part.size() > 3) return false;
    int value = 0;
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      value = value * 10 + (c - '0');
    }
    if (value > 255) return false;
    ++parts;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts == 4;
}

std::string site_host(std::string_view host) {
  if (host.starts_with("www.")) host.remove_prefix(4);
  return std::string(host);
}

bool same_site(const Url& a, const Url& b) { return site_host(a.host) == site_host(b.host); }

}  // namespace kernelguard
