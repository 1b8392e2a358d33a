#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace kernelguard {

/// A parsed absolute URL. Host is lowercased; port is empty when the URL
/// does not spell one out.
struct Url {
  std::string scheme;
  std::string userinfo;
  std::string host;
  std::string port;
  std::string path;   // always begins with '/' ("/" when empty)
  std::string query;  // without the leading '?'
  std::string fragment;

  std::string to_string() const;
  /// scheme://host[:port]
  std::string origin() const;
};

/// Parses an absolute URL ("scheme://authority/path?query#frag").
/// Returns nullopt for relative references or an empty host.
std::optional<Url> parse_absolute_url(std::string_view text);

/// Resolves `reference` (absolute, scheme-relative, absolute-path, or
/// relative-path) against `base`. Returns nullopt for non-hierarchical
/// references such as "javascript:" or "mailto:".
std::optional<Url> resolve_url(const Url& base, std::string_view reference);

/// True for dotted-quad IPv4 literals and bracketed IPv6 literals.
bool is_ip_host(std::string_view host);

/// Host with a leading "www." removed; used for same-site comparisons.
std::string site_host(std::string_view host);

bool same_site(const Url& a, const Url& b);

}  // namespace kernelguard
