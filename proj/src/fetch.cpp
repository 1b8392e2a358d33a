#include "kernelguard/fetch.hpp"

#include <cctype>
#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include "httplib.h"

#include "kernelguard/error.hpp"
#include "kernelguard/html.hpp"
#include "kernelguard/text.hpp"
#include "kernelguard/url.hpp"

namespace kernelguard {
namespace {

std::string site_id_for(const Url& url) {
  std::string id = site_host(url.host);
  for (char& c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '_';
  }
  return id;
}

std::string request_target(const Url& url) {
  return url.query.empty() ? url.path : url.path + "?" + url.query;
}

bool is_html(const httplib::Result& res) {
  if (!res->has_header("Content-Type")) return true;
  const auto type = to_lower_ascii(res->get_header_value("Content-Type"));
  return type.find("text/html") != std::string::npos || type.find("application/xhtml") != std::string::npos;
}

}  // namespace

FetchResult fetch_site(const std::string& root_url, const FetchOptions& options) {
  const auto root = parse_absolute_url(root_url);
  if (!root || (root->scheme != "http" && root->scheme != "https")) {
    throw InvalidArgument("root url must be an absolute http(s) url: " + root_url);
  }
  if (options.max_pages < 1) throw InvalidArgument("max_pages must be >= 1");
  if (options.max_depth < 0) throw InvalidArgument("max_depth must be >= 0");
  if (options.delay_ms < 0) throw InvalidArgument("delay_ms must be >= 0");

  FetchResult result;
  Website& site = result.site;
  site.site_id = site_id_for(*root);
  site.label = Label::Real;  // placeholder; labels come from people
  site.root_url = root->to_string();

  std::map<std::string, std::unique_ptr<httplib::Client>> clients;
  auto client_for = [&](const Url& url) -> httplib::Client& {
    auto& slot = clients[url.origin()];
    if (!slot) {
      slot = std::make_unique<httplib::Client>(url.origin());
      slot->set_follow_location(true);
      slot->set_connection_timeout(options.timeout_seconds, 0);
      slot->set_read_timeout(options.timeout_seconds, 0);
      slot->set_default_headers({{"User-Agent", options.user_agent}});
    }
    return *slot;
  };

  std::deque<std::pair<Url, int>> queue;
  std::set<std::string> visited;
  Url start = *root;
  start.fragment.clear();
  queue.emplace_back(start, 0);
  visited.insert(start.to_string());
  bool first = true;

  while (!queue.empty() && site.pages.size() < static_cast<std::size_t>(options.max_pages)) {
    auto [url, depth] = queue.front();
    queue.pop_front();
    if (!first) std::this_thread::sleep_for(std::chrono::milliseconds(options.delay_ms));
    const bool is_root = first;
    first = false;

    const std::string address = url.to_string();
    auto res = client_for(url).Get(request_target(url));
    std::string problem;
    if (!res) {
      problem = "transport error: " + httplib::to_string(res.error());
    } else if (res->status < 200 || res->status >= 300) {
      problem = "HTTP status " + std::to_string(res->status);
    } else if (!is_html(res)) {
      problem = "non-HTML content type " + res->get_header_value("Content-Type");
    }
    if (!problem.empty()) {
      if (is_root) throw DataError("failed to fetch root " + address + ": " + problem);
      result.failures.push_back(address + ": " + problem);
      continue;
    }

    std::string id = std::to_string(site.pages.size());
    id = "p" + std::string(id.size() < 4 ? 4 - id.size() : 0, '0') + id;
    site.pages.push_back({id, address, decode_utf8_lossy(res->body)});

    if (depth >= options.max_depth) continue;
    const auto doc = html::tokenize(site.pages.back().html);
    for (const auto& token : doc.tokens) {
      if (token.kind != html::TokenKind::StartTag || (token.name != "a" && token.name != "area")) continue;
      const std::string* href = token.attribute("href");
      if (!href) continue;
      auto target = resolve_url(url, *href);
      if (!target || (target->scheme != "http" && target->scheme != "https")) continue;
      if (!same_site(*target, *root)) continue;
      target->fragment.clear();
      if (visited.insert(target->to_string()).second) queue.emplace_back(*target, depth + 1);
    }
  }
  return result;
}

}  // namespace kernelguard
