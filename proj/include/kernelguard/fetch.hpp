#pragma once

#include <string>
#include <vector>

#include "kernelguard/corpus.hpp"

namespace kernelguard {

struct FetchOptions {
  int max_pages = 20;
  int max_depth = 2;
  int delay_ms = 500;
  int timeout_seconds = 10;
  std::string user_agent = "kernelguard-fetch/0.1";
};

struct FetchResult {
  Website site;
  std::vector<std::string> failures;  // "<url>: <reason>" for skipped pages
};

/// Breadth-first, same-host crawl starting at `root_url`. The site is
/// labelled Real as a placeholder; labels are assigned by people.
/// Throws DataError when the root page cannot be fetched.
FetchResult fetch_site(const std::string& root_url, const FetchOptions& options);

}  // namespace kernelguard
