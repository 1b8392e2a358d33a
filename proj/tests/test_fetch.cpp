#include <chrono>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "kernelguard/error.hpp"
#include "kernelguard/fetch.hpp"

using namespace kernelguard;

namespace {

// A small site served from 127.0.0.1 on an ephemeral port.
class LocalSite {
 public:
  LocalSite() {
    html("/", "<a href='/a'>A</a><a href='b#frag'>B</a><a href='http://elsewhere.invalid/x'>X</a>"
              "<a href='/logo.png'>img</a><a href='/missing'>gone</a><a href='/a'>again</a>");
    html("/a", "<p>page a</p><a href='/deep'>deeper</a>");
    html("/b", "<p>page b</p>");
    html("/deep", "<p>deep</p>");
    html("/offsite", "<a href='http://elsewhere.invalid/'>away</a>");
    server_.Get("/logo.png", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("PNG", "image/png");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalSite() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  void html(const std::string& path, const std::string& body) {
    server_.Get(path, [body](const httplib::Request&, httplib::Response& res) {
      res.set_content(body, "text/html; charset=utf-8");
    });
  }
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

FetchOptions quick(int max_pages, int max_depth, int delay_ms = 0) {
  FetchOptions o;
  o.max_pages = max_pages;
  o.max_depth = max_depth;
  o.delay_ms = delay_ms;
  o.timeout_seconds = 2;
  return o;
}

}  // namespace

TEST_CASE("breadth-first, same host, failures recorded") {
  LocalSite s;
  const auto r = fetch_site(s.url("/"), quick(20, 2));
  REQUIRE(r.site.pages.size() == 4);
  CHECK(r.site.pages[0].url == s.url("/"));
  CHECK(r.site.pages[1].url == s.url("/a"));
  CHECK(r.site.pages[2].url == s.url("/b"));
  CHECK(r.site.pages[3].url == s.url("/deep"));
  CHECK(r.site.pages[0].page_id == "p0000");
  CHECK(r.site.label == Label::Real);
  CHECK(r.site.site_id == "127_0_0_1");
  CHECK(r.failures.size() == 2);  // image/png and 404
}

TEST_CASE("depth limit") {
  LocalSite s;
  CHECK(fetch_site(s.url("/"), quick(20, 1)).site.pages.size() == 3);
  CHECK(fetch_site(s.url("/"), quick(20, 0)).site.pages.size() == 1);
}

TEST_CASE("max_pages = 1 keeps only the root") {
  LocalSite s;
  const auto r = fetch_site(s.url("/"), quick(1, 2));
  REQUIRE(r.site.pages.size() == 1);
  CHECK(r.site.pages[0].url == s.url("/"));
}

TEST_CASE("off-host links are not followed") {
  LocalSite s;
  const auto r = fetch_site(s.url("/offsite"), quick(20, 3));
  CHECK(r.site.pages.size() == 1);
  CHECK(r.failures.empty());
}

TEST_CASE("delay between requests") {
  LocalSite s;
  const auto start = std::chrono::steady_clock::now();
  const auto r = fetch_site(s.url("/"), quick(3, 2, 60));
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(r.site.pages.size() == 3);
  CHECK(elapsed >= std::chrono::milliseconds(120));
}

TEST_CASE("unreachable root reports the transport failure") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  try {
    fetch_site("http://127.0.0.1:" + std::to_string(port) + "/", quick(5, 1));
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("transport error") != std::string::npos);
  }
}

TEST_CASE("non-html root is an error") {
  LocalSite s;
  CHECK_THROWS_AS(fetch_site(s.url("/logo.png"), quick(5, 1)), DataError);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(fetch_site("ftp://example.com/", quick(1, 0)), InvalidArgument);
  CHECK_THROWS_AS(fetch_site("/relative", quick(1, 0)), InvalidArgument);
  CHECK_THROWS_AS(fetch_site("http://127.0.0.1/", quick(0, 0)), InvalidArgument);
  CHECK_THROWS_AS(fetch_site("http://127.0.0.1/", quick(1, -1)), InvalidArgument);
}
