#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "kernelguard/corpus.hpp"
#include "kernelguard/error.hpp"
#include "kernelguard/rng.hpp"

namespace kernelguard {
namespace {

// Shared vocabulary of legitimate storefronts.
const std::vector<std::string> kCommerceWords = {
    "shop",      "cart",      "product",   "products",  "shipping",  "delivery",  "returns",
    "order",     "orders",    "customer",  "service",   "support",   "account",   "sign",
    "help",      "contact",   "about",     "company",   "careers",   "press",     "store",
    "locations", "gift",      "cards",     "sale",      "deals",     "new",       "arrivals",
    "home",      "kitchen",   "electronics", "fashion", "books",     "music",     "toys",
    "garden",    "sports",    "outdoor",   "beauty",    "health",    "price",     "prices",
    "review",    "reviews",   "rating",    "ratings",   "wishlist",  "compare",   "brand",
    "brands",    "catalog",   "category",  "categories", "featured", "popular",   "best",
    "sellers",   "free",      "warranty",  "policy",    "privacy",   "terms",     "conditions",
    "newsletter", "subscribe", "email",    "updates",   "members",   "rewards",   "points",
    "checkout",  "payment",   "options",   "secure",    "shopping",  "track",     "package",
    "faq",       "questions", "size",      "guide",     "color",     "colors",    "quantity",
    "add",       "view",      "details",   "description", "specifications", "availability",
    "stock",     "limited",   "offer",     "today",     "week",      "season",    "collection",
    "style",     "materials", "designed",  "crafted",   "since",     "family",    "owned",
    "community", "stores",    "nationwide", "online",   "exclusive", "savings",   "discount",
    "coupon",    "codes",     "holiday",   "summer",    "winter",    "spring",    "the",
    "and",       "for",       "our",       "your",      "with",      "all",       "from"};

// Vocabulary of fabricated businesses. Made disjoint from kCommerceWords
// when the generator starts.
const std::vector<std::string> kConcoctedWords = {
    "escrow",     "guaranteed", "investment", "profit",      "wire",       "transfer",
    "western",    "union",      "agent",      "agents",      "trusted",    "verified",
    "certified",  "licensed",   "insured",    "bonded",      "transaction", "transactions",
    "funds",      "deposit",    "release",    "beneficiary", "claim",      "claims",
    "lottery",    "winner",     "prize",      "inheritance", "consignment", "courier",
    "diplomatic", "clearance",  "customs",    "fee",         "fees",       "urgent",
    "immediately", "confidential", "approved", "loan",       "loans",      "credit",
    "instant",    "cash",       "bitcoin",    "crypto",      "wallet",     "mining",
    "yield",      "portfolio",  "dividend",   "broker",      "brokerage",  "forex",
    "trading",    "signals",    "premium",    "vip",         "membership", "pharmacy",
    "pills",      "prescription", "generic",  "replica",     "watches",    "luxury",
    "wholesale",  "cheap",      "lowest",     "overnight",   "worldwide",  "anonymous",
    "discreet",   "bank",       "banking",    "routing",     "swift",      "iban",
    "officer",    "manager",    "director",   "federal",     "reserve",    "treasury",
    "department", "international", "holdings", "capital",    "group",      "partners",
    "we",         "you",        "is",         "are",         "this",       "of"};

// Real brand syllables avoid x/y/z/q; concocted syllables always contain one,
// so generated names from the two families never collide.
const std::vector<std::string> kRealSyllables = {"ka", "lo", "mi", "ren", "tor", "vel", "sa", "din",
                                                 "por", "lem", "na", "bri", "cal", "fen", "gra", "hol"};
const std::vector<std::string> kConcoctedSyllables = {"zy", "qua", "xen", "vox", "zor",
                                                      "yx", "quel", "zam", "xil", "yor"};

const std::vector<std::string> kSections = {"shop", "products", "deals", "help", "about", "account",
                                            "stores", "gifts"};
const std::vector<std::string> kSocialHosts = {"www.facebook.com", "twitter.com", "www.instagram.com",
                                               "www.youtube.com", "www.linkedin.com", "www.pinterest.com"};

std::string make_name(Rng& rng, const std::vector<std::string>& syllables, int min_syl, int max_syl) {
  std::string name;
  const auto n = rng.between(min_syl, max_syl);
  for (int i = 0; i < n; ++i) name += rng.pick(syllables);
  return name;
}

std::vector<std::string> unique_names(Rng& rng, const std::vector<std::string>& syllables, std::size_t n,
                                      std::set<std::string>& taken) {
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string name = make_name(rng, syllables, 2, 3);
    if (taken.insert(name).second) out.push_back(std::move(name));
  }
  return out;
}

std::string sentence(Rng& rng, const std::vector<std::string>& shared,
                     const std::vector<std::string>& own, int words, double own_share) {
  std::string out;
  for (int i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += rng.chance(own_share) ? rng.pick(own) : rng.pick(shared);
  }
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  if (from.empty()) return;
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string pad3(int i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

std::string page_path(int index, const std::string& section, const std::string& slug) {
  return index == 0 ? "/index.html" : "/" + section + "/" + slug + ".html";
}

struct SitePlan {
  std::string brand;
  std::vector<std::string> words;
  std::vector<std::string> paths;
  std::vector<std::string> titles;
};

SitePlan plan_site(Rng& rng, const std::string& brand, std::vector<std::string> words, int pages,
                   const std::vector<std::string>& shared) {
  SitePlan plan{brand, std::move(words), {}, {}};
  std::set<std::string> used;
  for (int p = 0; p < pages; ++p) {
    std::string path;
    std::string title;
    do {
      const auto& section = rng.pick(kSections);
      title = rng.pick(shared) + "-" + rng.pick(plan.words);
      path = page_path(p, section, title);
    } while (!used.insert(path).second);
    plan.paths.push_back(path);
    plan.titles.push_back(p == 0 ? "Home" : capitalize(title));
  }
  return plan;
}

std::string real_page(Rng& rng, const SitePlan& plan, const std::string& origin, const std::string& host,
                      int index, bool login_page) {
  std::string h;
  h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  h += "<title>" + capitalize(plan.brand) + " | " + plan.titles[static_cast<std::size_t>(index)] + "</title>\n";
  h += "<link rel=\"stylesheet\" href=\"" + origin + "/static/site.css\">\n";
  h += "<script src=\"" + origin + "/static/app.js\"></script>\n</head>\n<body>\n";
  h += "<div class=\"header\">\n<a href=\"" + origin + "/index.html\"><img src=\"" + origin +
       "/static/logo.png\" alt=\"" + plan.brand + " logo\"></a>\n<ul class=\"nav\">\n";
  for (std::size_t p = 0; p < plan.paths.size(); ++p) {
    h += "<li><a href=\"" + origin + plan.paths[p] + "\">" + plan.titles[p] + "</a></li>\n";
  }
  h += "</ul>\n<form action=\"" + origin + "/search\" method=\"get\"><input type=\"text\" name=\"q\">"
       "<input type=\"submit\" value=\"Search\"></form>\n</div>\n<div class=\"content\">\n";
  h += "<h1>" + capitalize(sentence(rng, kCommerceWords, plan.words, 4, 0.4)) + "</h1>\n";
  const auto paragraphs = rng.between(3, 6);
  for (int i = 0; i < paragraphs; ++i) {
    h += "<p>" + capitalize(sentence(rng, kCommerceWords, plan.words, static_cast<int>(rng.between(18, 40)), 0.3)) +
         ".</p>\n";
    if (rng.chance(0.5)) {
      h += "<img src=\"" + origin + "/img/item" + std::to_string(rng.between(1, 400)) + ".jpg\" alt=\"" +
           sentence(rng, kCommerceWords, plan.words, 3, 0.3) + "\">\n";
    }
  }
  if (login_page) {
    h += "<h2>Sign in to your account</h2>\n<form action=\"" + origin +
         "/account/login\" method=\"post\">\n<input type=\"hidden\" name=\"csrf\" value=\"" +
         std::to_string(rng.between(100000, 999999)) +
         "\">\n<input type=\"email\" name=\"email\">\n<input type=\"password\" name=\"password\">\n"
         "<input type=\"submit\" value=\"Sign in\">\n</form>\n";
  }
  h += "</div>\n<div class=\"footer\">\n";
  const auto socials = rng.between(1, 3);
  for (int i = 0; i < socials; ++i) {
    h += "<a href=\"https://" + rng.pick(kSocialHosts) + "/" + plan.brand + "\">" +
         capitalize(rng.pick(kCommerceWords)) + "</a>\n";
  }
  h += "<p>Copyright " + host + " " + sentence(rng, kCommerceWords, plan.words, 6, 0.2) + "</p>\n";
  h += "</div>\n</body>\n</html>\n";
  return h;
}

// Markup-only fraud markers: they add no visible text.
std::string fraud_markup(Rng& rng, const std::string& drop_host) {
  const std::string drop = "http://" + drop_host;
  std::string h;
  h += "<form action=\"" + drop + "/verify/login.php\" method=\"post\">\n";
  h += "<input type=\"hidden\" name=\"session\" value=\"" + std::to_string(rng.between(10000000, 99999999)) + "\">\n";
  h += "<input type=\"hidden\" name=\"ref\" value=\"" + std::to_string(rng.between(1, 999)) + "\">\n";
  h += "<input type=\"email\" name=\"user\">\n<input type=\"password\" name=\"pass\">\n";
  h += "<input type=\"submit\" value=\"Continue\">\n</form>\n";
  h += "<a href=\"" + drop + "/secure/update.php\"><img src=\"" + drop + "/img/secure-seal.png\"></a>\n";
  h += "<iframe src=\"" + drop + "/track.php\" width=\"0\" height=\"0\" onload=\"init()\"></iframe>\n";
  h += "<script>document.forms[0].onsubmit = function() { return true; };</script>\n";
  return h;
}

std::string random_ip(Rng& rng) {
  return std::to_string(rng.between(11, 223)) + "." + std::to_string(rng.between(0, 255)) + "." +
         std::to_string(rng.between(0, 255)) + "." + std::to_string(rng.between(1, 254));
}

std::string spoof_host(Rng& rng, const std::string& brand) {
  switch (rng.below(3)) {
    case 0: return random_ip(rng);
    case 1: return brand + "-secure-login." + rng.pick(std::vector<std::string>{"com", "net", "info"});
    default: return "www." + brand + ".account-verify" + std::to_string(rng.between(1, 99)) + ".com";
  }
}

std::string concocted_page(Rng& rng, const SitePlan& plan, const std::vector<std::string>& vocab,
                           const std::string& origin, int index, const std::string& drop_host) {
  std::string h;
  h += "<html>\n<head>\n<title>" + capitalize(plan.brand) + " " +
       capitalize(rng.pick(vocab)) + "</title>\n";
  if (index == 0 && rng.chance(0.3)) {
    h += "<meta http-equiv=\"refresh\" content=\"30;url=" + origin + plan.paths.back() + "\">\n";
  }
  h += "</head>\n<body bgcolor=\"#ffffff\" onload=\"start()\">\n<center>\n<table width=\"780\">\n<tr><td>\n";
  h += "<img src=\"http://" + drop_host + "/images/banner" + std::to_string(rng.between(1, 9)) + ".gif\">\n";
  h += "<font size=\"2\">\n";
  for (std::size_t p = 0; p < plan.paths.size(); ++p) {
    h += "<a href=\"" + origin + plan.paths[p] + "\">" + plan.titles[p] + "</a> |\n";
  }
  h += "</font>\n</td></tr>\n<tr><td>\n";
  h += "<h2>" + capitalize(sentence(rng, vocab, plan.words, 5, 0.3)) + "</h2>\n";
  const auto paragraphs = rng.between(3, 6);
  for (int i = 0; i < paragraphs; ++i) {
    h += "<p><font face=\"Arial\">" +
         capitalize(sentence(rng, vocab, plan.words, static_cast<int>(rng.between(18, 40)), 0.3)) +
         ".</font></p>\n";
    if (rng.chance(0.4)) {
      h += "<img src=\"" + origin + "/images/pic" + std::to_string(rng.between(1, 60)) + ".jpg\">\n";
    }
  }
  h += "<a href=\"#\">" + capitalize(rng.pick(vocab)) + "</a>\n";
  h += "<a href=\"javascript:void(0)\">" + capitalize(rng.pick(vocab)) + "</a>\n";
  h += fraud_markup(rng, drop_host);
  h += "</td></tr>\n</table>\n</center>\n</body>\n</html>\n";
  return h;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SynthSpec& spec) {
  if (spec.n_real < 0 || spec.n_spoof < 0 || spec.n_concocted < 0) {
    throw InvalidArgument("site counts must be >= 0");
  }
  if (spec.pages_per_site < 1) throw InvalidArgument("pages_per_site must be >= 1");
  if (spec.n_spoof > 0 && spec.n_real < 1) {
    throw InvalidArgument("spoof sites need at least one real site to copy");
  }

  std::vector<std::string> concocted_words;
  {
    const std::set<std::string> commerce(kCommerceWords.begin(), kCommerceWords.end());
    for (const auto& w : kConcoctedWords) {
      if (!commerce.count(w)) concocted_words.push_back(w);
    }
  }

  Rng rng(spec.seed);
  SyntheticCorpus out;
  out.corpus.provenance = "synthetic: real=" + std::to_string(spec.n_real) +
                          " spoof=" + std::to_string(spec.n_spoof) +
                          " concocted=" + std::to_string(spec.n_concocted) +
                          " pages=" + std::to_string(spec.pages_per_site) +
                          " seed=" + std::to_string(spec.seed);
  std::set<std::string> taken;

  std::vector<std::string> real_hosts;
  for (int i = 0; i < spec.n_real; ++i) {
    const std::string brand = unique_names(rng, kRealSyllables, 1, taken).front();
    auto plan = plan_site(rng, brand, unique_names(rng, kRealSyllables, 25, taken), spec.pages_per_site,
                          kCommerceWords);
    const std::string host = "www." + brand + ".com";
    const std::string origin = "https://" + host;
    const bool has_login = spec.pages_per_site > 1 && rng.chance(1.0 / 3.0);
    Website site{"real_" + pad3(i), Label::Real, origin + "/", {}};
    for (int p = 0; p < spec.pages_per_site; ++p) {
      site.pages.push_back({"p" + pad3(p), origin + plan.paths[static_cast<std::size_t>(p)],
                            real_page(rng, plan, origin, host, p, has_login && p == 1)});
    }
    real_hosts.push_back(host);
    out.corpus.websites.push_back(std::move(site));
  }

  // Spoofs concentrate on a few popular targets, about three per target.
  const int n_targets = std::min(spec.n_real, std::max(1, (spec.n_spoof + 2) / 3));
  for (int j = 0; j < spec.n_spoof; ++j) {
    const auto target = static_cast<std::size_t>(j % n_targets);
    const Website& source = out.corpus.websites[target];
    const std::string& source_host = real_hosts[target];
    const std::string brand = source_host.substr(4, source_host.size() - 8);
    const std::string host = spoof_host(rng, brand);
    const std::string drop_host = random_ip(rng);
    Website site{"spoof_" + pad3(j), Label::Spoof, "http://" + host + "/", {}};
    for (const auto& page : source.pages) {
      std::string html = page.html;
      replace_all(html, "https://" + source_host, "http://" + host);
      replace_all(html, source_host, host);
      const auto body_end = html.rfind("</body>");
      html.insert(body_end, fraud_markup(rng, drop_host));
      std::string url = page.url;
      replace_all(url, "https://" + source_host, "http://" + host);
      site.pages.push_back({page.page_id, url, std::move(html)});
    }
    out.spoof_sources[site.site_id] = source.site_id;
    out.host_swaps[site.site_id] = {source_host, host};
    out.corpus.websites.push_back(std::move(site));
  }

  for (int c = 0; c < spec.n_concocted; ++c) {
    const std::string name = unique_names(rng, kConcoctedSyllables, 1, taken).front();
    auto plan = plan_site(rng, name, unique_names(rng, kConcoctedSyllables, 25, taken), spec.pages_per_site,
                          concocted_words);
    const std::string host = name + "-" + rng.pick(concocted_words) + "-" + rng.pick(concocted_words) + "." +
                             rng.pick(std::vector<std::string>{"com", "net", "biz", "org"});
    const std::string origin = (rng.chance(0.5) ? "https://" : "http://") + host;
    const std::string drop_host = rng.chance(0.5) ? random_ip(rng) : host;
    Website site{"concocted_" + pad3(c), Label::Concocted, origin + "/", {}};
    for (int p = 0; p < spec.pages_per_site; ++p) {
      site.pages.push_back({"p" + pad3(p), origin + plan.paths[static_cast<std::size_t>(p)],
                            concocted_page(rng, plan, concocted_words, origin, p, drop_host)});
    }
    out.corpus.websites.push_back(std::move(site));
  }

  std::sort(out.corpus.websites.begin(), out.corpus.websites.end(),
            [](const Website& a, const Website& b) { return a.site_id < b.site_id; });
  return out;
}

}  // namespace kernelguard
