#include "doctest.h"
#include "kernelguard/html.hpp"

using namespace kernelguard::html;

TEST_CASE("tags, attributes and text") {
  const auto doc = tokenize("<A HREF='/x' class=big data-x>Hi &amp; bye</a><br/>");
  REQUIRE(doc.ok);
  REQUIRE(doc.tokens.size() == 4);
  CHECK(doc.tokens[0].kind == TokenKind::StartTag);
  CHECK(doc.tokens[0].name == "a");
  REQUIRE(doc.tokens[0].attribute("href"));
  CHECK(*doc.tokens[0].attribute("href") == "/x");
  CHECK(*doc.tokens[0].attribute("class") == "big");
  CHECK(doc.tokens[0].attribute("data-x")->empty());
  CHECK(doc.tokens[0].attribute("id") == nullptr);
  CHECK(doc.tokens[1].kind == TokenKind::Text);
  CHECK(doc.tokens[1].text == "Hi & bye");
  CHECK(doc.tokens[2].kind == TokenKind::EndTag);
  CHECK(doc.tokens[3].self_closing);
}

TEST_CASE("comments, doctype and script bodies") {
  const auto doc = tokenize("<!DOCTYPE html><!-- note --><script>if (a<b) x();</script><p>t</p>");
  REQUIRE(doc.ok);
  CHECK(doc.tokens[0].kind == TokenKind::Doctype);
  CHECK(doc.tokens[1].kind == TokenKind::Comment);
  CHECK(doc.tokens[2].name == "script");
  CHECK(doc.tokens[3].kind == TokenKind::EndTag);
  CHECK(visible_text(doc) == "t");
}

TEST_CASE("title text is visible") {
  CHECK(visible_text(tokenize("<title>Sign in</title><p>Welcome</p>")) == "Sign in Welcome");
}

TEST_CASE("stray angle bracket is text") {
  const auto doc = tokenize("a < b");
  CHECK(doc.ok);
  CHECK(visible_text(doc) == "a < b");
}

TEST_CASE("unterminated constructs fail") {
  CHECK_FALSE(tokenize("<div class='x").ok);
  CHECK_FALSE(tokenize("<!-- open").ok);
  CHECK_FALSE(tokenize("<script>var a = 1;").ok);
}

TEST_CASE("entities") {
  CHECK(decode_entities("&lt;&gt;&quot;&#39;&#x41;&nbsp;") == "<>\"'A\xC2\xA0");
  CHECK(decode_entities("&unknown; & x") == "&unknown; & x");
}

TEST_CASE("empty document") {
  const auto doc = tokenize("");
  CHECK(doc.ok);
  CHECK(doc.tokens.empty());
}
