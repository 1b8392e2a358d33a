#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kernelguard::html {

struct Attribute {
  std::string name;   // lowercased
  std::string value;  // entity-decoded
};

enum class TokenKind { StartTag, EndTag, Text, Comment, Doctype };

struct Token {
  TokenKind kind;
  std::string name;  // lowercased tag name for StartTag/EndTag
  std::vector<Attribute> attributes;
  std::string text;  // decoded text for Text, raw body for Comment
  bool self_closing = false;

  const std::string* attribute(std::string_view attr_name) const;
};

/// Tokenized markup. `ok` is false when the markup ended inside an
/// unterminated tag or comment; tokens up to that point are kept.
struct Document {
  std::vector<Token> tokens;
  bool ok = true;
};

/// Lenient tokenizer. Script and style bodies are raw text and never
/// produce tags. Never throws.
Document tokenize(std::string_view markup);

/// Decodes the common named entities and numeric character references.
std::string decode_entities(std::string_view text);

/// Concatenated human-visible text (text outside script/style), with a
/// single space between text runs.
std::string visible_text(const Document& doc);

}  // namespace kernelguard::html
