#include "kernelguard/html.hpp"

#include <cctype>
#include <cstdint>

#include "kernelguard/text.hpp"

namespace kernelguard::html {
namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':' || c == '_';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

struct NamedEntity {
  std::string_view name;
  std::uint32_t code_point;
};

constexpr NamedEntity kEntities[] = {
    {"amp", '&'},     {"lt", '<'},      {"gt", '>'},      {"quot", '"'},   {"apos", '\''},
    {"nbsp", 0xA0},   {"copy", 0xA9},   {"reg", 0xAE},    {"trade", 0x2122}, {"euro", 0x20AC},
    {"pound", 0xA3},  {"mdash", 0x2014}, {"ndash", 0x2013}, {"hellip", 0x2026},
};

bool is_raw_text_element(std::string_view name) {
  return name == "script" || name == "style" || name == "textarea" || name == "title";
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view input) : in_(input) {}

  Document run() {
    while (pos_ < in_.size() && doc_.ok) {
      if (in_[pos_] == '<') {
        lt();
      } else {
        text_until_lt();
      }
    }
    flush_text();
    return std::move(doc_);
  }

 private:
  void lt() {
    const std::string_view rest = in_.substr(pos_);
    if (rest.starts_with("<!--")) {
      const auto end = in_.find("-->", pos_ + 4);
      if (end == std::string_view::npos) return fail();
      flush_text();
      doc_.tokens.push_back({TokenKind::Comment, {}, {}, std::string(in_.substr(pos_ + 4, end - pos_ - 4))});
      pos_ = end + 3;
    } else if (rest.starts_with("<!") || rest.starts_with("<?")) {
      const auto end = in_.find('>', pos_);
      if (end == std::string_view::npos) return fail();
      flush_text();
      doc_.tokens.push_back({TokenKind::Doctype, {}, {}, std::string(in_.substr(pos_ + 2, end - pos_ - 2))});
      pos_ = end + 1;
    } else if (rest.size() > 2 && rest[1] == '/' && is_alpha(rest[2])) {
      end_tag();
    } else if (rest.size() > 1 && is_alpha(rest[1])) {
      start_tag();
    } else {
      text_ += '<';
      ++pos_;
    }
  }

  void end_tag() {
    std::size_t i = pos_ + 2;
    const std::size_t name_start = i;
    while (i < in_.size() && is_name_char(in_[i])) ++i;
    std::string name = to_lower_ascii(in_.substr(name_start, i - name_start));
    const auto end = in_.find('>', i);
    if (end == std::string_view::npos) return fail();
    flush_text();
    doc_.tokens.push_back({TokenKind::EndTag, std::move(name), {}, {}});
    pos_ = end + 1;
  }

  void start_tag() {
    std::size_t i = pos_ + 1;
    const std::size_t name_start = i;
    while (i < in_.size() && is_name_char(in_[i])) ++i;
    Token tag{TokenKind::StartTag, to_lower_ascii(in_.substr(name_start, i - name_start)), {}, {}};

    while (true) {
      while (i < in_.size() && (is_space(in_[i]) || in_[i] == '/')) {
        if (in_[i] == '/' && i + 1 < in_.size() && in_[i + 1] == '>') tag.self_closing = true;
        ++i;
      }
      if (i >= in_.size()) return fail();
      if (in_[i] == '>') {
        ++i;
        break;
      }
      const std::size_t attr_start = i;
      while (i < in_.size() && !is_space(in_[i]) && in_[i] != '=' && in_[i] != '>' &&
             !(in_[i] == '/' && i + 1 < in_.size() && in_[i + 1] == '>')) {
        ++i;
      }
      Attribute attr{to_lower_ascii(in_.substr(attr_start, i - attr_start)), {}};
      while (i < in_.size() && is_space(in_[i])) ++i;
      if (i < in_.size() && in_[i] == '=') {
        ++i;
        while (i < in_.size() && is_space(in_[i])) ++i;
        if (i >= in_.size()) return fail();
        if (in_[i] == '"' || in_[i] == '\'') {
          const char quote = in_[i];
          const auto close = in_.find(quote, i + 1);
          if (close == std::string_view::npos) return fail();
          attr.value = decode_entities(in_.substr(i + 1, close - i - 1));
          i = close + 1;
        } else {
          const std::size_t value_start = i;
          while (i < in_.size() && !is_space(in_[i]) && in_[i] != '>') ++i;
          attr.value = decode_entities(in_.substr(value_start, i - value_start));
        }
      }
      if (!attr.name.empty()) tag.attributes.push_back(std::move(attr));
    }

    flush_text();
    const std::string name = tag.name;
    doc_.tokens.push_back(std::move(tag));
    pos_ = i;
    if (is_raw_text_element(name) && !doc_.tokens.back().self_closing) raw_text(name);
  }

  // Body of script/style/textarea/title up to the matching end tag.
  void raw_text(const std::string& name) {
    const std::string closing = "</" + name;
    std::size_t search = pos_;
    std::size_t found = std::string_view::npos;
    while (search < in_.size()) {
      const auto lt = in_.find("</", search);
      if (lt == std::string_view::npos) break;
      if (starts_with_ci(in_.substr(lt), closing)) {
        found = lt;
        break;
      }
      search = lt + 2;
    }
    if (found == std::string_view::npos) return fail();
    const auto body = in_.substr(pos_, found - pos_);
    if (name == "title" || name == "textarea") {
      doc_.tokens.push_back({TokenKind::Text, {}, {}, decode_entities(body)});
    }
    pos_ = found;
    end_tag();
  }

  void text_until_lt() {
    const auto next = in_.find('<', pos_);
    const auto end = next == std::string_view::npos ? in_.size() : next;
    text_.append(in_.substr(pos_, end - pos_));
    pos_ = end;
  }

  void flush_text() {
    if (text_.empty()) return;
    doc_.tokens.push_back({TokenKind::Text, {}, {}, decode_entities(text_)});
    text_.clear();
  }

  void fail() {
    flush_text();
    doc_.ok = false;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::string text_;
  Document doc_;
};

}  // namespace

const std::string* Token::attribute(std::string_view attr_name) const {
  for (const auto& attr : attributes) {
    if (attr.name == attr_name) return &attr.value;
  }
  return nullptr;
}

Document tokenize(std::string_view markup) { return Tokenizer(markup).run(); }

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += text[i++];
      continue;
    }
    const auto body = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (body.size() > 1 && body[0] == '#') {
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const auto digits = body.substr(hex ? 2 : 1);
      std::uint32_t cp = 0;
      bool valid = !digits.empty();
      for (char c : digits) {
        const int d = hex ? (std::isxdigit(static_cast<unsigned char>(c))
                                 ? (std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : (std::tolower(c) - 'a' + 10))
                                 : -1)
                          : (std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : -1);
        if (d < 0 || cp > 0x10FFFF) {
          valid = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (valid) {
        append_utf8(out, cp);
        decoded = true;
      }
    } else {
      for (const auto& entity : kEntities) {
        if (entity.name == body) {
          append_utf8(out, entity.code_point);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

std::string visible_text(const Document& doc) {
  std::string out;
  for (const auto& token : doc.tokens) {
    if (token.kind != TokenKind::Text) continue;
    if (!out.empty()) out += ' ';
    out += token.text;
  }
  return out;
}

}  // namespace kernelguard::html
