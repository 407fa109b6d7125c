#include "xml_scanner.hpp"

#include <cctype>
#include <charconv>

namespace ptk::xml {

namespace {

bool is_name_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || c == '.' || c == ':' || u >= 0x80;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string& out, char32_t cp) {
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

}  // namespace

void Scanner::fail(const std::string& what) const { throw XmlError(what, line_, column_); }

void Scanner::advance(std::size_t n) {
  for (std::size_t i = 0; i < n && pos_ < in_.size(); ++i, ++pos_) {
    if (in_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
  }
}

void Scanner::skip_until(std::string_view terminator, const char* what) {
  auto end = in_.find(terminator, pos_);
  if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
  advance(end + terminator.size() - pos_);
}

void Scanner::skip_space() {
  while (pos_ < in_.size() && is_space(in_[pos_])) advance(1);
}

std::string Scanner::read_name() {
  std::size_t start = pos_;
  while (pos_ < in_.size() && is_name_char(in_[pos_])) advance(1);
  if (pos_ == start) fail("expected a name");
  return std::string(in_.substr(start, pos_ - start));
}

std::string Scanner::decode(std::string_view raw) const {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out += raw[i];
      continue;
    }
    auto semi = raw.find(';', i);
    if (semi == std::string_view::npos) fail("unterminated entity reference");
    auto name = raw.substr(i + 1, semi - i - 1);
    if (name == "amp") out += '&';
    else if (name == "lt") out += '<';
    else if (name == "gt") out += '>';
    else if (name == "quot") out += '"';
    else if (name == "apos") out += '\'';
    else if (name.size() > 1 && name[0] == '#') {
      bool hex = name[1] == 'x' || name[1] == 'X';
      auto digits = name.substr(hex ? 2 : 1);
      std::uint32_t cp = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size() || cp > 0x10FFFF)
        fail("bad character reference '&" + std::string(name) + ";'");
      append_utf8(out, static_cast<char32_t>(cp));
    } else {
      fail("unknown entity '&" + std::string(name) + ";'");
    }
    i = semi;
  }
  return out;
}

Event Scanner::read_tag() {
  advance(1);  // '<'
  if (pos_ < in_.size() && in_[pos_] == '/') {
    advance(1);
    std::string name = read_name();
    skip_space();
    if (pos_ >= in_.size() || in_[pos_] != '>') fail("expected '>' in end tag");
    advance(1);
    if (open_.empty() || open_.back() != name)
      fail("end tag </" + name + "> does not match " + (open_.empty() ? std::string("any open element") : "<" + open_.back() + ">"));
    open_.pop_back();
    Event e;
    e.kind = EventKind::end;
    e.name = std::move(name);
    return e;
  }

  if (open_.empty() && seen_root_) fail("content after the root element");
  Event e;
  e.kind = EventKind::start;
  e.name = read_name();
  for (;;) {
    skip_space();
    if (pos_ >= in_.size()) fail("unterminated start tag <" + e.name + ">");
    if (in_[pos_] == '>') {
      advance(1);
      break;
    }
    if (starts_with("/>")) {
      advance(2);
      e.self_closing = true;
      break;
    }
    std::string attr = read_name();
    skip_space();
    if (pos_ >= in_.size() || in_[pos_] != '=') fail("expected '=' after attribute " + attr);
    advance(1);
    skip_space();
    if (pos_ >= in_.size() || (in_[pos_] != '"' && in_[pos_] != '\'')) fail("expected quoted value for " + attr);
    char quote = in_[pos_];
    advance(1);
    auto close = in_.find(quote, pos_);
    if (close == std::string_view::npos) fail("unterminated attribute value");
    auto raw = in_.substr(pos_, close - pos_);
    if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value");
    std::string value = decode(raw);
    advance(close + 1 - pos_);
    if (!e.attributes.emplace(std::move(attr), std::move(value)).second) fail("duplicate attribute");
  }
  seen_root_ = true;
  if (e.self_closing) {
    pending_end_ = true;
    pending_name_ = e.name;
  } else {
    open_.push_back(e.name);
  }
  return e;
}

Event Scanner::next() {
  if (pending_end_) {
    pending_end_ = false;
    Event e;
    e.kind = EventKind::end;
    e.name = std::move(pending_name_);
    return e;
  }
  while (pos_ < in_.size()) {
    if (starts_with("<!--")) {
      skip_until("-->", "comment");
    } else if (starts_with("<?")) {
      skip_until("?>", "processing instruction");
    } else if (starts_with("<![CDATA[")) {
      if (open_.empty()) fail("CDATA outside the root element");
      advance(9);
      auto end = in_.find("]]>", pos_);
      if (end == std::string_view::npos) fail("unterminated CDATA section");
      Event e;
      e.kind = EventKind::text;
      e.text = std::string(in_.substr(pos_, end - pos_));
      advance(end + 3 - pos_);
      return e;
    } else if (starts_with("<!")) {
      // DOCTYPE, possibly with an internal subset.
      int depth = 0;
      for (; pos_ < in_.size(); advance(1)) {
        char c = in_[pos_];
        if (c == '[') ++depth;
        else if (c == ']') --depth;
        else if (c == '>' && depth <= 0) break;
      }
      if (pos_ >= in_.size()) fail("unterminated declaration");
      advance(1);
    } else if (in_[pos_] == '<') {
      return read_tag();
    } else {
      auto lt = in_.find('<', pos_);
      auto raw = in_.substr(pos_, lt == std::string_view::npos ? std::string_view::npos : lt - pos_);
      if (open_.empty()) {
        for (char c : raw) {
          if (!is_space(c)) fail("text outside the root element");
        }
        advance(raw.size());
        continue;
      }
      Event e;
      e.kind = EventKind::text;
      e.text = decode(raw);
      advance(raw.size());
      return e;
    }
  }
  if (!open_.empty()) fail("unclosed element <" + open_.back() + ">");
  if (!seen_root_) fail("no root element");
  return Event{};
}

}  // namespace ptk::xml
