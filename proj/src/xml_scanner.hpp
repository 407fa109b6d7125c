#pragma once

// Minimal pull scanner for well-formed XML: elements, attributes, text,
// CDATA, comments and processing instructions. DTDs are skipped; only the
// predefined and numeric entities are decoded.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ptk/eebo.hpp"

namespace ptk::xml {

enum class EventKind { start, end, text, done };

struct Event {
  EventKind kind = EventKind::done;
  std::string name;  ///< element name, as written
  std::map<std::string, std::string> attributes;
  bool self_closing = false;
  std::string text;
};

class Scanner {
 public:
  explicit Scanner(std::string_view input) : in_(input) {}

  /// Throws XmlError on malformed input, including mismatched or unclosed
  /// elements.
  Event next();

 private:
  [[noreturn]] void fail(const std::string& what) const;
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }
  void advance(std::size_t n);
  void skip_until(std::string_view terminator, const char* what);
  void skip_space();
  std::string read_name();
  std::string decode(std::string_view raw) const;
  Event read_tag();

  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  std::vector<std::string> open_;
  bool seen_root_ = false;
  bool pending_end_ = false;
  std::string pending_name_;
};

}  // namespace ptk::xml
