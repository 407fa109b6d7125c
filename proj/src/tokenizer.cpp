#include "ptk/tokenizer.hpp"

#include <algorithm>
#include <stdexcept>

#include "ptk/text_util.hpp"

namespace ptk {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte: treat as a unit
}

// Length of the last code point in s (s non-empty).
std::size_t last_cp_length(std::string_view s) {
  std::size_t i = s.size() - 1;
  std::size_t n = 1;
  while (i > 0 && n < 4 && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) {
    --i;
    ++n;
  }
  return utf8_length(static_cast<unsigned char>(s[i])) == n ? n : 1;
}

std::string_view first_cp(std::string_view s) {
  return s.substr(0, std::min(s.size(), utf8_length(static_cast<unsigned char>(s[0]))));
}

constexpr std::string_view kAsciiPunct = ".,;:!?()[]{}\"`";
constexpr std::string_view kInternalAscii = ",;:!?()[]{}\"";
// U+201C U+201D U+2018 U+00AB U+00BB U+00B6 U+2039 U+203A U+00A1 U+00BF U+2014 U+2013
constexpr std::string_view kUnicodePunct[] = {"“", "”", "‘", "«", "»", "¶",
                                              "‹", "›", "¡", "¿", "—", "–"};

bool is_unicode_punct(std::string_view cp) {
  for (auto p : kUnicodePunct) {
    if (cp == p) return true;
  }
  return false;
}

bool is_punct(std::string_view cp) {
  if (cp.size() == 1) return kAsciiPunct.find(cp[0]) != std::string_view::npos;
  return is_unicode_punct(cp);
}

// Characters split out of the middle of a chunk. Periods, hyphens and
// apostrophes stay internal.
bool is_internal_split(std::string_view cp) {
  if (cp.size() == 1) return kInternalAscii.find(cp[0]) != std::string_view::npos;
  return cp != "—" && cp != "–" && is_unicode_punct(cp);
}

std::size_t th_prefix_length(std::string_view s) {
  if (s.size() < 3) return 0;
  if ((s[0] != 't' && s[0] != 'T') || (s[1] != 'h' && s[1] != 'H')) return 0;
  if (s[2] == '\'') return 3;
  if (s.substr(2, 3) == "’") return 5;
  return 0;
}

bool is_numeral_letter(char c) {
  switch (c) {
    case 'i': case 'v': case 'x': case 'l': case 'c': case 'd': case 'm':
    case 'I': case 'V': case 'X': case 'L': case 'C': case 'D': case 'M':
      return true;
    default:
      return false;
  }
}

class ChunkSplitter {
 public:
  ChunkSplitter(const TokenizerConfig& cfg, TokenizedText& out) : cfg_(cfg), out_(out) {}

  void split(std::string_view s, std::size_t off) {
    if (s.empty()) return;
    if (cfg_.abbreviations.count(std::string(s))) return emit(s, off);

    if (is_roman_numeral(s, cfg_)) {
      // A numeral keeps a final period only when it also opens with one.
      if (s.size() > 1 && s.back() == '.' && s.front() != '.') {
        emit(s.substr(0, s.size() - 1), off);
        return emit(s.substr(s.size() - 1), off + s.size() - 1);
      }
      return emit(s, off);
    }

    if (auto lead = first_cp(s); is_punct(lead)) {
      emit(lead, off);
      return split(s.substr(lead.size()), off + lead.size());
    }

    if (cfg_.split_th_apostrophe) {
      if (auto n = th_prefix_length(s); n > 0 && n < s.size()) {
        emit(s.substr(0, n), off);
        return split(s.substr(n), off + n);
      }
    }

    if (auto n = last_cp_length(s); is_punct(s.substr(s.size() - n))) {
      split(s.substr(0, s.size() - n), off);
      return emit(s.substr(s.size() - n), off + s.size() - n);
    }

    for (std::size_t i = 0; i < s.size();) {
      auto cp = first_cp(s.substr(i));
      if (i > 0 && is_internal_split(cp)) {
        split(s.substr(0, i), off);
        emit(cp, off + i);
        return split(s.substr(i + cp.size()), off + i + cp.size());
      }
      i += cp.size();
    }

    if (!cfg_.its_one_token && (s == "its" || s == "Its" || s == "ITS")) {
      emit(s.substr(0, 2), off);
      return emit(s.substr(2), off + 2);
    }
    emit(s, off);
  }

 private:
  void emit(std::string_view token, std::size_t off) {
    out_.tokens.emplace_back(token);
    out_.source_offsets.push_back({off, off + token.size()});
  }

  const TokenizerConfig& cfg_;
  TokenizedText& out_;
};

}  // namespace

void TokenizerConfig::validate() const {
  for (const auto& a : abbreviations) {
    if (a.empty()) throw std::invalid_argument("empty abbreviation");
    for (char c : a) {
      if (is_space(c)) throw std::invalid_argument("abbreviation contains whitespace: '" + a + "'");
    }
  }
}

std::set<std::string> parse_abbreviations(std::string_view text) {
  std::set<std::string> out;
  for (const auto& raw : split_on(text, '\n')) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    for (char c : line) {
      if (is_space(c)) throw std::invalid_argument("abbreviation contains whitespace: '" + std::string(line) + "'");
    }
    out.emplace(line);
  }
  return out;
}

std::set<std::string> load_abbreviations(const std::string& path) { return parse_abbreviations(read_file(path)); }

bool is_roman_numeral(std::string_view token, const TokenizerConfig& cfg) {
  if (token.empty()) return false;
  bool opening_or_inner_period = false;
  bool j_final = false;
  bool seen_lower = false;
  bool upper_after_lower = false;
  bool any_group = false;

  const auto last_letter = token.find_last_not_of('.');
  std::size_t i = 0;
  while (i < token.size()) {
    if (token[i] == '.') {
      if (last_letter != std::string_view::npos && i < last_letter) opening_or_inner_period = true;
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < token.size() && token[j] != '.') ++j;
    std::string_view group = token.substr(i, j - i);

    std::size_t letters = group.size();
    if (cfg.roman_numeral_j_variant) {
      while (letters > 0 && (group[letters - 1] == 'j' || group[letters - 1] == 'J')) --letters;
    }
    if (letters == 0) return false;
    for (std::size_t k = 0; k < letters; ++k) {
      char c = group[k];
      if (!is_numeral_letter(c)) return false;
      if (c >= 'a' && c <= 'z') seen_lower = true;
      else if (seen_lower) upper_after_lower = true;
    }
    if (letters < group.size()) j_final = true;
    any_group = true;
    i = j;
  }
  return any_group && (opening_or_inner_period || j_final || upper_after_lower);
}

TokenizedText tokenize(std::string_view text, const TokenizerConfig& cfg) {
  TokenizedText out;
  ChunkSplitter splitter(cfg, out);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) splitter.split(text.substr(i, j - i), i);
    i = j;
  }
  return out;
}

}  // namespace ptk
