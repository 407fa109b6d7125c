#pragma once

// Deterministic tokenizer following PPCEME conventions for Early Modern
// English: possessives stay attached, punctuation is split off except in
// abbreviations, hyphenated words and Roman numerals, and a th' prefix is
// split from its host.

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ptk {

struct TokenizerConfig {
  std::set<std::string> abbreviations{"Mr.", "Mrs.", "&c", "&c."};
  bool split_th_apostrophe = true;
  bool its_one_token = true;
  bool roman_numeral_j_variant = true;

  /// Throws std::invalid_argument on empty or whitespace-bearing entries.
  void validate() const;
};

/// One abbreviation per line; blank lines and '#' comments are skipped.
std::set<std::string> load_abbreviations(const std::string& path);
std::set<std::string> parse_abbreviations(std::string_view text);

struct TokenOffset {
  std::size_t start = 0;  ///< byte offset, inclusive
  std::size_t end = 0;    ///< byte offset, exclusive
  friend bool operator==(const TokenOffset&, const TokenOffset&) = default;
};

struct TokenizedText {
  std::vector<std::string> tokens;
  std::vector<TokenOffset> source_offsets;
};

TokenizedText tokenize(std::string_view text, const TokenizerConfig& cfg = {});

/// Roman numeral test. Letters from {i,v,x,l,c,d,m} in either case, grouped
/// by periods; with the j-variant flag a group may end in a run of j.
/// Ordinary words are rejected unless the token has a leading or internal
/// period, a j-final group, or an uppercase numeral letter after a lowercase
/// one (".xiiii.C.", "v.C.xlviij", "xlviij", "iiC").
bool is_roman_numeral(std::string_view token, const TokenizerConfig& cfg = {});

}  // namespace ptk
