#pragma once

// Text extraction from EEBO-style XML, corpus character statistics and
// sentence segmentation with rare-character and length filters.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ptk/tokenizer.hpp"

namespace ptk {

class XmlError : public std::runtime_error {
 public:
  XmlError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

/// Element names are matched case-insensitively.
struct ExtractionConfig {
  std::set<std::string> keep_elements{"P"};
  std::set<std::string> drop_elements{"NOTE", "SPEAKER", "L"};
  std::string gap_element = "GAP";
  /// Used when a gap has no DISP attribute. Exactly one character.
  std::string gap_placeholder = "•";
  std::uint64_t rare_char_threshold = 200;
  std::size_t max_sentence_tokens = 800;
  std::set<std::string> terminal_punct{".", "!", "?"};

  std::set<std::string> header_elements{"HEADER", "TEIHEADER"};
  std::string title_element = "TITLE";
  std::string author_element = "AUTHOR";
  std::string date_element = "DATE";
  std::string id_element = "IDNO";

  void validate() const;
};

ExtractionConfig load_extraction_config(const std::string& path);
ExtractionConfig parse_extraction_config(std::string_view text);

struct Document {
  std::string id;
  std::string title;
  std::string author;
  std::string date;
  std::vector<std::string> paragraphs;
};

/// `fallback_id` is used when the header has no id element (typically the
/// file stem).
Document extract_document(std::string_view xml, const ExtractionConfig& cfg = {},
                          std::string_view fallback_id = "");

std::string nfc_normalize(std::string_view utf8);

class CharFrequencyTable {
 public:
  void add_text(std::string_view utf8);
  void add_document(const Document& doc);
  void merge(const CharFrequencyTable& other);

  std::uint64_t count(char32_t c) const;
  std::uint64_t total() const;
  const std::map<char32_t, std::uint64_t>& counts() const noexcept { return counts_; }
  void set(char32_t c, std::uint64_t n) { counts_[c] = n; }

  friend bool operator==(const CharFrequencyTable&, const CharFrequencyTable&) = default;

 private:
  std::map<char32_t, std::uint64_t> counts_;
};

CharFrequencyTable build_char_table(const std::vector<Document>& docs);

/// "U+XXXX<TAB>char<TAB>count" rows, ascending code point.
void write_char_table(std::ostream& out, const CharFrequencyTable& table);
CharFrequencyTable read_char_table(std::istream& in);

std::vector<char32_t> decode_utf8(std::string_view utf8);

enum class ExclusionReason { too_long, rare_char };
std::string_view to_string(ExclusionReason r);

struct SegmentedSentence {
  std::string id;
  std::vector<std::string> tokens;
};

struct ExcludedSentence {
  std::string id;
  std::vector<std::string> tokens;
  ExclusionReason reason;
};

struct SegmentResult {
  std::vector<SegmentedSentence> kept;
  std::vector<ExcludedSentence> excluded;
};

/// Splits token lists into sentences after each terminal punctuation token.
std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens,
                                                      const std::set<std::string>& terminal_punct);

/// Tokenizes and segments each paragraph; `table` must already hold the
/// counts for the whole corpus. Sentence ids are "<doc>.p<N>.s<M>".
/// Length is checked before rare characters; only the first reason is kept.
SegmentResult segment_sentences(const Document& doc, const CharFrequencyTable& table,
                                const ExtractionConfig& cfg = {}, const TokenizerConfig& tokenizer = {});

}  // namespace ptk
