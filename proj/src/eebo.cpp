#include "ptk/eebo.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "ptk/text_util.hpp"
#include "xml_scanner.hpp"

namespace ptk {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::set<std::string> upper_set(const std::set<std::string>& names) {
  std::set<std::string> out;
  for (const auto& n : names) out.insert(upper(n));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

void rtrim(std::string& s) {
  while (!s.empty() && is_space(s.back())) s.pop_back();
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::set<std::string> word_set(std::string_view value) {
  auto words = split_whitespace(value);
  return {words.begin(), words.end()};
}

std::uint64_t to_count(std::string_view s, std::string_view key) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("bad count for " + std::string(key) + ": '" + std::string(s) + "'");
  return v;
}

// Header fields: first occurrence inside a header element wins; without any
// header element, first occurrence anywhere outside kept text.
struct HeaderField {
  std::string in_header;
  std::string anywhere;
  bool have_in_header = false;
  bool have_anywhere = false;
};

}  // namespace

void ExtractionConfig::validate() const {
  if (rare_char_threshold == 0) throw std::invalid_argument("rare_char_threshold must be positive");
  if (max_sentence_tokens == 0) throw std::invalid_argument("max_sentence_tokens must be positive");
  if (decode_utf8(gap_placeholder).size() != 1)
    throw std::invalid_argument("gap_placeholder must be exactly one character");
}

ExtractionConfig parse_extraction_config(std::string_view text) {
  ExtractionConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "keep_elements") cfg.keep_elements = word_set(value);
    else if (key == "drop_elements") cfg.drop_elements = word_set(value);
    else if (key == "gap_element") cfg.gap_element = value;
    else if (key == "gap_placeholder") cfg.gap_placeholder = value;
    else if (key == "rare_char_threshold") cfg.rare_char_threshold = to_count(value, key);
    else if (key == "max_sentence_tokens") cfg.max_sentence_tokens = static_cast<std::size_t>(to_count(value, key));
    else if (key == "terminal_punct") cfg.terminal_punct = word_set(value);
    else if (key == "header_elements") cfg.header_elements = word_set(value);
    else if (key == "title_element") cfg.title_element = value;
    else if (key == "author_element") cfg.author_element = value;
    else if (key == "date_element") cfg.date_element = value;
    else if (key == "id_element") cfg.id_element = value;
    else throw std::invalid_argument("unknown extraction config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExtractionConfig load_extraction_config(const std::string& path) { return parse_extraction_config(read_file(path)); }

std::string nfc_normalize(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error(std::string("ICU NFC unavailable: ") + u_errorName(status));
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString dst = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw std::runtime_error(std::string("NFC normalization failed: ") + u_errorName(status));
  std::string out;
  dst.toUTF8String(out);
  return out;
}

std::vector<char32_t> decode_utf8(std::string_view utf8) {
  std::vector<char32_t> out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

Document extract_document(std::string_view xml, const ExtractionConfig& cfg, std::string_view fallback_id) {
  cfg.validate();
  const auto keep = upper_set(cfg.keep_elements);
  const auto drop = upper_set(cfg.drop_elements);
  const auto headers = upper_set(cfg.header_elements);
  const std::string gap = upper(cfg.gap_element);
  const std::string title_el = upper(cfg.title_element);
  const std::string author_el = upper(cfg.author_element);
  const std::string date_el = upper(cfg.date_element);
  const std::string id_el = upper(cfg.id_element);

  Document doc;
  HeaderField title, author, date, id;
  HeaderField* capturing = nullptr;
  int capture_depth = 0;
  std::string capture_text;
  bool capture_in_header = false;

  int keep_depth = 0;
  int drop_depth = 0;
  int header_depth = 0;
  bool any_header = false;
  bool after_gap = false;
  std::string paragraph;

  auto field_for = [&](const std::string& name) -> HeaderField* {
    if (name == title_el) return &title;
    if (name == author_el) return &author;
    if (name == date_el) return &date;
    if (name == id_el) return &id;
    return nullptr;
  };

  xml::Scanner scanner(xml);
  for (;;) {
    xml::Event ev = scanner.next();
    if (ev.kind == xml::EventKind::done) break;
    const std::string name = upper(ev.name);

    if (ev.kind == xml::EventKind::start) {
      if (capturing) ++capture_depth;
      if (headers.count(name)) {
        ++header_depth;
        any_header = true;
      }
      if (!capturing && keep_depth == 0) {
        if (HeaderField* f = field_for(name)) {
          bool wanted = header_depth > 0 ? !f->have_in_header : !f->have_anywhere;
          if (wanted) {
            capturing = f;
            capture_depth = 1;
            capture_text.clear();
            capture_in_header = header_depth > 0;
          }
        }
      }
      if (name == gap) {
        if (keep_depth > 0 && drop_depth == 0) {
          rtrim(paragraph);
          auto disp = std::find_if(ev.attributes.begin(), ev.attributes.end(),
                                   [](const auto& kv) { return upper(kv.first) == "DISP"; });
          paragraph += disp != ev.attributes.end() && !disp->second.empty() ? disp->second : cfg.gap_placeholder;
          after_gap = true;
        }
        ++drop_depth;
      } else if (drop.count(name)) {
        ++drop_depth;
      } else if (keep.count(name)) {
        if (keep_depth == 0) {
          paragraph.clear();
          after_gap = false;
        }
        ++keep_depth;
      }
      continue;
    }

    if (ev.kind == xml::EventKind::end) {
      if (capturing && --capture_depth == 0) {
        std::string value = nfc_normalize(collapse_whitespace(capture_text));
        if (capture_in_header) {
          capturing->in_header = std::move(value);
          capturing->have_in_header = true;
        } else {
          capturing->anywhere = std::move(value);
          capturing->have_anywhere = true;
        }
        capturing = nullptr;
      }
      if (headers.count(name)) --header_depth;
      if (name == gap || drop.count(name)) {
        --drop_depth;
      } else if (keep.count(name)) {
        if (--keep_depth == 0) {
          std::string text = nfc_normalize(collapse_whitespace(paragraph));
          if (!text.empty()) doc.paragraphs.push_back(std::move(text));
          paragraph.clear();
        }
      }
      continue;
    }

    // text
    if (capturing) capture_text += ev.text;
    if (keep_depth > 0 && drop_depth == 0) {
      std::string_view text = ev.text;
      if (after_gap) {
        while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
        if (!text.empty()) after_gap = false;
      }
      paragraph += text;
    }
  }

  auto pick = [&](const HeaderField& f) { return any_header ? f.in_header : f.anywhere; };
  doc.title = pick(title);
  doc.author = pick(author);
  doc.date = pick(date);
  doc.id = pick(id);
  if (doc.id.empty()) doc.id = std::string(fallback_id);
  return doc;
}

// ---------------------------------------------------------------------------

void CharFrequencyTable::add_text(std::string_view utf8) {
  for (char32_t c : decode_utf8(utf8)) ++counts_[c];
}

void CharFrequencyTable::add_document(const Document& doc) {
  for (const auto& p : doc.paragraphs) add_text(p);
}

void CharFrequencyTable::merge(const CharFrequencyTable& other) {
  for (const auto& [c, n] : other.counts_) counts_[c] += n;
}

std::uint64_t CharFrequencyTable::count(char32_t c) const {
  auto it = counts_.find(c);
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t CharFrequencyTable::total() const {
  std::uint64_t sum = 0;
  for (const auto& [c, n] : counts_) sum += n;
  return sum;
}

CharFrequencyTable build_char_table(const std::vector<Document>& docs) {
  CharFrequencyTable table;
  for (const auto& d : docs) table.add_document(d);
  return table;
}

void write_char_table(std::ostream& out, const CharFrequencyTable& table) {
  char buf[16];
  for (const auto& [c, n] : table.counts()) {
    std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
    out << buf << '\t';
    if (c > 0x20 && c != 0x7F) {
      icu::UnicodeString s(static_cast<UChar32>(c));
      std::string utf8;
      s.toUTF8String(utf8);
      out << utf8;
    }
    out << '\t' << n << '\n';
  }
}

CharFrequencyTable read_char_table(std::istream& in) {
  CharFrequencyTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split_on(line, '\t');
    if (cols.size() != 3 || cols[0].size() < 3 || cols[0].compare(0, 2, "U+") != 0)
      throw std::invalid_argument("char table line " + std::to_string(line_no) + ": expected U+XXXX, char, count");
    std::uint32_t cp = 0;
    auto [p, ec] = std::from_chars(cols[0].data() + 2, cols[0].data() + cols[0].size(), cp, 16);
    if (ec != std::errc() || p != cols[0].data() + cols[0].size())
      throw std::invalid_argument("char table line " + std::to_string(line_no) + ": bad code point");
    table.set(static_cast<char32_t>(cp), to_count(cols[2], "char count"));
  }
  return table;
}

std::string_view to_string(ExclusionReason r) {
  return r == ExclusionReason::too_long ? "too_long" : "rare_char";
}

std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens,
                                                      const std::set<std::string>& terminal_punct) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  for (const auto& tok : tokens) {
    current.push_back(tok);
    if (terminal_punct.count(tok)) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

SegmentResult segment_sentences(const Document& doc, const CharFrequencyTable& table, const ExtractionConfig& cfg,
                                const TokenizerConfig& tokenizer) {
  SegmentResult result;
  for (std::size_t p = 0; p < doc.paragraphs.size(); ++p) {
    auto sentences = split_sentences(tokenize(doc.paragraphs[p], tokenizer).tokens, cfg.terminal_punct);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      std::string id = doc.id + ".p" + std::to_string(p + 1) + ".s" + std::to_string(s + 1);
      auto& tokens = sentences[s];
      if (tokens.size() > cfg.max_sentence_tokens) {
        result.excluded.push_back({std::move(id), std::move(tokens), ExclusionReason::too_long});
        continue;
      }
      bool rare = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& tok) {
        auto cps = decode_utf8(tok);
        return std::any_of(cps.begin(), cps.end(),
                           [&](char32_t c) { return table.count(c) < cfg.rare_char_threshold; });
      });
      if (rare) {
        result.excluded.push_back({std::move(id), std::move(tokens), ExclusionReason::rare_char});
        continue;
      }
      result.kept.push_back({std::move(id), std::move(tokens)});
    }
  }
  return result;
}

}  // namespace ptk
