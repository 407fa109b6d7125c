#include "ptk/treebank.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ptk {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

std::optional<unsigned> to_index(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

NodeLabel atomic_label(std::string_view raw) {
  NodeLabel label;
  label.raw = std::string(raw);
  label.category = label.raw;
  label.nt_marker = ends_with(raw, "_NT");
  return label;
}

bool is_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string id_safe(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (is_space(static_cast<unsigned char>(c)) || c == '(' || c == ')') c = '_';
  }
  return out;
}

void collect_overt(const Tree& t, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    if (!t.is_empty_category()) out.push_back(t.word);
    return;
  }
  for (const auto& c : t.children) collect_overt(c, out);
}

void render_into(const Tree& t, std::string& out) {
  out += '(';
  out += t.label.raw;
  if (t.is_leaf()) {
    out += ' ';
    out += t.word;
  } else {
    for (const auto& c : t.children) {
      out += ' ';
      render_into(c, out);
    }
  }
  out += ')';
}

}  // namespace

bool NodeLabel::has_tag(std::string_view tag) const {
  return std::find(function_tags.begin(), function_tags.end(), tag) != function_tags.end();
}

NodeLabel parse_label(std::string_view raw) {
  if (raw.empty()) throw MalformedLabel("empty label");
  for (char c : raw) {
    if (is_space(static_cast<unsigned char>(c)) || c == '(' || c == ')')
      throw MalformedLabel("label contains whitespace or parenthesis: '" + std::string(raw) + "'");
  }

  // -NONE-, -LRB- and similar are not decomposed.
  if (raw.front() == '-' || raw.back() == '-' || raw.find("--") != std::string_view::npos)
    return atomic_label(raw);

  std::string_view body = raw;
  std::optional<unsigned> gap;
  if (auto eq = raw.rfind('='); eq != std::string_view::npos && eq > 0) {
    if (auto g = to_index(raw.substr(eq + 1))) {
      gap = g;
      body = raw.substr(0, eq);
    }
  }

  std::vector<std::string_view> parts;
  for (std::size_t pos = 0;;) {
    auto dash = body.find('-', pos);
    parts.push_back(body.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos));
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }

  std::optional<unsigned> coindex;
  if (parts.size() > 1) {
    if (auto idx = to_index(parts.back())) {
      coindex = idx;
      parts.pop_back();
    }
  }
  // A numeric component anywhere but the end does not fit the label grammar.
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (all_digits(parts[i])) return atomic_label(raw);
  }

  NodeLabel label;
  label.raw = std::string(raw);
  label.category = std::string(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) label.function_tags.emplace_back(parts[i]);
  label.coindex = coindex;
  label.gap_index = gap;
  label.nt_marker = ends_with(label.category, "_NT");
  return label;
}

std::string render_label(const NodeLabel& label) {
  std::string out = label.category;
  for (const auto& tag : label.function_tags) {
    out += '-';
    out += tag;
  }
  if (label.coindex) {
    out += '-';
    out += std::to_string(*label.coindex);
  }
  if (label.gap_index) {
    out += '=';
    out += std::to_string(*label.gap_index);
  }
  return out;
}

NodeLabel make_label(std::string category, std::vector<std::string> function_tags,
                     std::optional<unsigned> coindex, std::optional<unsigned> gap_index) {
  if (category.empty()) throw MalformedLabel("empty category");
  NodeLabel label;
  label.category = std::move(category);
  label.function_tags = std::move(function_tags);
  label.coindex = coindex;
  label.gap_index = gap_index;
  label.nt_marker = ends_with(label.category, "_NT");
  label.raw = render_label(label);
  return label;
}

bool is_empty_category_word(std::string_view word) noexcept {
  return word == "0" || (!word.empty() && word.front() == '*');
}

Tree Tree::leaf(NodeLabel pos, std::string word) {
  if (word.empty()) throw std::invalid_argument("leaf with no word");
  Tree t;
  t.label = std::move(pos);
  t.word = std::move(word);
  return t;
}

Tree Tree::leaf(std::string_view pos, std::string word) { return leaf(parse_label(pos), std::move(word)); }

Tree Tree::internal(NodeLabel label, std::vector<Tree> children) {
  if (children.empty()) throw std::invalid_argument("internal node '" + label.raw + "' has no children");
  Tree t;
  t.label = std::move(label);
  t.children = std::move(children);
  return t;
}

Tree Tree::internal(std::string_view label, std::vector<Tree> children) {
  return internal(parse_label(label), std::move(children));
}

std::vector<std::string> overt_tokens(const Tree& t) {
  std::vector<std::string> out;
  collect_overt(t, out);
  return out;
}

Sentence make_sentence(std::string id, Tree tree, bool has_source_id) {
  Sentence s;
  s.id = std::move(id);
  s.tokens = overt_tokens(tree);
  s.tree = std::move(tree);
  s.has_source_id = has_source_id;
  return s;
}

// ---------------------------------------------------------------------------
// Reading

TreeReader::TreeReader(std::istream& in, std::string source_name)
    : in_(in), source_(id_safe(source_name)) {}

int TreeReader::get() {
  int c = in_.get();
  if (c != std::char_traits<char>::eof()) ++offset_;
  return c;
}

int TreeReader::peek() { return in_.peek(); }

void TreeReader::skip_space() {
  while (is_space(peek())) get();
}

std::string TreeReader::read_atom() {
  std::string atom;
  for (int c = peek(); c != std::char_traits<char>::eof() && !is_space(c) && c != '(' && c != ')'; c = peek()) {
    atom += static_cast<char>(get());
  }
  return atom;
}

Tree TreeReader::read_node(bool top_level, std::optional<std::string>* id_out) {
  const std::size_t open_at = offset_;
  get();  // '('
  skip_space();
  const int eof = std::char_traits<char>::eof();
  if (peek() == eof) throw ParseError("unbalanced parentheses: unexpected end of input", offset_);

  std::string label_text;
  if (peek() != '(' && peek() != ')') label_text = read_atom();
  skip_space();

  if (peek() == ')') {
    get();
    if (label_text.empty()) throw ParseError("empty node", open_at);
    throw ParseError("leaf '" + label_text + "' has no word", open_at);
  }

  if (peek() != '(') {
    // (POS word)
    std::string word = read_atom();
    skip_space();
    int c = peek();
    if (c == eof) throw ParseError("unbalanced parentheses: unexpected end of input", offset_);
    if (c != ')') throw ParseError("expected ')' after word '" + word + "'", offset_);
    get();
    if (label_text.empty()) throw ParseError("leaf without a label", open_at);
    try {
      return Tree::leaf(parse_label(label_text), std::move(word));
    } catch (const MalformedLabel& e) {
      throw ParseError(e.what(), open_at);
    }
  }

  std::vector<Tree> children;
  std::optional<std::string> id;
  for (;;) {
    skip_space();
    int c = peek();
    if (c == eof) throw ParseError("unbalanced parentheses: unexpected end of input", offset_);
    if (c == ')') {
      get();
      break;
    }
    if (c != '(') throw ParseError("unexpected token '" + read_atom() + "' among children", offset_);
    Tree child = read_node(false, nullptr);
    if (top_level && label_text.empty() && child.is_leaf() && child.label.category == "ID") {
      id = child.word;
      continue;
    }
    children.push_back(std::move(child));
  }

  if (label_text.empty()) {
    if (!top_level) throw ParseError("node without a label", open_at);
    if (children.size() != 1)
      throw ParseError("wrapper must hold exactly one tree, found " + std::to_string(children.size()), open_at);
    if (id_out) *id_out = std::move(id);
    return std::move(children.front());
  }
  try {
    return Tree::internal(parse_label(label_text), std::move(children));
  } catch (const MalformedLabel& e) {
    throw ParseError(e.what(), open_at);
  }
}

std::optional<Sentence> TreeReader::next() {
  skip_space();
  int c = peek();
  if (c == std::char_traits<char>::eof()) return std::nullopt;
  if (c == ')') throw ParseError("unbalanced parentheses: unexpected ')'", offset_);
  if (c != '(') throw ParseError("expected '(' at start of tree", offset_);

  std::optional<std::string> id;
  Tree tree = read_node(true, &id);
  ++ordinal_;
  if (id) return make_sentence(std::move(*id), std::move(tree), true);
  return make_sentence(source_ + ":" + std::to_string(ordinal_), std::move(tree), false);
}

std::vector<Sentence> read_trees(std::istream& in, std::string_view source_name) {
  TreeReader reader(in, std::string(source_name));
  std::vector<Sentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

std::vector<Sentence> read_trees(std::string_view text, std::string_view source_name) {
  std::istringstream in{std::string(text)};
  return read_trees(in, source_name);
}

std::vector<Sentence> read_tree_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trees(in, std::filesystem::path(path).filename().string());
}

// ---------------------------------------------------------------------------
// Writing

std::string render_tree(const Tree& t) {
  std::string out;
  render_into(t, out);
  return out;
}

std::string render_sentence(const Sentence& s) {
  return "( " + render_tree(s.tree) + " (ID " + id_safe(s.id) + "))";
}

void write_sentences(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) out << render_sentence(s) << '\n';
}

// ---------------------------------------------------------------------------
// Spans

TreeIndex::TreeIndex(const Tree& root) {
  std::size_t next_terminal = 0;
  build(root, -1, next_terminal);
  terminal_count_ = next_terminal;
}

int TreeIndex::build(const Tree& t, int parent, std::size_t& next_terminal) {
  const int me = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{&t, parent, {}, me, std::nullopt});
  if (t.is_leaf()) {
    if (!t.is_empty_category()) {
      nodes_.back().span = Span{next_terminal, next_terminal};
      ++next_terminal;
    }
    return me;
  }
  std::optional<Span> span;
  std::vector<int> kids;
  kids.reserve(t.children.size());
  for (const auto& c : t.children) {
    int k = build(c, me, next_terminal);
    kids.push_back(k);
    const auto& ks = nodes_[static_cast<std::size_t>(k)].span;
    if (ks) {
      if (!span) span = *ks;
      else span->end = ks->end;
    }
  }
  auto& node = nodes_[static_cast<std::size_t>(me)];
  node.children = std::move(kids);
  node.span = span;
  node.last = static_cast<int>(nodes_.size()) - 1;
  return me;
}

std::vector<std::optional<Span>> terminal_spans(const Tree& t) {
  TreeIndex index(t);
  std::vector<std::optional<Span>> out;
  out.reserve(index.size());
  for (const auto& n : index.nodes()) out.push_back(n.span);
  return out;
}

}  // namespace ptk
