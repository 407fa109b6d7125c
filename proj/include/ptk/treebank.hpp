#pragma once

// Penn-style constituency trees: label parsing, bracketed reading/writing,
// and terminal span indexing.

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ptk {

class MalformedLabel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A node label split into its parts, e.g. "CP-QUE-MAT", "NP-SBJ-1",
/// "ADJ_NT", "NP-ACC=2".
///
/// `raw` is always the rendering of the other fields; build labels through
/// parse_label() or make_label() to keep the two in sync.
struct NodeLabel {
  std::string raw;
  std::string category;
  std::vector<std::string> function_tags;
  std::optional<unsigned> coindex;
  /// PPCEME gapping index, the "=N" suffix.
  std::optional<unsigned> gap_index;
  bool nt_marker = false;

  /// Category without function tags or indices.
  const std::string& bare() const noexcept { return category; }
  bool has_tag(std::string_view tag) const;

  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

NodeLabel parse_label(std::string_view raw);
NodeLabel make_label(std::string category, std::vector<std::string> function_tags = {},
                     std::optional<unsigned> coindex = std::nullopt,
                     std::optional<unsigned> gap_index = std::nullopt);
std::string render_label(const NodeLabel& label);

/// True for traces, PRO-like empties and null complementizers ("*T*-1",
/// "*con*", "0").
bool is_empty_category_word(std::string_view word) noexcept;

/// Constituent tree. A leaf carries a POS label and a word and has no
/// children; an internal node has at least one child and no word.
struct Tree {
  NodeLabel label;
  std::string word;
  std::vector<Tree> children;

  static Tree leaf(NodeLabel pos, std::string word);
  static Tree leaf(std::string_view pos, std::string word);
  /// Throws std::invalid_argument on an empty child list.
  static Tree internal(NodeLabel label, std::vector<Tree> children);
  static Tree internal(std::string_view label, std::vector<Tree> children);

  bool is_leaf() const noexcept { return children.empty(); }
  bool is_empty_category() const noexcept {
    return is_leaf() && is_empty_category_word(word);
  }

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct Sentence {
  std::string id;
  Tree tree;
  /// Words of the non-empty leaves, in order.
  std::vector<std::string> tokens;
  /// False when the id was synthesized because the input had no ID node.
  bool has_source_id = false;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

std::vector<std::string> overt_tokens(const Tree& t);
Sentence make_sentence(std::string id, Tree tree, bool has_source_id = true);

/// Incremental reader over a stream of bracketed trees. Accepts the
/// "( TREE (ID x) )" wrapper; trees without an ID node get "<source>:<n>"
/// ids (n counts from 1).
class TreeReader {
 public:
  TreeReader(std::istream& in, std::string source_name);
  std::optional<Sentence> next();

 private:
  int get();
  int peek();
  void skip_space();
  std::string read_atom();
  Tree read_node(bool top_level, std::optional<std::string>* id_out);

  std::istream& in_;
  std::string source_;
  std::size_t offset_ = 0;
  std::size_t ordinal_ = 0;
};

std::vector<Sentence> read_trees(std::istream& in, std::string_view source_name = "input");
std::vector<Sentence> read_trees(std::string_view text, std::string_view source_name = "input");
std::vector<Sentence> read_tree_file(const std::string& path);

/// Canonical single-line rendering with single spaces.
std::string render_tree(const Tree& t);
/// Tree wrapped with its ID node: "( TREE (ID id))".
std::string render_sentence(const Sentence& s);
void write_sentences(std::ostream& out, const std::vector<Sentence>& sentences);

/// Inclusive range of overt terminal indices.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

/// Preorder-flattened view of a tree with parent links and spans over the
/// non-empty terminals. Holds pointers into the tree it was built from.
class TreeIndex {
 public:
  struct Node {
    const Tree* tree = nullptr;
    int parent = -1;
    std::vector<int> children;
    /// Preorder index of the last node in this subtree.
    int last = 0;
    /// Empty when the node dominates only empty categories.
    std::optional<Span> span;
  };

  explicit TreeIndex(const Tree& root);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t terminal_count() const noexcept { return terminal_count_; }

  bool is_parent(int ancestor, int node) const noexcept {
    return nodes_[static_cast<std::size_t>(node)].parent == ancestor;
  }
  /// Proper dominance.
  bool dominates(int ancestor, int node) const noexcept {
    return ancestor < node && node <= nodes_[static_cast<std::size_t>(ancestor)].last;
  }

 private:
  int build(const Tree& t, int parent, std::size_t& next_terminal);

  std::vector<Node> nodes_;
  std::size_t terminal_count_ = 0;
};

/// Spans of every node in preorder.
std::vector<std::optional<Span>> terminal_spans(const Tree& t);

}  // namespace ptk
