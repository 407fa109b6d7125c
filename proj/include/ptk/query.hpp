#pragma once

// CorpusSearch-style tree queries: label globs, dominance and precedence
// relations, clause-bounded dominance, negated existentials, and ordered
// first-match-wins cascades.
//
// Suites are written in a line-oriented format:
//
//   def finVerb = DOD|DOP|HVD|HVP|VBD|VBP
//
//   query verb-not on IP-MAT*|IP-SUB*:
//     anchor verb: finVerb
//     node neg: NEG
//     root iDominates verb and root iDominates neg
//     verb iPrecedes neg
//     not exists v: inf|part (leaf v and root dominatesWithinClause v)
//
// Every line after the header is a condition; all of them must hold. The
// root node is bound to `root`; `anchor` and `node` declare variables that
// range over the proper descendants of the root, the anchor over overt
// leaves only. A pattern is an alternation of label globs ('*' only as a
// final character) and defined class names. Names containing a lowercase
// letter are class references and must be defined; anything else is a
// literal label glob. Conditions may continue over several lines while
// parentheses are open. `rule` blocks have the same body, take an optional
// "describe: text" line and need no anchor.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ptk/treebank.hpp"

namespace ptk {

class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TagClass {
  std::string name;
  std::vector<std::string> members;
};

/// Alternation of globs matched against the raw label: exact, or prefix
/// when the glob ends in '*'.
class LabelPattern {
 public:
  LabelPattern() = default;
  /// Class names are expanded through `classes`; see the file comment for
  /// how class references are told apart from literal globs.
  static LabelPattern parse(std::string_view text, const std::map<std::string, TagClass>& classes = {});

  bool matches(std::string_view raw_label) const;
  bool matches(const NodeLabel& label) const { return matches(label.raw); }
  /// The pattern as written, class names unexpanded.
  const std::string& source() const noexcept { return source_; }

 private:
  struct Glob {
    std::string stem;
    bool prefix = false;
  };
  static void add_glob(std::vector<Glob>& out, std::string_view glob);

  std::string source_;
  std::vector<Glob> globs_;
};

bool label_matches(const NodeLabel& label, std::string_view pattern);

enum class Relation { i_dominates, dominates, dominates_within_clause, precedes, i_precedes, distinct };
std::string_view to_string(Relation r);

/// Boolean condition over variable slots. Slot 0 is the query root.
struct QueryExpr {
  enum class Kind { all_of, any_of, negation, exists, relation, label_is, is_leaf };

  Kind kind = Kind::all_of;
  std::vector<QueryExpr> operands;
  Relation relation = Relation::dominates;
  int lhs = -1;
  int rhs = -1;
  /// Subject of exists/label_is/is_leaf.
  int var = -1;
  LabelPattern pattern;

  static QueryExpr all(std::vector<QueryExpr> xs);
  static QueryExpr any(std::vector<QueryExpr> xs);
  static QueryExpr negate(QueryExpr x);
  static QueryExpr exists(int var, LabelPattern pattern, QueryExpr body);
  static QueryExpr rel(int lhs, Relation r, int rhs);
  static QueryExpr label_is(int var, LabelPattern pattern);
  static QueryExpr leaf(int var);
};

struct VariableDecl {
  int slot = 0;
  LabelPattern pattern;
};

struct Query {
  std::string name;
  std::string description;
  /// Written as a `rule` block rather than a `query` block.
  bool rule = false;
  LabelPattern root_pattern;
  /// Top-level variables, existentially bound around the conditions.
  std::vector<VariableDecl> bindings;
  /// Slot of the anchor variable; required for cascade queries.
  std::optional<int> anchor;
  std::vector<QueryExpr> conditions;
  /// Name of every slot; slot 0 is "root".
  std::vector<std::string> slot_names{"root"};

  int slot_count() const noexcept { return static_cast<int>(slot_names.size()); }
};

struct QuerySuite {
  std::vector<TagClass> defs;
  std::vector<Query> cascade;

  const Query* find(std::string_view name) const;
  /// Same queries in the given order; names may use aliases. Throws
  /// QueryError unless `order` is a permutation of the cascade.
  QuerySuite reordered(const std::vector<std::string>& order) const;
};

/// Maps accepted alternative spellings (e.g. "ignore-inverted") to the
/// built-in query names.
std::string canonical_query_name(std::string_view name);

/// Throws QueryError with a line number on syntax errors, unknown classes,
/// unbound variables, duplicate names, or (when `require_anchor`) queries
/// without an anchor. Both `query` and `rule` blocks land in `cascade`.
QuerySuite parse_query_suite(std::string_view text, bool require_anchor = true);
QuerySuite load_query_suite(const std::string& path, bool require_anchor = true);
std::string render_query_suite(const QuerySuite& suite);

std::string_view builtin_declarative_suite_text();
std::string_view builtin_question_suite_text();
QuerySuite builtin_declarative_suite();
QuerySuite builtin_question_suite();

struct QueryOptions {
  /// iPrecedes requires adjacency over overt terminals; false relaxes it to
  /// plain precedence.
  bool strict_adjacency = true;
  /// Evaluate every iDominates as dominatesWithinClause.
  bool relaxed_depth = false;
};

/// Node-level relations over a TreeIndex, exposed for testing.
bool dominates_within_clause(const TreeIndex& index, int ancestor, int descendant);
bool precedes(const TreeIndex& index, int a, int b);
bool immediately_precedes(const TreeIndex& index, int a, int b);

/// Binding of every top-level slot for the first satisfying assignment, or
/// nothing. The anchor, when present, is enumerated first, left to right.
std::optional<std::vector<int>> match_query(const Query& query, const TreeIndex& index, int root,
                                            const QueryOptions& options = {});

struct HitRecord {
  std::string sentence_id;
  std::string query;
  std::size_t anchor_index = 0;
  Span clause_span;
  std::string clause_label;

  friend bool operator==(const HitRecord&, const HitRecord&) = default;
};

/// Each node whose label matches some query's root pattern is tried against
/// the cascade in order; the first query that matches claims the node.
/// Hits are ordered by anchor index.
std::vector<HitRecord> run_cascade(const QuerySuite& suite, const Sentence& sentence,
                                   const QueryOptions& options = {});

/// Runs several suites over a corpus; hits ordered by sentence, then anchor.
std::vector<HitRecord> run_suites(const std::vector<QuerySuite>& suites, const std::vector<Sentence>& corpus,
                                  const QueryOptions& options = {});

/// TSV with header "query sentence_id anchor_index span_start span_end
/// clause_label".
void write_hits(std::ostream& out, const std::vector<HitRecord>& hits);
std::vector<HitRecord> read_hits(std::istream& in);

}  // namespace ptk
