#pragma once

// Bracket scoring in the evalb style, function-tag scoring on matched
// brackets, and gold-vs-predicted comparison of query hits.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ptk/query.hpp"
#include "ptk/treebank.hpp"

namespace ptk {

/// Inputs that break a scorer's preconditions (counts that cannot come from
/// a real comparison, mismatched sentence sets).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gold and predicted terminal yields differ after preprocessing.
class YieldMismatch : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

struct EvalParams {
  /// POS categories whose terminals are deleted before scoring.
  std::set<std::string> delete_pos_labels{".", ","};
  bool strip_function_tags = true;
  bool strip_coindices = true;
  /// Tags reported by the function-tag scorer.
  std::set<std::string> scored_function_tags{"MAT", "SUB", "IMP", "INF", "QUE", "SBJ", "ACC", "DTV", "VOC", "PRN"};
};

/// evalb-like parameter file, one directive per line:
///   DELETE_LABEL .          (repeatable; replaces the default set)
///   STRIP_FUNCTION_TAGS 1
///   STRIP_COINDICES 1
///   FUNCTION_TAG SBJ        (repeatable; replaces the default set)
/// Lines starting with '#' are comments. Throws std::invalid_argument.
EvalParams parse_eval_params(std::string_view text);
EvalParams load_eval_params(const std::string& path);

struct PRF {
  double recall = 0;
  double precision = 0;
  double f1 = 0;
};

/// Percentages. Both denominators zero gives 100/100/100; a single zero
/// denominator zeroes that metric and F1. Throws ContractViolation when
/// match exceeds gold or pred.
PRF prf(std::size_t match, std::size_t gold, std::size_t pred);

struct BracketScore {
  std::size_t matched = 0;
  std::size_t gold_count = 0;
  std::size_t pred_count = 0;
  double recall = 100;
  double precision = 100;
  double f1 = 100;

  static BracketScore from_counts(std::size_t matched, std::size_t gold, std::size_t pred);
};

struct Bracket {
  std::string label;
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive

  friend auto operator<=>(const Bracket&, const Bracket&) = default;
};

/// Deletes empty-category terminals and terminals whose POS category is in
/// delete_pos_labels, then every node left without children. Nothing is
/// returned when the whole tree goes.
std::optional<Tree> prune_for_scoring(const Tree& t, const EvalParams& params);

/// Scored label of an internal node under the params' stripping rules.
std::string scoring_label(const NodeLabel& label, const EvalParams& params);

/// Brackets of every internal node of a pruned tree, root included, in
/// preorder. Preterminals are not brackets.
std::vector<Bracket> collect_brackets(const Tree& pruned, const EvalParams& params);

/// Throws YieldMismatch when the scored yields differ.
BracketScore score_brackets(const Sentence& gold, const Sentence& pred, const EvalParams& params = {});

struct SkippedSentence {
  std::string gold_id;
  std::string pred_id;
  std::string reason;
};

struct CorpusBracketScore {
  BracketScore total;
  std::vector<std::pair<std::string, BracketScore>> sentences;
  std::vector<SkippedSentence> skipped;
};

/// Pairs sentences by id when every sentence on both sides has a source
/// id, otherwise by position. Throws ContractViolation naming the offending
/// ids when the sentence sets differ. Sentences with mismatched yields are
/// skipped and listed.
std::vector<std::pair<const Sentence*, const Sentence*>> pair_sentences(const std::vector<Sentence>& gold,
                                                                        const std::vector<Sentence>& pred);

CorpusBracketScore score_bracket_corpus(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                                        const EvalParams& params = {});

struct TagCounts {
  std::size_t matched = 0;
  std::size_t gold_count = 0;
  std::size_t pred_count = 0;

  PRF scores() const { return prf(matched, gold_count, pred_count); }
  friend bool operator==(const TagCounts&, const TagCounts&) = default;
};

struct FtagScore {
  std::map<std::string, TagCounts> per_tag;
  /// Bracket pairs that matched on bare category and span.
  std::size_t matched_brackets = 0;
  std::vector<SkippedSentence> skipped;

  TagCounts total() const;
  void add(const FtagScore& other);
};

/// Brackets are paired on (bare category, span); among equal keys, in
/// preorder. For each scored tag: both carry it is a match, only gold a
/// recall error, only pred a precision error. Throws YieldMismatch.
FtagScore score_function_tags(const Sentence& gold, const Sentence& pred, const EvalParams& params = {});
FtagScore score_function_tag_corpus(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                                    const EvalParams& params = {});

struct QueryRow {
  std::string query;
  std::size_t gold_hits = 0;
  std::size_t pred_hits = 0;
  std::size_t match = 0;
  std::size_t miss = 0;
  std::size_t false_alarm = 0;
  PRF scores;
};

struct QueryDiff {
  std::vector<QueryRow> rows;
  std::vector<std::string> warnings;

  const QueryRow* find(std::string_view query) const;
};

/// Hits match one-to-one on (sentence id, query, anchor index); query names
/// are canonicalized first. Rows follow `query_order`, then any remaining
/// queries in order of first appearance. Duplicate keys within one side are
/// dropped with a warning.
QueryDiff diff_query_hits(const std::vector<HitRecord>& gold, const std::vector<HitRecord>& pred,
                          const std::vector<std::string>& query_order = {});

void write_query_report(std::ostream& out, const QueryDiff& diff);
void write_query_report_tsv(std::ostream& out, const QueryDiff& diff);
void write_bracket_report(std::ostream& out, const CorpusBracketScore& score);
void write_bracket_report_tsv(std::ostream& out, const CorpusBracketScore& score);
void write_ftag_report(std::ostream& out, const FtagScore& score);
void write_ftag_report_tsv(std::ostream& out, const FtagScore& score);

}  // namespace ptk
