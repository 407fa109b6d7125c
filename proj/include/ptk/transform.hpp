#pragma once

// PPCEME corpus normalization: POS tag simplification, segmented-token
// rewriting, metadata removal, function tag filtering and the file-based
// train/dev/test split.

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ptk/treebank.hpp"

namespace ptk {

struct TransformConfig {
  std::set<std::string> retained_function_tags{"MAT", "SUB", "IMP", "INF", "QUE",
                                               "SBJ", "ACC", "DTV", "VOC", "PRN"};
  std::set<std::string> excluded_rare_tags{"YYY", "ELAB", "XXX", "TPC", "TAG"};
  std::set<std::string> metadata_labels{"CODE", "META", "REF", "BREAK"};

  /// Throws std::invalid_argument when retained and excluded tags overlap.
  void validate() const;
};

/// Reads "key = value ..." lines; keys are retained_function_tags,
/// excluded_rare_tags and metadata_labels, values whitespace separated.
TransformConfig load_transform_config(const std::string& path);
TransformConfig parse_transform_config(std::string_view text);

std::string simplify_complex_tag(std::string_view tag);

struct TransformWarning {
  std::string node;
  std::string message;
};

/// (ADJ (ADJ21 a) (ADJ22 lone)) -> (ADJ_NT (ADJ a) (ADJ lone)).
Tree rewrite_segmented(const Tree& t, std::vector<TransformWarning>* warnings = nullptr);

/// Complex tags to their rightmost part, MD0 to MD, then rewrite_segmented.
Tree normalize_tags(const Tree& t, std::vector<TransformWarning>* warnings = nullptr);

Tree filter_function_tags(const Tree& t, const TransformConfig& cfg);

struct DroppedSentence {
  Sentence sentence;
  std::string reason;
};

struct StripResult {
  std::vector<Sentence> kept;
  std::vector<DroppedSentence> dropped;
};

namespace drop_reason {
inline constexpr std::string_view meta_rooted = "META-rooted";
inline constexpr std::string_view has_break = "BREAK";
inline constexpr std::string_view ill_formed = "ill-formed-after-metadata-removal";
}  // namespace drop_reason

StripResult strip_metadata(std::vector<Sentence> sentences, const TransformConfig& cfg);

enum class Partition { train, dev, test };
std::string_view to_string(Partition p);

struct SplitAssignment {
  Partition partition;
  std::string file;
};

Partition partition_of(std::string_view file);
std::vector<SplitAssignment> split_corpus(const std::vector<std::string>& files);

struct PartitionStats {
  std::size_t files = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  double token_percent = 0.0;
};

struct SplitStats {
  PartitionStats train, dev, test;
  std::size_t total_tokens = 0;
  PartitionStats& operator[](Partition p);
};

/// Per-partition counts; `sentences_per_file` is parallel to `assignments`.
SplitStats split_stats(const std::vector<SplitAssignment>& assignments,
                       const std::vector<std::vector<Sentence>>& sentences_per_file);

}  // namespace ptk
