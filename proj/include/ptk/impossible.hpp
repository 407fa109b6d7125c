#pragma once

// Searches for parser-output configurations that never occur in the
// training treebank. Rules use the query suite format with `rule` blocks.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ptk/query.hpp"
#include "ptk/treebank.hpp"

namespace ptk {

struct StructureRule {
  std::string name;
  std::string description;
  Query query;
};

std::string_view builtin_impossible_rules_text();
std::vector<StructureRule> builtin_impossible_rules();

/// Every block of the file becomes a rule; anchors are not required.
std::vector<StructureRule> parse_structure_rules(std::string_view text);
std::vector<StructureRule> load_structure_rules(const std::string& path);

struct StructureReport {
  std::string sentence_id;
  std::string rule;
  std::string node_label;
  std::optional<Span> span;

  friend bool operator==(const StructureReport&, const StructureReport&) = default;
};

/// One report per (node, rule) that matches, in corpus order, then node
/// preorder, then rule order.
std::vector<StructureReport> scan(const std::vector<Sentence>& corpus, const std::vector<StructureRule>& rules,
                                  const QueryOptions& options = {});

/// Report count per rule, in rule order, zero counts included.
std::vector<std::pair<std::string, std::size_t>> summarize(const std::vector<StructureReport>& reports,
                                                           const std::vector<StructureRule>& rules);

/// TSV "sentence_id rule span_start span_end node_label"; spans of nodes
/// with no overt terminals are written as "-".
void write_structure_reports(std::ostream& out, const std::vector<StructureReport>& reports);
void write_structure_summary(std::ostream& out, const std::vector<std::pair<std::string, std::size_t>>& summary);

}  // namespace ptk
