#include "ptk/impossible.hpp"

#include <ostream>

#include "ptk/text_util.hpp"

namespace ptk {

std::string_view builtin_impossible_rules_text() {
  return R"(def finVerb = DOD|DOP|HVD|HVP|VBD|VBP
def subject = NP-SBJ*

rule finite-sub-under-mat on IP-MAT*:
  describe: matrix IP directly over a finite IP-SUB
  node sub: IP-SUB*
  root iDominates sub
  exists v: finVerb (leaf v and sub dominatesWithinClause v)

rule verb-under-question-cp on CP-QUE-MAT*:
  describe: finite verb directly under a question CP with no IP between
  node verb: finVerb
  leaf verb and root iDominates verb

rule two-subjects on IP*|CP*:
  describe: clause with more than one subject child
  node first: subject
  node second: subject
  root iDominates first and root iDominates second
  first distinct second
)";
}

std::vector<StructureRule> parse_structure_rules(std::string_view text) {
  QuerySuite suite = parse_query_suite(text, false);
  std::vector<StructureRule> rules;
  for (auto& q : suite.cascade) {
    StructureRule r;
    r.name = q.name;
    r.description = q.description;
    r.query = std::move(q);
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<StructureRule> load_structure_rules(const std::string& path) {
  try {
    return parse_structure_rules(read_file(path));
  } catch (const QueryError& e) {
    throw QueryError(path + ": " + e.what());
  }
}

std::vector<StructureRule> builtin_impossible_rules() { return parse_structure_rules(builtin_impossible_rules_text()); }

std::vector<StructureReport> scan(const std::vector<Sentence>& corpus, const std::vector<StructureRule>& rules,
                                  const QueryOptions& options) {
  std::vector<StructureReport> out;
  for (const auto& s : corpus) {
    TreeIndex index(s.tree);
    for (int n = 0; n < static_cast<int>(index.size()); ++n) {
      const auto& node = index[static_cast<std::size_t>(n)];
      if (node.tree->is_leaf()) continue;
      for (const auto& r : rules) {
        if (!r.query.root_pattern.matches(node.tree->label)) continue;
        if (match_query(r.query, index, n, options)) out.push_back({s.id, r.name, node.tree->label.raw, node.span});
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> summarize(const std::vector<StructureReport>& reports,
                                                           const std::vector<StructureRule>& rules) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& r : rules) out.emplace_back(r.name, 0);
  for (const auto& rep : reports) {
    for (auto& [name, count] : out) {
      if (name == rep.rule) ++count;
    }
  }
  return out;
}

void write_structure_reports(std::ostream& out, const std::vector<StructureReport>& reports) {
  out << "sentence_id\trule\tspan_start\tspan_end\tnode_label\n";
  for (const auto& r : reports) {
    out << r.sentence_id << '\t' << r.rule << '\t';
    if (r.span) {
      out << r.span->start << '\t' << r.span->end;
    } else {
      out << "-\t-";
    }
    out << '\t' << r.node_label << '\n';
  }
}

void write_structure_summary(std::ostream& out, const std::vector<std::pair<std::string, std::size_t>>& summary) {
  for (const auto& [name, count] : summary) out << name << '\t' << count << '\n';
}

}  // namespace ptk
