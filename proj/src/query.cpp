#include "ptk/query.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>

#include "ptk/text_util.hpp"

namespace ptk {

// ---------------------------------------------------------------------------
// Expressions

QueryExpr QueryExpr::all(std::vector<QueryExpr> xs) {
  QueryExpr e;
  e.kind = Kind::all_of;
  e.operands = std::move(xs);
  return e;
}

QueryExpr QueryExpr::any(std::vector<QueryExpr> xs) {
  QueryExpr e;
  e.kind = Kind::any_of;
  e.operands = std::move(xs);
  return e;
}

QueryExpr QueryExpr::negate(QueryExpr x) {
  QueryExpr e;
  e.kind = Kind::negation;
  e.operands.push_back(std::move(x));
  return e;
}

QueryExpr QueryExpr::exists(int var, LabelPattern pattern, QueryExpr body) {
  QueryExpr e;
  e.kind = Kind::exists;
  e.var = var;
  e.pattern = std::move(pattern);
  e.operands.push_back(std::move(body));
  return e;
}

QueryExpr QueryExpr::rel(int lhs, Relation r, int rhs) {
  QueryExpr e;
  e.kind = Kind::relation;
  e.lhs = lhs;
  e.relation = r;
  e.rhs = rhs;
  return e;
}

QueryExpr QueryExpr::label_is(int var, LabelPattern pattern) {
  QueryExpr e;
  e.kind = Kind::label_is;
  e.var = var;
  e.pattern = std::move(pattern);
  return e;
}

QueryExpr QueryExpr::leaf(int var) {
  QueryExpr e;
  e.kind = Kind::is_leaf;
  e.var = var;
  return e;
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::i_dominates: return "iDominates";
    case Relation::dominates: return "dominates";
    case Relation::dominates_within_clause: return "dominatesWithinClause";
    case Relation::precedes: return "precedes";
    case Relation::i_precedes: return "iPrecedes";
    case Relation::distinct: return "distinct";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Relations

namespace {

const TreeIndex::Node& at(const TreeIndex& index, int i) { return index[static_cast<std::size_t>(i)]; }

bool is_clause_boundary(const TreeIndex::Node& n) {
  const auto& cat = n.tree->label.category;
  return !n.tree->is_leaf() && (cat == "IP" || cat == "CP");
}

}  // namespace

bool dominates_within_clause(const TreeIndex& index, int ancestor, int descendant) {
  if (!index.dominates(ancestor, descendant)) return false;
  for (int n = at(index, descendant).parent; n != ancestor; n = at(index, n).parent) {
    if (is_clause_boundary(at(index, n))) return false;
  }
  return true;
}

bool precedes(const TreeIndex& index, int a, int b) {
  const auto& sa = at(index, a).span;
  const auto& sb = at(index, b).span;
  return sa && sb && sa->end < sb->start;
}

bool immediately_precedes(const TreeIndex& index, int a, int b) {
  return precedes(index, a, b) && at(index, b).span->start == at(index, a).span->end + 1;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void collect_free(const QueryExpr& e, std::set<int>& bound_inside, std::set<int>& out) {
  auto use = [&](int v) {
    if (v >= 0 && !bound_inside.count(v)) out.insert(v);
  };
  switch (e.kind) {
    case QueryExpr::Kind::relation:
      use(e.lhs);
      use(e.rhs);
      break;
    case QueryExpr::Kind::label_is:
    case QueryExpr::Kind::is_leaf:
      use(e.var);
      break;
    case QueryExpr::Kind::exists: {
      bool fresh = bound_inside.insert(e.var).second;
      for (const auto& o : e.operands) collect_free(o, bound_inside, out);
      if (fresh) bound_inside.erase(e.var);
      break;
    }
    default:
      for (const auto& o : e.operands) collect_free(o, bound_inside, out);
  }
}

std::set<int> free_slots(const QueryExpr& e) {
  std::set<int> inside, out;
  collect_free(e, inside, out);
  return out;
}

class Evaluator {
 public:
  Evaluator(const Query& q, const TreeIndex& index, int root, const QueryOptions& options)
      : query_(q), index_(index), root_(root), options_(options), binding_(static_cast<std::size_t>(q.slot_count()), -1) {
    binding_[0] = root;
  }

  std::optional<std::vector<int>> run() {
    order_.clear();
    if (query_.anchor) order_.push_back(*query_.anchor);
    for (const auto& b : query_.bindings) {
      if (!query_.anchor || b.slot != *query_.anchor) order_.push_back(b.slot);
    }

    // A condition is checked as soon as its last free variable is bound.
    ready_at_.assign(query_.conditions.size(), -1);
    for (std::size_t c = 0; c < query_.conditions.size(); ++c) {
      for (int slot : free_slots(query_.conditions[c])) {
        auto it = std::find(order_.begin(), order_.end(), slot);
        if (it != order_.end()) ready_at_[c] = std::max(ready_at_[c], static_cast<int>(it - order_.begin()));
      }
    }
    if (!conditions_hold(-1)) return std::nullopt;
    if (!search(0)) return std::nullopt;
    return binding_;
  }

  bool eval(const QueryExpr& e) {
    switch (e.kind) {
      case QueryExpr::Kind::all_of:
        return std::all_of(e.operands.begin(), e.operands.end(), [&](const QueryExpr& o) { return eval(o); });
      case QueryExpr::Kind::any_of:
        return std::any_of(e.operands.begin(), e.operands.end(), [&](const QueryExpr& o) { return eval(o); });
      case QueryExpr::Kind::negation:
        return !eval(e.operands.front());
      case QueryExpr::Kind::exists:
        return eval_exists(e);
      case QueryExpr::Kind::relation:
        return holds(e.relation, bound(e.lhs), bound(e.rhs));
      case QueryExpr::Kind::label_is:
        return e.pattern.matches(node(bound(e.var)).tree->label);
      case QueryExpr::Kind::is_leaf:
        return node(bound(e.var)).tree->is_leaf();
    }
    return false;
  }

 private:
  const TreeIndex::Node& node(int i) const { return at(index_, i); }

  int bound(int slot) const {
    int n = binding_[static_cast<std::size_t>(slot)];
    if (n < 0) throw QueryError("query " + query_.name + ": variable " + query_.slot_names[static_cast<std::size_t>(slot)] + " used before binding");
    return n;
  }

  bool holds(Relation r, int a, int b) const {
    switch (r) {
      case Relation::i_dominates:
        return options_.relaxed_depth ? dominates_within_clause(index_, a, b) : index_.is_parent(a, b);
      case Relation::dominates:
        return index_.dominates(a, b);
      case Relation::dominates_within_clause:
        return dominates_within_clause(index_, a, b);
      case Relation::precedes:
        return precedes(index_, a, b);
      case Relation::i_precedes:
        return options_.strict_adjacency ? immediately_precedes(index_, a, b) : precedes(index_, a, b);
      case Relation::distinct:
        return a != b;
    }
    return false;
  }

  // Narrowest candidate range for `slot` given a dominance atom from an
  // already bound node among `conjuncts`.
  template <typename Range>
  std::vector<int> candidates(int slot, const LabelPattern& pattern, bool anchor, const Range& conjuncts) const {
    int from = root_;
    bool children_only = false;
    for (const QueryExpr* c : conjuncts) {
      if (c->kind != QueryExpr::Kind::relation || c->rhs != slot || c->lhs == slot) continue;
      if (binding_[static_cast<std::size_t>(c->lhs)] < 0) continue;
      if (c->relation == Relation::i_dominates && !options_.relaxed_depth) {
        from = binding_[static_cast<std::size_t>(c->lhs)];
        children_only = true;
        break;
      }
      if (c->relation == Relation::dominates || c->relation == Relation::dominates_within_clause ||
          c->relation == Relation::i_dominates) {
        from = binding_[static_cast<std::size_t>(c->lhs)];
      }
    }

    std::vector<int> out;
    auto consider = [&](int n) {
      const auto& nd = node(n);
      if (!pattern.matches(nd.tree->label)) return;
      if (anchor && (!nd.tree->is_leaf() || !nd.span)) return;
      out.push_back(n);
    };
    if (children_only) {
      for (int c : node(from).children) consider(c);
    } else {
      for (int n = from + 1; n <= node(from).last; ++n) consider(n);
    }
    return out;
  }

  bool eval_exists(const QueryExpr& e) {
    const QueryExpr& body = e.operands.front();
    std::vector<const QueryExpr*> conjuncts;
    if (body.kind == QueryExpr::Kind::all_of) {
      for (const auto& o : body.operands) conjuncts.push_back(&o);
    } else {
      conjuncts.push_back(&body);
    }
    auto& slot = binding_[static_cast<std::size_t>(e.var)];
    const int saved = slot;
    slot = -1;
    bool found = false;
    for (int n : candidates(e.var, e.pattern, false, conjuncts)) {
      slot = n;
      if (eval(body)) {
        found = true;
        break;
      }
    }
    slot = saved;
    return found;
  }

  bool conditions_hold(int position) {
    for (std::size_t c = 0; c < query_.conditions.size(); ++c) {
      if (ready_at_[c] == position && !eval(query_.conditions[c])) return false;
    }
    return true;
  }

  bool search(std::size_t position) {
    if (position == order_.size()) return true;
    const int slot = order_[position];
    const auto decl = std::find_if(query_.bindings.begin(), query_.bindings.end(),
                                   [&](const VariableDecl& d) { return d.slot == slot; });
    std::vector<const QueryExpr*> conjuncts;
    for (const auto& c : query_.conditions) conjuncts.push_back(&c);
    const bool anchor = query_.anchor && *query_.anchor == slot;
    for (int n : candidates(slot, decl->pattern, anchor, conjuncts)) {
      binding_[static_cast<std::size_t>(slot)] = n;
      if (conditions_hold(static_cast<int>(position)) && search(position + 1)) return true;
    }
    binding_[static_cast<std::size_t>(slot)] = -1;
    return false;
  }

  const Query& query_;
  const TreeIndex& index_;
  int root_;
  const QueryOptions& options_;
  std::vector<int> binding_;
  std::vector<int> order_;
  std::vector<int> ready_at_;
};

}  // namespace

std::optional<std::vector<int>> match_query(const Query& query, const TreeIndex& index, int root,
                                            const QueryOptions& options) {
  if (!query.root_pattern.matches(index[static_cast<std::size_t>(root)].tree->label)) return std::nullopt;
  Evaluator ev(query, index, root, options);
  return ev.run();
}

std::vector<HitRecord> run_cascade(const QuerySuite& suite, const Sentence& sentence, const QueryOptions& options) {
  TreeIndex index(sentence.tree);
  std::vector<HitRecord> hits;
  for (int n = 0; n < static_cast<int>(index.size()); ++n) {
    const auto& nd = index[static_cast<std::size_t>(n)];
    for (const auto& q : suite.cascade) {
      if (!q.root_pattern.matches(nd.tree->label)) continue;
      if (!q.anchor) throw QueryError("query " + q.name + " has no anchor");
      auto binding = match_query(q, index, n, options);
      if (!binding) continue;
      const auto& anchor = index[static_cast<std::size_t>((*binding)[static_cast<std::size_t>(*q.anchor)])];
      hits.push_back({sentence.id, q.name, anchor.span->start, nd.span.value_or(*anchor.span), nd.tree->label.raw});
      break;
    }
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const HitRecord& a, const HitRecord& b) { return a.anchor_index < b.anchor_index; });
  return hits;
}

std::vector<HitRecord> run_suites(const std::vector<QuerySuite>& suites, const std::vector<Sentence>& corpus,
                                  const QueryOptions& options) {
  std::vector<HitRecord> all;
  for (const auto& s : corpus) {
    std::vector<HitRecord> hits;
    for (const auto& suite : suites) {
      auto h = run_cascade(suite, s, options);
      hits.insert(hits.end(), std::make_move_iterator(h.begin()), std::make_move_iterator(h.end()));
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const HitRecord& a, const HitRecord& b) { return a.anchor_index < b.anchor_index; });
    all.insert(all.end(), std::make_move_iterator(hits.begin()), std::make_move_iterator(hits.end()));
  }
  return all;
}

// ---------------------------------------------------------------------------
// Hit files

void write_hits(std::ostream& out, const std::vector<HitRecord>& hits) {
  out << "query\tsentence_id\tanchor_index\tspan_start\tspan_end\tclause_label\n";
  for (const auto& h : hits) {
    out << h.query << '\t' << h.sentence_id << '\t' << h.anchor_index << '\t' << h.clause_span.start << '\t'
        << h.clause_span.end << '\t' << h.clause_label << '\n';
  }
}

std::vector<HitRecord> read_hits(std::istream& in) {
  auto number = [](const std::string& s, std::size_t line_no) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
      throw QueryError("hit file line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
  };

  std::vector<HitRecord> hits;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split_on(line, '\t');
    if (line_no == 1 && !cols.empty() && cols[0] == "query") continue;
    if (cols.size() != 6) throw QueryError("hit file line " + std::to_string(line_no) + ": expected 6 columns");
    HitRecord h;
    h.query = canonical_query_name(cols[0]);
    h.sentence_id = cols[1];
    h.anchor_index = number(cols[2], line_no);
    h.clause_span = {number(cols[3], line_no), number(cols[4], line_no)};
    h.clause_label = cols[5];
    hits.push_back(std::move(h));
  }
  return hits;
}

// ---------------------------------------------------------------------------
// Built-in suites

std::string_view builtin_declarative_suite_text() {
  return R"(# Declarative clauses: classifies subtrees rooted in finite IP.
def finClause = IP-MAT*|IP-SUB*
def subject = NP-SBJ*
def inf = BE|DO|HV|VB
def finDo = DOD|DOP
def finVerb = DOD|DOP|HVD|HVP|VBD|VBP
def part = DAN|HAN|VAN|BEN|DON|HVN|VBN

query inverted on finClause:
  anchor verb: finVerb
  node subj: subject
  root iDominates verb and root iDominates subj
  verb precedes subj

query do-not on finClause:
  anchor do: finDo
  node neg: NEG
  root iDominates do and root iDominates neg
  do iPrecedes neg
  exists v: inf|part (leaf v and root dominatesWithinClause v and neg precedes v)

query verb-not on finClause:
  anchor verb: finVerb
  node neg: NEG
  root iDominates verb and root iDominates neg
  verb iPrecedes neg
  not exists v: inf|part (leaf v and root dominatesWithinClause v)
)";
}

std::string_view builtin_question_suite_text() {
  return R"(# Question clauses: classifies subtrees rooted in CP-QUE-MAT.
def question = CP-QUE-MAT*
def subject = NP-SBJ*
def inf = BE|DO|HV|VB
def finDo = DOD|DOP
def finVerb = DOD|DOP|HVD|HVP|VBD|VBP
def part = DAN|HAN|VAN|BEN|DON|HVN|VBN

query non-inverted on question:
  node clause: IP-SUB*
  anchor verb: finVerb
  node subj: subject
  root iDominates clause
  clause iDominates subj and clause iDominates verb
  subj precedes verb

query do-subj on question:
  node clause: IP-SUB*
  anchor do: finDo
  node subj: subject
  root iDominates clause
  clause iDominates do and clause iDominates subj
  do precedes subj
  exists v: inf|part (leaf v and clause dominatesWithinClause v and subj precedes v)

query verb-subj on question:
  node clause: IP-SUB*
  anchor verb: finVerb
  node subj: subject
  root iDominates clause
  clause iDominates verb and clause iDominates subj
  verb precedes subj
  not exists v: inf|part (leaf v and clause dominatesWithinClause v)
)";
}

QuerySuite builtin_declarative_suite() { return parse_query_suite(builtin_declarative_suite_text()); }
QuerySuite builtin_question_suite() { return parse_query_suite(builtin_question_suite_text()); }

std::string canonical_query_name(std::string_view name) {
  if (name == "ignore-inverted") return "inverted";
  if (name == "verb-subject") return "verb-subj";
  return std::string(name);
}

const Query* QuerySuite::find(std::string_view name) const {
  const std::string canonical = canonical_query_name(name);
  for (const auto& q : cascade) {
    if (q.name == canonical) return &q;
  }
  return nullptr;
}

QuerySuite QuerySuite::reordered(const std::vector<std::string>& order) const {
  if (order.size() != cascade.size())
    throw QueryError("reorder needs all " + std::to_string(cascade.size()) + " queries, got " + std::to_string(order.size()));
  QuerySuite out;
  out.defs = defs;
  std::set<std::string> seen;
  for (const auto& name : order) {
    const Query* q = find(name);
    if (!q) throw QueryError("unknown query '" + name + "'");
    if (!seen.insert(q->name).second) throw QueryError("query '" + name + "' listed twice");
    out.cascade.push_back(*q);
  }
  return out;
}

}  // namespace ptk
