#include "ptk/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <tuple>
#include <unordered_map>

#include "ptk/text_util.hpp"

namespace ptk {

EvalParams parse_eval_params(std::string_view text) {
  EvalParams p;
  bool saw_delete = false;
  bool saw_tag = false;
  std::size_t line_no = 0;
  for (const auto& raw : split_on(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto words = split_whitespace(line);
    auto bad = [&](const std::string& what) {
      return std::invalid_argument("eval params line " + std::to_string(line_no) + ": " + what);
    };
    if (words.size() != 2) throw bad("expected 'KEY VALUE'");
    const auto& key = words[0];
    const auto& value = words[1];
    if (key == "DELETE_LABEL") {
      if (!saw_delete) p.delete_pos_labels.clear();
      saw_delete = true;
      p.delete_pos_labels.insert(value);
    } else if (key == "FUNCTION_TAG") {
      if (!saw_tag) p.scored_function_tags.clear();
      saw_tag = true;
      p.scored_function_tags.insert(value);
    } else if (key == "STRIP_FUNCTION_TAGS" || key == "STRIP_COINDICES") {
      bool v;
      try {
        v = parse_bool(value);
      } catch (const std::invalid_argument&) {
        throw bad("bad boolean '" + value + "'");
      }
      (key == "STRIP_FUNCTION_TAGS" ? p.strip_function_tags : p.strip_coindices) = v;
    } else {
      throw bad("unknown key '" + key + "'");
    }
  }
  return p;
}

EvalParams load_eval_params(const std::string& path) { return parse_eval_params(read_file(path)); }

PRF prf(std::size_t match, std::size_t gold, std::size_t pred) {
  if (match > gold || match > pred) {
    throw ContractViolation("match count " + std::to_string(match) + " exceeds gold " + std::to_string(gold) +
                            " or predicted " + std::to_string(pred));
  }
  PRF r;
  if (gold == 0 && pred == 0) {
    r.recall = r.precision = r.f1 = 100;
    return r;
  }
  r.recall = gold ? 100.0 * static_cast<double>(match) / static_cast<double>(gold) : 0;
  r.precision = pred ? 100.0 * static_cast<double>(match) / static_cast<double>(pred) : 0;
  if (gold && pred && r.recall + r.precision > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

BracketScore BracketScore::from_counts(std::size_t matched, std::size_t gold, std::size_t pred) {
  BracketScore s;
  s.matched = matched;
  s.gold_count = gold;
  s.pred_count = pred;
  auto p = prf(matched, gold, pred);
  s.recall = p.recall;
  s.precision = p.precision;
  s.f1 = p.f1;
  return s;
}

// ---------------------------------------------------------------------------
// Brackets

std::optional<Tree> prune_for_scoring(const Tree& t, const EvalParams& params) {
  if (t.is_leaf()) {
    if (t.is_empty_category() || params.delete_pos_labels.count(t.label.category)) return std::nullopt;
    return t;
  }
  Tree out;
  out.label = t.label;
  for (const auto& c : t.children) {
    if (auto kept = prune_for_scoring(c, params)) out.children.push_back(std::move(*kept));
  }
  if (out.children.empty()) return std::nullopt;
  return out;
}

std::string scoring_label(const NodeLabel& label, const EvalParams& params) {
  if (!params.strip_function_tags && !params.strip_coindices) return label.raw;
  std::vector<std::string> tags;
  if (!params.strip_function_tags) tags = label.function_tags;
  std::optional<unsigned> coindex, gap;
  if (!params.strip_coindices) {
    coindex = label.coindex;
    gap = label.gap_index;
  }
  return make_label(label.category, std::move(tags), coindex, gap).raw;
}

namespace {

void collect(const Tree& t, const EvalParams& params, std::size_t& next, std::vector<Bracket>& out) {
  if (t.is_leaf()) {
    ++next;
    return;
  }
  std::size_t slot = out.size();
  out.push_back({scoring_label(t.label, params), next, 0});
  for (const auto& c : t.children) collect(c, params, next, out);
  out[slot].end = next - 1;
}

struct Prepared {
  std::vector<std::string> yield;
  std::optional<Tree> tree;
};

Prepared prepare(const Sentence& s, const EvalParams& params) {
  Prepared p;
  p.tree = prune_for_scoring(s.tree, params);
  if (p.tree) p.yield = overt_tokens(*p.tree);
  return p;
}

void check_yields(const Sentence& gold, const Prepared& g, const Sentence& pred, const Prepared& p) {
  if (g.yield == p.yield) return;
  std::size_t i = 0;
  while (i < g.yield.size() && i < p.yield.size() && g.yield[i] == p.yield[i]) ++i;
  std::string msg = "yield mismatch between gold " + gold.id + " and predicted " + pred.id + " (" +
                    std::to_string(g.yield.size()) + " vs " + std::to_string(p.yield.size()) + " terminals";
  if (i < g.yield.size() && i < p.yield.size())
    msg += ", first difference at " + std::to_string(i) + ": '" + g.yield[i] + "' vs '" + p.yield[i] + "'";
  throw YieldMismatch(msg + ")");
}

std::size_t multiset_intersection(std::vector<Bracket> a, std::vector<Bracket> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

std::vector<Bracket> collect_brackets(const Tree& pruned, const EvalParams& params) {
  std::vector<Bracket> out;
  std::size_t next = 0;
  collect(pruned, params, next, out);
  return out;
}

BracketScore score_brackets(const Sentence& gold, const Sentence& pred, const EvalParams& params) {
  auto g = prepare(gold, params);
  auto p = prepare(pred, params);
  check_yields(gold, g, pred, p);
  std::vector<Bracket> gb, pb;
  if (g.tree) gb = collect_brackets(*g.tree, params);
  if (p.tree) pb = collect_brackets(*p.tree, params);
  const std::size_t gn = gb.size(), pn = pb.size();
  return BracketScore::from_counts(multiset_intersection(std::move(gb), std::move(pb)), gn, pn);
}

std::vector<std::pair<const Sentence*, const Sentence*>> pair_sentences(const std::vector<Sentence>& gold,
                                                                        const std::vector<Sentence>& pred) {
  auto all_ids = [](const std::vector<Sentence>& v) {
    return std::all_of(v.begin(), v.end(), [](const Sentence& s) { return s.has_source_id; });
  };
  std::vector<std::pair<const Sentence*, const Sentence*>> out;
  if (all_ids(gold) && all_ids(pred)) {
    std::unordered_map<std::string, const Sentence*> by_id;
    for (const auto& s : pred) {
      if (!by_id.emplace(s.id, &s).second) throw ContractViolation("duplicate predicted sentence id " + s.id);
    }
    std::vector<std::string> missing;
    std::set<std::string> gold_ids;
    for (const auto& s : gold) {
      if (!gold_ids.insert(s.id).second) throw ContractViolation("duplicate gold sentence id " + s.id);
      auto it = by_id.find(s.id);
      if (it == by_id.end()) {
        missing.push_back("gold-only " + s.id);
      } else {
        out.emplace_back(&s, it->second);
      }
    }
    for (const auto& s : pred) {
      if (!gold_ids.count(s.id)) missing.push_back("predicted-only " + s.id);
    }
    if (!missing.empty()) {
      std::string msg = "sentence sets differ:";
      for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i] + (i + 1 < missing.size() ? "," : "");
      if (missing.size() > 20) msg += " and " + std::to_string(missing.size() - 20) + " more";
      throw ContractViolation(msg);
    }
    return out;
  }
  if (gold.size() != pred.size()) {
    throw ContractViolation("sentence counts differ: " + std::to_string(gold.size()) + " gold vs " +
                            std::to_string(pred.size()) + " predicted");
  }
  for (std::size_t i = 0; i < gold.size(); ++i) out.emplace_back(&gold[i], &pred[i]);
  return out;
}

CorpusBracketScore score_bracket_corpus(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                                        const EvalParams& params) {
  CorpusBracketScore out;
  std::size_t m = 0, g = 0, p = 0;
  for (const auto& [gs, ps] : pair_sentences(gold, pred)) {
    try {
      auto s = score_brackets(*gs, *ps, params);
      m += s.matched;
      g += s.gold_count;
      p += s.pred_count;
      out.sentences.emplace_back(gs->id, s);
    } catch (const YieldMismatch& e) {
      out.skipped.push_back({gs->id, ps->id, e.what()});
    }
  }
  out.total = BracketScore::from_counts(m, g, p);
  return out;
}

// ---------------------------------------------------------------------------
// Function tags

TagCounts FtagScore::total() const {
  TagCounts t;
  for (const auto& [tag, c] : per_tag) {
    t.matched += c.matched;
    t.gold_count += c.gold_count;
    t.pred_count += c.pred_count;
  }
  return t;
}

void FtagScore::add(const FtagScore& other) {
  for (const auto& [tag, c] : other.per_tag) {
    auto& mine = per_tag[tag];
    mine.matched += c.matched;
    mine.gold_count += c.gold_count;
    mine.pred_count += c.pred_count;
  }
  matched_brackets += other.matched_brackets;
  skipped.insert(skipped.end(), other.skipped.begin(), other.skipped.end());
}

namespace {

struct TaggedBracket {
  std::string category;
  std::size_t start, end;
  const NodeLabel* label;
};

void collect_tagged(const Tree& t, std::size_t& next, std::vector<TaggedBracket>& out) {
  if (t.is_leaf()) {
    ++next;
    return;
  }
  std::size_t slot = out.size();
  out.push_back({t.label.category, next, 0, &t.label});
  for (const auto& c : t.children) collect_tagged(c, next, out);
  out[slot].end = next - 1;
}

}  // namespace

FtagScore score_function_tags(const Sentence& gold, const Sentence& pred, const EvalParams& params) {
  auto g = prepare(gold, params);
  auto p = prepare(pred, params);
  check_yields(gold, g, pred, p);

  FtagScore out;
  for (const auto& tag : params.scored_function_tags) out.per_tag[tag];
  if (!g.tree || !p.tree) return out;

  std::vector<TaggedBracket> gb, pb;
  std::size_t next = 0;
  collect_tagged(*g.tree, next, gb);
  next = 0;
  collect_tagged(*p.tree, next, pb);

  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  std::map<Key, std::vector<const NodeLabel*>> pred_by_key;
  for (const auto& b : pb) pred_by_key[{b.category, b.start, b.end}].push_back(b.label);
  std::map<Key, std::size_t> used;

  for (const auto& b : gb) {
    Key key{b.category, b.start, b.end};
    auto it = pred_by_key.find(key);
    if (it == pred_by_key.end()) continue;
    std::size_t& k = used[key];
    if (k >= it->second.size()) continue;
    const NodeLabel& pl = *it->second[k++];
    ++out.matched_brackets;
    for (const auto& tag : params.scored_function_tags) {
      bool in_gold = b.label->has_tag(tag);
      bool in_pred = pl.has_tag(tag);
      auto& c = out.per_tag[tag];
      c.gold_count += in_gold;
      c.pred_count += in_pred;
      c.matched += in_gold && in_pred;
    }
  }
  return out;
}

FtagScore score_function_tag_corpus(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                                    const EvalParams& params) {
  FtagScore out;
  for (const auto& tag : params.scored_function_tags) out.per_tag[tag];
  for (const auto& [gs, ps] : pair_sentences(gold, pred)) {
    try {
      out.add(score_function_tags(*gs, *ps, params));
    } catch (const YieldMismatch& e) {
      out.skipped.push_back({gs->id, ps->id, e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Query hits

const QueryRow* QueryDiff::find(std::string_view query) const {
  const std::string name = canonical_query_name(query);
  for (const auto& r : rows) {
    if (r.query == name) return &r;
  }
  return nullptr;
}

QueryDiff diff_query_hits(const std::vector<HitRecord>& gold, const std::vector<HitRecord>& pred,
                          const std::vector<std::string>& query_order) {
  QueryDiff diff;
  using Key = std::tuple<std::string, std::string, std::size_t>;

  std::vector<std::string> order;
  auto note_query = [&](const std::string& q) {
    if (std::find(order.begin(), order.end(), q) == order.end()) order.push_back(q);
  };
  for (const auto& q : query_order) note_query(canonical_query_name(q));

  auto keys_of = [&](const std::vector<HitRecord>& hits, const char* side) {
    std::set<Key> keys;
    for (const auto& h : hits) {
      std::string q = canonical_query_name(h.query);
      note_query(q);
      if (!keys.emplace(h.sentence_id, q, h.anchor_index).second) {
        diff.warnings.push_back(std::string("duplicate ") + side + " hit " + q + " " + h.sentence_id + " " +
                                std::to_string(h.anchor_index) + " ignored");
      }
    }
    return keys;
  };
  const auto gold_keys = keys_of(gold, "gold");
  const auto pred_keys = keys_of(pred, "predicted");

  for (const auto& q : order) {
    QueryRow row;
    row.query = q;
    for (const auto& k : gold_keys) {
      if (std::get<1>(k) != q) continue;
      ++row.gold_hits;
      row.match += pred_keys.count(k);
    }
    for (const auto& k : pred_keys) row.pred_hits += std::get<1>(k) == q;
    row.miss = row.gold_hits - row.match;
    row.false_alarm = row.pred_hits - row.match;
    row.scores = prf(row.match, row.gold_hits, row.pred_hits);
    diff.rows.push_back(std::move(row));
  }
  return diff;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void write_skipped(std::ostream& out, const std::vector<SkippedSentence>& skipped) {
  if (skipped.empty()) return;
  out << "skipped " << skipped.size() << " sentence(s):\n";
  for (const auto& s : skipped) out << "  " << s.gold_id << ": " << s.reason << '\n';
}

}  // namespace

void write_query_report(std::ostream& out, const QueryDiff& diff) {
  std::size_t w = 6;
  for (const auto& r : diff.rows) w = std::max(w, r.query.size());
  out << pad_right("search", w) << "  gold-hits  nongold-hits  match  miss    FA  recall    prec      F1\n";
  for (const auto& r : diff.rows) {
    out << pad_right(r.query, w) << "  " << pad_left(std::to_string(r.gold_hits), 9) << "  "
        << pad_left(std::to_string(r.pred_hits), 12) << "  " << pad_left(std::to_string(r.match), 5) << "  "
        << pad_left(std::to_string(r.miss), 4) << "  " << pad_left(std::to_string(r.false_alarm), 4) << "  "
        << pad_left(fixed2(r.scores.recall), 6) << "  " << pad_left(fixed2(r.scores.precision), 6) << "  "
        << pad_left(fixed2(r.scores.f1), 6) << '\n';
  }
  for (const auto& w2 : diff.warnings) out << "warning: " << w2 << '\n';
}

void write_query_report_tsv(std::ostream& out, const QueryDiff& diff) {
  out << "search\tgold_hits\tpred_hits\tmatch\tmiss\tfalse_alarm\trecall\tprecision\tf1\n";
  for (const auto& r : diff.rows) {
    out << r.query << '\t' << r.gold_hits << '\t' << r.pred_hits << '\t' << r.match << '\t' << r.miss << '\t'
        << r.false_alarm << '\t' << fixed2(r.scores.recall) << '\t' << fixed2(r.scores.precision) << '\t'
        << fixed2(r.scores.f1) << '\n';
  }
}

void write_bracket_report(std::ostream& out, const CorpusBracketScore& score) {
  const auto& t = score.total;
  out << "sentences scored   " << score.sentences.size() << '\n'
      << "sentences skipped  " << score.skipped.size() << '\n'
      << "matched brackets   " << t.matched << '\n'
      << "gold brackets      " << t.gold_count << '\n'
      << "test brackets      " << t.pred_count << '\n'
      << "bracket recall     " << fixed2(t.recall) << '\n'
      << "bracket precision  " << fixed2(t.precision) << '\n'
      << "bracket F1         " << fixed2(t.f1) << '\n';
  write_skipped(out, score.skipped);
}

void write_bracket_report_tsv(std::ostream& out, const CorpusBracketScore& score) {
  out << "sentence_id\tmatched\tgold\tpred\trecall\tprecision\tf1\n";
  for (const auto& [id, s] : score.sentences) {
    out << id << '\t' << s.matched << '\t' << s.gold_count << '\t' << s.pred_count << '\t' << fixed2(s.recall)
        << '\t' << fixed2(s.precision) << '\t' << fixed2(s.f1) << '\n';
  }
  const auto& t = score.total;
  out << "TOTAL\t" << t.matched << '\t' << t.gold_count << '\t' << t.pred_count << '\t' << fixed2(t.recall) << '\t'
      << fixed2(t.precision) << '\t' << fixed2(t.f1) << '\n';
}

void write_ftag_report(std::ostream& out, const FtagScore& score) {
  out << "tag    #gold  #pred  match  recall    prec      F1\n";
  auto row = [&](const std::string& name, const TagCounts& c) {
    auto s = c.scores();
    out << pad_right(name, 5) << "  " << pad_left(std::to_string(c.gold_count), 5) << "  "
        << pad_left(std::to_string(c.pred_count), 5) << "  " << pad_left(std::to_string(c.matched), 5) << "  "
        << pad_left(fixed2(s.recall), 6) << "  " << pad_left(fixed2(s.precision), 6) << "  "
        << pad_left(fixed2(s.f1), 6) << '\n';
  };
  for (const auto& [tag, c] : score.per_tag) row(tag, c);
  row("all", score.total());
  out << "matched brackets " << score.matched_brackets << '\n';
  write_skipped(out, score.skipped);
}

void write_ftag_report_tsv(std::ostream& out, const FtagScore& score) {
  out << "tag\tgold\tpred\tmatch\trecall\tprecision\tf1\n";
  auto row = [&](const std::string& name, const TagCounts& c) {
    auto s = c.scores();
    out << name << '\t' << c.gold_count << '\t' << c.pred_count << '\t' << c.matched << '\t' << fixed2(s.recall)
        << '\t' << fixed2(s.precision) << '\t' << fixed2(s.f1) << '\n';
  };
  for (const auto& [tag, c] : score.per_tag) row(tag, c);
  row("ALL", score.total());
}

}  // namespace ptk
