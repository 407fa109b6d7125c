#include <sstream>

#include "doctest.h"
#include "ptk/eval.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace ptk;
using namespace ptk::testing;

namespace {

Sentence sentence(std::string_view text, const std::string& id = "s") {
  auto s = read_trees(text).at(0);
  s.id = id;
  s.has_source_id = true;
  return s;
}

HitRecord hit(std::string id, std::string q, std::size_t anchor) { return {std::move(id), std::move(q), anchor, {}, ""}; }

}  // namespace

TEST_CASE("prf matches hand-computed rows") {
  struct Row {
    std::size_t m, g, p;
    double r, pr, f;
  };
  // recall = m/g, precision = m/p, F1 = 2m/(g+p), rounded to two places
  for (const Row& row : {Row{313, 328, 348, 95.43, 89.94, 92.60}, Row{83, 86, 84, 96.51, 98.81, 97.65},
                         Row{1, 2, 4, 50.00, 25.00, 33.33}, Row{5, 5, 5, 100, 100, 100}}) {
    auto s = prf(row.m, row.g, row.p);
    CHECK(s.recall == doctest::Approx(row.r).epsilon(0.0001));
    CHECK(s.precision == doctest::Approx(row.pr).epsilon(0.0001));
    CHECK(s.f1 == doctest::Approx(row.f).epsilon(0.0001));
  }
}

TEST_CASE("prf zero conventions and contract") {
  auto z = prf(0, 0, 0);
  CHECK(z.recall == 100);
  CHECK(z.precision == 100);
  CHECK(z.f1 == 100);
  auto nopred = prf(0, 3, 0);
  CHECK(nopred.recall == 0);
  CHECK(nopred.precision == 0);
  CHECK(nopred.f1 == 0);
  auto nogold = prf(0, 0, 2);
  CHECK(nogold.recall == 0);
  CHECK(nogold.f1 == 0);
  CHECK(prf(0, 4, 4).f1 == 0);
  CHECK_THROWS_AS(prf(3, 2, 5), ContractViolation);
  CHECK_THROWS_AS(prf(3, 5, 2), ContractViolation);
}

TEST_CASE("pruning and scoring labels") {
  EvalParams p;
  auto s = sentence("(IP-MAT (NP-SBJ *pro*) (VBD went) (. .))");
  auto pruned = prune_for_scoring(s.tree, p);
  REQUIRE(pruned);
  CHECK(render_tree(*pruned) == "(IP-MAT (VBD went))");
  CHECK_FALSE(prune_for_scoring(sentence("(FRAG (. .) (NP *T*-1))").tree, p));

  CHECK(scoring_label(parse_label("NP-SBJ-1"), p) == "NP");
  CHECK(scoring_label(parse_label("ADJ_NT"), p) == "ADJ_NT");
  p.strip_function_tags = false;
  CHECK(scoring_label(parse_label("NP-SBJ-1"), p) == "NP-SBJ");
  p.strip_coindices = false;
  CHECK(scoring_label(parse_label("NP-SBJ-1"), p) == "NP-SBJ-1");

  auto b = collect_brackets(*prune_for_scoring(sentence("(IP-MAT (NP-SBJ (PRO they)) (VBD went))").tree, {}), {});
  CHECK(b == std::vector<Bracket>{{"IP", 0, 1}, {"NP", 0, 0}});
}

TEST_CASE("self-scoring is perfect") {
  auto gold = read_tree_file(data_path("errors_gold.psd"));
  auto r = score_bracket_corpus(gold, gold);
  CHECK(r.total.matched == r.total.gold_count);
  CHECK(r.total.f1 == 100);
  CHECK(r.skipped.empty());
}

TEST_CASE("a relabelled root costs one bracket on each side") {
  auto gold = read_tree_file(data_path("errors_gold.psd")).at(0);
  auto pred = read_tree_file(data_path("errors_parsed.psd")).at(0);
  auto s = score_brackets(gold, pred);
  CHECK(s.gold_count == s.pred_count);
  CHECK(s.matched + 1 == s.gold_count);
}

TEST_CASE("yield mismatches are contract violations") {
  auto g = sentence("(IP-MAT (PRO they) (VBD went))");
  auto p = sentence("(IP-MAT (PRO they) (VBD came))");
  CHECK_THROWS_AS(score_brackets(g, p), YieldMismatch);
  auto r = score_bracket_corpus({g}, {p});
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.total.gold_count == 0);
  // punctuation and empty categories may differ
  auto q = sentence("(IP-MAT (NP-SBJ *pro*) (PRO they) (VBD went) (. .))");
  CHECK_NOTHROW(score_brackets(g, q));
}

TEST_CASE("sentence pairing") {
  auto a = sentence("(X (Y a))", "a");
  auto b = sentence("(X (Y b))", "b");
  auto pairs = pair_sentences({a, b}, {b, a});
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].second->id == "a");
  CHECK_THROWS_AS(pair_sentences({a, b}, {a}), ContractViolation);
  auto c = sentence("(X (Y c))", "c");
  CHECK_THROWS_AS(pair_sentences({a, b}, {a, c}), ContractViolation);

  auto anon = read_trees("(X (Y a)) (X (Y b))");
  auto anon2 = read_trees("(X (Y a)) (X (Y b))", "other.psd");
  CHECK(pair_sentences(anon, anon2).size() == 2);
}

TEST_CASE("function tag scoring") {
  auto g = sentence("(IP-MAT (NP-SBJ (PRO they)) (VBD went))");
  auto p = sentence("(IP-MAT (NP (PRO they)) (VBD went))");
  auto s = score_function_tags(g, p);
  CHECK(s.matched_brackets == 2);
  CHECK(s.per_tag.at("SBJ") == TagCounts{0, 1, 0});
  CHECK(s.per_tag.at("MAT") == TagCounts{1, 1, 1});

  auto q = score_function_tags(sentence("(CP-QUE-MAT (IP-SUB (VBD came)))"), sentence("(CP-QUE (IP-SUB (VBD came)))"));
  CHECK(q.per_tag.at("QUE") == TagCounts{1, 1, 1});
  CHECK(q.per_tag.at("MAT") == TagCounts{0, 1, 0});
  CHECK(q.per_tag.at("SUB") == TagCounts{1, 1, 1});

  auto off = score_function_tags(sentence("(IP-MAT (NP-SBJ (PRO a)) (VBD b))"), sentence("(IP-MAT (NP-SBJ (PRO a) (VBD b)))"));
  CHECK(off.matched_brackets == 1);
  CHECK(off.per_tag.at("SBJ") == TagCounts{0, 0, 0});

  auto unscored = score_function_tags(sentence("(NP-LOC (N a))"), sentence("(NP-TMC (N a))"));
  CHECK(unscored.per_tag.count("LOC") == 0);
  CHECK(unscored.total() == TagCounts{0, 0, 0});
}

TEST_CASE("query hit diff") {
  std::vector<HitRecord> gold{hit("a", "do-subj", 3), hit("b", "do-subj", 1), hit("c", "verb-subj", 4)};
  std::vector<HitRecord> pred{hit("c", "non-inverted", 4), hit("x", "verb-subject", 0), hit("x", "verb-subj", 0)};
  auto d = diff_query_hits(gold, pred, {"non-inverted", "do-subj", "verb-subj"});
  REQUIRE(d.rows.size() == 3);
  CHECK(d.rows[0].query == "non-inverted");
  CHECK(d.find("do-subj")->miss == 2);
  CHECK(d.find("do-subj")->scores.recall == 0);
  CHECK(d.find("verb-subj")->miss == 1);
  CHECK(d.find("verb-subj")->false_alarm == 1);
  CHECK(d.find("non-inverted")->false_alarm == 1);
  CHECK(d.warnings.size() == 1);
  CHECK(d.find("nothing") == nullptr);

  std::ostringstream text, tsv;
  write_query_report(text, d);
  write_query_report_tsv(tsv, d);
  CHECK(text.str().find("do-subj") != std::string::npos);
  CHECK(tsv.str().find("search\t") == 0);
}

TEST_CASE("eval params files") {
  auto p = parse_eval_params("# x\nDELETE_LABEL .\nDELETE_LABEL :\nSTRIP_COINDICES false\nFUNCTION_TAG SBJ\n");
  CHECK(p.delete_pos_labels == std::set<std::string>{".", ":"});
  CHECK_FALSE(p.strip_coindices);
  CHECK(p.strip_function_tags);
  CHECK(p.scored_function_tags == std::set<std::string>{"SBJ"});
  CHECK(parse_eval_params("").delete_pos_labels == EvalParams{}.delete_pos_labels);
  CHECK_THROWS_AS(parse_eval_params("BOGUS 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_eval_params("STRIP_COINDICES maybe\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_eval_params("DELETE_LABEL\n"), std::invalid_argument);
}

TEST_CASE("property: bracket scores agree with the greedy oracle") {
  Rng rng(61);
  for (int i = 0; i < 300; ++i) {
    auto [gt, pt] = random_tree_pair(rng, {.max_terminals = 14});
    auto g = make_sentence("g", gt);
    auto p = make_sentence("p", pt);
    auto s = score_brackets(g, p);
    auto o = oracle_bracket_counts(gt, pt);
    CHECK(s.matched == o.matched);
    CHECK(s.gold_count == o.gold);
    CHECK(s.pred_count == o.pred);
    auto back = score_brackets(p, g);
    CHECK(back.matched == s.matched);
    CHECK(back.recall == doctest::Approx(s.precision));
    CHECK(back.f1 == doctest::Approx(s.f1));
    CHECK(score_brackets(g, g).f1 == 100);
  }
}

TEST_CASE("property: function tag counts are symmetric and bounded") {
  Rng rng(62);
  for (int i = 0; i < 200; ++i) {
    auto [gt, pt] = random_tree_pair(rng, {.max_terminals = 12});
    auto g = make_sentence("g", gt);
    auto p = make_sentence("p", pt);
    auto a = score_function_tags(g, p);
    auto b = score_function_tags(p, g);
    CHECK(a.matched_brackets == b.matched_brackets);
    CHECK(a.matched_brackets == score_brackets(g, p).matched);
    for (const auto& [tag, c] : a.per_tag) {
      const auto& d = b.per_tag.at(tag);
      CHECK(c.matched == d.matched);
      CHECK(c.gold_count == d.pred_count);
      CHECK(c.pred_count == d.gold_count);
      CHECK(c.matched <= std::min(c.gold_count, c.pred_count));
      CHECK(c.gold_count <= a.matched_brackets);
    }
  }
}
