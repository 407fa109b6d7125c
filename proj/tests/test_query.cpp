#include <sstream>

#include "doctest.h"
#include "ptk/query.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace ptk;
using namespace ptk::testing;

namespace {

Sentence sentence(std::string_view text) { return read_trees(text).at(0); }

std::vector<HitRecord> hits_for(const QuerySuite& suite, const std::string& file) {
  return run_suites({suite}, read_tree_file(data_path(file)));
}

int find_node(const TreeIndex& idx, std::string_view raw, std::string_view word = "") {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Tree& t = *idx[i].tree;
    if (t.label.raw == raw && (word.empty() || t.word == word)) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST_CASE("label patterns") {
  CHECK(label_matches(parse_label("CP-QUE-MAT"), "CP-QUE-MAT*"));
  CHECK(label_matches(parse_label("CP-QUE-MAT-PRN"), "CP-QUE-MAT*"));
  CHECK_FALSE(label_matches(parse_label("CP-QUE"), "CP-QUE-MAT*"));
  CHECK(label_matches(parse_label("NP-SBJ-1"), "NP-SBJ*"));
  CHECK(label_matches(parse_label("DOD"), "DOD|DOP"));
  CHECK_FALSE(label_matches(parse_label("DO"), "DOD|DOP"));
  CHECK(label_matches(parse_label("IP-SUB"), "IP-MAT*|IP-SUB*"));
  CHECK(label_matches(parse_label("FRAG"), "*"));

  std::map<std::string, TagClass> classes{{"fin", {"fin", {"DOD", "VB*"}}}};
  auto p = LabelPattern::parse("fin|NEG", classes);
  CHECK(p.matches("VBP"));
  CHECK(p.matches("NEG"));
  CHECK_FALSE(p.matches("N"));

  CHECK_THROWS_AS(LabelPattern::parse("undefinedClass"), QueryError);
  CHECK_THROWS_AS(LabelPattern::parse("N*P"), QueryError);
  CHECK_THROWS_AS(LabelPattern::parse("NP||VB"), QueryError);
  CHECK_THROWS_AS(LabelPattern::parse(""), QueryError);
}

TEST_CASE("dominatesWithinClause stops at clause boundaries") {
  auto s = sentence("(IP-MAT (NP-SBJ (PRO they)) (VBP consider) (NEG not) (IP-INF (TO to) (VB cut) (NP-ACC (PRO it))))");
  TreeIndex idx(s.tree);
  int root = 0;
  int they = find_node(idx, "PRO", "they");
  int cut = find_node(idx, "VB");
  int inf = find_node(idx, "IP-INF");
  CHECK(dominates_within_clause(idx, root, they));
  CHECK(dominates_within_clause(idx, root, inf));
  CHECK_FALSE(dominates_within_clause(idx, root, cut));
  CHECK(idx.dominates(root, cut));
  CHECK(dominates_within_clause(idx, inf, cut));
  CHECK_FALSE(dominates_within_clause(idx, cut, cut));

  auto c = sentence("(IP-MAT (VBD said) (CP-THT (C 0) (IP-SUB (VBD went))))");
  TreeIndex ci(c.tree);
  CHECK_FALSE(dominates_within_clause(ci, 0, find_node(ci, "VBD", "went")));
  CHECK_FALSE(dominates_within_clause(ci, 0, find_node(ci, "C")));
  CHECK(dominates_within_clause(ci, 0, find_node(ci, "CP-THT")));
}

TEST_CASE("precedence uses spans") {
  auto s = sentence("(IP-SUB (NP-SBJ (PRO they)) (NP-ACC *T*-1) (DOP do) (NEG not) (VB perish))");
  TreeIndex idx(s.tree);
  int subj = find_node(idx, "NP-SBJ");
  int gap = find_node(idx, "NP-ACC");
  int dop = find_node(idx, "DOP");
  int neg = find_node(idx, "NEG");
  int vb = find_node(idx, "VB");
  CHECK(precedes(idx, subj, dop));
  CHECK(immediately_precedes(idx, dop, neg));
  CHECK(precedes(idx, dop, vb));
  CHECK_FALSE(immediately_precedes(idx, dop, vb));
  CHECK_FALSE(precedes(idx, neg, dop));
  CHECK_FALSE(precedes(idx, subj, gap));
  CHECK_FALSE(precedes(idx, gap, dop));
  CHECK_FALSE(precedes(idx, 0, vb));
}

TEST_CASE("built-in suites classify the example trees") {
  auto decl = hits_for(builtin_declarative_suite(), "declarative.psd");
  REQUIRE(decl.size() == 4);
  CHECK(decl[0].sentence_id == "decl.inverted");
  CHECK(decl[0].query == "inverted");
  CHECK(decl[0].anchor_index == 0);
  CHECK(decl[0].clause_label == "IP-SUB");
  CHECK(decl[1].query == "do-not");
  CHECK(decl[1].anchor_index == 1);
  CHECK(decl[2].query == "verb-not");
  CHECK(decl[2].anchor_index == 1);
  CHECK(decl[3].query == "verb-not");
  CHECK(decl[3].anchor_index == 1);
  CHECK(decl[3].clause_span == Span{0, 5});

  auto quest = hits_for(builtin_question_suite(), "question.psd");
  REQUIRE(quest.size() == 2);
  CHECK(quest[0].sentence_id == "quest.do-subj");
  CHECK(quest[0].query == "do-subj");
  CHECK(quest[0].anchor_index == 2);
  CHECK(quest[0].clause_label == "CP-QUE-MAT");
  CHECK(quest[1].query == "verb-subj");
  CHECK(quest[1].anchor_index == 1);
}

TEST_CASE("cascade order decides overlapping matches") {
  auto suite = builtin_declarative_suite();
  auto tree = read_tree_file(data_path("declarative.psd")).at(0);
  auto normal = run_cascade(suite, tree);
  REQUIRE(normal.size() == 1);
  CHECK(normal[0].query == "inverted");

  auto swapped = run_cascade(suite.reordered({"do-not", "inverted", "verb-not"}), tree);
  REQUIRE(swapped.size() == 1);
  CHECK(swapped[0].query == "do-not");

  CHECK_THROWS_AS(suite.reordered({"do-not", "inverted"}), QueryError);
  CHECK_THROWS_AS(suite.reordered({"do-not", "inverted", "bogus"}), QueryError);
  CHECK_THROWS_AS(suite.reordered({"do-not", "do-not", "verb-not"}), QueryError);
  CHECK(suite.reordered({"verb-not", "ignore-inverted", "do-not"}).cascade[1].name == "inverted");
}

TEST_CASE("query options") {
  auto suite = parse_query_suite(
      "query adj on IP*:\n"
      "  anchor v: VBD\n"
      "  node n: NEG\n"
      "  root iDominates v and root iDominates n\n"
      "  v iPrecedes n\n");
  auto s = sentence("(IP-MAT (VBD went) (ADV not) (NEG not))");
  CHECK(run_cascade(suite, s).empty());
  CHECK(run_cascade(suite, s, {.strict_adjacency = false}).size() == 1);

  auto deep = sentence("(IP-MAT (NP (VBD went)) (NEG not))");
  CHECK(run_cascade(suite, deep).empty());
  CHECK(run_cascade(suite, deep, {.relaxed_depth = true}).size() == 1);
}

TEST_CASE("suite parse errors") {
  CHECK_THROWS_AS(parse_query_suite("query q on IP*:\n  anchor v: nope\n"), QueryError);
  CHECK_THROWS_AS(parse_query_suite("query q on IP*:\n  node v: VB\n  root iDominates v\n"), QueryError);
  CHECK_THROWS_AS(parse_query_suite("query q on IP*:\n  anchor v: VB\n  root iDominates w\n"), QueryError);
  CHECK_THROWS_AS(parse_query_suite("query q on IP*:\n  anchor v: VB\n  root likes v\n"), QueryError);
  CHECK_THROWS_AS(parse_query_suite("query q on IP*:\n  anchor v: VB\n  (leaf v\n"), QueryError);
  CHECK_THROWS_AS(parse_query_suite("def X = VB\n"), QueryError);
  CHECK_THROWS_AS(parse_query_suite("def a = b\ndef b = a\nquery q on a:\n  anchor v: VB\n"), QueryError);
  CHECK_THROWS_AS(parse_query_suite("query q on IP*:\n  anchor v: VB\nquery q on IP*:\n  anchor v: VB\n"),
                  QueryError);
  CHECK_THROWS_AS(parse_query_suite("rule r on IP*:\n  anchor v: VB\n", false), QueryError);
  CHECK_THROWS_AS(parse_query_suite("stray line\n"), QueryError);
  try {
    parse_query_suite("# c\n\nquery q on IP*:\n  anchor v: VB\n  root iDominates w\n");
    FAIL("expected an error");
  } catch (const QueryError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
  CHECK_NOTHROW(parse_query_suite("query q on IP*:\n  anchor v: VB\n  (root iDominates v and\n    leaf v)\n"));
}

TEST_CASE("rendered suites parse back to the same behaviour") {
  for (const auto& suite : {builtin_declarative_suite(), builtin_question_suite()}) {
    auto text = render_query_suite(suite);
    auto back = parse_query_suite(text);
    CHECK(render_query_suite(back) == text);
    REQUIRE(back.cascade.size() == suite.cascade.size());
    for (const auto& file : {"declarative.psd", "question.psd", "errors_gold.psd", "errors_parsed.psd"}) {
      auto corpus = read_tree_file(data_path(file));
      CHECK(run_suites({back}, corpus) == run_suites({suite}, corpus));
    }
  }
}

TEST_CASE("hits round trip through TSV") {
  auto hits = hits_for(builtin_declarative_suite(), "declarative.psd");
  std::ostringstream out;
  write_hits(out, hits);
  std::istringstream in(out.str());
  CHECK(read_hits(in) == hits);

  std::istringstream bad("sentence_id\tquery\n");
  CHECK_THROWS(read_hits(bad));
}

TEST_CASE("property: relations agree with parent-walk oracles") {
  Rng rng(51);
  for (int i = 0; i < 200; ++i) {
    Tree t = random_tree(rng, {.max_terminals = 8, .empty_rate = 0.2});
    TreeIndex idx(t);
    auto flat = flatten(t);
    auto spans = oracle_spans(t);
    if (idx.size() > 15) continue;
    for (int a = 0; a < static_cast<int>(idx.size()); ++a) {
      for (int b = 0; b < static_cast<int>(idx.size()); ++b) {
        CHECK(dominates_within_clause(idx, a, b) == oracle_dominates_within_clause(flat, a, b));
        const auto& sa = spans[static_cast<std::size_t>(a)];
        const auto& sb = spans[static_cast<std::size_t>(b)];
        bool before = sa && sb && sa->second < sb->first;
        CHECK(precedes(idx, a, b) == before);
        CHECK(immediately_precedes(idx, a, b) == (before && sb->first == sa->second + 1));
        if (!sa || !sb) CHECK_FALSE(precedes(idx, a, b));
      }
    }
  }
}

TEST_CASE("property: matcher agrees with brute-force search") {
  auto suite = parse_query_suite(
      "query q on IP*|CP*:\n"
      "  anchor a: DOD|DOP|VBD|VBP\n"
      "  node s: NP*\n"
      "  root dominates a and root dominatesWithinClause s\n"
      "  a precedes s\n"
      "  not exists n: NEG (root iDominates n and n precedes a)\n");
  const Query& q = suite.cascade.at(0);
  auto in = [](const Tree& t, std::initializer_list<const char*> xs) {
    for (const char* x : xs) {
      if (t.label.raw == x) return true;
    }
    return false;
  };
  Rng rng(52);
  int matched = 0;
  for (int i = 0; i < 400; ++i) {
    Tree t = random_tree(rng, {.max_terminals = 10, .empty_rate = 0.15});
    TreeIndex idx(t);
    auto flat = flatten(t);
    auto spans = oracle_spans(t);
    auto before = [&](int x, int y) {
      const auto& sx = spans[static_cast<std::size_t>(x)];
      const auto& sy = spans[static_cast<std::size_t>(y)];
      return sx && sy && sx->second < sy->first;
    };
    const int n = static_cast<int>(flat.size());
    for (int r = 0; r < n; ++r) {
      const Tree& rt = *flat[static_cast<std::size_t>(r)].tree;
      bool expect = false;
      std::string cat = rt.label.raw.substr(0, 2);
      if (!rt.children.empty() && (cat == "IP" || cat == "CP")) {
        bool blocked_neg = false;
        for (int a = 0; a < n && !expect; ++a) {
          const Tree& at = *flat[static_cast<std::size_t>(a)].tree;
          if (!at.children.empty() || !spans[static_cast<std::size_t>(a)]) continue;
          if (!in(at, {"DOD", "DOP", "VBD", "VBP"}) || !oracle_dominates(flat, r, a)) continue;
          blocked_neg = false;
          for (int m = 0; m < n; ++m) {
            if (flat[static_cast<std::size_t>(m)].parent == r && flat[static_cast<std::size_t>(m)].tree->label.raw == "NEG" &&
                before(m, a))
              blocked_neg = true;
          }
          if (blocked_neg) continue;
          for (int s = 0; s < n && !expect; ++s) {
            if (flat[static_cast<std::size_t>(s)].tree->label.raw.rfind("NP", 0) != 0) continue;
            if (oracle_dominates_within_clause(flat, r, s) && before(a, s)) expect = true;
          }
        }
      }
      auto got = match_query(q, idx, r);
      CHECK(got.has_value() == expect);
      if (got) {
        ++matched;
        CHECK((*got)[0] == r);
      }
    }
  }
  CHECK(matched > 0);
}

TEST_CASE("property: cascade hits are unique per node and anchored on overt leaves") {
  auto decl = builtin_declarative_suite();
  auto quest = builtin_question_suite();
  Rng rng(53);
  for (int i = 0; i < 300; ++i) {
    Tree t = random_tree(rng, {.max_terminals = 12});
    Sentence s = make_sentence("r" + std::to_string(i), t);
    for (const auto* suite : {&decl, &quest}) {
      auto hits = run_cascade(*suite, s);
      for (const auto& h : hits) {
        CHECK(h.anchor_index < s.tokens.size());
        CHECK(h.anchor_index >= h.clause_span.start);
        CHECK(h.anchor_index <= h.clause_span.end);
        CHECK(suite->find(h.query) != nullptr);
      }
      TreeIndex idx(s.tree);
      std::size_t expected = 0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        for (const auto& q : suite->cascade) {
          if (match_query(q, idx, static_cast<int>(k))) {
            ++expected;
            break;
          }
        }
      }
      CHECK(hits.size() == expected);
    }
  }
}
