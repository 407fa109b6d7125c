#include "doctest.h"
#include "ptk/transform.hpp"
#include "support/generators.hpp"

using namespace ptk;
using namespace ptk::testing;

namespace {

Tree tree(std::string_view text) { return read_trees(text).at(0).tree; }

bool contains_label(const Tree& t, const std::set<std::string>& cats) {
  if (cats.count(t.label.category)) return true;
  for (const auto& c : t.children) {
    if (contains_label(c, cats)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("simplify_complex_tag keeps the rightmost component") {
  CHECK(simplify_complex_tag("PRO+N") == "N");
  CHECK(simplify_complex_tag("WPRO+ADV+ADV") == "ADV");
  CHECK(simplify_complex_tag("ADJ+NS") == "NS");
  CHECK(simplify_complex_tag("N") == "N");
}

TEST_CASE("rewrite_segmented") {
  CHECK(rewrite_segmented(tree("(ADJ (ADJ21 a) (ADJ22 lone))")) == tree("(ADJ_NT (ADJ a) (ADJ lone))"));
  CHECK(rewrite_segmented(tree("(ADJ alone)")) == tree("(ADJ alone)"));
  auto plain = tree("(IP-MAT (NP-SBJ (PRO they)) (VBD went))");
  CHECK(rewrite_segmented(plain) == plain);

  SUBCASE("already marked parent is not marked twice") {
    CHECK(rewrite_segmented(tree("(ADJ_NT (ADJ21 a) (ADJ22 lone))")) == tree("(ADJ_NT (ADJ a) (ADJ lone))"));
  }
  SUBCASE("inconsistent bases give a warning but still strip digits") {
    std::vector<TransformWarning> w;
    auto out = rewrite_segmented(tree("(NP (N21 a) (ADJ22 b))"), &w);
    CHECK(out == tree("(NP_NT (N a) (ADJ b))"));
    CHECK_FALSE(w.empty());
  }
}

TEST_CASE("normalize_tags") {
  CHECK(normalize_tags(tree("(NP (PRO+N hymself))")) == tree("(NP (N hymself))"));
  CHECK(normalize_tags(tree("(IP-MAT (MD0 can))")) == tree("(IP-MAT (MD can))"));
  CHECK(normalize_tags(tree("(ADJ (ADJ21 a) (ADJ22 lone))")) == tree("(ADJ_NT (ADJ a) (ADJ lone))"));
  auto done = tree("(IP-MAT (NP-SBJ (PRO they)) (VBD went) (. .))");
  CHECK(normalize_tags(done) == done);
}

TEST_CASE("filter_function_tags") {
  TransformConfig cfg;
  CHECK(filter_function_tags(tree("(IP-SUB-SPE-PRN (X y))"), cfg) == tree("(IP-SUB-PRN (X y))"));
  CHECK(filter_function_tags(tree("(CP-QUE-MAT (X y))"), cfg) == tree("(CP-QUE-MAT (X y))"));
  CHECK(filter_function_tags(tree("(NP (X y))"), cfg) == tree("(NP (X y))"));
  CHECK(filter_function_tags(tree("(NP-TPC-1 (NP-SBJ x))"), cfg) == tree("(NP-1 (NP-SBJ x))"));
  CHECK(filter_function_tags(tree("(ADVP-LOC (X y))"), cfg) == tree("(ADVP (X y))"));
}

TEST_CASE("config validation and loading") {
  TransformConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.excluded_rare_tags.insert("SBJ");
  CHECK_THROWS(cfg.validate());
  auto loaded = parse_transform_config("retained_function_tags = SBJ QUE\n# comment\n");
  CHECK(loaded.retained_function_tags == std::set<std::string>{"SBJ", "QUE"});
  CHECK_THROWS(parse_transform_config("nonsense"));
}

TEST_CASE("strip_metadata") {
  TransformConfig cfg;
  auto input = read_trees(
      "( (META (NP (N stage))) (ID a))"
      "( (IP-MAT (CODE <paren>) (FW x) (CODE <$$paren>)) (ID b))"
      "( (IP-MAT (NP-SBJ (PRO they)) (VBD went)) (ID c))"
      "( (IP-MAT (NP-SBJ (PRO they)) (BREAK x) (VBD went)) (ID d))"
      "( (IP-MAT (NP (CODE {COM:x})) (VBD went)) (ID e))"
      "( (IP-MAT (CODE {COM:y}) (VBD went) (REF (FW z))) (ID f))");
  auto r = strip_metadata(input, cfg);
  CHECK(r.kept.size() + r.dropped.size() == input.size());

  REQUIRE(r.dropped.size() == 3);
  CHECK(r.dropped[0].sentence.id == "a");
  CHECK(r.dropped[0].reason == "META-rooted");
  CHECK(r.dropped[1].sentence.id == "d");
  CHECK(r.dropped[1].reason == "BREAK");
  CHECK(r.dropped[2].sentence.id == "e");
  CHECK(r.dropped[2].reason == "ill-formed-after-metadata-removal");

  REQUIRE(r.kept.size() == 3);
  CHECK(render_tree(r.kept[0].tree) == "(IP-MAT (OPAREN -LRB-) (FW x) (CPAREN -RRB-))");
  CHECK(r.kept[1] == input[2]);
  CHECK(render_tree(r.kept[2].tree) == "(IP-MAT (VBD went))");
  CHECK(r.kept[2].tokens == std::vector<std::string>{"went"});
}

TEST_CASE("split_corpus by file name") {
  auto a = split_corpus({"locke.psd", "essex.psd", "milton.psd"});
  REQUIRE(a.size() == 3);
  CHECK(a[0].partition == Partition::dev);
  CHECK(a[1].partition == Partition::test);
  CHECK(a[2].partition == Partition::train);
  CHECK(split_corpus({}).empty());
  CHECK(partition_of("/corpus/dir/lisle-e3-p1.psd") == Partition::dev);
  CHECK(partition_of("/corpus/lex/milton.psd") == Partition::train);
  CHECK(partition_of("Locke.psd") == Partition::train);
}

TEST_CASE("split_stats") {
  auto a = split_corpus({"locke.psd", "milton.psd"});
  std::vector<std::vector<Sentence>> per_file{read_trees("(A (B x) (B y))"), read_trees("(A (B x) (B y) (C *T*))(A (B z))")};
  auto st = split_stats(a, per_file);
  CHECK(st.dev.files == 1);
  CHECK(st.dev.tokens == 2);
  CHECK(st.train.sentences == 2);
  CHECK(st.train.tokens == 3);
  CHECK(st.total_tokens == 5);
  CHECK(st.train.token_percent == doctest::Approx(60.0));
}

TEST_CASE("property: normalize_tags is idempotent and leaves no '+'") {
  Rng rng(21);
  TreeShape shape{.max_terminals = 14, .transform_noise = true};
  for (int i = 0; i < 300; ++i) {
    Tree t = random_tree(rng, shape);
    Tree once = normalize_tags(t);
    CHECK(normalize_tags(once) == once);
    CHECK(render_tree(once).find('+') == std::string::npos);
    CHECK(overt_tokens(once) == overt_tokens(t));
  }
}

TEST_CASE("property: filter_function_tags keeps structure") {
  Rng rng(22);
  TransformConfig cfg;
  for (int i = 0; i < 300; ++i) {
    Tree t = random_tree(rng);
    Tree f = filter_function_tags(t, cfg);
    auto same_shape = [&](auto&& self, const Tree& a, const Tree& b) -> void {
      REQUIRE(a.children.size() == b.children.size());
      CHECK(a.label.category == b.label.category);
      CHECK(a.label.coindex == b.label.coindex);
      CHECK(a.word == b.word);
      if (a.is_leaf()) CHECK(a.label == b.label);
      if (!b.is_leaf()) {
        for (const auto& tag : b.label.function_tags) CHECK(cfg.retained_function_tags.count(tag));
      }
      for (std::size_t k = 0; k < a.children.size(); ++k) self(self, a.children[k], b.children[k]);
    };
    same_shape(same_shape, t, f);
  }
}

TEST_CASE("property: strip_metadata conserves sentences and leaves no metadata") {
  Rng rng(23);
  TransformConfig cfg;
  std::vector<Sentence> input;
  for (int i = 0; i < 200; ++i) {
    Tree t = random_tree(rng);
    if (i % 3 == 0) t.children.push_back(Tree::leaf("CODE", "{COM:x}"));
    if (i % 7 == 0) t.children.push_back(Tree::internal("REF", {Tree::leaf("FW", "y")}));
    if (i % 11 == 0) t = Tree::internal("META", {t});
    if (i % 13 == 0) t.children.insert(t.children.begin(), Tree::leaf("BREAK", "x"));
    input.push_back(make_sentence(std::to_string(i), t));
  }
  auto r = strip_metadata(input, cfg);
  CHECK(r.kept.size() + r.dropped.size() == input.size());
  for (const auto& s : r.kept) {
    CHECK_FALSE(contains_label(s.tree, cfg.metadata_labels));
    CHECK(s.tokens == overt_tokens(s.tree));
  }
}
