#include "generators.hpp"

#include <algorithm>

namespace ptk::testing {

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

int between(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

const std::vector<std::string> categories{"IP", "CP", "NP", "PP", "ADJP", "ADVP", "WNP", "QP", "FRAG"};
const std::vector<std::string> tags{"MAT", "SUB", "SBJ", "ACC", "QUE", "PRN", "SPE", "LOC", "INF", "DTV", "TMC"};
const std::vector<std::string> pos_tags{"N", "D", "P", "VBD", "VBP", "DOD", "DOP", "NEG", "PRO", "VB",
                                        "ADJ", "NPR", "Q", "TO", "CONJ", "PRO$", "BEP", "HVD", "VBN", "ADV"};
const std::vector<std::string> noisy_tags{"PRO+N", "WPRO+ADV+ADV", "ADJ+NS", "MD0", "ADV+P"};
const std::vector<std::string> words{"they", "do",  "not",  "perish", "Carpenter", "ask",   "you",  "dutie",
                                     "thee", "had", "came", "unto",   "Beard",     "Fellow", "kynge", "Is",
                                     "ther", "muche", "thynke", "lone", "hymself", "&c",    "Queen's", "v.C.xlviij"};
const std::vector<std::string> empty_words{"*T*-1", "*pro*", "0", "*con*", "*exp*", "*ICH*-2"};
const std::vector<std::string> empty_pos{"NP-SBJ", "NP-ACC", "C", "ADVP-LOC", "WADVP"};

}  // namespace

std::string random_internal_label(Rng& rng, bool decorate) {
  std::string s = pick(rng, categories);
  if (!decorate) return s;
  int n = between(rng, 0, 2);
  for (int i = 0; i < n; ++i) s += "-" + pick(rng, tags);
  if (chance(rng, 0.15)) s += "-" + std::to_string(between(rng, 1, 9));
  if (chance(rng, 0.05)) s += "=" + std::to_string(between(rng, 1, 4));
  return s;
}

std::string random_pos(Rng& rng) { return pick(rng, pos_tags); }
std::string random_word(Rng& rng) { return pick(rng, words); }

std::vector<Tree> random_leaves(Rng& rng, const TreeShape& shape) {
  const int n = between(rng, 1, shape.max_terminals);
  std::vector<Tree> leaves;
  bool overt = false;
  for (int i = 0; i < n; ++i) {
    if (chance(rng, shape.empty_rate)) {
      leaves.push_back(Tree::leaf(pick(rng, empty_pos), pick(rng, empty_words)));
      continue;
    }
    overt = true;
    if (chance(rng, shape.punct_rate)) {
      bool period = chance(rng, 0.5);
      leaves.push_back(Tree::leaf(period ? "." : ",", period ? "." : ","));
      continue;
    }
    if (shape.transform_noise && chance(rng, 0.25)) {
      if (chance(rng, 0.4) && i + 1 < n) {
        std::string base = chance(rng, 0.5) ? "ADJ" : "N";
        leaves.push_back(Tree::leaf(base + "21", random_word(rng)));
        leaves.push_back(Tree::leaf(base + "22", random_word(rng)));
        ++i;
      } else {
        leaves.push_back(Tree::leaf(pick(rng, noisy_tags), random_word(rng)));
      }
      continue;
    }
    leaves.push_back(Tree::leaf(random_pos(rng), random_word(rng)));
  }
  if (!overt) leaves.push_back(Tree::leaf(random_pos(rng), random_word(rng)));
  return leaves;
}

Tree random_tree_over(Rng& rng, std::vector<Tree> leaves, const TreeShape& shape) {
  auto label = [&] { return random_internal_label(rng, shape.decorate); };
  if (leaves.size() == 1) return Tree::internal(label(), std::move(leaves));

  const int n = static_cast<int>(leaves.size());
  const int k = between(rng, 2, std::min(n, shape.max_children));
  std::vector<int> cuts;
  for (int i = 1; i < n; ++i) cuts.push_back(i);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(static_cast<std::size_t>(k - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(n);

  std::vector<Tree> children;
  int from = 0;
  for (int to : cuts) {
    std::vector<Tree> group(std::make_move_iterator(leaves.begin() + from), std::make_move_iterator(leaves.begin() + to));
    if (group.size() == 1 && chance(rng, 0.6)) {
      children.push_back(std::move(group.front()));
    } else {
      children.push_back(random_tree_over(rng, std::move(group), shape));
    }
    from = to;
  }
  Tree t = Tree::internal(label(), std::move(children));
  if (chance(rng, 0.1)) t = Tree::internal(label(), {std::move(t)});
  return t;
}

Tree random_tree(Rng& rng, const TreeShape& shape) { return random_tree_over(rng, random_leaves(rng, shape), shape); }

std::pair<Tree, Tree> random_tree_pair(Rng& rng, const TreeShape& shape) {
  auto leaves = random_leaves(rng, shape);
  std::vector<Tree> pred_leaves;
  for (const auto& l : leaves) {
    if (l.is_empty_category() && chance(rng, 0.5)) continue;
    Tree copy = l;
    if (!l.is_empty_category() && l.label.category != "." && l.label.category != "," && chance(rng, 0.2))
      copy = Tree::leaf(random_pos(rng), l.word);
    pred_leaves.push_back(std::move(copy));
  }
  if (pred_leaves.empty()) pred_leaves.push_back(leaves.front());
  Tree gold = random_tree_over(rng, leaves, shape);
  Tree pred = random_tree_over(rng, std::move(pred_leaves), shape);
  return {std::move(gold), std::move(pred)};
}

std::string random_text(Rng& rng, int max_words) {
  static const std::vector<std::string> pieces{
      "Queen's", "th'exchaung", "th’ende", "thynkyth", "its",     "Mr.",      "Mrs.",   "Fitz-Morris", ".xiiii.C.",
      "v.C.xlviij", "&c",      "&c.",     "civil",    "did.",    "(aside)",  "“so”",   "‘tis’",       "hello,",
      "what?",   "now!",       "end.",    "¶",        "—",       "naïve",    "Eccl•siasticall", "a;b",   "x:y",
      "[sic]",   "{note}",     "\"q\"",   "«guill»",  "¿que",    "don't",    "––",     "...",        "i.",
      "IIII.",   "mix",        "ij.",     "'s",       "’",       "e\xCC\x81", "中文",   "\xF0\x9F\x98\x80"};
  static const std::vector<std::string> separators{" ", " ", " ", "  ", "\t", "\n", "\r\n"};
  static const std::string ascii = "abcXYZ.,;:!?()[]{}\"'`-&*0123456789";
  std::string out;
  const int n = between(rng, 0, max_words);
  for (int i = 0; i < n; ++i) {
    if (i) out += pick(rng, separators);
    if (chance(rng, 0.3)) {
      int len = between(rng, 1, 6);
      for (int j = 0; j < len; ++j) out += ascii[static_cast<std::size_t>(between(rng, 0, static_cast<int>(ascii.size()) - 1))];
    } else {
      out += pick(rng, pieces);
      if (chance(rng, 0.3)) out += pick(rng, pieces);
    }
  }
  if (chance(rng, 0.2)) out = pick(rng, separators) + out + pick(rng, separators);
  return out;
}

}  // namespace ptk::testing
