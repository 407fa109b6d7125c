#pragma once

// Random inputs for the property tests. Everything is driven by an explicit
// seed so failures replay.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ptk/treebank.hpp"

namespace ptk::testing {

using Rng = std::mt19937_64;

struct TreeShape {
  int max_terminals = 12;
  int max_children = 4;
  /// Chance that a generated leaf is an empty category.
  double empty_rate = 0.1;
  /// Chance of punctuation leaves ("." and ",").
  double punct_rate = 0.1;
  /// Leaf tags like PRO+N, ADJ21/ADJ22 groups and MD0.
  bool transform_noise = false;
  /// Function tags and coindices on internal labels.
  bool decorate = true;
};

std::string random_internal_label(Rng& rng, bool decorate);
std::string random_pos(Rng& rng);
std::string random_word(Rng& rng);

/// A leaf list with at least one overt word.
std::vector<Tree> random_leaves(Rng& rng, const TreeShape& shape);

/// Random bracketing over `leaves`, keeping their order.
Tree random_tree_over(Rng& rng, std::vector<Tree> leaves, const TreeShape& shape);

Tree random_tree(Rng& rng, const TreeShape& shape = {});

/// Two trees over the same overt yield; the predicted side gets its own
/// bracketing and loses some empty categories.
std::pair<Tree, Tree> random_tree_pair(Rng& rng, const TreeShape& shape = {});

/// UTF-8 text mixing words, punctuation, apostrophes, periods, Roman
/// numerals, curly quotes and odd whitespace.
std::string random_text(Rng& rng, int max_words = 12);

}  // namespace ptk::testing
