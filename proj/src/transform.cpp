#include "ptk/transform.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <stdexcept>

#include "ptk/text_util.hpp"

namespace ptk {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Segmented word parts carry the part count and position as two trailing
// digits: ADJ21, ADJ22.
bool is_segmented(std::string_view category) {
  const auto n = category.size();
  if (n < 3) return false;
  char count = category[n - 2];
  char pos = category[n - 1];
  return is_digit(count) && is_digit(pos) && count != '0' && pos != '0' && !is_digit(category[n - 3]);
}

std::string segment_base(std::string_view category) { return std::string(category.substr(0, category.size() - 2)); }

NodeLabel with_category(const NodeLabel& label, std::string category) {
  return make_label(std::move(category), label.function_tags, label.coindex, label.gap_index);
}

Tree rewrite_segmented_rec(const Tree& t, std::vector<TransformWarning>* warnings, bool simplify_parent) {
  if (t.is_leaf()) {
    if (!is_segmented(t.label.category)) return t;
    return Tree::leaf(with_category(t.label, segment_base(t.label.category)), t.word);
  }

  std::vector<Tree> children;
  children.reserve(t.children.size());
  std::vector<std::string> bases;
  for (const auto& c : t.children) {
    if (c.is_leaf() && is_segmented(c.label.category)) bases.push_back(segment_base(c.label.category));
    children.push_back(rewrite_segmented_rec(c, warnings, simplify_parent));
  }
  if (bases.empty()) return Tree::internal(t.label, std::move(children));

  std::string category = simplify_parent ? simplify_complex_tag(t.label.category) : t.label.category;
  if (warnings) {
    bool consistent = std::all_of(bases.begin(), bases.end(), [&](const std::string& b) { return b == bases.front(); });
    if (!consistent) {
      warnings->push_back({t.label.raw, "segmented children have different base tags"});
    } else if (bases.front() != category && bases.front() + "_NT" != category) {
      warnings->push_back({t.label.raw, "segmented children tagged " + bases.front() + " under " + category});
    }
  }
  if (category.size() < 3 || category.compare(category.size() - 3, 3, "_NT") != 0) category += "_NT";
  return Tree::internal(with_category(t.label, std::move(category)), std::move(children));
}

Tree simplify_leaves(const Tree& t) {
  if (t.is_leaf()) {
    std::string category = simplify_complex_tag(t.label.category);
    if (category == "MD0") category = "MD";
    if (category == t.label.category) return t;
    return Tree::leaf(with_category(t.label, std::move(category)), t.word);
  }
  std::vector<Tree> children;
  children.reserve(t.children.size());
  for (const auto& c : t.children) children.push_back(simplify_leaves(c));
  return Tree::internal(t.label, std::move(children));
}

std::set<std::string> word_set(std::string_view value) {
  auto words = split_whitespace(value);
  return {words.begin(), words.end()};
}

bool contains_category(const Tree& t, std::string_view category) {
  if (t.label.category == category) return true;
  return std::any_of(t.children.begin(), t.children.end(),
                     [&](const Tree& c) { return contains_category(c, category); });
}

Tree rewrite_paren_codes(const Tree& t) {
  if (t.is_leaf()) {
    if (t.label.category == "CODE" && t.word == "<paren>") return Tree::leaf(make_label("OPAREN"), "-LRB-");
    if (t.label.category == "CODE" && t.word == "<$$paren>") return Tree::leaf(make_label("CPAREN"), "-RRB-");
    return t;
  }
  std::vector<Tree> children;
  children.reserve(t.children.size());
  for (const auto& c : t.children) children.push_back(rewrite_paren_codes(c));
  return Tree::internal(t.label, std::move(children));
}

// Returns false when removal leaves some node without children.
bool remove_metadata(const Tree& t, const std::set<std::string>& labels, Tree& out) {
  if (t.is_leaf()) {
    out = t;
    return true;
  }
  std::vector<Tree> children;
  for (const auto& c : t.children) {
    if (labels.count(c.label.category)) continue;
    Tree kept;
    if (!remove_metadata(c, labels, kept)) return false;
    children.push_back(std::move(kept));
  }
  if (children.empty()) return false;
  out = Tree::internal(t.label, std::move(children));
  return true;
}

}  // namespace

void TransformConfig::validate() const {
  for (const auto& tag : retained_function_tags) {
    if (excluded_rare_tags.count(tag))
      throw std::invalid_argument("function tag " + tag + " is both retained and excluded");
  }
}

TransformConfig parse_transform_config(std::string_view text) {
  TransformConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "retained_function_tags") cfg.retained_function_tags = word_set(value);
    else if (key == "excluded_rare_tags") cfg.excluded_rare_tags = word_set(value);
    else if (key == "metadata_labels") cfg.metadata_labels = word_set(value);
    else throw std::invalid_argument("unknown transform config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

TransformConfig load_transform_config(const std::string& path) { return parse_transform_config(read_file(path)); }

std::string simplify_complex_tag(std::string_view tag) {
  auto parts = split_on(tag, '+');
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!it->empty()) return *it;
  }
  return std::string(tag);
}

Tree rewrite_segmented(const Tree& t, std::vector<TransformWarning>* warnings) {
  return rewrite_segmented_rec(t, warnings, false);
}

Tree normalize_tags(const Tree& t, std::vector<TransformWarning>* warnings) {
  return rewrite_segmented_rec(simplify_leaves(t), warnings, true);
}

Tree filter_function_tags(const Tree& t, const TransformConfig& cfg) {
  if (t.is_leaf()) return t;
  std::vector<std::string> tags;
  for (const auto& tag : t.label.function_tags) {
    if (cfg.retained_function_tags.count(tag)) tags.push_back(tag);
  }
  std::vector<Tree> children;
  children.reserve(t.children.size());
  for (const auto& c : t.children) children.push_back(filter_function_tags(c, cfg));
  NodeLabel label = tags.size() == t.label.function_tags.size()
                        ? t.label
                        : make_label(t.label.category, std::move(tags), t.label.coindex, t.label.gap_index);
  return Tree::internal(std::move(label), std::move(children));
}

StripResult strip_metadata(std::vector<Sentence> sentences, const TransformConfig& cfg) {
  std::set<std::string> removable = cfg.metadata_labels;
  const bool break_drops = removable.erase("BREAK") > 0;

  StripResult result;
  for (auto& s : sentences) {
    Tree tree = rewrite_paren_codes(s.tree);
    auto drop = [&](std::string_view reason) {
      result.dropped.push_back({std::move(s), std::string(reason)});
    };

    if (tree.label.category == "META") {
      drop(drop_reason::meta_rooted);
      continue;
    }
    if (break_drops && contains_category(tree, "BREAK")) {
      drop(drop_reason::has_break);
      continue;
    }
    Tree cleaned;
    if (removable.count(tree.label.category) || !remove_metadata(tree, removable, cleaned)) {
      drop(drop_reason::ill_formed);
      continue;
    }
    result.kept.push_back(make_sentence(std::move(s.id), std::move(cleaned), s.has_source_id));
  }
  return result;
}

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::dev: return "dev";
    case Partition::test: return "test";
  }
  return "train";
}

Partition partition_of(std::string_view file) {
  std::string base = std::filesystem::path(std::string(file)).filename().string();
  if (!base.empty() && base.front() == 'l') return Partition::dev;
  if (!base.empty() && base.front() == 'e') return Partition::test;
  return Partition::train;
}

std::vector<SplitAssignment> split_corpus(const std::vector<std::string>& files) {
  std::vector<SplitAssignment> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back({partition_of(f), f});
  return out;
}

PartitionStats& SplitStats::operator[](Partition p) {
  switch (p) {
    case Partition::dev: return dev;
    case Partition::test: return test;
    case Partition::train: break;
  }
  return train;
}

SplitStats split_stats(const std::vector<SplitAssignment>& assignments,
                       const std::vector<std::vector<Sentence>>& sentences_per_file) {
  if (assignments.size() != sentences_per_file.size())
    throw std::invalid_argument("split_stats: assignments and sentence lists differ in length");
  SplitStats stats;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    auto& part = stats[assignments[i].partition];
    ++part.files;
    for (const auto& s : sentences_per_file[i]) {
      ++part.sentences;
      part.tokens += s.tokens.size();
    }
  }
  stats.total_tokens = stats.train.tokens + stats.dev.tokens + stats.test.tokens;
  if (stats.total_tokens > 0) {
    for (auto p : {Partition::train, Partition::dev, Partition::test}) {
      stats[p].token_percent = 100.0 * static_cast<double>(stats[p].tokens) / static_cast<double>(stats.total_tokens);
    }
  }
  return stats;
}

}  // namespace ptk
