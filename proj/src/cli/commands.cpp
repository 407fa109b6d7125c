#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptk/cli.hpp"
#include "ptk/eebo.hpp"
#include "ptk/eval.hpp"
#include "ptk/impossible.hpp"
#include "ptk/query.hpp"
#include "ptk/text_util.hpp"
#include "ptk/tokenizer.hpp"
#include "ptk/transform.hpp"
#include "ptk/treebank.hpp"

namespace ptk::cli {

namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Buffers one output and writes it to a file, or to stdout when no path
// (or "-") was given.
class Sink {
 public:
  Sink(std::string path, std::ostream& fallback) : path_(std::move(path)), fallback_(fallback) {}

  std::ostream& stream() { return buf_; }
  bool is_file() const { return !path_.empty() && path_ != "-"; }
  const std::string& path() const { return path_; }

  void commit() {
    if (!is_file()) {
      fallback_ << buf_.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path_);
    f << buf_.str();
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buf_;
};

void finish(RunManifest m, const std::vector<Sink*>& sinks) {
  for (auto* s : sinks) {
    s->commit();
    if (s->is_file()) m.outputs.push_back(s->path());
  }
  m.config_digest = compute_config_digest(m);
  for (auto* s : sinks) {
    if (s->is_file()) write_manifest_for(s->path(), m);
  }
}

RunManifest manifest(std::string sub, std::vector<std::string> inputs, std::vector<std::string> configs,
                     const json& settings) {
  RunManifest m;
  m.subcommand = std::move(sub);
  m.inputs = std::move(inputs);
  for (auto& c : configs) {
    if (!c.empty()) m.configs.push_back(std::move(c));
  }
  m.settings_json = settings.dump();
  return m;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::vector<Sentence> read_corpus(const std::vector<std::string>& files, bool ordinal_ids) {
  std::vector<Sentence> all;
  for (const auto& f : files) {
    auto s = read_tree_file(f);
    all.insert(all.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  if (ordinal_ids) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      all[i].id = std::to_string(i + 1);
      all[i].has_source_id = false;
    }
  }
  return all;
}

// ---------------------------------------------------------------------------
// Suite selection shared by query and score-queries

struct SuiteOptions {
  std::vector<std::string> suite_files;
  std::string builtin = "both";
  std::string order;
  bool loose_adjacency = false;
  bool relaxed_depth = false;
  bool ordinal_ids = false;

  void add_to(CLI::App* app) {
    app->add_option("--suite", suite_files, "Query suite file (repeatable); replaces the built-ins")
        ->check(CLI::ExistingFile);
    app->add_option("--builtin", builtin, "Built-in suites when no --suite is given")
        ->check(CLI::IsMember({"both", "declarative", "question", "none"}));
    app->add_option("--order", order, "Comma-separated cascade order for the queries of one suite");
    app->add_flag("--loose-adjacency", loose_adjacency, "Let iPrecedes mean plain precedence");
    app->add_flag("--relaxed-depth", relaxed_depth, "Evaluate iDominates as dominatesWithinClause");
    app->add_flag("--ordinal-ids", ordinal_ids, "Identify sentences by corpus position instead of ID nodes");
  }

  QueryOptions query_options() const {
    QueryOptions o;
    o.strict_adjacency = !loose_adjacency;
    o.relaxed_depth = relaxed_depth;
    return o;
  }

  std::vector<QuerySuite> load() const {
    std::vector<QuerySuite> suites;
    if (!suite_files.empty()) {
      for (const auto& f : suite_files) suites.push_back(load_query_suite(f));
    } else {
      if (builtin == "both" || builtin == "declarative") suites.push_back(builtin_declarative_suite());
      if (builtin == "both" || builtin == "question") suites.push_back(builtin_question_suite());
    }
    if (order.empty()) return suites;

    std::vector<std::string> names;
    for (auto& n : split_on(order, ',')) {
      auto t = std::string(trim(n));
      if (!t.empty()) names.push_back(t);
    }
    std::vector<bool> used(names.size(), false);
    for (auto& s : suites) {
      std::vector<std::string> mine;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (s.find(names[i])) {
          mine.push_back(names[i]);
          used[i] = true;
        }
      }
      if (mine.empty()) continue;
      try {
        s = s.reordered(mine);
      } catch (const QueryError& e) {
        throw UsageError(std::string("--order: ") + e.what());
      }
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!used[i]) throw UsageError("--order names unknown query '" + names[i] + "'");
    }
    return suites;
  }

  std::vector<std::string> query_order(const std::vector<QuerySuite>& suites) const {
    std::vector<std::string> out;
    for (const auto& s : suites) {
      for (const auto& q : s.cascade) out.push_back(q.name);
    }
    return out;
  }

  json settings() const {
    return {{"suites", suite_files.empty() ? json(builtin) : json(suite_files)},
            {"order", order},
            {"loose_adjacency", loose_adjacency},
            {"relaxed_depth", relaxed_depth},
            {"ordinal_ids", ordinal_ids}};
  }
};

// ---------------------------------------------------------------------------
// Subcommands

struct PrepareCmd {
  std::vector<std::string> inputs;
  std::string output;
  std::string drops;
  std::string config;

  int run(std::ostream& out, std::ostream& err) const {
    TransformConfig cfg = config.empty() ? TransformConfig{} : load_transform_config(config);
    cfg.validate();
    Sink trees(output, out);
    Sink drop_report(drops, err);
    drop_report.stream() << "file\tsentence_id\treason\n";
    bool failed = false;
    std::size_t dropped = 0;
    for (const auto& f : inputs) {
      std::vector<Sentence> sentences;
      try {
        sentences = read_tree_file(f);
      } catch (const ParseError& e) {
        err << f << ": " << e.what() << '\n';
        failed = true;
        continue;
      }
      auto stripped = strip_metadata(std::move(sentences), cfg);
      dropped += stripped.dropped.size();
      for (const auto& d : stripped.dropped) drop_report.stream() << f << '\t' << d.sentence.id << '\t' << d.reason << '\n';
      std::vector<Sentence> prepared;
      for (auto& s : stripped.kept) {
        std::vector<TransformWarning> warnings;
        Tree t = filter_function_tags(normalize_tags(s.tree, &warnings), cfg);
        for (const auto& w : warnings) err << f << ": " << s.id << ": " << w.node << ": " << w.message << '\n';
        prepared.push_back(make_sentence(s.id, std::move(t), s.has_source_id));
      }
      write_sentences(trees.stream(), prepared);
    }
    std::vector<Sink*> sinks{&trees};
    if (!drops.empty() || dropped) sinks.push_back(&drop_report);
    finish(manifest("prepare", inputs, {config}, {{"order", "metadata,tags,function-tags"}}), sinks);
    return failed ? 2 : 0;
  }
};

struct SplitCmd {
  std::vector<std::string> files;
  std::string output;
  std::string stats;

  int run(std::ostream& out, std::ostream&) const {
    auto assignments = split_corpus(files);
    Sink table(output, out);
    table.stream() << "partition\tfile\n";
    for (const auto& a : assignments) table.stream() << to_string(a.partition) << '\t' << a.file << '\n';
    std::vector<Sink*> sinks{&table};
    Sink stats_sink(stats, out);
    if (!stats.empty()) {
      std::vector<std::vector<Sentence>> per_file;
      for (const auto& f : files) per_file.push_back(read_tree_file(f));
      auto st = split_stats(assignments, per_file);
      auto& s = stats_sink.stream();
      s << "partition\tfiles\tsentences\ttokens\ttoken_percent\n";
      for (auto p : {Partition::train, Partition::dev, Partition::test}) {
        const auto& ps = st[p];
        char pct[32];
        std::snprintf(pct, sizeof pct, "%.2f", ps.token_percent);
        s << to_string(p) << '\t' << ps.files << '\t' << ps.sentences << '\t' << ps.tokens << '\t' << pct << '\n';
      }
      sinks.push_back(&stats_sink);
    }
    finish(manifest("split", files, {}, json::object()), sinks);
    return 0;
  }
};

struct TokenizerFlags {
  std::string abbreviations;
  bool keep_th = false;
  bool split_its = false;
  bool no_j_variant = false;

  void add_to(CLI::App* app) {
    app->add_option("--abbreviations", abbreviations, "Abbreviation list, one per line (replaces the defaults)")
        ->check(CLI::ExistingFile);
    app->add_flag("--keep-th", keep_th, "Do not split a th' prefix");
    app->add_flag("--split-its", split_its, "Split its as it + s");
    app->add_flag("--no-j-variant", no_j_variant, "Do not accept j-final Roman numeral groups");
  }

  TokenizerConfig config() const {
    TokenizerConfig cfg;
    if (!abbreviations.empty()) cfg.abbreviations = load_abbreviations(abbreviations);
    cfg.split_th_apostrophe = !keep_th;
    cfg.its_one_token = !split_its;
    cfg.roman_numeral_j_variant = !no_j_variant;
    cfg.validate();
    return cfg;
  }

  json settings() const {
    return {{"keep_th", keep_th}, {"split_its", split_its}, {"no_j_variant", no_j_variant}};
  }
};

struct TokenizeCmd {
  std::string input = "-";
  std::string output;
  bool one_per_line = false;
  TokenizerFlags flags;

  int run(std::ostream& out, std::ostream&) const {
    const auto cfg = flags.config();
    std::string text;
    if (input == "-") {
      std::ostringstream buf;
      buf << std::cin.rdbuf();
      text = buf.str();
    } else {
      text = read_file(input);
    }
    Sink sink(output, out);
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      auto tokens = tokenize(line, cfg).tokens;
      if (one_per_line) {
        for (const auto& t : tokens) sink.stream() << t << '\n';
        sink.stream() << '\n';
      } else {
        for (std::size_t i = 0; i < tokens.size(); ++i) sink.stream() << (i ? " " : "") << tokens[i];
        sink.stream() << '\n';
      }
    }
    auto settings = flags.settings();
    settings["one_per_line"] = one_per_line;
    finish(manifest("tokenize", {input}, {flags.abbreviations}, settings), {&sink});
    return 0;
  }
};

std::string tsv_field(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct ExtractCmd {
  std::vector<std::string> inputs;
  std::string output;
  std::string config;
  std::string documents;
  std::string char_table;

  int run(std::ostream& out, std::ostream&) const {
    ExtractionConfig cfg = config.empty() ? ExtractionConfig{} : load_extraction_config(config);
    cfg.validate();
    Sink paragraphs(output, out);
    Sink docs(documents, out);
    Sink table_sink(char_table, out);
    paragraphs.stream() << "doc_id\tparagraph\ttext\n";
    docs.stream() << "doc_id\ttitle\tauthor\tdate\tparagraphs\n";
    CharFrequencyTable table;
    for (const auto& f : inputs) {
      Document d;
      try {
        d = extract_document(read_file(f), cfg, stem_of(f));
      } catch (const XmlError& e) {
        throw XmlError(f + ": " + e.what(), e.line(), e.column());
      }
      for (std::size_t i = 0; i < d.paragraphs.size(); ++i)
        paragraphs.stream() << d.id << '\t' << i + 1 << '\t' << tsv_field(d.paragraphs[i]) << '\n';
      docs.stream() << d.id << '\t' << tsv_field(d.title) << '\t' << tsv_field(d.author) << '\t'
                    << tsv_field(d.date) << '\t' << d.paragraphs.size() << '\n';
      table.add_document(d);
    }
    write_char_table(table_sink.stream(), table);
    std::vector<Sink*> sinks{&paragraphs};
    if (!documents.empty()) sinks.push_back(&docs);
    if (!char_table.empty()) sinks.push_back(&table_sink);
    finish(manifest("extract", inputs, {config}, json::object()), sinks);
    return 0;
  }
};

struct SegmentCmd {
  std::vector<std::string> inputs;
  std::string output;
  std::string config;
  std::string exclusions;
  std::string char_table_in;
  std::string char_table_out;
  bool per_file = false;
  std::uint64_t rare_threshold = 0;
  std::size_t max_tokens = 0;
  TokenizerFlags flags;

  int run(std::ostream& out, std::ostream&) const {
    ExtractionConfig cfg = config.empty() ? ExtractionConfig{} : load_extraction_config(config);
    if (rare_threshold) cfg.rare_char_threshold = rare_threshold;
    if (max_tokens) cfg.max_sentence_tokens = max_tokens;
    cfg.validate();
    const auto tokcfg = flags.config();

    std::vector<Document> docs;
    for (const auto& f : inputs) {
      try {
        docs.push_back(extract_document(read_file(f), cfg, stem_of(f)));
      } catch (const XmlError& e) {
        throw XmlError(f + ": " + e.what(), e.line(), e.column());
      }
    }

    // Pass 1: corpus-wide character counts, unless supplied.
    CharFrequencyTable corpus_table;
    if (!char_table_in.empty()) {
      std::ifstream in(char_table_in, std::ios::binary);
      if (!in) throw UsageError("cannot open " + char_table_in);
      corpus_table = read_char_table(in);
    } else if (!per_file) {
      corpus_table = build_char_table(docs);
    }

    Sink sentences(output, out);
    Sink excl(exclusions, out);
    Sink table_sink(char_table_out, out);
    excl.stream() << "doc_id\tsentence_id\treason\ttokens\n";
    std::size_t kept = 0, too_long = 0, rare = 0;
    for (const auto& d : docs) {
      const CharFrequencyTable table = per_file && char_table_in.empty() ? build_char_table({d}) : corpus_table;
      auto r = segment_sentences(d, table, cfg, tokcfg);
      for (const auto& s : r.kept) {
        for (std::size_t i = 0; i < s.tokens.size(); ++i) sentences.stream() << (i ? " " : "") << s.tokens[i];
        sentences.stream() << '\n';
      }
      for (const auto& e : r.excluded) {
        excl.stream() << d.id << '\t' << e.id << '\t' << to_string(e.reason) << '\t' << e.tokens.size() << '\n';
        ++(e.reason == ExclusionReason::too_long ? too_long : rare);
      }
      kept += r.kept.size();
    }
    write_char_table(table_sink.stream(), corpus_table);
    std::vector<Sink*> sinks{&sentences};
    if (!exclusions.empty()) sinks.push_back(&excl);
    if (!char_table_out.empty()) sinks.push_back(&table_sink);
    auto settings = flags.settings();
    settings["per_file"] = per_file;
    settings["rare_char_threshold"] = cfg.rare_char_threshold;
    settings["max_sentence_tokens"] = cfg.max_sentence_tokens;
    finish(manifest("segment", inputs, {config, flags.abbreviations, char_table_in}, settings), sinks);
    if (sentences.is_file()) {
      out << "kept " << kept << ", excluded rare_char " << rare << ", excluded too_long " << too_long << '\n';
    }
    return 0;
  }
};

struct QueryCmd {
  std::vector<std::string> inputs;
  std::string output;
  bool print_suite = false;
  SuiteOptions suites;

  int run(std::ostream& out, std::ostream&) const {
    auto loaded = suites.load();
    if (print_suite) {
      for (std::size_t i = 0; i < loaded.size(); ++i) out << (i ? "\n" : "") << render_query_suite(loaded[i]);
      return 0;
    }
    if (inputs.empty()) throw UsageError("query: no tree files given");
    auto corpus = read_corpus(inputs, suites.ordinal_ids);
    auto hits = run_suites(loaded, corpus, suites.query_options());
    Sink sink(output, out);
    write_hits(sink.stream(), hits);
    finish(manifest("query", inputs, suites.suite_files, suites.settings()), {&sink});
    return 0;
  }
};

struct ScoreTreesCmd {
  std::string name;
  std::string gold;
  std::string pred;
  std::string output;
  std::string params;
  bool tsv = false;

  int run(std::ostream& out, std::ostream& err) const {
    EvalParams p = params.empty() ? EvalParams{} : load_eval_params(params);
    auto g = read_tree_file(gold);
    auto pr = read_tree_file(pred);
    Sink sink(output, out);
    if (name == "score-brackets") {
      auto score = score_bracket_corpus(g, pr, p);
      tsv ? write_bracket_report_tsv(sink.stream(), score) : write_bracket_report(sink.stream(), score);
      if (tsv) {
        for (const auto& s : score.skipped) err << "skipped " << s.gold_id << ": " << s.reason << '\n';
      }
    } else {
      auto score = score_function_tag_corpus(g, pr, p);
      tsv ? write_ftag_report_tsv(sink.stream(), score) : write_ftag_report(sink.stream(), score);
      if (tsv) {
        for (const auto& s : score.skipped) err << "skipped " << s.gold_id << ": " << s.reason << '\n';
      }
    }
    finish(manifest(name, {gold, pred}, {params}, {{"tsv", tsv}}), {&sink});
    return 0;
  }
};

struct ScoreQueriesCmd {
  std::string gold_hits;
  std::string pred_hits;
  std::vector<std::string> gold_trees;
  std::vector<std::string> pred_trees;
  std::string output;
  std::string gold_hits_out;
  std::string pred_hits_out;
  bool tsv = false;
  SuiteOptions suites;

  static std::vector<HitRecord> load_hits(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    return read_hits(in);
  }

  int run(std::ostream& out, std::ostream& err) const {
    const bool by_hits = !gold_hits.empty() || !pred_hits.empty();
    const bool by_trees = !gold_trees.empty() || !pred_trees.empty();
    if (by_hits == by_trees)
      throw UsageError("score-queries: give either --gold-hits/--pred-hits or --gold-trees/--pred-trees");

    std::vector<HitRecord> g, p;
    std::vector<std::string> order;
    std::vector<std::string> inputs;
    Sink gold_sink(gold_hits_out, out);
    Sink pred_sink(pred_hits_out, out);
    std::vector<Sink*> extra;
    if (by_hits) {
      if (gold_hits.empty() || pred_hits.empty()) throw UsageError("score-queries: both hit files are required");
      g = load_hits(gold_hits);
      p = load_hits(pred_hits);
      inputs = {gold_hits, pred_hits};
      if (!suites.order.empty()) {
        for (auto& n : split_on(suites.order, ',')) order.emplace_back(trim(n));
      }
    } else {
      if (gold_trees.empty() || pred_trees.empty()) throw UsageError("score-queries: both tree sets are required");
      auto loaded = suites.load();
      order = suites.query_order(loaded);
      auto gc = read_corpus(gold_trees, suites.ordinal_ids);
      auto pc = read_corpus(pred_trees, suites.ordinal_ids);
      pair_sentences(gc, pc);  // throws on a sentence-set mismatch
      g = run_suites(loaded, gc, suites.query_options());
      p = run_suites(loaded, pc, suites.query_options());
      inputs = gold_trees;
      inputs.insert(inputs.end(), pred_trees.begin(), pred_trees.end());
      if (!gold_hits_out.empty()) {
        write_hits(gold_sink.stream(), g);
        extra.push_back(&gold_sink);
      }
      if (!pred_hits_out.empty()) {
        write_hits(pred_sink.stream(), p);
        extra.push_back(&pred_sink);
      }
    }
    auto diff = diff_query_hits(g, p, order);
    Sink sink(output, out);
    tsv ? write_query_report_tsv(sink.stream(), diff) : write_query_report(sink.stream(), diff);
    if (tsv) {
      for (const auto& w : diff.warnings) err << "warning: " << w << '\n';
    }
    auto settings = suites.settings();
    settings["tsv"] = tsv;
    std::vector<Sink*> sinks{&sink};
    sinks.insert(sinks.end(), extra.begin(), extra.end());
    finish(manifest("score-queries", inputs, suites.suite_files, settings), sinks);
    return 0;
  }
};

struct ScanCmd {
  std::vector<std::string> inputs;
  std::string output;
  std::string rules_file;
  std::string summary;
  bool print_rules = false;
  bool relaxed_depth = false;

  int run(std::ostream& out, std::ostream& err) const {
    auto rules = rules_file.empty() ? builtin_impossible_rules() : load_structure_rules(rules_file);
    if (print_rules) {
      out << (rules_file.empty() ? std::string(builtin_impossible_rules_text()) : read_file(rules_file));
      return 0;
    }
    if (inputs.empty()) throw UsageError("scan-impossible: no tree files given");
    QueryOptions opts;
    opts.relaxed_depth = relaxed_depth;
    auto reports = scan(read_corpus(inputs, false), rules, opts);
    Sink sink(output, out);
    Sink summary_sink(summary, err);
    write_structure_reports(sink.stream(), reports);
    write_structure_summary(summary_sink.stream(), summarize(reports, rules));
    std::vector<Sink*> sinks{&sink, &summary_sink};
    finish(manifest("scan-impossible", inputs, {rules_file}, {{"relaxed_depth", relaxed_depth}}), sinks);
    return 0;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Treebank preparation, querying and evaluation for Penn-style historical corpora", "ptk"};
  app.set_version_flag("--version", std::string(tool_version));
  app.require_subcommand(1);

  PrepareCmd prepare;
  auto* sc = app.add_subcommand("prepare",
                                "Normalize trees: metadata removal, then POS tag normalization, then "
                                "function tag filtering");
  sc->add_option("inputs", prepare.inputs, "Tree files")->required()->check(CLI::ExistingFile);
  sc->add_option("-o,--output", prepare.output, "Output tree file (default stdout)");
  sc->add_option("--drops", prepare.drops, "Drop report TSV (default stderr)");
  sc->add_option("--config", prepare.config, "Transform config (key = value)")->check(CLI::ExistingFile);

  SplitCmd split;
  sc = app.add_subcommand("split", "Assign tree files to train/dev/test by file name");
  sc->add_option("files", split.files, "Tree files")->required();
  sc->add_option("-o,--output", split.output, "Assignment TSV (default stdout)");
  sc->add_option("--stats", split.stats, "Write per-partition statistics TSV (reads the files)");

  TokenizeCmd tok;
  sc = app.add_subcommand("tokenize", "Tokenize plain text, one segment per line");
  sc->add_option("input", tok.input, "Text file, or - for stdin");
  sc->add_option("-o,--output", tok.output, "Output file (default stdout)");
  sc->add_flag("--one-per-line", tok.one_per_line, "One token per line, blank line between segments");
  tok.flags.add_to(sc);

  ExtractCmd extract;
  sc = app.add_subcommand("extract", "Extract paragraph text and header fields from XML documents");
  sc->add_option("inputs", extract.inputs, "XML files")->required()->check(CLI::ExistingFile);
  sc->add_option("-o,--output", extract.output, "Paragraph TSV (default stdout)");
  sc->add_option("--config", extract.config, "Extraction config (key = value)")->check(CLI::ExistingFile);
  sc->add_option("--documents", extract.documents, "Document header TSV");
  sc->add_option("--char-table", extract.char_table, "Character frequency TSV");

  SegmentCmd segment;
  sc = app.add_subcommand("segment", "Extract, tokenize, sentence-split and filter XML documents");
  sc->add_option("inputs", segment.inputs, "XML files")->required()->check(CLI::ExistingFile);
  sc->add_option("-o,--output", segment.output, "Sentences, one per line (default stdout)");
  sc->add_option("--config", segment.config, "Extraction config (key = value)")->check(CLI::ExistingFile);
  sc->add_option("--exclusions", segment.exclusions, "Exclusion report TSV");
  sc->add_option("--char-table", segment.char_table_in, "Precomputed character frequency TSV")
      ->check(CLI::ExistingFile);
  sc->add_option("--write-char-table", segment.char_table_out, "Write the corpus character table");
  sc->add_flag("--per-file", segment.per_file, "Count characters per document instead of corpus-wide");
  sc->add_option("--rare-threshold", segment.rare_threshold, "Override the rare character threshold")
      ->check(CLI::PositiveNumber);
  sc->add_option("--max-tokens", segment.max_tokens, "Override the sentence length limit")
      ->check(CLI::PositiveNumber);
  segment.flags.add_to(sc);

  QueryCmd query;
  sc = app.add_subcommand("query", "Run query cascades over trees and write hits");
  sc->add_option("inputs", query.inputs, "Tree files")->check(CLI::ExistingFile);
  sc->add_option("-o,--output", query.output, "Hit TSV (default stdout)");
  sc->add_flag("--print-suite", query.print_suite, "Print the selected suites and exit");
  query.suites.add_to(sc);

  ScoreTreesCmd brackets;
  brackets.name = "score-brackets";
  sc = app.add_subcommand("score-brackets", "Labeled bracket precision/recall/F1");
  sc->add_option("gold", brackets.gold, "Gold tree file")->required()->check(CLI::ExistingFile);
  sc->add_option("pred", brackets.pred, "Predicted tree file")->required()->check(CLI::ExistingFile);
  sc->add_option("-o,--output", brackets.output, "Report (default stdout)");
  sc->add_option("--params", brackets.params, "Evaluation parameter file")->check(CLI::ExistingFile);
  sc->add_flag("--tsv", brackets.tsv, "Per-sentence TSV instead of the summary");

  ScoreTreesCmd ftags;
  ftags.name = "score-ftags";
  sc = app.add_subcommand("score-ftags", "Function tag scores on brackets matched by bare label and span");
  sc->add_option("gold", ftags.gold, "Gold tree file")->required()->check(CLI::ExistingFile);
  sc->add_option("pred", ftags.pred, "Predicted tree file")->required()->check(CLI::ExistingFile);
  sc->add_option("-o,--output", ftags.output, "Report (default stdout)");
  sc->add_option("--params", ftags.params, "Evaluation parameter file")->check(CLI::ExistingFile);
  sc->add_flag("--tsv", ftags.tsv, "TSV instead of the table");

  ScoreQueriesCmd sq;
  sc = app.add_subcommand("score-queries", "Compare gold and predicted query hits");
  sc->add_option("--gold-hits", sq.gold_hits, "Gold hit TSV")->check(CLI::ExistingFile);
  sc->add_option("--pred-hits", sq.pred_hits, "Predicted hit TSV")->check(CLI::ExistingFile);
  sc->add_option("--gold-trees", sq.gold_trees, "Gold tree files")->check(CLI::ExistingFile);
  sc->add_option("--pred-trees", sq.pred_trees, "Predicted tree files")->check(CLI::ExistingFile);
  sc->add_option("--write-gold-hits", sq.gold_hits_out, "Also write the gold hits (tree mode)");
  sc->add_option("--write-pred-hits", sq.pred_hits_out, "Also write the predicted hits (tree mode)");
  sc->add_option("-o,--output", sq.output, "Report (default stdout)");
  sc->add_flag("--tsv", sq.tsv, "TSV instead of the table");
  sq.suites.add_to(sc);

  ScanCmd scan_cmd;
  sc = app.add_subcommand("scan-impossible", "Report structures that should not occur in parser output");
  sc->add_option("inputs", scan_cmd.inputs, "Tree files")->check(CLI::ExistingFile);
  sc->add_option("-o,--output", scan_cmd.output, "Report TSV (default stdout)");
  sc->add_option("--rules", scan_cmd.rules_file, "Rule file (query suite format)")->check(CLI::ExistingFile);
  sc->add_option("--summary", scan_cmd.summary, "Per-rule counts (default stderr)");
  sc->add_flag("--print-rules", scan_cmd.print_rules, "Print the rules and exit");
  sc->add_flag("--relaxed-depth", scan_cmd.relaxed_depth, "Evaluate iDominates as dominatesWithinClause");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    app.exit(e, out, err);
    return 1;
  }

  auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    if (name == "prepare") return prepare.run(out, err);
    if (name == "split") return split.run(out, err);
    if (name == "tokenize") return tok.run(out, err);
    if (name == "extract") return extract.run(out, err);
    if (name == "segment") return segment.run(out, err);
    if (name == "query") return query.run(out, err);
    if (name == "score-brackets") return brackets.run(out, err);
    if (name == "score-ftags") return ftags.run(out, err);
    if (name == "score-queries") return sq.run(out, err);
    if (name == "scan-impossible") return scan_cmd.run(out, err);
  } catch (const UsageError& e) {
    err << "ptk " << name << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "ptk " << name << ": " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace ptk::cli
