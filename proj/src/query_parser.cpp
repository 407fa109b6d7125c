#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "ptk/query.hpp"
#include "ptk/text_util.hpp"

namespace ptk {

namespace {

bool has_lowercase(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); });
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Label patterns

void LabelPattern::add_glob(std::vector<Glob>& out, std::string_view glob) {
  if (glob.empty()) throw QueryError("empty alternative in label pattern");
  for (std::size_t i = 0; i < glob.size(); ++i) {
    char c = glob[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
      throw QueryError("bad character in label glob '" + std::string(glob) + "'");
    if (c == '*' && i + 1 != glob.size())
      throw QueryError("'*' is only allowed at the end of a glob: '" + std::string(glob) + "'");
  }
  Glob g;
  g.prefix = glob.back() == '*';
  g.stem = std::string(g.prefix ? glob.substr(0, glob.size() - 1) : glob);
  out.push_back(std::move(g));
}

LabelPattern LabelPattern::parse(std::string_view text, const std::map<std::string, TagClass>& classes) {
  LabelPattern p;
  p.source_ = std::string(text);
  if (text.empty()) throw QueryError("empty label pattern");

  std::set<std::string> expanding;
  auto expand = [&](auto&& self, std::string_view alt) -> void {
    if (alt.empty()) throw QueryError("empty alternative in label pattern '" + std::string(text) + "'");
    if (!has_lowercase(alt)) {
      add_glob(p.globs_, alt);
      return;
    }
    auto it = classes.find(std::string(alt));
    if (it == classes.end()) throw QueryError("unknown tag class '" + std::string(alt) + "'");
    if (!expanding.insert(it->first).second) throw QueryError("tag class '" + it->first + "' refers to itself");
    for (const auto& m : it->second.members) self(self, m);
    expanding.erase(it->first);
  };
  for (const auto& alt : split_on(text, '|')) expand(expand, alt);
  return p;
}

bool LabelPattern::matches(std::string_view raw) const {
  for (const auto& g : globs_) {
    if (g.prefix ? raw.substr(0, g.stem.size()) == g.stem : raw == g.stem) return true;
  }
  return false;
}

bool label_matches(const NodeLabel& label, std::string_view pattern) {
  return LabelPattern::parse(pattern).matches(label);
}

// ---------------------------------------------------------------------------
// Suite parsing

namespace {

struct Token {
  enum Kind { word, lparen, rparen, colon, end } kind = end;
  std::string text;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      out.push_back({Token::lparen, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::rparen, ")"});
      ++i;
    } else if (c == ':') {
      out.push_back({Token::colon, ":"});
      ++i;
    } else {
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')' &&
             s[j] != ':')
        ++j;
      out.push_back({Token::word, std::string(s.substr(i, j - i))});
      i = j;
    }
  }
  out.push_back({Token::end, ""});
  return out;
}

std::optional<Relation> relation_named(std::string_view w) {
  for (auto r : {Relation::i_dominates, Relation::dominates, Relation::dominates_within_clause, Relation::precedes,
                 Relation::i_precedes, Relation::distinct}) {
    if (to_string(r) == w) return r;
  }
  return std::nullopt;
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words{"and", "or", "not", "exists", "leaf", "is", "anchor", "node",
                                           "def", "query", "rule", "on", "describe"};
  return words;
}

class ExprParser {
 public:
  ExprParser(std::vector<Token> tokens, Query& q, std::vector<std::pair<std::string, int>>& scope,
             const std::map<std::string, TagClass>& classes)
      : toks_(std::move(tokens)), q_(q), scope_(scope), classes_(classes) {}

  QueryExpr parse_all() {
    QueryExpr e = parse_or();
    if (peek().kind != Token::end) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_word(std::string_view w) const { return peek().kind == Token::word && peek().text == w; }
  [[noreturn]] void fail(const std::string& what) const { throw QueryError(what); }

  void expect(Token::Kind k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what + (peek().kind == Token::end ? " at end of condition" : ", got '" + peek().text + "'"));
    take();
  }

  int lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    fail("unbound variable '" + name + "'");
  }

  std::string word(const char* what) {
    if (peek().kind != Token::word) fail(std::string("expected ") + what);
    return take().text;
  }

  QueryExpr parse_or() {
    std::vector<QueryExpr> xs{parse_and()};
    while (at_word("or")) {
      take();
      xs.push_back(parse_and());
    }
    return xs.size() == 1 ? std::move(xs.front()) : QueryExpr::any(std::move(xs));
  }

  QueryExpr parse_and() {
    std::vector<QueryExpr> xs{parse_unary()};
    while (at_word("and")) {
      take();
      xs.push_back(parse_unary());
    }
    return xs.size() == 1 ? std::move(xs.front()) : QueryExpr::all(std::move(xs));
  }

  QueryExpr parse_unary() {
    if (at_word("not")) {
      take();
      return QueryExpr::negate(parse_unary());
    }
    if (at_word("exists")) {
      take();
      std::string name = word("a variable after 'exists'");
      check_new_variable(name);
      expect(Token::colon, "':' after the exists variable");
      LabelPattern pattern = LabelPattern::parse(word("a label pattern"), classes_);
      int slot = q_.slot_count();
      q_.slot_names.push_back(name);
      scope_.emplace_back(name, slot);
      expect(Token::lparen, "'(' to open the exists body");
      QueryExpr body = parse_or();
      expect(Token::rparen, "')'");
      scope_.pop_back();
      return QueryExpr::exists(slot, std::move(pattern), std::move(body));
    }
    if (peek().kind == Token::lparen) {
      take();
      QueryExpr e = parse_or();
      expect(Token::rparen, "')'");
      return e;
    }
    if (at_word("leaf")) {
      take();
      return QueryExpr::leaf(lookup(word("a variable after 'leaf'")));
    }
    std::string lhs = word("a condition");
    int a = lookup(lhs);
    if (at_word("is")) {
      take();
      return QueryExpr::label_is(a, LabelPattern::parse(word("a label pattern after 'is'"), classes_));
    }
    std::string rel = word("a relation");
    auto r = relation_named(rel);
    if (!r) fail("unknown relation '" + rel + "'");
    return QueryExpr::rel(a, *r, lookup(word("a variable after the relation")));
  }

 public:
  void check_new_variable(const std::string& name) const {
    if (!is_identifier(name) || reserved_words().count(name)) fail("bad variable name '" + name + "'");
    for (const auto& [n, slot] : scope_) {
      if (n == name) fail("variable '" + name + "' already bound");
    }
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Query& q_;
  std::vector<std::pair<std::string, int>>& scope_;
  const std::map<std::string, TagClass>& classes_;
};

struct Line {
  std::size_t number;
  std::string text;
};

int paren_balance(std::string_view s) {
  int d = 0;
  for (char c : s) d += c == '(' ? 1 : c == ')' ? -1 : 0;
  return d;
}

class SuiteParser {
 public:
  SuiteParser(std::string_view text, bool require_anchor) : require_anchor_(require_anchor) {
    std::size_t n = 0;
    for (const auto& raw : split_on(text, '\n')) {
      ++n;
      std::string_view s = raw;
      auto hash = s.find('#');
      if (hash != std::string_view::npos) s = s.substr(0, hash);
      if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
      bool indented = !s.empty() && (s[0] == ' ' || s[0] == '\t');
      s = trim(s);
      if (s.empty()) continue;
      lines_.push_back({n, std::string(s)});
      indented_.push_back(indented);
    }
  }

  QuerySuite parse() {
    std::size_t i = 0;
    while (i < lines_.size()) {
      const Line& line = lines_[i];
      try {
        auto words = split_whitespace(line.text);
        if (words[0] == "def") {
          parse_def(line.text);
          ++i;
        } else if (words[0] == "query" || words[0] == "rule") {
          std::size_t end = i + 1;
          while (end < lines_.size() && !is_header(end)) ++end;
          parse_block(i, end);
          i = end;
        } else {
          throw QueryError("expected 'def', 'query' or 'rule'");
        }
      } catch (const QueryError& e) {
        rethrow(e, line.number);
      }
    }
    return std::move(suite_);
  }

 private:
  [[noreturn]] static void rethrow(const QueryError& e, std::size_t line) {
    std::string what = e.what();
    if (what.rfind("line ", 0) == 0) throw e;
    throw QueryError("line " + std::to_string(line) + ": " + what);
  }

  bool is_header(std::size_t i) const {
    if (indented_[i]) return false;
    auto w = split_whitespace(lines_[i].text);
    return w[0] == "def" || w[0] == "query" || w[0] == "rule";
  }

  void parse_def(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw QueryError("expected 'def NAME = PATTERN'");
    std::string name(trim(std::string_view(text).substr(3, eq - 3)));
    std::string body(trim(std::string_view(text).substr(eq + 1)));
    if (!is_identifier(name) || !has_lowercase(name))
      throw QueryError("class name '" + name + "' must be an identifier with a lowercase letter");
    if (classes_.count(name)) throw QueryError("class '" + name + "' defined twice");
    if (body.empty() || body.find_first_of(" \t") != std::string::npos)
      throw QueryError("class '" + name + "' needs a single '|'-separated pattern");
    LabelPattern::parse(body, classes_);  // validates members
    TagClass tc{name, split_on(body, '|')};
    classes_[name] = tc;
    suite_.defs.push_back(std::move(tc));
  }

  void parse_block(std::size_t begin, std::size_t end) {
    Query q;
    const std::string& header = lines_[begin].text;
    auto words = split_whitespace(header);
    q.rule = words[0] == "rule";
    if (words.size() != 4 || words[2] != "on" || words[3].size() < 2 || words[3].back() != ':')
      throw QueryError("expected '" + words[0] + " NAME on PATTERN:'");
    q.name = words[1];
    if (!is_identifier(q.name)) throw QueryError("bad name '" + q.name + "'");
    for (const auto& other : suite_.cascade) {
      if (other.name == q.name) throw QueryError("'" + q.name + "' defined twice");
    }
    q.root_pattern = LabelPattern::parse(std::string_view(words[3]).substr(0, words[3].size() - 1), classes_);

    std::vector<std::pair<std::string, int>> scope{{"root", 0}};
    std::size_t i = begin + 1;
    while (i < end) {
      const Line& line = lines_[i];
      try {
        std::string text = line.text;
        auto w = split_whitespace(text);
        if (w[0] == "describe:" || text.rfind("describe:", 0) == 0) {
          if (!q.description.empty()) throw QueryError("second 'describe:' line");
          q.description = std::string(trim(std::string_view(text).substr(9)));
          ++i;
          continue;
        }
        if (w[0] == "anchor" || w[0] == "node") {
          if (!q.conditions.empty()) throw QueryError("variables must be declared before conditions");
          declare(q, scope, text, w[0] == "anchor");
          ++i;
          continue;
        }
        // Conditions run on while parentheses are open.
        int depth = paren_balance(text);
        while (depth > 0 && i + 1 < end) {
          ++i;
          text += ' ';
          text += lines_[i].text;
          depth += paren_balance(lines_[i].text);
        }
        if (depth != 0) throw QueryError("unbalanced parentheses");
        ExprParser p(lex(text), q, scope, classes_);
        q.conditions.push_back(p.parse_all());
        ++i;
      } catch (const QueryError& e) {
        rethrow(e, line.number);
      }
    }
    if (q.rule) {
      if (q.anchor) throw QueryError("line " + std::to_string(lines_[begin].number) + ": rules take no anchor");
    } else if (require_anchor_ && !q.anchor) {
      throw QueryError("line " + std::to_string(lines_[begin].number) + ": query '" + q.name + "' has no anchor");
    }
    suite_.cascade.push_back(std::move(q));
  }

  void declare(Query& q, std::vector<std::pair<std::string, int>>& scope, const std::string& text, bool anchor) {
    auto toks = lex(text);
    if (toks.size() != 5 || toks[1].kind != Token::word || toks[2].kind != Token::colon || toks[3].kind != Token::word)
      throw QueryError(std::string("expected '") + (anchor ? "anchor" : "node") + " NAME: PATTERN'");
    const std::string& name = toks[1].text;
    ExprParser(std::vector<Token>{}, q, scope, classes_).check_new_variable(name);
    if (anchor && q.anchor) throw QueryError("second anchor");
    int slot = q.slot_count();
    q.slot_names.push_back(name);
    scope.emplace_back(name, slot);
    q.bindings.push_back({slot, LabelPattern::parse(toks[3].text, classes_)});
    if (anchor) q.anchor = slot;
  }

  bool require_anchor_;
  std::vector<Line> lines_;
  std::vector<bool> indented_;
  std::map<std::string, TagClass> classes_;
  QuerySuite suite_;
};

// Rendering ----------------------------------------------------------------

int precedence(const QueryExpr& e) {
  switch (e.kind) {
    case QueryExpr::Kind::any_of: return 1;
    case QueryExpr::Kind::all_of: return 2;
    default: return 3;
  }
}

std::string render_expr(const QueryExpr& e, const Query& q);

std::string render_operand(const QueryExpr& e, const Query& q, int parent_precedence) {
  std::string s = render_expr(e, q);
  return precedence(e) <= parent_precedence ? "(" + s + ")" : s;
}

std::string render_expr(const QueryExpr& e, const Query& q) {
  auto name = [&](int slot) { return q.slot_names[static_cast<std::size_t>(slot)]; };
  switch (e.kind) {
    case QueryExpr::Kind::all_of:
    case QueryExpr::Kind::any_of: {
      const char* op = e.kind == QueryExpr::Kind::all_of ? " and " : " or ";
      std::string out;
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out += op;
        out += render_operand(e.operands[i], q, precedence(e));
      }
      return out;
    }
    case QueryExpr::Kind::negation:
      return "not " + render_operand(e.operands.front(), q, 2);
    case QueryExpr::Kind::exists:
      return "exists " + name(e.var) + ": " + e.pattern.source() + " (" + render_expr(e.operands.front(), q) + ")";
    case QueryExpr::Kind::relation:
      return name(e.lhs) + " " + std::string(to_string(e.relation)) + " " + name(e.rhs);
    case QueryExpr::Kind::label_is:
      return name(e.var) + " is " + e.pattern.source();
    case QueryExpr::Kind::is_leaf:
      return "leaf " + name(e.var);
  }
  return {};
}

}  // namespace

QuerySuite parse_query_suite(std::string_view text, bool require_anchor) {
  return SuiteParser(text, require_anchor).parse();
}

QuerySuite load_query_suite(const std::string& path, bool require_anchor) {
  try {
    return parse_query_suite(read_file(path), require_anchor);
  } catch (const QueryError& e) {
    throw QueryError(path + ": " + e.what());
  }
}

std::string render_query_suite(const QuerySuite& suite) {
  std::ostringstream out;
  for (const auto& d : suite.defs) {
    out << "def " << d.name << " = ";
    for (std::size_t i = 0; i < d.members.size(); ++i) out << (i ? "|" : "") << d.members[i];
    out << '\n';
  }
  for (const auto& q : suite.cascade) {
    out << '\n' << (q.rule ? "rule " : "query ") << q.name << " on " << q.root_pattern.source() << ":\n";
    if (!q.description.empty()) out << "  describe: " << q.description << '\n';
    for (const auto& b : q.bindings) {
      bool anchor = q.anchor && *q.anchor == b.slot;
      out << "  " << (anchor ? "anchor " : "node ") << q.slot_names[static_cast<std::size_t>(b.slot)] << ": "
          << b.pattern.source() << '\n';
    }
    for (const auto& c : q.conditions) out << "  " << render_expr(c, q) << '\n';
  }
  return out.str();
}

}  // namespace ptk
