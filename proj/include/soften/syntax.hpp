#pragma once

// Concrete syntax of diagram files (.lf):
//
//   theory HProd =
//     include HTyped.
//     #keep 1
//     pair : {a, b: tp} tm a -> tm b -> tm (prod a b).
//
//   partial morph TE : HTyped -> STyped =
//     tm := [a: tp] term.
//
//   logrel TP on TE =
//     tm := [a: tp] [x: term] ded (of x a).
//
// Declarations end with '.', comments run from '//' to the end of the line.

#include <cctype>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "soften/error.hpp"
#include "soften/expr.hpp"
#include "soften/modsys.hpp"
#include "soften/print.hpp"

namespace soften {

namespace detail {

enum class TokenKind { identifier, number, symbol, pragma, end };

struct Token {
  TokenKind kind;
  std::string text;
  SourceLocation where;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceLocation here{file_, line_, column_};
      if (pos_ >= text_.size()) {
        out.push_back({TokenKind::end, "", here});
        return out;
      }
      char c = text_[pos_];
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        out.push_back({TokenKind::identifier, std::string(text_.substr(start, pos_ - start)), here});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        out.push_back({TokenKind::number, std::string(text_.substr(start, pos_ - start)), here});
      } else if (c == '#') {
        advance();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        if (start == pos_) throw SyntaxError(here, "expected pragma name after '#'");
        out.push_back({TokenKind::pragma, std::string(text_.substr(start, pos_ - start)), here});
      } else if (starts_with("->") || starts_with(":=")) {
        out.push_back({TokenKind::symbol, std::string(text_.substr(pos_, 2)), here});
        advance();
        advance();
      } else if (std::string_view("{}[]():,.=").find(c) != std::string_view::npos) {
        out.push_back({TokenKind::symbol, std::string(1, c), here});
        advance();
      } else {
        throw SyntaxError(here, std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  static bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      } else if (starts_with("//")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  std::vector<DiagramItem> items() {
    std::vector<DiagramItem> out;
    while (peek().kind != TokenKind::end) out.push_back(item());
    return out;
  }

  Expr standalone_expression(std::vector<std::string> scope) {
    scope_ = std::move(scope);
    Expr e = expression();
    if (peek().kind != TokenKind::end) fail("unexpected '" + peek().text + "' after expression");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  Token next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool is_symbol(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::symbol && peek(ahead).text == s;
  }
  bool is_word(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::identifier && peek(ahead).text == s;
  }

  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(peek().where, message); }

  void expect_symbol(const char* s) {
    if (!is_symbol(s)) fail(std::string("expected '") + s + "'" + found());
    next();
  }
  void expect_word(const char* s) {
    if (!is_word(s)) fail(std::string("expected '") + s + "'" + found());
    next();
  }
  std::string found() const {
    return peek().kind == TokenKind::end ? std::string(", found end of input") : ", found '" + peek().text + "'";
  }

  std::string identifier(const char* what) {
    if (peek().kind != TokenKind::identifier || is_keyword(peek().text)) fail(std::string("expected ") + what + found());
    return next().text;
  }

  bool at_item_start() const {
    return peek().kind == TokenKind::end || is_word("theory") || is_word("morph") || is_word("logrel") ||
           (is_word("partial") && (is_word("morph", 1) || is_word("logrel", 1)));
  }

  DiagramItem item() {
    SourceLocation where = peek().where;
    bool partial = false;
    if (is_word("partial")) {
      next();
      partial = true;
    }
    if (is_word("theory")) {
      if (partial) fail("theories cannot be partial");
      next();
      Theory t;
      t.location = where;
      t.name = identifier("theory name");
      expect_symbol("=");
      t.body = theory_body();
      return t;
    }
    if (is_word("morph")) {
      next();
      Morphism m;
      m.location = where;
      m.partial = partial;
      m.name = identifier("morphism name");
      expect_symbol(":");
      m.domain = identifier("domain theory");
      expect_symbol("->");
      m.codomain = identifier("codomain theory");
      expect_symbol("=");
      m.body = assignment_body();
      return m;
    }
    if (is_word("logrel")) {
      next();
      LogicalRelation r;
      r.location = where;
      r.partial = partial;
      r.name = identifier("relation name");
      expect_word("on");
      r.over = identifier("morphism name");
      expect_symbol("=");
      r.body = assignment_body();
      return r;
    }
    fail("expected 'theory', 'morph' or 'logrel'" + found());
  }

  void end_block() {
    if (is_word("end")) {
      next();
      expect_symbol(".");
    }
  }

  std::vector<TheoryItem> theory_body() {
    std::vector<TheoryItem> body;
    std::vector<Annotation> pending;
    SourceLocation pending_where;
    while (!at_item_start()) {
      if (is_word("end")) {
        end_block();
        break;
      }
      SourceLocation where = peek().where;
      if (peek().kind == TokenKind::pragma) {
        if (pending.empty()) pending_where = where;
        pending.push_back(pragma());
        continue;
      }
      if (is_word("include")) {
        if (!pending.empty()) throw SyntaxError(pending_where, "pragma must precede a declaration");
        next();
        body.push_back(Include{identifier("theory name"), where});
        expect_symbol(".");
        continue;
      }
      Declaration d;
      d.location = where;
      d.name = identifier("declaration");
      expect_symbol(":");
      scope_.clear();
      d.type = expression();
      if (is_symbol(":=")) {
        next();
        d.definiens = expression();
      }
      expect_symbol(".");
      d.annotations = std::move(pending);
      pending.clear();
      body.push_back(std::move(d));
    }
    if (!pending.empty()) throw SyntaxError(pending_where, "pragma must precede a declaration");
    return body;
  }

  Annotation pragma() {
    Token t = next();
    if (t.text == "keep") {
      if (peek().kind != TokenKind::number) fail("expected argument position after #keep");
      std::size_t index = std::stoul(next().text);
      if (index == 0) throw SyntaxError(t.where, "#keep positions start at 1");
      return KeepParam{index};
    }
    if (t.text == "role") return Role{identifier("role tag")};
    throw SyntaxError(t.where, "unknown pragma '#" + t.text + "'");
  }

  std::vector<MorphismItem> assignment_body() {
    std::vector<MorphismItem> body;
    while (!at_item_start()) {
      if (is_word("end")) {
        end_block();
        break;
      }
      SourceLocation where = peek().where;
      if (is_word("include")) {
        next();
        body.push_back(Include{identifier("include target"), where});
        expect_symbol(".");
        continue;
      }
      Assignment a;
      a.location = where;
      a.constant = identifier("constant");
      expect_symbol(":=");
      scope_.clear();
      a.value = expression();
      expect_symbol(".");
      body.push_back(std::move(a));
    }
    return body;
  }

  // expression := binder | operand ['->' expression]
  Expr expression() {
    if (is_symbol("{") || is_symbol("[")) return binder();
    Expr left = application();
    if (is_symbol("->")) {
      next();
      scope_.emplace_back();  // anonymous binder, never resolvable by name
      Expr right = expression();
      scope_.pop_back();
      return pi("", left, right, true);
    }
    return left;
  }

  Expr binder() {
    bool is_pi = is_symbol("{");
    next();
    std::vector<std::string> names{identifier("variable name")};
    while (is_symbol(",")) {
      next();
      names.push_back(identifier("variable name"));
    }
    expect_symbol(":");
    Expr domain = expression();
    expect_symbol(is_pi ? "}" : "]");
    for (const auto& n : names) scope_.push_back(n);
    Expr body = expression();
    scope_.resize(scope_.size() - names.size());
    for (std::size_t i = names.size(); i-- > 0;) {
      Expr dom = shift(domain, static_cast<long>(i));
      body = is_pi ? pi(names[i], dom, body) : lambda(names[i], dom, body);
    }
    return body;
  }

  Expr application() {
    Expr head = atom();
    for (;;) {
      if (is_symbol("{") || is_symbol("[")) return app(head, binder());
      if (!starts_atom()) return head;
      head = app(head, atom());
    }
  }

  bool starts_atom() const {
    if (is_symbol("(")) return true;
    if (peek().kind != TokenKind::identifier) return false;
    const std::string& w = peek().text;
    return w == "type" || w == "kind" || !is_keyword(w);
  }

  Expr atom() {
    if (is_symbol("(")) {
      next();
      Expr e = expression();
      expect_symbol(")");
      return e;
    }
    if (is_word("type")) {
      next();
      return type_sort();
    }
    if (is_word("kind")) {
      next();
      return kind_sort();
    }
    std::string name = identifier("expression");
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == name) return var(scope_.size() - 1 - i);
    }
    return constant(std::move(name));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
};

}  // namespace detail

/// Parses items without resolving references; see parse_diagram.
inline std::vector<DiagramItem> parse_items(std::string_view text, const std::string& file = "<input>") {
  return detail::Parser(detail::Lexer(text, file).run()).items();
}

inline Expr parse_expression(std::string_view text, std::vector<std::string> scope = {}) {
  return detail::Parser(detail::Lexer(text, "<expr>").run()).standalone_expression(std::move(scope));
}

namespace detail {

inline void require_earlier(const Diagram& d, const std::string& name, const SourceLocation& where, const char* what) {
  if (!d.contains(name)) throw SyntaxError(where, std::string("unknown ") + what + " '" + name + "'");
}

inline void validate_references(const Diagram& d, const DiagramItem& item) {
  if (const auto* t = std::get_if<Theory>(&item)) {
    for (const auto& i : t->body) {
      if (const auto* inc = std::get_if<Include>(&i)) {
        if (d.find_theory(inc->target) == nullptr) throw SyntaxError(inc->location, "unknown theory '" + inc->target + "'");
      }
    }
  } else if (const auto* m = std::get_if<Morphism>(&item)) {
    if (d.find_theory(m->domain) == nullptr) throw SyntaxError(m->location, "unknown theory '" + m->domain + "'");
    if (d.find_theory(m->codomain) == nullptr) throw SyntaxError(m->location, "unknown theory '" + m->codomain + "'");
    for (const auto& i : m->body) {
      if (const auto* inc = std::get_if<Include>(&i)) {
        if (d.find_theory(inc->target) == nullptr && d.find_morphism(inc->target) == nullptr) {
          throw SyntaxError(inc->location, "unknown theory or morphism '" + inc->target + "'");
        }
      }
    }
  } else {
    const auto& r = std::get<LogicalRelation>(item);
    if (d.find_morphism(r.over) == nullptr) throw SyntaxError(r.location, "unknown morphism '" + r.over + "'");
    for (const auto& i : r.body) {
      if (const auto* inc = std::get_if<Include>(&i)) require_earlier(d, inc->target, inc->location, "relation");
    }
  }
}

}  // namespace detail

/// Parses `text` and appends its items to `into` (which may already hold a
/// prelude). Names must be fresh and references must point to earlier items.
inline void parse_into(Diagram& into, std::string_view text, const std::string& file = "<input>") {
  for (auto& item : parse_items(text, file)) {
    detail::validate_references(into, item);
    if (into.contains(item_name(item))) {
      throw SyntaxError(item_location(item), "duplicate name '" + item_name(item) + "'");
    }
    into.add(std::move(item));
  }
}

inline Diagram parse_diagram(std::string_view text, const std::string& file = "<input>") {
  Diagram d;
  parse_into(d, text, file);
  return d;
}

namespace detail {

inline void print_annotations(std::ostream& os, const std::vector<Annotation>& annotations) {
  for (const auto& a : annotations) {
    if (const auto* keep = std::get_if<KeepParam>(&a)) {
      os << "  #keep " << keep->index << "\n";
    } else {
      os << "  #role " << std::get<Role>(a).tag << "\n";
    }
  }
}

inline void print_assignments(std::ostream& os, const std::vector<MorphismItem>& body) {
  for (const auto& item : body) {
    if (const auto* inc = std::get_if<Include>(&item)) {
      os << "  include " << inc->target << ".\n";
    } else {
      const auto& a = std::get<Assignment>(item);
      os << "  " << a.constant << " := " << print_expr(a.value) << ".\n";
    }
  }
}

}  // namespace detail

inline std::string print_item(const DiagramItem& item) {
  std::ostringstream os;
  if (const auto* t = std::get_if<Theory>(&item)) {
    os << "theory " << t->name << " =\n";
    for (const auto& i : t->body) {
      if (const auto* inc = std::get_if<Include>(&i)) {
        os << "  include " << inc->target << ".\n";
        continue;
      }
      const auto& d = std::get<Declaration>(i);
      detail::print_annotations(os, d.annotations);
      os << "  " << d.name << " : " << print_expr(d.type);
      if (d.definiens) os << "\n    := " << print_expr(*d.definiens);
      os << ".\n";
    }
  } else if (const auto* m = std::get_if<Morphism>(&item)) {
    os << (m->partial ? "partial " : "") << "morph " << m->name << " : " << m->domain << " -> " << m->codomain
       << " =\n";
    detail::print_assignments(os, m->body);
  } else {
    const auto& r = std::get<LogicalRelation>(item);
    os << (r.partial ? "partial " : "") << "logrel " << r.name << " on " << r.over << " =\n";
    detail::print_assignments(os, r.body);
  }
  return os.str();
}

/// Prints items in order, separated by blank lines. Deterministic.
inline std::string print_items(const std::vector<DiagramItem>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += "\n";
    out += print_item(items[i]);
  }
  return out;
}

inline std::string print_diagram(const Diagram& d) { return print_items(d.items()); }

}  // namespace soften
