#pragma once

// The line-oriented theory DSL:
//
//   theory NAME              (or: classical theory NAME)
//   sort S
//   func f : S1 S2 -> S3     (constants: func e : -> S)
//   rel  R : S1 S2
//   axiom [x:S, y:T] LHS |- RHS
//
// Formula syntax: true/top, false/bot, t = t, R(t,...), /\, \/,
// exists x:S. F, and (classical theories only) not F.
// '#' starts a comment. Errors carry line and column.

#include <cctype>
#include <fstream>

#include "cohspec/logic.hpp"

namespace cohspec {

struct DslError : Error {
  int line, col;
  DslError(int line_, int col_, const std::string& m)
      : Error("line " + std::to_string(line_) + ":" + std::to_string(col_) +
              ": " + m),
        line(line_),
        col(col_) {}
};

namespace dsl {

struct Token {
  enum Kind { Ident, Punct, End } kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  Lexer(const std::string& text, int line) : s_(text), line_(line) {}

  Token peek() {
    if (!have_) {
      tok_ = lex();
      have_ = true;
    }
    return tok_;
  }
  Token next() {
    Token t = peek();
    have_ = false;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& m) const {
    throw DslError(t.line, t.col, m);
  }

 private:
  Token lex() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    int col = static_cast<int>(i_) + 1;
    if (i_ >= s_.size() || s_[i_] == '#') return {Token::End, "", line_, col};
    char c = s_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' ||
              s_[j] == '\''))
        ++j;
      Token t{Token::Ident, s_.substr(i_, j - i_), line_, col};
      i_ = j;
      return t;
    }
    static const char* puncts[] = {"|-", "->", "/\\", "\\/", "(", ")", "[",
                                   "]",  ":",  ",",   "=",  "."};
    for (const char* p : puncts) {
      size_t n = std::string(p).size();
      if (s_.compare(i_, n, p) == 0) {
        Token t{Token::Punct, p, line_, col};
        i_ += n;
        return t;
      }
    }
    throw DslError(line_, col, std::string("unexpected character '") + c + "'");
  }

  std::string s_;
  size_t i_ = 0;
  int line_;
  Token tok_;
  bool have_ = false;
};

class FormulaParser {
 public:
  FormulaParser(Lexer& lx, const Signature& sig, bool classical)
      : lx_(lx), sig_(sig), classical_(classical) {}

  // F := exists x:S. F | F1 ;  F1 := F2 (\/ F2)* ;  F2 := F3 (/\ F3)*
  Formula parse(const Context& ctx) {
    Token t = lx_.peek();
    if (t.kind == Token::Ident && t.text == "exists") {
      lx_.next();
      Token v = expect_ident("bound variable");
      expect_punct(":");
      Token s = expect_ident("sort");
      if (!sig_.has_sort(s.text)) lx_.fail(s, "undeclared sort '" + s.text + "'");
      expect_punct(".");
      if (ctx.index_of(v.text))
        lx_.fail(v, "bound variable '" + v.text + "' shadows the context");
      Formula body = parse(ctx.extended(v.text, s.text));
      return Formula::exists(body);
    }
    return parse_or(ctx);
  }

 private:
  Formula parse_or(const Context& ctx) {
    Formula f = parse_and(ctx);
    while (lx_.peek().kind == Token::Punct && lx_.peek().text == "\\/") {
      lx_.next();
      f = Formula::disj(f, parse_and(ctx));
    }
    return f;
  }
  Formula parse_and(const Context& ctx) {
    Formula f = parse_atomic(ctx);
    while (lx_.peek().kind == Token::Punct && lx_.peek().text == "/\\") {
      lx_.next();
      f = Formula::conj(f, parse_atomic(ctx));
    }
    return f;
  }
  Formula parse_atomic(const Context& ctx) {
    Token t = lx_.peek();
    if (t.kind == Token::Punct && t.text == "(") {
      lx_.next();
      Formula f = parse(ctx);
      expect_punct(")");
      return f;
    }
    if (t.kind == Token::Ident) {
      if (t.text == "true" || t.text == "top") {
        lx_.next();
        return Formula::truth(ctx);
      }
      if (t.text == "false" || t.text == "bot") {
        lx_.next();
        return Formula::falsity(ctx);
      }
      if (t.text == "not") {
        lx_.next();
        if (!classical_) lx_.fail(t, "classical connective in coherent theory");
        return Formula::neg(parse_atomic(ctx));
      }
      if (t.text == "exists") return parse(ctx);
      if (sig_.rel(t.text)) {
        lx_.next();
        expect_punct("(");
        std::vector<Term> args = parse_term_list(ctx);
        expect_punct(")");
        try {
          return Formula::rel(sig_, ctx, t.text, std::move(args));
        } catch (const Error& e) {
          lx_.fail(t, e.what());
        }
      }
    }
    // term = term
    Token at = t;
    Term l = parse_term(ctx);
    expect_punct("=");
    Term r = parse_term(ctx);
    try {
      return Formula::eq(sig_, ctx, std::move(l), std::move(r));
    } catch (const Error& e) {
      lx_.fail(at, e.what());
    }
  }

  std::vector<Term> parse_term_list(const Context& ctx) {
    std::vector<Term> ts;
    ts.push_back(parse_term(ctx));
    while (lx_.peek().kind == Token::Punct && lx_.peek().text == ",") {
      lx_.next();
      ts.push_back(parse_term(ctx));
    }
    return ts;
  }

  Term parse_term(const Context& ctx) {
    Token t = expect_ident("term");
    if (auto ix = ctx.index_of(t.text))
      return Term::variable(static_cast<int>(*ix));
    const FuncSym* f = sig_.func(t.text);
    if (!f) lx_.fail(t, "unknown identifier '" + t.text + "'");
    std::vector<Term> args;
    if (lx_.peek().kind == Token::Punct && lx_.peek().text == "(") {
      lx_.next();
      if (!(lx_.peek().kind == Token::Punct && lx_.peek().text == ")"))
        args = parse_term_list(ctx);
      expect_punct(")");
    }
    if (args.size() != f->args.size())
      lx_.fail(t, "arity mismatch for '" + t.text + "'");
    return Term::apply(t.text, std::move(args));
  }

  Token expect_ident(const std::string& what) {
    Token t = lx_.next();
    if (t.kind != Token::Ident) lx_.fail(t, "expected " + what);
    return t;
  }
  void expect_punct(const std::string& p) {
    Token t = lx_.next();
    if (t.kind != Token::Punct || t.text != p) lx_.fail(t, "expected '" + p + "'");
  }

  Lexer& lx_;
  const Signature& sig_;
  bool classical_;
};

inline Context parse_context(Lexer& lx, const Signature& sig) {
  Context ctx;
  Token t = lx.next();
  if (t.kind != Token::Punct || t.text != "[")
    lx.fail(t, "expected context '[x:S, ...]'");
  if (lx.peek().kind == Token::Punct && lx.peek().text == "]") {
    lx.next();
    return ctx;
  }
  while (true) {
    Token v = lx.next();
    if (v.kind != Token::Ident) lx.fail(v, "expected variable name");
    Token c = lx.next();
    if (c.kind != Token::Punct || c.text != ":") lx.fail(c, "expected ':'");
    Token s = lx.next();
    if (s.kind != Token::Ident) lx.fail(s, "expected sort name");
    if (!sig.has_sort(s.text)) lx.fail(s, "undeclared sort '" + s.text + "'");
    if (ctx.index_of(v.text)) lx.fail(v, "duplicate variable '" + v.text + "'");
    ctx.push(v.text, s.text);
    Token d = lx.next();
    if (d.kind == Token::Punct && d.text == "]") break;
    if (!(d.kind == Token::Punct && d.text == ",")) lx.fail(d, "expected ',' or ']'");
  }
  return ctx;
}

}  // namespace dsl

inline Theory parse_theory(const std::string& text) {
  Theory th;
  bool have_header = false;
  std::istringstream in(text);
  std::string linetext;
  int lineno = 0;
  while (std::getline(in, linetext)) {
    ++lineno;
    dsl::Lexer lx(linetext, lineno);
    dsl::Token t = lx.peek();
    if (t.kind == dsl::Token::End) continue;
    if (t.kind != dsl::Token::Ident) lx.fail(t, "expected a declaration");
    lx.next();
    if (!have_header) {
      bool classical = false;
      if (t.text == "classical") {
        classical = true;
        t = lx.next();
        if (!(t.kind == dsl::Token::Ident && t.text == "theory"))
          lx.fail(t, "expected 'theory'");
      } else if (t.text != "theory") {
        lx.fail(t, "file must start with 'theory NAME'");
      }
      dsl::Token n = lx.next();
      if (n.kind != dsl::Token::Ident) lx.fail(n, "expected theory name");
      th.name = n.text;
      th.classical = classical;
      have_header = true;
      continue;
    }
    if (t.text == "sort") {
      dsl::Token n = lx.next();
      if (n.kind != dsl::Token::Ident) lx.fail(n, "expected sort name");
      if (th.sig.has_sort(n.text)) lx.fail(n, "duplicate sort '" + n.text + "'");
      th.sig.add_sort(n.text);
    } else if (t.text == "func" || t.text == "rel") {
      dsl::Token n = lx.next();
      if (n.kind != dsl::Token::Ident) lx.fail(n, "expected symbol name");
      if (th.sig.has_symbol(n.text)) lx.fail(n, "duplicate symbol '" + n.text + "'");
      dsl::Token c = lx.next();
      if (!(c.kind == dsl::Token::Punct && c.text == ":")) lx.fail(c, "expected ':'");
      std::vector<Sort> args;
      while (lx.peek().kind == dsl::Token::Ident) {
        dsl::Token s = lx.next();
        if (!th.sig.has_sort(s.text)) lx.fail(s, "undeclared sort '" + s.text + "'");
        args.push_back(s.text);
      }
      if (t.text == "func") {
        dsl::Token a = lx.next();
        if (!(a.kind == dsl::Token::Punct && a.text == "->"))
          lx.fail(a, "expected '->'");
        dsl::Token s = lx.next();
        if (s.kind != dsl::Token::Ident || !th.sig.has_sort(s.text))
          lx.fail(s, "expected result sort");
        th.sig.add_func(n.text, args, s.text);
      } else {
        th.sig.add_rel(n.text, args);
      }
    } else if (t.text == "axiom") {
      Context ctx = dsl::parse_context(lx, th.sig);
      dsl::FormulaParser fp(lx, th.sig, th.classical);
      Formula lhs = fp.parse(ctx);
      dsl::Token bar = lx.next();
      if (!(bar.kind == dsl::Token::Punct && bar.text == "|-"))
        lx.fail(bar, "expected '|-'");
      Formula rhs = fp.parse(ctx);
      dsl::Token e = lx.next();
      if (e.kind != dsl::Token::End) lx.fail(e, "trailing input after axiom");
      th.axioms.push_back(Sequent{ctx, lhs, rhs});
    } else {
      lx.fail(t, "unknown declaration '" + t.text + "'");
    }
  }
  if (!have_header) throw DslError(1, 1, "empty theory file");
  return th;
}

inline Theory parse_theory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_theory(ss.str());
}

// Formula in a given context, e.g. for --formula "[x:G] mul(x,x) = e".
inline Formula parse_formula_in_context(const Theory& th, const std::string& text) {
  dsl::Lexer lx(text, 1);
  Context ctx = dsl::parse_context(lx, th.sig);
  dsl::FormulaParser fp(lx, th.sig, th.classical);
  Formula f = fp.parse(ctx);
  dsl::Token e = lx.next();
  if (e.kind != dsl::Token::End) lx.fail(e, "trailing input after formula");
  return f;
}

// Formula in an externally supplied context (interpretation images).
inline Formula parse_formula_with_context(const Theory& th, const Context& ctx,
                                          const std::string& text) {
  dsl::Lexer lx(text, 1);
  dsl::FormulaParser fp(lx, th.sig, th.classical);
  Formula f = fp.parse(ctx);
  dsl::Token e = lx.next();
  if (e.kind != dsl::Token::End) lx.fail(e, "trailing input after formula");
  return f;
}

// Sequent text: "[x:G] LHS |- RHS". The context may be omitted for
// single-sorted theories; free variables are then inferred.
inline Sequent parse_sequent(const Theory& th, const std::string& text) {
  dsl::Lexer lx(text, 1);
  if (lx.peek().kind == dsl::Token::Punct && lx.peek().text == "[") {
    Context ctx = dsl::parse_context(lx, th.sig);
    dsl::FormulaParser fp(lx, th.sig, th.classical);
    Formula lhs = fp.parse(ctx);
    dsl::Token bar = lx.next();
    if (!(bar.kind == dsl::Token::Punct && bar.text == "|-"))
      lx.fail(bar, "expected '|-'");
    Formula rhs = fp.parse(ctx);
    return Sequent{ctx, lhs, rhs};
  }
  // No explicit context: scan identifiers that are not symbols or keywords
  // and bind them, in order of first occurrence, at the unique sort.
  if (th.sig.sorts().size() != 1)
    throw DslError(1, 1, "sequent without context needs a single-sorted theory");
  const Sort& s = th.sig.sorts()[0];
  Context ctx;
  {
    dsl::Lexer scan(text, 1);
    std::set<std::string> keywords = {"true", "top",    "false",
                                      "bot",  "exists", "not"};
    std::set<std::string> bound;
    bool after_exists = false;
    for (dsl::Token t = scan.next(); t.kind != dsl::Token::End; t = scan.next()) {
      if (t.kind != dsl::Token::Ident) continue;
      if (t.text == "exists") {
        after_exists = true;
        continue;
      }
      if (after_exists) {
        bound.insert(t.text);
        after_exists = false;
        continue;
      }
      if (keywords.count(t.text) || th.sig.has_symbol(t.text) ||
          th.sig.has_sort(t.text) || bound.count(t.text))
        continue;
      if (!ctx.index_of(t.text)) ctx.push(t.text, s);
    }
  }
  dsl::FormulaParser fp(lx, th.sig, th.classical);
  Formula lhs = fp.parse(ctx);
  dsl::Token bar = lx.next();
  if (!(bar.kind == dsl::Token::Punct && bar.text == "|-"))
    lx.fail(bar, "expected '|-'");
  Formula rhs = fp.parse(ctx);
  return Sequent{ctx, lhs, rhs};
}

inline std::string theory_to_dsl(const Theory& th) {
  std::string s;
  if (th.classical) s += "classical ";
  s += "theory " + th.name + "\n";
  for (const auto& so : th.sig.sorts()) s += "sort " + so + "\n";
  for (const auto& f : th.sig.funcs()) {
    s += "func " + f.name + " :";
    for (const auto& a : f.args) s += " " + a;
    s += " -> " + f.result + "\n";
  }
  for (const auto& r : th.sig.rels()) {
    s += "rel " + r.name + " :";
    for (const auto& a : r.args) s += " " + a;
    s += "\n";
  }
  for (const auto& ax : th.axioms)
    s += "axiom " + sequent_to_string(ax) + "\n";
  return s;
}

}  // namespace cohspec
