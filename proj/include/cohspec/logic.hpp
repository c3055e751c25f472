#pragma once

// Multi-sorted coherent (and classical) first-order logic: signatures,
// contexts, terms, formulas-in-context, sequents, theories and
// interpretations. Everything here is an immutable value; formulas share
// subtrees through shared_ptr and are cheap to copy.

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cohspec {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct BoundExceeded : Error {
  std::string which;  // which bound fired
  BoundExceeded(const std::string& which_, const std::string& m)
      : Error(m), which(which_) {}
};

using Sort = std::string;

struct FuncSym {
  std::string name;
  std::vector<Sort> args;
  Sort result;
};

struct RelSym {
  std::string name;
  std::vector<Sort> args;
};

class Signature {
 public:
  Signature() = default;

  void add_sort(const Sort& s) {
    if (has_sort(s)) throw Error("duplicate sort '" + s + "'");
    sorts_.push_back(s);
  }
  void add_func(const std::string& name, std::vector<Sort> args, Sort result) {
    check_fresh(name);
    funcs_.push_back(FuncSym{name, std::move(args), std::move(result)});
  }
  void add_rel(const std::string& name, std::vector<Sort> args) {
    check_fresh(name);
    rels_.push_back(RelSym{name, std::move(args)});
  }

  const std::vector<Sort>& sorts() const { return sorts_; }
  const std::vector<FuncSym>& funcs() const { return funcs_; }
  const std::vector<RelSym>& rels() const { return rels_; }

  bool has_sort(const Sort& s) const {
    return std::find(sorts_.begin(), sorts_.end(), s) != sorts_.end();
  }
  const FuncSym* func(const std::string& name) const {
    for (const auto& f : funcs_)
      if (f.name == name) return &f;
    return nullptr;
  }
  const RelSym* rel(const std::string& name) const {
    for (const auto& r : rels_)
      if (r.name == name) return &r;
    return nullptr;
  }
  bool has_symbol(const std::string& name) const {
    return func(name) != nullptr || rel(name) != nullptr;
  }

  // Deterministic fresh name: base, then base', base'', ...
  std::string fresh_symbol(const std::string& base) const {
    std::string n = base;
    while (has_symbol(n)) n += "'";
    return n;
  }

  bool operator==(const Signature& o) const {
    auto feq = [](const FuncSym& a, const FuncSym& b) {
      return a.name == b.name && a.args == b.args && a.result == b.result;
    };
    auto req = [](const RelSym& a, const RelSym& b) {
      return a.name == b.name && a.args == b.args;
    };
    if (sorts_ != o.sorts_ || funcs_.size() != o.funcs_.size() ||
        rels_.size() != o.rels_.size())
      return false;
    for (size_t i = 0; i < funcs_.size(); ++i)
      if (!feq(funcs_[i], o.funcs_[i])) return false;
    for (size_t i = 0; i < rels_.size(); ++i)
      if (!req(rels_[i], o.rels_[i])) return false;
    return true;
  }

 private:
  void check_fresh(const std::string& name) const {
    if (has_symbol(name)) throw Error("duplicate symbol '" + name + "'");
  }
  std::vector<Sort> sorts_;
  std::vector<FuncSym> funcs_;
  std::vector<RelSym> rels_;
};

// An ordered list of distinct sorted variables. The empty context is the
// context of closed formulas.
class Context {
 public:
  Context() = default;
  Context(std::initializer_list<std::pair<std::string, Sort>> vs) {
    for (const auto& v : vs) push(v.first, v.second);
  }

  void push(const std::string& name, const Sort& sort) {
    if (index_of(name)) throw Error("duplicate variable '" + name + "' in context");
    vars_.emplace_back(name, sort);
  }
  size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  const std::string& name(size_t i) const { return vars_[i].first; }
  const Sort& sort(size_t i) const { return vars_[i].second; }
  std::optional<size_t> index_of(const std::string& name) const {
    for (size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].first == name) return i;
    return std::nullopt;
  }
  Context extended(const std::string& name, const Sort& sort) const {
    Context c = *this;
    c.push(name, sort);
    return c;
  }
  Context dropped_last() const {
    Context c = *this;
    assert(!c.vars_.empty());
    c.vars_.pop_back();
    return c;
  }
  // A variable name not clashing with anything in this context.
  std::string fresh_var(const std::string& base) const {
    std::string n = base;
    while (index_of(n)) n += "'";
    return n;
  }
  std::vector<Sort> sorts() const {
    std::vector<Sort> s;
    for (const auto& v : vars_) s.push_back(v.second);
    return s;
  }
  bool operator==(const Context& o) const { return vars_ == o.vars_; }
  bool operator!=(const Context& o) const { return !(*this == o); }

  std::string to_string() const {
    std::string s = "[";
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (i) s += ", ";
      s += vars_[i].first + ":" + vars_[i].second;
    }
    return s + "]";
  }

 private:
  std::vector<std::pair<std::string, Sort>> vars_;
};

// Terms refer to context variables by position; names live in the context.
struct Term {
  int var = -1;  // >= 0: variable (index into the context)
  std::string func;
  std::vector<Term> args;

  static Term variable(int i) {
    Term t;
    t.var = i;
    return t;
  }
  static Term apply(std::string f, std::vector<Term> as = {}) {
    Term t;
    t.func = std::move(f);
    t.args = std::move(as);
    return t;
  }
  bool is_var() const { return var >= 0; }

  bool operator==(const Term& o) const {
    return var == o.var && func == o.func && args == o.args;
  }
  bool operator!=(const Term& o) const { return !(*this == o); }
  bool operator<(const Term& o) const {
    if (var != o.var) return var < o.var;
    if (func != o.func) return func < o.func;
    return args < o.args;
  }

  int depth() const {
    int d = 1;
    for (const auto& a : args) d = std::max(d, a.depth() + 1);
    return d;
  }
};

inline Sort term_sort(const Signature& sig, const Context& ctx, const Term& t) {
  if (t.is_var()) {
    if (static_cast<size_t>(t.var) >= ctx.size())
      throw Error("variable index out of context");
    return ctx.sort(t.var);
  }
  const FuncSym* f = sig.func(t.func);
  if (!f) throw Error("unknown function symbol '" + t.func + "'");
  if (f->args.size() != t.args.size())
    throw Error("arity mismatch for '" + t.func + "'");
  for (size_t i = 0; i < t.args.size(); ++i) {
    Sort s = term_sort(sig, ctx, t.args[i]);
    if (s != f->args[i])
      throw Error("sort mismatch in argument " + std::to_string(i + 1) +
                  " of '" + t.func + "': expected " + f->args[i] + ", got " + s);
  }
  return f->result;
}

enum class Conn { True, False, Eq, Rel, And, Or, Exists, Not };

// A formula-in-context. Construction enforces the context discipline:
// And/Or children share the parent context, Exists extends it by exactly
// one fresh variable (the last context entry of the body).
class Formula {
  struct Node {
    Conn kind;
    Context ctx;
    // Eq: terms[0], terms[1]; Rel: rel name + terms
    std::string rel;
    std::vector<Term> terms;
    std::shared_ptr<const Node> a, b;  // And/Or children; Exists/Not body in a
  };

 public:
  Formula() = default;
  bool valid() const { return p_ != nullptr; }

  static Formula truth(Context ctx) { return make(Conn::True, std::move(ctx)); }
  static Formula falsity(Context ctx) { return make(Conn::False, std::move(ctx)); }

  static Formula eq(const Signature& sig, Context ctx, Term l, Term r) {
    Sort sl = term_sort(sig, ctx, l);
    Sort sr = term_sort(sig, ctx, r);
    if (sl != sr) throw Error("equality between different sorts " + sl + ", " + sr);
    Formula f = make(Conn::Eq, std::move(ctx));
    f.node().terms = {std::move(l), std::move(r)};
    return f;
  }

  static Formula rel(const Signature& sig, Context ctx, const std::string& name,
                     std::vector<Term> ts) {
    const RelSym* r = sig.rel(name);
    if (!r) throw Error("unknown relation symbol '" + name + "'");
    if (r->args.size() != ts.size())
      throw Error("arity mismatch for relation '" + name + "'");
    for (size_t i = 0; i < ts.size(); ++i) {
      Sort s = term_sort(sig, ctx, ts[i]);
      if (s != r->args[i])
        throw Error("sort mismatch in argument " + std::to_string(i + 1) +
                    " of relation '" + name + "'");
    }
    Formula f = make(Conn::Rel, std::move(ctx));
    f.node().rel = name;
    f.node().terms = std::move(ts);
    return f;
  }

  static Formula conj(Formula l, Formula r) { return binary(Conn::And, std::move(l), std::move(r)); }
  static Formula disj(Formula l, Formula r) { return binary(Conn::Or, std::move(l), std::move(r)); }

  // The bound variable is the last entry of the body's context.
  static Formula exists(Formula body) {
    if (body.context().empty()) throw Error("exists needs a bound variable");
    Formula f = make(Conn::Exists, body.context().dropped_last());
    f.node().a = body.p_;
    return f;
  }

  static Formula neg(Formula body) {
    Formula f = make(Conn::Not, body.context());
    f.node().a = body.p_;
    return f;
  }

  Conn kind() const { return p_->kind; }
  const Context& context() const { return p_->ctx; }
  const std::vector<Term>& terms() const { return p_->terms; }
  const std::string& rel_name() const { return p_->rel; }
  Formula left() const { return Formula(p_->a); }
  Formula right() const { return Formula(p_->b); }
  Formula body() const { return Formula(p_->a); }
  const std::string& bound_name() const { return p_->a->ctx.name(p_->a->ctx.size() - 1); }
  const Sort& bound_sort() const { return p_->a->ctx.sort(p_->a->ctx.size() - 1); }

  int depth() const {
    switch (kind()) {
      case Conn::True:
      case Conn::False:
      case Conn::Eq:
      case Conn::Rel:
        return 1;
      case Conn::And:
      case Conn::Or:
        return 1 + std::max(left().depth(), right().depth());
      case Conn::Exists:
      case Conn::Not:
        return 1 + body().depth();
    }
    return 1;
  }

  bool is_coherent() const {
    switch (kind()) {
      case Conn::Not:
        return false;
      case Conn::And:
      case Conn::Or:
        return left().is_coherent() && right().is_coherent();
      case Conn::Exists:
        return body().is_coherent();
      default:
        return true;
    }
  }

  bool operator==(const Formula& o) const {
    if (p_ == o.p_) return true;
    if (!p_ || !o.p_) return false;
    if (kind() != o.kind() || context() != o.context()) return false;
    switch (kind()) {
      case Conn::True:
      case Conn::False:
        return true;
      case Conn::Eq:
        return terms() == o.terms();
      case Conn::Rel:
        return rel_name() == o.rel_name() && terms() == o.terms();
      case Conn::And:
      case Conn::Or:
        return left() == o.left() && right() == o.right();
      case Conn::Exists:
      case Conn::Not:
        return body() == o.body();
    }
    return false;
  }
  bool operator!=(const Formula& o) const { return !(*this == o); }

 private:
  explicit Formula(std::shared_ptr<const Node> p) : p_(std::move(p)) {}
  static Formula make(Conn k, Context ctx) {
    Formula f;
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->ctx = std::move(ctx);
    f.p_ = std::move(n);
    return f;
  }
  static Formula binary(Conn k, Formula l, Formula r) {
    if (l.context() != r.context())
      throw Error("conjunction/disjunction of formulas in different contexts");
    Formula f = make(k, l.context());
    f.node().a = l.p_;
    f.node().b = r.p_;
    return f;
  }
  Node& node() { return const_cast<Node&>(*p_); }
  std::shared_ptr<const Node> p_;
};

struct Sequent {
  Context ctx;
  Formula lhs, rhs;

  bool operator==(const Sequent& o) const {
    return ctx == o.ctx && lhs == o.lhs && rhs == o.rhs;
  }
};

inline Sequent make_sequent(Formula lhs, Formula rhs) {
  if (lhs.context() != rhs.context())
    throw Error("sequent sides have different contexts");
  return Sequent{lhs.context(), std::move(lhs), std::move(rhs)};
}

struct Theory {
  std::string name;
  Signature sig;
  std::vector<Sequent> axioms;
  bool classical = false;
};

// ---------------------------------------------------------------------------
// Substitution and weakening.
//
// Substitution maps each variable of the source context to a term over the
// target context; pushing under a binder extends the target context at the
// end, so outer term indices stay valid and capture cannot occur. Bound
// variable names are renamed when they clash with target context names.

inline Term substitute_term(const Term& t, const std::vector<Term>& assignment) {
  if (t.is_var()) {
    assert(static_cast<size_t>(t.var) < assignment.size());
    return assignment[t.var];
  }
  Term r = t;
  for (auto& a : r.args) a = substitute_term(a, assignment);
  return r;
}

inline Formula substitute(const Signature& sig, const Formula& f,
                          const std::vector<Term>& assignment,
                          const Context& target) {
  if (assignment.size() != f.context().size())
    throw Error("substitution arity mismatch");
  for (size_t i = 0; i < assignment.size(); ++i) {
    Sort want = f.context().sort(i);
    Sort got = term_sort(sig, target, assignment[i]);
    if (want != got)
      throw Error("substitution sort mismatch at variable '" +
                  f.context().name(i) + "'");
  }
  switch (f.kind()) {
    case Conn::True:
      return Formula::truth(target);
    case Conn::False:
      return Formula::falsity(target);
    case Conn::Eq:
      return Formula::eq(sig, target, substitute_term(f.terms()[0], assignment),
                         substitute_term(f.terms()[1], assignment));
    case Conn::Rel: {
      std::vector<Term> ts;
      for (const auto& t : f.terms()) ts.push_back(substitute_term(t, assignment));
      return Formula::rel(sig, target, f.rel_name(), std::move(ts));
    }
    case Conn::And:
      return Formula::conj(substitute(sig, f.left(), assignment, target),
                           substitute(sig, f.right(), assignment, target));
    case Conn::Or:
      return Formula::disj(substitute(sig, f.left(), assignment, target),
                           substitute(sig, f.right(), assignment, target));
    case Conn::Exists: {
      std::string bn = target.fresh_var(f.bound_name());
      Context inner = target.extended(bn, f.bound_sort());
      std::vector<Term> ext = assignment;
      ext.push_back(Term::variable(static_cast<int>(target.size())));
      return Formula::exists(substitute(sig, f.body(), ext, inner));
    }
    case Conn::Not:
      return Formula::neg(substitute(sig, f.body(), assignment, target));
  }
  throw Error("unreachable");
}

// weaken(phi(x), y) = phi in context x,y; semantics is product with the
// extra carriers. Rejects variable clashes.
inline Formula weaken(const Signature& sig, const Formula& f, const Context& extra) {
  Context target = f.context();
  for (size_t i = 0; i < extra.size(); ++i) {
    if (f.context().index_of(extra.name(i)))
      throw Error("variable clash in weakening: '" + extra.name(i) + "'");
    target.push(extra.name(i), extra.sort(i));
  }
  std::vector<Term> id;
  for (size_t i = 0; i < f.context().size(); ++i)
    id.push_back(Term::variable(static_cast<int>(i)));
  return substitute(sig, f, id, target);
}

// ---------------------------------------------------------------------------
// Printing (the DSL's formula syntax; parsed back by dsl.hpp).

inline std::string term_to_string(const Term& t, const Context& ctx) {
  if (t.is_var()) return ctx.name(t.var);
  if (t.args.empty()) return t.func;
  std::string s = t.func + "(";
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) s += ", ";
    s += term_to_string(t.args[i], ctx);
  }
  return s + ")";
}

namespace detail {
inline int prec(Conn k) {
  switch (k) {
    case Conn::Exists:
      return 0;
    case Conn::Or:
      return 1;
    case Conn::And:
      return 2;
    default:
      return 3;
  }
}
}  // namespace detail

inline std::string formula_to_string(const Formula& f) {
  auto wrap = [](const Formula& g, int outer) {
    std::string s = formula_to_string(g);
    if (detail::prec(g.kind()) < outer) return "(" + s + ")";
    return s;
  };
  switch (f.kind()) {
    case Conn::True:
      return "true";
    case Conn::False:
      return "false";
    case Conn::Eq:
      return term_to_string(f.terms()[0], f.context()) + " = " +
             term_to_string(f.terms()[1], f.context());
    case Conn::Rel: {
      std::string s = f.rel_name() + "(";
      for (size_t i = 0; i < f.terms().size(); ++i) {
        if (i) s += ", ";
        s += term_to_string(f.terms()[i], f.context());
      }
      return s + ")";
    }
    case Conn::And:
      return wrap(f.left(), 2) + " /\\ " + wrap(f.right(), 2);
    case Conn::Or:
      return wrap(f.left(), 1) + " \\/ " + wrap(f.right(), 1);
    case Conn::Exists:
      return "exists " + f.bound_name() + ":" + f.bound_sort() + ". " +
             formula_to_string(f.body());
    case Conn::Not: {
      std::string s = formula_to_string(f.body());
      if (detail::prec(f.body().kind()) < 3) s = "(" + s + ")";
      return "not " + s;
    }
  }
  return "?";
}

inline std::string sequent_to_string(const Sequent& s) {
  return s.ctx.to_string() + " " + formula_to_string(s.lhs) + " |- " +
         formula_to_string(s.rhs);
}

// ---------------------------------------------------------------------------
// Well-formedness diagnostics.

struct Diagnostic {
  std::string where;
  std::string message;
};

namespace detail {

inline void check_term(const Signature& sig, const Context& ctx, const Term& t,
                       const std::string& where, std::vector<Diagnostic>& out) {
  try {
    term_sort(sig, ctx, t);
  } catch (const Error& e) {
    out.push_back({where, e.what()});
  }
}

inline void check_formula(const Signature& sig, const Formula& f, bool classical,
                          const std::string& where, std::vector<Diagnostic>& out) {
  for (size_t i = 0; i < f.context().size(); ++i)
    if (!sig.has_sort(f.context().sort(i)))
      out.push_back({where, "undeclared sort '" + f.context().sort(i) + "'"});
  switch (f.kind()) {
    case Conn::True:
    case Conn::False:
      break;
    case Conn::Eq: {
      check_term(sig, f.context(), f.terms()[0], where, out);
      check_term(sig, f.context(), f.terms()[1], where, out);
      break;
    }
    case Conn::Rel: {
      const RelSym* r = sig.rel(f.rel_name());
      if (!r) {
        out.push_back({where, "unknown relation '" + f.rel_name() + "'"});
        break;
      }
      if (r->args.size() != f.terms().size())
        out.push_back({where, "arity mismatch for relation '" + f.rel_name() + "'"});
      for (const auto& t : f.terms()) check_term(sig, f.context(), t, where, out);
      break;
    }
    case Conn::And:
    case Conn::Or:
      if (f.left().context() != f.context() || f.right().context() != f.context())
        out.push_back({where, "subformula context differs from parent"});
      check_formula(sig, f.left(), classical, where, out);
      check_formula(sig, f.right(), classical, where, out);
      break;
    case Conn::Exists:
      if (f.body().context().size() != f.context().size() + 1)
        out.push_back({where, "exists body context does not extend parent by one"});
      check_formula(sig, f.body(), classical, where, out);
      break;
    case Conn::Not:
      if (!classical)
        out.push_back({where, "classical connective in coherent theory"});
      check_formula(sig, f.body(), classical, where, out);
      break;
  }
}

}  // namespace detail

inline std::vector<Diagnostic> well_formed(const Theory& th) {
  std::vector<Diagnostic> out;
  for (const auto& f : th.sig.funcs()) {
    for (const auto& s : f.args)
      if (!th.sig.has_sort(s))
        out.push_back({"func " + f.name, "undeclared sort '" + s + "'"});
    if (!th.sig.has_sort(f.result))
      out.push_back({"func " + f.name, "undeclared sort '" + f.result + "'"});
  }
  for (const auto& r : th.sig.rels())
    for (const auto& s : r.args)
      if (!th.sig.has_sort(s))
        out.push_back({"rel " + r.name, "undeclared sort '" + s + "'"});
  for (size_t i = 0; i < th.axioms.size(); ++i) {
    const Sequent& ax = th.axioms[i];
    std::string where = "axiom " + std::to_string(i + 1);
    if (ax.lhs.context() != ax.ctx || ax.rhs.context() != ax.ctx)
      out.push_back({where, "sequent sides not in the sequent context"});
    detail::check_formula(th.sig, ax.lhs, th.classical, where, out);
    detail::check_formula(th.sig, ax.rhs, th.classical, where, out);
  }
  return out;
}

// Interpretation of one theory in another: sorts map to sorts, each
// relation maps to a target formula in the matching context, each function
// to a target formula that must be provably functional (certified
// semantically by the analysis module).
struct Interpretation {
  Theory source;
  Theory target;
  std::map<Sort, Sort> sort_map;
  std::map<std::string, Formula> rel_images;   // ctx [x1..xk]
  std::map<std::string, Formula> func_images;  // ctx [x1..xk, y]

  const Sort& sort_image(const Sort& s) const {
    auto it = sort_map.find(s);
    if (it == sort_map.end()) throw Error("sort '" + s + "' has no image");
    return it->second;
  }
};

// Standard variable names for interpretation image contexts.
inline Context interp_rel_context(const Interpretation& I, const RelSym& r) {
  Context c;
  for (size_t i = 0; i < r.args.size(); ++i)
    c.push("x" + std::to_string(i + 1), I.sort_image(r.args[i]));
  return c;
}
inline Context interp_func_context(const Interpretation& I, const FuncSym& f) {
  Context c;
  for (size_t i = 0; i < f.args.size(); ++i)
    c.push("x" + std::to_string(i + 1), I.sort_image(f.args[i]));
  c.push("y", I.sort_image(f.result));
  return c;
}

inline Interpretation identity_interpretation(const Theory& th) {
  Interpretation I;
  I.source = th;
  I.target = th;
  for (const auto& s : th.sig.sorts()) I.sort_map[s] = s;
  for (const auto& r : th.sig.rels()) {
    Context c = interp_rel_context(I, r);
    std::vector<Term> vars;
    for (size_t i = 0; i < r.args.size(); ++i)
      vars.push_back(Term::variable(static_cast<int>(i)));
    I.rel_images[r.name] = Formula::rel(th.sig, c, r.name, vars);
  }
  for (const auto& f : th.sig.funcs()) {
    Context c = interp_func_context(I, f);
    std::vector<Term> vars;
    for (size_t i = 0; i < f.args.size(); ++i)
      vars.push_back(Term::variable(static_cast<int>(i)));
    I.func_images[f.name] =
        Formula::eq(th.sig, c, Term::apply(f.name, vars),
                    Term::variable(static_cast<int>(f.args.size())));
  }
  return I;
}

}  // namespace cohspec
