#pragma once

// Theory-to-theory passes: Morleyization of classical theories, the positive
// diagram of a model, slices, pushouts of interpretations, the homomorphism
// copower, and the reduct functor on models. Fresh symbols get deterministic
// primed names derived from the source names.

#include "cohspec/models.hpp"

namespace cohspec {

// ---------------------------------------------------------------------------
// Morleyization.
//
// Classical input; coherent output over an extended signature with one
// complement symbol N'k per negated subformula actually occurring (keyed by
// the translated body and its context), plus the axioms
//   |- phi \/ N(x)   and   phi /\ N(x) |- false.

class MorleyContext {
 public:
  explicit MorleyContext(const Theory& classical) : out_() {
    out_.name = classical.name + "'coh";
    out_.sig = classical.sig;
    out_.classical = false;
  }

  // Translate a classical formula, registering complement symbols as needed.
  Formula translate(const Formula& f) {
    switch (f.kind()) {
      case Conn::True:
      case Conn::False:
      case Conn::Eq:
      case Conn::Rel:
        return f;  // atoms are unchanged; signature only grows
      case Conn::And:
        return Formula::conj(translate(f.left()), translate(f.right()));
      case Conn::Or:
        return Formula::disj(translate(f.left()), translate(f.right()));
      case Conn::Exists:
        return Formula::exists(translate(f.body()));
      case Conn::Not: {
        Formula body = translate(f.body());
        const std::string& sym = symbol_for(body);
        std::vector<Term> vars;
        for (size_t i = 0; i < f.context().size(); ++i)
          vars.push_back(Term::variable(static_cast<int>(i)));
        return Formula::rel(out_.sig, f.context(), sym, std::move(vars));
      }
    }
    throw Error("unreachable");
  }

  // The complement symbol for a coherent formula-in-context, creating it
  // (with its two axioms) on first use.
  const std::string& symbol_for(const Formula& body) {
    for (const auto& [sym, def] : defs_)
      if (def == body) return names_.at(sym);
    int k = static_cast<int>(defs_.size()) + 1;
    std::string name = out_.sig.fresh_symbol("N'" + std::to_string(k));
    out_.sig.add_rel(name, body.context().sorts());
    defs_.emplace_back(k, body);
    names_[k] = name;

    std::vector<Term> vars;
    for (size_t i = 0; i < body.context().size(); ++i)
      vars.push_back(Term::variable(static_cast<int>(i)));
    Formula n = Formula::rel(out_.sig, body.context(), name, vars);
    out_.axioms.push_back(
        Sequent{body.context(), Formula::truth(body.context()),
                Formula::disj(body, n)});
    out_.axioms.push_back(Sequent{body.context(), Formula::conj(body, n),
                                  Formula::falsity(body.context())});
    return names_.at(defs_.back().first);
  }

  Theory& theory() { return out_; }
  const std::vector<std::pair<int, Formula>>& definitions() const { return defs_; }
  const std::map<int, std::string>& names() const { return names_; }

 private:
  Theory out_;
  std::vector<std::pair<int, Formula>> defs_;  // key -> defining subformula
  std::map<int, std::string> names_;
};

struct MorleyizationResult {
  Theory theory;  // coherent
  std::vector<std::pair<std::string, Formula>> complements;  // symbol -> body
  std::vector<Sequent> translated_axioms;
};

inline MorleyizationResult morleyize(const Theory& classical) {
  MorleyContext mc(classical);
  MorleyizationResult res;
  for (const auto& ax : classical.axioms) {
    Formula l = mc.translate(ax.lhs);
    Formula r = mc.translate(ax.rhs);
    mc.theory().axioms.push_back(Sequent{ax.ctx, l, r});
    res.translated_axioms.push_back(Sequent{ax.ctx, l, r});
  }
  res.theory = mc.theory();
  for (const auto& [k, def] : mc.definitions())
    res.complements.emplace_back(mc.names().at(k), def);
  return res;
}

// The unique expansion of a structure to the Morleyized signature: each
// complement symbol denotes the complement of its defining subformula,
// resolved in registration order (bodies only mention earlier symbols).
inline FiniteStructure morley_expand(const MorleyizationResult& mr,
                                     const FiniteStructure& m) {
  FiniteStructure e = m;
  e.sig = std::make_shared<Signature>(mr.theory.sig);
  for (const auto& [sym, body] : mr.complements) {
    DefinableSet pos = eval(e, body);
    std::set<std::vector<int>> comp;
    for_each_tuple(e, body.context().sorts(), [&](const std::vector<int>& t) {
      if (!pos.tuples.count(t)) comp.insert(t);
    });
    e.rels[sym] = std::move(comp);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Diagram of a model: one fresh constant per element, plus every positive
// atomic fact of M as a closed axiom.

struct DiagramTheory {
  Theory theory;
  std::map<std::pair<Sort, int>, std::string> constants;  // element -> constant
};

inline DiagramTheory diagram_theory(const Theory& th, const FiniteStructure& m) {
  if (!is_model(m, th)) throw Error("diagram requires a model of the theory");
  DiagramTheory d;
  d.theory = th;
  d.theory.name = th.name + "'diag";
  for (const auto& s : th.sig.sorts())
    for (int e = 0; e < m.size(s); ++e) {
      std::string c =
          d.theory.sig.fresh_symbol("c'" + s + "'" + std::to_string(e));
      d.theory.sig.add_func(c, {}, s);
      d.constants[{s, e}] = c;
    }
  Context closed;
  auto cterm = [&](const Sort& s, int e) {
    return Term::apply(d.constants.at({s, e}));
  };
  for (const auto& f : th.sig.funcs()) {
    for_each_tuple(m, f.args, [&](const std::vector<int>& t) {
      std::vector<Term> args;
      for (size_t i = 0; i < t.size(); ++i) args.push_back(cterm(f.args[i], t[i]));
      Term lhs = Term::apply(f.name, args);
      Term rhs = cterm(f.result, m.apply(f.name, t));
      d.theory.axioms.push_back(
          Sequent{closed, Formula::truth(closed),
                  Formula::eq(d.theory.sig, closed, lhs, rhs)});
    });
  }
  for (const auto& r : th.sig.rels()) {
    auto it = m.rels.find(r.name);
    if (it == m.rels.end()) continue;
    for (const auto& t : it->second) {
      std::vector<Term> args;
      for (size_t i = 0; i < t.size(); ++i) args.push_back(cterm(r.args[i], t[i]));
      d.theory.axioms.push_back(
          Sequent{closed, Formula::truth(closed),
                  Formula::rel(d.theory.sig, closed, r.name, args)});
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Slice over a formula: fresh constants for the context plus the axiom that
// they satisfy it. Models are pairs (M, a in phi^M).

struct SliceTheory {
  Theory theory;
  std::vector<std::string> constants;  // one per context variable
};

inline SliceTheory slice_theory(const Theory& th, const Formula& phi) {
  SliceTheory s;
  s.theory = th;
  s.theory.name = th.name + "'slice";
  const Context& ctx = phi.context();
  std::vector<Term> consts;
  for (size_t i = 0; i < ctx.size(); ++i) {
    std::string c = s.theory.sig.fresh_symbol("c'" + ctx.name(i));
    s.theory.sig.add_func(c, {}, ctx.sort(i));
    s.constants.push_back(c);
    consts.push_back(Term::apply(c));
  }
  Context closed;
  Formula inst = substitute(s.theory.sig, phi, consts, closed);
  s.theory.axioms.push_back(
      Sequent{closed, Formula::truth(closed), inst});
  return s;
}

// ---------------------------------------------------------------------------
// Reduct of a target model along an interpretation.

inline FiniteStructure reduct(const Interpretation& I, const FiniteStructure& n) {
  FiniteStructure m;
  m.sig = std::make_shared<Signature>(I.source.sig);
  for (const auto& s : I.source.sig.sorts())
    m.carrier[s] = n.size(I.sort_image(s));
  for (const auto& r : I.source.sig.rels()) {
    const Formula& img = I.rel_images.at(r.name);
    DefinableSet d = eval(n, img);
    m.rels[r.name] = d.tuples;
  }
  for (const auto& f : I.source.sig.funcs()) {
    const Formula& img = I.func_images.at(f.name);
    DefinableSet d = eval(n, img);  // ctx [x1..xk, y]
    std::vector<int> table(FiniteStructure::table_size(m, f), -1);
    for (const auto& t : d.tuples) {
      std::vector<int> args(t.begin(), t.end() - 1);
      size_t ix = m.tuple_index(f.args, args);
      if (table[ix] != -1)
        throw Error("image of '" + f.name +
                    "' is not single-valued on this model (invalid "
                    "interpretation certificate)");
      table[ix] = t.back();
    }
    for (int v : table)
      if (v == -1)
        throw Error("image of '" + f.name +
                    "' is not total on this model (invalid interpretation "
                    "certificate)");
    m.funcs[f.name] = std::move(table);
  }
  if (!is_model(m, I.source))
    throw Error("reduct is not a model of the source theory");
  return m;
}

// The reduct of a target homomorphism: the same per-sort maps, read along the
// sort map. Coherent images are preserved by homomorphisms, so this is a
// source-theory homomorphism between the reducts.
inline Homomorphism reduct_hom(const Interpretation& I, const Homomorphism& h,
                               const FiniteStructure& rm, const FiniteStructure& rn) {
  Homomorphism g;
  g.source = &rm;
  g.target = &rn;
  for (const auto& s : I.source.sig.sorts())
    g.maps[s] = h.maps.at(I.sort_image(s));
  return g;
}

// ---------------------------------------------------------------------------
// Translation of source formulas along an interpretation. Terms unfold
// through the function images' graphs: I(t1 = t2) becomes an existential
// chain of graph formulas.

namespace detail {

// Emit a target formula asserting "value of translated term == variable v"
// where v indexes `ctx`. Fresh variables are appended to ctx as needed; the
// continuation k builds the rest of the formula in the final context.
inline Formula translate_term_into(const Interpretation& I, const Term& t,
                                   const std::vector<int>& varmap, Context ctx,
                                   int v,
                                   const std::function<Formula(const Context&)>& k) {
  const Signature& tsig = I.target.sig;
  if (t.is_var()) {
    Formula rest = k(ctx);
    Formula eq = Formula::eq(tsig, ctx, Term::variable(varmap[t.var]),
                             Term::variable(v));
    return Formula::conj(eq, rest);
  }
  const FuncSym* f = I.source.sig.func(t.func);
  // allocate variables for the arguments, then chain
  std::function<Formula(size_t, std::vector<int>, Context)> go =
      [&](size_t i, std::vector<int> argvars, Context c) -> Formula {
    if (i == t.args.size()) {
      // apply the image formula of f at (argvars..., v)
      const Formula& img = I.func_images.at(t.func);
      std::vector<Term> assign;
      for (int av : argvars) assign.push_back(Term::variable(av));
      assign.push_back(Term::variable(v));
      Formula app = substitute(tsig, img, assign, c);
      return Formula::conj(app, k(c));
    }
    int av = static_cast<int>(c.size());
    Context c2 = c.extended(c.fresh_var("w"), I.sort_image(f->args[i]));
    argvars.push_back(av);
    Formula inner = translate_term_into(
        I, t.args[i], varmap, c2, av, [&](const Context& c3) -> Formula {
          return go(i + 1, argvars, c3);
        });
    return Formula::exists(inner);
  };
  return go(0, {}, ctx);
}

}  // namespace detail

inline Context translate_context(const Interpretation& I, const Context& ctx) {
  Context out;
  for (size_t i = 0; i < ctx.size(); ++i)
    out.push(ctx.name(i), I.sort_image(ctx.sort(i)));
  return out;
}

inline Formula translate_formula(const Interpretation& I, const Formula& f) {
  const Signature& tsig = I.target.sig;
  Context tctx = translate_context(I, f.context());
  std::vector<int> varmap;
  for (size_t i = 0; i < f.context().size(); ++i)
    varmap.push_back(static_cast<int>(i));

  std::function<Formula(const Formula&, const Context&, const std::vector<int>&)>
      go = [&](const Formula& g, const Context& c,
               const std::vector<int>& vm) -> Formula {
    switch (g.kind()) {
      case Conn::True:
        return Formula::truth(c);
      case Conn::False:
        return Formula::falsity(c);
      case Conn::Eq: {
        // exists u. (t1 == u) /\ (t2 == u)
        int u = static_cast<int>(c.size());
        Sort us = I.sort_image(term_sort(I.source.sig, g.context(), g.terms()[0]));
        Context c2 = c.extended(c.fresh_var("u"), us);
        Formula inner = detail::translate_term_into(
            I, g.terms()[0], vm, c2, u, [&](const Context& c3) -> Formula {
              return detail::translate_term_into(
                  I, g.terms()[1], vm, c3, u,
                  [&](const Context& c4) -> Formula { return Formula::truth(c4); });
            });
        return Formula::exists(inner);
      }
      case Conn::Rel: {
        // exists u1..uk. (ti == ui) /\ image(u1..uk)
        const Formula& img = I.rel_images.at(g.rel_name());
        std::function<Formula(size_t, std::vector<int>, const Context&)> chain =
            [&](size_t i, std::vector<int> uvars, const Context& c2) -> Formula {
          if (i == g.terms().size()) {
            std::vector<Term> assign;
            for (int uv : uvars) assign.push_back(Term::variable(uv));
            return substitute(tsig, img, assign, c2);
          }
          int uv = static_cast<int>(c2.size());
          Sort us =
              I.sort_image(term_sort(I.source.sig, g.context(), g.terms()[i]));
          Context c3 = c2.extended(c2.fresh_var("u"), us);
          uvars.push_back(uv);
          Formula inner = detail::translate_term_into(
              I, g.terms()[i], vm, c3, uv, [&](const Context& c4) -> Formula {
                return chain(i + 1, uvars, c4);
              });
          return Formula::exists(inner);
        };
        return chain(0, {}, c);
      }
      case Conn::And:
        return Formula::conj(go(g.left(), c, vm), go(g.right(), c, vm));
      case Conn::Or:
        return Formula::disj(go(g.left(), c, vm), go(g.right(), c, vm));
      case Conn::Exists: {
        Sort bs = I.sort_image(g.bound_sort());
        Context c2 = c.extended(c.fresh_var(g.bound_name()), bs);
        std::vector<int> vm2 = vm;
        vm2.push_back(static_cast<int>(c.size()));
        return Formula::exists(go(g.body(), c2, vm2));
      }
      case Conn::Not:
        throw Error("cannot translate classical formulas");
    }
    throw Error("unreachable");
  };
  return go(f, tctx, varmap);
}

inline Sequent translate_sequent(const Interpretation& I, const Sequent& sq) {
  Formula l = translate_formula(I, sq.lhs);
  Formula r = translate_formula(I, sq.rhs);
  return Sequent{l.context(), l, r};
}

// ---------------------------------------------------------------------------
// Renaming apart (for pushouts) and signature-disjoint copies.

inline Theory rename_theory(const Theory& th, const std::string& suffix) {
  Theory out;
  out.name = th.name + suffix;
  out.classical = th.classical;
  std::map<std::string, std::string> smap, fmap, rmap;
  for (const auto& s : th.sig.sorts()) {
    smap[s] = s + suffix;
    out.sig.add_sort(s + suffix);
  }
  for (const auto& f : th.sig.funcs()) {
    std::vector<Sort> args;
    for (const auto& a : f.args) args.push_back(smap.at(a));
    fmap[f.name] = f.name + suffix;
    out.sig.add_func(f.name + suffix, args, smap.at(f.result));
  }
  for (const auto& r : th.sig.rels()) {
    std::vector<Sort> args;
    for (const auto& a : r.args) args.push_back(smap.at(a));
    rmap[r.name] = r.name + suffix;
    out.sig.add_rel(r.name + suffix, args);
  }
  std::function<Term(const Term&)> rt = [&](const Term& t) -> Term {
    if (t.is_var()) return t;
    Term u = Term::apply(fmap.at(t.func));
    for (const auto& a : t.args) u.args.push_back(rt(a));
    return u;
  };
  std::function<Formula(const Formula&, const Context&)> rf =
      [&](const Formula& f, const Context& c) -> Formula {
    switch (f.kind()) {
      case Conn::True:
        return Formula::truth(c);
      case Conn::False:
        return Formula::falsity(c);
      case Conn::Eq:
        return Formula::eq(out.sig, c, rt(f.terms()[0]), rt(f.terms()[1]));
      case Conn::Rel: {
        std::vector<Term> ts;
        for (const auto& t : f.terms()) ts.push_back(rt(t));
        return Formula::rel(out.sig, c, rmap.at(f.rel_name()), ts);
      }
      case Conn::And:
        return Formula::conj(rf(f.left(), c), rf(f.right(), c));
      case Conn::Or:
        return Formula::disj(rf(f.left(), c), rf(f.right(), c));
      case Conn::Exists: {
        Context c2 = c.extended(f.bound_name(), smap.at(f.bound_sort()));
        return Formula::exists(rf(f.body(), c2));
      }
      case Conn::Not:
        return Formula::neg(rf(f.body(), c));
    }
    throw Error("unreachable");
  };
  for (const auto& ax : th.axioms) {
    Context c;
    for (size_t i = 0; i < ax.ctx.size(); ++i)
      c.push(ax.ctx.name(i), smap.at(ax.ctx.sort(i)));
    out.axioms.push_back(Sequent{c, rf(ax.lhs, c), rf(ax.rhs, c)});
  }
  return out;
}

// Transport an interpretation along a renaming of its target.
inline Interpretation rename_target(const Interpretation& I, const Theory& renamed,
                                    const std::string& suffix) {
  Interpretation J;
  J.source = I.source;
  J.target = renamed;
  for (const auto& [a, b] : I.sort_map) J.sort_map[a] = b + suffix;
  std::function<Term(const Term&)> rt = [&](const Term& t) -> Term {
    if (t.is_var()) return t;
    Term u = Term::apply(t.func + suffix);
    for (const auto& a : t.args) u.args.push_back(rt(a));
    return u;
  };
  std::function<Formula(const Formula&, const Context&)> rf =
      [&](const Formula& f, const Context& c) -> Formula {
    switch (f.kind()) {
      case Conn::True:
        return Formula::truth(c);
      case Conn::False:
        return Formula::falsity(c);
      case Conn::Eq:
        return Formula::eq(renamed.sig, c, rt(f.terms()[0]), rt(f.terms()[1]));
      case Conn::Rel: {
        std::vector<Term> ts;
        for (const auto& t : f.terms()) ts.push_back(rt(t));
        return Formula::rel(renamed.sig, c, f.rel_name() + suffix, ts);
      }
      case Conn::And:
        return Formula::conj(rf(f.left(), c), rf(f.right(), c));
      case Conn::Or:
        return Formula::disj(rf(f.left(), c), rf(f.right(), c));
      case Conn::Exists: {
        Context c2 = c.extended(f.bound_name(), f.bound_sort() + suffix);
        return Formula::exists(rf(f.body(), c2));
      }
      case Conn::Not:
        throw Error("unreachable");
    }
    throw Error("unreachable");
  };
  auto rctx = [&](const Context& c) {
    Context o;
    for (size_t i = 0; i < c.size(); ++i) o.push(c.name(i), c.sort(i) + suffix);
    return o;
  };
  for (const auto& [n, f] : I.rel_images) J.rel_images[n] = rf(f, rctx(f.context()));
  for (const auto& [n, f] : I.func_images)
    J.func_images[n] = rf(f, rctx(f.context()));
  return J;
}

// ---------------------------------------------------------------------------
// Pushout of two interpretations with a common source. The output's models
// are triples (M |= F, N |= G, iso between the reducts), encoded by a pair
// of mutually inverse function symbols per source sort with naturality
// axioms in both directions.

inline Theory pushout(const Interpretation& I, const Interpretation& J) {
  if (!(I.source.sig == J.source.sig))
    throw Error("pushout requires interpretations with the same source");
  const Theory& F = I.target;
  const Theory& G = J.target;
  for (const auto& s : F.sig.sorts())
    if (G.sig.has_sort(s))
      throw Error("pushout target signatures overlap on sort '" + s +
                  "' (rename first)");
  for (const auto& f : F.sig.funcs())
    if (G.sig.has_symbol(f.name))
      throw Error("pushout target signatures overlap on '" + f.name + "'");
  for (const auto& r : F.sig.rels())
    if (G.sig.has_symbol(r.name))
      throw Error("pushout target signatures overlap on '" + r.name + "'");

  Theory out;
  out.name = F.name + "'po'" + G.name;
  out.classical = false;
  for (const auto& s : F.sig.sorts()) out.sig.add_sort(s);
  for (const auto& s : G.sig.sorts()) out.sig.add_sort(s);
  for (const auto& f : F.sig.funcs()) out.sig.add_func(f.name, f.args, f.result);
  for (const auto& f : G.sig.funcs()) out.sig.add_func(f.name, f.args, f.result);
  for (const auto& r : F.sig.rels()) out.sig.add_rel(r.name, r.args);
  for (const auto& r : G.sig.rels()) out.sig.add_rel(r.name, r.args);
  for (const auto& ax : F.axioms) out.axioms.push_back(ax);
  for (const auto& ax : G.axioms) out.axioms.push_back(ax);

  std::map<Sort, std::string> iname, jname;
  for (const auto& s : I.source.sig.sorts()) {
    std::string in = out.sig.fresh_symbol("i'" + s);
    out.sig.add_func(in, {I.sort_image(s)}, J.sort_image(s));
    iname[s] = in;
    std::string jn = out.sig.fresh_symbol("j'" + s);
    out.sig.add_func(jn, {J.sort_image(s)}, I.sort_image(s));
    jname[s] = jn;
  }
  // inverse laws
  for (const auto& s : I.source.sig.sorts()) {
    {
      Context c({{"x", I.sort_image(s)}});
      Term x = Term::variable(0);
      Term ji = Term::apply(jname[s], {Term::apply(iname[s], {x})});
      out.axioms.push_back(Sequent{c, Formula::truth(c),
                                   Formula::eq(out.sig, c, ji, x)});
    }
    {
      Context c({{"y", J.sort_image(s)}});
      Term y = Term::variable(0);
      Term ij = Term::apply(iname[s], {Term::apply(jname[s], {y})});
      out.axioms.push_back(Sequent{c, Formula::truth(c),
                                   Formula::eq(out.sig, c, ij, y)});
    }
  }
  // naturality: each source symbol's I-image transported by i lands in the
  // J-image, and conversely via j.
  auto mk_seq = [&](const Formula& from_img, const Formula& to_img,
                    const std::map<Sort, std::string>& fn,
                    const std::vector<Sort>& src_sorts) {
    Context c;
    for (size_t i = 0; i < src_sorts.size(); ++i)
      c.push("x" + std::to_string(i + 1),
             out.sig.func(fn.at(src_sorts[i]))->args[0]);
    std::vector<Term> id, mapped;
    for (size_t i = 0; i < src_sorts.size(); ++i) {
      id.push_back(Term::variable(static_cast<int>(i)));
      mapped.push_back(
          Term::apply(fn.at(src_sorts[i]), {Term::variable(static_cast<int>(i))}));
    }
    Formula lhs = substitute(out.sig, from_img, id, c);
    Formula rhs = substitute(out.sig, to_img, mapped, c);
    out.axioms.push_back(Sequent{c, lhs, rhs});
  };

  for (const auto& r : I.source.sig.rels()) {
    mk_seq(I.rel_images.at(r.name), J.rel_images.at(r.name), iname, r.args);
    mk_seq(J.rel_images.at(r.name), I.rel_images.at(r.name), jname, r.args);
  }
  for (const auto& f : I.source.sig.funcs()) {
    std::vector<Sort> sorts = f.args;
    sorts.push_back(f.result);
    mk_seq(I.func_images.at(f.name), J.func_images.at(f.name), iname, sorts);
    mk_seq(J.func_images.at(f.name), I.func_images.at(f.name), jname, sorts);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Copower: two copies of the theory plus a homomorphism between them.

inline Theory copower(const Theory& th) {
  Theory t0 = rename_theory(th, "'0");
  Theory t1 = rename_theory(th, "'1");
  Theory out;
  out.name = th.name + "'copower";
  out.classical = false;
  for (const auto& s : t0.sig.sorts()) out.sig.add_sort(s);
  for (const auto& s : t1.sig.sorts()) out.sig.add_sort(s);
  for (const auto& f : t0.sig.funcs()) out.sig.add_func(f.name, f.args, f.result);
  for (const auto& f : t1.sig.funcs()) out.sig.add_func(f.name, f.args, f.result);
  for (const auto& r : t0.sig.rels()) out.sig.add_rel(r.name, r.args);
  for (const auto& r : t1.sig.rels()) out.sig.add_rel(r.name, r.args);
  for (const auto& ax : t0.axioms) out.axioms.push_back(ax);
  for (const auto& ax : t1.axioms) out.axioms.push_back(ax);

  std::map<Sort, std::string> hname;
  for (const auto& s : th.sig.sorts()) {
    std::string hn = out.sig.fresh_symbol("h'" + s);
    out.sig.add_func(hn, {s + "'0"}, s + "'1");
    hname[s] = hn;
  }
  auto h_of = [&](const Sort& s, Term t) {
    return Term::apply(hname.at(s), {std::move(t)});
  };
  // naturality h(f0(x)) = f1(h(x)); preservation R0(x) |- R1(h(x))
  for (const auto& f : th.sig.funcs()) {
    Context c;
    for (size_t i = 0; i < f.args.size(); ++i)
      c.push("x" + std::to_string(i + 1), f.args[i] + "'0");
    std::vector<Term> vars, hvars;
    for (size_t i = 0; i < f.args.size(); ++i) {
      vars.push_back(Term::variable(static_cast<int>(i)));
      hvars.push_back(h_of(f.args[i], Term::variable(static_cast<int>(i))));
    }
    Term lhs = h_of(f.result, Term::apply(f.name + "'0", vars));
    Term rhs = Term::apply(f.name + "'1", hvars);
    out.axioms.push_back(
        Sequent{c, Formula::truth(c), Formula::eq(out.sig, c, lhs, rhs)});
  }
  for (const auto& r : th.sig.rels()) {
    Context c;
    for (size_t i = 0; i < r.args.size(); ++i)
      c.push("x" + std::to_string(i + 1), r.args[i] + "'0");
    std::vector<Term> vars, hvars;
    for (size_t i = 0; i < r.args.size(); ++i) {
      vars.push_back(Term::variable(static_cast<int>(i)));
      hvars.push_back(h_of(r.args[i], Term::variable(static_cast<int>(i))));
    }
    out.axioms.push_back(Sequent{c, Formula::rel(out.sig, c, r.name + "'0", vars),
                                 Formula::rel(out.sig, c, r.name + "'1", hvars)});
  }
  return out;
}

}  // namespace cohspec
