#pragma once

// Canonical enumeration of terms and depth-bounded formulas. The order is
// the contract: by depth, then constructor (true, false, =, relation, /\,
// \/, exists), then symbol index, modulo commutativity of /\ and \/. "None
// at depth d" verdicts are relative to this enumeration.

#include "cohspec/logic.hpp"

namespace cohspec {

namespace detail {

// Term key: variables sort before applications; applications compare by
// declaration index of their head symbol, then by argument keys.
inline void term_key(const Signature& sig, const Term& t, std::vector<int>& out) {
  if (t.is_var()) {
    out.push_back(0);
    out.push_back(t.var);
    return;
  }
  int ix = 0;
  for (size_t i = 0; i < sig.funcs().size(); ++i)
    if (sig.funcs()[i].name == t.func) ix = static_cast<int>(i);
  out.push_back(1);
  out.push_back(ix);
  for (const auto& a : t.args) term_key(sig, a, out);
}

inline bool term_less(const Signature& sig, const Term& a, const Term& b) {
  std::vector<int> ka, kb;
  term_key(sig, a, ka);
  term_key(sig, b, kb);
  return ka < kb;
}

}  // namespace detail

struct EnumOptions {
  int depth = 3;       // formula depth (atoms count 1)
  int term_depth = 2;  // nesting of function applications
};

// All terms of the given sort over the context, depth-bounded, in key order.
inline std::vector<Term> enumerate_terms(const Signature& sig, const Context& ctx,
                                         const Sort& sort, int term_depth) {
  std::vector<Term> out;
  std::function<void(const Sort&, int, std::vector<Term>&)> gen =
      [&](const Sort& s, int d, std::vector<Term>& acc) {
        for (size_t i = 0; i < ctx.size(); ++i)
          if (ctx.sort(i) == s) acc.push_back(Term::variable(static_cast<int>(i)));
        if (d <= 0) return;
        for (const auto& f : sig.funcs()) {
          if (f.result != s) continue;
          // cartesian product of argument candidates at depth d-1
          std::vector<std::vector<Term>> cand;
          bool ok = true;
          for (const auto& as : f.args) {
            std::vector<Term> c;
            gen(as, d - 1, c);
            if (c.empty()) {
              ok = false;
              break;
            }
            cand.push_back(std::move(c));
          }
          if (!ok) continue;
          std::vector<size_t> pick(cand.size(), 0);
          while (true) {
            std::vector<Term> args;
            for (size_t i = 0; i < cand.size(); ++i) args.push_back(cand[i][pick[i]]);
            acc.push_back(Term::apply(f.name, args));
            size_t i = 0;
            for (; i < cand.size(); ++i) {
              if (++pick[i] < cand[i].size()) break;
              pick[i] = 0;
            }
            if (i == cand.size()) break;
          }
        }
      };
  gen(sort, term_depth - 1, out);
  // dedupe and order canonically
  std::sort(out.begin(), out.end(),
            [&](const Term& a, const Term& b) { return detail::term_less(sig, a, b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Depth-1 atoms over a context: true, false, equalities (per sort, ordered
// pairs modulo symmetry), then relation atoms.
inline std::vector<Formula> enumerate_atoms(const Signature& sig, const Context& ctx,
                                            int term_depth) {
  std::vector<Formula> out;
  out.push_back(Formula::truth(ctx));
  out.push_back(Formula::falsity(ctx));
  for (const auto& s : sig.sorts()) {
    std::vector<Term> ts = enumerate_terms(sig, ctx, s, term_depth);
    for (size_t i = 0; i < ts.size(); ++i)
      for (size_t j = i; j < ts.size(); ++j)
        out.push_back(Formula::eq(sig, ctx, ts[i], ts[j]));
  }
  for (const auto& r : sig.rels()) {
    std::vector<std::vector<Term>> cand;
    bool ok = true;
    for (const auto& as : r.args) {
      auto c = enumerate_terms(sig, ctx, as, term_depth);
      if (c.empty()) {
        ok = false;
        break;
      }
      cand.push_back(std::move(c));
    }
    if (!ok) continue;
    if (cand.empty()) {
      out.push_back(Formula::rel(sig, ctx, r.name, {}));
      continue;
    }
    std::vector<size_t> pick(cand.size(), 0);
    while (true) {
      std::vector<Term> args;
      for (size_t i = 0; i < cand.size(); ++i) args.push_back(cand[i][pick[i]]);
      out.push_back(Formula::rel(sig, ctx, r.name, args));
      size_t i = 0;
      for (; i < cand.size(); ++i) {
        if (++pick[i] < cand[i].size()) break;
        pick[i] = 0;
      }
      if (i == cand.size()) break;
    }
  }
  return out;
}

// Formulas of depth <= opts.depth over the context, layered by exact depth.
// Conjunction/disjunction pairs are cut modulo commutativity (i < j).
inline std::vector<Formula> enumerate_formulas(const Signature& sig,
                                               const Context& ctx,
                                               const EnumOptions& opts) {
  std::vector<std::vector<Formula>> layers;  // layers[d-1] = depth exactly d
  layers.push_back(enumerate_atoms(sig, ctx, opts.term_depth));
  for (int d = 2; d <= opts.depth; ++d) {
    std::vector<Formula> layer;
    // flatten pool of depth < d with running indices
    std::vector<const Formula*> pool;
    for (const auto& l : layers)
      for (const auto& f : l) pool.push_back(&f);
    size_t lower = pool.size() - layers.back().size();  // start of depth d-1
    // /\ then \/: one operand must have depth exactly d-1
    for (int op = 0; op < 2; ++op) {
      for (size_t i = 0; i < pool.size(); ++i)
        for (size_t j = i + 1; j < pool.size(); ++j) {
          if (i < lower && j < lower) continue;  // both below depth d-1
          Formula f = op == 0 ? Formula::conj(*pool[i], *pool[j])
                              : Formula::disj(*pool[i], *pool[j]);
          layer.push_back(std::move(f));
        }
    }
    // exists: bodies of depth exactly d-1 over the extended context
    for (const auto& s : sig.sorts()) {
      Context inner = ctx.extended(ctx.fresh_var("y"), s);
      EnumOptions sub = opts;
      sub.depth = d - 1;
      std::vector<Formula> bodies = enumerate_formulas(sig, inner, sub);
      for (const auto& b : bodies)
        if (b.depth() == d - 1) layer.push_back(Formula::exists(b));
    }
    layers.push_back(std::move(layer));
  }
  std::vector<Formula> out;
  for (auto& l : layers)
    for (auto& f : l) out.push_back(std::move(f));
  return out;
}

// Closed sentences (empty context).
inline std::vector<Formula> enumerate_sentences(const Signature& sig,
                                                const EnumOptions& opts) {
  return enumerate_formulas(sig, Context{}, opts);
}

}  // namespace cohspec
