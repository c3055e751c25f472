#pragma once

// Finite structures and their semantics: definable-set evaluation,
// satisfaction, homomorphism/isomorphism search, canonical forms and
// exhaustive model enumeration up to isomorphism.

#include <functional>
#include <numeric>

#include "cohspec/logic.hpp"

namespace cohspec {

// Per-sort carriers are {0..size-1}. Function tables are dense vectors in
// mixed-radix argument order; relation tables are sorted tuple sets.
struct FiniteStructure {
  std::shared_ptr<const Signature> sig;
  std::map<Sort, int> carrier;
  std::map<std::string, std::vector<int>> funcs;
  std::map<std::string, std::set<std::vector<int>>> rels;

  int size(const Sort& s) const {
    auto it = carrier.find(s);
    return it == carrier.end() ? 0 : it->second;
  }

  static size_t table_size(const FiniteStructure& m, const FuncSym& f) {
    size_t n = 1;
    for (const auto& s : f.args) n *= static_cast<size_t>(m.size(s));
    return n;
  }
  size_t tuple_index(const std::vector<Sort>& arg_sorts,
                     const std::vector<int>& tuple) const {
    size_t ix = 0;
    for (size_t i = 0; i < arg_sorts.size(); ++i)
      ix = ix * static_cast<size_t>(size(arg_sorts[i])) +
           static_cast<size_t>(tuple[i]);
    return ix;
  }

  int apply(const std::string& fname, const std::vector<int>& args) const {
    const FuncSym* f = sig->func(fname);
    assert(f);
    const auto& table = funcs.at(fname);
    return table[tuple_index(f->args, args)];
  }

  bool operator==(const FiniteStructure& o) const {
    return carrier == o.carrier && funcs == o.funcs && rels == o.rels;
  }
};

// Iterate all tuples over the carriers of a sort list; f gets each tuple.
inline void for_each_tuple(const FiniteStructure& m, const std::vector<Sort>& sorts,
                           const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> t(sorts.size(), 0);
  for (const auto& s : sorts)
    if (m.size(s) == 0 && !sorts.empty()) return;
  size_t k = sorts.size();
  if (k == 0) {
    f(t);
    return;
  }
  while (true) {
    f(t);
    size_t i = 0;
    for (; i < k; ++i) {
      if (++t[i] < m.size(sorts[i])) break;
      t[i] = 0;
    }
    if (i == k) return;
  }
}

inline int eval_term(const FiniteStructure& m, const Term& t,
                     const std::vector<int>& env) {
  if (t.is_var()) return env[t.var];
  std::vector<int> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(eval_term(m, a, env));
  return m.apply(t.func, args);
}

struct DefinableSet {
  Context ctx;
  std::set<std::vector<int>> tuples;

  bool operator==(const DefinableSet& o) const {
    return ctx == o.ctx && tuples == o.tuples;
  }
};

inline bool holds_at(const FiniteStructure& m, const Formula& f,
                     const std::vector<int>& env) {
  switch (f.kind()) {
    case Conn::True:
      return true;
    case Conn::False:
      return false;
    case Conn::Eq:
      return eval_term(m, f.terms()[0], env) == eval_term(m, f.terms()[1], env);
    case Conn::Rel: {
      std::vector<int> t;
      t.reserve(f.terms().size());
      for (const auto& a : f.terms()) t.push_back(eval_term(m, a, env));
      const auto it = m.rels.find(f.rel_name());
      return it != m.rels.end() && it->second.count(t) > 0;
    }
    case Conn::And:
      return holds_at(m, f.left(), env) && holds_at(m, f.right(), env);
    case Conn::Or:
      return holds_at(m, f.left(), env) || holds_at(m, f.right(), env);
    case Conn::Exists: {
      const Sort& s = f.bound_sort();
      std::vector<int> e2 = env;
      e2.push_back(0);
      for (int b = 0; b < m.size(s); ++b) {
        e2.back() = b;
        if (holds_at(m, f.body(), e2)) return true;
      }
      return false;
    }
    case Conn::Not:
      return !holds_at(m, f.body(), env);
  }
  return false;
}

// { a | M |= phi(a) }, by structural recursion over the formula.
inline DefinableSet eval(const FiniteStructure& m, const Formula& f) {
  DefinableSet d;
  d.ctx = f.context();
  for_each_tuple(m, f.context().sorts(), [&](const std::vector<int>& t) {
    if (holds_at(m, f, t)) d.tuples.insert(t);
  });
  return d;
}

// M |= phi |- psi  iff  phi^M is contained in psi^M.
inline bool satisfies(const FiniteStructure& m, const Sequent& sq) {
  bool ok = true;
  for_each_tuple(m, sq.ctx.sorts(), [&](const std::vector<int>& t) {
    if (!ok) return;
    if (holds_at(m, sq.lhs, t) && !holds_at(m, sq.rhs, t)) ok = false;
  });
  return ok;
}

inline bool is_model(const FiniteStructure& m, const Theory& th) {
  for (const auto& ax : th.axioms)
    if (!satisfies(m, ax)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Homomorphisms and isomorphisms.

struct Homomorphism {
  const FiniteStructure* source = nullptr;
  const FiniteStructure* target = nullptr;
  std::map<Sort, std::vector<int>> maps;  // per-sort element maps

  int operator()(const Sort& s, int a) const { return maps.at(s)[a]; }
  std::vector<int> apply_tuple(const std::vector<Sort>& sorts,
                               const std::vector<int>& t) const {
    std::vector<int> r(t.size());
    for (size_t i = 0; i < t.size(); ++i) r[i] = maps.at(sorts[i])[t[i]];
    return r;
  }
};

inline bool is_homomorphism(const FiniteStructure& a, const FiniteStructure& b,
                            const std::map<Sort, std::vector<int>>& maps) {
  for (const auto& f : a.sig->funcs()) {
    bool ok = true;
    for_each_tuple(a, f.args, [&](const std::vector<int>& t) {
      if (!ok) return;
      std::vector<int> ht(t.size());
      for (size_t i = 0; i < t.size(); ++i) ht[i] = maps.at(f.args[i])[t[i]];
      if (maps.at(f.result)[a.apply(f.name, t)] != b.apply(f.name, ht)) ok = false;
    });
    if (!ok) return false;
  }
  for (const auto& r : a.sig->rels()) {
    auto it = a.rels.find(r.name);
    if (it == a.rels.end()) continue;
    const auto bt = b.rels.find(r.name);
    for (const auto& t : it->second) {
      std::vector<int> ht(t.size());
      for (size_t i = 0; i < t.size(); ++i) ht[i] = maps.at(r.args[i])[t[i]];
      if (bt == b.rels.end() || !bt->second.count(ht)) return false;
    }
  }
  return true;
}

namespace detail {

// Exhaustive backtracking over per-sort element maps, in deterministic
// lexicographic order. `constraints` may pin individual images; `bijective`
// restricts to per-sort bijections.
inline void search_maps(const FiniteStructure& a, const FiniteStructure& b,
                        bool bijective,
                        const std::map<std::pair<Sort, int>, int>& constraints,
                        const std::function<bool(const Homomorphism&)>& emit) {
  // flatten (sort, element) slots
  std::vector<std::pair<Sort, int>> slots;
  for (const auto& s : a.sig->sorts()) {
    if (bijective && a.size(s) != b.size(s)) return;
    for (int e = 0; e < a.size(s); ++e) slots.emplace_back(s, e);
  }
  std::map<Sort, std::vector<int>> maps;
  for (const auto& s : a.sig->sorts()) maps[s].assign(a.size(s), -1);

  bool stop = false;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (stop) return;
    if (i == slots.size()) {
      if (is_homomorphism(a, b, maps)) {
        Homomorphism h;
        h.source = &a;
        h.target = &b;
        h.maps = maps;
        if (!emit(h)) stop = true;
      }
      return;
    }
    const auto& [s, e] = slots[i];
    auto cit = constraints.find({s, e});
    for (int img = 0; img < b.size(s); ++img) {
      if (cit != constraints.end() && cit->second != img) continue;
      if (bijective) {
        bool used = false;
        for (int e2 = 0; e2 < e; ++e2)
          if (maps[s][e2] == img) used = true;
        if (used) continue;
      }
      maps[s][e] = img;
      // prune: check function entries and relation tuples fully mapped
      bool ok = true;
      for (const auto& f : a.sig->funcs()) {
        if (!ok) break;
        for_each_tuple(a, f.args, [&](const std::vector<int>& t) {
          if (!ok) return;
          std::vector<int> ht(t.size());
          for (size_t j = 0; j < t.size(); ++j) {
            ht[j] = maps[f.args[j]][t[j]];
            if (ht[j] < 0) {
              return;
            }
          }
          int res = maps[f.result][a.apply(f.name, t)];
          if (res >= 0 && res != b.apply(f.name, ht)) ok = false;
        });
      }
      if (ok) rec(i + 1);
      if (stop) return;
      maps[s][e] = -1;
    }
  };
  rec(0);
}

}  // namespace detail

inline std::vector<Homomorphism> enumerate_homs(const FiniteStructure& a,
                                                const FiniteStructure& b) {
  std::vector<Homomorphism> out;
  detail::search_maps(a, b, false, {}, [&](const Homomorphism& h) {
    out.push_back(h);
    return true;
  });
  return out;
}

inline std::vector<Homomorphism> enumerate_isos(const FiniteStructure& a,
                                                const FiniteStructure& b) {
  std::vector<Homomorphism> out;
  detail::search_maps(a, b, true, {}, [&](const Homomorphism& h) {
    // a bijective homomorphism between finite structures whose inverse is
    // also a homomorphism
    std::map<Sort, std::vector<int>> inv;
    for (const auto& s : a.sig->sorts()) {
      inv[s].assign(b.size(s), -1);
      for (int e = 0; e < a.size(s); ++e) inv[s][h.maps.at(s)[e]] = e;
    }
    if (is_homomorphism(b, a, inv)) out.push_back(h);
    return true;
  });
  return out;
}

inline Homomorphism identity_hom(const FiniteStructure& m) {
  Homomorphism h;
  h.source = &m;
  h.target = &m;
  for (const auto& s : m.sig->sorts()) {
    std::vector<int> v(m.size(s));
    std::iota(v.begin(), v.end(), 0);
    h.maps[s] = v;
  }
  return h;
}

inline Homomorphism compose(const Homomorphism& g, const Homomorphism& f) {
  // (g o f)(x) = g(f(x))
  Homomorphism h;
  h.source = f.source;
  h.target = g.target;
  for (const auto& [s, fm] : f.maps) {
    std::vector<int> v(fm.size());
    for (size_t i = 0; i < fm.size(); ++i) v[i] = g.maps.at(s)[fm[i]];
    h.maps[s] = v;
  }
  return h;
}

inline Homomorphism invert(const Homomorphism& h) {
  Homomorphism g;
  g.source = h.target;
  g.target = h.source;
  for (const auto& [s, m] : h.maps) {
    std::vector<int> v(m.size(), -1);
    for (size_t i = 0; i < m.size(); ++i) v[m[i]] = static_cast<int>(i);
    g.maps[s] = v;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Canonical forms: serialize under the lexicographically least relabeling.
// Equal strings iff isomorphic (exact minimization over all per-sort
// permutations; fine at desk scale).

namespace detail {

inline std::string serialize_under(const FiniteStructure& m,
                                   const std::map<Sort, std::vector<int>>& perm) {
  // perm maps old element -> new element; serialize tables in new labels.
  std::string s;
  for (const auto& so : m.sig->sorts()) s += std::to_string(m.size(so)) + ";";
  for (const auto& f : m.sig->funcs()) {
    s += f.name + ":";
    // iterate argument tuples in NEW labels, output new-labelled results
    std::vector<Sort> args = f.args;
    std::map<Sort, std::vector<int>> inv;
    for (const auto& [so, p] : perm) {
      inv[so].assign(p.size(), -1);
      for (size_t i = 0; i < p.size(); ++i) inv[so][p[i]] = static_cast<int>(i);
    }
    for_each_tuple(m, args, [&](const std::vector<int>& newt) {
      std::vector<int> oldt(newt.size());
      for (size_t i = 0; i < newt.size(); ++i) oldt[i] = inv.at(args[i])[newt[i]];
      s += std::to_string(perm.at(f.result)[m.apply(f.name, oldt)]) + ",";
    });
    s += ";";
  }
  for (const auto& r : m.sig->rels()) {
    s += r.name + ":";
    std::set<std::vector<int>> tuples;
    auto it = m.rels.find(r.name);
    if (it != m.rels.end())
      for (const auto& t : it->second) {
        std::vector<int> nt(t.size());
        for (size_t i = 0; i < t.size(); ++i) nt[i] = perm.at(r.args[i])[t[i]];
        tuples.insert(nt);
      }
    for (const auto& t : tuples) {
      for (int e : t) s += std::to_string(e) + ".";
      s += ",";
    }
    s += ";";
  }
  return s;
}

inline void for_each_perm_product(
    const FiniteStructure& m,
    const std::function<void(const std::map<Sort, std::vector<int>>&)>& f) {
  std::vector<Sort> sorts = m.sig->sorts();
  std::map<Sort, std::vector<int>> perm;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == sorts.size()) {
      f(perm);
      return;
    }
    std::vector<int> p(m.size(sorts[i]));
    std::iota(p.begin(), p.end(), 0);
    do {
      perm[sorts[i]] = p;
      rec(i + 1);
    } while (std::next_permutation(p.begin(), p.end()));
    perm.erase(sorts[i]);
  };
  rec(0);
}

}  // namespace detail

inline std::string canonical_form(const FiniteStructure& m) {
  std::string best;
  detail::for_each_perm_product(m, [&](const std::map<Sort, std::vector<int>>& p) {
    std::string s = detail::serialize_under(m, p);
    if (best.empty() || s < best) best = std::move(s);
  });
  if (best.empty()) best = detail::serialize_under(m, {});
  return best;
}

// The permutation realizing the canonical form (old label -> new label).
inline std::map<Sort, std::vector<int>> canonical_permutation(const FiniteStructure& m) {
  std::string best;
  std::map<Sort, std::vector<int>> bestp;
  detail::for_each_perm_product(m, [&](const std::map<Sort, std::vector<int>>& p) {
    std::string s = detail::serialize_under(m, p);
    if (best.empty() || s < best) {
      best = std::move(s);
      bestp = p;
    }
  });
  return bestp;
}

inline FiniteStructure relabel(const FiniteStructure& m,
                               const std::map<Sort, std::vector<int>>& perm) {
  FiniteStructure r;
  r.sig = m.sig;
  r.carrier = m.carrier;
  std::map<Sort, std::vector<int>> inv;
  for (const auto& [so, p] : perm) {
    inv[so].assign(p.size(), -1);
    for (size_t i = 0; i < p.size(); ++i) inv[so][p[i]] = static_cast<int>(i);
  }
  for (const auto& f : m.sig->funcs()) {
    std::vector<int> table(FiniteStructure::table_size(m, f));
    for_each_tuple(m, f.args, [&](const std::vector<int>& newt) {
      std::vector<int> oldt(newt.size());
      for (size_t i = 0; i < newt.size(); ++i) oldt[i] = inv.at(f.args[i])[newt[i]];
      table[r.tuple_index(f.args, newt)] = perm.at(f.result)[m.apply(f.name, oldt)];
    });
    r.funcs[f.name] = std::move(table);
  }
  for (const auto& rl : m.sig->rels()) {
    auto it = m.rels.find(rl.name);
    std::set<std::vector<int>> tuples;
    if (it != m.rels.end())
      for (const auto& t : it->second) {
        std::vector<int> nt(t.size());
        for (size_t i = 0; i < t.size(); ++i) nt[i] = perm.at(rl.args[i])[t[i]];
        tuples.insert(nt);
      }
    r.rels[rl.name] = std::move(tuples);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Model enumeration.

// Three-valued evaluation over a partially filled structure: function cells
// may be -1 (undefined), relation tuples may be undecided. Used to prune the
// enumeration search; only a definite violation (lhs true, rhs false) prunes.
namespace detail {

enum class TV { False, True, Unknown };

struct PartialModel {
  const Signature* sig;
  std::map<Sort, int> carrier;
  std::map<std::string, std::vector<int>> funcs;     // -1 = undefined
  std::map<std::string, std::vector<int>> relbits;   // -1/0/1 per tuple index

  int size(const Sort& s) const { return carrier.at(s); }
  size_t tuple_index(const std::vector<Sort>& arg_sorts,
                     const std::vector<int>& tuple) const {
    size_t ix = 0;
    for (size_t i = 0; i < arg_sorts.size(); ++i)
      ix = ix * static_cast<size_t>(size(arg_sorts[i])) +
           static_cast<size_t>(tuple[i]);
    return ix;
  }
};

inline int eval_term3(const PartialModel& m, const Term& t,
                      const std::vector<int>& env) {
  if (t.is_var()) return env[t.var];
  const FuncSym* f = m.sig->func(t.func);
  std::vector<int> args(t.args.size());
  for (size_t i = 0; i < t.args.size(); ++i) {
    args[i] = eval_term3(m, t.args[i], env);
    if (args[i] < 0) return -1;
  }
  return m.funcs.at(t.func)[m.tuple_index(f->args, args)];
}

inline TV eval3(const PartialModel& m, const Formula& f, const std::vector<int>& env) {
  switch (f.kind()) {
    case Conn::True:
      return TV::True;
    case Conn::False:
      return TV::False;
    case Conn::Eq: {
      int a = eval_term3(m, f.terms()[0], env);
      int b = eval_term3(m, f.terms()[1], env);
      if (a < 0 || b < 0) return TV::Unknown;
      return a == b ? TV::True : TV::False;
    }
    case Conn::Rel: {
      const RelSym* r = m.sig->rel(f.rel_name());
      std::vector<int> t(f.terms().size());
      for (size_t i = 0; i < t.size(); ++i) {
        t[i] = eval_term3(m, f.terms()[i], env);
        if (t[i] < 0) return TV::Unknown;
      }
      int bit = m.relbits.at(f.rel_name())[m.tuple_index(r->args, t)];
      if (bit < 0) return TV::Unknown;
      return bit ? TV::True : TV::False;
    }
    case Conn::And: {
      TV a = eval3(m, f.left(), env);
      if (a == TV::False) return TV::False;
      TV b = eval3(m, f.right(), env);
      if (b == TV::False) return TV::False;
      if (a == TV::True && b == TV::True) return TV::True;
      return TV::Unknown;
    }
    case Conn::Or: {
      TV a = eval3(m, f.left(), env);
      if (a == TV::True) return TV::True;
      TV b = eval3(m, f.right(), env);
      if (b == TV::True) return TV::True;
      if (a == TV::False && b == TV::False) return TV::False;
      return TV::Unknown;
    }
    case Conn::Exists: {
      const Sort& s = f.bound_sort();
      std::vector<int> e2 = env;
      e2.push_back(0);
      bool unknown = false;
      for (int b = 0; b < m.size(s); ++b) {
        e2.back() = b;
        TV v = eval3(m, f.body(), e2);
        if (v == TV::True) return TV::True;
        if (v == TV::Unknown) unknown = true;
      }
      return unknown ? TV::Unknown : TV::False;
    }
    case Conn::Not: {
      TV v = eval3(m, f.body(), env);
      if (v == TV::True) return TV::False;
      if (v == TV::False) return TV::True;
      return TV::Unknown;
    }
  }
  return TV::Unknown;
}

// Definitely violated on some ground tuple?
inline bool violates(const PartialModel& m, const Sequent& sq) {
  bool bad = false;
  std::vector<Sort> sorts = sq.ctx.sorts();
  for (const auto& s : sorts)
    if (m.size(s) == 0) return false;
  std::vector<int> t(sorts.size(), 0);
  while (true) {
    if (eval3(m, sq.lhs, t) == TV::True && eval3(m, sq.rhs, t) == TV::False)
      return true;
    size_t i = 0;
    for (; i < sorts.size(); ++i) {
      if (++t[i] < m.size(sorts[i])) break;
      t[i] = 0;
    }
    if (i == sorts.size()) break;
    if (sorts.empty()) break;
  }
  return bad;
}

}  // namespace detail

// Models of a theory up to isomorphism, with canonical forms, in
// lexicographic canonical-form order. The per-sort size bound applies to
// each carrier separately. `hom_cache`/`iso_cache` are filled on demand.
struct ModelClass {
  Theory theory;
  int bound = 0;
  std::vector<FiniteStructure> models;
  std::vector<std::string> canon;

  mutable std::map<std::pair<size_t, size_t>, std::vector<Homomorphism>> hom_cache;
  mutable std::map<std::pair<size_t, size_t>, std::vector<Homomorphism>> iso_cache;

  const std::vector<Homomorphism>& homs(size_t i, size_t j) const {
    auto key = std::make_pair(i, j);
    auto it = hom_cache.find(key);
    if (it == hom_cache.end())
      it = hom_cache.emplace(key, enumerate_homs(models[i], models[j])).first;
    return it->second;
  }
  const std::vector<Homomorphism>& isos(size_t i, size_t j) const {
    auto key = std::make_pair(i, j);
    auto it = iso_cache.find(key);
    if (it == iso_cache.end())
      it = iso_cache.emplace(key, enumerate_isos(models[i], models[j])).first;
    return it->second;
  }
  std::optional<size_t> find(const FiniteStructure& m) const {
    std::string c = canonical_form(m);
    for (size_t i = 0; i < canon.size(); ++i)
      if (canon[i] == c) return i;
    return std::nullopt;
  }
};

// Exhaustive generate-and-reduce with 3-valued pruning. Cells are filled in
// a fixed order (constants, then unary, then higher arity); every completed
// candidate is checked with the full evaluator before canonicalization.
inline ModelClass enumerate_models(const Theory& th, int n,
                                   long long budget = 200000000LL) {
  if (n < 0) throw Error("negative size bound");
  {
    auto diags = well_formed(th);
    if (!diags.empty())
      throw Error("ill-formed theory: " + diags[0].where + ": " + diags[0].message);
  }
  ModelClass cls;
  cls.theory = th;
  cls.bound = n;
  auto sig = std::make_shared<Signature>(th.sig);

  std::vector<Sort> sorts = th.sig.sorts();
  std::vector<int> sizes(sorts.size(), 0);

  std::set<std::string> seen;
  std::vector<std::pair<std::string, FiniteStructure>> found;
  long long nodes = 0;

  // symbol fill order: by arity, then declaration index
  std::vector<const FuncSym*> forder;
  for (const auto& f : th.sig.funcs()) forder.push_back(&f);
  std::stable_sort(forder.begin(), forder.end(),
                   [](const FuncSym* a, const FuncSym* b) {
                     return a->args.size() < b->args.size();
                   });

  std::function<void()> complete = [&]() {};

  auto run_sizes = [&]() {
    detail::PartialModel pm;
    pm.sig = &th.sig;
    for (size_t i = 0; i < sorts.size(); ++i) pm.carrier[sorts[i]] = sizes[i];

    // constants with empty result carrier: no total interpretation exists
    for (const auto& f : th.sig.funcs()) {
      size_t dom = 1;
      for (const auto& a : f.args) dom *= static_cast<size_t>(pm.size(a));
      if (dom > 0 && pm.size(f.result) == 0) return;
      pm.funcs[f.name].assign(dom, -1);
    }
    for (const auto& r : th.sig.rels()) {
      size_t dom = 1;
      for (const auto& a : r.args) dom *= static_cast<size_t>(pm.size(a));
      pm.relbits[r.name].assign(dom, -1);
    }

    // flatten cells: function cells first (by chosen order), then relation bits
    struct Cell {
      bool is_rel;
      std::string sym;
      size_t index;
      int domain;  // result carrier size, or 2 for relation bits
    };
    std::vector<Cell> cells;
    for (const FuncSym* f : forder)
      for (size_t i = 0; i < pm.funcs[f->name].size(); ++i)
        cells.push_back({false, f->name, i, pm.size(f->result)});
    for (const auto& r : th.sig.rels())
      for (size_t i = 0; i < pm.relbits[r.name].size(); ++i)
        cells.push_back({true, r.name, i, 2});

    std::function<void(size_t)> rec = [&](size_t ci) {
      if (++nodes > budget)
        throw BoundExceeded("enumeration",
                            "model enumeration exceeded the work budget");
      if (ci == cells.size()) {
        FiniteStructure m;
        m.sig = sig;
        m.carrier = pm.carrier;
        m.funcs = pm.funcs;
        for (const auto& r : th.sig.rels()) {
          std::set<std::vector<int>> tuples;
          const RelSym* rs = th.sig.rel(r.name);
          for_each_tuple(m, rs->args, [&](const std::vector<int>& t) {
            if (pm.relbits[r.name][pm.tuple_index(rs->args, t)] == 1)
              tuples.insert(t);
          });
          m.rels[r.name] = std::move(tuples);
        }
        if (!is_model(m, th)) return;  // partial pruning is conservative
        std::string c = canonical_form(m);
        if (seen.insert(c).second) {
          auto perm = canonical_permutation(m);
          found.emplace_back(c, relabel(m, perm));
        }
        return;
      }
      Cell& c = cells[ci];
      for (int v = 0; v < c.domain; ++v) {
        if (c.is_rel)
          pm.relbits[c.sym][c.index] = v;
        else
          pm.funcs[c.sym][c.index] = v;
        bool pruned = false;
        for (const auto& ax : th.axioms)
          if (detail::violates(pm, ax)) {
            pruned = true;
            break;
          }
        if (!pruned) rec(ci + 1);
      }
      if (c.is_rel)
        pm.relbits[c.sym][c.index] = -1;
      else
        pm.funcs[c.sym][c.index] = -1;
    };
    rec(0);
  };

  // iterate carrier-size vectors
  if (sorts.empty()) {
    run_sizes();
  } else {
    while (true) {
      run_sizes();
      size_t i = 0;
      for (; i < sorts.size(); ++i) {
        if (++sizes[i] <= n) break;
        sizes[i] = 0;
      }
      if (i == sorts.size()) break;
    }
  }

  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [c, m] : found) {
    cls.canon.push_back(c);
    cls.models.push_back(std::move(m));
  }
  return cls;
}

}  // namespace cohspec
