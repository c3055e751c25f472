#pragma once

// The desk-scale spectral groupoid: labelled models over a finite parameter
// budget, basic opens, the specialization closure on points and arrows,
// reassignment, connected components, and inclusion witnesses.
//
// The paper's labellings are infinite-to-one surjections from a cardinal;
// here environments are finite partial maps from a sorted parameter
// namespace, and surjectivity is dropped. Reassignment survives because the
// namespace never exhausts.

#include "cohspec/formula_enum.hpp"
#include "cohspec/models.hpp"
#include "cohspec/prover.hpp"

namespace cohspec {

// Parameters are sorted names; the same name may be defined at several sorts
// independently (per-sort label domains).
using ParamKey = std::pair<std::string, Sort>;

struct SpectrumPoint {
  FiniteStructure structure;
  std::map<ParamKey, int> env;

  bool defines(const std::string& name, const Sort& sort) const {
    return env.count({name, sort}) > 0;
  }
  int value(const std::string& name, const Sort& sort) const {
    return env.at({name, sort});
  }
  bool operator==(const SpectrumPoint& o) const {
    return structure == o.structure && env == o.env;
  }
};

// Basic open V_{phi(k)}: a formula with one parameter name per context
// variable (the parameter's sort is the variable's sort).
struct BasicOpen {
  Formula formula;
  std::vector<std::string> params;
};

inline BasicOpen make_open(Formula f, std::vector<std::string> params) {
  if (params.size() != f.context().size())
    throw Error("basic open needs one parameter per context variable");
  return BasicOpen{std::move(f), std::move(params)};
}

// Direct route: all parameters defined and the assigned tuple satisfies the
// formula.
inline bool in_open(const SpectrumPoint& mu, const BasicOpen& v) {
  const Context& ctx = v.formula.context();
  std::vector<int> tuple(ctx.size());
  for (size_t i = 0; i < ctx.size(); ++i) {
    if (!mu.defines(v.params[i], ctx.sort(i))) return false;
    tuple[i] = mu.value(v.params[i], ctx.sort(i));
  }
  return holds_at(mu.structure, v.formula, tuple);
}

// reassign: same structure, frozen parameters unchanged, retargets cleared
// (at every sort) and re-bound to the given values.
inline SpectrumPoint reassign(const SpectrumPoint& mu,
                              const std::vector<std::string>& frozen,
                              const std::vector<std::string>& retarget,
                              const std::vector<Sort>& sorts,
                              const std::vector<int>& values) {
  for (const auto& f : frozen)
    for (const auto& r : retarget)
      if (f == r) throw Error("reassign: frozen and retarget overlap on '" + f + "'");
  if (retarget.size() != values.size() || retarget.size() != sorts.size())
    throw Error("reassign: arity mismatch");
  SpectrumPoint nu = mu;
  for (const auto& r : retarget) {
    for (auto it = nu.env.begin(); it != nu.env.end();)
      it = it->first.first == r ? nu.env.erase(it) : std::next(it);
  }
  for (size_t i = 0; i < retarget.size(); ++i) {
    if (values[i] < 0 || values[i] >= mu.structure.size(sorts[i]))
      throw Error("reassign: value out of carrier");
    nu.env[{retarget[i], sorts[i]}] = values[i];
  }
  return nu;
}

// Topological route for the satisfaction lemma: the basic-open combination
// clauses, with the existential as a union over reassigned labellings.
inline bool in_open_topological(const SpectrumPoint& mu, const BasicOpen& v) {
  const Formula& f = v.formula;
  const Context& ctx = f.context();
  auto all_defined = [&]() {
    for (size_t i = 0; i < ctx.size(); ++i)
      if (!mu.defines(v.params[i], ctx.sort(i))) return false;
    return true;
  };
  switch (f.kind()) {
    case Conn::True:
      return all_defined();  // V_{k,x}
    case Conn::False:
      return false;  // the empty join
    case Conn::Eq:
    case Conn::Rel:
      return in_open(mu, v);  // prebasic opens hold by definition
    case Conn::And:
      return in_open_topological(mu, {f.left(), v.params}) &&
             in_open_topological(mu, {f.right(), v.params});
    case Conn::Or:
      return in_open_topological(mu, {f.left(), v.params}) ||
             in_open_topological(mu, {f.right(), v.params});
    case Conn::Exists: {
      if (!all_defined()) return false;
      // union over V_{body(k,l)} for a fresh parameter l
      std::string fresh = "l";
      {
        std::set<std::string> used(v.params.begin(), v.params.end());
        for (const auto& [key, _] : mu.env) used.insert(key.first);
        while (used.count(fresh)) fresh += "'";
      }
      const Sort& bs = f.bound_sort();
      std::vector<std::string> inner = v.params;
      inner.push_back(fresh);
      for (int b = 0; b < mu.structure.size(bs); ++b) {
        SpectrumPoint nu = reassign(mu, v.params, {fresh}, {bs}, {b});
        if (in_open_topological(nu, {f.body(), inner})) return true;
      }
      return false;
    }
    case Conn::Not:
      throw Error("basic opens are coherent");
  }
  return false;
}

// ---------------------------------------------------------------------------
// Specialization closure. mu belongs to the closure of nu when every
// parameter defined at mu is defined at nu and the label assignment extends
// to a homomorphism out of mu's model into nu's.

inline std::vector<Homomorphism> closure_homs(const SpectrumPoint& mu,
                                              const SpectrumPoint& nu) {
  for (const auto& [key, _] : mu.env)
    if (!nu.env.count(key)) return {};
  std::map<std::pair<Sort, int>, int> constraints;
  for (const auto& [key, val] : mu.env) {
    auto it = constraints.find({key.second, val});
    int want = nu.env.at(key);
    if (it != constraints.end() && it->second != want) return {};
    constraints[{key.second, val}] = want;
  }
  std::vector<Homomorphism> out;
  detail::search_maps(mu.structure, nu.structure, false, constraints,
                      [&](const Homomorphism& h) {
                        out.push_back(h);
                        return true;
                      });
  return out;
}

inline std::optional<Homomorphism> closure_leq(const SpectrumPoint& mu,
                                               const SpectrumPoint& nu) {
  for (const auto& [key, _] : mu.env)
    if (!nu.env.count(key)) return std::nullopt;
  std::map<std::pair<Sort, int>, int> constraints;
  for (const auto& [key, val] : mu.env) {
    auto it = constraints.find({key.second, val});
    int want = nu.env.at(key);
    if (it != constraints.end() && it->second != want) return std::nullopt;
    constraints[{key.second, val}] = want;
  }
  std::optional<Homomorphism> out;
  detail::search_maps(mu.structure, nu.structure, false, constraints,
                      [&](const Homomorphism& h) {
                        out = h;
                        return false;  // first in canonical order
                      });
  return out;
}

// Arrows of the spectral groupoid: isomorphisms of underlying models,
// labellings unconstrained.
struct SpectrumArrow {
  SpectrumPoint src, dst;
  Homomorphism iso;  // maps refer to src.structure -> dst.structure
};

// alpha in the closure of beta: endpoint closures hold and some pair of
// witnessing homomorphisms makes the square beta . h0 = h1 . alpha commute.
inline bool arrow_closure(const SpectrumArrow& alpha, const SpectrumArrow& beta) {
  auto h0s = closure_homs(alpha.src, beta.src);
  if (h0s.empty()) return false;
  auto h1s = closure_homs(alpha.dst, beta.dst);
  if (h1s.empty()) return false;
  for (const auto& h0 : h0s)
    for (const auto& h1 : h1s) {
      // compare beta o h0 with h1 o alpha per sort
      bool eq = true;
      for (const auto& s : alpha.src.structure.sig->sorts()) {
        int n = alpha.src.structure.size(s);
        for (int e = 0; e < n && eq; ++e)
          if (beta.iso.maps.at(s)[h0.maps.at(s)[e]] !=
              h1.maps.at(s)[alpha.iso.maps.at(s)[e]])
            eq = false;
        if (!eq) break;
      }
      if (eq) return true;
    }
  return false;
}

// ---------------------------------------------------------------------------
// The groupoid over an enumerated model class: all (model, environment)
// pairs over a label budget.

struct SpectrumGroupoid {
  Theory theory;
  int label_budget = 0;
  std::vector<std::string> label_names;
  std::vector<SpectrumPoint> points;

  std::vector<SpectrumArrow> arrows_between(size_t i, size_t j) const {
    std::vector<SpectrumArrow> out;
    for (const auto& iso : enumerate_isos(points[i].structure, points[j].structure))
      out.push_back(SpectrumArrow{points[i], points[j], iso});
    return out;
  }
};

inline SpectrumGroupoid build_groupoid(const ModelClass& cls, int label_budget) {
  SpectrumGroupoid g;
  g.theory = cls.theory;
  g.label_budget = label_budget;
  for (int i = 1; i <= label_budget; ++i)
    g.label_names.push_back("k" + std::to_string(i));
  for (const auto& m : cls.models) {
    // slots: (sort, name) in deterministic order; values -1 (undefined) or
    // an element of the sort's carrier
    std::vector<ParamKey> slots;
    for (const auto& s : cls.theory.sig.sorts())
      for (const auto& n : g.label_names) slots.push_back({n, s});
    std::vector<int> choice(slots.size(), -1);
    while (true) {
      SpectrumPoint p;
      p.structure = m;
      for (size_t i = 0; i < slots.size(); ++i)
        if (choice[i] >= 0) p.env[slots[i]] = choice[i];
      g.points.push_back(std::move(p));
      size_t i = 0;
      for (; i < slots.size(); ++i) {
        if (++choice[i] < m.size(slots[i].second)) break;
        choice[i] = -1;
      }
      if (i == slots.size()) break;
      if (slots.empty()) break;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Connected components of the specialization preorder, with the closed
// sentences (depth-bounded) shared by each component.

struct ComponentReport {
  std::vector<std::vector<size_t>> components;       // point indices
  std::vector<std::vector<Formula>> shared_sentences;
};

inline ComponentReport connected_components(const SpectrumGroupoid& g,
                                            const EnumOptions& sentence_opts) {
  size_t n = g.points.size();
  std::vector<size_t> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      if (find(i) == find(j)) continue;
      if (closure_leq(g.points[i], g.points[j]) ||
          closure_leq(g.points[j], g.points[i]))
        unite(i, j);
    }
  std::map<size_t, std::vector<size_t>> buckets;
  for (size_t i = 0; i < n; ++i) buckets[find(i)].push_back(i);

  ComponentReport rep;
  std::vector<Formula> sentences =
      enumerate_sentences(g.theory.sig, sentence_opts);
  for (const auto& [root, members] : buckets) {
    std::vector<Formula> shared;
    for (const auto& s : sentences) {
      bool all = true;
      for (size_t i : members)
        if (!holds_at(g.points[i].structure, s, {})) {
          all = false;
          break;
        }
      if (all) shared.push_back(s);
    }
    rep.components.push_back(members);
    rep.shared_sentences.push_back(std::move(shared));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Inclusion witness: a basic open contained in another, extensionally on the
// enumerated points, has the lemma's form; the provability side goes to the
// prover and Unknown is reported honestly.

struct InclusionWitness {
  bool extensional = false;
  std::optional<Sequent> sequent;
  std::optional<ProofOutcome> outcome;
};

inline InclusionWitness open_inclusion_witness(const SpectrumGroupoid& g,
                                               const BasicOpen& u,
                                               const BasicOpen& v,
                                               ProverBounds bounds = {}) {
  InclusionWitness w;
  for (const auto& p : g.points)
    if (in_open(p, u) && !in_open(p, v)) return w;
  w.extensional = true;

  // position of each v-parameter inside u's parameter list (sort-matched)
  const Context& uctx = u.formula.context();
  const Context& vctx = v.formula.context();
  std::vector<size_t> pos(vctx.size());
  std::vector<bool> used(uctx.size(), false);
  for (size_t i = 0; i < vctx.size(); ++i) {
    bool found = false;
    for (size_t q = 0; q < uctx.size(); ++q) {
      if (used[q]) continue;
      if (u.params[q] == v.params[i] && uctx.sort(q) == vctx.sort(i)) {
        pos[i] = q;
        used[q] = true;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error("inclusion witness: parameters of the outer open must occur "
                  "in the inner open");
  }
  // sequent context = v's context; remaining u-variables get existentials
  Context sctx;
  for (size_t i = 0; i < vctx.size(); ++i) sctx.push(vctx.name(i), vctx.sort(i));
  Context ext = sctx;
  std::vector<Term> assignment(uctx.size());
  std::vector<size_t> extra;  // u positions bound existentially
  for (size_t i = 0; i < vctx.size(); ++i)
    assignment[pos[i]] = Term::variable(static_cast<int>(i));
  for (size_t q = 0; q < uctx.size(); ++q) {
    if (used[q]) continue;
    assignment[q] = Term::variable(static_cast<int>(ext.size()));
    ext.push(ext.fresh_var(uctx.name(q)), uctx.sort(q));
    extra.push_back(q);
  }
  Formula lhs = substitute(g.theory.sig, u.formula, assignment, ext);
  for (size_t i = 0; i < extra.size(); ++i) lhs = Formula::exists(lhs);
  Formula rhs = v.formula;
  // align rhs onto sctx (names may differ; sorts agree by construction)
  {
    std::vector<Term> id;
    for (size_t i = 0; i < vctx.size(); ++i)
      id.push_back(Term::variable(static_cast<int>(i)));
    rhs = substitute(g.theory.sig, rhs, id, sctx);
  }
  Sequent sq{sctx, lhs, rhs};
  w.sequent = sq;
  w.outcome = prove(g.theory, sq, bounds);
  return w;
}

// Graph exports: points, arrows and specialization edges.
inline std::string groupoid_to_dot(const SpectrumGroupoid& g) {
  std::ostringstream os;
  os << "digraph spectrum {\n";
  for (size_t i = 0; i < g.points.size(); ++i) {
    os << "  p" << i << " [label=\"" << i << "\"];\n";
  }
  for (size_t i = 0; i < g.points.size(); ++i)
    for (size_t j = 0; j < g.points.size(); ++j) {
      if (i == j) continue;
      if (closure_leq(g.points[i], g.points[j]))
        os << "  p" << i << " -> p" << j << ";\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace cohspec
