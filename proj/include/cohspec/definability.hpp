#pragma once

// Equivariant families of tuple-sets over a model class: equivariance
// checking with counterexample isos, bounded definability search over the
// canonical formula enumeration, definable-piece covers, definable maps, and
// the unique equivariant extension of partial sections.

#include "cohspec/formula_enum.hpp"
#include "cohspec/spectrum.hpp"

namespace cohspec {

struct EquivariantFamily {
  Context ctx;
  std::vector<std::set<std::vector<int>>> sets;  // parallel to cls.models

  static EquivariantFamily from_formula(const ModelClass& cls, const Formula& f) {
    EquivariantFamily fam;
    fam.ctx = f.context();
    for (const auto& m : cls.models) fam.sets.push_back(eval(m, f).tuples);
    return fam;
  }
};

struct EquivarianceResult {
  bool equivariant = false;
  // witness on failure
  size_t model_a = 0, model_b = 0;
  std::optional<Homomorphism> witness_iso;
};

inline EquivarianceResult is_equivariant(const ModelClass& cls,
                                         const EquivariantFamily& fam) {
  EquivarianceResult res;
  if (fam.sets.size() != cls.models.size())
    throw Error("family does not match the model class");
  std::vector<Sort> sorts = fam.ctx.sorts();
  for (size_t i = 0; i < cls.models.size(); ++i) {
    for (const auto& t : fam.sets[i])
      for (size_t p = 0; p < sorts.size(); ++p)
        if (t[p] < 0 || t[p] >= cls.models[i].size(sorts[p]))
          throw Error("family tuple out of carrier");
    for (size_t j = 0; j < cls.models.size(); ++j) {
      for (const auto& iso : cls.isos(i, j)) {
        std::set<std::vector<int>> image;
        for (const auto& t : fam.sets[i]) image.insert(iso.apply_tuple(sorts, t));
        if (image != fam.sets[j]) {
          res.model_a = i;
          res.model_b = j;
          res.witness_iso = iso;
          return res;
        }
      }
    }
  }
  res.equivariant = true;
  return res;
}

struct DefinabilitySearch {
  std::optional<Formula> formula;
  std::string reason;      // set when no formula is returned
  long long candidates = 0;
};

// First formula in canonical order whose evaluation matches the family on
// every class member. Gated on equivariance (the theorem's "only if").
inline DefinabilitySearch find_defining_formula(const ModelClass& cls,
                                                const EquivariantFamily& fam,
                                                const EnumOptions& opts) {
  DefinabilitySearch out;
  EquivarianceResult eq = is_equivariant(cls, fam);
  if (!eq.equivariant) {
    out.reason = "not equivariant";
    return out;
  }
  for (const auto& f : enumerate_formulas(cls.theory.sig, fam.ctx, opts)) {
    ++out.candidates;
    bool all = true;
    for (size_t i = 0; i < cls.models.size(); ++i)
      if (eval(cls.models[i], f).tuples != fam.sets[i]) {
        all = false;
        break;
      }
    if (all) {
      // the certificate is re-verified by evaluation, not trusted search state
      for (size_t i = 0; i < cls.models.size(); ++i)
        if (eval(cls.models[i], f).tuples != fam.sets[i])
          throw Error("internal error: certificate failed re-verification");
      out.formula = f;
      return out;
    }
  }
  out.reason = "no formula at depth " + std::to_string(opts.depth) +
               " (relative to this class and enumeration)";
  return out;
}

struct PiecesResult {
  std::vector<Formula> pieces;  // psi with psi^M <= S_M everywhere
  bool covers = false;          // union equals the family
};

inline PiecesResult definable_pieces(const ModelClass& cls,
                                     const EquivariantFamily& fam,
                                     const EnumOptions& opts) {
  EquivarianceResult eq = is_equivariant(cls, fam);
  if (!eq.equivariant) throw Error("definable_pieces requires an equivariant family");
  PiecesResult out;
  std::vector<std::set<std::vector<int>>> covered(cls.models.size());
  for (const auto& f : enumerate_formulas(cls.theory.sig, fam.ctx, opts)) {
    bool inside = true;
    std::vector<std::set<std::vector<int>>> evals;
    for (size_t i = 0; i < cls.models.size(); ++i) {
      auto e = eval(cls.models[i], f).tuples;
      for (const auto& t : e)
        if (!fam.sets[i].count(t)) {
          inside = false;
          break;
        }
      if (!inside) break;
      evals.push_back(std::move(e));
    }
    if (!inside) continue;
    out.pieces.push_back(f);
    for (size_t i = 0; i < cls.models.size(); ++i)
      covered[i].insert(evals[i].begin(), evals[i].end());
  }
  out.covers = true;
  for (size_t i = 0; i < cls.models.size(); ++i)
    if (covered[i] != fam.sets[i]) out.covers = false;
  return out;
}

// ---------------------------------------------------------------------------
// Function families and definable maps.

struct FunctionFamily {
  Formula source;  // phi over context x
  Context target_ctx;
  // per model: tuple in phi^M -> value tuple over target_ctx
  std::vector<std::map<std::vector<int>, std::vector<int>>> maps;

  EquivariantFamily graph(const ModelClass& cls) const {
    EquivariantFamily g;
    Context joint = source.context();
    for (size_t i = 0; i < target_ctx.size(); ++i)
      joint.push(joint.fresh_var(target_ctx.name(i)), target_ctx.sort(i));
    g.ctx = joint;
    g.sets.resize(cls.models.size());
    for (size_t i = 0; i < maps.size(); ++i)
      for (const auto& [a, b] : maps[i]) {
        std::vector<int> t = a;
        t.insert(t.end(), b.begin(), b.end());
        g.sets[i].insert(t);
      }
    return g;
  }
};

// Is every map total on phi^M? (invariant of the type)
inline void validate_function_family(const ModelClass& cls, const FunctionFamily& ff) {
  if (ff.maps.size() != cls.models.size())
    throw Error("function family does not match the class");
  for (size_t i = 0; i < cls.models.size(); ++i) {
    auto dom = eval(cls.models[i], ff.source).tuples;
    if (dom.size() != ff.maps[i].size())
      throw Error("function family not total on its domain");
    for (const auto& [a, b] : ff.maps[i]) {
      if (!dom.count(a)) throw Error("function family defined off its domain");
      if (b.size() != ff.target_ctx.size())
        throw Error("function family value arity mismatch");
    }
  }
}

// sigma(x, y) whose evaluation is the graph of s_M in every model.
inline DefinabilitySearch find_defining_map(const ModelClass& cls,
                                            const FunctionFamily& ff,
                                            const EnumOptions& opts) {
  validate_function_family(cls, ff);
  EquivariantFamily g = ff.graph(cls);
  return find_defining_formula(cls, g, opts);
}

// ---------------------------------------------------------------------------
// Equivariant extension of a partial section.
//
// A section assigns to every groupoid point in V_{phi(k)} a value tuple; it
// is relatively equivariant when isos fixing the parameters carry values to
// values. The unique equivariant extension assigns to <M, a> the value
// rho_{alpha^-1}(e(nu)) for any iso alpha: M -> M_nu with alpha(a) = nu(k);
// independence from the witness is asserted.

struct PartialSection {
  BasicOpen open;       // V_{phi(k)}
  Context target_ctx;   // sorts of the values
  // values per groupoid point index (must cover exactly the points in V)
  std::map<size_t, std::vector<int>> values;
};

inline void check_relative_equivariance(const SpectrumGroupoid& g,
                                        const PartialSection& s) {
  const Context& ctx = s.open.formula.context();
  std::vector<Sort> tsorts = s.target_ctx.sorts();
  for (const auto& [i, vi] : s.values) {
    for (const auto& [j, vj] : s.values) {
      for (const auto& arrow : g.arrows_between(i, j)) {
        // does the iso fix the parameters?
        bool fixes = true;
        for (size_t p = 0; p < ctx.size(); ++p) {
          int a = g.points[i].value(s.open.params[p], ctx.sort(p));
          int b = g.points[j].value(s.open.params[p], ctx.sort(p));
          if (arrow.iso.maps.at(ctx.sort(p))[a] != b) {
            fixes = false;
            break;
          }
        }
        if (!fixes) continue;
        std::vector<int> mapped(vi.size());
        for (size_t q = 0; q < vi.size(); ++q)
          mapped[q] = arrow.iso.maps.at(tsorts[q])[vi[q]];
        if (mapped != vj)
          throw Error("section is not relatively equivariant");
      }
    }
  }
}

inline FunctionFamily equivariant_extension(const ModelClass& cls,
                                            const SpectrumGroupoid& g,
                                            const PartialSection& s) {
  // the section must be defined exactly on V
  for (size_t i = 0; i < g.points.size(); ++i) {
    bool in = in_open(g.points[i], s.open);
    if (in && !s.values.count(i))
      throw Error("section missing a value at a point of its open");
    if (!in && s.values.count(i))
      throw Error("section defined outside its open");
  }
  check_relative_equivariance(g, s);

  const Context& ctx = s.open.formula.context();
  std::vector<Sort> psorts = ctx.sorts();
  std::vector<Sort> tsorts = s.target_ctx.sorts();

  FunctionFamily ff;
  ff.source = s.open.formula;
  ff.target_ctx = s.target_ctx;
  ff.maps.resize(cls.models.size());

  for (size_t mi = 0; mi < cls.models.size(); ++mi) {
    const FiniteStructure& m = cls.models[mi];
    for (const auto& a : eval(m, s.open.formula).tuples) {
      std::optional<std::vector<int>> value;
      for (const auto& [pi, e_nu] : s.values) {
        const SpectrumPoint& nu = g.points[pi];
        for (const auto& alpha : enumerate_isos(m, nu.structure)) {
          bool matches = true;
          for (size_t p = 0; p < psorts.size(); ++p)
            if (alpha.maps.at(psorts[p])[a[p]] !=
                nu.value(s.open.params[p], psorts[p])) {
              matches = false;
              break;
            }
          if (!matches) continue;
          Homomorphism inv = invert(alpha);
          std::vector<int> cand(e_nu.size());
          for (size_t q = 0; q < e_nu.size(); ++q)
            cand[q] = inv.maps.at(tsorts[q])[e_nu[q]];
          if (value && *value != cand)
            throw Error("extension not well-defined: witness isos disagree");
          value = cand;
        }
      }
      if (!value)
        throw Error("no witness point for an element of the open; raise the "
                    "label budget");
      ff.maps[mi][a] = *value;
    }
  }
  return ff;
}

}  // namespace cohspec
