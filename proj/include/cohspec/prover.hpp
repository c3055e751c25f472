#pragma once

// Bounded forward chaining (chase) for coherent sequents. Axioms are
// normalized to rules with flat atom bodies; equalities go through a
// union-find with eager congruence closure; disjunctions branch. Outcomes
// are Proved (with a trace), Countermodel (re-checked against the models
// module) or Unknown with the bound that fired.

#include <deque>

#include "cohspec/models.hpp"

namespace cohspec {

struct ProverBounds {
  int max_elements = 8;
  int max_firings = 500;
  int max_branches = 64;
};

struct TraceStep {
  int branch;
  int rule;         // rule index; -1 for initial goal assertion
  std::string note; // axiom text or action description
  std::vector<int> binding;
};

enum class ProofStatus { Proved, Countermodel, Unknown };

struct ProofOutcome {
  ProofStatus status;
  std::optional<FiniteStructure> countermodel;
  std::string bound_report;  // for Unknown
  std::vector<TraceStep> trace;
};

namespace chase {

// Flat rule bodies: relation atoms, function-graph atoms and equalities over
// rule variables. Rule variables = sequent context + existential/auxiliary
// variables extracted from the lhs.
struct FlatAtom {
  enum Kind { Rel, FuncEq, VarEq } kind;
  std::string sym;
  std::vector<int> args;  // rule-variable indices
  int result = -1;        // FuncEq result variable; VarEq uses args[0],args[1]
};

struct Rule {
  int axiom_index;         // -1 for built-in function totality
  std::string label;
  std::vector<Sort> vars;  // rule variable sorts
  size_t ctx_size;         // prefix shared with the rhs context
  std::vector<FlatAtom> body;
  Formula rhs;             // over the original sequent context
};

// Flatten a term: emit FuncEq atoms for applications, return the variable
// holding the term's value.
inline int flatten_term(const Signature& sig, const Term& t, const Context& ctx,
                        std::vector<Sort>& vars, std::vector<FlatAtom>& atoms) {
  if (t.is_var()) return t.var;
  const FuncSym* f = sig.func(t.func);
  std::vector<int> args;
  for (const auto& a : t.args)
    args.push_back(flatten_term(sig, a, ctx, vars, atoms));
  int v = static_cast<int>(vars.size());
  vars.push_back(f->result);
  atoms.push_back(FlatAtom{FlatAtom::FuncEq, t.func, args, v});
  return v;
}

// A coherent formula over `ctx` becomes a disjunction of (extra vars, atoms).
struct BodyAlt {
  std::vector<Sort> vars;  // full variable list (ctx sorts first)
  std::vector<FlatAtom> atoms;
};

inline std::vector<BodyAlt> flatten_lhs(const Signature& sig, const Formula& f,
                                        const Context& ctx,
                                        const std::vector<int>& varmap,
                                        const BodyAlt& base) {
  // varmap: formula-context index -> rule variable index
  switch (f.kind()) {
    case Conn::True:
      return {base};
    case Conn::False:
      return {};
    case Conn::Eq: {
      BodyAlt alt = base;
      // remap context variables inside the terms
      std::function<Term(const Term&)> remap = [&](const Term& t) -> Term {
        if (t.is_var()) return Term::variable(varmap[t.var]);
        Term r = t;
        for (auto& a : r.args) a = remap(a);
        return r;
      };
      Context dummy;  // flatten_term only uses var indices, already remapped
      int a = flatten_term(sig, remap(f.terms()[0]), dummy, alt.vars, alt.atoms);
      int b = flatten_term(sig, remap(f.terms()[1]), dummy, alt.vars, alt.atoms);
      alt.atoms.push_back(FlatAtom{FlatAtom::VarEq, "", {a, b}, -1});
      return {alt};
    }
    case Conn::Rel: {
      BodyAlt alt = base;
      std::function<Term(const Term&)> remap = [&](const Term& t) -> Term {
        if (t.is_var()) return Term::variable(varmap[t.var]);
        Term r = t;
        for (auto& a : r.args) a = remap(a);
        return r;
      };
      Context dummy;
      std::vector<int> args;
      for (const auto& t : f.terms())
        args.push_back(flatten_term(sig, remap(t), dummy, alt.vars, alt.atoms));
      alt.atoms.push_back(FlatAtom{FlatAtom::Rel, f.rel_name(), args, -1});
      return {alt};
    }
    case Conn::And: {
      std::vector<BodyAlt> out;
      for (const auto& l : flatten_lhs(sig, f.left(), ctx, varmap, base))
        for (const auto& r : flatten_lhs(sig, f.right(), ctx, varmap, l))
          out.push_back(r);
      return out;
    }
    case Conn::Or: {
      std::vector<BodyAlt> out;
      for (const auto& l : flatten_lhs(sig, f.left(), ctx, varmap, base))
        out.push_back(l);
      for (const auto& r : flatten_lhs(sig, f.right(), ctx, varmap, base))
        out.push_back(r);
      return out;
    }
    case Conn::Exists: {
      BodyAlt b2 = base;
      int v = static_cast<int>(b2.vars.size());
      b2.vars.push_back(f.bound_sort());
      std::vector<int> vm2 = varmap;
      vm2.push_back(v);
      return flatten_lhs(sig, f.body(), f.body().context(), vm2, b2);
    }
    case Conn::Not:
      throw Error("classical connective in chase");
  }
  return {};
}

inline std::vector<Rule> compile_rules(const Theory& th) {
  std::vector<Rule> rules;
  for (size_t i = 0; i < th.axioms.size(); ++i) {
    const Sequent& ax = th.axioms[i];
    BodyAlt base;
    base.vars = ax.ctx.sorts();
    std::vector<int> varmap;
    for (size_t v = 0; v < ax.ctx.size(); ++v) varmap.push_back(static_cast<int>(v));
    for (const auto& alt : flatten_lhs(th.sig, ax.lhs, ax.ctx, varmap, base)) {
      Rule r;
      r.axiom_index = static_cast<int>(i);
      r.label = sequent_to_string(ax);
      r.vars = alt.vars;
      r.ctx_size = ax.ctx.size();
      r.body = alt.atoms;
      r.rhs = ax.rhs;
      rules.push_back(std::move(r));
    }
  }
  // function totality: |- exists y. f(x) = y
  for (const auto& f : th.sig.funcs()) {
    Rule r;
    r.axiom_index = -1;
    r.label = "totality of " + f.name;
    r.vars = f.args;
    r.ctx_size = f.args.size();
    Context ctx;
    for (size_t i = 0; i < f.args.size(); ++i)
      ctx.push("x" + std::to_string(i + 1), f.args[i]);
    std::vector<Term> vars;
    for (size_t i = 0; i < f.args.size(); ++i)
      vars.push_back(Term::variable(static_cast<int>(i)));
    Context inner = ctx.extended(ctx.fresh_var("y"), f.result);
    Formula body = Formula::eq(th.sig, inner, Term::apply(f.name, vars),
                               Term::variable(static_cast<int>(ctx.size())));
    r.rhs = Formula::exists(body);
    rules.push_back(std::move(r));
  }
  return rules;
}

// Chase state: growing sorted carrier with union-find, relation facts and
// function graph entries (root-canonical).
struct State {
  const Signature* sig;
  std::vector<Sort> elem_sort;  // per element id
  std::vector<int> parent;
  std::set<std::pair<std::string, std::vector<int>>> facts;
  std::map<std::pair<std::string, std::vector<int>>, int> graph;
  bool closed = false;

  int find(int x) const {
    while (parent[x] != x) x = parent[x];
    return x;
  }
  int add_element(const Sort& s) {
    elem_sort.push_back(s);
    parent.push_back(static_cast<int>(parent.size()));
    return static_cast<int>(parent.size()) - 1;
  }
  int live_count() const {
    int n = 0;
    for (size_t i = 0; i < parent.size(); ++i)
      if (parent[i] == static_cast<int>(i)) ++n;
    return n;
  }
  std::vector<int> elements_of(const Sort& s) const {
    std::vector<int> out;
    for (size_t i = 0; i < parent.size(); ++i)
      if (parent[i] == static_cast<int>(i) && elem_sort[i] == s)
        out.push_back(static_cast<int>(i));
    return out;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    normalize();
  }

  // Re-canonicalize facts and graph; merge function entries that collide
  // (congruence closure), iterating to a fixpoint.
  void normalize() {
    while (true) {
      std::set<std::pair<std::string, std::vector<int>>> nf;
      for (const auto& [r, t] : facts) {
        std::vector<int> ct(t.size());
        for (size_t i = 0; i < t.size(); ++i) ct[i] = find(t[i]);
        nf.insert({r, ct});
      }
      facts = std::move(nf);
      std::map<std::pair<std::string, std::vector<int>>, int> ng;
      std::vector<std::pair<int, int>> pending;
      for (const auto& [k, v] : graph) {
        std::vector<int> ct(k.second.size());
        for (size_t i = 0; i < k.second.size(); ++i) ct[i] = find(k.second[i]);
        int cv = find(v);
        auto key = std::make_pair(k.first, ct);
        auto it = ng.find(key);
        if (it != ng.end() && it->second != cv)
          pending.emplace_back(it->second, cv);
        else
          ng[key] = cv;
      }
      graph = std::move(ng);
      if (pending.empty()) break;
      for (auto& [a, b] : pending) {
        a = find(a);
        b = find(b);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        parent[b] = a;
      }
    }
  }

  std::optional<int> lookup(const std::string& f, std::vector<int> args) const {
    for (auto& a : args) a = find(a);
    auto it = graph.find({f, args});
    if (it == graph.end()) return std::nullopt;
    return find(it->second);
  }
  bool has_fact(const std::string& r, std::vector<int> args) const {
    for (auto& a : args) a = find(a);
    return facts.count({r, args}) > 0;
  }
};

// Lookup-only satisfaction of a coherent formula in a chase state; never
// creates elements or entries.
inline std::optional<int> lookup_term(const State& st, const Term& t,
                                      const std::vector<int>& env) {
  if (t.is_var()) return st.find(env[t.var]);
  std::vector<int> args;
  for (const auto& a : t.args) {
    auto v = lookup_term(st, a, env);
    if (!v) return std::nullopt;
    args.push_back(*v);
  }
  return st.lookup(t.func, args);
}

inline bool sat(const State& st, const Formula& f, const std::vector<int>& env) {
  switch (f.kind()) {
    case Conn::True:
      return true;
    case Conn::False:
      return false;
    case Conn::Eq: {
      auto a = lookup_term(st, f.terms()[0], env);
      auto b = lookup_term(st, f.terms()[1], env);
      return a && b && *a == *b;
    }
    case Conn::Rel: {
      std::vector<int> args;
      for (const auto& t : f.terms()) {
        auto v = lookup_term(st, t, env);
        if (!v) return false;
        args.push_back(*v);
      }
      return st.has_fact(f.rel_name(), args);
    }
    case Conn::And:
      return sat(st, f.left(), env) && sat(st, f.right(), env);
    case Conn::Or:
      return sat(st, f.left(), env) || sat(st, f.right(), env);
    case Conn::Exists: {
      for (int e : st.elements_of(f.bound_sort())) {
        std::vector<int> e2 = env;
        e2.push_back(e);
        if (sat(st, f.body(), e2)) return true;
      }
      return false;
    }
    case Conn::Not:
      throw Error("classical connective in chase");
  }
  return false;
}

}  // namespace chase

class Prover {
 public:
  Prover(const Theory& th, ProverBounds bounds = {})
      : theory_(th), bounds_(bounds), rules_(chase::compile_rules(th)) {
    if (th.classical) throw Error("prover requires a coherent theory");
    sig_ = std::make_shared<Signature>(th.sig);
  }

  ProofOutcome prove(const Sequent& goal) {
    firings_ = 0;
    branches_made_ = 1;
    trace_.clear();
    bound_hit_.clear();
    countermodel_.reset();

    chase::State init;
    init.sig = &theory_.sig;
    std::vector<int> goal_env;
    for (size_t i = 0; i < goal.ctx.size(); ++i)
      goal_env.push_back(init.add_element(goal.ctx.sort(i)));

    // assert the lhs (may branch), then run each branch
    assert_formula(init, goal.lhs, goal_env, 0, [&](chase::State st, int branch) {
      run_branch(std::move(st), goal, goal_env, branch);
    });

    ProofOutcome out;
    out.trace = trace_;
    if (countermodel_) {
      out.status = ProofStatus::Countermodel;
      out.countermodel = countermodel_;
      // independent re-check through the models module
      if (!is_model(*out.countermodel, theory_) ||
          satisfies(*out.countermodel, goal))
        throw Error("internal error: invalid countermodel extracted");
      return out;
    }
    if (!bound_hit_.empty()) {
      out.status = ProofStatus::Unknown;
      out.bound_report = bound_hit_;
      return out;
    }
    out.status = ProofStatus::Proved;
    return out;
  }

 private:
  // Round-robin over rules by index, oldest binding first within a rule. A
  // full cycle with no firing means the branch is saturated.
  void run_branch(chase::State st, const Sequent& goal,
                  const std::vector<int>& goal_env, int branch) {
    if (st.closed) return;
    if (chase::sat(st, goal.rhs, goal_env)) return;
    size_t cursor = 0;
    size_t idle = 0;  // consecutive rules with nothing to fire
    while (true) {
      if (firings_ >= bounds_.max_firings) {
        note_bound("max_firings");
        return;
      }
      if (st.live_count() > bounds_.max_elements) {
        note_bound("max_elements");
        return;
      }
      if (idle >= rules_.size()) {
        // saturated without reaching the goal: extract a countermodel
        if (!countermodel_) countermodel_ = extract(st);
        return;
      }
      const chase::Rule& r = rules_[cursor];
      std::vector<int> binding;
      if (!find_unsatisfied_match(st, r, binding)) {
        cursor = (cursor + 1) % rules_.size();
        ++idle;
        continue;
      }
      ++firings_;
      trace_.push_back({branch, static_cast<int>(cursor), r.label, binding});
      std::vector<int> env(binding.begin(),
                           binding.begin() + static_cast<long>(r.ctx_size));
      bool done = false;
      assert_formula(st, r.rhs, env, branch, [&](chase::State st2, int b2) {
        if (st2.closed) return;
        if (b2 == branch && !done) {
          st = std::move(st2);  // continue the main line in place
          done = true;
        } else {
          run_branch(std::move(st2), goal, goal_env, b2);
        }
      });
      if (!done) return;  // every alternative branched out or closed
      if (st.closed) return;
      if (chase::sat(st, goal.rhs, goal_env)) return;
      cursor = (cursor + 1) % rules_.size();
      idle = 0;
    }
  }

  // Find a body match whose rhs instance is not yet satisfied, in
  // deterministic lexicographic order.
  bool find_unsatisfied_match(const chase::State& st, const chase::Rule& r,
                              std::vector<int>& out) {
    std::vector<int> binding(r.vars.size(), -1);
    return match_rec(st, r, 0, binding, out);
  }

  bool match_rec(const chase::State& st, const chase::Rule& r, size_t vi,
                 std::vector<int>& binding, std::vector<int>& out) {
    if (vi == r.vars.size()) {
      for (const auto& atom : r.body) {
        switch (atom.kind) {
          case chase::FlatAtom::Rel: {
            std::vector<int> args;
            for (int v : atom.args) args.push_back(binding[v]);
            if (!st.has_fact(atom.sym, args)) return false;
            break;
          }
          case chase::FlatAtom::FuncEq: {
            std::vector<int> args;
            for (int v : atom.args) args.push_back(binding[v]);
            auto res = st.lookup(atom.sym, args);
            if (!res || *res != st.find(binding[atom.result])) return false;
            break;
          }
          case chase::FlatAtom::VarEq:
            if (st.find(binding[atom.args[0]]) != st.find(binding[atom.args[1]]))
              return false;
            break;
        }
      }
      std::vector<int> env(binding.begin(),
                           binding.begin() + static_cast<long>(r.ctx_size));
      if (chase::sat(st, r.rhs, env)) return false;
      out = binding;
      return true;
    }
    for (int e : st.elements_of(r.vars[vi])) {
      binding[vi] = e;
      if (match_rec(st, r, vi + 1, binding, out)) return true;
    }
    binding[vi] = -1;
    return false;
  }

  // Make a coherent formula true. Disjunctions call `emit` once per branch;
  // the first alternative keeps the current branch id.
  void assert_formula(chase::State st, const Formula& f, std::vector<int> env,
                      int branch,
                      const std::function<void(chase::State, int)>& emit) {
    switch (f.kind()) {
      case Conn::True:
        emit(std::move(st), branch);
        return;
      case Conn::False:
        st.closed = true;
        emit(std::move(st), branch);
        return;
      case Conn::Eq: {
        int a = materialize(st, f.terms()[0], env);
        int b = materialize(st, f.terms()[1], env);
        st.merge(a, b);
        emit(std::move(st), branch);
        return;
      }
      case Conn::Rel: {
        std::vector<int> args;
        for (const auto& t : f.terms()) args.push_back(materialize(st, t, env));
        for (auto& a : args) a = st.find(a);
        st.facts.insert({f.rel_name(), args});
        emit(std::move(st), branch);
        return;
      }
      case Conn::And: {
        assert_formula(std::move(st), f.left(), env, branch,
                       [&](chase::State st2, int b2) {
                         assert_formula(std::move(st2), f.right(), env, b2, emit);
                       });
        return;
      }
      case Conn::Or: {
        // satisfied disjuncts need no action; otherwise branch
        if (chase::sat(st, f.left(), env) || chase::sat(st, f.right(), env)) {
          emit(std::move(st), branch);
          return;
        }
        chase::State copy = st;
        assert_formula(std::move(st), f.left(), env, branch, emit);
        if (branches_made_ >= bounds_.max_branches) {
          note_bound("max_branches");
          return;
        }
        int b2 = branches_made_++;
        assert_formula(std::move(copy), f.right(), env, b2, emit);
        return;
      }
      case Conn::Exists: {
        int e = st.add_element(f.bound_sort());
        env.push_back(e);
        assert_formula(std::move(st), f.body(), env, branch, emit);
        return;
      }
      case Conn::Not:
        throw Error("classical connective in chase");
    }
  }

  // Term value in the state, creating function entries (with fresh elements
  // for undefined applications) as needed.
  int materialize(chase::State& st, const Term& t, const std::vector<int>& env) {
    if (t.is_var()) return st.find(env[t.var]);
    std::vector<int> args;
    for (const auto& a : t.args) args.push_back(materialize(st, a, env));
    for (auto& a : args) a = st.find(a);
    auto v = st.lookup(t.func, args);
    if (v) return *v;
    const FuncSym* f = theory_.sig.func(t.func);
    int e = st.add_element(f->result);
    st.graph[{t.func, args}] = e;
    return e;
  }

  FiniteStructure extract(const chase::State& st) {
    FiniteStructure m;
    m.sig = sig_;
    std::map<int, int> index;  // root id -> element
    for (const auto& s : theory_.sig.sorts()) {
      auto roots = st.elements_of(s);
      m.carrier[s] = static_cast<int>(roots.size());
      for (size_t i = 0; i < roots.size(); ++i)
        index[roots[i]] = static_cast<int>(i);
    }
    for (const auto& f : theory_.sig.funcs()) {
      std::vector<int> table(FiniteStructure::table_size(m, f), 0);
      std::vector<Sort> args = f.args;
      bool total = true;
      for_each_tuple(m, args, [&](const std::vector<int>& t) {
        // translate back to root ids
        std::vector<int> roots(t.size());
        for (size_t i = 0; i < t.size(); ++i) {
          auto rs = st.elements_of(args[i]);
          roots[i] = rs[t[i]];
        }
        auto v = st.lookup(f.name, roots);
        if (!v) {
          total = false;
          return;
        }
        table[m.tuple_index(args, t)] = index.at(*v);
      });
      if (!total)
        throw Error("internal error: saturated state has a partial function");
      m.funcs[f.name] = std::move(table);
    }
    for (const auto& r : theory_.sig.rels()) m.rels[r.name] = {};
    for (const auto& [rt, tuple] : st.facts) {
      const RelSym* rs = theory_.sig.rel(rt);
      std::vector<int> t(tuple.size());
      for (size_t i = 0; i < tuple.size(); ++i) t[i] = index.at(st.find(tuple[i]));
      (void)rs;
      m.rels[rt].insert(t);
    }
    return m;
  }

  void note_bound(const std::string& which) {
    if (bound_hit_.empty()) bound_hit_ = which;
  }

  Theory theory_;
  ProverBounds bounds_;
  std::vector<chase::Rule> rules_;
  std::shared_ptr<const Signature> sig_;

  int firings_ = 0;
  int branches_made_ = 1;
  std::string bound_hit_;
  std::optional<FiniteStructure> countermodel_;
  std::vector<TraceStep> trace_;
};

inline ProofOutcome prove(const Theory& th, const Sequent& goal,
                          ProverBounds bounds = {}) {
  Prover p(th, bounds);
  return p.prove(goal);
}

// Necessary-condition oracle: true iff every enumerated model satisfies the
// sequent. Finite models may satisfy non-theorems; callers must report this
// as bound-validated evidence, never as provability.
inline bool entails_on_class(const ModelClass& cls, const Sequent& sq) {
  for (const auto& m : cls.models)
    if (!satisfies(m, sq)) return false;
  return true;
}

}  // namespace cohspec
