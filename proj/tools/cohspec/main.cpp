// cohspec: a workbench for multi-sorted coherent first-order theories at
// finite-model scale. See README.md for the command overview.
//
// Exit codes: 0 pass/success, 1 fail-with-witness, 2 unknown-at-bound,
// 3 input error.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "cohspec/interp_io.hpp"
#include "cohspec/report.hpp"

using namespace cohspec;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitInput = 3;

struct Cli {
  RunConfig cfg;
  std::string out_path;

  void emit(const Json& report, const std::string& text) const {
    std::string payload =
        cfg.format == "json" ? report.dump(2) + "\n" : text;
    if (out_path.empty()) {
      std::cout << payload;
    } else {
      std::ofstream out(out_path);
      out << payload;
    }
  }
};

void add_common(CLI::App* cmd, Cli& cli) {
  cmd->add_option("-n,--model-bound", cli.cfg.model_bound,
                  "per-sort carrier size bound (applies to each sort "
                  "separately, not their sum)");
  cmd->add_option("-d,--depth", cli.cfg.formula_depth, "formula depth bound");
  cmd->add_option("--term-depth", cli.cfg.term_depth, "term nesting bound");
  cmd->add_option("--labels", cli.cfg.label_budget, "spectrum label budget");
  cmd->add_option("--max-elements", cli.cfg.prover.max_elements,
                  "prover element bound");
  cmd->add_option("--max-firings", cli.cfg.prover.max_firings,
                  "prover firing bound");
  cmd->add_option("--max-branches", cli.cfg.prover.max_branches,
                  "prover branch bound");
  cmd->add_option("--format", cli.cfg.format, "text or json");
  cmd->add_option("--cache-dir", cli.cfg.cache_dir,
                  "model class cache directory (also COHSPEC_CACHE_DIR)");
  cmd->add_option("--seed", cli.cfg.seed, "reserved; algorithms are deterministic");
  cmd->add_option("-o,--out", cli.out_path, "write the report to a file");
}

EnumOptions enum_opts(const RunConfig& cfg) {
  return EnumOptions{cfg.formula_depth, cfg.term_depth};
}

ModelClass load_class(const Theory& th, const RunConfig& cfg) {
  return enumerate_models_cached(th, cfg.model_bound, cfg.cache_dir);
}

int run_check(const std::string& file, Cli& cli) {
  Theory th = parse_theory_file(file);
  auto diags = well_formed(th);
  Json rep = make_report("check", cli.cfg);
  rep["theory"] = th.name;
  Json items = Json::array();
  std::string text;
  for (const auto& d : diags) {
    items.push_back({{"where", d.where}, {"message", d.message}});
    text += d.where + ": " + d.message + "\n";
  }
  rep["diagnostics"] = items;
  rep["verdict"] = diags.empty() ? "well-formed" : "ill-formed";
  if (diags.empty()) text = "theory " + th.name + ": well-formed\n";
  cli.emit(rep, text);
  return diags.empty() ? kExitPass : kExitInput;
}

int run_models(const std::string& file, Cli& cli) {
  Theory th = parse_theory_file(file);
  ModelClass cls = load_class(th, cli.cfg);
  Json rep = make_report("models", cli.cfg);
  rep["theory"] = th.name;
  rep["count"] = cls.models.size();
  Json models = Json::array();
  std::string text = "models of " + th.name + " with carriers <= " +
                     std::to_string(cli.cfg.model_bound) + ": " +
                     std::to_string(cls.models.size()) + "\n";
  for (size_t i = 0; i < cls.models.size(); ++i) {
    Json m = structure_to_json(cls.models[i]);
    m["canonical_form"] = cls.canon[i];
    models.push_back(m);
    text += "  [" + std::to_string(i) + "] ";
    for (const auto& [s, n] : cls.models[i].carrier)
      text += s + "=" + std::to_string(n) + " ";
    text += "\n";
  }
  rep["models"] = models;
  cli.emit(rep, text);
  return kExitPass;
}

int run_prove(const std::string& file, const std::string& seq_text, bool trace,
              Cli& cli) {
  Theory th = parse_theory_file(file);
  if (th.classical)
    throw Error("prove needs a coherent theory; run morleyize first");
  Sequent sq = parse_sequent(th, seq_text);
  ProofOutcome out = prove(th, sq, cli.cfg.prover);
  Json rep = make_report("prove", cli.cfg);
  rep["sequent"] = sequent_to_string(sq);
  std::string text;
  int code = kExitPass;
  switch (out.status) {
    case ProofStatus::Proved:
      rep["verdict"] = "proved";
      rep["provenance"] = "proved";
      text = "Proved: " + sequent_to_string(sq) + "\n";
      break;
    case ProofStatus::Countermodel:
      rep["verdict"] = "countermodel";
      rep["provenance"] = "refuted";
      rep["countermodel"] = structure_to_json(*out.countermodel);
      text = "Countermodel found for: " + sequent_to_string(sq) + "\n";
      code = kExitFail;
      break;
    case ProofStatus::Unknown:
      rep["verdict"] = "unknown";
      rep["provenance"] = "unknown-at-bound";
      rep["bound"] = out.bound_report;
      text = "Unknown at bound (" + out.bound_report + ")\n";
      code = kExitUnknown;
      break;
  }
  if (trace) {
    Json steps = Json::array();
    for (const auto& s : out.trace)
      steps.push_back({{"branch", s.branch},
                       {"rule", s.rule},
                       {"note", s.note},
                       {"binding", s.binding}});
    rep["trace"] = steps;
  }
  cli.emit(rep, text);
  return code;
}

int run_morleyize(const std::string& file, Cli& cli) {
  Theory th = parse_theory_file(file);
  if (!th.classical)
    throw Error("morleyize expects a classical theory");
  MorleyizationResult mr = morleyize(th);
  Json rep = make_report("morleyize", cli.cfg);
  rep["theory"] = theory_to_dsl(mr.theory);
  Json comps = Json::array();
  for (const auto& [sym, body] : mr.complements)
    comps.push_back({{"symbol", sym},
                     {"context", body.context().to_string()},
                     {"complements", formula_to_string(body)}});
  rep["complement_symbols"] = comps;
  cli.emit(rep, theory_to_dsl(mr.theory));
  return kExitPass;
}

int run_diagram(const std::string& file, int model_index, Cli& cli) {
  Theory th = parse_theory_file(file);
  ModelClass cls = load_class(th, cli.cfg);
  if (model_index < 0 || static_cast<size_t>(model_index) >= cls.models.size())
    throw Error("model index out of range; run `models` to list them");
  DiagramTheory d = diagram_theory(th, cls.models[model_index]);
  Json rep = make_report("diagram", cli.cfg);
  rep["theory"] = theory_to_dsl(d.theory);
  rep["constants"] = d.constants.size();
  cli.emit(rep, theory_to_dsl(d.theory));
  return kExitPass;
}

int run_slice(const std::string& file, const std::string& formula, Cli& cli) {
  Theory th = parse_theory_file(file);
  Formula phi = parse_formula_in_context(th, formula);
  SliceTheory s = slice_theory(th, phi);
  Json rep = make_report("slice", cli.cfg);
  rep["theory"] = theory_to_dsl(s.theory);
  cli.emit(rep, theory_to_dsl(s.theory));
  return kExitPass;
}

int run_pushout(const std::string& ifile, const std::string& jfile, bool rename,
                Cli& cli) {
  Interpretation I = load_interpretation(ifile);
  Interpretation J = load_interpretation(jfile);
  if (rename) {
    Theory f0 = rename_theory(I.target, "'0");
    Theory g1 = rename_theory(J.target, "'1");
    I = rename_target(I, f0, "'0");
    J = rename_target(J, g1, "'1");
  }
  Theory out = pushout(I, J);
  Json rep = make_report("pushout", cli.cfg);
  rep["theory"] = theory_to_dsl(out);
  cli.emit(rep, theory_to_dsl(out));
  return kExitPass;
}

int run_copower(const std::string& file, Cli& cli) {
  Theory th = parse_theory_file(file);
  Theory out = copower(th);
  Json rep = make_report("copower", cli.cfg);
  rep["theory"] = theory_to_dsl(out);
  cli.emit(rep, theory_to_dsl(out));
  return kExitPass;
}

int run_spectrum(const std::string& file, bool dot, Cli& cli) {
  Theory th = parse_theory_file(file);
  ModelClass cls = load_class(th, cli.cfg);
  SpectrumGroupoid g = build_groupoid(cls, cli.cfg.label_budget);
  Json rep = make_report("spectrum", cli.cfg);
  rep["points"] = g.points.size();
  Json points = Json::array();
  for (const auto& p : g.points) {
    Json env = Json::array();
    for (const auto& [key, val] : p.env)
      env.push_back({{"name", key.first}, {"sort", key.second}, {"value", val}});
    points.push_back(
        {{"canonical_form", canonical_form(p.structure)}, {"env", env}});
  }
  rep["point_list"] = points;
  Json edges = Json::array();
  size_t arrow_count = 0;
  for (size_t i = 0; i < g.points.size(); ++i)
    for (size_t j = 0; j < g.points.size(); ++j) {
      if (i != j && closure_leq(g.points[i], g.points[j]))
        edges.push_back({{"from", i}, {"to", j}});
      arrow_count +=
          enumerate_isos(g.points[i].structure, g.points[j].structure).size();
    }
  rep["closure_edges"] = edges;
  rep["arrows"] = arrow_count;
  std::string text;
  if (dot) {
    text = groupoid_to_dot(g);
    rep["dot"] = text;
  } else {
    text = "points: " + std::to_string(g.points.size()) +
           ", arrows: " + std::to_string(arrow_count) +
           ", closure edges: " + std::to_string(edges.size()) + "\n";
  }
  cli.emit(rep, text);
  return kExitPass;
}

int run_closure(const std::string& file, int from, int to, Cli& cli) {
  Theory th = parse_theory_file(file);
  ModelClass cls = load_class(th, cli.cfg);
  SpectrumGroupoid g = build_groupoid(cls, cli.cfg.label_budget);
  Json rep = make_report("closure", cli.cfg);
  if (from >= 0 && to >= 0) {
    if (static_cast<size_t>(from) >= g.points.size() ||
        static_cast<size_t>(to) >= g.points.size())
      throw Error("point index out of range");
    auto h = closure_leq(g.points[from], g.points[to]);
    rep["holds"] = h.has_value();
    if (h) {
      Json maps = Json::object();
      for (const auto& [s, v] : h->maps) maps[s] = v;
      rep["homomorphism"] = maps;
    }
    cli.emit(rep, std::string(h ? "in closure (homomorphism found)\n"
                                : "not in closure\n"));
    return h ? kExitPass : kExitFail;
  }
  Json edges = Json::array();
  for (size_t i = 0; i < g.points.size(); ++i)
    for (size_t j = 0; j < g.points.size(); ++j)
      if (i != j && closure_leq(g.points[i], g.points[j]))
        edges.push_back({{"from", i}, {"to", j}});
  rep["closure_edges"] = edges;
  cli.emit(rep, "closure edges: " + std::to_string(edges.size()) + "\n");
  return kExitPass;
}

int run_definable(const std::string& file, const std::string& family_path,
                  Cli& cli) {
  Theory th = parse_theory_file(file);
  ModelClass cls = load_class(th, cli.cfg);
  std::ifstream in(family_path);
  if (!in) throw Error("cannot open '" + family_path + "'");
  Json fj;
  in >> fj;
  EquivariantFamily fam;
  Context ctx;
  for (const auto& v : fj.at("context"))
    ctx.push(v.at(0).get<std::string>(), v.at(1).get<std::string>());
  fam.ctx = ctx;
  fam.sets.resize(cls.models.size());
  for (const auto& [canon, tuples] : fj.at("sets").items()) {
    bool found = false;
    for (size_t i = 0; i < cls.canon.size(); ++i)
      if (cls.canon[i] == canon) {
        for (const auto& t : tuples) fam.sets[i].insert(t.get<std::vector<int>>());
        found = true;
      }
    if (!found)
      throw Error("family references a canonical form outside the class");
  }
  Json rep = make_report("definable", cli.cfg);
  EquivarianceResult eq = is_equivariant(cls, fam);
  rep["equivariant"] = eq.equivariant;
  if (!eq.equivariant) {
    Json w{{"model_a", eq.model_a}, {"model_b", eq.model_b}};
    Json maps = Json::object();
    for (const auto& [s, v] : eq.witness_iso->maps) maps[s] = v;
    w["iso"] = maps;
    rep["witness"] = w;
    rep["verdict"] = "not-equivariant";
    cli.emit(rep, "not equivariant (witness iso reported)\n");
    return kExitFail;
  }
  DefinabilitySearch ds = find_defining_formula(cls, fam, enum_opts(cli.cfg));
  if (ds.formula) {
    rep["verdict"] = "definable";
    rep["formula"] = formula_to_string(*ds.formula);
    cli.emit(rep, "definable: " + formula_to_string(*ds.formula) + "\n");
    return kExitPass;
  }
  rep["verdict"] = "none-at-bound";
  rep["reason"] = ds.reason;
  cli.emit(rep, "no defining formula: " + ds.reason + "\n");
  return kExitUnknown;
}

int run_isotropy(const std::string& file, int model_index, int param_budget,
                 Cli& cli) {
  Theory th = parse_theory_file(file);
  ModelClass cls = load_class(th, cli.cfg);
  if (model_index < 0 || static_cast<size_t>(model_index) >= cls.models.size())
    throw Error("model index out of range");
  IsotropyOptions opts{enum_opts(cli.cfg), param_budget};
  IsotropyReport ir = isotropy_at_model(cls, model_index, opts);
  NormalityReport nr = check_normality(cls, ir);
  Json rep = make_report("isotropy", cli.cfg);
  Json entries = Json::array();
  std::string text;
  for (const auto& e : ir.entries) {
    Json maps = Json::object();
    for (const auto& [s, v] : e.automorphism.maps) maps[s] = v;
    Json je{{"automorphism", maps}};
    switch (e.cls) {
      case IsotropyClass::MDefinable:
        je["class"] = "m-definable";
        break;
      case IsotropyClass::ParameterDefinable:
        je["class"] = "parameter-definable";
        break;
      case IsotropyClass::NotFoundAtBound:
        je["class"] = "not-found-at-bound";
        break;
    }
    if (e.sigma) {
      Json sj = Json::object();
      for (const auto& [s, f] : *e.sigma) sj[s] = formula_to_string(f);
      je["sigma"] = sj;
      je["parameter"] = e.param_value;
    }
    entries.push_back(je);
    text += std::string("automorphism: ") + je["class"].get<std::string>();
    if (e.sigma)
      for (const auto& [s, f] : *e.sigma)
        text += "  sigma_" + s + ": " + formula_to_string(f);
    text += "\n";
  }
  rep["entries"] = entries;
  bool closed = isotropy_group_closed(ir);
  rep["group_closed"] = closed;
  rep["normality"] = nr.holds;
  text += std::string("group closure: ") + (closed ? "ok" : "FAILED") +
          ", normality: " + (nr.holds ? "ok" : "FAILED") + "\n";
  cli.emit(rep, text);
  return nr.holds && closed ? kExitPass : kExitFail;
}

int run_compare(const std::string& interp_path, int source_bound,
                int target_bound, Cli& cli) {
  Interpretation I = load_interpretation(interp_path);
  ReportOptions opts;
  opts.source_bound = source_bound;
  opts.target_bound = target_bound;
  opts.formulas = EnumOptions{cli.cfg.formula_depth, cli.cfg.term_depth};
  opts.spectral_labels = cli.cfg.label_budget;
  opts.prover = cli.cfg.prover;
  InterpretationReport r = conceptual_completeness_report(I, opts);
  Json rep = make_report("compare", cli.cfg);
  rep["report"] = interpretation_report_to_json(r);
  auto verdict = [](const RowResult& row) {
    return row.verdict == RowVerdict::Pass ? "pass" : "fail";
  };
  std::string text;
  text += std::string("conservativity (supercovering):      semantic ") +
          verdict(r.supercovering) + ", spectral " + verdict(r.sd_spectral) + "\n";
  text += std::string("fullness on subobjects (stabilizes): semantic ") +
          verdict(r.stabilizes) + ", spectral " + verdict(r.sep_spectral) + "\n";
  text += std::string("subcovering (faithful reduct):       semantic ") +
          verdict(r.faithful) + ", spectral " + verdict(r.nf_spectral) + "\n";
  text += std::string("spectral agreement: ") +
          (r.spectral_agrees ? "yes" : "NO") + "\n";
  text += std::string("evidence: fullness=") +
          (r.fullness_evidence ? "yes" : "no") + ", essential surjectivity=" +
          (r.equivalence_evidence ? "yes" : "no") + " (at bounds only)\n";
  cli.emit(rep, text);
  bool all = r.supercovering.verdict == RowVerdict::Pass &&
             r.stabilizes.verdict == RowVerdict::Pass &&
             r.faithful.verdict == RowVerdict::Pass;
  return all ? kExitPass : kExitFail;
}

int run_local(const std::string& file, int model_index, Cli& cli) {
  Theory th = parse_theory_file(file);
  ModelClass cls = load_class(th, cli.cfg);
  if (model_index < 0 || static_cast<size_t>(model_index) >= cls.models.size())
    throw Error("model index out of range");
  DiagramTheory d = diagram_theory(th, cls.models[model_index]);
  LocalPropertyReport lr =
      check_local_properties(d.theory, enum_opts(cli.cfg), cli.cfg.prover);
  Json rep = make_report("local", cli.cfg);
  Json items = Json::array();
  std::string text;
  for (const auto& it : lr.items) {
    items.push_back({{"sentence", formula_to_string(it.sentence)},
                     {"kind", it.kind},
                     {"verdict", it.verdict},
                     {"detail", it.detail}});
    text += it.kind + " " + formula_to_string(it.sentence) + ": " + it.verdict +
            (it.detail.empty() ? "" : " (" + it.detail + ")") + "\n";
  }
  rep["items"] = items;
  rep["verdict"] = !lr.all_pass()      ? "fail"
                   : lr.has_unknown()  ? "unknown"
                                       : "pass";
  text += "local properties: " + rep["verdict"].get<std::string>() + "\n";
  cli.emit(rep, text);
  if (!lr.all_pass()) return kExitFail;
  return lr.has_unknown() ? kExitUnknown : kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cohspec: coherent first-order theories at finite-model scale"};
  app.require_subcommand(1);

  Cli cli;
  if (const char* env = std::getenv("COHSPEC_CACHE_DIR")) cli.cfg.cache_dir = env;

  std::string file, seq_text, formula, family, ifile, jfile, interp;
  int model_index = 0, from = -1, to = -1, param_budget = 1;
  int source_bound = 2, target_bound = 2;
  bool trace = false, dot = false, rename = false;

  auto* c_check = app.add_subcommand("check", "well-formedness diagnostics");
  c_check->add_option("file", file)->required();
  add_common(c_check, cli);

  auto* c_models = app.add_subcommand("models", "enumerate models up to iso");
  c_models->add_option("file", file)->required();
  add_common(c_models, cli);

  auto* c_prove = app.add_subcommand("prove", "chase a sequent");
  c_prove->add_option("file", file)->required();
  c_prove->add_option("sequent", seq_text)->required();
  c_prove->add_flag("--trace", trace, "emit the firing trace");
  add_common(c_prove, cli);

  auto* c_morley = app.add_subcommand("morleyize", "classical -> coherent");
  c_morley->add_option("file", file)->required();
  add_common(c_morley, cli);

  auto* c_diagram = app.add_subcommand("diagram", "positive diagram of a model");
  c_diagram->add_option("file", file)->required();
  c_diagram->add_option("--model", model_index, "model index in the class");
  add_common(c_diagram, cli);

  auto* c_slice = app.add_subcommand("slice", "slice over a formula");
  c_slice->add_option("file", file)->required();
  c_slice->add_option("--formula", formula, "\"[x:S] ...\"")->required();
  add_common(c_slice, cli);

  auto* c_pushout = app.add_subcommand("pushout", "pushout of two interpretations");
  c_pushout->add_option("interp_i", ifile)->required();
  c_pushout->add_option("interp_j", jfile)->required();
  c_pushout->add_flag("--rename", rename, "rename targets apart first");
  add_common(c_pushout, cli);

  auto* c_copower = app.add_subcommand("copower", "homomorphism copower");
  c_copower->add_option("file", file)->required();
  add_common(c_copower, cli);

  auto* c_spectrum = app.add_subcommand("spectrum", "build the spectral groupoid");
  c_spectrum->add_option("file", file)->required();
  c_spectrum->add_flag("--dot", dot, "emit the specialization preorder as dot");
  add_common(c_spectrum, cli);

  auto* c_closure = app.add_subcommand("closure", "specialization closure");
  c_closure->add_option("file", file)->required();
  c_closure->add_option("--from", from, "point index");
  c_closure->add_option("--to", to, "point index");
  add_common(c_closure, cli);

  auto* c_def = app.add_subcommand("definable", "definability search for a family");
  c_def->add_option("file", file)->required();
  c_def->add_option("--family", family, "family JSON")->required();
  add_common(c_def, cli);

  auto* c_iso = app.add_subcommand("isotropy", "definable automorphisms at a model");
  c_iso->add_option("file", file)->required();
  c_iso->add_option("--model", model_index, "model index in the class");
  c_iso->add_option("--params", param_budget, "parameter budget");
  add_common(c_iso, cli);

  auto* c_cmp = app.add_subcommand("compare", "conceptual-completeness report");
  c_cmp->add_option("interp", interp)->required();
  c_cmp->add_option("--source-bound", source_bound);
  c_cmp->add_option("--target-bound", target_bound);
  add_common(c_cmp, cli);

  auto* c_local = app.add_subcommand("local", "existence/disjunction properties "
                                              "of a model's diagram");
  c_local->add_option("file", file)->required();
  c_local->add_option("--model", model_index, "model index in the class");
  add_common(c_local, cli);

  CLI11_PARSE(app, argc, argv);

  try {
    cli.cfg.validate();
    if (c_check->parsed()) return run_check(file, cli);
    if (c_models->parsed()) return run_models(file, cli);
    if (c_prove->parsed()) return run_prove(file, seq_text, trace, cli);
    if (c_morley->parsed()) return run_morleyize(file, cli);
    if (c_diagram->parsed()) return run_diagram(file, model_index, cli);
    if (c_slice->parsed()) return run_slice(file, formula, cli);
    if (c_pushout->parsed()) return run_pushout(ifile, jfile, rename, cli);
    if (c_copower->parsed()) return run_copower(file, cli);
    if (c_spectrum->parsed()) return run_spectrum(file, dot, cli);
    if (c_closure->parsed()) return run_closure(file, from, to, cli);
    if (c_def->parsed()) return run_definable(file, family, cli);
    if (c_iso->parsed()) return run_isotropy(file, model_index, param_budget, cli);
    if (c_cmp->parsed()) return run_compare(interp, source_bound, target_bound, cli);
    if (c_local->parsed()) return run_local(file, model_index, cli);
  } catch (const BoundExceeded& e) {
    std::cerr << "unknown at bound: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const DslError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
