#pragma once

// Run configuration, JSON report plumbing and the content-addressed model
// class cache. Reports are deterministic: nlohmann::json keeps keys sorted
// and every list we emit has a defined order.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cohspec/analysis.hpp"

namespace cohspec {

using Json = nlohmann::json;

struct RunConfig {
  int model_bound = 4;
  int formula_depth = 3;
  int term_depth = 2;
  int label_budget = 3;
  ProverBounds prover;
  std::string format = "text";  // text | json
  std::string cache_dir;
  long long seed = 0;  // reserved; all algorithms are deterministic

  void validate() const {
    if (model_bound < 0 || formula_depth <= 0 || term_depth <= 0 ||
        label_budget < 0 || prover.max_elements <= 0 ||
        prover.max_firings <= 0 || prover.max_branches <= 0)
      throw Error("all bounds must be positive");
    if (format != "text" && format != "json") throw Error("unknown format");
  }

  Json to_json() const {
    return Json{{"model_bound", model_bound},
                {"formula_depth", formula_depth},
                {"term_depth", term_depth},
                {"label_budget", label_budget},
                {"prover",
                 {{"max_elements", prover.max_elements},
                  {"max_firings", prover.max_firings},
                  {"max_branches", prover.max_branches}}},
                {"format", format},
                {"cache_dir", cache_dir},
                {"seed", seed}};
  }
};

inline Json make_report(const std::string& command, const RunConfig& cfg) {
  return Json{{"schema", "cohspec-report/1"},
              {"command", command},
              {"config", cfg.to_json()}};
}

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Proved:
      return "proved";
    case Provenance::Refuted:
      return "refuted";
    case Provenance::BoundValidated:
      return "bound-validated";
  }
  return "?";
}

inline Json decision_to_json(const Decision& d) {
  return Json{{"holds", d.holds},
              {"provenance", provenance_name(d.provenance)},
              {"detail", d.detail}};
}

inline Json structure_to_json(const FiniteStructure& m) {
  Json carriers = Json::object();
  for (const auto& [s, n] : m.carrier) carriers[s] = n;
  Json funcs = Json::object();
  for (const auto& [f, table] : m.funcs) funcs[f] = table;
  Json rels = Json::object();
  for (const auto& [r, tuples] : m.rels) {
    Json list = Json::array();
    for (const auto& t : tuples) list.push_back(t);
    rels[r] = list;
  }
  return Json{{"carriers", carriers}, {"functions", funcs}, {"relations", rels}};
}

inline FiniteStructure structure_from_json(const Signature& sig, const Json& j) {
  FiniteStructure m;
  m.sig = std::make_shared<Signature>(sig);
  for (const auto& [s, n] : j.at("carriers").items())
    m.carrier[s] = n.get<int>();
  for (const auto& [f, table] : j.at("functions").items())
    m.funcs[f] = table.get<std::vector<int>>();
  for (const auto& [r, tuples] : j.at("relations").items()) {
    std::set<std::vector<int>> set;
    for (const auto& t : tuples) set.insert(t.get<std::vector<int>>());
    m.rels[r] = std::move(set);
  }
  return m;
}

inline Json row_to_json(const RowResult& r) {
  Json j{{"verdict", r.verdict == RowVerdict::Pass ? "pass" : "fail"}};
  if (r.witness) {
    Json w{{"description", r.witness->description},
           {"model_a", r.witness->model_a},
           {"model_b", r.witness->model_b},
           {"element", r.witness->element}};
    if (r.witness->formula) w["formula"] = formula_to_string(*r.witness->formula);
    j["witness"] = w;
  }
  return j;
}

inline Json interpretation_report_to_json(const InterpretationReport& rep) {
  Json certs = Json::object();
  for (const auto& [f, d] : rep.certificates.single_valued)
    certs[f + "/single-valued"] = decision_to_json(d);
  for (const auto& [f, d] : rep.certificates.total)
    certs[f + "/total"] = decision_to_json(d);
  return Json{
      {"rows",
       {{"conservativity",
         {{"semantic_supercovering", row_to_json(rep.supercovering)},
          {"spectral_superdense", row_to_json(rep.sd_spectral)}}},
        {"fullness_on_subobjects",
         {{"semantic_stabilizes_subobjects", row_to_json(rep.stabilizes)},
          {"spectral_separates_subgroupoids", row_to_json(rep.sep_spectral)}}},
        {"subcovering",
         {{"semantic_faithful_reduct", row_to_json(rep.faithful)},
          {"spectral_non_folding", row_to_json(rep.nf_spectral)}}}}},
      {"spectral_agrees", rep.spectral_agrees},
      {"evidence",
       {{"fullness", rep.fullness_evidence},
        {"essential_surjectivity", rep.equivalence_evidence},
        {"note", "evidence at the stated bounds, not theoremhood"}}},
      {"certificates", certs}};
}

// ---------------------------------------------------------------------------
// Theory hashing and the model class cache (content-addressed, versioned,
// atomic write-then-rename).

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string theory_hash(const Theory& th) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(theory_to_dsl(th))));
  return buf;
}

inline std::optional<ModelClass> cache_load(const std::string& dir,
                                            const Theory& th, int n) {
  if (dir.empty()) return std::nullopt;
  std::filesystem::path p =
      std::filesystem::path(dir) /
      ("models-" + theory_hash(th) + "-" + std::to_string(n) + ".json");
  std::ifstream in(p);
  if (!in) return std::nullopt;
  Json j;
  try {
    in >> j;
    if (j.at("schema") != "cohspec-modelclass/1") return std::nullopt;
    if (j.at("theory_hash") != theory_hash(th) || j.at("bound") != n)
      return std::nullopt;
    ModelClass cls;
    cls.theory = th;
    cls.bound = n;
    for (const auto& mj : j.at("models")) {
      FiniteStructure m = structure_from_json(th.sig, mj);
      cls.models.push_back(m);
    }
    for (const auto& c : j.at("canonical_forms"))
      cls.canon.push_back(c.get<std::string>());
    return cls;
  } catch (...) {
    return std::nullopt;
  }
}

inline void cache_store(const std::string& dir, const ModelClass& cls) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  Json j{{"schema", "cohspec-modelclass/1"},
         {"theory_hash", theory_hash(cls.theory)},
         {"bound", cls.bound}};
  Json models = Json::array();
  for (const auto& m : cls.models) models.push_back(structure_to_json(m));
  j["models"] = models;
  j["canonical_forms"] = cls.canon;
  std::filesystem::path p =
      std::filesystem::path(dir) / ("models-" + theory_hash(cls.theory) + "-" +
                                    std::to_string(cls.bound) + ".json");
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, p, ec);
}

inline ModelClass enumerate_models_cached(const Theory& th, int n,
                                          const std::string& cache_dir) {
  if (auto cls = cache_load(cache_dir, th, n)) return std::move(*cls);
  ModelClass cls = enumerate_models(th, n);
  cache_store(cache_dir, cls);
  return cls;
}

}  // namespace cohspec
