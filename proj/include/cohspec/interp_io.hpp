#pragma once

// Interpretation description files: JSON with theory file paths (relative to
// the description), a sort map, and one image formula per source symbol.
// Relation images live in context [x1..xk]; function images in [x1..xk, y].

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cohspec/dsl.hpp"
#include "cohspec/logic.hpp"

namespace cohspec {

inline Interpretation load_interpretation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  if (j.value("schema", "") != std::string("cohspec-interp/1"))
    throw Error("unrecognized interpretation schema in '" + path + "'");
  std::filesystem::path base = std::filesystem::path(path).parent_path();

  Interpretation I;
  I.source = parse_theory_file((base / j.at("source").get<std::string>()).string());
  I.target = parse_theory_file((base / j.at("target").get<std::string>()).string());
  for (const auto& [a, b] : j.at("sorts").items()) {
    if (!I.source.sig.has_sort(a)) throw Error("unknown source sort '" + a + "'");
    Sort bs = b.get<std::string>();
    if (!I.target.sig.has_sort(bs)) throw Error("unknown target sort '" + bs + "'");
    I.sort_map[a] = bs;
  }
  for (const auto& s : I.source.sig.sorts())
    if (!I.sort_map.count(s)) throw Error("sort '" + s + "' has no image");

  const auto rels = j.value("relations", nlohmann::json::object());
  for (const auto& r : I.source.sig.rels()) {
    if (!rels.contains(r.name))
      throw Error("relation '" + r.name + "' has no image");
    Context c = interp_rel_context(I, r);
    I.rel_images[r.name] =
        parse_formula_with_context(I.target, c, rels.at(r.name).get<std::string>());
  }
  const auto funcs = j.value("functions", nlohmann::json::object());
  for (const auto& f : I.source.sig.funcs()) {
    if (!funcs.contains(f.name))
      throw Error("function '" + f.name + "' has no image");
    Context c = interp_func_context(I, f);
    I.func_images[f.name] =
        parse_formula_with_context(I.target, c, funcs.at(f.name).get<std::string>());
  }
  return I;
}

}  // namespace cohspec
