#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "properad/master.hpp"

namespace properad::io {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------------------------
// Reading

inline Json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(origin + ": malformed JSON: " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

namespace detail {

inline void require_object(const Json& j, const std::string& what, const std::set<std::string>& required,
                           const std::set<std::string>& optional = {}) {
  if (!j.is_object()) throw InputError(what + ": expected an object");
  for (const auto& key : required)
    if (!j.contains(key)) throw InputError(what + ": missing key '" + key + "'");
  for (const auto& [key, value] : j.items())
    if (!required.count(key) && !optional.count(key)) throw InputError(what + ": unknown key '" + key + "'");
}

inline const Json& array_at(const Json& j, const std::string& key, const std::string& what) {
  const Json& a = j.at(key);
  if (!a.is_array()) throw InputError(what + ": '" + key + "' must be an array");
  return a;
}

inline int int_at(const Json& j, const std::string& key, const std::string& what) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw InputError(what + ": '" + key + "' must be an integer");
  return v.get<int>();
}

inline std::string string_of(const Json& v, const std::string& what) {
  if (!v.is_string()) throw InputError(what + ": expected a string");
  return v.get<std::string>();
}

inline Rational coeff_of(const Json& v, const std::string& what) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  return Rational::parse(string_of(v, what + " coefficient"));
}

inline std::vector<std::string> strings(const Json& a, const std::string& what) {
  if (!a.is_array()) throw InputError(what + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : a) out.push_back(string_of(v, what));
  return out;
}

inline std::vector<std::vector<std::string>> blocks(const Json& j, const std::string& key, const std::string& what) {
  std::vector<std::vector<std::string>> out;
  for (const auto& b : array_at(j, key, what)) out.push_back(strings(b, what + " " + key));
  return out;
}

inline CycleSet cycles_of(const Json& j, const std::string& key, const std::string& what) {
  CycleSet out;
  for (const auto& w : blocks(j, key, what)) out.push_back(Cycle(w));
  return out;
}

/// Word of basis indices listed in the sorted order of the labels that carry them.
inline Word word_on(const GradedBasis& basis, const std::map<Label, std::string>& decoration) {
  Word w;
  for (const auto& [label, name] : decoration) w.push_back(basis.index_of(name));
  return w;
}

}  // namespace detail

/// `dgvs` document. A differential that does not square to zero is rejected here.
inline DGVectorSpace dgvs_from_json(const Json& j) {
  detail::require_object(j, "dgvs", {"basis"}, {"differential"});
  std::vector<BasisElement> elements;
  for (const auto& e : detail::array_at(j, "basis", "dgvs")) {
    detail::require_object(e, "dgvs basis element", {"name", "degree"});
    elements.push_back({detail::string_of(e.at("name"), "basis name"), detail::int_at(e, "degree", "basis element")});
  }
  GradedBasis basis(std::move(elements));
  SparseMatrix d;
  if (j.contains("differential"))
    for (const auto& e : detail::array_at(j, "differential", "dgvs")) {
      detail::require_object(e, "dgvs differential entry", {"from", "to", "coeff"});
      const int from = basis.index_of(detail::string_of(e.at("from"), "differential source"));
      const int to = basis.index_of(detail::string_of(e.at("to"), "differential target"));
      accumulate(d, std::pair{to, from}, detail::coeff_of(e.at("coeff"), "differential"));
    }
  return DGVectorSpace(std::move(basis), std::move(d));
}

/// `surface` document.
inline OpenSurface surface_from_json(const Json& j) {
  detail::require_object(j, "surface", {"genus", "out_cycles", "in_cycles"});
  return make_open_surface(detail::int_at(j, "genus", "surface"), detail::cycles_of(j, "out_cycles", "surface"),
                           detail::cycles_of(j, "in_cycles", "surface"));
}

/// `gluing` document: pairs [input label of the left surface, output label of the right surface].
inline Bijection gluing_from_json(const Json& j) {
  detail::require_object(j, "gluing", {"pairs"});
  Bijection eta;
  std::set<Label> targets;
  for (const auto& p : detail::array_at(j, "pairs", "gluing")) {
    const auto pair = detail::strings(p, "gluing pair");
    if (pair.size() != 2) throw InputError("gluing: every pair needs exactly two labels");
    if (!eta.emplace(pair[0], pair[1]).second) throw InputError("gluing: input '" + pair[0] + "' used twice");
    if (!targets.insert(pair[1]).second) throw InputError("gluing: output '" + pair[1] + "' used twice");
  }
  return eta;
}

inline std::string flavor_of(const Json& j) {
  if (!j.is_object() || !j.contains("flavor")) throw InputError("structure: missing key 'flavor'");
  return detail::string_of(j.at("flavor"), "structure flavor");
}

/// Entries of a `structure` document, one overload per flavor.
inline std::vector<StructureEntry<ClosedGenerator>> structure_entries(const TildeModel<ClosedGenerator>& model,
                                                                      const Json& j) {
  detail::require_object(j, "structure", {"flavor", "entries"});
  if (flavor_of(j) != "closed") throw InputError("structure: expected flavor 'closed', found '" + flavor_of(j) + "'");
  std::vector<StructureEntry<ClosedGenerator>> out;
  for (const auto& e : detail::array_at(j, "entries", "structure")) {
    detail::require_object(e, "closed entry", {"m", "n", "chi", "J", "I", "coeff"});
    const int m = detail::int_at(e, "m", "closed entry"), n = detail::int_at(e, "n", "closed entry");
    const auto J = detail::strings(e.at("J"), "closed entry J"), I = detail::strings(e.at("I"), "closed entry I");
    if (m < 0 || n < 0 || static_cast<int>(J.size()) != m || static_cast<int>(I.size()) != n)
      throw InputError("closed entry: J and I must have lengths m and n");
    const DirectedCorolla c = skeletal_corolla(m, n);
    std::map<Label, std::string> outs, ins;
    for (int k = 0; k < m; ++k) outs[out_label(k + 1)] = J[k];
    for (int k = 0; k < n; ++k) ins[in_label(k + 1)] = I[k];
    const ClosedGenerator g = make_closed(c.outputs, c.inputs, detail::int_at(e, "chi", "closed entry"));
    out.push_back({g, detail::word_on(model.space.basis(), outs), detail::word_on(model.space.basis(), ins),
                   detail::coeff_of(e.at("coeff"), "closed entry")});
  }
  return out;
}

namespace detail {

struct OpenLegs {
  CycleSet out_cycles, in_cycles;
  std::map<Label, std::string> outs, ins;
};

inline OpenLegs open_legs(const Json& e, const std::string& what, const std::string& out_stem,
                          const std::string& in_stem) {
  OpenLegs legs;
  int next = 0;
  for (const auto& block : blocks(e, "J_blocks", what)) {
    std::vector<Label> w;
    for (const auto& name : block) {
      w.push_back(out_stem + std::to_string(++next));
      legs.outs[w.back()] = name;
    }
    legs.out_cycles.push_back(Cycle(w));
  }
  next = 0;
  for (const auto& block : blocks(e, "I_blocks", what)) {
    std::vector<Label> w;
    for (const auto& name : block) {
      w.push_back(in_stem + std::to_string(++next));
      legs.ins[w.back()] = name;
    }
    legs.in_cycles.push_back(Cycle(w));
  }
  return legs;
}

template <class G>
void check_chi(const TildeModel<G>& model, const G& g, const Json& e, const std::string& what) {
  if (e.contains("chi") && int_at(e, "chi", what) != model.chi(g))
    throw InputError(what + ": stated chi " + std::to_string(int_at(e, "chi", what)) + " differs from the surface's " +
                     std::to_string(model.chi(g)));
}

}  // namespace detail

inline std::vector<StructureEntry<OpenSurface>> structure_entries(const TildeModel<OpenSurface>& model, const Json& j) {
  detail::require_object(j, "structure", {"flavor", "entries"});
  if (flavor_of(j) != "open") throw InputError("structure: expected flavor 'open', found '" + flavor_of(j) + "'");
  std::vector<StructureEntry<OpenSurface>> out;
  for (const auto& e : detail::array_at(j, "entries", "structure")) {
    detail::require_object(e, "open entry", {"J_blocks", "I_blocks", "g", "coeff"}, {"chi"});
    detail::OpenLegs legs = detail::open_legs(e, "open entry", "o", "i");
    const OpenSurface s = make_open_surface(detail::int_at(e, "g", "open entry"), legs.out_cycles, legs.in_cycles);
    detail::check_chi(model, s, e, "open entry");
    out.push_back({s, detail::word_on(model.space.basis(), legs.outs), detail::word_on(model.space.basis(), legs.ins),
                   detail::coeff_of(e.at("coeff"), "open entry")});
  }
  return out;
}

inline std::vector<StructureEntry<OpenClosedGenerator>> structure_entries(
    const TildeModel<OpenClosedGenerator>& model, const Json& j) {
  detail::require_object(j, "structure", {"flavor", "entries"});
  if (flavor_of(j) != "open-closed")
    throw InputError("structure: expected flavor 'open-closed', found '" + flavor_of(j) + "'");
  std::vector<StructureEntry<OpenClosedGenerator>> out;
  for (const auto& e : detail::array_at(j, "entries", "structure")) {
    const std::string what = "open-closed entry";
    detail::require_object(e, what, {"J_blocks", "I_blocks", "g", "coeff"}, {"J_closed", "I_closed", "chi"});
    detail::OpenLegs legs = detail::open_legs(e, what, "o", "i");
    const OpenSurface open = make_open_surface(detail::int_at(e, "g", what), legs.out_cycles, legs.in_cycles);
    OpenClosedGenerator g{open.genus, open.out_cycles, open.in_cycles, {}, {}};
    std::vector<Label> co, ci;
    if (e.contains("J_closed")) {
      const auto names = detail::strings(e.at("J_closed"), what + " J_closed");
      for (std::size_t k = 0; k < names.size(); ++k) {
        co.push_back(model.skeletal_name(true, 1, static_cast<int>(k) + 1));
        legs.outs[co.back()] = names[k];
      }
    }
    if (e.contains("I_closed")) {
      const auto names = detail::strings(e.at("I_closed"), what + " I_closed");
      for (std::size_t k = 0; k < names.size(); ++k) {
        ci.push_back(model.skeletal_name(false, 1, static_cast<int>(k) + 1));
        legs.ins[ci.back()] = names[k];
      }
    }
    g.closed_outputs = make_label_set(co);
    g.closed_inputs = make_label_set(ci);
    detail::check_chi(model, g, e, what);
    out.push_back({g, detail::word_on(model.space.basis(), legs.outs), detail::word_on(model.space.basis(), legs.ins),
                   detail::coeff_of(e.at("coeff"), what)});
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Writing

inline OrderedJson cycles_to_json(const CycleSet& cs) {
  OrderedJson a = OrderedJson::array();
  for (const auto& c : cs) a.push_back(c.word());
  return a;
}

inline OrderedJson surface_to_json(const OpenSurface& s) {
  OrderedJson j;
  j["genus"] = s.genus;
  j["out_cycles"] = cycles_to_json(s.out_cycles);
  j["in_cycles"] = cycles_to_json(s.in_cycles);
  return j;
}

inline OrderedJson component_to_json(const ComponentReport& c) {
  OrderedJson j;
  if (c.m >= 0) {
    j["m"] = c.m;
    j["n"] = c.n;
  } else {
    j["arities"] = "all";
  }
  j["chi"] = c.chi;
  j["verdict"] = verdict_name(c.verdict);
  if (!c.residual.empty()) j["residual"] = c.residual;
  return j;
}

inline OrderedJson report_to_json(const CheckReport& r) {
  OrderedJson j;
  j["checker"] = r.checker;
  j["verdict"] = r.ok() ? "PASS" : "FAIL";
  j["passed"] = r.count(Verdict::pass);
  j["failed"] = r.count(Verdict::fail);
  j["skipped"] = r.count(Verdict::skipped);
  OrderedJson comps = OrderedJson::array();
  for (const auto& c : r.components) comps.push_back(component_to_json(c));
  j["components"] = comps;
  return j;
}

/// Whether several checkers reach the same verdict at every chi (including chi = 0, the d² slot).
inline bool verdicts_agree(const std::vector<CheckReport>& reports) {
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (reports[i].ok() != reports[0].ok() || reports[i].by_chi() != reports[0].by_chi()) return false;
  return true;
}

}  // namespace properad::io
