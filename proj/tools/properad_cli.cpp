// properad: gluing, cobar d², properad axioms and master-equation checks from the command line.
//
// Exit codes: 0 when every check passes, 1 on a mathematical violation, 2 on an input or usage error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "properad/cobar.hpp"
#include "properad/endomorphism.hpp"
#include "properad/io.hpp"
#include "properad/master.hpp"

using namespace properad;
using io::OrderedJson;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kInputError = 2;

struct Options {
  int chi_max = -1;
  int m_max = -1;
  int n_max = -1;
  int vertex_cap = 5;
  int legs_max = -1;
  int segments_max = -1;
  bool restricted = false;
  std::string genus_rule = "ledger";
  std::string cross_check = "none";
  std::string out;
  std::string dot;
  std::string dgvs;
};

int or_default(int value, int fallback) { return value >= 0 ? value : fallback; }

GenusRule genus_rule(const Options& o) {
  return o.genus_rule == "paper-verbal" ? GenusRule::paper_verbal : GenusRule::ledger;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

void emit(const OrderedJson& j, const Options& o) {
  const std::string text = j.dump(2) + "\n";
  if (o.out.empty()) std::cout << text;
  else write_text(o.out, text);
}

OrderedJson cycles_json(const std::vector<Cycle>& cs) { return io::cycles_to_json(cs); }

// ---------------------------------------------------------------------------------------------

int glue_open(const std::string& left_path, const std::string& right_path, const std::string& gluing_path,
              const Options& o) {
  const OpenSurface left = io::surface_from_json(io::read_json_file(left_path));
  const OpenSurface right = io::surface_from_json(io::read_json_file(right_path));
  const Bijection eta = io::gluing_from_json(io::read_json_file(gluing_path));
  validate_gluing(left.corolla(), right.corolla(), eta);
  const OpenGlueDetail d = open_glue_detail(left, right, eta, genus_rule(o));
  const LabelSet outs = set_union(left.outputs(), right.outputs());
  OrderedJson splits = OrderedJson::array();
  for (const auto& m : d.mixed) {
    auto [oc, ic] = split_mixed_cycle(m, outs);
    OrderedJson s;
    s["mixed"] = m.word();
    s["output"] = oc.word();
    s["input"] = ic.word();
    splits.push_back(s);
  }
  OrderedJson j;
  j["genus_rule"] = o.genus_rule;
  j["mixed_cycles"] = cycles_json(d.mixed);
  j["splits"] = splits;
  j["surface"] = io::surface_to_json(d.surface);
  j["boundaries"] = d.surface.boundaries();
  j["chi"] = d.surface.chi();
  emit(j, o);
  if (!o.dot.empty()) {
    DecoratedGraph<OpenSurface> g{{right, left}, {}};
    for (const auto& [b, a] : eta) g.edges.push_back({1, b, 0, a});
    write_text(o.dot, to_dot(open_cobar_model(), g, "glue-open"));
  }
  return kPass;
}

// ---------------------------------------------------------------------------------------------

template <class G>
int cobar_d2_run(CobarModel<G> model, const std::vector<G>& gens, const std::string& name, OrderedJson bounds,
                 const Options& o) {
  model.vertex_cap = o.vertex_cap;
  CobarDifferential<G> d(model);
  std::size_t first_terms = 0, checked = 0;
  std::optional<std::pair<G, DecoratedGraph<G>>> witness;
  Rational witness_coeff;
  for (const auto& p : gens) {
    ++checked;
    const CobarElement<G> first = d.apply(single_vertex(d.model(), p));
    first_terms += first.size();
    const CobarElement<G> second = d.apply(first);
    if (!second.empty()) {
      witness = {p, second.begin()->first};
      witness_coeff = second.begin()->second;
      break;
    }
  }
  OrderedJson j;
  j["properad"] = name;
  j["bounds"] = bounds;
  j["generators"] = checked;
  j["first_order_terms"] = first_terms;
  j["verdict"] = witness ? "FAIL" : "PASS";
  if (witness) {
    j["witness"] = "d^2(" + witness->first.str() + ") has coefficient " + witness_coeff.str() + " on " +
                   witness->second.str();
    if (!o.dot.empty()) write_text(o.dot, to_dot(d.model(), witness->second, "witness"));
  }
  emit(j, o);
  return witness ? kViolation : kPass;
}

int cobar_d2(const std::string& name, const Options& o) {
  const int chi = or_default(o.chi_max, 4);
  OrderedJson bounds;
  bounds["chi_max"] = chi;
  if (name == "closed-frobenius" || name == "mutated-closed-frobenius") {
    const int legs = or_default(o.legs_max, 2);
    bounds["legs_max"] = legs;
    auto model = closed_cobar_model(name == "closed-frobenius" ? Mutation::none : Mutation::composition_sign,
                                    !o.restricted);
    return cobar_d2_run(model, skeletal_generators(model, legs, chi), name, bounds, o);
  }
  if (name == "open-frobenius") {
    const int segments = or_default(o.segments_max, 4);
    bounds["segments_max"] = segments;
    auto model = open_cobar_model(!o.restricted);
    return cobar_d2_run(model, open_generators(model, segments, chi), name, bounds, o);
  }
  throw InputError("unknown properad '" + name + "' (closed-frobenius, mutated-closed-frobenius, open-frobenius)");
}

// ---------------------------------------------------------------------------------------------

template <class E>
int axioms_run(const Properad<E>& p, const std::vector<E>& samples, std::size_t max_labels, const std::string& name,
               OrderedJson bounds, const Options& o) {
  AssociativityOptions opt;
  opt.max_total_labels = max_labels;
  const std::vector<std::pair<std::string, AxiomReport>> reports{
      {"sigma-bimodule", check_sigma_bimodule_by_presentation(p, samples)},
      {"equivariance", check_equivariance(p, samples, max_labels)},
      {"associativity", check_associativity(p, samples, opt)}};
  bool ok = true;
  OrderedJson list = OrderedJson::array();
  for (const auto& [axiom, r] : reports) {
    OrderedJson a;
    a["axiom"] = axiom;
    a["cases"] = r.cases;
    a["violations"] = r.violations.size();
    a["verdict"] = r.ok() ? "PASS" : "FAIL";
    if (!r.ok()) a["witness"] = r.violations.front().axiom + ": " + r.violations.front().witness;
    ok = ok && r.ok();
    list.push_back(a);
  }
  OrderedJson j;
  j["properad"] = name;
  j["bounds"] = bounds;
  j["samples"] = samples.size();
  j["verdict"] = ok ? "PASS" : "FAIL";
  j["axioms"] = list;
  emit(j, o);
  return ok ? kPass : kViolation;
}

int axioms(const std::string& name, const Options& o) {
  OrderedJson bounds;
  if (name == "closed-frobenius" || name == "mutated-closed-frobenius") {
    const int legs = or_default(o.legs_max, 2), chi = or_default(o.chi_max, 3);
    bounds["legs_max"] = legs;
    bounds["chi_max"] = chi;
    std::vector<Span<ClosedGenerator>> samples;
    for (const auto& g : closed_generators(legs, chi, !o.restricted)) samples.push_back(span_of(g));
    return axioms_run(closed_frobenius(name == "closed-frobenius" ? Mutation::none : Mutation::composition_sign),
                      samples, 0, name, bounds, o);
  }
  if (name == "open-frobenius") {
    const int segments = or_default(o.segments_max, 4);
    bounds["segments_max"] = segments;
    std::vector<Span<OpenSurface>> samples;
    for (int m = 0; m <= segments; ++m)
      for (int n = 0; m + n <= segments; ++n) {
        if (o.restricted && (m == 0 || n == 0)) continue;
        for (const auto& s : open_surfaces_on(skeletal_corolla(m, n), OpenBounds{1, 1, 1})) samples.push_back(span_of(s));
      }
    return axioms_run(open_frobenius(genus_rule(o)), samples, static_cast<std::size_t>(segments), name, bounds, o);
  }
  if (name == "open-closed-frobenius") {
    const int legs = or_default(o.legs_max, 3);
    bounds["legs_max"] = legs;
    std::vector<Span<OpenClosedGenerator>> samples;
    for (const auto& g : open_closed_generators(legs)) samples.push_back(span_of(g));
    // pairs and triples may carry up to twice the per-sample bound
    return axioms_run(open_closed_frobenius(), samples, static_cast<std::size_t>(2 * legs), name, bounds, o);
  }
  if (name == "endomorphism") {
    if (o.dgvs.empty()) throw InputError("axioms endomorphism needs --dgvs");
    const DGVectorSpace v = io::dgvs_from_json(io::read_json_file(o.dgvs));
    const int legs = or_default(o.legs_max, 2);
    bounds["legs_max"] = legs;
    std::vector<EndElement> samples;
    for (int m = 0; m <= legs; ++m)
      for (int n = 0; n <= legs; ++n)
        enumerate_words(v.dim(), m, [&](const Word& J) {
          enumerate_words(v.dim(), n, [&](const Word& I) {
            const int degree = word_degree(v.basis(), J) - word_degree(v.basis(), I);
            samples.push_back(skeletal_end(GradedLinearMap{m, n, {{{J, I}, Rational(1)}}, degree}));
          });
        });
    return axioms_run(endomorphism_properad(v), samples, 0, name, bounds, o);
  }
  throw InputError("unknown properad '" + name +
                   "' (closed-frobenius, mutated-closed-frobenius, open-frobenius, open-closed-frobenius, endomorphism)");
}

// ---------------------------------------------------------------------------------------------

template <class G>
int check_run(const TildeModel<G>& model, const io::Json& doc, const Options& o,
              const std::function<std::vector<CheckReport>(const TildeElement<G>&, const Truncation&)>& extra) {
  const TildeElement<G> L = load_structure(model, io::structure_entries(model, doc), !o.restricted);
  Truncation t;
  t.chi_max = or_default(o.chi_max, 4);
  t.m_max = o.m_max;
  t.n_max = o.n_max;
  std::vector<CheckReport> reports{master_check(model, L, t)};
  for (auto& r : extra(L, t)) reports.push_back(std::move(r));
  const Truncation r = t.resolved();
  OrderedJson j;
  j["flavor"] = model.flavor;
  j["truncation"] = {{"chi_max", r.chi_max}, {"m_max", r.m_max}, {"n_max", r.n_max}};
  j["terms"] = L.size();
  bool ok = true;
  for (const auto& rep : reports) ok = ok && rep.ok();
  const bool agree = io::verdicts_agree(reports);
  j["verdict"] = ok && agree ? "PASS" : "FAIL";
  if (reports.size() > 1) j["checkers_agree"] = agree;
  OrderedJson list = OrderedJson::array();
  for (const auto& rep : reports) list.push_back(io::report_to_json(rep));
  j["checkers"] = list;
  emit(j, o);
  return ok && agree ? kPass : kViolation;
}

int check(const std::string& flavor, const std::string& dgvs_path, const std::string& structure_path,
          const Options& o) {
  const DGVectorSpace v = io::dgvs_from_json(io::read_json_file(dgvs_path));
  const io::Json doc = io::read_json_file(structure_path);
  const bool components = o.cross_check == "components" || o.cross_check == "both";
  const bool op = o.cross_check == "operator" || o.cross_check == "both";
  if (flavor == "closed") {
    const auto model = closed_tilde_model(v);
    return check_run<ClosedGenerator>(model, doc, o, [&](const TildeElement<ClosedGenerator>& L, const Truncation& t) {
      std::vector<CheckReport> out;
      if (components) out.push_back(ibl_component_relations(model, L, t));
      if (op) out.push_back(operator_square_check(model, L, t));
      return out;
    });
  }
  if (o.cross_check != "none")
    throw InputError("--cross-check is available for the closed flavor only");
  if (flavor == "open")
    return check_run<OpenSurface>(open_tilde_model(v, genus_rule(o)), doc, o,
                                  [](const TildeElement<OpenSurface>&, const Truncation&) { return std::vector<CheckReport>{}; });
  if (flavor == "open-closed")
    return check_run<OpenClosedGenerator>(open_closed_tilde_model(v), doc, o,
                                          [](const TildeElement<OpenClosedGenerator>&, const Truncation&) {
                                            return std::vector<CheckReport>{};
                                          });
  throw InputError("unknown flavor '" + flavor + "' (closed, open, open-closed)");
}

// ---------------------------------------------------------------------------------------------

template <class G>
int export_dot_run(const CobarModel<G>& model, const std::vector<G>& gens, const Options& o) {
  CobarDifferential<G> d(model);
  std::string text;
  int index = 0;
  for (const auto& p : gens) {
    text += to_dot(model, single_vertex(model, p).begin()->first, "generator " + p.str());
    for (const auto& [g, c] : d.apply(single_vertex(model, p)))
      text += to_dot(model, g, "term " + std::to_string(++index) + " of d" + p.str() + ": " + c.str());
  }
  if (text.empty()) throw InputError("no generator matches the requested corolla and chi");
  if (o.out.empty()) std::cout << text;
  else write_text(o.out, text);
  return kPass;
}

int export_dot(const std::string& name, int m, int n, const Options& o) {
  if (m < 0 || n < 0) throw InputError("--m and --n must be nonnegative");
  const int chi = or_default(o.chi_max, 2);
  const DirectedCorolla c = skeletal_corolla(m, n);
  auto exact = [chi](auto model) {
    return [model, chi](const auto& p) { return model.chi(p) != chi; };
  };
  if (name == "closed-frobenius") {
    auto model = closed_cobar_model(Mutation::none, !o.restricted);
    model.vertex_cap = o.vertex_cap;
    auto gens = model.generators(c.outputs, c.inputs, chi);
    std::erase_if(gens, exact(model));
    return export_dot_run(model, gens, o);
  }
  if (name == "open-frobenius") {
    auto model = open_cobar_model(!o.restricted);
    model.vertex_cap = o.vertex_cap;
    auto gens = model.generators(c.outputs, c.inputs, chi);
    std::erase_if(gens, exact(model));
    return export_dot_run(model, gens, o);
  }
  throw InputError("unknown properad '" + name + "' (closed-frobenius, open-frobenius)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Properads, their cobar complexes and master equations"};
  app.require_subcommand(1);
  Options o;
  auto bounds = [&o](CLI::App* sub) {
    sub->add_option("--chi-max", o.chi_max, "Largest chi considered")->check(CLI::NonNegativeNumber);
    sub->add_option("--vertex-cap", o.vertex_cap, "Largest number of graph vertices")->check(CLI::PositiveNumber);
    sub->add_option("--legs-max", o.legs_max, "Largest number of outputs, and of inputs, per generator")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--segments-max", o.segments_max, "Largest total number of open segments")
        ->check(CLI::NonNegativeNumber);
    auto* g = sub->add_flag("--generalized", "Allow generators without inputs or outputs (default)");
    auto* r = sub->add_flag("--restricted", o.restricted, "Require at least one input and one output");
    g->excludes(r);
    sub->add_option("--genus-rule", o.genus_rule, "Genus of glued open surfaces")
        ->check(CLI::IsMember({"ledger", "paper-verbal"}));
    sub->add_option("--out", o.out, "Write the report to this file instead of stdout");
  };

  std::string left, right, gluing;
  auto* glue = app.add_subcommand("glue-open", "Glue two open surfaces along a gluing document");
  glue->add_option("left", left, "Surface whose inputs are glued")->required();
  glue->add_option("right", right, "Surface whose outputs are glued")->required();
  glue->add_option("gluing", gluing, "Pairs [input of left, output of right]")->required();
  glue->add_option("--genus-rule", o.genus_rule)->check(CLI::IsMember({"ledger", "paper-verbal"}));
  glue->add_option("--out", o.out, "Write the result to this file instead of stdout");
  glue->add_option("--dot", o.dot, "Also write the two-vertex graph as Graphviz DOT");

  std::string name;
  auto* cobar = app.add_subcommand("cobar-d2", "Check that the cobar differential squares to zero");
  cobar->add_option("properad", name)->required();
  bounds(cobar);
  cobar->add_option("--dot", o.dot, "Write the failing graph as Graphviz DOT");

  std::string flavor, dgvs, structure;
  auto* chk = app.add_subcommand("check", "Check the master equation for structure constants");
  chk->add_option("flavor", flavor, "closed, open or open-closed")->required();
  chk->add_option("dgvs", dgvs, "Graded vector space with differential")->required();
  chk->add_option("structure", structure, "Structure constants")->required();
  bounds(chk);
  chk->add_option("--m-max", o.m_max, "Largest number of outputs")->check(CLI::NonNegativeNumber);
  chk->add_option("--n-max", o.n_max, "Largest number of inputs")->check(CLI::NonNegativeNumber);
  chk->add_option("--cross-check", o.cross_check, "Independent readings to compare against")
      ->check(CLI::IsMember({"none", "components", "operator", "both"}));

  auto* ax = app.add_subcommand("axioms", "Check the properad axioms exhaustively within bounds");
  ax->add_option("properad", name)->required();
  bounds(ax);
  ax->add_option("--dgvs", o.dgvs, "Vector space for the endomorphism properad");

  int m = 0, n = 0;
  auto* dot = app.add_subcommand("export-dot", "Write the cobar differential of skeletal generators as DOT");
  dot->add_option("properad", name)->required();
  dot->add_option("--m", m, "Number of outputs")->required();
  dot->add_option("--n", n, "Number of inputs")->required();
  bounds(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*glue) return glue_open(left, right, gluing, o);
    if (*cobar) return cobar_d2(name, o);
    if (*chk) return check(flavor, dgvs, structure, o);
    if (*ax) return axioms(name, o);
    if (*dot) return export_dot(name, m, n, o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const CapacityError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
