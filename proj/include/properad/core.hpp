#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "properad/combinatorics.hpp"
#include "properad/linear.hpp"

namespace properad {

struct DirectedCorolla {
  LabelSet outputs;
  LabelSet inputs;
  friend auto operator<=>(const DirectedCorolla&, const DirectedCorolla&) = default;
};

inline DirectedCorolla make_corolla(std::vector<Label> outputs, std::vector<Label> inputs) {
  DirectedCorolla c{make_label_set(std::move(outputs)), make_label_set(std::move(inputs))};
  if (!disjoint(c.outputs, c.inputs)) throw InputError("corolla outputs and inputs overlap");
  return c;
}

/// Covariant relabeling of outputs and inputs.
struct Relabel {
  Bijection out;
  Bijection in;
};

inline Relabel compose(const Relabel& f, const Relabel& g) { return {compose(f.out, g.out), compose(f.in, g.in)}; }

/// Checks that `eta` glues inputs of `left` to outputs of `right` and that the composite corolla is well formed.
inline void validate_gluing(const DirectedCorolla& left, const DirectedCorolla& right, const Bijection& eta) {
  if (eta.empty()) throw InputError("gluing must pair at least one input with one output");
  LabelSet b = domain(eta), a = image(eta);
  for (const auto& x : b)
    if (!contains(left.inputs, x)) throw InputError("glued label '" + x + "' is not an input of the left factor");
  for (const auto& x : a)
    if (!contains(right.outputs, x)) throw InputError("glued label '" + x + "' is not an output of the right factor");
  LabelSet outs_l = left.outputs, outs_r = set_minus(right.outputs, a);
  LabelSet ins_l = set_minus(left.inputs, b), ins_r = right.inputs;
  if (!disjoint(outs_l, outs_r) || !disjoint(ins_l, ins_r) ||
      !disjoint(set_union(outs_l, outs_r), set_union(ins_l, ins_r)))
    throw InputError("composite corolla has overlapping labels");
}

inline DirectedCorolla composite_corolla(const DirectedCorolla& left, const DirectedCorolla& right,
                                         const Bijection& eta) {
  return {set_union(left.outputs, set_minus(right.outputs, image(eta))),
          set_union(set_minus(left.inputs, domain(eta)), right.inputs)};
}

/// A properad given by behavior: an element type E (a vector in one component) and its operations.
template <class E>
struct Properad {
  std::string name;
  std::function<DirectedCorolla(const E&)> corolla;
  std::function<E(const E&, const Relabel&)> act;
  /// left o^eta right, eta: inputs of left -> outputs of right.
  std::function<E(const E&, const E&, const Bijection&)> compose;
  std::function<bool(const E&, const E&)> equal = [](const E& a, const E& b) { return a == b; };
  std::function<std::string(const E&)> describe = [](const E&) { return std::string("<element>"); };
  /// Labels of different colors are never glued together or exchanged by relabelings.
  std::function<int(const E&, const Label&)> color = [](const E&, const Label&) { return 0; };
  /// Homogeneous degree and negation, used for the Koszul signs of the degenerate associativity clauses.
  std::function<int(const E&)> degree = [](const E&) { return 0; };
  std::function<E(const E&)> negate;
};

/// Formal linear combination of generators of a set-properad, all on one corolla.
template <class G>
struct Span {
  DirectedCorolla corolla;
  Lin<G> terms;
  friend bool operator==(const Span& a, const Span& b) { return a.corolla == b.corolla && a.terms == b.terms; }
};

template <class G>
Span<G> span_of(const G& g, Rational c = Rational(1)) {
  Span<G> s{g.corolla(), {}};
  accumulate(s.terms, g, c);
  return s;
}

/// Linear span of a properad in sets. G provides corolla(), relabel(Relabel), and a static
/// compose(left, right, eta) returning std::nullopt when the composite vanishes.
template <class G>
Properad<Span<G>> linear_span(std::string name,
                              std::function<std::optional<G>(const G&, const G&, const Bijection&)> compose_gen) {
  Properad<Span<G>> p;
  p.name = std::move(name);
  p.corolla = [](const Span<G>& x) { return x.corolla; };
  p.act = [](const Span<G>& x, const Relabel& r) {
    Span<G> out{{make_label_set(std::vector<Label>(image(restrict_to(r.out, x.corolla.outputs)))),
                 make_label_set(std::vector<Label>(image(restrict_to(r.in, x.corolla.inputs))))},
                {}};
    for (const auto& [g, c] : x.terms) accumulate(out.terms, g.relabel(r), c);
    return out;
  };
  p.compose = [compose_gen](const Span<G>& x, const Span<G>& y, const Bijection& eta) {
    validate_gluing(x.corolla, y.corolla, eta);
    Span<G> out{composite_corolla(x.corolla, y.corolla, eta), {}};
    for (const auto& [gx, cx] : x.terms)
      for (const auto& [gy, cy] : y.terms)
        if (auto z = compose_gen(gx, gy, eta)) accumulate(out.terms, *z, cx * cy);
    return out;
  };
  p.describe = [](const Span<G>& x) {
    std::string s;
    for (const auto& [g, c] : x.terms) s += (s.empty() ? "" : " + ") + c.str() + "*" + g.str();
    return s.empty() ? std::string("0") : s;
  };
  return p;
}

// ---------------------------------------------------------------------------------------------
// Axiom checkers

struct Violation {
  std::string axiom;
  std::string witness;
};

struct AxiomReport {
  std::size_t cases = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline std::string show(const Bijection& f) {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : f) {
    s += (first ? "" : ",") + k + "->" + v;
    first = false;
  }
  return s + "}";
}

namespace detail {

inline Bijection prefix_labels(const LabelSet& s, const std::string& prefix) {
  Bijection f;
  for (const auto& x : s) f[x] = prefix + x;
  return f;
}

/// Identity, then every transposition of the given labels.
inline std::vector<Bijection> generating_permutations(const LabelSet& s) {
  std::vector<Bijection> out{identity_on(s)};
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      Bijection t = identity_on(s);
      std::swap(t[s[i]], t[s[j]]);
      out.push_back(t);
    }
  return out;
}

/// All bijections of s onto itself that preserve the coloring.
template <class E>
std::vector<Bijection> color_preserving_permutations(const Properad<E>& p, const E& x, const LabelSet& s) {
  std::vector<Bijection> out;
  for (const auto& f : all_bijections(s, s)) {
    bool ok = true;
    for (const auto& [k, v] : f) ok = ok && p.color(x, k) == p.color(x, v);
    if (ok) out.push_back(f);
  }
  return out;
}

template <class E>
std::vector<Bijection> color_preserving_generators(const Properad<E>& p, const E& x, const LabelSet& s) {
  std::vector<Bijection> out;
  for (const auto& f : generating_permutations(s)) {
    bool ok = true;
    for (const auto& [k, v] : f) ok = ok && p.color(x, k) == p.color(x, v);
    if (ok) out.push_back(f);
  }
  return out;
}

/// Color-compatible bijections from b (inputs of x) onto a (outputs of y).
template <class E>
std::vector<Bijection> gluings_between(const Properad<E>& p, const E& x, const LabelSet& b, const E& y,
                                       const LabelSet& a) {
  std::vector<Bijection> out;
  for (const auto& f : all_bijections(b, a)) {
    bool ok = true;
    for (const auto& [k, v] : f) ok = ok && p.color(x, k) == p.color(y, v);
    if (ok) out.push_back(f);
  }
  return out;
}

}  // namespace detail

/// Axiom 1: the identity acts trivially and relabelings compose functorially, tested on every pair.
template <class E>
AxiomReport check_sigma_bimodule(const Properad<E>& p, const std::vector<E>& samples) {
  AxiomReport rep;
  for (const auto& x : samples) {
    const DirectedCorolla c = p.corolla(x);
    ++rep.cases;
    if (!p.equal(p.act(x, {identity_on(c.outputs), identity_on(c.inputs)}), x))
      rep.violations.push_back({"axiom-1 identity", p.describe(x)});
    auto outs = detail::color_preserving_permutations(p, x, c.outputs);
    auto ins = detail::color_preserving_permutations(p, x, c.inputs);
    for (const auto& r2 : outs)
      for (const auto& s2 : ins) {
        const E inner = p.act(x, {r2, s2});
        for (const auto& r1 : outs)
          for (const auto& s1 : ins) {
            ++rep.cases;
            if (!p.equal(p.act(x, {compose(r1, r2), compose(s1, s2)}), p.act(inner, {r1, s1})))
              rep.violations.push_back({"axiom-1 functoriality", p.describe(x) + " rho=" + show(r1) + " sigma=" +
                                                                     show(s1) + " rho'=" + show(r2) +
                                                                     " sigma'=" + show(s2)});
          }
      }
    // relabeling onto fresh labels and back
    Relabel fresh{detail::prefix_labels(c.outputs, "r:"), detail::prefix_labels(c.inputs, "r:")};
    ++rep.cases;
    if (!p.equal(p.act(p.act(x, fresh), {inverse(fresh.out), inverse(fresh.in)}), x))
      rep.violations.push_back({"axiom-1 fresh relabeling", p.describe(x)});
  }
  return rep;
}

namespace detail {

/// Adjacent transposition of one color class on one side; `side` 0 is outputs, 1 inputs.
struct CoxeterGenerator {
  Relabel relabel;
  int side = 0;
  int color = 0;
  std::size_t position = 0;
};

template <class E>
std::vector<CoxeterGenerator> coxeter_generators(const Properad<E>& p, const E& x) {
  const DirectedCorolla c = p.corolla(x);
  std::vector<CoxeterGenerator> out;
  for (int side = 0; side < 2; ++side) {
    const LabelSet& labels = side == 0 ? c.outputs : c.inputs;
    std::map<int, std::vector<Label>> classes;
    for (const auto& l : labels) classes[p.color(x, l)].push_back(l);
    for (const auto& [color, ls] : classes)
      for (std::size_t i = 0; i + 1 < ls.size(); ++i) {
        Bijection t = identity_on(labels);
        std::swap(t[ls[i]], t[ls[i + 1]]);
        Relabel r{identity_on(c.outputs), identity_on(c.inputs)};
        (side == 0 ? r.out : r.in) = t;
        out.push_back({r, side, color, i});
      }
  }
  return out;
}

inline std::string relabel_key(const Relabel& r) {
  std::string k;
  for (const auto& [a, b] : r.out) k += b + '\x1f';
  k += '\x1e';
  for (const auto& [a, b] : r.in) k += b + '\x1f';
  return k;
}

}  // namespace detail

/// Axiom 1 through a presentation of the relabeling group, for samples too large for every pair.
///
/// The group of color-preserving relabelings is generated by adjacent transpositions within each color
/// class, subject to the Coxeter relations. For each orbit (closed under the generators by search), the
/// check confirms that the generators satisfy those relations on every orbit element and that acting by
/// each group element agrees with acting by its parent in a spanning tree followed by one generator.
/// Together these make the action a homomorphism, so functoriality holds for every pair. The cost is
/// |orbit| * |group| actions instead of |orbit| * |group|^2.
template <class E>
AxiomReport check_sigma_bimodule_by_presentation(const Properad<E>& p, const std::vector<E>& samples) {
  AxiomReport rep;
  std::set<std::string> done;
  for (const auto& x : samples) {
    if (done.count(p.describe(x))) continue;
    const auto gens = detail::coxeter_generators(p, x);
    const DirectedCorolla c = p.corolla(x);
    // orbit of x under the generators
    std::vector<E> orbit{x};
    std::set<std::string> seen{p.describe(x)};
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (const auto& g : gens) {
        E y = p.act(orbit[i], g.relabel);
        if (seen.insert(p.describe(y)).second) orbit.push_back(std::move(y));
      }
    done.insert(seen.begin(), seen.end());
    // spanning tree of the group: element w = gen o parent
    std::vector<Relabel> elements{{identity_on(c.outputs), identity_on(c.inputs)}};
    std::vector<std::pair<std::size_t, std::size_t>> tree{{0, 0}};
    std::set<std::string> keys{detail::relabel_key(elements[0])};
    for (std::size_t i = 0; i < elements.size(); ++i)
      for (std::size_t k = 0; k < gens.size(); ++k) {
        Relabel w = compose(gens[k].relabel, elements[i]);
        if (keys.insert(detail::relabel_key(w)).second) {
          elements.push_back(std::move(w));
          tree.push_back({i, k});
        }
      }
    for (const auto& y : orbit) {
      ++rep.cases;
      if (!p.equal(p.act(y, elements[0]), y)) rep.violations.push_back({"axiom-1 identity", p.describe(y)});
      // Coxeter relations: s^2, (s t)^3 for neighbours in one class, (s t)^2 otherwise
      for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t b = a; b < gens.size(); ++b) {
          const bool braid = a != b && gens[a].side == gens[b].side && gens[a].color == gens[b].color &&
                             gens[b].position == gens[a].position + 1;
          const int order = a == b ? 1 : (braid ? 3 : 2);
          E z = y;
          for (int k = 0; k < order; ++k) {
            if (a != b) z = p.act(z, gens[b].relabel);
            z = p.act(z, gens[a].relabel);
          }
          if (a == b) z = p.act(z, gens[a].relabel);
          ++rep.cases;
          if (!p.equal(z, y))
            rep.violations.push_back({"axiom-1 relation", p.describe(y) + " generators " + show(gens[a].relabel.out) +
                                                              show(gens[a].relabel.in) + " and " +
                                                              show(gens[b].relabel.out) + show(gens[b].relabel.in)});
        }
      std::vector<E> image{y};
      for (std::size_t w = 1; w < elements.size(); ++w) {
        image.push_back(p.act(y, elements[w]));
        const auto [parent, k] = tree[w];
        ++rep.cases;
        if (!p.equal(image[w], p.act(image[parent], gens[k].relabel)))
          rep.violations.push_back({"axiom-1 functoriality",
                                    p.describe(y) + " rho=" + show(gens[k].relabel.out) + " sigma=" +
                                        show(gens[k].relabel.in) + " rho'=" + show(elements[parent].out) +
                                        " sigma'=" + show(elements[parent].in)});
      }
      Relabel fresh{detail::prefix_labels(c.outputs, "r:"), detail::prefix_labels(c.inputs, "r:")};
      ++rep.cases;
      if (!p.equal(p.act(p.act(y, fresh), {inverse(fresh.out), inverse(fresh.in)}), y))
        rep.violations.push_back({"axiom-1 fresh relabeling", p.describe(y)});
    }
  }
  return rep;
}

/// Axiom 2: compositions are equivariant. Relabelings range over generators of each symmetric group
/// (identity and transpositions, varied one factor at a time, plus all factors at once), which together
/// with Axiom 1 covers the full groups. Pairs with more than `max_total_labels` labels in total are skipped (0 = unlimited).
template <class E>
AxiomReport check_equivariance(const Properad<E>& p, const std::vector<E>& samples, std::size_t max_total_labels = 0) {
  AxiomReport rep;
  for (const auto& x0 : samples) {
    const DirectedCorolla cx0 = p.corolla(x0);
    const E x = p.act(x0, {detail::prefix_labels(cx0.outputs, "L:"), detail::prefix_labels(cx0.inputs, "L:")});
    const DirectedCorolla cx = p.corolla(x);
    for (const auto& y0 : samples) {
      const DirectedCorolla cy0 = p.corolla(y0);
      if (max_total_labels &&
          cx0.outputs.size() + cx0.inputs.size() + cy0.outputs.size() + cy0.inputs.size() > max_total_labels)
        continue;
      const E y = p.act(y0, {detail::prefix_labels(cy0.outputs, "R:"), detail::prefix_labels(cy0.inputs, "R:")});
      const DirectedCorolla cy = p.corolla(y);
      const int kmax = static_cast<int>(std::min(cx.inputs.size(), cy.outputs.size()));
      for (int k = 1; k <= kmax; ++k)
        for (const auto& b : subsets_of_size(cx.inputs, k))
          for (const auto& a : subsets_of_size(cy.outputs, k))
            for (const auto& eta : detail::gluings_between(p, x, b, y, a)) {
              const E xy = p.compose(x, y, eta);
              const LabelSet c2 = set_minus(cy.outputs, a), d1 = set_minus(cx.inputs, b);
              auto r1s = detail::color_preserving_generators(p, x, cx.outputs);
              auto s1s = detail::color_preserving_generators(p, x, cx.inputs);
              auto r2s = detail::color_preserving_generators(p, y, cy.outputs);
              auto s2s = detail::color_preserving_generators(p, y, cy.inputs);
              std::vector<std::array<Bijection, 4>> choices;
              for (const auto& r : r1s) choices.push_back({r, s1s[0], r2s[0], s2s[0]});
              for (const auto& s : s1s) choices.push_back({r1s[0], s, r2s[0], s2s[0]});
              for (const auto& r : r2s) choices.push_back({r1s[0], s1s[0], r, s2s[0]});
              for (const auto& s : s2s) choices.push_back({r1s[0], s1s[0], r2s[0], s});
              choices.push_back({r1s.back(), s1s.back(), r2s.back(), s2s.back()});
              for (const auto& [r1, s1, r2, s2] : choices) {
                ++rep.cases;
                Relabel outer{disjoint_union(r1, restrict_to(r2, c2)), disjoint_union(restrict_to(s1, d1), s2)};
                E lhs = p.act(xy, outer);
                Bijection eta2;
                for (const auto& [bb, aa] : eta) eta2[apply(s1, bb)] = apply(r2, aa);
                E rhs = p.compose(p.act(x, {r1, s1}), p.act(y, {r2, s2}), eta2);
                if (!p.equal(lhs, rhs))
                  rep.violations.push_back({"axiom-2", "x=" + p.describe(x) + " y=" + p.describe(y) +
                                                           " eta=" + show(eta) + " rho1=" + show(r1) +
                                                           " sigma1=" + show(s1) + " rho2=" + show(r2) +
                                                           " sigma2=" + show(s2)});
              }
            }
    }
  }
  return rep;
}

struct AssociativityOptions {
  /// Also test the clause with A3, B3 empty (plain sequential composition).
  bool sequential_clause = true;
  /// Skip triples whose labels exceed this many in total (0 = unlimited).
  std::size_t max_total_labels = 0;
  /// Return once this many violations are found (0 = check everything).
  std::size_t stop_after = 0;
};

/// Axiom 3: the main clause with B3 nonempty, both degenerate clauses, and optionally the sequential clause.
template <class E>
AxiomReport check_associativity(const Properad<E>& p, const std::vector<E>& samples,
                                const AssociativityOptions& opt = {}) {
  AxiomReport rep;
  auto tag = [&](const E& e, const std::string& prefix) {
    DirectedCorolla c = p.corolla(e);
    return p.act(e, {detail::prefix_labels(c.outputs, prefix), detail::prefix_labels(c.inputs, prefix)});
  };
  auto report = [&](const std::string& clause, const E& x, const E& y, const E& z, const std::string& glue) {
    rep.violations.push_back(
        {"axiom-3 " + clause, "x=" + p.describe(x) + " y=" + p.describe(y) + " z=" + p.describe(z) + " " + glue});
  };
  std::vector<E> xs, ys, zs;
  for (const auto& s : samples) {
    xs.push_back(tag(s, "X:"));
    ys.push_back(tag(s, "Y:"));
    zs.push_back(tag(s, "Z:"));
  }
  std::vector<std::size_t> sizes;
  for (const auto& s : samples) {
    const DirectedCorolla c = p.corolla(s);
    sizes.push_back(c.outputs.size() + c.inputs.size());
  }
  const std::size_t cap = opt.max_total_labels ? opt.max_total_labels : SIZE_MAX / 4;
  const std::size_t smallest = sizes.empty() ? 0 : *std::min_element(sizes.begin(), sizes.end());
  for (std::size_t ix = 0; ix < xs.size(); ++ix)
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
      if (sizes[ix] + sizes[iy] + smallest > cap) continue;
      for (std::size_t iz = 0; iz < zs.size(); ++iz) {
        if (opt.stop_after && rep.violations.size() >= opt.stop_after) return rep;
        if (sizes[ix] + sizes[iy] + sizes[iz] > cap) continue;
        const E& x = xs[ix];
        const E& y = ys[iy];
        const E& z = zs[iz];
        const DirectedCorolla cx = p.corolla(x), cy = p.corolla(y), cz = p.corolla(z);
        // Main clause: x glued to y along B1->A1 and to z along B3->A3, y glued to z along B2->A2.
        for (const auto& b1 : all_subsets(cx.inputs)) {
          if (b1.empty()) continue;
          const LabelSet rest_x = set_minus(cx.inputs, b1);
          for (const auto& a1 : subsets_of_size(cy.outputs, static_cast<int>(b1.size())))
            for (const auto& eta1 : detail::gluings_between(p, x, b1, y, a1))
              for (const auto& b2 : all_subsets(cy.inputs)) {
                if (b2.empty()) continue;
                for (const auto& a2 : subsets_of_size(cz.outputs, static_cast<int>(b2.size())))
                  for (const auto& eta2 : detail::gluings_between(p, y, b2, z, a2))
                    for (const auto& b3 : all_subsets(rest_x)) {
                      if (b3.empty() && !opt.sequential_clause) continue;
                      const LabelSet rest_z = set_minus(cz.outputs, a2);
                      for (const auto& a3 : subsets_of_size(rest_z, static_cast<int>(b3.size()))) {
                        std::vector<Bijection> eta3s =
                            b3.empty() ? std::vector<Bijection>{Bijection{}} : detail::gluings_between(p, x, b3, z, a3);
                        for (const auto& eta3 : eta3s) {
                          ++rep.cases;
                          E lhs = p.compose(p.compose(x, y, eta1), z, disjoint_union(eta2, eta3));
                          E rhs = p.compose(x, p.compose(y, z, eta2), disjoint_union(eta1, eta3));
                          if (!p.equal(lhs, rhs))
                            report(b3.empty() ? "sequential" : "main", x, y, z,
                                   "eta1=" + show(eta1) + " eta2=" + show(eta2) + " eta3=" + show(eta3));
                        }
                      }
                    }
              }
        }
        // Degenerate clause with A1, B1 empty: x and y both glued to z.
        for (const auto& b3 : all_subsets(cx.inputs)) {
          if (b3.empty()) continue;
          for (const auto& a3 : subsets_of_size(cz.outputs, static_cast<int>(b3.size())))
            for (const auto& eta3 : detail::gluings_between(p, x, b3, z, a3)) {
              const LabelSet rest_z = set_minus(cz.outputs, a3);
              for (const auto& b2 : all_subsets(cy.inputs)) {
                if (b2.empty()) continue;
                for (const auto& a2 : subsets_of_size(rest_z, static_cast<int>(b2.size())))
                  for (const auto& eta2 : detail::gluings_between(p, y, b2, z, a2)) {
                    ++rep.cases;
                    E lhs = p.compose(y, p.compose(x, z, eta3), eta2);
                    E rhs = p.compose(x, p.compose(y, z, eta2), eta3);
                    if (p.negate && is_odd(p.degree(x) * p.degree(y))) rhs = p.negate(rhs);
                    if (!p.equal(lhs, rhs))
                      report("degenerate A1=B1=0", x, y, z, "eta2=" + show(eta2) + " eta3=" + show(eta3));
                  }
              }
            }
        }
        // Degenerate clause with A2, B2 empty: x glued to both y and z.
        for (const auto& b1 : all_subsets(cx.inputs)) {
          if (b1.empty()) continue;
          const LabelSet rest_x = set_minus(cx.inputs, b1);
          for (const auto& a1 : subsets_of_size(cy.outputs, static_cast<int>(b1.size())))
            for (const auto& eta1 : detail::gluings_between(p, x, b1, y, a1))
              for (const auto& b3 : all_subsets(rest_x)) {
                if (b3.empty()) continue;
                for (const auto& a3 : subsets_of_size(cz.outputs, static_cast<int>(b3.size())))
                  for (const auto& eta3 : detail::gluings_between(p, x, b3, z, a3)) {
                    ++rep.cases;
                    E lhs = p.compose(p.compose(x, y, eta1), z, eta3);
                    E rhs = p.compose(p.compose(x, z, eta3), y, eta1);
                    if (p.negate && is_odd(p.degree(y) * p.degree(z))) rhs = p.negate(rhs);
                    if (!p.equal(lhs, rhs))
                      report("degenerate A2=B2=0", x, y, z, "eta1=" + show(eta1) + " eta3=" + show(eta3));
                  }
              }
        }
      }
    }
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Skeletal version

inline Label out_label(int k) { return "o" + std::to_string(k); }
inline Label in_label(int k) { return "i" + std::to_string(k); }

inline DirectedCorolla skeletal_corolla(int m, int n) {
  std::vector<Label> o, i;
  for (int k = 1; k <= m; ++k) o.push_back(out_label(k));
  for (int k = 1; k <= n; ++k) i.push_back(in_label(k));
  return make_corolla(o, i);
}

/// Skeletal action: outputs move by rho, inputs by sigma^{-1} (1-based permutations given as vectors).
template <class E>
E skeletal_act(const Properad<E>& p, const E& x, const std::vector<int>& rho, const std::vector<int>& sigma) {
  Relabel r;
  for (std::size_t k = 0; k < rho.size(); ++k) r.out[out_label(static_cast<int>(k) + 1)] = out_label(rho[k]);
  for (std::size_t k = 0; k < sigma.size(); ++k) r.in[in_label(sigma[k])] = in_label(static_cast<int>(k) + 1);
  return p.act(x, r);
}

/// Auxiliary choice of the conjugating bijections of a skeletal composition.
struct SkeletalChoice {
  std::mt19937_64* rng = nullptr;  // null: increasing choices
  /// Explicit label lists for C1, D1, B, C2, D2, A (overrides the generated names).
  std::optional<std::array<std::vector<Label>, 6>> names;
};

struct SkeletalGluing {
  std::set<int> inputs_of_left;    // N, 1-based
  std::set<int> outputs_of_right;  // M, 1-based
  std::map<int, int> xi;           // N -> M
};

/// Output and input relabelings produced by the increasing choices, as 1-based maps of the labels of the
/// labeled composite onto [m] and [n]; exposed for tests of the unshuffle property.
struct SkeletalRelabeling {
  std::map<Label, int> outputs;
  std::map<Label, int> inputs;
};

/// Skeletal composition x o^xi_{N,M} y with x in P([m1],[n1+|N|]) and y in P([m2+|M|],[n2]), computed by
/// conjugating the labeled composition with auxiliary bijections.
template <class E>
E skeletal_compose(const Properad<E>& p, const E& x, const E& y, const SkeletalGluing& g,
                   const SkeletalChoice& choice = {}, SkeletalRelabeling* used = nullptr) {
  if (g.inputs_of_left.empty()) throw InputError("skeletal composition needs a nonempty set N");
  if (g.inputs_of_left.size() != g.outputs_of_right.size() || g.xi.size() != g.inputs_of_left.size())
    throw InputError("skeletal composition: |N| and |M| differ");
  const DirectedCorolla cx = p.corolla(x), cy = p.corolla(y);
  const int m1 = static_cast<int>(cx.outputs.size());
  const int n1 = static_cast<int>(cx.inputs.size()) - static_cast<int>(g.inputs_of_left.size());
  const int m2 = static_cast<int>(cy.outputs.size()) - static_cast<int>(g.outputs_of_right.size());
  const int n2 = static_cast<int>(cy.inputs.size());
  for (int k : g.inputs_of_left)
    if (k < 1 || k > n1 + static_cast<int>(g.inputs_of_left.size())) throw InputError("N outside input range");
  for (int k : g.outputs_of_right)
    if (k < 1 || k > m2 + static_cast<int>(g.outputs_of_right.size())) throw InputError("M outside output range");

  auto names = [&](const std::string& stem, int count) {
    std::vector<Label> v;
    for (int k = 0; k < count; ++k) v.push_back(fresh_label(stem, k));
    if (choice.rng) std::shuffle(v.begin(), v.end(), *choice.rng);
    return v;
  };
  const int k = static_cast<int>(g.inputs_of_left.size());
  auto c1 = names("c1.", m1), d1 = names("d1.", n1), bset = names("b.", k);
  auto c2 = names("c2.", m2), d2 = names("d2.", n2), aset = names("a.", k);
  if (choice.names) {
    const auto& nm = *choice.names;
    c1 = nm[0], d1 = nm[1], bset = nm[2], c2 = nm[3], d2 = nm[4], aset = nm[5];
    if (static_cast<int>(c1.size()) != m1 || static_cast<int>(d1.size()) != n1 ||
        static_cast<int>(bset.size()) != k || static_cast<int>(c2.size()) != m2 ||
        static_cast<int>(d2.size()) != n2 || static_cast<int>(aset.size()) != k)
      throw InputError("skeletal composition: explicit label lists have wrong sizes");
  }

  Relabel lx, ly;
  for (int j = 1; j <= m1; ++j) lx.out[out_label(j)] = c1[j - 1];
  {
    int nb = 0, nd = 0;
    for (int j = 1; j <= n1 + k; ++j)
      lx.in[in_label(j)] = g.inputs_of_left.count(j) ? bset[nb++] : d1[nd++];
  }
  {
    int na = 0, nc = 0;
    for (int j = 1; j <= m2 + k; ++j)
      ly.out[out_label(j)] = g.outputs_of_right.count(j) ? aset[na++] : c2[nc++];
  }
  for (int j = 1; j <= n2; ++j) ly.in[in_label(j)] = d2[j - 1];

  Bijection eta;
  for (const auto& [nn, mm] : g.xi) eta[lx.in.at(in_label(nn))] = ly.out.at(out_label(mm));

  const E z = p.compose(p.act(x, lx), p.act(y, ly), eta);

  auto rho_n = increasing_unshuffle(g.inputs_of_left, n1, n2);
  auto rho_m = increasing_unshuffle(g.outputs_of_right, m2, m1);
  Relabel back;
  for (int j = 1; j <= m1; ++j) back.out[lx.out.at(out_label(j))] = out_label(j);
  for (int j = 1; j <= m2 + k; ++j)
    if (!g.outputs_of_right.count(j)) back.out[ly.out.at(out_label(j))] = out_label(rho_m.at(j));
  for (int j = 1; j <= n1 + k; ++j)
    if (!g.inputs_of_left.count(j)) back.in[lx.in.at(in_label(j))] = in_label(rho_n.at(j));
  for (int j = 1; j <= n2; ++j) back.in[ly.in.at(in_label(j))] = in_label(j);
  if (used) {
    used->outputs.clear();
    used->inputs.clear();
    for (const auto& [from, to] : back.out) used->outputs[from] = std::stoi(to.substr(1));
    for (const auto& [from, to] : back.in) used->inputs[from] = std::stoi(to.substr(1));
  }
  return p.act(z, back);
}

}  // namespace properad
