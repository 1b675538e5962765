#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "properad/core.hpp"
#include "properad/frobenius.hpp"

namespace properad {

// ---------------------------------------------------------------------------------------------
// Undecorated shape

/// Vertices 0..n-1 with genus labels; edges run from a lower vertex (its output) to an upper vertex (its input).
struct GraphShape {
  std::vector<int> genera;
  std::vector<std::pair<int, int>> edges;  // (lower, upper)
};

inline bool is_connected(const GraphShape& g) {
  const int n = static_cast<int>(g.genera.size());
  if (n == 0) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  for (auto [a, b] : g.edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw InputError("edge endpoint out of range");
    parent[find(a)] = find(b);
  }
  for (int v = 1; v < n; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

/// First Betti number plus the vertex genera.
inline int graph_genus(const GraphShape& g) {
  if (!is_connected(g)) throw InputError("graph genus of a disconnected graph");
  int sum = 0;
  for (int x : g.genera) sum += x;
  return static_cast<int>(g.edges.size()) - static_cast<int>(g.genera.size()) + 1 + sum;
}

inline bool has_directed_circuit(const GraphShape& g) {
  const int n = static_cast<int>(g.genera.size());
  std::vector<std::vector<int>> next(n);
  std::vector<int> indegree(n, 0);
  for (auto [a, b] : g.edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw InputError("edge endpoint out of range");
    next[a].push_back(b);
    ++indegree[b];
  }
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  int removed = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++removed;
    for (int w : next[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  return removed < n;
}

// ---------------------------------------------------------------------------------------------
// Decorated graphs

/// Internal edge joining output `lower_label` of vertex `lower` to input `upper_label` of vertex `upper`.
struct GraphEdge {
  int upper = 0;
  Label upper_label;
  int lower = 0;
  Label lower_label;
  friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// A directed graph whose vertices carry generators of a set-properad. The vertex order is the wedge
/// order of the degree-one vertex markers; the legs are the unpaired labels.
template <class G>
struct DecoratedGraph {
  std::vector<G> vertices;
  std::vector<GraphEdge> edges;
  friend auto operator<=>(const DecoratedGraph&, const DecoratedGraph&) = default;
  friend bool operator==(const DecoratedGraph&, const DecoratedGraph&) = default;

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      s += (i ? " ^ " : "") + std::string("v") + std::to_string(i) + vertices[i].str();
    if (!edges.empty()) {
      s += " |";
      for (const auto& e : edges)
        s += " v" + std::to_string(e.lower) + "." + e.lower_label + "->v" + std::to_string(e.upper) + "." +
             e.upper_label;
    }
    return s;
  }
};

template <class G>
using CobarElement = Lin<DecoratedGraph<G>>;

/// A set-properad together with what the cobar complex needs to know about its generators.
template <class G>
struct CobarModel {
  std::string name;
  Properad<Span<G>> properad;
  /// Every allowed generator on the given labels with chi <= chi_max.
  std::function<std::vector<G>(const LabelSet& outputs, const LabelSet& inputs, int chi_max)> generators;
  std::function<int(const G&)> chi;
  std::function<int(const G&)> genus;
  /// Composites satisfy chi(x o y) >= chi(x) + chi(y) + chi_gain.
  int chi_gain = 0;
  /// Dual of the internal differential, as coefficients of other generators; unset when it vanishes.
  std::function<Lin<G>(const G&)> dual_differential;
  int vertex_cap = 5;
};

inline CobarModel<ClosedGenerator> closed_cobar_model(Mutation mutation = Mutation::none, bool generalized = true) {
  CobarModel<ClosedGenerator> m;
  m.properad = closed_frobenius(mutation);
  m.name = m.properad.name;
  m.generators = [generalized](const LabelSet& outs, const LabelSet& ins, int chi_max) {
    std::vector<ClosedGenerator> v;
    if (!generalized && (outs.empty() || ins.empty())) return v;
    const int legs = static_cast<int>(outs.size() + ins.size());
    for (int chi = std::max(1, legs - 2); chi <= chi_max; ++chi)
      if ((chi - legs) % 2 == 0) v.push_back({outs, ins, chi});
    return v;
  };
  m.chi = [](const ClosedGenerator& g) { return g.chi; };
  m.genus = [](const ClosedGenerator& g) { return g.genus(); };
  return m;
}

inline CobarModel<OpenSurface> open_cobar_model(bool generalized = true) {
  CobarModel<OpenSurface> m;
  m.properad = open_frobenius();
  m.name = m.properad.name;
  m.generators = [generalized](const LabelSet& outs, const LabelSet& ins, int chi_max) {
    if (!generalized && (outs.empty() || ins.empty())) return std::vector<OpenSurface>{};
    // chi = 2(2g + b - 1) + s - 2 bounds both the genus and the number of boundaries.
    const int room = chi_max + 4 - static_cast<int>(outs.size() + ins.size());
    if (room < 2) return std::vector<OpenSurface>{};
    OpenBounds b{room / 4, room / 2, room / 2, chi_max};
    return open_surfaces_on({outs, ins}, b);
  };
  m.chi = [](const OpenSurface& s) { return s.chi(); };
  m.genus = [](const OpenSurface& s) { return s.big_genus(); };
  m.chi_gain = 2;
  return m;
}

template <class G>
GraphShape shape_of(const CobarModel<G>& model, const DecoratedGraph<G>& g) {
  GraphShape s;
  for (const auto& v : g.vertices) s.genera.push_back(model.genus(v));
  for (const auto& e : g.edges) s.edges.push_back({e.lower, e.upper});
  return s;
}

/// Unpaired labels of the graph.
template <class G>
DirectedCorolla legs_of(const DecoratedGraph<G>& g) {
  std::set<std::pair<int, Label>> used_out, used_in;
  for (const auto& e : g.edges) {
    used_out.insert({e.lower, e.lower_label});
    used_in.insert({e.upper, e.upper_label});
  }
  std::vector<Label> outs, ins;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    const DirectedCorolla c = g.vertices[i].corolla();
    for (const auto& x : c.outputs)
      if (!used_out.count({static_cast<int>(i), x})) outs.push_back(x);
    for (const auto& x : c.inputs)
      if (!used_in.count({static_cast<int>(i), x})) ins.push_back(x);
  }
  return make_corolla(outs, ins);
}

inline int permutation_sign(const std::vector<int>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

struct CanonicalTerm {
  bool vanishes = false;  // an odd automorphism kills the term
  int sign = 1;
};

/// Canonical representative of a graph up to isomorphisms fixing the legs. Internal edges are renamed
/// "~e<k>"; the returned sign is the sign of the vertex permutation into the canonical wedge order.
template <class G>
std::pair<DecoratedGraph<G>, CanonicalTerm> canonicalize(const CobarModel<G>& model, const DecoratedGraph<G>& g) {
  const int n = static_cast<int>(g.vertices.size());
  if (n > model.vertex_cap)
    throw CapacityError("graph with " + std::to_string(n) + " vertices exceeds the vertex cap " +
                        std::to_string(model.vertex_cap));
  std::optional<DecoratedGraph<G>> best;
  CanonicalTerm best_term;
  for (const auto& perm : all_permutations(n)) {  // vertex i moves to position perm[i]
    // Group parallel edges by their new endpoints; every order inside a group is tried.
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (std::size_t k = 0; k < g.edges.size(); ++k)
      groups[{perm[g.edges[k].upper], perm[g.edges[k].lower]}].push_back(static_cast<int>(k));
    std::vector<std::vector<int>> order;
    for (auto& [ends, members] : groups) order.push_back(members);
    std::function<void(std::size_t)> visit = [&](std::size_t group) {
      if (group == order.size()) {
        std::vector<Relabel> rel(n);
        for (int v = 0; v < n; ++v) {
          const DirectedCorolla c = g.vertices[v].corolla();
          for (const auto& x : c.outputs) rel[v].out[x] = x;
          for (const auto& x : c.inputs) rel[v].in[x] = x;
        }
        DecoratedGraph<G> h;
        int next = 0;
        for (const auto& members : order)
          for (int k : members) {
            const GraphEdge& e = g.edges[k];
            const Label name = fresh_label("e", next++);
            rel[e.upper].in[e.upper_label] = name;
            rel[e.lower].out[e.lower_label] = name;
            h.edges.push_back({perm[e.upper], name, perm[e.lower], name});
          }
        h.vertices.resize(n);
        for (int v = 0; v < n; ++v) h.vertices[perm[v]] = g.vertices[v].relabel(rel[v]);
        const int sign = permutation_sign(perm);
        if (!best || h < *best) {
          best = std::move(h);
          best_term = {false, sign};
        } else if (h == *best && sign != best_term.sign) {
          best_term.vanishes = true;
        }
        return;
      }
      auto& members = order[group];
      std::sort(members.begin(), members.end());
      do visit(group + 1);
      while (std::next_permutation(members.begin(), members.end()));
    };
    visit(0);
  }
  return {*best, best_term};
}

template <class G>
void accumulate_canonical(const CobarModel<G>& model, CobarElement<G>& into, const DecoratedGraph<G>& g,
                          const Rational& c) {
  if (c.is_zero()) return;
  auto [h, t] = canonicalize(model, g);
  if (!t.vanishes) accumulate(into, h, t.sign < 0 ? -c : c);
}

template <class G>
CobarElement<G> single_vertex(const CobarModel<G>& model, const G& p, const Rational& c = Rational(1)) {
  CobarElement<G> x;
  accumulate_canonical(model, x, DecoratedGraph<G>{{p}, {}}, c);
  return x;
}

/// Internal join of leg pairs (input of the graph, output of the graph) inside one graph; zero if a
/// directed circuit appears.
template <class G>
std::optional<DecoratedGraph<G>> join_legs(const CobarModel<G>& model, DecoratedGraph<G> g, const Bijection& eta) {
  const DirectedCorolla legs = legs_of(g);
  auto owner = [&](const Label& x, bool output) {
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      const DirectedCorolla c = g.vertices[i].corolla();
      if (contains(output ? c.outputs : c.inputs, x)) return static_cast<int>(i);
    }
    throw InputError("label '" + x + "' is not a leg");
  };
  for (const auto& [b, a] : eta) {
    if (!contains(legs.inputs, b)) throw InputError("grafted label '" + b + "' is not an input leg");
    if (!contains(legs.outputs, a)) throw InputError("grafted label '" + a + "' is not an output leg");
    g.edges.push_back({owner(b, false), b, owner(a, true), a});
  }
  image(eta);  // throws when two inputs share an output
  if (has_directed_circuit(shape_of(model, g))) return std::nullopt;
  return g;
}

/// x o^eta y in the free properad: the inputs eta.keys() of x are joined to the outputs eta.values() of y.
/// The wedge order is x's vertices followed by y's.
template <class G>
CobarElement<G> graft(const CobarModel<G>& model, const CobarElement<G>& x, const CobarElement<G>& y,
                      const Bijection& eta) {
  if (eta.empty()) throw InputError("grafting needs at least one pair");
  CobarElement<G> out;
  for (const auto& [gx, cx] : x)
    for (const auto& [gy, cy] : y) {
      validate_gluing(legs_of(gx), legs_of(gy), eta);
      // Internal edge names of the right factor are moved out of the way.
      DecoratedGraph<G> u = gx;
      const int shift = static_cast<int>(gx.vertices.size());
      std::set<std::pair<int, Label>> internal_out, internal_in;
      for (const auto& e : gy.edges) {
        internal_out.insert({e.lower, e.lower_label});
        internal_in.insert({e.upper, e.upper_label});
      }
      for (std::size_t i = 0; i < gy.vertices.size(); ++i) {
        Relabel r;
        const DirectedCorolla c = gy.vertices[i].corolla();
        for (const auto& l : c.outputs)
          r.out[l] = internal_out.count({static_cast<int>(i), l}) ? fresh_label("g" + l.substr(1) + ".", 0) : l;
        for (const auto& l : c.inputs)
          r.in[l] = internal_in.count({static_cast<int>(i), l}) ? fresh_label("g" + l.substr(1) + ".", 0) : l;
        u.vertices.push_back(gy.vertices[i].relabel(r));
      }
      for (const auto& e : gy.edges) {
        const Label name = fresh_label("g" + e.lower_label.substr(1) + ".", 0);
        const Label name_in = fresh_label("g" + e.upper_label.substr(1) + ".", 0);
        u.edges.push_back({e.upper + shift, name_in, e.lower + shift, name});
      }
      if (auto joined = join_legs(model, u, eta)) accumulate_canonical(model, out, *joined, cx * cy);
    }
  return out;
}

/// One way of splitting a vertex p as x o^eta y: y becomes the new vertex.
template <class G>
struct VertexSplit {
  G upper;  // x, on (C1, D1 + B)
  G lower;  // y, on (C2 + A, D2)
  Bijection eta;
  Rational coeff;
};

template <class G>
class CobarDifferential {
 public:
  explicit CobarDifferential(CobarModel<G> model) : model_(std::move(model)) {}
  const CobarModel<G>& model() const { return model_; }

  /// All splittings p = x o y along k new edges, weighted by the coefficient of p and 1/k!.
  const std::vector<VertexSplit<G>>& splits(const G& p) {
    auto it = memo_.find(p);
    if (it != memo_.end()) return it->second;
    std::vector<VertexSplit<G>> out;
    const DirectedCorolla c = p.corolla();
    const int chi_p = model_.chi(p);
    const int x_chi_max = chi_p - model_.chi_gain - 1;
    const Span<G> target = span_of(p);
    if (x_chi_max >= 1) {
      for (const auto& c1 : all_subsets(c.outputs))
        for (const auto& d1 : all_subsets(c.inputs)) {
          const LabelSet c2 = set_minus(c.outputs, c1), d2 = set_minus(c.inputs, d1);
          Rational factorial(1);
          for (int k = 1; k <= chi_p + 2; ++k) {
            factorial *= Rational(k);
            std::vector<Label> bv, av;
            for (int j = 0; j < k; ++j) {
              bv.push_back(fresh_label("b", j));
              av.push_back(fresh_label("a", j));
            }
            const LabelSet bset = make_label_set(bv), aset = make_label_set(av);
            const auto xs = model_.generators(c1, set_union(d1, bset), x_chi_max);
            if (xs.empty()) continue;
            // The pairing is fixed: summing over it as well would count each class |A|! times too often.
            Bijection eta;
            for (int j = 0; j < k; ++j) eta[bv[j]] = av[j];
            for (const auto& x : xs) {
              const int y_chi_max = chi_p - model_.chi(x) - model_.chi_gain;
              for (const auto& y : model_.generators(set_union(c2, aset), d2, y_chi_max)) {
                const Span<G> z = model_.properad.compose(span_of(x), span_of(y), eta);
                if (z.corolla != target.corolla) continue;
                auto t = z.terms.find(p);
                if (t == z.terms.end()) continue;
                out.push_back({x, y, eta, t->second / factorial});
              }
            }
          }
        }
    }
    return memo_.emplace(p, std::move(out)).first->second;
  }

  /// Differential of a single graph, by the Leibniz rule. The new vertex goes to the front of the wedge;
  /// its sign cancels the sign of moving the differential past the earlier markers.
  CobarElement<G> apply(const DecoratedGraph<G>& g, const Rational& c = Rational(1)) {
    CobarElement<G> out;
    const int n = static_cast<int>(g.vertices.size());
    for (int i = 0; i < n; ++i) {
      if (model_.dual_differential) {
        const Rational sign = sign_of(i % 2 ? -1 : 1);
        for (const auto& [q, cq] : model_.dual_differential(g.vertices[i])) {
          DecoratedGraph<G> h = g;
          h.vertices[i] = q;
          accumulate_canonical(model_, out, h, c * sign * cq);
        }
      }
      for (const auto& s : splits(g.vertices[i])) {
        DecoratedGraph<G> h;
        h.vertices.push_back(s.lower);
        for (int v = 0; v < n; ++v) h.vertices.push_back(v == i ? s.upper : g.vertices[v]);
        const DirectedCorolla upper = s.upper.corolla();
        auto where = [&](int v, const Label& x, bool output) {
          if (v != i) return v + 1;
          return contains(output ? upper.outputs : upper.inputs, x) ? i + 1 : 0;
        };
        for (const auto& e : g.edges)
          h.edges.push_back({where(e.upper, e.upper_label, false), e.upper_label,
                             where(e.lower, e.lower_label, true), e.lower_label});
        for (const auto& [b, a] : s.eta) h.edges.push_back({i + 1, b, 0, a});
        if (has_directed_circuit(shape_of(model_, h)))
          throw InvariantError("vertex splitting produced a directed circuit");
        accumulate_canonical(model_, out, h, c * s.coeff);
      }
    }
    return out;
  }

  CobarElement<G> apply(const CobarElement<G>& x) {
    CobarElement<G> out;
    for (const auto& [g, c] : x) accumulate(out, apply(g, c));
    return out;
  }

 private:
  CobarModel<G> model_;
  std::map<G, std::vector<VertexSplit<G>>> memo_;
};

struct DSquaredReport {
  std::size_t generators = 0;
  std::size_t first_order_terms = 0;  // terms of the differential summed over all generators
  bool ok = true;
  std::string witness;
};

/// Checks that the differential squares to zero on every single-vertex generator in the list.
template <class G>
DSquaredReport verify_d_squared(CobarDifferential<G>& d, const std::vector<G>& generators) {
  DSquaredReport r;
  for (const auto& p : generators) {
    ++r.generators;
    const CobarElement<G> first = d.apply(single_vertex(d.model(), p));
    r.first_order_terms += first.size();
    const CobarElement<G> second = d.apply(first);
    if (!second.empty()) {
      r.ok = false;
      const auto& [g, c] = *second.begin();
      r.witness = "d^2(" + p.str() + ") has coefficient " + c.str() + " on " + g.str();
      return r;
    }
  }
  return r;
}

/// Stable generators on skeletal corollas with |C|, |D| <= legs_max and chi <= chi_max.
template <class G>
std::vector<G> skeletal_generators(const CobarModel<G>& model, int legs_max, int chi_max) {
  std::vector<G> out;
  for (int m = 0; m <= legs_max; ++m)
    for (int n = 0; n <= legs_max; ++n) {
      const DirectedCorolla c = skeletal_corolla(m, n);
      for (const auto& g : model.generators(c.outputs, c.inputs, chi_max)) out.push_back(g);
    }
  return out;
}

/// Open generators with at most `segments_max` segments in total.
inline std::vector<OpenSurface> open_generators(const CobarModel<OpenSurface>& model, int segments_max,
                                                int chi_max) {
  std::vector<OpenSurface> out;
  for (int m = 0; m <= segments_max; ++m)
    for (int n = 0; m + n <= segments_max; ++n) {
      const DirectedCorolla c = skeletal_corolla(m, n);
      for (const auto& g : model.generators(c.outputs, c.inputs, chi_max)) out.push_back(g);
    }
  return out;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

/// Graphviz rendering; vertices show their genus label, legs are drawn as point nodes.
template <class G>
std::string to_dot(const CobarModel<G>& model, const DecoratedGraph<G>& g, const std::string& title = "graph") {
  std::string s = "digraph \"" + dot_escape(title) + "\" {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    s += "  v" + std::to_string(i) + " [label=\"G=" + std::to_string(model.genus(g.vertices[i])) +
         "\", tooltip=\"" + dot_escape(g.vertices[i].str()) + "\"];\n";
  for (const auto& e : g.edges)
    s += "  v" + std::to_string(e.lower) + " -> v" + std::to_string(e.upper) + ";\n";
  const DirectedCorolla legs = legs_of(g);
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    const DirectedCorolla c = g.vertices[i].corolla();
    for (const auto& x : c.outputs)
      if (contains(legs.outputs, x))
        s += "  \"leg " + dot_escape(x) + "\" [shape=plaintext, label=\"" + dot_escape(x) + "\"];\n  v" +
             std::to_string(i) + " -> \"leg " + dot_escape(x) + "\";\n";
    for (const auto& x : c.inputs)
      if (contains(legs.inputs, x))
        s += "  \"leg " + dot_escape(x) + "\" [shape=plaintext, label=\"" + dot_escape(x) + "\"];\n  \"leg " +
             dot_escape(x) + "\" -> v" + std::to_string(i) + ";\n";
  }
  return s + "}\n";
}

}  // namespace properad
