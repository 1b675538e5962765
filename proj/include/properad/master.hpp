#pragma once

#include <algorithm>
#include <climits>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "properad/endomorphism.hpp"
#include "properad/frobenius.hpp"

namespace properad {

// ---------------------------------------------------------------------------------------------
// The coinvariant space P ⊗_Σ End_V, one representative per orbit

/// Generator on skeletal labels with the basis indices carried by its outputs and inputs, each word
/// listed in sorted label order. The term stands for gen ⊗ (a_outs ⊗ φ^ins).
template <class G>
struct TildeKey {
  G gen;
  Word outs;
  Word ins;
  friend auto operator<=>(const TildeKey&, const TildeKey&) = default;
  friend bool operator==(const TildeKey&, const TildeKey&) = default;
};

template <class G>
using TildeElement = Lin<TildeKey<G>>;

using Component = std::tuple<int, int, int>;  // (outputs, inputs, chi)

template <class G>
struct TildeModel {
  std::string flavor;
  Properad<Span<G>> properad;
  DGVectorSpace space;
  /// Every relabeling fixes every generator, so a representative is found by sorting the words.
  bool symmetric = false;
  /// Least increase of chi under a connected composition.
  int chi_gain = 0;
  std::function<int(const G&)> chi;
  std::function<int(const G&, const Label&)> color = [](const G&, const Label&) { return 0; };
  std::function<Label(bool, int, int)> skeletal_name = [](bool output, int, int k) {
    return output ? out_label(k) : in_label(k);
  };
  /// Whether some stable generator has m outputs, n inputs and the given chi.
  std::function<bool(int, int, int)> admissible;
};

inline TildeModel<ClosedGenerator> closed_tilde_model(DGVectorSpace v, Mutation mutation = Mutation::none) {
  TildeModel<ClosedGenerator> m;
  m.flavor = "closed";
  m.properad = closed_frobenius(mutation);
  m.space = std::move(v);
  m.symmetric = mutation == Mutation::none || mutation == Mutation::composition_sign;
  m.chi = [](const ClosedGenerator& g) { return g.chi; };
  m.admissible = [](int o, int i, int chi) { return chi >= 1 && o + i <= chi + 2 && (chi - o - i) % 2 == 0; };
  return m;
}

inline TildeModel<OpenSurface> open_tilde_model(DGVectorSpace v, GenusRule rule = GenusRule::ledger) {
  TildeModel<OpenSurface> m;
  m.flavor = "open";
  m.properad = open_frobenius(rule);
  m.space = std::move(v);
  m.chi_gain = 2;
  m.chi = [](const OpenSurface& s) { return s.chi(); };
  m.admissible = [](int o, int i, int chi) { return chi >= 1 && o + i <= chi + 2 && (chi - o - i) % 2 == 0; };
  return m;
}

/// Both colors are decorated by the same V.
inline TildeModel<OpenClosedGenerator> open_closed_tilde_model(DGVectorSpace v) {
  TildeModel<OpenClosedGenerator> m;
  m.flavor = "open-closed";
  m.properad = open_closed_frobenius();
  m.space = std::move(v);
  m.chi = [](const OpenClosedGenerator& s) { return s.chi(); };
  m.color = [](const OpenClosedGenerator& s, const Label& x) { return s.is_closed_label(x) ? 1 : 0; };
  m.skeletal_name = [](bool output, int color, int k) {
    const std::string stem = color == 1 ? (output ? "co" : "ci") : (output ? "o" : "i");
    return stem + std::to_string(k);
  };
  m.admissible = [](int o, int i, int chi) { return chi >= 1 && o + i <= chi + 2; };
  return m;
}

template <class G>
int term_degree(const TildeModel<G>& model, const TildeKey<G>& k) {
  return word_degree(model.space.basis(), k.outs) - word_degree(model.space.basis(), k.ins);
}

template <class G>
Component component_of(const TildeModel<G>& model, const TildeKey<G>& k) {
  return {static_cast<int>(k.outs.size()), static_cast<int>(k.ins.size()), model.chi(k.gen)};
}

template <class G>
std::string describe_term(const TildeModel<G>& model, const TildeKey<G>& k) {
  const auto& b = model.space.basis();
  std::string s = k.gen.str() + " a[";
  for (std::size_t i = 0; i < k.outs.size(); ++i) s += (i ? "," : "") + b.name(k.outs[i]);
  s += "] phi[";
  for (std::size_t i = 0; i < k.ins.size(); ++i) s += (i ? "," : "") + b.name(k.ins[i]);
  return s + "]";
}

template <class G>
std::string describe_element(const TildeModel<G>& model, const TildeElement<G>& x) {
  std::string s;
  for (const auto& [k, c] : x) s += (s.empty() ? "" : " + ") + c.str() + " * " + describe_term(model, k);
  return s.empty() ? std::string("0") : s;
}

namespace detail {

inline std::vector<int> parities(const DGVectorSpace& v, const Word& w) {
  std::vector<int> out;
  for (int i : w) out.push_back(v.degree(i));
  return out;
}

/// Visits every color-preserving relabeling of gen onto the skeletal labels, with the relabeled
/// generator, the permuted words and the Koszul sign of the permutation.
template <class G>
void for_each_skeletal_relabeling(const TildeModel<G>& model, const G& gen, const Word& outs, const Word& ins,
                                  const std::function<void(const G&, const Word&, const Word&, int)>& visit) {
  const DirectedCorolla c = gen.corolla();
  if (c.outputs.size() != outs.size() || c.inputs.size() != ins.size())
    throw InputError("decorations do not match the corolla of " + gen.str());
  struct Side {
    const LabelSet* labels;
    std::map<int, std::vector<int>> by_color;  // color -> positions
    std::map<int, std::vector<Label>> names;   // color -> skeletal names
  };
  Side sides[2];
  for (int s = 0; s < 2; ++s) {
    const LabelSet& labels = s == 0 ? c.outputs : c.inputs;
    sides[s].labels = &labels;
    for (int p = 0; p < static_cast<int>(labels.size()); ++p) sides[s].by_color[model.color(gen, labels[p])].push_back(p);
    for (const auto& [col, pos] : sides[s].by_color) {
      if (pos.size() > 9) throw CapacityError("more than 9 legs of one color");
      for (int k = 1; k <= static_cast<int>(pos.size()); ++k)
        sides[s].names[col].push_back(model.skeletal_name(s == 0, col, k));
    }
  }
  // One permutation per (side, color) group.
  std::vector<std::pair<int, int>> groups;
  for (int s = 0; s < 2; ++s)
    for (const auto& [col, pos] : sides[s].by_color) groups.push_back({s, col});
  std::vector<std::vector<std::vector<int>>> choices;
  for (const auto& [s, col] : groups) choices.push_back(all_permutations(static_cast<int>(sides[s].by_color[col].size())));
  std::vector<std::size_t> pick(groups.size(), 0);
  const std::vector<int> deg_out = parities(model.space, outs), deg_in = parities(model.space, ins);
  while (true) {
    Relabel r;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& [s, col] = groups[g];
      const auto& pos = sides[s].by_color[col];
      const auto& perm = choices[g][pick[g]];
      for (std::size_t t = 0; t < pos.size(); ++t) {
        const Label& from = (*sides[s].labels)[pos[t]];
        const Label& to = sides[s].names[col][perm[t]];
        (s == 0 ? r.out : r.in)[from] = to;
      }
    }
    const G moved = gen.relabel(r);
    const DirectedCorolla c2 = moved.corolla();
    auto place = [&](const LabelSet& old_labels, const LabelSet& new_labels, const Bijection& f, const Word& w,
                     const std::vector<int>& deg, Word& out) {
      std::vector<int> perm(w.size());
      out.assign(w.size(), 0);
      for (std::size_t p = 0; p < w.size(); ++p) {
        perm[p] = index_in(new_labels, f.at(old_labels[p]));
        out[perm[p]] = w[p];
      }
      return koszul_sign(perm, deg);
    };
    Word o2, i2;
    const int sign = place(c.outputs, c2.outputs, r.out, outs, deg_out, o2) *
                     place(c.inputs, c2.inputs, r.in, ins, deg_in, i2);
    visit(moved, o2, i2, sign);
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      if (++pick[g] < choices[g].size()) break;
      pick[g] = 0;
    }
    if (g == groups.size()) return;
  }
}

/// Sorts a word of commuting graded factors; returns the sign, or 0 if an odd factor repeats.
inline int sort_graded(const DGVectorSpace& v, Word& w) {
  std::vector<int> order(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] < w[b]; });
  std::vector<int> perm(w.size());
  Word sorted(w.size());
  for (std::size_t t = 0; t < order.size(); ++t) {
    perm[order[t]] = static_cast<int>(t);
    sorted[t] = w[order[t]];
  }
  for (std::size_t t = 1; t < sorted.size(); ++t)
    if (sorted[t] == sorted[t - 1] && is_odd(v.degree(sorted[t]))) return 0;
  const int sign = koszul_sign(perm, parities(v, w));
  w = std::move(sorted);
  return sign;
}

}  // namespace detail

/// Orbit representative of gen ⊗ (a_outs ⊗ φ^ins) and the sign relating the two; nullopt when the
/// class vanishes because an automorphism acts by -1.
template <class G>
std::optional<std::pair<TildeKey<G>, int>> tilde_canonical(const TildeModel<G>& model, const G& gen, const Word& outs,
                                                           const Word& ins) {
  if (model.symmetric) {
    const DirectedCorolla c = gen.corolla();
    if (c.outputs.size() > 9 || c.inputs.size() > 9) throw CapacityError("more than 9 legs");
    Word o = outs, i = ins;
    const int sign = detail::sort_graded(model.space, o) * detail::sort_graded(model.space, i);
    if (sign == 0) return std::nullopt;
    Relabel r;
    for (std::size_t k = 0; k < c.outputs.size(); ++k) r.out[c.outputs[k]] = out_label(static_cast<int>(k) + 1);
    for (std::size_t k = 0; k < c.inputs.size(); ++k) r.in[c.inputs[k]] = in_label(static_cast<int>(k) + 1);
    return std::make_pair(TildeKey<G>{gen.relabel(r), std::move(o), std::move(i)}, sign);
  }
  std::optional<TildeKey<G>> best;
  int best_sign = 0;
  bool conflict = false;
  detail::for_each_skeletal_relabeling<G>(model, gen, outs, ins, [&](const G& g, const Word& o, const Word& i, int s) {
    TildeKey<G> k{g, o, i};
    if (!best || k < *best) {
      best = std::move(k);
      best_sign = s;
      conflict = false;
    } else if (k == *best && s != best_sign) {
      conflict = true;
    }
  });
  if (conflict) return std::nullopt;
  return std::make_pair(*best, best_sign);
}

template <class G>
void accumulate_term(const TildeModel<G>& model, TildeElement<G>& into, const G& gen, const Word& outs,
                     const Word& ins, const Rational& c) {
  if (c.is_zero()) return;
  if (auto k = tilde_canonical(model, gen, outs, ins)) accumulate(into, k->first, c * sign_of(k->second));
}

template <class G>
TildeElement<G> tilde_normal_form(const TildeModel<G>& model, const TildeElement<G>& x) {
  TildeElement<G> out;
  for (const auto& [k, c] : x) accumulate_term(model, out, k.gen, k.outs, k.ins, c);
  return out;
}

template <class G>
TildeElement<G> truncate(const TildeModel<G>& model, const TildeElement<G>& x, int chi_max, int m_max = INT_MAX,
                         int n_max = INT_MAX) {
  TildeElement<G> out;
  for (const auto& [k, c] : x)
    if (model.chi(k.gen) <= chi_max && static_cast<int>(k.outs.size()) <= m_max &&
        static_cast<int>(k.ins.size()) <= n_max)
      out.emplace(k, c);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Transported composition and differential

/// x ∘̃ y: every nonempty matching of inputs of x with outputs of y carrying the same basis vector,
/// composed in P and contracted in End_V. Signs come from bringing each contracted pair φ^i a_i
/// together in the super-tensor a_x φ^x a_y φ^y, then listing outputs and inputs in label order.
/// Terms whose chi would exceed chi_limit are not computed.
template <class G>
TildeElement<G> tilde_compose(const TildeModel<G>& model, const TildeElement<G>& x, const TildeElement<G>& y,
                              int chi_limit = INT_MAX) {
  TildeElement<G> out;
  const DGVectorSpace& v = model.space;
  for (const auto& [kx, cx] : x) {
    const int chi_x = model.chi(kx.gen);
    for (const auto& [ky, cy] : y) {
      if (chi_x + model.chi(ky.gen) + model.chi_gain > chi_limit) continue;
      const DirectedCorolla dx = kx.gen.corolla();
      const DirectedCorolla dy0 = ky.gen.corolla();
      const Relabel pre{detail::prefix_labels(dy0.outputs, "y."), detail::prefix_labels(dy0.inputs, "y.")};
      const G gy = ky.gen.relabel(pre);
      const DirectedCorolla dy = gy.corolla();
      const int nx = static_cast<int>(dx.inputs.size()), my = static_cast<int>(dy.outputs.size());
      // factors: outputs of x, inputs of x, outputs of y, inputs of y
      std::vector<int> degrees;
      std::map<Label, int> factor, index;
      auto add = [&](const LabelSet& labels, const Word& w) {
        for (std::size_t p = 0; p < labels.size(); ++p) {
          factor[labels[p]] = static_cast<int>(degrees.size());
          index[labels[p]] = w[p];
          degrees.push_back(v.degree(w[p]));
        }
      };
      add(dx.outputs, kx.outs);
      add(dx.inputs, kx.ins);
      add(dy.outputs, ky.outs);
      add(dy.inputs, ky.ins);

      std::vector<int> match(nx, -1);
      std::vector<char> used(my, 0);
      std::function<void(int, int)> rec = [&](int pos, int pairs) {
        if (pos == nx) {
          if (pairs == 0) return;
          Bijection eta;
          for (int p = 0; p < nx; ++p)
            if (match[p] >= 0) eta[dx.inputs[p]] = dy.outputs[match[p]];
          const Span<G> z = model.properad.compose(span_of(kx.gen), span_of(gy), eta);
          if (z.terms.empty()) return;
          std::vector<int> perm(degrees.size(), -1);
          int next = 0;
          for (int p = 0; p < nx; ++p) {
            if (match[p] < 0) continue;
            perm[factor[dx.inputs[p]]] = next++;
            perm[factor[dy.outputs[match[p]]]] = next++;
          }
          Word outs, ins;
          for (const auto& l : z.corolla.outputs) {
            perm[factor[l]] = next++;
            outs.push_back(index[l]);
          }
          for (const auto& l : z.corolla.inputs) {
            perm[factor[l]] = next++;
            ins.push_back(index[l]);
          }
          const Rational c = cx * cy * sign_of(koszul_sign(perm, degrees));
          for (const auto& [q, cq] : z.terms) {
            if (model.chi(q) > chi_limit) continue;
            accumulate_term(model, out, q, outs, ins, c * cq);
          }
          return;
        }
        rec(pos + 1, pairs);
        const int col = model.color(kx.gen, dx.inputs[pos]);
        for (int t = 0; t < my; ++t) {
          if (used[t] || index[dy.outputs[t]] != kx.ins[pos] || model.color(gy, dy.outputs[t]) != col) continue;
          used[t] = 1;
          match[pos] = t;
          rec(pos + 1, pairs + 1);
          match[pos] = -1;
          used[t] = 0;
        }
      };
      rec(0, 0);
    }
  }
  return out;
}

/// id ⊗ d_End on the decorations: d on an output in position k carries (-1)^{degrees before k};
/// on an input in position k the factor φ^i becomes φ^i ∘ d with -(-1)^{|term|} (-1)^{degrees after k}.
template <class G>
TildeElement<G> tilde_differential(const TildeModel<G>& model, const TildeElement<G>& x) {
  const DGVectorSpace& v = model.space;
  std::map<int, std::vector<std::pair<int, Rational>>> preimage;  // target -> (source, coefficient)
  for (const auto& [key, c] : v.d()) preimage[key.first].push_back({key.second, c});
  TildeElement<G> out;
  for (const auto& [k, c] : x) {
    int before = 0;
    for (std::size_t p = 0; p < k.outs.size(); ++p) {
      const Rational s = sign_of(is_odd(before) ? -1 : 1);
      for (const auto& [t, dc] : v.image(k.outs[p])) {
        Word o = k.outs;
        o[p] = t;
        accumulate_term(model, out, k.gen, o, k.ins, c * s * dc);
      }
      before += v.degree(k.outs[p]);
    }
    int after = is_odd(term_degree(model, k)) ? 0 : 1;
    for (std::size_t p = k.ins.size(); p-- > 0;) {
      const Rational s = sign_of(is_odd(after) ? -1 : 1);
      auto it = preimage.find(k.ins[p]);
      if (it != preimage.end())
        for (const auto& [src, dc] : it->second) {
          Word i = k.ins;
          i[p] = src;
          accumulate_term(model, out, k.gen, k.outs, i, c * s * dc);
        }
      after += v.degree(k.ins[p]);
    }
  }
  return out;
}

/// The element Σ D^j_i p(o1;i1;chi=0) ⊗ (a_j ⊗ φ^i) representing d itself in the closed flavor.
inline TildeElement<ClosedGenerator> closed_differential_element(const TildeModel<ClosedGenerator>& model) {
  TildeElement<ClosedGenerator> out;
  const ClosedGenerator unit{{out_label(1)}, {in_label(1)}, 0};
  for (const auto& [key, c] : model.space.d()) accumulate(out, TildeKey<ClosedGenerator>{unit, {key.first}, {key.second}}, c);
  return out;
}

/// Derivative in the position-k factor: (-1)^{|a_j|(|a_{w_1}|+...+|a_{w_{k-1}}|)} times w with factor k
/// removed when w_k = j, and nullopt otherwise (k is 1-based).
inline std::optional<std::pair<Word, int>> positional_derivative(const DGVectorSpace& v, int k, int j, const Word& w) {
  if (k < 1 || k > static_cast<int>(w.size())) throw InputError("positional derivative: position out of range");
  if (w[k - 1] != j) return std::nullopt;
  int before = 0;
  for (int p = 0; p < k - 1; ++p) before += v.degree(w[p]);
  Word rest = w;
  rest.erase(rest.begin() + (k - 1));
  return std::make_pair(rest, is_odd(v.degree(j)) && is_odd(before) ? -1 : 1);
}

template <class G>
int homogeneous_degree(const TildeModel<G>& model, const TildeElement<G>& x) {
  std::optional<int> d;
  for (const auto& [k, c] : x) {
    const int e = term_degree(model, k);
    if (d && *d != e) throw InputError("element is not homogeneous");
    d = e;
  }
  return d.value_or(0);
}

/// [x, y] = x ∘̃ y - (-1)^{|x||y|} y ∘̃ x for homogeneous x, y.
template <class G>
TildeElement<G> tilde_bracket(const TildeModel<G>& model, const TildeElement<G>& x, const TildeElement<G>& y,
                              int chi_limit = INT_MAX) {
  TildeElement<G> out = tilde_compose(model, x, y, chi_limit);
  const bool odd = is_odd(homogeneous_degree(model, x)) && is_odd(homogeneous_degree(model, y));
  accumulate(out, tilde_compose(model, y, x, chi_limit), Rational(odd ? 1 : -1));
  return out;
}

/// [x,[y,z]] - [[x,y],z] - (-1)^{|x||y|} [y,[x,z]]; zero when ∘̃ is Lie-admissible.
template <class G>
TildeElement<G> jacobi_residual(const TildeModel<G>& model, const TildeElement<G>& x, const TildeElement<G>& y,
                                const TildeElement<G>& z) {
  const bool odd = is_odd(homogeneous_degree(model, x)) && is_odd(homogeneous_degree(model, y));
  TildeElement<G> out = tilde_bracket(model, x, tilde_bracket(model, y, z));
  accumulate(out, tilde_bracket(model, tilde_bracket(model, x, y), z), Rational(-1));
  accumulate(out, tilde_bracket(model, y, tilde_bracket(model, x, z)), Rational(odd ? 1 : -1));
  return out;
}

/// (x ∘̃ y) ∘̃ z - x ∘̃ (y ∘̃ z).
template <class G>
TildeElement<G> associator(const TildeModel<G>& model, const TildeElement<G>& x, const TildeElement<G>& y,
                           const TildeElement<G>& z) {
  TildeElement<G> out = tilde_compose(model, tilde_compose(model, x, y), z);
  accumulate(out, tilde_compose(model, x, tilde_compose(model, y, z)), Rational(-1));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Structure constants and the isomorphism with invariants

/// f^J_I of the map attached to gen: coefficient of a_outs in f(a_ins), words in sorted label order.
template <class G>
struct StructureEntry {
  G gen;
  Word outs;
  Word ins;
  Rational value;
};

/// Equivariant family: the values on every skeletal relabeling of the given entries.
template <class G>
using Family = std::map<TildeKey<G>, Rational>;

/// Extends the entries to their orbits; inconsistent values within an orbit are an input error.
template <class G>
Family<G> symmetrize(const TildeModel<G>& model, const std::vector<StructureEntry<G>>& entries) {
  Family<G> out;
  for (const auto& e : entries) {
    Family<G> orbit;
    std::optional<std::string> witness;
    detail::for_each_skeletal_relabeling<G>(model, e.gen, e.outs, e.ins, [&](const G& g, const Word& o, const Word& i, int s) {
      const TildeKey<G> k{g, o, i};
      const Rational val = e.value * sign_of(s);
      auto [it, fresh] = orbit.try_emplace(k, val);
      if (!fresh && it->second != val && !witness) witness = describe_term(model, k);
    });
    if (witness) {
      if (!e.value.is_zero())
        throw InputError("entry " + describe_term(model, {e.gen, e.outs, e.ins}) +
                         " is fixed by a relabeling acting by -1 on " + *witness + ", so it must vanish");
      continue;
    }
    for (const auto& [k, val] : orbit) {
      auto [it, fresh] = out.try_emplace(k, val);
      if (!fresh && it->second != val)
        throw InputError("structure is not equivariant: " + describe_term(model, k) + " receives " +
                         it->second.str() + " and " + val.str());
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

/// Y: an invariant family goes to Σ 1/(m!n!) f^J_I gen ⊗ (a_J ⊗ φ^I).
template <class G>
TildeElement<G> y_iso(const TildeModel<G>& model, const Family<G>& f) {
  TildeElement<G> out;
  for (const auto& [k, val] : f) {
    const Rational w = Rational(1) / (factorial(static_cast<int>(k.outs.size())) * factorial(static_cast<int>(k.ins.size())));
    accumulate_term(model, out, k.gen, k.outs, k.ins, val * w);
  }
  return out;
}

/// Y^{-1}: a class goes to the sum over all relabelings of its representative.
template <class G>
Family<G> y_inverse(const TildeModel<G>& model, const TildeElement<G>& x) {
  Family<G> out;
  for (const auto& [k, c] : x)
    detail::for_each_skeletal_relabeling<G>(model, k.gen, k.outs, k.ins, [&](const G& g, const Word& o, const Word& i, int s) {
      accumulate(out, TildeKey<G>{g, o, i}, c * sign_of(s));
    });
  return out;
}

/// Loads structure constants: each entry must have degree 1 and a stable generator within the
/// flavor; restricted structures also need at least one output and one input.
template <class G>
TildeElement<G> load_structure(const TildeModel<G>& model, const std::vector<StructureEntry<G>>& entries,
                               bool generalized = true) {
  for (const auto& e : entries) {
    const TildeKey<G> k{e.gen, e.outs, e.ins};
    if (e.gen.corolla().outputs.size() != e.outs.size() || e.gen.corolla().inputs.size() != e.ins.size())
      throw InputError("entry " + e.gen.str() + ": decorations do not match the legs");
    if (model.chi(e.gen) < 1) throw InputError("entry " + describe_term(model, k) + " is not stable (chi < 1)");
    if (!generalized && (e.outs.empty() || e.ins.empty()))
      throw InputError("entry " + describe_term(model, k) + " has no outputs or no inputs (restricted mode)");
    if (!e.value.is_zero() && term_degree(model, k) != 1)
      throw InputError("entry " + describe_term(model, k) + " has degree " + std::to_string(term_degree(model, k)) +
                       ", expected 1");
  }
  return y_iso(model, symmetrize(model, entries));
}

// ---------------------------------------------------------------------------------------------
// Checks

enum class Verdict { pass, fail, skipped };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    default: return "SKIPPED";
  }
}

/// Component (m, n, chi); m = n = -1 stands for every arity at that chi.
struct ComponentReport {
  int m = 0;
  int n = 0;
  int chi = 0;
  Verdict verdict = Verdict::pass;
  std::vector<std::string> residual;
};

struct CheckReport {
  std::string checker;
  std::vector<ComponentReport> components;
  int count(Verdict v) const {
    return static_cast<int>(std::count_if(components.begin(), components.end(),
                                          [v](const ComponentReport& c) { return c.verdict == v; }));
  }
  bool ok() const { return count(Verdict::fail) == 0; }
  /// Verdict per chi: FAIL if any component fails, SKIPPED if none fails but one is skipped.
  std::map<int, Verdict> by_chi() const {
    std::map<int, Verdict> out;
    for (const auto& c : components) {
      auto [it, fresh] = out.try_emplace(c.chi, c.verdict);
      if (fresh) continue;
      if (c.verdict == Verdict::fail || (c.verdict == Verdict::skipped && it->second == Verdict::pass))
        it->second = c.verdict;
    }
    return out;
  }
};

struct Truncation {
  int chi_max = 4;
  int m_max = -1;  // negative: chi_max + 2
  int n_max = -1;
  int max_residual_terms = 8;
  Truncation resolved() const {
    Truncation t = *this;
    if (t.m_max < 0) t.m_max = chi_max + 2;
    if (t.n_max < 0) t.n_max = chi_max + 2;
    return t;
  }
};

/// A component is decidable when it lies within the bounds and so does every pair of components
/// that can contribute to it through a composition.
template <class G>
bool decidable(const TildeModel<G>& model, int m, int n, int chi, const Truncation& t) {
  if (chi > t.chi_max || m > t.m_max || n > t.n_max) return false;
  for (int chi1 = 1; chi1 <= chi; ++chi1)
    for (int chi2 = 1; chi1 + chi2 + model.chi_gain <= chi; ++chi2)
      for (int m1 = 0; m1 <= m; ++m1)
        for (int n2 = 0; n2 <= n; ++n2)
          for (int k = 1; k <= chi + 2; ++k) {
            const int n1 = n - n2 + k, m2 = m - m1 + k;
            if (!model.admissible(m1, n1, chi1) || !model.admissible(m2, n2, chi2)) continue;
            if (n1 > t.n_max || m2 > t.m_max || m1 > t.m_max || n2 > t.n_max) return false;
          }
  return true;
}

namespace detail {

inline std::vector<std::string> d_squared_residual(const DGVectorSpace& v) {
  std::vector<std::string> out;
  for (const auto& [key, c] : matmul(v.d(), v.d()))
    out.push_back(c.str() + " * " + v.basis().name(key.first) + " <- " + v.basis().name(key.second));
  return out;
}

template <class F>
void for_each_component(const std::function<bool(int, int, int)>& admissible, const Truncation& t, F&& visit) {
  for (int chi = 1; chi <= t.chi_max; ++chi)
    for (int m = 0; m <= chi + 2; ++m)
      for (int n = 0; m + n <= chi + 2; ++n)
        if (admissible(m, n, chi)) visit(m, n, chi);
}

}  // namespace detail

/// Residual d̃L + L ∘̃ L per component. The differential on V enters through d̃; the component
/// (1,1,0) reports d².
template <class G>
CheckReport master_check(const TildeModel<G>& model, const TildeElement<G>& structure, const Truncation& trunc) {
  const Truncation t = trunc.resolved();
  const TildeElement<G> L = truncate(model, structure, t.chi_max, t.m_max, t.n_max);
  for (const auto& [k, c] : L)
    if (term_degree(model, k) != 1)
      throw InputError("structure term " + describe_term(model, k) + " does not have degree 1");
  TildeElement<G> residual = tilde_differential(model, L);
  accumulate(residual, tilde_compose(model, L, L, t.chi_max));
  std::map<Component, std::vector<std::string>> by_component;
  for (const auto& [k, c] : residual) {
    auto& list = by_component[component_of(model, k)];
    if (static_cast<int>(list.size()) < t.max_residual_terms) list.push_back(c.str() + " * " + describe_term(model, k));
  }
  CheckReport report{"master", {}};
  {
    ComponentReport d2{1, 1, 0, Verdict::pass, detail::d_squared_residual(model.space)};
    if (!d2.residual.empty()) d2.verdict = Verdict::fail;
    report.components.push_back(d2);
  }
  detail::for_each_component(model.admissible, t, [&](int m, int n, int chi) {
    ComponentReport c{m, n, chi, Verdict::pass, {}};
    if (!decidable(model, m, n, chi, t)) {
      c.verdict = Verdict::skipped;
    } else if (auto it = by_component.find({m, n, chi}); it != by_component.end()) {
      c.verdict = Verdict::fail;
      c.residual = it->second;
    }
    report.components.push_back(std::move(c));
  });
  return report;
}

// ---------------------------------------------------------------------------------------------
// Closed flavor: the same question through End_V compositions and through differential operators

/// Maps α_{m,n,chi} with coordinates α^J_K = f^J_{rev K}: the inputs pair with the tensor φ^I from the
/// inside out.
inline std::map<Component, GradedLinearMap> closed_maps(const TildeModel<ClosedGenerator>& model,
                                                       const TildeElement<ClosedGenerator>& x) {
  std::map<Component, GradedLinearMap> out;
  for (const auto& [k, val] : y_inverse(model, x)) {
    const Component comp = component_of(model, k);
    const int degree = term_degree(model, k);
    auto [it, fresh] = out.try_emplace(comp, GradedLinearMap{std::get<0>(comp), std::get<1>(comp), {}, degree});
    if (it->second.degree != degree) throw InputError("closed_maps: component is not homogeneous");
    Word rev(k.ins.rbegin(), k.ins.rend());
    accumulate(it->second.coords, CoordKey{k.outs, rev}, val);
  }
  return out;
}

/// Invariant-side product: Σ 1/|N|! Σ_{ρ,σ} ρ ∘ (α1 ∘^ξ_{N,M} α2) ∘ σ^{-1} over shuffles ρ of type
/// (m1,m2) and σ of type (n2,n1), with N the last |N| inputs of α1, M the first |N| outputs of α2 and
/// ξ increasing. Components above chi_limit are not computed.
inline std::map<Component, GradedLinearMap> closed_map_compose(const DGVectorSpace& v,
                                                               const std::map<Component, GradedLinearMap>& left,
                                                               const std::map<Component, GradedLinearMap>& right,
                                                               int chi_limit = INT_MAX) {
  std::map<Component, GradedLinearMap> out;
  for (const auto& [c1, a1] : left)
    for (const auto& [c2, a2] : right) {
      const auto [m1, n1k, chi1] = c1;
      const auto [m2k, n2, chi2] = c2;
      if (chi1 + chi2 > chi_limit) continue;
      for (int k = 1; k <= std::min(n1k, m2k); ++k) {
        const int n1 = n1k - k, m2 = m2k - k;
        SkeletalGluing glue;
        for (int j = 1; j <= k; ++j) {
          glue.inputs_of_left.insert(n1 + j);
          glue.outputs_of_right.insert(j);
          glue.xi[n1 + j] = j;
        }
        const GradedLinearMap comp = end_compose(v, a1, a2, glue);
        if (comp.coords.empty()) continue;
        auto [it, fresh] = out.try_emplace(Component{m1 + m2, n1 + n2, chi1 + chi2},
                                           GradedLinearMap{m1 + m2, n1 + n2, {}, a1.degree + a2.degree});
        const Rational w = Rational(1) / factorial(k);
        for (const auto& rho : enumerate_shuffles(m1, m2))
          for (const auto& sigma : enumerate_shuffles(n2, n1)) {
            // precomposing with σ^{-1} moves the inputs by σ, which is the skeletal action of σ^{-1}
            const GradedLinearMap moved =
                end_sigma_action(v, to_one_based(rho), to_one_based(inverse_permutation(sigma)), comp);
            for (const auto& [key, c] : moved.coords) accumulate(it->second.coords, key, c * w);
          }
      }
    }
  for (auto it = out.begin(); it != out.end();) it = it->second.coords.empty() ? out.erase(it) : std::next(it);
  return out;
}

/// Componentwise relations: the invariant-side product of the structure maps with themselves, with d
/// entering as the (1,1,0) map.
inline CheckReport ibl_component_relations(const TildeModel<ClosedGenerator>& model,
                                           const TildeElement<ClosedGenerator>& structure, const Truncation& trunc) {
  const Truncation t = trunc.resolved();
  const DGVectorSpace& v = model.space;
  std::map<Component, GradedLinearMap> maps =
      closed_maps(model, truncate(model, structure, t.chi_max, t.m_max, t.n_max));
  for (const auto& [comp, f] : maps)
    for (const auto& [key, c] : f.coords)
      if (word_degree(v.basis(), key.first) - word_degree(v.basis(), key.second) != 1)
        throw InputError("structure map does not have degree 1");
  GradedLinearMap d{1, 1, {}, 1};
  for (const auto& [key, c] : v.d()) d.coords[{Word{key.first}, Word{key.second}}] = c;
  maps[{1, 1, 0}] = d;
  const std::map<Component, GradedLinearMap> square = closed_map_compose(v, maps, maps, t.chi_max);

  CheckReport report{"ibl-relations", {}};
  auto fill = [&](int m, int n, int chi, ComponentReport& c) {
    auto it = square.find({m, n, chi});
    if (it == square.end()) return;
    c.verdict = Verdict::fail;
    for (const auto& [key, val] : it->second.coords) {
      if (static_cast<int>(c.residual.size()) >= t.max_residual_terms) break;
      std::string s = val.str() + " * a[";
      for (std::size_t i = 0; i < key.first.size(); ++i) s += (i ? "," : "") + v.basis().name(key.first[i]);
      s += "] <- a[";
      for (std::size_t i = 0; i < key.second.size(); ++i) s += (i ? "," : "") + v.basis().name(key.second[i]);
      c.residual.push_back(s + "]");
    }
  };
  {
    ComponentReport c{1, 1, 0, Verdict::pass, {}};
    fill(1, 1, 0, c);
    report.components.push_back(c);
  }
  detail::for_each_component(model.admissible, t, [&](int m, int n, int chi) {
    ComponentReport c{m, n, chi, Verdict::pass, {}};
    if (!decidable(model, m, n, chi, t)) c.verdict = Verdict::skipped;
    else fill(m, n, chi, c);
    report.components.push_back(std::move(c));
  });
  return report;
}

namespace detail {

using Polynomial = Lin<std::pair<int, Word>>;  // (chi, sorted monomial in S(V))

inline Lin<Word> left_derivative(const DGVectorSpace& v, int i, const Lin<Word>& p) {
  Lin<Word> out;
  for (const auto& [w, c] : p) {
    int before = 0;
    for (std::size_t pos = 0; pos < w.size(); ++pos) {
      if (w[pos] == i) {
        Word rest = w;
        rest.erase(rest.begin() + static_cast<long>(pos));
        accumulate(out, rest, c * sign_of(is_odd(v.degree(i)) && is_odd(before) ? -1 : 1));
      }
      before += v.degree(w[pos]);
    }
  }
  return out;
}

/// Applies c a_J ∂_{I_1} ... ∂_{I_n} (rightmost derivative first) to a polynomial.
inline Polynomial apply_operator(const DGVectorSpace& v, const std::vector<std::tuple<int, Word, Word, Rational>>& op,
                                 const Polynomial& p) {
  Polynomial out;
  for (const auto& [chi, J, I, c] : op)
    for (const auto& [mono, cm] : p) {
      Lin<Word> g{{mono.second, cm}};
      for (std::size_t k = I.size(); k-- > 0 && !g.empty();) g = left_derivative(v, I[k], g);
      for (const auto& [w, cw] : g) {
        Word prod = J;
        prod.insert(prod.end(), w.begin(), w.end());
        const int s = sort_graded(v, prod);
        if (s != 0) accumulate(out, std::make_pair(chi + mono.first, prod), c * cw * sign_of(s));
      }
    }
  return out;
}

}  // namespace detail

/// Reads φ^i as the left derivative ∂/∂a_i, so that L becomes a differential operator on S(V), and
/// checks (d + L)² = 0 on every monomial of length at most chi_max + 2, separately for each chi.
inline CheckReport operator_square_check(const TildeModel<ClosedGenerator>& model,
                                         const TildeElement<ClosedGenerator>& structure, const Truncation& trunc) {
  const Truncation t = trunc.resolved();
  const DGVectorSpace& v = model.space;
  std::vector<std::tuple<int, Word, Word, Rational>> op;
  for (const auto& [key, c] : v.d()) op.push_back({0, Word{key.first}, Word{key.second}, c});
  for (const auto& [k, c] : truncate(model, structure, t.chi_max, t.m_max, t.n_max)) {
    if (term_degree(model, k) != 1)
      throw InputError("structure term " + describe_term(model, k) + " does not have degree 1");
    op.push_back({k.gen.chi, k.outs, k.ins, c});
  }
  std::map<int, std::vector<std::string>> failures;
  std::vector<Word> monomials;
  for (int len = 0; len <= t.chi_max + 2; ++len)
    enumerate_words(v.dim(), len, [&](const Word& w) {
      Word s = w;
      if (std::is_sorted(w.begin(), w.end()) && detail::sort_graded(v, s) != 0) monomials.push_back(w);
    });
  for (const auto& mono : monomials) {
    const detail::Polynomial once = detail::apply_operator(v, op, {{{0, mono}, Rational(1)}});
    for (const auto& [key, c] : detail::apply_operator(v, op, once)) {
      if (key.first > t.chi_max) continue;
      auto& list = failures[key.first];
      if (static_cast<int>(list.size()) >= t.max_residual_terms) continue;
      std::string s = c.str() + " * a[";
      for (std::size_t i = 0; i < key.second.size(); ++i) s += (i ? "," : "") + v.basis().name(key.second[i]);
      s += "] from a[";
      for (std::size_t i = 0; i < mono.size(); ++i) s += (i ? "," : "") + v.basis().name(mono[i]);
      list.push_back(s + "]");
    }
  }
  CheckReport report{"operator", {}};
  for (int chi = 0; chi <= t.chi_max; ++chi) {
    ComponentReport c{chi == 0 ? 1 : -1, chi == 0 ? 1 : -1, chi, Verdict::pass, {}};
    bool complete = true;
    if (chi > 0)
      detail::for_each_component(model.admissible, t, [&](int m, int n, int x) {
        if (x == chi && !decidable(model, m, n, chi, t)) complete = false;
      });
    if (auto it = failures.find(chi); it != failures.end()) {
      c.verdict = Verdict::fail;
      c.residual = it->second;
    }
    if (!complete) c.verdict = Verdict::skipped;
    report.components.push_back(std::move(c));
  }
  return report;
}

// ---------------------------------------------------------------------------------------------
// Instances

/// Every orbit representative of the given degree with chi in [chi_min, chi_max].
template <class G>
std::vector<TildeKey<G>> basis_terms(const TildeModel<G>& model, const std::vector<G>& generators, int degree) {
  std::vector<TildeKey<G>> out;
  std::set<TildeKey<G>> seen;
  for (const auto& g : generators) {
    const DirectedCorolla c = g.corolla();
    enumerate_words(model.space.dim(), static_cast<int>(c.outputs.size()), [&](const Word& o) {
      enumerate_words(model.space.dim(), static_cast<int>(c.inputs.size()), [&](const Word& i) {
        if (word_degree(model.space.basis(), o) - word_degree(model.space.basis(), i) != degree) return;
        if (auto k = tilde_canonical(model, g, o, i); k && seen.insert(k->first).second) out.push_back(k->first);
      });
    });
  }
  return out;
}

/// Random combination of `count` distinct basis terms with nonzero integer coefficients.
template <class G>
TildeElement<G> random_element(const std::vector<TildeKey<G>>& terms, int count, std::mt19937_64& rng,
                               int coeff_range = 2) {
  TildeElement<G> out;
  if (terms.empty()) return out;
  std::uniform_int_distribution<std::size_t> pick(0, terms.size() - 1);
  std::uniform_int_distribution<int> coeff(1, coeff_range);
  std::bernoulli_distribution negative(0.5);
  for (int tries = 0; static_cast<int>(out.size()) < count && tries < 10 * count; ++tries) {
    const int c = coeff(rng);
    out.emplace(terms[pick(rng)], Rational(negative(rng) ? -c : c));
  }
  return out;
}

/// Moves a solution along the gauge action of a degree-0 element: with Q = d + L0, returns
/// e^{ad Φ}(Q) - d truncated at chi_max. Solutions go to solutions because ∘̃ is Lie-admissible.
inline TildeElement<ClosedGenerator> gauge_transform(const TildeModel<ClosedGenerator>& model,
                                                     const TildeElement<ClosedGenerator>& base,
                                                     const TildeElement<ClosedGenerator>& phi, int chi_max) {
  for (const auto& [k, c] : phi)
    if (term_degree(model, k) != 0 || k.gen.chi < 1) throw InputError("gauge element must have degree 0 and chi >= 1");
  const TildeElement<ClosedGenerator> d = closed_differential_element(model);
  TildeElement<ClosedGenerator> q = d;
  accumulate(q, base);
  TildeElement<ClosedGenerator> total = q, power = q;
  for (int j = 1; !power.empty(); ++j) {
    TildeElement<ClosedGenerator> next = tilde_compose(model, phi, power, chi_max);
    accumulate(next, tilde_compose(model, power, phi, chi_max), Rational(-1));
    power.clear();
    accumulate(power, next, Rational(1) / Rational(j));
    accumulate(total, power);
  }
  accumulate(total, d, Rational(-1));
  return truncate(model, total, chi_max);
}

}  // namespace properad
