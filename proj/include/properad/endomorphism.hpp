#pragma once

#include <memory>
#include <random>
#include <sstream>

#include "properad/core.hpp"

namespace properad {

using CoordKey = std::pair<Word, Word>;

/// Map V^{(x)n} -> V^{(x)m} in basis coordinates: coords[(J, I)] is the coefficient of a_J in f(a_I).
struct GradedLinearMap {
  int m = 0;
  int n = 0;
  std::map<CoordKey, Rational> coords;
  int degree = 0;
  friend bool operator==(const GradedLinearMap& a, const GradedLinearMap& b) {
    return a.m == b.m && a.n == b.n && a.coords == b.coords;
  }
};

inline void validate_map(const GradedBasis& basis, const GradedLinearMap& f) {
  for (const auto& [key, c] : f.coords) {
    const auto& [J, I] = key;
    if (static_cast<int>(J.size()) != f.m || static_cast<int>(I.size()) != f.n)
      throw InputError("coordinate word length does not match the arity");
    for (int j : J)
      if (j < 0 || j >= basis.size()) throw InputError("coordinate index out of range");
    for (int i : I)
      if (i < 0 || i >= basis.size()) throw InputError("coordinate index out of range");
    if (word_degree(basis, J) - word_degree(basis, I) != f.degree)
      throw InputError("coordinate is not homogeneous of the declared degree");
  }
}

inline GradedLinearMap identity_map(const GradedBasis& basis) {
  GradedLinearMap f{1, 1, {}, 0};
  for (int i = 0; i < basis.size(); ++i) f.coords[{Word{i}, Word{i}}] = Rational(1);
  return f;
}

/// Element of End_V on labeled legs: coordinates are taken with outputs and inputs in sorted label order.
struct EndElement {
  DirectedCorolla corolla;
  GradedLinearMap map;
  friend bool operator==(const EndElement& a, const EndElement& b) {
    return a.corolla == b.corolla && a.map == b.map;
  }
};

namespace detail {

/// Position of every label of `from` inside the sorted set `to_sorted` after renaming by f.
inline std::vector<int> positions_after(const LabelSet& from, const Bijection& f, const LabelSet& to_sorted) {
  std::vector<int> pos;
  for (const auto& x : from) {
    auto it = std::lower_bound(to_sorted.begin(), to_sorted.end(), apply(f, x));
    pos.push_back(static_cast<int>(it - to_sorted.begin()));
  }
  return pos;
}

inline Word place(const Word& w, const std::vector<int>& pos) {
  Word out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[pos[k]] = w[k];
  return out;
}

inline int index_in(const LabelSet& s, const Label& x) {
  return static_cast<int>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
}

}  // namespace detail

inline EndElement end_act(const GradedBasis& basis, const EndElement& x, const Relabel& r) {
  EndElement out;
  out.corolla = {make_label_set(image(restrict_to(r.out, x.corolla.outputs))),
                 make_label_set(image(restrict_to(r.in, x.corolla.inputs)))};
  out.map = {x.map.m, x.map.n, {}, x.map.degree};
  auto po = detail::positions_after(x.corolla.outputs, r.out, out.corolla.outputs);
  auto pi = detail::positions_after(x.corolla.inputs, r.in, out.corolla.inputs);
  for (const auto& [key, c] : x.map.coords) {
    const auto& [J, I] = key;
    int s = koszul_sign(po, word_degrees(basis, J)) * koszul_sign(pi, word_degrees(basis, I));
    accumulate(out.map.coords, CoordKey{detail::place(J, po), detail::place(I, pi)}, c * Rational(s));
  }
  return out;
}

/// Labeled composition g o^eta f: f acts on the D2 inputs, its A outputs feed the B inputs of g.
inline EndElement end_labeled_compose(const GradedBasis& basis, const EndElement& g, const EndElement& f,
                                      const Bijection& eta) {
  validate_gluing(g.corolla, f.corolla, eta);
  const LabelSet& c1 = g.corolla.outputs;
  const LabelSet d1 = set_minus(g.corolla.inputs, domain(eta));
  const LabelSet c2 = set_minus(f.corolla.outputs, image(eta));
  const LabelSet& d2 = f.corolla.inputs;
  EndElement out;
  out.corolla = composite_corolla(g.corolla, f.corolla, eta);
  out.map = {static_cast<int>(out.corolla.outputs.size()), static_cast<int>(out.corolla.inputs.size()), {},
             g.map.degree + f.map.degree};
  const Bijection back = inverse(eta);

  // Chain, as ordered factor lists: result inputs (sorted D) -> [D1 | D2] -> [D1 | f outputs]
  // -> [g inputs | C2] -> [C1 | C2] -> result outputs (sorted C).
  for (const auto& [kf, cf] : f.map.coords) {
    const auto& [Jf, If] = kf;
    for (const auto& [kg, cg] : g.map.coords) {
      const auto& [Jg, Ig] = kg;
      bool match = true;
      for (const auto& [b, a] : eta)
        if (Ig[detail::index_in(g.corolla.inputs, b)] != Jf[detail::index_in(f.corolla.outputs, a)]) match = false;
      if (!match) continue;
      Word wd1;
      for (const auto& x : d1) wd1.push_back(Ig[detail::index_in(g.corolla.inputs, x)]);

      // result input word in sorted order and the sign of splitting it into [D1 | D2]
      Word w(out.map.n);
      std::vector<int> split;  // factor k of sorted D goes to position split[k] of [D1 | D2]
      for (std::size_t k = 0; k < out.corolla.inputs.size(); ++k) {
        const Label& x = out.corolla.inputs[k];
        if (contains(d1, x)) {
          int p = detail::index_in(d1, x);
          w[k] = wd1[p];
          split.push_back(p);
        } else {
          int p = detail::index_in(d2, x);
          w[k] = If[p];
          split.push_back(static_cast<int>(d1.size()) + p);
        }
      }
      int sign = koszul_sign(split, word_degrees(basis, w));
      if (is_odd(f.map.degree * word_degree(basis, wd1))) sign = -sign;

      // [D1 | f outputs] -> [g inputs | C2]
      Word mid = wd1;
      mid.insert(mid.end(), Jf.begin(), Jf.end());
      std::vector<int> regroup;
      for (const auto& x : d1) regroup.push_back(detail::index_in(g.corolla.inputs, x));
      const int gin = static_cast<int>(g.corolla.inputs.size());
      for (const auto& a : f.corolla.outputs) {
        if (contains(c2, a))
          regroup.push_back(gin + detail::index_in(c2, a));
        else
          regroup.push_back(detail::index_in(g.corolla.inputs, back.at(a)));
      }
      sign *= koszul_sign(regroup, word_degrees(basis, mid));

      // [C1 | C2] -> sorted C
      Word top = Jg;
      std::vector<int> merge;
      for (const auto& x : c1) merge.push_back(detail::index_in(out.corolla.outputs, x));
      for (const auto& x : c2) {
        top.push_back(Jf[detail::index_in(f.corolla.outputs, x)]);
        merge.push_back(detail::index_in(out.corolla.outputs, x));
      }
      sign *= koszul_sign(merge, word_degrees(basis, top));
      accumulate(out.map.coords, CoordKey{detail::place(top, merge), w}, cf * cg * Rational(sign));
    }
  }
  return out;
}

inline std::string describe_end(const GradedBasis& basis, const EndElement& x) {
  std::ostringstream os;
  os << "(";
  for (const auto& c : x.corolla.outputs) os << c << " ";
  os << ";";
  for (const auto& d : x.corolla.inputs) os << " " << d;
  os << ")";
  bool first = true;
  for (const auto& [key, c] : x.map.coords) {
    os << (first ? " " : " + ") << c << "*[";
    for (int j : key.first) os << basis.name(j);
    os << "<-";
    for (int i : key.second) os << basis.name(i);
    os << "]";
    first = false;
  }
  if (first) os << " 0";
  return os.str();
}

/// The endomorphism properad of V on labeled legs.
inline Properad<EndElement> endomorphism_properad(const DGVectorSpace& v) {
  auto basis = std::make_shared<GradedBasis>(v.basis());
  Properad<EndElement> p;
  p.name = "endomorphism";
  p.corolla = [](const EndElement& x) { return x.corolla; };
  p.act = [basis](const EndElement& x, const Relabel& r) { return end_act(*basis, x, r); };
  p.compose = [basis](const EndElement& g, const EndElement& f, const Bijection& eta) {
    return end_labeled_compose(*basis, g, f, eta);
  };
  p.describe = [basis](const EndElement& x) { return describe_end(*basis, x); };
  p.degree = [](const EndElement& x) { return x.map.degree; };
  p.negate = [](const EndElement& x) {
    EndElement y = x;
    for (auto& [k, c] : y.map.coords) c = -c;
    return y;
  };
  return p;
}

// ---------------------------------------------------------------------------------------------
// Skeletal version: positions 1..m and 1..n stand for the labels o1.. and i1..

inline EndElement skeletal_end(const GradedLinearMap& f) {
  if (f.m > 9 || f.n > 9) throw CapacityError("endomorphism arity above 9 is not supported");
  return {skeletal_corolla(f.m, f.n), f};
}

inline std::vector<int> to_one_based(const std::vector<int>& perm) {
  std::vector<int> out;
  for (int p : perm) out.push_back(p + 1);
  return out;
}

/// Skeletal action: outputs move by rho, inputs by sigma^{-1} (1-based permutations).
inline GradedLinearMap end_sigma_action(const DGVectorSpace& v, const std::vector<int>& rho,
                                        const std::vector<int>& sigma, const GradedLinearMap& f) {
  if (static_cast<int>(rho.size()) != f.m || static_cast<int>(sigma.size()) != f.n)
    throw InputError("permutation sizes do not match the arities");
  return skeletal_act(endomorphism_properad(v), skeletal_end(f), rho, sigma).map;
}

/// Skeletal composition g o^xi_{N,M} f; outputs are laid out as C1 then C2, inputs as D2 then D1.
inline GradedLinearMap end_compose(const DGVectorSpace& v, const GradedLinearMap& g, const GradedLinearMap& f,
                                   const SkeletalGluing& glue) {
  return skeletal_compose(endomorphism_properad(v), skeletal_end(g), skeletal_end(f), glue).map;
}

/// d(f) = sum (1 x .. d .. x 1) f - (-1)^{|f|} sum f (1 x .. d .. x 1).
inline GradedLinearMap end_differential(const DGVectorSpace& v, const GradedLinearMap& f) {
  GradedLinearMap out{f.m, f.n, {}, f.degree + 1};
  const Rational s = sign_of(is_odd(f.degree) ? 1 : -1);  // -(-1)^{|f|}
  for (const auto& [key, c] : f.coords) {
    const auto& [J, I] = key;
    for (const auto& [J2, c2] : apply_derivation(v, J)) accumulate(out.coords, CoordKey{J2, I}, c * c2);
  }
  // (f o d)(a_I') picks up f at every word I that d(a_I') reaches
  std::map<Word, std::vector<std::pair<Word, Rational>>> by_input;
  for (const auto& [key, c] : f.coords) by_input[key.second].push_back({key.first, c});
  enumerate_words(v.dim(), f.n, [&](const Word& src) {
    for (const auto& [I, c2] : apply_derivation(v, src)) {
      auto it = by_input.find(I);
      if (it == by_input.end()) continue;
      for (const auto& [J, c] : it->second) accumulate(out.coords, CoordKey{J, src}, s * c * c2);
    }
  });
  return out;
}

/// Reads f on the unordered products indexed by the ordered label lists C and D (factor k carries C[k], D[k]).
inline EndElement unordered_end_component(const DGVectorSpace& v, const std::vector<Label>& outputs,
                                          const std::vector<Label>& inputs, const GradedLinearMap& f) {
  if (static_cast<int>(outputs.size()) != f.m || static_cast<int>(inputs.size()) != f.n)
    throw InputError("label lists do not match the arities");
  Relabel r;
  for (int k = 0; k < f.m; ++k) r.out[out_label(k + 1)] = outputs[k];
  for (int k = 0; k < f.n; ++k) r.in[in_label(k + 1)] = inputs[k];
  make_corolla(outputs, inputs);
  return end_act(v.basis(), skeletal_end(f), r);
}

/// Random homogeneous map with roughly `density` of the admissible coordinates nonzero.
inline GradedLinearMap random_map(const DGVectorSpace& v, int m, int n, int degree, std::mt19937_64& rng,
                                  double density = 0.5, int coeff_range = 3) {
  GradedLinearMap f{m, n, {}, degree};
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> coeff(-coeff_range, coeff_range);
  enumerate_words(v.dim(), m, [&](const Word& J) {
    enumerate_words(v.dim(), n, [&](const Word& I) {
      if (word_degree(v.basis(), J) - word_degree(v.basis(), I) != degree) return;
      if (coin(rng) >= density) return;
      accumulate(f.coords, CoordKey{J, I}, Rational(coeff(rng)));
    });
  });
  return f;
}

}  // namespace properad
