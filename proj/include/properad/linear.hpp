#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "properad/rational.hpp"

namespace properad {

/// Sparse formal linear combination keyed by K; zero coefficients are never stored.
template <class K>
using Lin = std::map<K, Rational>;

template <class K>
void accumulate(Lin<K>& into, const K& key, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = into.try_emplace(key, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) into.erase(it);
  }
}

template <class K>
void accumulate(Lin<K>& into, const Lin<K>& from, const Rational& scale = Rational(1)) {
  for (const auto& [k, c] : from) accumulate(into, k, c * scale);
}

inline bool is_odd(int degree) { return (degree % 2) != 0; }

/// Sign of permuting graded factors: factor i moves to position perm[i].
inline int koszul_sign(const std::vector<int>& perm, const std::vector<int>& degrees) {
  if (perm.size() != degrees.size()) throw InputError("koszul_sign: length mismatch");
  const int n = static_cast<int>(perm.size());
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw InputError("koszul_sign: not a permutation");
    seen[p] = 1;
  }
  int sign = 1;
  for (int i = 0; i < n; ++i) {
    if (!is_odd(degrees[i])) continue;
    for (int j = i + 1; j < n; ++j)
      if (is_odd(degrees[j]) && perm[i] > perm[j]) sign = -sign;
  }
  return sign;
}

/// Degrees after moving factor i to position perm[i].
inline std::vector<int> permute_degrees(const std::vector<int>& perm, const std::vector<int>& degrees) {
  std::vector<int> out(degrees.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = degrees[i];
  return out;
}

struct BasisElement {
  std::string name;
  int degree = 0;
};

/// Ordered homogeneous basis; the order is the reference for every sign.
class GradedBasis {
 public:
  GradedBasis() = default;
  explicit GradedBasis(std::vector<BasisElement> elements) : elements_(std::move(elements)) {
    for (int i = 0; i < size(); ++i) {
      if (!index_.emplace(elements_[i].name, i).second)
        throw InputError("duplicate basis name '" + elements_[i].name + "'");
    }
  }
  int size() const { return static_cast<int>(elements_.size()); }
  const BasisElement& operator[](int i) const { return elements_.at(i); }
  int degree(int i) const { return elements_.at(i).degree; }
  const std::string& name(int i) const { return elements_.at(i).name; }
  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InputError("unknown basis element '" + name + "'");
    return it->second;
  }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const std::vector<BasisElement>& elements() const { return elements_; }

 private:
  std::vector<BasisElement> elements_;
  std::unordered_map<std::string, int> index_;
};

/// Entry (target, source) holds the coefficient of basis[target] in d(basis[source]).
using SparseMatrix = std::map<std::pair<int, int>, Rational>;

inline SparseMatrix matmul(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out;
  std::map<int, std::vector<std::pair<int, Rational>>> a_by_source;
  for (const auto& [ka, ca] : a) a_by_source[ka.second].push_back({ka.first, ca});
  for (const auto& [kb, cb] : b) {
    auto it = a_by_source.find(kb.first);
    if (it == a_by_source.end()) continue;
    for (const auto& [t, ca] : it->second) accumulate(out, std::pair{t, kb.second}, ca * cb);
  }
  return out;
}

/// Finite-dimensional cochain complex: degree +1 differential squaring to zero.
class DGVectorSpace {
 public:
  DGVectorSpace() = default;
  DGVectorSpace(GradedBasis basis, SparseMatrix d) : basis_(std::move(basis)) {
    for (const auto& [k, c] : d) {
      if (c.is_zero()) continue;
      auto [t, s] = k;
      if (t < 0 || s < 0 || t >= basis_.size() || s >= basis_.size())
        throw InputError("differential entry out of range");
      if (basis_.degree(t) != basis_.degree(s) + 1)
        throw InputError("differential does not raise degree by 1: " + basis_.name(s) + " -> " +
                         basis_.name(t));
      d_[k] = c;
    }
    SparseMatrix sq = matmul(d_, d_);
    if (!sq.empty()) {
      auto [t, s] = sq.begin()->first;
      throw InputError("differential does not square to zero: coefficient of " + basis_.name(t) +
                       " in d(d(" + basis_.name(s) + ")) is " + sq.begin()->second.str());
    }
  }

  /// Skips validation; used to exercise checkers on a differential that does not square to zero.
  static DGVectorSpace unchecked(GradedBasis basis, SparseMatrix d) {
    DGVectorSpace v;
    v.basis_ = std::move(basis);
    for (auto& [k, c] : d)
      if (!c.is_zero()) v.d_[k] = c;
    return v;
  }

  const GradedBasis& basis() const { return basis_; }
  const SparseMatrix& d() const { return d_; }
  int dim() const { return basis_.size(); }
  int degree(int i) const { return basis_.degree(i); }

  /// d(basis[source]) as (target, coefficient) pairs.
  std::vector<std::pair<int, Rational>> image(int source) const {
    std::vector<std::pair<int, Rational>> out;
    for (const auto& [k, c] : d_)
      if (k.second == source) out.push_back({k.first, c});
    return out;
  }

 private:
  GradedBasis basis_;
  SparseMatrix d_;
};

using Word = std::vector<int>;

struct TensorWord {
  Word factors;
  Rational coeff{1};
};

inline int word_degree(const GradedBasis& basis, const Word& w) {
  int d = 0;
  for (int i : w) d += basis.degree(i);
  return d;
}

inline std::vector<int> word_degrees(const GradedBasis& basis, const Word& w) {
  std::vector<int> out;
  out.reserve(w.size());
  for (int i : w) out.push_back(basis.degree(i));
  return out;
}

/// Differential on the dual space: (d#a)(v) = (-1)^{|a|} a(dv); dual basis "#name" in degree -|name|.
inline DGVectorSpace dualize_differential(const DGVectorSpace& v) {
  std::vector<BasisElement> dual;
  for (const auto& e : v.basis().elements()) dual.push_back({"#" + e.name, -e.degree});
  SparseMatrix dd;
  for (const auto& [k, c] : v.d()) {
    auto [i, j] = k;  // d a_j has coefficient c on a_i
    dd[{j, i}] = is_odd(v.degree(i)) ? -c : c;
  }
  return DGVectorSpace(GradedBasis(std::move(dual)), std::move(dd));
}

/// Image of a word under the derivation extension of d.
inline Lin<Word> apply_derivation(const DGVectorSpace& v, const Word& w) {
  Lin<Word> out;
  int before = 0;
  for (std::size_t pos = 0; pos < w.size(); ++pos) {
    Rational sign = sign_of(is_odd(before) ? -1 : 1);
    for (const auto& [t, c] : v.image(w[pos])) {
      Word x = w;
      x[pos] = t;
      accumulate(out, x, sign * c);
    }
    before += v.degree(w[pos]);
  }
  return out;
}

inline void enumerate_words(int dim, int length, const std::function<void(const Word&)>& visit);

/// Matrix of the derivation extension of d on V^{(x)m}, keyed (target word, source word).
inline std::map<std::pair<Word, Word>, Rational> extend_differential_as_derivation(const DGVectorSpace& v,
                                                                                     int m) {
  if (m < 0) throw InputError("negative arity");
  std::map<std::pair<Word, Word>, Rational> out;
  enumerate_words(v.dim(), m, [&](const Word& w) {
    for (const auto& [t, c] : apply_derivation(v, w)) out[{t, w}] = c;
  });
  return out;
}

inline void enumerate_words(int dim, int length, const std::function<void(const Word&)>& visit) {
  Word w(length, 0);
  if (length > 0 && dim == 0) return;
  while (true) {
    visit(w);
    int pos = length - 1;
    while (pos >= 0 && ++w[pos] == dim) w[pos--] = 0;
    if (pos < 0) return;
  }
}

/// Factors of an ordered tensor carried to the unordered product indexed by labels.
/// psi[i] is the label of factor i; the result lists factors in sorted label order.
struct UnorderedWord {
  std::vector<std::string> labels;  // sorted
  Word factors;
  int sign = 1;
};

inline UnorderedWord unordered_iso(const std::vector<std::string>& psi, const GradedBasis& basis, const Word& w) {
  if (psi.size() != w.size()) throw InputError("unordered_iso: size mismatch");
  std::vector<std::string> sorted = psi;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("unordered_iso: ordering is not a bijection");
  std::vector<int> perm(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    perm[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), psi[i]) - sorted.begin());
  UnorderedWord u{sorted, Word(w.size()), koszul_sign(perm, word_degrees(basis, w))};
  for (std::size_t i = 0; i < w.size(); ++i) u.factors[perm[i]] = w[i];
  return u;
}

/// Inverse of unordered_iso for the ordering psi.
inline TensorWord unordered_iso_inverse(const std::vector<std::string>& psi, const GradedBasis& basis,
                                        const UnorderedWord& u) {
  if (psi.size() != u.factors.size()) throw InputError("unordered_iso: size mismatch");
  std::vector<int> perm(psi.size());
  Word w(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    auto it = std::lower_bound(u.labels.begin(), u.labels.end(), psi[i]);
    if (it == u.labels.end() || *it != psi[i]) throw InputError("unordered_iso: label mismatch");
    perm[i] = static_cast<int>(it - u.labels.begin());
    w[i] = u.factors[perm[i]];
  }
  int s = koszul_sign(perm, word_degrees(basis, w));
  return {w, Rational(s * u.sign)};
}

}  // namespace properad
