#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "properad/rational.hpp"

namespace properad {

using Label = std::string;
/// Sorted, duplicate-free list of labels.
using LabelSet = std::vector<Label>;
/// Finite bijection given by its graph.
using Bijection = std::map<Label, Label>;

inline constexpr char kFreshPrefix = '~';

inline LabelSet make_label_set(std::vector<Label> labels) {
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw InputError("duplicate label in label set");
  return labels;
}

inline bool contains(const LabelSet& s, const Label& x) { return std::binary_search(s.begin(), s.end(), x); }

inline LabelSet set_union(const LabelSet& a, const LabelSet& b) {
  LabelSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline LabelSet set_minus(const LabelSet& a, const LabelSet& b) {
  LabelSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool disjoint(const LabelSet& a, const LabelSet& b) {
  LabelSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.empty();
}

inline LabelSet domain(const Bijection& f) {
  LabelSet out;
  for (const auto& [k, v] : f) out.push_back(k);
  return out;
}

inline LabelSet image(const Bijection& f) {
  LabelSet out;
  for (const auto& [k, v] : f) out.push_back(v);
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw InputError("map is not injective");
  return out;
}

inline Bijection inverse(const Bijection& f) {
  Bijection out;
  for (const auto& [k, v] : f)
    if (!out.emplace(v, k).second) throw InputError("map is not injective");
  return out;
}

/// (f after g), defined on the domain of g.
inline Bijection compose(const Bijection& f, const Bijection& g) {
  Bijection out;
  for (const auto& [k, v] : g) {
    auto it = f.find(v);
    if (it == f.end()) throw InputError("composition: label '" + v + "' outside domain");
    out[k] = it->second;
  }
  return out;
}

inline Bijection identity_on(const LabelSet& s) {
  Bijection out;
  for (const auto& x : s) out[x] = x;
  return out;
}

inline Label apply(const Bijection& f, const Label& x) {
  auto it = f.find(x);
  if (it == f.end()) throw InputError("label '" + x + "' outside bijection domain");
  return it->second;
}

/// Restriction of f to the labels in s.
inline Bijection restrict_to(const Bijection& f, const LabelSet& s) {
  Bijection out;
  for (const auto& x : s) out[x] = apply(f, x);
  return out;
}

/// Union of bijections with disjoint domains and images.
inline Bijection disjoint_union(const Bijection& f, const Bijection& g) {
  Bijection out = f;
  for (const auto& [k, v] : g)
    if (!out.emplace(k, v).second) throw InputError("bijection domains overlap at '" + k + "'");
  image(out);
  return out;
}

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// All bijections from the sorted list `from` onto the sorted list `to` (equal sizes).
inline std::vector<Bijection> all_bijections(const LabelSet& from, const LabelSet& to) {
  if (from.size() != to.size()) return {};
  std::vector<Bijection> out;
  for (const auto& p : all_permutations(static_cast<int>(from.size()))) {
    Bijection f;
    for (std::size_t i = 0; i < from.size(); ++i) f[from[i]] = to[p[i]];
    out.push_back(std::move(f));
  }
  return out;
}

/// All subsets of s of the given size, each sorted.
inline std::vector<LabelSet> subsets_of_size(const LabelSet& s, int k) {
  std::vector<LabelSet> out;
  const int n = static_cast<int>(s.size());
  if (k < 0 || k > n) return out;
  std::vector<bool> pick(n, false);
  std::fill(pick.end() - k, pick.end(), true);
  do {
    LabelSet sub;
    for (int i = 0; i < n; ++i)
      if (pick[i]) sub.push_back(s[i]);
    out.push_back(sub);
  } while (std::next_permutation(pick.begin(), pick.end()));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<LabelSet> all_subsets(const LabelSet& s) {
  std::vector<LabelSet> out;
  for (int k = 0; k <= static_cast<int>(s.size()); ++k)
    for (auto& x : subsets_of_size(s, k)) out.push_back(std::move(x));
  return out;
}

/// Permutations of [p+q] (0-based images) increasing on the first p and the last q points.
inline std::vector<std::vector<int>> enumerate_shuffles(int p, int q) {
  if (p < 0 || q < 0) throw InputError("enumerate_shuffles: negative arity");
  std::vector<std::vector<int>> out;
  const int n = p + q;
  std::vector<bool> first(n, false);
  std::fill(first.begin(), first.begin() + p, true);
  std::sort(first.begin(), first.end());
  do {
    std::vector<int> sigma(n);
    int a = 0, b = p;
    for (int pos = 0; pos < n; ++pos) {
      if (first[pos]) sigma[a++] = pos;
      else sigma[b++] = pos;
    }
    out.push_back(sigma);
  } while (std::next_permutation(first.begin(), first.end()));
  return out;
}

inline bool is_shuffle(const std::vector<int>& sigma, int p) {
  for (int i = 1; i < static_cast<int>(sigma.size()); ++i)
    if (i != p && sigma[i - 1] > sigma[i]) return false;
  return true;
}

/// rho(i_j) = j for increasing i_1 < ... < i_p and increasing i_{p+1} < ... < i_{p+q}.
inline bool is_unshuffle(const std::vector<int>& rho, int p) {
  const int n = static_cast<int>(rho.size());
  std::vector<int> where(n);
  for (int i = 0; i < n; ++i) where[rho[i]] = i;
  for (int j = 1; j < n; ++j)
    if (j != p && where[j - 1] > where[j]) return false;
  return true;
}

inline std::vector<int> inverse_permutation(const std::vector<int>& p) {
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<int>(i);
  return out;
}

/// Increasing bijection from [n1+|N|] minus N onto offset+[n1] (1-based values).
inline std::map<int, int> increasing_unshuffle(const std::set<int>& subset, int n1, int offset) {
  const int total = n1 + static_cast<int>(subset.size());
  for (int x : subset)
    if (x < 1 || x > total) throw InputError("increasing_unshuffle: subset outside its ambient interval");
  std::map<int, int> out;
  int next = offset + 1;
  for (int i = 1; i <= total; ++i)
    if (!subset.count(i)) out[i] = next++;
  return out;
}

/// Cyclic word of distinct labels stored in its lexicographically least rotation.
class Cycle {
 public:
  Cycle() = default;
  explicit Cycle(std::vector<Label> word) : word_(std::move(word)) {
    std::vector<Label> sorted = word_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InputError("cycle with repeated label");
    if (!word_.empty()) {
      auto least = std::min_element(word_.begin(), word_.end());
      std::rotate(word_.begin(), least, word_.end());
    }
  }
  const std::vector<Label>& word() const { return word_; }
  std::size_t size() const { return word_.size(); }
  bool empty() const { return word_.empty(); }
  /// Label following x in cyclic order.
  const Label& successor(const Label& x) const {
    auto it = std::find(word_.begin(), word_.end(), x);
    if (it == word_.end()) throw InputError("label '" + x + "' not on cycle");
    ++it;
    return it == word_.end() ? word_.front() : *it;
  }
  std::string str() const {
    std::string s = "((";
    for (std::size_t i = 0; i < word_.size(); ++i) s += (i ? "," : "") + word_[i];
    return s + "))";
  }
  friend auto operator<=>(const Cycle&, const Cycle&) = default;
  friend bool operator==(const Cycle&, const Cycle&) = default;

 private:
  std::vector<Label> word_;
};

inline Cycle canonical_cycle(const std::vector<Label>& word) { return Cycle(word); }

inline Cycle map_cycle(const Bijection& rho, const Cycle& c) {
  std::vector<Label> w;
  for (const auto& x : c.word()) w.push_back(apply(rho, x));
  return Cycle(std::move(w));
}

/// Multiset of cycles kept sorted.
using CycleSet = std::vector<Cycle>;

inline CycleSet sorted_cycles(CycleSet cs) {
  std::sort(cs.begin(), cs.end());
  return cs;
}

inline std::string fresh_label(const std::string& stem, int i) {
  return std::string(1, kFreshPrefix) + stem + std::to_string(i);
}

}  // namespace properad
