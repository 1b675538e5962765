#include <random>

#include "doctest.h"
#include "properad/endomorphism.hpp"

using namespace properad;

namespace {

DGVectorSpace even_odd() { return DGVectorSpace(GradedBasis({{"a", 0}, {"b", 1}}), {}); }

DGVectorSpace with_d() { return DGVectorSpace(GradedBasis({{"a", 0}, {"b", 1}}), {{{1, 0}, Rational(1)}}); }

DGVectorSpace three_dim() {
  // a -> b, c odd and closed
  return DGVectorSpace(GradedBasis({{"a", -1}, {"b", 0}, {"c", 1}}), {{{1, 0}, Rational(2)}});
}

// Applies h to the leading factors of a word, leaving the tail untouched: (h x 1)(u x v) = h(u) x v.
Lin<Word> apply_leading(const GradedLinearMap& h, const Lin<Word>& words) {
  Lin<Word> out;
  for (const auto& [w, c] : words) {
    Word head(w.begin(), w.begin() + h.n), tail(w.begin() + h.n, w.end());
    for (const auto& [key, ch] : h.coords) {
      if (key.second != head) continue;
      Word r = key.first;
      r.insert(r.end(), tail.begin(), tail.end());
      accumulate(out, r, c * ch);
    }
  }
  return out;
}

Lin<Word> permute_words(const GradedBasis& basis, const std::vector<int>& perm, const Lin<Word>& words) {
  Lin<Word> out;
  for (const auto& [w, c] : words) {
    Word r(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) r[perm[k]] = w[k];
    accumulate(out, r, c * Rational(koszul_sign(perm, word_degrees(basis, w))));
  }
  return out;
}

// Reference for g o^xi_{N,M} f on skeletal data: the input word is [D2 | D1]; apply f to the D2 block,
// move the glued outputs of f into the N slots of g, then apply g.
GradedLinearMap reference_compose(const DGVectorSpace& v, const GradedLinearMap& g, const GradedLinearMap& f,
                                  const SkeletalGluing& glue) {
  const int k = static_cast<int>(glue.xi.size());
  const int n1 = g.n - k, m2 = f.m - k;
  GradedLinearMap out{g.m + m2, f.n + n1, {}, g.degree + f.degree};
  std::map<int, int> n_of_m;
  for (const auto& [nn, mm] : glue.xi) n_of_m[mm] = nn;
  // positions of [f outputs | D1] inside [g inputs | C2]
  std::vector<int> perm;
  int c2 = 0;
  for (int j = 1; j <= f.m; ++j)
    perm.push_back(n_of_m.count(j) ? n_of_m[j] - 1 : g.n + c2++);
  for (int j = 1; j <= g.n; ++j)
    if (!glue.inputs_of_left.count(j)) perm.push_back(j - 1);
  enumerate_words(v.dim(), out.n, [&](const Word& w) {
    Lin<Word> cur{{w, Rational(1)}};
    cur = apply_leading(f, cur);
    cur = permute_words(v.basis(), perm, cur);
    cur = apply_leading(g, cur);
    for (const auto& [r, c] : cur) accumulate(out.coords, CoordKey{r, w}, c);
  });
  return out;
}

GradedLinearMap single(int m, int n, Word J, Word I, int degree, Rational c = Rational(1)) {
  GradedLinearMap f{m, n, {}, degree};
  f.coords[{J, I}] = c;
  return f;
}

}  // namespace

TEST_CASE("sigma action on skeletal maps") {
  DGVectorSpace v = even_odd();
  std::mt19937_64 rng(5);
  GradedLinearMap f = random_map(v, 2, 1, 1, rng, 1.0);
  CHECK(end_sigma_action(v, {1, 2}, {1}, f) == f);
  // flipping two outputs: sign -1 exactly when both outputs are odd
  GradedLinearMap g = random_map(v, 2, 2, 0, rng, 1.0);
  GradedLinearMap h = end_sigma_action(v, {2, 1}, {1, 2}, g);
  for (const auto& [key, c] : g.coords) {
    Word J = key.first;
    std::swap(J[0], J[1]);
    const bool both_odd = key.first[0] == 1 && key.first[1] == 1;
    CHECK(h.coords.at({J, key.second}) == (both_odd ? -c : c));
  }
  // all degrees even: pure index permutation
  DGVectorSpace even(GradedBasis({{"x", 0}, {"y", 2}}), {});
  GradedLinearMap e = random_map(even, 1, 3, 0, rng, 1.0);
  GradedLinearMap pe = end_sigma_action(even, {1}, {2, 3, 1}, e);
  for (const auto& [key, c] : e.coords) {
    const Word& I = key.second;
    // inputs move by sigma^{-1}: the factor at position sigma(k) lands at k
    Word moved{I[1], I[2], I[0]};
    CHECK(pe.coords.at({key.first, moved}) == c);
  }
  CHECK_THROWS_AS(end_sigma_action(v, {1}, {1}, f), InputError);
}

TEST_CASE("sigma action composes as a left and right action") {
  DGVectorSpace v = even_odd();
  std::mt19937_64 rng(9);
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n) {
      GradedLinearMap f = random_map(v, m, n, (m + n) % 2, rng, 0.7);
      auto rhos = all_permutations(m);
      auto sigmas = all_permutations(n);
      for (const auto& r1 : rhos)
        for (const auto& r2 : rhos)
          for (const auto& s1 : sigmas)
            for (const auto& s2 : sigmas) {
              std::vector<int> r12(m), s21(n);
              for (int k = 0; k < m; ++k) r12[k] = r1[r2[k]];
              for (int k = 0; k < n; ++k) s21[k] = s2[s1[k]];
              GradedLinearMap lhs = end_sigma_action(
                  v, to_one_based(r1), to_one_based(s1),
                  end_sigma_action(v, to_one_based(r2), to_one_based(s2), f));
              CHECK(lhs == end_sigma_action(v, to_one_based(r12), to_one_based(s21), f));
            }
    }
}

TEST_CASE("composition of skeletal maps") {
  DGVectorSpace line(GradedBasis({{"a", 0}}), {});
  GradedLinearMap x = single(1, 1, {0}, {0}, 0, Rational(3));
  GradedLinearMap y = single(1, 1, {0}, {0}, 0, Rational(5));
  SkeletalGluing one{{1}, {1}, {{1, 1}}};
  CHECK(end_compose(line, x, y, one).coords.at({Word{0}, Word{0}}) == Rational(15));

  DGVectorSpace v = three_dim();
  std::mt19937_64 rng(17);
  GradedLinearMap f = random_map(v, 2, 1, 1, rng, 1.0);
  CHECK(end_compose(v, identity_map(v.basis()), f, SkeletalGluing{{1}, {2}, {{1, 2}}}) ==
        end_sigma_action(v, {2, 1}, {1}, f));
  CHECK(end_compose(v, identity_map(v.basis()), f, SkeletalGluing{{1}, {1}, {{1, 1}}}) == f);
  CHECK_THROWS_AS(end_compose(v, f, f, SkeletalGluing{{}, {}, {}}), InputError);
  CHECK_THROWS_AS(end_compose(v, f, f, SkeletalGluing{{3}, {1}, {{3, 1}}}), InputError);
}

TEST_CASE("one odd transposition in a composition") {
  DGVectorSpace v = even_odd();
  // g(b (x) b) = a and f(a) = b (x) b, glued at the first input of g and the first output of f
  GradedLinearMap g = single(1, 2, {0}, {1, 1}, -2);
  GradedLinearMap f = single(2, 1, {1, 1}, {0}, 2);
  // N = {1}, M = {1}: the second output b of f stays, g's remaining input b stays.
  GradedLinearMap r = end_compose(v, g, f, SkeletalGluing{{1}, {1}, {{1, 1}}});
  GradedLinearMap ref = reference_compose(v, g, f, SkeletalGluing{{1}, {1}, {{1, 1}}});
  CHECK(r == ref);
  REQUIRE(r.coords.size() == 1);
  // inputs [D2 | D1] = [a | b]; f(a) = b b, then b_out (odd) crosses b_in (odd): one sign
  CHECK(r.coords.begin()->first == std::pair<Word, Word>{{0, 1}, {0, 1}});
  CHECK(r.coords.begin()->second == Rational(-1));
}

TEST_CASE("composition agrees with the sequential reference") {
  std::mt19937_64 rng(23);
  for (const auto& v : {even_odd(), three_dim()})
    for (int trial = 0; trial < 40; ++trial) {
      std::uniform_int_distribution<int> ar(1, 2), deg(-1, 1);
      int gm = ar(rng) - 1, gn = ar(rng), fm = ar(rng), fn = ar(rng) - 1;
      GradedLinearMap g = random_map(v, gm, gn, deg(rng), rng, 0.6);
      GradedLinearMap f = random_map(v, fm, fn, deg(rng), rng, 0.6);
      const int kmax = std::min(gn, fm);
      for (int k = 1; k <= kmax; ++k)
        for (const auto& nset : subsets_of_size({"1", "2"}, k)) {
          std::set<int> N;
          for (const auto& s : nset) N.insert(std::stoi(s));
          if (*N.rbegin() > gn) continue;
          for (const auto& mset : subsets_of_size({"1", "2"}, k)) {
            std::set<int> M;
            for (const auto& s : mset) M.insert(std::stoi(s));
            if (*M.rbegin() > fm) continue;
            std::vector<int> ms(M.begin(), M.end());
            do {
              SkeletalGluing glue{N, M, {}};
              int idx = 0;
              for (int nn : N) glue.xi[nn] = ms[idx++];
              CHECK(end_compose(v, g, f, glue) == reference_compose(v, g, f, glue));
            } while (std::next_permutation(ms.begin(), ms.end()));
          }
        }
    }
}

TEST_CASE("endomorphism differential") {
  DGVectorSpace zero = even_odd();
  std::mt19937_64 rng(31);
  CHECK(end_differential(zero, random_map(zero, 2, 2, 0, rng)).coords.empty());
  DGVectorSpace v = with_d();
  CHECK(end_differential(v, identity_map(v.basis())).coords.empty());
  // f: a -> a, b -> 0; d(f) = d o f - f o d sends a to b
  GradedLinearMap f = single(1, 1, {0}, {0}, 0);
  GradedLinearMap df = end_differential(v, f);
  CHECK(df.degree == 1);
  REQUIRE(df.coords.size() == 1);
  CHECK(df.coords.at({Word{1}, Word{0}}) == Rational(1));
  // f: b -> b; d o f = 0 and f o d sends a to b with sign -(-1)^0
  GradedLinearMap fb = single(1, 1, {1}, {1}, 0);
  CHECK(end_differential(v, fb).coords.at({Word{1}, Word{0}}) == Rational(-1));
}

TEST_CASE("endomorphism differential squares to zero and is a derivation of composition") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> ar(1, 2), deg(-1, 1);
  int checked = 0;
  for (const auto& v : {with_d(), three_dim()})
    for (int trial = 0; trial < 50; ++trial, ++checked) {
      GradedLinearMap g = random_map(v, ar(rng), ar(rng), deg(rng), rng);
      GradedLinearMap f = random_map(v, ar(rng), ar(rng), deg(rng), rng);
      CHECK(end_differential(v, end_differential(v, f)).coords.empty());
      SkeletalGluing glue{{1}, {1}, {{1, 1}}};
      GradedLinearMap lhs = end_differential(v, end_compose(v, g, f, glue));
      GradedLinearMap rhs = end_compose(v, end_differential(v, g), f, glue);
      GradedLinearMap second = end_compose(v, g, end_differential(v, f), glue);
      for (const auto& [k, c] : second.coords) accumulate(rhs.coords, k, is_odd(g.degree) ? -c : c);
      CHECK(lhs.coords == rhs.coords);
    }
  CHECK(checked == 100);
}

TEST_CASE("unordered components") {
  DGVectorSpace v = even_odd();
  std::mt19937_64 rng(41);
  GradedLinearMap f = random_map(v, 2, 1, 1, rng, 1.0);
  EndElement natural = unordered_end_component(v, {"o1", "o2"}, {"i1"}, f);
  CHECK(natural.map == f);
  // relabel to other names and back
  auto p = endomorphism_properad(v);
  EndElement named = unordered_end_component(v, {"y", "x"}, {"z"}, f);
  EndElement back = p.act(named, {{{"y", "o1"}, {"x", "o2"}}, {{"z", "i1"}}});
  CHECK(back.map == f);
  // reading the outputs in reverse order swaps the factors with the Koszul sign
  for (const auto& [key, c] : f.coords) {
    Word J{key.first[1], key.first[0]};
    const bool both_odd = key.first[0] == 1 && key.first[1] == 1;
    CHECK(named.map.coords.at({J, key.second}) == (both_odd ? -c : c));
  }
  CHECK_THROWS_AS(unordered_end_component(v, {"x"}, {"z"}, f), InputError);
}

TEST_CASE("endomorphism properad axioms on small maps") {
  DGVectorSpace v = even_odd();
  auto p = endomorphism_properad(v);
  std::mt19937_64 rng(43);
  std::vector<EndElement> samples;
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n)
      for (int deg : {0, 1}) {
        if (m + n == 0) continue;
        GradedLinearMap f = random_map(v, m, n, deg, rng, 0.8);
        if (!f.coords.empty()) samples.push_back(skeletal_end(f));
      }
  REQUIRE(samples.size() > 8);
  AxiomReport a1 = check_sigma_bimodule(p, samples);
  CHECK(a1.ok());
  AxiomReport a2 = check_equivariance(p, samples);
  CHECK(a2.ok());
  if (!a2.ok()) MESSAGE(a2.violations.front().witness);
  AssociativityOptions opt;
  opt.max_total_labels = 7;
  AxiomReport a3 = check_associativity(p, samples, opt);
  CHECK(a3.cases > 1000);
  if (!a3.ok()) FAIL_CHECK(a3.violations.front().axiom << ": " << a3.violations.front().witness);
}
