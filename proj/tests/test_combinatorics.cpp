#include "doctest.h"
#include "properad/combinatorics.hpp"

using namespace properad;

namespace {

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("shuffle counts are binomial coefficients") {
  for (int p = 0; p <= 8; ++p)
    for (int q = 0; p + q <= 8; ++q) {
      auto s = enumerate_shuffles(p, q);
      CHECK(static_cast<long>(s.size()) == binomial(p + q, p));
      for (const auto& sigma : s) CHECK(is_shuffle(sigma, p));
    }
  CHECK(enumerate_shuffles(0, 3).size() == 1);
  CHECK_THROWS_AS(enumerate_shuffles(-1, 2), InputError);
}

TEST_CASE("shuffles are exactly the inverses of unshuffles") {
  for (int n = 0; n <= 6; ++n)
    for (const auto& sigma : all_permutations(n))
      for (int p = 0; p <= n; ++p) CHECK(is_shuffle(sigma, p) == is_unshuffle(inverse_permutation(sigma), p));
}

TEST_CASE("increasing unshuffle") {
  auto r = increasing_unshuffle({2}, 2, 0);
  CHECK(r.at(1) == 1);
  CHECK(r.at(3) == 2);
  auto id = increasing_unshuffle({}, 3, 4);
  CHECK(id.at(1) == 5);
  CHECK(id.at(3) == 7);
  auto prefix = increasing_unshuffle({1, 2}, 3, 1);
  for (int i = 3; i <= 5; ++i) CHECK(prefix.at(i) == i - 2 + 1);
  CHECK_THROWS_AS(increasing_unshuffle({5}, 2, 0), InputError);
}

TEST_CASE("canonical cycles") {
  CHECK(Cycle({"x2", "x3", "x1"}).word() == std::vector<Label>{"x1", "x2", "x3"});
  CHECK(Cycle(std::vector<Label>{}).empty());
  CHECK(Cycle({"x1"}).str() == "((x1))");
  CHECK_THROWS_AS(Cycle({"a", "a"}), InputError);
  std::vector<Label> w{"f", "c", "a", "e", "b", "d"};
  for (std::size_t len = 0; len <= w.size(); ++len) {
    std::vector<Label> word(w.begin(), w.begin() + len);
    Cycle ref(word);
    for (std::size_t k = 0; k < len; ++k) {
      std::rotate(word.begin(), word.begin() + 1, word.end());
      CHECK(Cycle(word) == ref);
    }
  }
}

TEST_CASE("mapping cycles") {
  Cycle c({"x1", "x2", "x3"});
  CHECK(map_cycle(identity_on({"x1", "x2", "x3"}), c) == c);
  Bijection swap{{"x1", "x2"}, {"x2", "x1"}, {"x3", "x3"}};
  CHECK(map_cycle(swap, c).word() == std::vector<Label>{"x1", "x3", "x2"});
  CHECK(map_cycle({}, Cycle()) == Cycle());
  CHECK_THROWS_AS(map_cycle({{"x1", "y"}}, c), InputError);
  LabelSet s{"a", "b", "c", "d"};
  Cycle d({"a", "c", "b", "d"});
  for (const auto& f : all_bijections(s, s))
    for (const auto& g : all_bijections(s, s)) CHECK(map_cycle(compose(f, g), d) == map_cycle(f, map_cycle(g, d)));
}

TEST_CASE("bijections and subsets") {
  CHECK(all_bijections({"a", "b", "c"}, {"x", "y", "z"}).size() == 6);
  CHECK(subsets_of_size({"a", "b", "c", "d"}, 2).size() == 6);
  CHECK(all_subsets({"a", "b", "c"}).size() == 8);
  CHECK_THROWS_AS(inverse({{"a", "x"}, {"b", "x"}}), InputError);
  CHECK_THROWS_AS(disjoint_union({{"a", "x"}}, {{"a", "y"}}), InputError);
  CHECK_THROWS_AS(make_label_set({"a", "a"}), InputError);
}
