// Acceptance suite: one PASS/FAIL line per criterion, each with its time budget.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "properad/cobar.hpp"
#include "properad/endomorphism.hpp"
#include "properad/io.hpp"
#include "properad/master.hpp"

using namespace properad;

namespace {

using ClosedElement = TildeElement<ClosedGenerator>;

std::uint64_t seed() {
  const char* s = std::getenv("PROPERAD_SEED");
  return s ? std::strtoull(s, nullptr, 10) : 20240611ULL;
}

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;
std::function<bool(int)> selected;

void criterion(int number, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
  if (!selected(number)) return;
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.ok && elapsed > budget_seconds) {
    out.ok = false;
    out.detail = "over the time budget";
  }
  if (!out.ok) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (out.ok ? "PASS" : "FAIL") << " criterion " << number << " (" << name << "): " << elapsed << " s of "
       << budget_seconds << " s";
  if (!out.detail.empty()) line << "; " << out.detail;
  std::cout << line.str() << std::endl;
}

std::string witness(const AxiomReport& r) {
  return r.violations.empty() ? "" : r.violations.front().axiom + ": " + r.violations.front().witness;
}

template <class E>
void all_axioms(Outcome& out, const std::string& name, const Properad<E>& p, const std::vector<E>& samples,
                std::size_t max_labels, std::size_t& cases) {
  const AxiomReport a1 = check_sigma_bimodule_by_presentation(p, samples);
  out.require(a1.ok(), name + " " + witness(a1));
  const AxiomReport a2 = check_equivariance(p, samples, max_labels);
  out.require(a2.ok(), name + " " + witness(a2));
  AssociativityOptions opt;
  opt.max_total_labels = max_labels;
  opt.stop_after = 1;
  const AxiomReport a3 = check_associativity(p, samples, opt);
  out.require(a3.ok(), name + " " + witness(a3));
  out.require(a3.cases > 0, name + ": no associativity cases");
  cases += a1.cases + a2.cases + a3.cases;
}

DGVectorSpace space(std::vector<BasisElement> basis, SparseMatrix d = {}) {
  return DGVectorSpace(GradedBasis(std::move(basis)), std::move(d));
}

ClosedGenerator skeletal(int m, int n, int chi) {
  return {skeletal_corolla(m, n).outputs, skeletal_corolla(m, n).inputs, chi};
}

/// Closed generators on skeletal corollas with chi in [chi_min, chi_max], any number of legs.
std::vector<ClosedGenerator> closed_skeletal(int chi_min, int chi_max) {
  std::vector<ClosedGenerator> out;
  for (int chi = chi_min; chi <= chi_max; ++chi)
    for (int legs = 0; legs <= chi + 2; ++legs)
      if ((chi - legs) % 2 == 0)
        for (int m = 0; m <= legs; ++m) out.push_back(skeletal(m, legs - m, chi));
  return out;
}

std::string verdicts(const std::vector<CheckReport>& reports) {
  std::string s;
  for (const auto& r : reports) s += (s.empty() ? "" : "/") + std::string(r.ok() ? "pass" : "fail");
  return s;
}

// Sign of a permutation of graded factors, one adjacent swap at a time.
int bubble_sign(std::vector<int> perm, std::vector<int> degrees) {
  int sign = 1;
  for (std::size_t pass = 0; pass < perm.size(); ++pass)
    for (std::size_t i = 0; i + 1 < perm.size(); ++i)
      if (perm[i] > perm[i + 1]) {
        if (degrees[i] % 2 != 0 && degrees[i + 1] % 2 != 0) sign = -sign;
        std::swap(perm[i], perm[i + 1]);
        std::swap(degrees[i], degrees[i + 1]);
      }
  return sign;
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::mt19937_64 rng(seed());
  // optional list of criterion numbers to run
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  selected = [only](int n) { return only.empty() || only.count(n) > 0; };
  std::cout << "seed " << seed() << std::endl;

  criterion(1, "gluing golden test", 1.0, [] {
    Outcome out;
    const OpenSurface left =
        make_open_surface(0, {}, {Cycle({"y1", "y2", "y3", "y4", "y5", "y6"}), Cycle({"z1", "z2", "z3", "z4"})});
    const OpenSurface right = make_open_surface(0, {Cycle({"x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"})}, {});
    const Bijection eta{{"y6", "x2"}, {"z1", "x3"}, {"y4", "x7"}};
    const auto mixed = trace_mixed_cycles(left, right, eta);
    const std::vector<Cycle> expected{Cycle({"y1", "y2", "y3", "x8", "x1"}), Cycle({"x4", "x5", "x6", "y5", "z2", "z3", "z4"})};
    out.require(mixed == expected, "mixed cycles differ");
    CycleSet outs, ins;
    for (const auto& m : mixed) {
      auto [o, i] = split_mixed_cycle(m, right.outputs());
      outs.push_back(o);
      ins.push_back(i);
    }
    const OpenSurface glued = open_glue(left, right, eta);
    for (const auto& c : {Cycle({"x8", "x1"}), Cycle({"x4", "x5", "x6"})}) {
      out.require(std::count(outs.begin(), outs.end(), c) == 1, "missing output split " + c.str());
      out.require(std::count(glued.out_cycles.begin(), glued.out_cycles.end(), c) == 1, "glued surface lacks " + c.str());
    }
    for (const auto& c : {Cycle({"y5", "z2", "z3", "z4"}), Cycle({"y1", "y2", "y3"})}) {
      out.require(std::count(ins.begin(), ins.end(), c) == 1, "missing input split " + c.str());
      out.require(std::count(glued.in_cycles.begin(), glued.in_cycles.end(), c) == 1, "glued surface lacks " + c.str());
    }
    out.require(glued.boundaries() == 4, "glued surface should have four boundary cycles");
    out.require(glued.genus == oracle::glued_genus(left, right, eta), "genus differs from the cell complex");
    return out;
  });

  criterion(2, "properad axioms", 300.0, [] {
    Outcome out;
    std::size_t cases = 0;
    {
      std::vector<Span<ClosedGenerator>> gens;
      for (const auto& g : closed_generators(3, 6)) gens.push_back(span_of(g));
      all_axioms(out, "closed", closed_frobenius(), gens, 0, cases);
    }
    {
      std::vector<Span<OpenSurface>> gens;
      for (const auto& s : oracle::small_open_surfaces(6, 3)) gens.push_back(span_of(s));
      all_axioms(out, "open", open_frobenius(), gens, 6, cases);
    }
    for (const DGVectorSpace& v : {space({{"a", 0}}), space({{"x", 1}}), space({{"a", 0}, {"b", 1}}, {{{1, 0}, Rational(1)}}),
                                   space({{"a", 0}, {"b", 0}})}) {
      std::vector<EndElement> gens;
      for (int m = 0; m <= 2; ++m)
        for (int n = 0; n <= 2; ++n)
          enumerate_words(v.dim(), m, [&](const Word& J) {
            enumerate_words(v.dim(), n, [&](const Word& I) {
              GradedLinearMap f{m, n, {{{J, I}, Rational(1)}}, word_degree(v.basis(), J) - word_degree(v.basis(), I)};
              gens.push_back(skeletal_end(f));
            });
          });
      all_axioms(out, "End_V", endomorphism_properad(v), gens, 0, cases);
    }
    out.detail = std::to_string(cases) + " cases" + (out.detail.empty() ? "" : "; " + out.detail);
    return out;
  });

  criterion(3, "cobar d^2 = 0", 600.0, [] {
    Outcome out;
    {
      CobarDifferential<ClosedGenerator> d(closed_cobar_model());
      const auto r = verify_d_squared(d, skeletal_generators(d.model(), 3, 6));
      out.require(r.ok, "closed: " + r.witness);
      out.require(r.first_order_terms > 0, "closed differential is empty");
      out.detail = "closed " + std::to_string(r.generators) + " generators";
    }
    {
      CobarDifferential<OpenSurface> d(open_cobar_model());
      const auto r = verify_d_squared(d, open_generators(d.model(), 5, 5));
      out.require(r.ok, "open: " + r.witness);
      out.require(r.first_order_terms > 0, "open differential is empty");
      if (out.ok) out.detail += ", open " + std::to_string(r.generators);
    }
    {
      CobarDifferential<ClosedGenerator> d(closed_cobar_model(Mutation::composition_sign));
      const auto r = verify_d_squared(d, skeletal_generators(d.model(), 3, 6));
      out.require(!r.ok && !r.witness.empty(), "the sign-mutated model was not caught");
      if (out.ok) out.detail += "; mutated model caught: " + r.witness;
    }
    return out;
  });

  criterion(4, "master equation triangulation", 300.0, [&rng] {
    Outcome out;
    const auto model = closed_tilde_model(space({{"x", 1}, {"y", 2}}, {{{1, 0}, Rational(1)}}));
    const Truncation t{4};
    const auto phis = basis_terms(model, closed_skeletal(1, 2), 0);
    const auto odd_terms = basis_terms(model, closed_skeletal(1, 4), 1);
    int instances = 0, passing = 0;
    std::size_t decided = 0;
    auto run = [&](const ClosedElement& L) {
      const std::vector<CheckReport> reports{master_check(model, L, t), ibl_component_relations(model, L, t),
                                             operator_square_check(model, L, t)};
      ++instances;
      if (reports.front().ok()) ++passing;
      for (const auto& r : reports) decided += r.components.size() - r.count(Verdict::skipped);
      out.require(io::verdicts_agree(reports), "checkers disagree (" + verdicts(reports) + ") on " + describe_element(model, L));
    };
    for (int i = 0; i < 10; ++i) {
      ClosedElement L;
      while (L.empty()) L = gauge_transform(model, {}, random_element(phis, 3, rng), t.chi_max);
      const int before = passing;
      run(L);
      out.require(passing == before + 1, "a gauge transform of d failed the master equation");
      ClosedElement bad = L;
      accumulate(bad, random_element(odd_terms, 1, rng));
      run(bad);
    }
    out.require(instances >= 20, "fewer than 20 instances");
    out.require(passing < instances, "no mutation broke the master equation");
    if (out.ok)
      out.detail = std::to_string(instances) + " instances, " + std::to_string(passing) + " satisfy the equation, " +
                   std::to_string(decided) + " component verdicts";
    return out;
  });

  criterion(5, "structure made of d alone", 60.0, [] {
    Outcome out;
    const Truncation t{3};
    const auto model = closed_tilde_model(space({{"a", 0}, {"b", 1}}, {{{1, 0}, Rational(1)}}));
    const std::vector<CheckReport> good{master_check(model, {}, t), ibl_component_relations(model, {}, t),
                                        operator_square_check(model, {}, t)};
    for (const auto& r : good) out.require(r.ok(), r.checker + " rejects d alone with d^2 = 0");
    const GradedBasis b({{"a", 0}, {"b", 1}, {"c", 2}});
    const SparseMatrix d{{{1, 0}, Rational(1)}, {{2, 1}, Rational(1)}};
    const auto bad_model = closed_tilde_model(DGVectorSpace::unchecked(b, d));
    const std::vector<CheckReport> bad{master_check(bad_model, {}, t), ibl_component_relations(bad_model, {}, t),
                                       operator_square_check(bad_model, {}, t)};
    for (const auto& r : bad) out.require(!r.ok(), r.checker + " accepts d alone with d^2 != 0");
    bool rejected = false;
    try {
      io::dgvs_from_json(io::read_json_file(std::string(PROPERAD_FIXTURES) + "/dgvs_d2_nonzero.json"));
    } catch (const InputError&) {
      rejected = true;
    }
    out.require(rejected, "the d^2 != 0 fixture loaded");
    return out;
  });

  criterion(6, "Lie-admissibility", 60.0, [&rng] {
    Outcome out;
    const auto model = closed_tilde_model(space({{"a", 0}, {"b", 1}}, {{{1, 0}, Rational(1)}}));
    const std::vector<std::vector<TildeKey<ClosedGenerator>>> terms{basis_terms(model, closed_skeletal(1, 2), 0),
                                                                     basis_terms(model, closed_skeletal(1, 2), 1)};
    std::uniform_int_distribution<int> parity(0, 1);
    int nonzero_associators = 0;
    for (int trial = 0; trial < 100 && out.ok; ++trial) {
      const auto x = random_element(terms[parity(rng)], 3, rng);
      const auto y = random_element(terms[parity(rng)], 3, rng);
      const auto z = random_element(terms[parity(rng)], 3, rng);
      const auto residual = jacobi_residual(model, x, y, z);
      out.require(residual.empty(), "Jacobi fails on x=" + describe_element(model, x) + " y=" +
                                        describe_element(model, y) + " z=" + describe_element(model, z));
      if (!associator(model, x, y, z).empty()) ++nonzero_associators;
    }
    out.require(nonzero_associators > 0, "every associator vanished");
    if (out.ok) out.detail = "100 triples, " + std::to_string(nonzero_associators) + " nonzero associators";
    return out;
  });

  criterion(7, "genus ledger against the cell complex", 120.0, [] {
    Outcome out;
    std::vector<OpenSurface> lefts, rights;
    for (const auto& s : oracle::small_open_surfaces(5, 2)) {
      lefts.push_back(s.relabel({detail::prefix_labels(s.outputs(), "L:"), detail::prefix_labels(s.inputs(), "L:")}));
      rights.push_back(s.relabel({detail::prefix_labels(s.outputs(), "R:"), detail::prefix_labels(s.inputs(), "R:")}));
    }
    std::size_t gluings = 0;
    for (const auto& left : lefts)
      for (const auto& right : rights) {
        if (left.outputs().size() + left.inputs().size() + right.outputs().size() + right.inputs().size() > 5) continue;
        for (const auto& eta : oracle::all_gluings(left.inputs(), right.outputs())) {
          ++gluings;
          const OpenSurface glued = open_glue(left, right, eta);
          const int g = oracle::glued_genus(left, right, eta);
          const int b = oracle::glued_boundaries(left, right, eta);
          if (glued.genus != g || glued.boundaries() != b) {
            out.require(false, "ledger gives genus " + std::to_string(glued.genus) + " with " +
                                   std::to_string(glued.boundaries()) + " boundaries, cell complex " +
                                   std::to_string(g) + " and " + std::to_string(b) + " for " + left.str() + " and " +
                                   right.str() + " along " + show(eta));
            return out;
          }
        }
      }
    out.require(gluings > 1000, "too few gluings");
    if (out.ok) out.detail = std::to_string(gluings) + " gluings";
    return out;
  });

  criterion(8, "Koszul signs and shuffles", 10.0, [] {
    Outcome out;
    std::size_t checks = 0;
    for (int n = 0; n <= 5; ++n) {
      const auto perms = all_permutations(n);
      for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> deg(n);
        for (int i = 0; i < n; ++i) deg[i] = (mask >> i) & 1 ? 1 : 2;
        for (const auto& tau : perms) {
          out.require(koszul_sign(tau, deg) == bubble_sign(tau, deg), "sign differs from adjacent swaps");
          for (const auto& sigma : perms) {
            std::vector<int> st(n);
            for (int i = 0; i < n; ++i) st[i] = sigma[tau[i]];
            ++checks;
            if (koszul_sign(st, deg) != koszul_sign(sigma, permute_degrees(tau, deg)) * koszul_sign(tau, deg)) {
              out.require(false, "sign is not multiplicative for n = " + std::to_string(n));
              return out;
            }
          }
        }
      }
    }
    for (int p = 0; p <= 8; ++p)
      for (int q = 0; p + q <= 8; ++q) {
        const auto s = enumerate_shuffles(p, q);
        out.require(static_cast<long>(s.size()) == binomial(p + q, p),
                    std::to_string(p) + "," + std::to_string(q) + " shuffles: " + std::to_string(s.size()));
        for (const auto& sigma : s) out.require(is_shuffle(sigma, p), "enumerated a non-shuffle");
      }
    if (out.ok) out.detail = std::to_string(checks) + " products";
    return out;
  });

  return failures == 0 ? 0 : 1;
}
