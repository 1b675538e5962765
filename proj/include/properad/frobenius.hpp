#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "properad/core.hpp"

namespace properad {

// ---------------------------------------------------------------------------------------------
// Closed surfaces

/// Generator p_{C,D,chi}: a connected closed surface with |C| outgoing and |D| incoming punctures.
struct ClosedGenerator {
  LabelSet outputs;
  LabelSet inputs;
  int chi = 0;

  DirectedCorolla corolla() const { return {outputs, inputs}; }
  /// Twice the genus plus 2 equals chi - |C| - |D| + 2.
  int genus() const { return (chi - static_cast<int>(outputs.size() + inputs.size()) + 2) / 2; }
  bool stable() const { return chi > 0; }
  ClosedGenerator relabel(const Relabel& r) const {
    return {image(restrict_to(r.out, outputs)), image(restrict_to(r.in, inputs)), chi};
  }
  std::string str() const {
    std::string s = "p(";
    for (std::size_t i = 0; i < outputs.size(); ++i) s += (i ? "," : "") + outputs[i];
    s += ";";
    for (std::size_t i = 0; i < inputs.size(); ++i) s += (i ? "," : "") + inputs[i];
    return s + ";chi=" + std::to_string(chi) + ")";
  }
  friend auto operator<=>(const ClosedGenerator&, const ClosedGenerator&) = default;
  friend bool operator==(const ClosedGenerator&, const ClosedGenerator&) = default;
};

inline ClosedGenerator make_closed(std::vector<Label> outputs, std::vector<Label> inputs, int chi,
                                   bool generalized = true) {
  DirectedCorolla c = make_corolla(std::move(outputs), std::move(inputs));
  const int legs = static_cast<int>(c.outputs.size() + c.inputs.size());
  if ((chi - legs) % 2 != 0 || chi - legs + 2 < 0)
    throw InputError("closed generator: chi - |C| - |D| must be even and at least -2");
  if (!generalized && (c.outputs.empty() || c.inputs.empty()))
    throw InputError("closed generator: restricted components need inputs and outputs");
  return {c.outputs, c.inputs, chi};
}

inline ClosedGenerator closed_compose(const ClosedGenerator& left, const ClosedGenerator& right,
                                      const Bijection& eta) {
  validate_gluing(left.corolla(), right.corolla(), eta);
  DirectedCorolla c = composite_corolla(left.corolla(), right.corolla(), eta);
  return {c.outputs, c.inputs, left.chi + right.chi};
}

/// Deliberately broken variants for negative tests.
enum class Mutation { none, action_sign, composition_sign };

/// True when the relabeling does not preserve the sorted order of the labels.
inline bool reorders(const Bijection& f) {
  std::vector<Label> images;
  for (const auto& [k, v] : f) images.push_back(v);
  return !std::is_sorted(images.begin(), images.end());
}

inline Properad<Span<ClosedGenerator>> closed_frobenius(Mutation mutation = Mutation::none) {
  auto p = linear_span<ClosedGenerator>(
      mutation == Mutation::none ? "closed-frobenius" : "mutated-closed-frobenius",
      [mutation](const ClosedGenerator& l, const ClosedGenerator& r, const Bijection& eta) {
        return std::optional<ClosedGenerator>(closed_compose(l, r, eta));
      });
  if (mutation == Mutation::action_sign) {
    auto act = p.act;
    p.act = [act](const Span<ClosedGenerator>& x, const Relabel& r) {
      Span<ClosedGenerator> y = act(x, r);
      if (reorders(r.out))
        for (auto& [g, c] : y.terms) c = -c;
      return y;
    };
  } else if (mutation == Mutation::composition_sign) {
    // composites whose left factor is a chi = 1 generator change sign
    p.compose = [](const Span<ClosedGenerator>& x, const Span<ClosedGenerator>& y, const Bijection& eta) {
      validate_gluing(x.corolla, y.corolla, eta);
      Span<ClosedGenerator> z{composite_corolla(x.corolla, y.corolla, eta), {}};
      for (const auto& [gx, cx] : x.terms)
        for (const auto& [gy, cy] : y.terms)
          accumulate(z.terms, closed_compose(gx, gy, eta), gx.chi == 1 ? -(cx * cy) : cx * cy);
      return z;
    };
  }
  return p;
}

/// Every stable closed generator with outputs o1..om, inputs i1..in (m, n <= max_legs) and chi <= chi_max.
inline std::vector<ClosedGenerator> closed_generators(int max_legs, int chi_max, bool generalized = true) {
  std::vector<ClosedGenerator> out;
  for (int m = 0; m <= max_legs; ++m)
    for (int n = 0; n <= max_legs; ++n) {
      if (!generalized && (m == 0 || n == 0)) continue;
      DirectedCorolla c = skeletal_corolla(m, n);
      for (int chi = 1; chi <= chi_max; ++chi)
        if ((chi - m - n) % 2 == 0 && chi - m - n + 2 >= 0) out.push_back({c.outputs, c.inputs, chi});
    }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Open surfaces

enum class GenusRule { ledger, paper_verbal };

/// Connected oriented surface with boundary; each boundary circle carries either output or input
/// segments (possibly none) in its cyclic order.
struct OpenSurface {
  int genus = 0;
  CycleSet out_cycles;  // sorted
  CycleSet in_cycles;   // sorted

  LabelSet outputs() const {
    std::vector<Label> v;
    for (const auto& c : out_cycles) v.insert(v.end(), c.word().begin(), c.word().end());
    return make_label_set(v);
  }
  LabelSet inputs() const {
    std::vector<Label> v;
    for (const auto& c : in_cycles) v.insert(v.end(), c.word().begin(), c.word().end());
    return make_label_set(v);
  }
  DirectedCorolla corolla() const { return {outputs(), inputs()}; }
  int boundaries() const { return static_cast<int>(out_cycles.size() + in_cycles.size()); }
  /// G = 2g + b - 1.
  int big_genus() const { return 2 * genus + boundaries() - 1; }
  int chi() const { return 2 * big_genus() + static_cast<int>(outputs().size() + inputs().size()) - 2; }
  /// Topological Euler characteristic 2 - 2g - b.
  int chi_top() const { return 2 - 2 * genus - boundaries(); }
  bool stable() const { return chi() > 0; }
  OpenSurface relabel(const Relabel& r) const {
    OpenSurface s{genus, {}, {}};
    for (const auto& c : out_cycles) s.out_cycles.push_back(map_cycle(r.out, c));
    for (const auto& c : in_cycles) s.in_cycles.push_back(map_cycle(r.in, c));
    s.out_cycles = sorted_cycles(std::move(s.out_cycles));
    s.in_cycles = sorted_cycles(std::move(s.in_cycles));
    return s;
  }
  std::string str() const {
    std::string s = "{";
    for (const auto& c : out_cycles) s += "out" + c.str() + " ";
    for (const auto& c : in_cycles) s += "in" + c.str() + " ";
    return s + "}^" + std::to_string(genus);
  }
  friend auto operator<=>(const OpenSurface&, const OpenSurface&) = default;
  friend bool operator==(const OpenSurface&, const OpenSurface&) = default;
};

inline OpenSurface make_open_surface(int genus, CycleSet out_cycles, CycleSet in_cycles) {
  if (genus < 0) throw InputError("negative genus");
  OpenSurface s{genus, sorted_cycles(std::move(out_cycles)), sorted_cycles(std::move(in_cycles))};
  std::vector<Label> all;
  for (const auto& c : s.out_cycles) all.insert(all.end(), c.word().begin(), c.word().end());
  for (const auto& c : s.in_cycles) all.insert(all.end(), c.word().begin(), c.word().end());
  make_label_set(all);  // throws on repeated labels
  return s;
}

/// Boundary cycles met by the walk through the glued region, with the labels they still carry.
/// `order` (optional) permutes the starting positions to exercise independence of the traversal.
inline std::vector<Cycle> trace_mixed_cycles(const OpenSurface& left, const OpenSurface& right,
                                             const Bijection& eta, std::mt19937_64* order = nullptr) {
  validate_gluing(left.corolla(), right.corolla(), eta);
  const Bijection eta_inv = inverse(eta);
  // Touched cycles: inputs of the left factor meeting B, outputs of the right factor meeting A.
  std::vector<const Cycle*> touched;
  for (const auto& c : left.in_cycles)
    if (std::any_of(c.word().begin(), c.word().end(), [&](const Label& x) { return eta.count(x); }))
      touched.push_back(&c);
  for (const auto& c : right.out_cycles)
    if (std::any_of(c.word().begin(), c.word().end(), [&](const Label& x) { return eta_inv.count(x); }))
      touched.push_back(&c);
  std::map<Label, const Cycle*> owner;
  for (const Cycle* c : touched)
    for (const auto& x : c->word()) owner[x] = c;
  auto partner = [&](const Label& x) -> std::optional<Label> {
    if (auto it = eta.find(x); it != eta.end()) return it->second;
    if (auto it = eta_inv.find(x); it != eta_inv.end()) return it->second;
    return std::nullopt;
  };
  // A gap is named by the segment preceding it; the walk moves gap to gap.
  auto next_gap = [&](const Label& s, std::vector<Label>& recorded) -> Label {
    const Label& t = owner.at(s)->successor(s);
    if (auto p = partner(t)) return *p;
    recorded.push_back(t);
    return t;
  };
  std::vector<Label> starts;
  for (const auto& [x, c] : owner) starts.push_back(x);
  if (order) std::shuffle(starts.begin(), starts.end(), *order);
  std::set<Label> visited;
  std::vector<Cycle> mixed;
  for (const auto& s0 : starts) {
    if (visited.count(s0)) continue;
    std::vector<Label> recorded;
    Label s = s0;
    do {
      visited.insert(s);
      s = next_gap(s, recorded);
    } while (s != s0);
    mixed.push_back(Cycle(recorded));
  }
  std::sort(mixed.begin(), mixed.end());
  return mixed;
}

/// Output and input subwords of a mixed cycle, in cyclic order.
inline std::pair<Cycle, Cycle> split_mixed_cycle(const Cycle& mixed, const LabelSet& output_labels) {
  std::vector<Label> outs, ins;
  for (const auto& x : mixed.word()) (contains(output_labels, x) ? outs : ins).push_back(x);
  return {Cycle(outs), Cycle(ins)};
}

struct OpenGlueDetail {
  OpenSurface surface;
  std::vector<Cycle> mixed;
  int splits = 0;
  int chi_top = 0;
};

/// Gluing of open surfaces. Every mixed cycle is cut into an output and an input boundary, either of
/// which may be empty.
inline OpenGlueDetail open_glue_detail(const OpenSurface& left, const OpenSurface& right, const Bijection& eta,
                                       GenusRule rule = GenusRule::ledger) {
  OpenGlueDetail d;
  d.mixed = trace_mixed_cycles(left, right, eta);
  const Bijection eta_inv = inverse(eta);
  const LabelSet outs = set_union(left.outputs(), right.outputs());
  OpenSurface& r = d.surface;
  auto touched_by = [](const Cycle& c, const Bijection& f) {
    return std::any_of(c.word().begin(), c.word().end(), [&](const Label& x) { return f.count(x); });
  };
  r.out_cycles = left.out_cycles;
  for (const auto& c : right.out_cycles)
    if (!touched_by(c, eta_inv)) r.out_cycles.push_back(c);
  r.in_cycles = right.in_cycles;
  for (const auto& c : left.in_cycles)
    if (!touched_by(c, eta)) r.in_cycles.push_back(c);
  for (const auto& m : d.mixed) {
    auto [o, i] = split_mixed_cycle(m, outs);
    r.out_cycles.push_back(o);
    r.in_cycles.push_back(i);
    ++d.splits;
  }
  r.out_cycles = sorted_cycles(std::move(r.out_cycles));
  r.in_cycles = sorted_cycles(std::move(r.in_cycles));
  d.chi_top = left.chi_top() + right.chi_top() - static_cast<int>(eta.size()) - d.splits;
  if (rule == GenusRule::ledger) {
    const int twice_g = 2 - d.chi_top - r.boundaries();
    if (twice_g < 0 || twice_g % 2 != 0)
      throw InvariantError("open gluing ledger produced genus " + std::to_string(twice_g) + "/2");
    r.genus = twice_g / 2;
  } else {
    std::set<std::pair<Cycle, Cycle>> pairs;
    for (const auto& [b, a] : eta) {
      const Cycle* cb = nullptr;
      const Cycle* ca = nullptr;
      for (const auto& c : left.in_cycles)
        if (std::find(c.word().begin(), c.word().end(), b) != c.word().end()) cb = &c;
      for (const auto& c : right.out_cycles)
        if (std::find(c.word().begin(), c.word().end(), a) != c.word().end()) ca = &c;
      pairs.insert({*cb, *ca});
    }
    r.genus = left.genus + right.genus + static_cast<int>(pairs.size());
  }
  return d;
}

inline OpenSurface open_glue(const OpenSurface& left, const OpenSurface& right, const Bijection& eta,
                             GenusRule rule = GenusRule::ledger) {
  return open_glue_detail(left, right, eta, rule).surface;
}

inline Properad<Span<OpenSurface>> open_frobenius(GenusRule rule = GenusRule::ledger) {
  return linear_span<OpenSurface>("open-frobenius",
                                  [rule](const OpenSurface& l, const OpenSurface& r, const Bijection& eta) {
                                    return std::optional<OpenSurface>(open_glue(l, r, eta, rule));
                                  });
}

/// Every way of arranging the labels into disjoint nonempty cycles.
inline std::vector<CycleSet> cycle_arrangements(const LabelSet& labels) {
  std::vector<CycleSet> out;
  const int n = static_cast<int>(labels.size());
  for (const auto& perm : all_permutations(n)) {
    std::vector<bool> seen(n, false);
    CycleSet cs;
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      std::vector<Label> w;
      for (int j = i; !seen[j]; j = perm[j]) {
        seen[j] = true;
        w.push_back(labels[j]);
      }
      cs.push_back(Cycle(w));
    }
    out.push_back(sorted_cycles(cs));
  }
  return out;
}

struct OpenBounds {
  int max_genus = 1;
  int max_empty_out = 1;
  int max_empty_in = 1;
  int chi_max = 1 << 20;
};

/// All stable surfaces on the given corolla within the bounds.
inline std::vector<OpenSurface> open_surfaces_on(const DirectedCorolla& c, const OpenBounds& b) {
  std::vector<OpenSurface> out;
  for (const auto& outs : cycle_arrangements(c.outputs))
    for (const auto& ins : cycle_arrangements(c.inputs))
      for (int eo = 0; eo <= b.max_empty_out; ++eo)
        for (int ei = 0; ei <= b.max_empty_in; ++ei)
          for (int g = 0; g <= b.max_genus; ++g) {
            OpenSurface s{g, outs, ins};
            for (int k = 0; k < eo; ++k) s.out_cycles.push_back(Cycle());
            for (int k = 0; k < ei; ++k) s.in_cycles.push_back(Cycle());
            if (s.boundaries() == 0) continue;
            s.out_cycles = sorted_cycles(s.out_cycles);
            s.in_cycles = sorted_cycles(s.in_cycles);
            if (s.stable() && s.chi() <= b.chi_max) out.push_back(s);
          }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Open-closed surfaces

/// Surface with open boundaries carrying segments and closed punctures in the interior.
struct OpenClosedGenerator {
  int genus = 0;
  CycleSet out_cycles;
  CycleSet in_cycles;
  LabelSet closed_outputs;
  LabelSet closed_inputs;

  OpenSurface open_part() const { return {genus, out_cycles, in_cycles}; }
  LabelSet open_outputs() const { return open_part().outputs(); }
  LabelSet open_inputs() const { return open_part().inputs(); }
  DirectedCorolla corolla() const {
    return {set_union(open_outputs(), closed_outputs), set_union(open_inputs(), closed_inputs)};
  }
  int boundaries() const { return static_cast<int>(out_cycles.size() + in_cycles.size()); }
  int punctures() const { return static_cast<int>(closed_outputs.size() + closed_inputs.size()); }
  /// 2G = 4g + 2b + |C1| + |C2| - 2.
  int twice_big_genus() const { return 4 * genus + 2 * boundaries() + punctures() - 2; }
  int chi() const {
    return twice_big_genus() + static_cast<int>(open_outputs().size() + open_inputs().size()) + punctures() - 2;
  }
  int chi_top() const { return 2 - 2 * genus - boundaries() - punctures(); }
  bool stable() const { return chi() > 0; }
  bool is_closed_label(const Label& x) const { return contains(closed_outputs, x) || contains(closed_inputs, x); }
  OpenClosedGenerator relabel(const Relabel& r) const {
    OpenClosedGenerator s{genus, {}, {}, image(restrict_to(r.out, closed_outputs)),
                          image(restrict_to(r.in, closed_inputs))};
    for (const auto& c : out_cycles) s.out_cycles.push_back(map_cycle(r.out, c));
    for (const auto& c : in_cycles) s.in_cycles.push_back(map_cycle(r.in, c));
    s.out_cycles = sorted_cycles(std::move(s.out_cycles));
    s.in_cycles = sorted_cycles(std::move(s.in_cycles));
    return s;
  }
  std::string str() const {
    std::string s = "{";
    for (const auto& c : out_cycles) s += "out" + c.str() + " ";
    for (const auto& c : in_cycles) s += "in" + c.str() + " ";
    for (const auto& x : closed_outputs) s += "cout(" + x + ") ";
    for (const auto& x : closed_inputs) s += "cin(" + x + ") ";
    return s + "}^" + std::to_string(genus);
  }
  friend auto operator<=>(const OpenClosedGenerator&, const OpenClosedGenerator&) = default;
  friend bool operator==(const OpenClosedGenerator&, const OpenClosedGenerator&) = default;
};

inline OpenClosedGenerator oc_compose(const OpenClosedGenerator& left, const OpenClosedGenerator& right,
                                      const Bijection& eta_open, const Bijection& eta_closed) {
  for (const auto& [b, a] : eta_open)
    if (left.is_closed_label(b) || right.is_closed_label(a))
      throw InputError("open gluing pair '" + b + "'~'" + a + "' involves a closed puncture");
  for (const auto& [b, a] : eta_closed)
    if (!contains(left.closed_inputs, b) || !contains(right.closed_outputs, a))
      throw InputError("closed gluing pair '" + b + "'~'" + a + "' involves an open segment");
  validate_gluing(left.corolla(), right.corolla(), disjoint_union(eta_open, eta_closed));
  OpenClosedGenerator r;
  int chi_top = left.chi_top() + right.chi_top();
  if (!eta_open.empty()) {
    OpenGlueDetail d = open_glue_detail(left.open_part(), right.open_part(), eta_open);
    r.out_cycles = d.surface.out_cycles;
    r.in_cycles = d.surface.in_cycles;
    // Open pairs and band cuts lower chi_top; closed punctures count as holes on both sides.
    chi_top -= static_cast<int>(eta_open.size()) + d.splits;
  } else {
    r.out_cycles = sorted_cycles([&] {
      CycleSet cs = left.out_cycles;
      cs.insert(cs.end(), right.out_cycles.begin(), right.out_cycles.end());
      return cs;
    }());
    r.in_cycles = sorted_cycles([&] {
      CycleSet cs = left.in_cycles;
      cs.insert(cs.end(), right.in_cycles.begin(), right.in_cycles.end());
      return cs;
    }());
  }
  r.closed_outputs = set_union(left.closed_outputs, set_minus(right.closed_outputs, image(eta_closed)));
  r.closed_inputs = set_union(set_minus(left.closed_inputs, domain(eta_closed)), right.closed_inputs);
  const int twice_g = 2 - chi_top - r.boundaries() - r.punctures();
  if (twice_g < 0 || twice_g % 2 != 0)
    throw InvariantError("open-closed gluing ledger produced genus " + std::to_string(twice_g) + "/2");
  r.genus = twice_g / 2;
  return r;
}

inline Properad<Span<OpenClosedGenerator>> open_closed_frobenius() {
  auto p = linear_span<OpenClosedGenerator>(
      "open-closed-frobenius",
      [](const OpenClosedGenerator& l, const OpenClosedGenerator& r, const Bijection& eta) {
        Bijection open, closed;
        for (const auto& [b, a] : eta) (l.is_closed_label(b) ? closed : open)[b] = a;
        return std::optional<OpenClosedGenerator>(oc_compose(l, r, open, closed));
      });
  p.color = [](const Span<OpenClosedGenerator>& x, const Label& label) {
    return x.terms.empty() ? 0 : (x.terms.begin()->first.is_closed_label(label) ? 1 : 0);
  };
  return p;
}

/// Stable open-closed surfaces on open legs o*/i* and closed legs co*/ci*, with at most `max_labels`
/// legs in total, genus at most `max_genus` and at most one empty boundary of each kind.
inline std::vector<OpenClosedGenerator> open_closed_generators(int max_labels, int max_genus = 0) {
  std::vector<OpenClosedGenerator> out;
  for (int co = 0; co <= max_labels; ++co)
    for (int ci = 0; co + ci <= max_labels; ++ci) {
      std::vector<Label> cos, cis;
      for (int k = 1; k <= co; ++k) cos.push_back("co" + std::to_string(k));
      for (int k = 1; k <= ci; ++k) cis.push_back("ci" + std::to_string(k));
      for (int m = 0; co + ci + m <= max_labels; ++m)
        for (int n = 0; co + ci + m + n <= max_labels; ++n) {
          const DirectedCorolla c = skeletal_corolla(m, n);
          for (const auto& outs : cycle_arrangements(c.outputs))
            for (const auto& ins : cycle_arrangements(c.inputs))
              for (int eo = 0; eo <= 1; ++eo)
                for (int ei = 0; ei <= 1; ++ei)
                  for (int g = 0; g <= max_genus; ++g) {
                    OpenClosedGenerator s{g, outs, ins, make_label_set(cos), make_label_set(cis)};
                    if (eo) s.out_cycles.push_back(Cycle());
                    if (ei) s.in_cycles.push_back(Cycle());
                    s.out_cycles = sorted_cycles(s.out_cycles);
                    s.in_cycles = sorted_cycles(s.in_cycles);
                    if (s.stable()) out.push_back(s);
                  }
        }
    }
  return out;
}

inline bool stability_check(const ClosedGenerator& g) { return g.stable(); }
inline bool stability_check(const OpenSurface& s) { return s.stable(); }
inline bool stability_check(const OpenClosedGenerator& s) { return s.stable(); }

}  // namespace properad
