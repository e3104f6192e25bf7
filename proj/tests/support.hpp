#pragma once

// Shared test material: random generators, independent brute-force
// oracles, and the hand-derived EL subsumption cases.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "idel/contextual.hpp"
#include "idel/diagram.hpp"
#include "idel/el.hpp"
#include "idel/evidence.hpp"

namespace idel::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return uniform(rng) < p; }
inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

inline const std::vector<std::string>& concept_pool() {
  static const std::vector<std::string> pool{"A", "B", "C", "E"};
  return pool;
}
inline const std::vector<std::string>& role_pool() {
  static const std::vector<std::string> pool{"r", "s"};
  return pool;
}

inline Concept random_concept(Rng& rng, int depth) {
  const auto& names = concept_pool();
  if (depth <= 0 || coin(rng, 0.5)) {
    return coin(rng, 0.08) ? Concept::top() : Concept::name(names[pick(rng, names.size())]);
  }
  if (coin(rng)) return Concept::conj(random_concept(rng, depth - 1), random_concept(rng, depth - 1));
  return Concept::some(role_pool()[pick(rng, role_pool().size())], random_concept(rng, depth - 1));
}

inline TBox random_tbox(Rng& rng, std::size_t max_axioms = 5, int depth = 2) {
  TBox t;
  const std::size_t k = pick(rng, max_axioms + 1);
  for (std::size_t i = 0; i < k; ++i) t.insert({random_concept(rng, depth), random_concept(rng, depth)});
  return t;
}

inline ContextFormula random_formula(Rng& rng, const InfluenceDiagram& d, int depth) {
  if (depth <= 0 || coin(rng, 0.4)) {
    if (coin(rng, 0.1)) return coin(rng) ? ContextFormula::truth() : ContextFormula::falsity();
    return ContextFormula::var(d.variables[pick(rng, d.size())].name);
  }
  switch (pick(rng, 3)) {
    case 0: return ContextFormula::negation(random_formula(rng, d, depth - 1));
    case 1: return ContextFormula::conj(random_formula(rng, d, depth - 1), random_formula(rng, d, depth - 1));
    default: return ContextFormula::disj(random_formula(rng, d, depth - 1), random_formula(rng, d, depth - 1));
  }
}

struct DiagramShape {
  std::size_t min_vars = 1;
  std::size_t max_vars = 4;
  double decision_rate = 0.35;
  double edge_rate = 0.5;
  std::size_t max_decisions = 3;
  /// Decisions observe every earlier variable.
  bool fully_observed = false;
};

inline double random_probability(Rng& rng) {
  const double u = uniform(rng);
  if (u < 0.05) return 0.0;
  if (u < 0.10) return 1.0;
  return uniform(rng);
}

/// Random valid diagram whose declaration order is topological.
inline InfluenceDiagram random_diagram(Rng& rng, const DiagramShape& shape = {}) {
  InfluenceDiagram d;
  const std::size_t n = shape.min_vars + pick(rng, shape.max_vars - shape.min_vars + 1);
  std::size_t decisions = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Variable v;
    v.name = "X" + std::to_string(i);
    const bool decision = decisions < shape.max_decisions && coin(rng, shape.decision_rate);
    v.kind = decision ? NodeKind::Decision : NodeKind::Chance;
    for (std::size_t p = 0; p < i; ++p) {
      if ((decision && shape.fully_observed) || coin(rng, shape.edge_rate)) v.parents.push_back(p);
    }
    if (decision) {
      ++decisions;
    } else {
      for (std::size_t r = 0; r < (std::size_t{1} << v.parents.size()); ++r) v.cpt.push_back(random_probability(rng));
    }
    d.variables.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (coin(rng, 0.7)) d.cost_parents.push_back(i);
  }
  for (std::size_t r = 0; r < (std::size_t{1} << d.cost_parents.size()); ++r) {
    d.cost_table.push_back(coin(rng, 0.6) ? static_cast<double>(pick(rng, 21)) : 100.0 * uniform(rng));
  }
  return d;
}

inline KnowledgeBase random_kb(Rng& rng, const DiagramShape& shape = {}) {
  KnowledgeBase kb;
  kb.diagram = random_diagram(rng, shape);
  const std::size_t k = 1 + pick(rng, 5);
  for (std::size_t i = 0; i < k; ++i) {
    kb.vtbox.push_back({{random_concept(rng, 1), random_concept(rng, 1)}, random_formula(rng, kb.diagram, 2)});
  }
  return kb;
}

inline GlobalStrategy random_strategy(Rng& rng, const InfluenceDiagram& d, double pure_rate = 0.5) {
  const bool pure = coin(rng, pure_rate);
  GlobalStrategy s;
  for (std::size_t dec : d.decisions()) {
    s.locals.emplace(dec, make_local_strategy(d, dec, [&](const Valuation&) {
      return pure ? (coin(rng) ? 1.0 : 0.0) : random_probability(rng);
    }));
  }
  return s;
}

/// Expected cost straight from the definition: the chain rule written out
/// per world, without the library's evaluation helpers.
inline double oracle_expected_cost(const InfluenceDiagram& d, const GlobalStrategy& s) {
  const std::size_t n = d.size();
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    auto value = [&](std::size_t v) { return ((bits >> v) & 1U) != 0; };
    double p = 1.0;
    for (std::size_t v = 0; v < n; ++v) {
      const auto& var = d.variables[v];
      double pt = 0.0;
      if (var.kind == NodeKind::Chance) {
        std::size_t row = 0;
        for (std::size_t q : var.parents) row = row * 2 + (value(q) ? 1 : 0);
        pt = var.cpt[row];
      } else {
        const auto& ls = s.locals.at(v);
        std::size_t row = 0;
        for (std::size_t q : ls.scope) row = row * 2 + (value(q) ? 1 : 0);
        pt = ls.table[row];
      }
      p *= value(v) ? pt : 1.0 - pt;
    }
    std::size_t row = 0;
    for (std::size_t q : d.cost_parents) row = row * 2 + (value(q) ? 1 : 0);
    total += p * d.cost_table[row];
  }
  return total;
}

/// Minimum of oracle_expected_cost over every pure strategy, enumerated
/// independently of the optimizer.
inline double oracle_pure_minimum(const InfluenceDiagram& d) {
  std::vector<std::size_t> decs = d.decisions();
  std::vector<std::vector<std::size_t>> scopes;
  std::size_t bits = 0;
  for (std::size_t dec : decs) {
    scopes.push_back(influence_set(d, dec));
    bits += std::size_t{1} << scopes.back().size();
  }
  double best = 1e300;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
    GlobalStrategy s;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < decs.size(); ++k) {
      LocalStrategy ls{decs[k], scopes[k], {}};
      for (std::size_t r = 0; r < (std::size_t{1} << scopes[k].size()); ++r, ++pos) {
        ls.table.push_back((code >> pos) & 1U ? 1.0 : 0.0);
      }
      s.locals.emplace(decs[k], std::move(ls));
    }
    best = std::min(best, oracle_expected_cost(d, s));
  }
  return best;
}

inline std::size_t pure_enumeration_bits(const InfluenceDiagram& d) {
  std::size_t bits = 0;
  for (std::size_t dec : d.decisions()) bits += std::size_t{1} << influence_set(d, dec).size();
  return bits;
}

/// Calls f on every interpretation over domain {0..size-1} for the given
/// concept and role names.
inline void for_each_interpretation(std::size_t size, const std::vector<std::string>& concepts,
                                    const std::vector<std::string>& roles,
                                    const std::function<void(const FiniteInterpretation&)>& f) {
  const std::size_t cbits = size;
  const std::size_t rbits = size * size;
  const std::size_t total = concepts.size() * cbits + roles.size() * rbits;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << total); ++code) {
    FiniteInterpretation in;
    for (std::size_t e = 0; e < size; ++e) in.domain.insert(static_cast<int>(e));
    std::size_t pos = 0;
    for (const auto& c : concepts) {
      auto& ext = in.concept_ext[c];
      for (std::size_t e = 0; e < size; ++e, ++pos) {
        if ((code >> pos) & 1U) ext.insert(static_cast<int>(e));
      }
    }
    for (const auto& r : roles) {
      auto& ext = in.role_ext[r];
      for (std::size_t x = 0; x < size; ++x) {
        for (std::size_t y = 0; y < size; ++y, ++pos) {
          if ((code >> pos) & 1U) ext.insert({static_cast<int>(x), static_cast<int>(y)});
        }
      }
    }
    f(in);
  }
}

struct ElCase {
  std::string label;
  std::vector<std::pair<std::string, std::string>> tbox;
  std::string lhs;
  std::string rhs;
  bool expected;
  /// Model of the TBox violating lhs ⊑ rhs, for negative cases.
  FiniteInterpretation countermodel;
};

inline TBox tbox_of(const ElCase& c) {
  TBox t;
  for (const auto& [l, r] : c.tbox) t.insert({parse_concept(l), parse_concept(r)});
  return t;
}

inline FiniteInterpretation interp(std::set<int> domain, std::map<std::string, std::set<int>> concepts,
                                   std::map<std::string, std::set<std::pair<int, int>>> roles = {}) {
  return {std::move(domain), std::move(concepts), std::move(roles)};
}

/// Hand-derived subsumption cases; the last three are restrictions of the
/// idelium V-TBox to single worlds.
inline std::vector<ElCase> el_cases() {
  return {
      {"told subsumption", {{"A", "B"}}, "A", "B", true, {}},
      {"transitive chain", {{"A", "B"}, {"B", "C"}}, "A", "C", true, {}},
      {"no converse", {{"A", "B"}}, "B", "A", false, interp({0}, {{"B", {0}}})},
      {"conjunction on the left", {{"(and A B)", "C"}}, "(and A B)", "C", true, {}},
      {"one conjunct is not enough", {{"(and A B)", "C"}}, "A", "C", false, interp({0}, {{"A", {0}}})},
      {"existential round trip", {{"A", "(some r B)"}, {"(some r B)", "C"}}, "A", "C", true, {}},
      {"existential through filler subsumption",
       {{"A", "(some r B)"}, {"B", "E"}, {"(some r E)", "C"}}, "A", "C", true, {}},
      {"existential on the right", {{"A", "(some r B)"}}, "A", "(some r B)", true, {}},
      {"wrong filler", {{"A", "(some r B)"}}, "A", "(some r C)", false,
       interp({0, 1}, {{"A", {0}}, {"B", {1}}}, {{"r", {{0, 1}}}})},
      {"top subsumes everything", {}, "A", "top", true, {}},
      {"conjunction elimination", {}, "(and A B)", "A", true, {}},
      {"reflexivity", {}, "A", "A", true, {}},
      {"existential of anything", {}, "(some r A)", "(some r top)", true, {}},
      {"existential monotone in the filler", {{"A", "B"}}, "(some r A)", "(some r B)", true, {}},
      {"top on the left", {{"top", "A"}}, "B", "A", true, {}},
      {"conjunction introduction", {{"A", "B"}, {"A", "C"}}, "A", "(and B C)", true, {}},
      {"existential left with richer filler", {{"(some r A)", "B"}}, "(some r (and A C))", "B", true, {}},
      {"domain restriction via top filler", {{"(some r top)", "B"}, {"A", "(some r C)"}}, "A", "B", true, {}},
      {"nested right-hand side", {{"A", "(and B (some r C))"}, {"C", "E"}}, "A", "(some r E)", true, {}},
      {"cyclic existential", {{"A", "(some r A)"}}, "A", "(some r (some r A))", true, {}},
      {"existential feeding back", {{"(some r A)", "A"}, {"B", "(some r A)"}}, "B", "A", true, {}},
      {"roles are not interchangeable", {{"A", "B"}}, "(some s A)", "(some r B)", false,
       interp({0, 1}, {{"A", {1}}, {"B", {1}}}, {{"s", {{0, 1}}}})},
      {"conjunction of told subsumers", {{"(and A B)", "C"}, {"E", "A"}, {"E", "B"}}, "E", "C", true, {}},
      {"partial filler does not fire", {{"(some r (and A B))", "C"}, {"E", "(some r A)"}}, "E", "C", false,
       interp({0, 1}, {{"E", {0}}, {"A", {1}}}, {{"r", {{0, 1}}}})},
      {"world 1101 reaches Distance",
       {{"Subject", "Infectious"}, {"Subject", "Control"}, {"Control", "Distance"}}, "Subject", "Distance", true, {}},
      {"world 1101 misses Benefits",
       {{"Subject", "Infectious"}, {"Subject", "Control"}, {"Control", "Distance"}}, "Subject", "Benefits", false,
       interp({0}, {{"Subject", {0}}, {"Infectious", {0}}, {"Control", {0}}, {"Distance", {0}}})},
      {"world 1100 reaches Benefits",
       {{"Subject", "Infectious"}, {"Subject", "Control"}, {"Control", "Distance"}, {"Control", "Benefits"}},
       "Subject", "Benefits", true, {}},
      {"world 0010 reaches Safe only", {{"Control", "Benefits"}, {"Subject", "Safe"}}, "Subject", "Benefits", false,
       interp({0}, {{"Subject", {0}}, {"Safe", {0}}})},
  };
}

}  // namespace idel::testing
