#pragma once

/// @file
/// Expected cost conditioned on an observed subsumption, and its
/// optimistic (infimum) and pessimistic (supremum) values over all models.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "idel/contextual.hpp"
#include "idel/diagram.hpp"
#include "idel/el.hpp"
#include "idel/errors.hpp"

namespace idel {

/// Observed subsumption lhs ⊑ rhs (context implicitly true).
struct EvidenceQuery {
  Concept lhs;
  Concept rhs;
};

struct Outcome {
  double probability;
  double cost;
};

/// (Σ p·c) / (Σ p). Throws UndefinedConditional on zero total mass.
inline double conditional_expectation(const std::vector<Outcome>& outcomes) {
  CompensatedSum mass, weighted;
  for (const auto& o : outcomes) {
    mass.add(o.probability);
    weighted.add(o.probability * o.cost);
  }
  if (!(mass.value() > 0.0)) throw UndefinedConditional("conditioning event has zero probability");
  return weighted.value() / mass.value();
}

enum class WorldStatus { Forced, Optional };

struct ClassifiedWorld {
  Valuation valuation;
  WorldStatus status;
  double probability;
  double cost;
};

/// Per-world forced/optional split, in enumeration order. A world is forced
/// when every model must satisfy the evidence there.
struct WorldClassification {
  std::vector<ClassifiedWorld> worlds;
};

/// Which worlds entail the query; independent of the strategy, so it can be
/// shared across strategy evaluations.
inline std::vector<char> forced_worlds(const KnowledgeBase& kb, const EvidenceQuery& q, unsigned threads = 1) {
  return entailment_by_world(kb, q.lhs, q.rhs, [](const Valuation&) { return false; }, threads);
}

inline WorldClassification classify_worlds(const KnowledgeBase& kb, const GlobalStrategy& s,
                                           const std::vector<char>& forced) {
  WorldClassification out;
  const std::size_t n = kb.diagram.size();
  for (std::uint64_t r = 0; r < kb.diagram.world_count(); ++r) {
    const Valuation w = Valuation::from_rank(r, n);
    out.worlds.push_back({w, forced.at(r) ? WorldStatus::Forced : WorldStatus::Optional,
                          joint_probability(kb.diagram, s, w), cost_of_valuation(kb.diagram, w)});
  }
  return out;
}

inline WorldClassification classify_worlds(const KnowledgeBase& kb, const GlobalStrategy& s, const EvidenceQuery& q,
                                           unsigned threads = 1) {
  return classify_worlds(kb, s, forced_worlds(kb, q, threads));
}

struct ConditionalCostResult {
  double value = 0.0;
  std::vector<Valuation> included_worlds;  // enumeration order
  double evidence_probability = 0.0;
};

namespace detail {

enum class Direction { Lower, Upper };

// All positive-mass forced worlds are included. Optional worlds are visited
// cheapest first (lower) or dearest first (upper), ties by rank, and kept
// while they strictly improve the running average.
inline ConditionalCostResult greedy_bound(const WorldClassification& wc, std::size_t n, Direction dir) {
  CompensatedSum mass, weighted;
  std::vector<const ClassifiedWorld*> included, optional;
  for (const auto& w : wc.worlds) {
    if (w.probability <= 0.0) continue;
    if (w.status == WorldStatus::Forced) {
      mass.add(w.probability);
      weighted.add(w.probability * w.cost);
      included.push_back(&w);
    } else {
      optional.push_back(&w);
    }
  }
  if (included.empty() && optional.empty()) {
    throw UndefinedConditional("no world has positive probability");
  }
  std::stable_sort(optional.begin(), optional.end(), [&](const ClassifiedWorld* a, const ClassifiedWorld* b) {
    if (a->cost != b->cost) return dir == Direction::Lower ? a->cost < b->cost : a->cost > b->cost;
    return a->valuation.rank(n) < b->valuation.rank(n);
  });
  for (const ClassifiedWorld* w : optional) {
    const double m = mass.value();
    const bool improves = m <= 0.0 || (dir == Direction::Lower ? w->cost < weighted.value() / m
                                                                : w->cost > weighted.value() / m);
    if (!improves) break;
    mass.add(w->probability);
    weighted.add(w->probability * w->cost);
    included.push_back(w);
  }
  std::sort(included.begin(), included.end(), [&](const ClassifiedWorld* a, const ClassifiedWorld* b) {
    return a->valuation.rank(n) < b->valuation.rank(n);
  });
  ConditionalCostResult out;
  out.value = weighted.value() / mass.value();
  out.evidence_probability = mass.value();
  for (const auto* w : included) out.included_worlds.push_back(w->valuation);
  return out;
}

}  // namespace detail

inline ConditionalCostResult optimistic_expected_cost(const WorldClassification& wc, std::size_t n) {
  return detail::greedy_bound(wc, n, detail::Direction::Lower);
}

inline ConditionalCostResult pessimistic_expected_cost(const WorldClassification& wc, std::size_t n) {
  return detail::greedy_bound(wc, n, detail::Direction::Upper);
}

/// Infimum over models of the expected cost given the evidence.
inline ConditionalCostResult optimistic_expected_cost(const KnowledgeBase& kb, const GlobalStrategy& s,
                                                      const EvidenceQuery& q, unsigned threads = 1) {
  return optimistic_expected_cost(classify_worlds(kb, s, q, threads), kb.diagram.size());
}

/// Supremum over models of the expected cost given the evidence.
inline ConditionalCostResult pessimistic_expected_cost(const KnowledgeBase& kb, const GlobalStrategy& s,
                                                       const EvidenceQuery& q, unsigned threads = 1) {
  return pessimistic_expected_cost(classify_worlds(kb, s, q, threads), kb.diagram.size());
}

inline constexpr std::size_t kBruteForceOptionalLimit = 20;

struct ConditionalBounds {
  double inf;
  double sup;
};

/// Exact min/max of the conditional expectation over every subset of the
/// positive-mass optional worlds joined with the forced worlds. Test oracle;
/// refuses more than kBruteForceOptionalLimit optional worlds.
inline ConditionalBounds brute_force_conditional_bounds(const WorldClassification& wc) {
  std::vector<Outcome> forced, optional;
  for (const auto& w : wc.worlds) {
    if (w.probability <= 0.0) continue;
    (w.status == WorldStatus::Forced ? forced : optional).push_back({w.probability, w.cost});
  }
  if (optional.size() > kBruteForceOptionalLimit) {
    throw CapExceeded("brute-force oracle refuses " + std::to_string(optional.size()) + " optional worlds");
  }
  ConditionalBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << optional.size()); ++mask) {
    std::vector<Outcome> chosen = forced;
    for (std::size_t i = 0; i < optional.size(); ++i) {
      if ((mask >> i) & 1U) chosen.push_back(optional[i]);
    }
    if (chosen.empty()) continue;
    const double v = conditional_expectation(chosen);
    b.inf = std::min(b.inf, v);
    b.sup = std::max(b.sup, v);
    any = true;
  }
  if (!any) throw UndefinedConditional("no world has positive probability");
  return b;
}

inline ConditionalBounds brute_force_conditional_bounds(const KnowledgeBase& kb, const GlobalStrategy& s,
                                                        const EvidenceQuery& q) {
  return brute_force_conditional_bounds(classify_worlds(kb, s, q));
}

/// Conditional expected cost in one explicit model, with per-entry costs.
inline double conditional_expected_cost_in_model(const ProbabilisticInterpretation& pi,
                                                  const std::vector<double>& entry_costs, const Concept& c,
                                                  const Concept& d) {
  std::vector<Outcome> kept;
  for (std::size_t i = 0; i < pi.entries.size(); ++i) {
    if (check_gci_on_interpretation(pi.entries[i].interp, {c, d})) {
      kept.push_back({pi.entries[i].weight, entry_costs.at(i)});
    }
  }
  return conditional_expectation(kept);
}

}  // namespace idel
