#pragma once

/// @file
/// Strategy optimization: exhaustive search over pure strategies for the
/// expected-cost and evidence-conditioned objectives, threshold decisions,
/// and optimal mixed strategies through the sequence-form linear program.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idel/contextual.hpp"
#include "idel/diagram.hpp"
#include "idel/errors.hpp"
#include "idel/evidence.hpp"
#include "idel/game_tree.hpp"
#include "idel/simplex.hpp"

namespace idel {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// Boolean choice per influence-set row, per decision node.
struct PureStrategy {
  std::vector<std::size_t> decisions;
  std::vector<std::vector<std::size_t>> scopes;
  std::vector<std::vector<bool>> choices;

  GlobalStrategy to_global() const {
    GlobalStrategy s;
    for (std::size_t k = 0; k < decisions.size(); ++k) {
      LocalStrategy ls{decisions[k], scopes[k], {}};
      for (bool b : choices[k]) ls.table.push_back(b ? 1.0 : 0.0);
      s.locals.emplace(decisions[k], std::move(ls));
    }
    return s;
  }
};

/// Lexicographic enumeration of all pure strategies: table entries of all
/// decisions (declared order, rows in key order) form one binary word whose
/// first entry is the most significant digit; false precedes true.
class PureStrategyEnumerator {
 public:
  PureStrategyEnumerator(const InfluenceDiagram& d, std::uint64_t cap = kDefaultEnumerationCap) {
    std::size_t bits = 0;
    for (std::size_t dec : d.decisions()) {
      prototype_.decisions.push_back(dec);
      prototype_.scopes.push_back(influence_set(d, dec));
      const std::size_t scope = prototype_.scopes.back().size();
      if (scope >= 63) throw CapExceeded("influence set of " + d.variables[dec].name + " is too large to enumerate");
      const std::size_t rows = std::size_t{1} << scope;
      prototype_.choices.emplace_back(rows, false);
      bits += rows;
    }
    bits_ = bits;
    if (bits >= 64 || (std::uint64_t{1} << bits) > cap) {
      throw CapExceeded("pure-strategy enumeration needs 2^" + std::to_string(bits) +
                        " strategies, above the cap of " + std::to_string(cap));
    }
    count_ = std::uint64_t{1} << bits;
  }

  std::uint64_t count() const { return count_; }

  PureStrategy at(std::uint64_t index) const {
    PureStrategy s = prototype_;
    std::size_t pos = 0;
    for (auto& table : s.choices) {
      for (std::size_t r = 0; r < table.size(); ++r, ++pos) table[r] = (index >> (bits_ - 1 - pos)) & 1U;
    }
    return s;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::uint64_t k = 0; k < count_; ++k) f(at(k));
  }

 private:
  PureStrategy prototype_;
  std::size_t bits_ = 0;
  std::uint64_t count_ = 0;
};

enum class ObjectiveKind { Expected, DominantOptimistic, DominantPessimistic };
enum class Direction { Min, Max };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::Expected;
  std::optional<EvidenceQuery> evidence;

  static Objective expected() { return {}; }
  static Objective dominant_optimistic(EvidenceQuery q) { return {ObjectiveKind::DominantOptimistic, std::move(q)}; }
  static Objective dominant_pessimistic(EvidenceQuery q) { return {ObjectiveKind::DominantPessimistic, std::move(q)}; }
};

enum class StrategyKind { Pure, Mixed };

struct OptimizationResult {
  double value = 0.0;
  StrategyKind kind = StrategyKind::Pure;
  /// Behaviour strategy in ID form. Absent for an LP optimum whose
  /// behaviour depends on more than the influence sets.
  std::optional<GlobalStrategy> strategy;
  /// LP certificate: realization plan and per-information-set behaviour.
  std::vector<double> realization_plan;
  BehaviourStrategy behaviour;
  /// Lower bound used for a fully-mixed solve (0 otherwise).
  double epsilon = 0.0;
};

/// Best pure strategy for the objective; ties keep the earliest strategy
/// in enumeration order.
inline OptimizationResult optimal_pure_strategy(const KnowledgeBase& kb, const Objective& objective,
                                                Direction direction,
                                                std::uint64_t cap = kDefaultEnumerationCap, unsigned threads = 1) {
  const PureStrategyEnumerator all(kb.diagram, cap);
  std::vector<char> forced;
  if (objective.kind != ObjectiveKind::Expected) {
    if (!objective.evidence) throw std::invalid_argument("dominant objectives need an evidence query");
    forced = forced_worlds(kb, *objective.evidence, threads);
  }
  const std::size_t n = kb.diagram.size();
  std::optional<OptimizationResult> best;
  all.for_each([&](const PureStrategy& ps) {
    GlobalStrategy s = ps.to_global();
    double value = 0.0;
    try {
      switch (objective.kind) {
        case ObjectiveKind::Expected: value = expected_cost(kb.diagram, s); break;
        case ObjectiveKind::DominantOptimistic:
          value = optimistic_expected_cost(classify_worlds(kb, s, forced), n).value;
          break;
        case ObjectiveKind::DominantPessimistic:
          value = pessimistic_expected_cost(classify_worlds(kb, s, forced), n).value;
          break;
      }
    } catch (const UndefinedConditional&) {
      return;
    }
    const bool better = !best || (direction == Direction::Min ? value < best->value : value > best->value);
    if (better) {
      best = OptimizationResult{};
      best->value = value;
      best->strategy = std::move(s);
    }
  });
  if (!best) throw UndefinedConditional("evidence has zero probability under every pure strategy");
  return *best;
}

enum class ThresholdProblem { DOpt, DPes, DDomOpt, DDomPes };

/// D-Pes asks for a value strictly above b; the others strictly below.
inline bool decide_threshold(const OptimizationResult& result, double b, ThresholdProblem problem) {
  return problem == ThresholdProblem::DPes ? result.value > b : result.value < b;
}

/// The sequence-form LP  min aᵀμ₁  s.t.  Rμ₁ = r,  μ₁ ≥ lower.
inline LinearProgram sequence_form_lp(const GameTree& t, double lower_bound = 0.0) {
  LinearProgram lp;
  lp.objective = reduced_objective(t);
  auto rc = realization_constraints(t);
  lp.constraints = std::move(rc.matrix);
  lp.rhs = std::move(rc.rhs);
  lp.lower_bound = lower_bound;
  lp.unbounded_below_exempt.assign(t.seq1.size(), false);
  lp.unbounded_below_exempt[0] = true;
  return lp;
}

/// ID strategy equivalent to a tree behaviour, if every reachable node of a
/// decision that shares an influence-set row plays the same mix.
inline std::optional<GlobalStrategy> project_behaviour(const InfluenceDiagram& d, const GameTree& t,
                                                       const BehaviourStrategy& beta, const std::vector<double>& mu1) {
  GlobalStrategy s;
  std::map<std::size_t, std::vector<std::optional<double>>> seen;
  for (std::size_t dec : d.decisions()) {
    LocalStrategy ls{dec, influence_set(d, dec), {}};
    ls.table.assign(std::size_t{1} << ls.scope.size(), 0.5);
    seen[dec].assign(ls.table.size(), std::nullopt);
    s.locals.emplace(dec, std::move(ls));
  }
  for (std::size_t h = 0; h < t.infosets.size(); ++h) {
    const TreeNode& n = t.nodes[t.infosets[h]];
    if (n.chance_weight * mu1[n.seq1] <= kPivotTolerance) continue;
    auto& ls = s.locals.at(n.variable);
    const std::size_t row = row_index(ls.scope, n.path);
    auto& slot = seen[n.variable][row];
    if (slot && std::abs(*slot - beta[h]) > 1e-9) return std::nullopt;
    slot = beta[h];
    ls.table[row] = beta[h];
  }
  return s;
}

/// Optimal (possibly mixed) strategy from the sequence-form LP. With
/// `fully_mixed` set, every Player-1 sequence is bounded below by ε.
inline OptimizationResult optimal_mixed_strategy(const KnowledgeBase& kb, std::optional<double> fully_mixed = {}) {
  const double eps = fully_mixed.value_or(0.0);
  if (fully_mixed && !(eps > 0.0)) throw std::invalid_argument("fully-mixed epsilon must be positive");
  const GameTree t = build_game_tree(kb.diagram);
  LpSolution sol;
  try {
    sol = solve_lp(sequence_form_lp(t, eps));
  } catch (const InfeasibleEpsilon& e) {
    throw InfeasibleEpsilon("epsilon " + std::to_string(eps) + " exceeds the available flow: " + e.what());
  }
  OptimizationResult r;
  r.kind = StrategyKind::Mixed;
  r.value = sol.value;
  r.realization_plan = std::move(sol.x);
  r.behaviour = behaviour_from_plan(t, r.realization_plan);
  r.strategy = project_behaviour(kb.diagram, t, r.behaviour, r.realization_plan);
  r.epsilon = eps;
  return r;
}

}  // namespace idel
