#pragma once

/// @file
/// Game-tree expansion of an influence diagram against nature, and the
/// sequence-form quantities built on it: realization plans, the cost
/// matrix, the reduced objective and the realization constraints.
///
/// Player 1 owns the decision nodes, Player 2 (nature) the chance nodes.
/// Information sets are singletons (perfect information), so every Player-1
/// node is its own information set and a Player-1 sequence is identified by
/// its last (node, move) pair.

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "idel/diagram.hpp"
#include "idel/simplex.hpp"

namespace idel {

enum class Player { One, Two };

struct TreeNode {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool leaf = false;
  Player owner = Player::Two;
  std::size_t variable = kNone;
  /// Chance nodes: P(variable = true | path).
  double prob_true = 0.0;
  std::array<std::size_t, 2> child{kNone, kNone};
  /// Sequence ids of the moves "false" and "true" out of this node.
  std::array<std::size_t, 2> move_seq{kNone, kNone};
  /// Player-1 information-set id (Player-1 nodes only).
  std::size_t infoset = kNone;
  /// Player-1 and Player-2 sequences that reach this node.
  std::size_t seq1 = 0;
  std::size_t seq2 = 0;
  /// Values of the variables expanded above this node.
  Valuation path;
  /// Product of chance probabilities on the path.
  double chance_weight = 1.0;
  /// Leaves only.
  double cost = 0.0;
};

/// A sequence is its parent sequence extended by one move; id 0 is empty.
struct Sequence {
  std::size_t parent = TreeNode::kNone;
  std::size_t node = TreeNode::kNone;
  bool value = false;
};

struct GameTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<std::size_t> order;
  std::vector<Sequence> seq1{Sequence{}};
  std::vector<Sequence> seq2{Sequence{}};
  std::vector<std::size_t> infosets;  // Player-1 node per information set
  std::vector<std::size_t> leaves;

  std::size_t variable_count() const { return order.size(); }
};

namespace detail {

inline std::size_t expand(const InfluenceDiagram& d, GameTree& t, std::size_t depth, Valuation path, double weight,
                          std::size_t s1, std::size_t s2) {
  const std::size_t id = t.nodes.size();
  t.nodes.emplace_back();
  {
    TreeNode& node = t.nodes.back();
    node.path = path;
    node.chance_weight = weight;
    node.seq1 = s1;
    node.seq2 = s2;
  }
  if (depth == t.order.size()) {
    t.nodes[id].leaf = true;
    t.nodes[id].cost = cost_of_valuation(d, path);
    t.leaves.push_back(id);
    return id;
  }
  const std::size_t v = t.order[depth];
  const auto& var = d.variables[v];
  t.nodes[id].variable = v;
  if (var.kind == NodeKind::Decision) {
    t.nodes[id].owner = Player::One;
    t.nodes[id].infoset = t.infosets.size();
    t.infosets.push_back(id);
    for (int value = 0; value < 2; ++value) {
      t.seq1.push_back({s1, id, value == 1});
      t.nodes[id].move_seq[value] = t.seq1.size() - 1;
    }
  } else {
    t.nodes[id].owner = Player::Two;
    t.nodes[id].prob_true = var.cpt[row_index(var.parents, path)];
    for (int value = 0; value < 2; ++value) {
      t.seq2.push_back({s2, id, value == 1});
      t.nodes[id].move_seq[value] = t.seq2.size() - 1;
    }
  }
  for (int value = 0; value < 2; ++value) {
    Valuation next = path;
    next.set(v, value == 1);
    const TreeNode& node = t.nodes[id];
    const bool p1 = node.owner == Player::One;
    const double factor = p1 ? 1.0 : (value == 1 ? node.prob_true : 1.0 - node.prob_true);
    const std::size_t next_s1 = p1 ? node.move_seq[value] : s1;
    const std::size_t next_s2 = p1 ? s2 : node.move_seq[value];
    const std::size_t c = expand(d, t, depth + 1, next, weight * factor, next_s1, next_s2);
    t.nodes[id].child[value] = c;
  }
  return id;
}

}  // namespace detail

/// Expands the variables in topological order (declaration order breaks
/// ties); chance branches carry their CPT row probabilities and leaves the
/// cost of the completed valuation. Requires a valid diagram.
inline GameTree build_game_tree(const InfluenceDiagram& d) {
  if (d.size() > 24) throw CapExceeded("game tree over " + std::to_string(d.size()) + " variables is too large");
  GameTree t;
  t.order = topological_order(d);
  t.nodes.reserve(std::size_t{2} << d.size());
  detail::expand(d, t, 0, Valuation{}, 1.0, 0, 0);
  return t;
}

/// μ₂: realization probability of every nature sequence.
inline std::vector<double> chance_plan(const GameTree& t) {
  std::vector<double> mu(t.seq2.size(), 0.0);
  mu[0] = 1.0;
  for (std::size_t s = 1; s < t.seq2.size(); ++s) {
    const TreeNode& n = t.nodes[t.seq2[s].node];
    mu[s] = mu[t.seq2[s].parent] * (t.seq2[s].value ? n.prob_true : 1.0 - n.prob_true);
  }
  return mu;
}

struct CostEntry {
  std::size_t seq1;
  std::size_t seq2;
  double cost;
};

/// Sparse |S₁|×|S₂| cost matrix: one entry per leaf.
inline std::vector<CostEntry> cost_matrix(const GameTree& t) {
  std::vector<CostEntry> out;
  out.reserve(t.leaves.size());
  for (std::size_t l : t.leaves) out.push_back({t.nodes[l].seq1, t.nodes[l].seq2, t.nodes[l].cost});
  return out;
}

/// a = C μ₂, so that the expected cost of a plan μ₁ is aᵀμ₁.
inline std::vector<double> reduced_objective(const GameTree& t) {
  const auto mu2 = chance_plan(t);
  std::vector<double> a(t.seq1.size(), 0.0);
  for (const auto& e : cost_matrix(t)) a[e.seq1] += e.cost * mu2[e.seq2];
  return a;
}

struct RealizationConstraints {
  std::vector<std::vector<double>> matrix;  // (|H₁|+1) × |S₁|
  std::vector<double> rhs;
};

/// Row 0 pins the empty sequence to 1; row h+1 states that the flow into
/// information set h equals the sum over its outgoing moves.
inline RealizationConstraints realization_constraints(const GameTree& t) {
  RealizationConstraints rc;
  const std::size_t cols = t.seq1.size();
  rc.matrix.assign(t.infosets.size() + 1, std::vector<double>(cols, 0.0));
  rc.rhs.assign(t.infosets.size() + 1, 0.0);
  rc.matrix[0][0] = 1.0;
  rc.rhs[0] = 1.0;
  for (std::size_t h = 0; h < t.infosets.size(); ++h) {
    const TreeNode& n = t.nodes[t.infosets[h]];
    rc.matrix[h + 1][n.seq1] -= 1.0;
    rc.matrix[h + 1][n.move_seq[0]] += 1.0;
    rc.matrix[h + 1][n.move_seq[1]] += 1.0;
  }
  return rc;
}

/// Per information set: probability of choosing "true".
using BehaviourStrategy = std::vector<double>;

/// Realization plan induced by an ID strategy: each Player-1 node plays
/// its local strategy evaluated on the node's path.
inline std::vector<double> plan_from_strategy(const GameTree& t, const GlobalStrategy& s) {
  std::vector<double> mu(t.seq1.size(), 0.0);
  mu[0] = 1.0;
  for (std::size_t s1 = 1; s1 < t.seq1.size(); ++s1) {
    const Sequence& q = t.seq1[s1];
    const TreeNode& n = t.nodes[q.node];
    const double p = s.at(n.variable).probability_true(n.path);
    mu[s1] = mu[q.parent] * (q.value ? p : 1.0 - p);
  }
  return mu;
}

/// β(ω) = μ(σω)/μ(σ); unreached nodes (0/0) play uniformly.
inline BehaviourStrategy behaviour_from_plan(const GameTree& t, const std::vector<double>& mu) {
  BehaviourStrategy beta(t.infosets.size(), 0.5);
  for (std::size_t h = 0; h < t.infosets.size(); ++h) {
    const TreeNode& n = t.nodes[t.infosets[h]];
    const double in = mu[n.seq1];
    const double yes = std::max(0.0, mu[n.move_seq[1]]);
    const double no = std::max(0.0, mu[n.move_seq[0]]);
    if (in > kPivotTolerance && yes + no > 0.0) beta[h] = std::clamp(yes / (yes + no), 0.0, 1.0);
  }
  return beta;
}

inline std::vector<double> plan_from_behaviour(const GameTree& t, const BehaviourStrategy& beta) {
  std::vector<double> mu(t.seq1.size(), 0.0);
  mu[0] = 1.0;
  for (std::size_t s1 = 1; s1 < t.seq1.size(); ++s1) {
    const Sequence& q = t.seq1[s1];
    const double p = beta[t.nodes[q.node].infoset];
    mu[s1] = mu[q.parent] * (q.value ? p : 1.0 - p);
  }
  return mu;
}

/// Σ_ℓ c(ℓ)·β₁(ℓ)·β₂(ℓ) evaluated leaf by leaf.
inline double evaluate_plan(const GameTree& t, const std::vector<double>& mu1) {
  CompensatedSum sum;
  for (std::size_t l : t.leaves) {
    const TreeNode& n = t.nodes[l];
    sum.add(n.cost * n.chance_weight * mu1[n.seq1]);
  }
  return sum.value();
}

/// Graphviz rendering: Player-1 nodes as boxes, nature as circles, leaves
/// as diamonds labelled with their cost.
inline std::string to_dot(const InfluenceDiagram& d, const GameTree& t) {
  auto num = [](double x) {
    std::ostringstream os;
    os.precision(9);
    os << x;
    return os.str();
  };
  std::ostringstream os;
  os << "digraph game_tree {\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const TreeNode& n = t.nodes[i];
    if (n.leaf) {
      os << "  n" << i << " [shape=diamond, label=\"cost=" << num(n.cost) << "\"];\n";
      continue;
    }
    os << "  n" << i << " [shape=" << (n.owner == Player::One ? "box" : "circle") << ", label=\""
       << d.variables[n.variable].name << "\"];\n";
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const TreeNode& n = t.nodes[i];
    if (n.leaf) continue;
    for (int value = 1; value >= 0; --value) {
      os << "  n" << i << " -> n" << n.child[value] << " [label=\"" << d.variables[n.variable].name << "=" << value;
      if (n.owner == Player::Two) os << " (" << num(value == 1 ? n.prob_true : 1.0 - n.prob_true) << ")";
      os << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace idel
