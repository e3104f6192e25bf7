#pragma once

/// @file
/// Influence diagrams over Boolean variables with a single cost node,
/// strategies on their decision nodes, and exact evaluation by world
/// enumeration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace idel {

inline constexpr double kProbabilityTolerance = 1e-9;

enum class NodeKind { Chance, Decision };

/// Total Boolean assignment; variable i is stored at bit i.
struct Valuation {
  std::uint64_t bits = 0;

  bool operator[](std::size_t var) const { return (bits >> var) & 1U; }
  void set(std::size_t var, bool value) {
    if (value) {
      bits |= (std::uint64_t{1} << var);
    } else {
      bits &= ~(std::uint64_t{1} << var);
    }
  }

  /// Position in enumeration order: the first declared variable is the
  /// most significant digit, so ranks follow lexicographic bitstrings.
  std::uint64_t rank(std::size_t n) const {
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < n; ++i) r = (r << 1) | ((bits >> i) & 1U);
    return r;
  }
  static Valuation from_rank(std::uint64_t rank, std::size_t n) {
    Valuation w;
    for (std::size_t i = 0; i < n; ++i) w.set(i, (rank >> (n - 1 - i)) & 1U);
    return w;
  }

  std::string bitstring(std::size_t n) const {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) s[i] = (*this)[i] ? '1' : '0';
    return s;
  }
  static Valuation from_bitstring(const std::string& s) {
    Valuation w;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("bad valuation bitstring '" + s + "'");
      w.set(i, s[i] == '1');
    }
    return w;
  }

  friend bool operator==(const Valuation&, const Valuation&) = default;
};

/// Index of a row in a table over `scope`: the values of the scope
/// variables read as a binary number, first variable most significant.
inline std::size_t row_index(const std::vector<std::size_t>& scope, const Valuation& w) {
  std::size_t row = 0;
  for (std::size_t v : scope) row = (row << 1) | (w[v] ? 1U : 0U);
  return row;
}

inline std::string row_key(std::size_t row, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t i = 0; i < width; ++i) s[width - 1 - i] = ((row >> i) & 1U) ? '1' : '0';
  return s;
}

inline std::size_t parse_row_key(const std::string& key, std::size_t width) {
  if (key.size() != width) {
    throw std::invalid_argument("row key '" + key + "' has width " + std::to_string(key.size()) +
                                ", expected " + std::to_string(width));
  }
  std::size_t row = 0;
  for (char c : key) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad row key '" + key + "'");
    row = (row << 1) | (c == '1' ? 1U : 0U);
  }
  return row;
}

struct Variable {
  std::string name;
  NodeKind kind = NodeKind::Chance;
  /// Parent node indices; index == variable count denotes the cost node.
  std::vector<std::size_t> parents;
  /// P(v = true | parent row) for chance nodes; empty for decisions.
  std::vector<double> cpt;
};

struct Violation {
  std::string node;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

class InfluenceDiagram {
 public:
  std::vector<Variable> variables;
  std::string cost_name = "c";
  std::vector<std::size_t> cost_parents;
  std::vector<double> cost_table;
  /// Local strategies condition on π(d) instead of infl(d).
  bool forgetful = false;

  std::size_t size() const { return variables.size(); }
  std::size_t cost_node() const { return variables.size(); }
  std::uint64_t world_count() const { return std::uint64_t{1} << variables.size(); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i].name == name) return i;
    }
    return std::nullopt;
  }
  std::size_t require(const std::string& name) const {
    if (auto i = index_of(name)) return *i;
    throw std::invalid_argument("unknown variable '" + name + "'");
  }

  const std::string& node_name(std::size_t i) const {
    return i == cost_node() ? cost_name : variables.at(i).name;
  }

  std::vector<std::size_t> decisions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i].kind == NodeKind::Decision) out.push_back(i);
    }
    return out;
  }

  /// val(c): the distinct values of the cost table.
  std::set<double> cost_values() const { return {cost_table.begin(), cost_table.end()}; }

  /// Builder helpers. Parent names must already be declared.
  std::size_t add_chance(std::string name, std::vector<std::string> parent_names, std::vector<double> cpt) {
    return add(std::move(name), NodeKind::Chance, parent_names, std::move(cpt));
  }
  std::size_t add_decision(std::string name, std::vector<std::string> parent_names) {
    return add(std::move(name), NodeKind::Decision, parent_names, {});
  }
  void set_cost(const std::vector<std::string>& parent_names, std::vector<double> table) {
    cost_parents.clear();
    for (const auto& p : parent_names) cost_parents.push_back(require(p));
    cost_table = std::move(table);
  }

 private:
  std::size_t add(std::string name, NodeKind kind, const std::vector<std::string>& parent_names,
                  std::vector<double> cpt) {
    Variable v{std::move(name), kind, {}, std::move(cpt)};
    for (const auto& p : parent_names) v.parents.push_back(require(p));
    variables.push_back(std::move(v));
    return variables.size() - 1;
  }
};

/// Every violated structural invariant, each naming the offending node.
inline std::vector<Violation> validate(const InfluenceDiagram& d) {
  std::vector<Violation> out;
  const std::size_t n = d.size();

  std::set<std::string> seen;
  for (const auto& v : d.variables) {
    if (!seen.insert(v.name).second) out.push_back({v.name, "duplicate variable name"});
    if (v.name == d.cost_name) out.push_back({v.name, "variable shares the cost node name"});
  }
  if (n > 62) out.push_back({"", "too many variables for world enumeration"});

  for (const auto& v : d.variables) {
    std::set<std::size_t> ps;
    for (std::size_t p : v.parents) {
      if (p > n) {
        out.push_back({v.name, "parent index out of range"});
      } else if (p == n) {
        out.push_back({d.cost_name, "cost node has outgoing edge to " + v.name});
      }
      if (!ps.insert(p).second) out.push_back({v.name, "duplicate parent"});
    }
    if (v.kind == NodeKind::Decision) {
      if (!v.cpt.empty()) out.push_back({v.name, "decision node has a CPT"});
      continue;
    }
    if (v.parents.size() < 63 && v.cpt.size() != (std::size_t{1} << v.parents.size())) {
      out.push_back({v.name, "incomplete CPT: expected " + std::to_string(std::size_t{1} << v.parents.size()) +
                                 " rows, found " + std::to_string(v.cpt.size())});
    }
    for (std::size_t r = 0; r < v.cpt.size(); ++r) {
      const double p = v.cpt[r];
      if (std::isnan(p)) {
        out.push_back({v.name, "missing CPT row " + row_key(r, v.parents.size())});
      } else if (!(p >= 0.0 && p <= 1.0)) {
        out.push_back({v.name, "probability out of range in row " + row_key(r, v.parents.size())});
      }
    }
  }

  std::set<std::size_t> cps;
  for (std::size_t p : d.cost_parents) {
    if (p >= n) out.push_back({d.cost_name, "cost parent index out of range"});
    if (!cps.insert(p).second) out.push_back({d.cost_name, "duplicate cost parent"});
  }
  if (d.cost_parents.size() < 63 && d.cost_table.size() != (std::size_t{1} << d.cost_parents.size())) {
    out.push_back({d.cost_name, "cost table is not total over its parents"});
  }
  for (std::size_t r = 0; r < d.cost_table.size(); ++r) {
    if (std::isnan(d.cost_table[r])) {
      out.push_back({d.cost_name, "missing cost row " + row_key(r, d.cost_parents.size())});
    } else if (!std::isfinite(d.cost_table[r])) {
      out.push_back({d.cost_name, "non-finite cost"});
    }
  }

  // Cycle detection over V ∪ {c} by iterative DFS colouring.
  std::vector<std::vector<std::size_t>> parents(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p : d.variables[i].parents) {
      if (p <= n) parents[i].push_back(p);
    }
  }
  for (std::size_t p : d.cost_parents) {
    if (p < n) parents[n].push_back(p);
  }
  std::vector<int> colour(n + 1, 0);
  std::set<std::size_t> on_cycle;
  for (std::size_t s = 0; s <= n; ++s) {
    if (colour[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    colour[s] = 1;
    while (!stack.empty()) {
      auto& [u, k] = stack.back();
      if (k < parents[u].size()) {
        const std::size_t p = parents[u][k++];
        if (colour[p] == 1) {
          on_cycle.insert(p);
        } else if (colour[p] == 0) {
          colour[p] = 1;
          stack.emplace_back(p, 0);
        }
      } else {
        colour[u] = 2;
        stack.pop_back();
      }
    }
  }
  for (std::size_t v : on_cycle) out.push_back({d.node_name(v), "parent graph has a cycle through this node"});
  return out;
}

/// Variables in a fixed topological order, ties broken by declaration.
/// Requires an acyclic diagram.
inline std::vector<std::size_t> topological_order(const InfluenceDiagram& d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p : d.variables[i].parents) {
      if (p < n) {
        ++indegree[i];
        children[p].push_back(i);
      }
    }
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t u = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(u);
    for (std::size_t c : children[u]) {
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  if (order.size() != n) throw std::invalid_argument("diagram has a cycle");
  return order;
}

/// infl(d) = decision ancestors of d together with its parents, in declared
/// variable order. With `forgetful` set only the parents are kept.
inline std::vector<std::size_t> influence_set(const InfluenceDiagram& d, std::size_t dec) {
  if (dec >= d.size() || d.variables[dec].kind != NodeKind::Decision) {
    throw std::invalid_argument("influence set requested for a non-decision node");
  }
  std::set<std::size_t> out(d.variables[dec].parents.begin(), d.variables[dec].parents.end());
  if (!d.forgetful) {
    std::set<std::size_t> visited;
    std::vector<std::size_t> stack(d.variables[dec].parents.begin(), d.variables[dec].parents.end());
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      if (u >= d.size() || !visited.insert(u).second) continue;
      if (d.variables[u].kind == NodeKind::Decision) out.insert(u);
      for (std::size_t p : d.variables[u].parents) stack.push_back(p);
    }
  }
  return {out.begin(), out.end()};
}

/// Conditional table P(decision = true | assignment of scope).
struct LocalStrategy {
  std::size_t decision = 0;
  std::vector<std::size_t> scope;
  std::vector<double> table;

  double probability_true(const Valuation& w) const { return table.at(row_index(scope, w)); }
  bool is_pure() const {
    return std::all_of(table.begin(), table.end(), [](double p) { return p == 0.0 || p == 1.0; });
  }
};

/// One local strategy per decision node, keyed by decision index.
struct GlobalStrategy {
  std::map<std::size_t, LocalStrategy> locals;

  bool is_pure() const {
    return std::all_of(locals.begin(), locals.end(), [](const auto& kv) { return kv.second.is_pure(); });
  }
  const LocalStrategy& at(std::size_t decision) const {
    auto it = locals.find(decision);
    if (it == locals.end()) throw std::invalid_argument("strategy has no table for decision");
    return it->second;
  }
};

/// A local strategy whose table is filled from `choice(row valuation)`.
inline LocalStrategy make_local_strategy(const InfluenceDiagram& d, std::size_t dec,
                                         const std::function<double(const Valuation&)>& choice) {
  LocalStrategy ls{dec, influence_set(d, dec), {}};
  const std::size_t rows = std::size_t{1} << ls.scope.size();
  ls.table.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    Valuation w;
    for (std::size_t k = 0; k < ls.scope.size(); ++k) {
      w.set(ls.scope[k], (r >> (ls.scope.size() - 1 - k)) & 1U);
    }
    ls.table[r] = choice(w);
  }
  return ls;
}

/// Problems with a strategy against a diagram; empty when it is total.
inline std::vector<std::string> check_strategy(const InfluenceDiagram& d, const GlobalStrategy& s) {
  std::vector<std::string> out;
  const auto decs = d.decisions();
  for (std::size_t dec : decs) {
    auto it = s.locals.find(dec);
    if (it == s.locals.end()) {
      out.push_back("missing local strategy for " + d.variables[dec].name);
      continue;
    }
    const auto& ls = it->second;
    if (ls.scope != influence_set(d, dec)) out.push_back("scope mismatch for " + d.variables[dec].name);
    if (ls.table.size() != (std::size_t{1} << ls.scope.size())) {
      out.push_back("local strategy for " + d.variables[dec].name + " is not total");
    }
    for (double p : ls.table) {
      if (!(p >= 0.0 && p <= 1.0)) out.push_back("probability out of range for " + d.variables[dec].name);
    }
  }
  for (const auto& [dec, _] : s.locals) {
    if (std::find(decs.begin(), decs.end(), dec) == decs.end()) out.push_back("strategy covers a non-decision node");
  }
  return out;
}

/// Probability that variable `v` takes its value in `w`, given the rest of
/// `w` as its conditioning context.
inline double local_factor(const InfluenceDiagram& d, const GlobalStrategy& s, std::size_t v, const Valuation& w) {
  const auto& var = d.variables[v];
  const double p_true = var.kind == NodeKind::Chance ? var.cpt[row_index(var.parents, w)]
                                                     : s.at(v).probability_true(w);
  return w[v] ? p_true : 1.0 - p_true;
}

/// Chain rule: the product of every variable's row probability under w.
inline double joint_probability(const InfluenceDiagram& d, const GlobalStrategy& s, const Valuation& w) {
  double p = 1.0;
  for (std::size_t v = 0; v < d.size() && p != 0.0; ++v) p *= local_factor(d, s, v, w);
  return p;
}

inline double cost_of_valuation(const InfluenceDiagram& d, const Valuation& w) {
  return d.cost_table[row_index(d.cost_parents, w)];
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Calls f(w) for every valuation in enumeration order.
template <class F>
void for_each_world(const InfluenceDiagram& d, F&& f) {
  const std::size_t n = d.size();
  for (std::uint64_t r = 0; r < d.world_count(); ++r) f(Valuation::from_rank(r, n));
}

using CostDistribution = std::map<double, double>;

inline CostDistribution cost_distribution(const InfluenceDiagram& d, const GlobalStrategy& s) {
  std::map<double, CompensatedSum> acc;
  for (double r : d.cost_values()) acc[r];
  for_each_world(d, [&](const Valuation& w) { acc[cost_of_valuation(d, w)].add(joint_probability(d, s, w)); });
  CostDistribution out;
  for (const auto& [r, sum] : acc) out[r] = sum.value();
  return out;
}

/// E[D|S] = Σ_r r · P(c = r).
inline double expected_cost(const InfluenceDiagram& d, const GlobalStrategy& s) {
  CompensatedSum e;
  for (const auto& [r, p] : cost_distribution(d, s)) e.add(r * p);
  return e.value();
}

}  // namespace idel
