#pragma once

/// @file
/// Contextual TBoxes over the variables of an influence diagram: context
/// formulas, world restriction, probabilistic interpretations and
/// probabilistic subsumption.

#include <algorithm>
#include <cstddef>
#include <future>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idel/diagram.hpp"
#include "idel/el.hpp"
#include "idel/errors.hpp"
#include "idel/sexpr.hpp"

namespace idel {

/// Propositional formula over diagram variables (referenced by name).
class ContextFormula {
 public:
  enum class Kind { Var, True, False, Not, And, Or };

  ContextFormula() : ContextFormula(truth()) {}

  static ContextFormula truth() { return make(Kind::True, "", {}, {}); }
  static ContextFormula falsity() { return make(Kind::False, "", {}, {}); }
  static ContextFormula var(std::string name) { return make(Kind::Var, std::move(name), {}, {}); }
  static ContextFormula negation(ContextFormula f) { return make(Kind::Not, "", f.node_, {}); }
  static ContextFormula conj(ContextFormula a, ContextFormula b) { return make(Kind::And, "", a.node_, b.node_); }
  static ContextFormula disj(ContextFormula a, ContextFormula b) { return make(Kind::Or, "", a.node_, b.node_); }

  Kind kind() const { return node_->kind; }
  const std::string& variable() const { return node_->name; }
  ContextFormula left() const { return ContextFormula{node_->a}; }
  ContextFormula right() const { return ContextFormula{node_->b}; }

  std::string str() const {
    switch (kind()) {
      case Kind::Var: return variable();
      case Kind::True: return "true";
      case Kind::False: return "false";
      case Kind::Not: return "(not " + left().str() + ")";
      case Kind::And: return "(and " + left().str() + " " + right().str() + ")";
      case Kind::Or: return "(or " + left().str() + " " + right().str() + ")";
    }
    return {};
  }

  void collect_variables(std::set<std::string>& out) const {
    if (kind() == Kind::Var) out.insert(variable());
    if (node_->a) left().collect_variables(out);
    if (node_->b) right().collect_variables(out);
  }

  friend bool operator==(const ContextFormula& a, const ContextFormula& b) { return a.str() == b.str(); }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Node> a, b;
  };
  explicit ContextFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static ContextFormula make(Kind k, std::string name, std::shared_ptr<const Node> a, std::shared_ptr<const Node> b) {
    return ContextFormula{std::make_shared<const Node>(Node{k, std::move(name), std::move(a), std::move(b)})};
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline ContextFormula parse_formula_at(SexprCursor& in) {
  if (in.peek_open()) {
    in.expect('(');
    std::size_t at = 0;
    const std::string op = in.word(at);
    if (op == "not") {
      ContextFormula f = parse_formula_at(in);
      in.expect(')');
      return ContextFormula::negation(std::move(f));
    }
    if (op == "and" || op == "or") {
      ContextFormula a = parse_formula_at(in);
      ContextFormula b = parse_formula_at(in);
      in.expect(')');
      return op == "and" ? ContextFormula::conj(std::move(a), std::move(b))
                         : ContextFormula::disj(std::move(a), std::move(b));
    }
    throw ParseError("unknown connective '" + op + "'", at);
  }
  std::size_t at = 0;
  std::string w = in.word(at);
  if (w == "true") return ContextFormula::truth();
  if (w == "false") return ContextFormula::falsity();
  if (!is_identifier(w)) throw ParseError("invalid variable name '" + w + "'", at);
  return ContextFormula::var(std::move(w));
}

}  // namespace detail

/// Parses `f := NAME | true | false | (not f) | (and f f) | (or f f)`.
inline ContextFormula parse_formula(std::string_view text) {
  detail::SexprCursor in(text);
  ContextFormula f = detail::parse_formula_at(in);
  in.finish();
  return f;
}

/// Truth value of φ under w; variable names resolve against the diagram.
inline bool eval_context(const InfluenceDiagram& d, const Valuation& w, const ContextFormula& f) {
  switch (f.kind()) {
    case ContextFormula::Kind::Var: return w[d.require(f.variable())];
    case ContextFormula::Kind::True: return true;
    case ContextFormula::Kind::False: return false;
    case ContextFormula::Kind::Not: return !eval_context(d, w, f.left());
    case ContextFormula::Kind::And: return eval_context(d, w, f.left()) && eval_context(d, w, f.right());
    case ContextFormula::Kind::Or: return eval_context(d, w, f.left()) || eval_context(d, w, f.right());
  }
  return false;
}

/// ⟨C ⊑ D : φ⟩
struct VGCI {
  GCI gci;
  ContextFormula context;
};

struct KnowledgeBase {
  InfluenceDiagram diagram;
  std::vector<VGCI> vtbox;
};

/// Diagram violations plus context formulas mentioning undeclared variables.
inline std::vector<Violation> validate(const KnowledgeBase& kb) {
  auto out = validate(kb.diagram);
  for (const auto& a : kb.vtbox) {
    std::set<std::string> vars;
    a.context.collect_variables(vars);
    for (const auto& v : vars) {
      if (!kb.diagram.index_of(v)) out.push_back({v, "context of '" + a.gci.str() + "' uses an undeclared variable"});
    }
  }
  return out;
}

/// T_W: the classical TBox of axioms whose context holds in w.
inline TBox restrict(const InfluenceDiagram& d, const std::vector<VGCI>& vtbox, const Valuation& w) {
  TBox out;
  for (const auto& a : vtbox) {
    if (eval_context(d, w, a.context)) out.insert(a.gci);
  }
  return out;
}

inline bool satisfies_vgci(const InfluenceDiagram& d, const FiniteInterpretation& interp, const Valuation& w,
                           const VGCI& a) {
  return !eval_context(d, w, a.context) || check_gci_on_interpretation(interp, a.gci);
}

struct WeightedInterpretation {
  FiniteInterpretation interp;
  Valuation valuation;
  double weight = 0.0;
};

/// Finitely many valuation-tagged interpretations with a distribution.
/// Several entries may share a valuation.
struct ProbabilisticInterpretation {
  std::vector<WeightedInterpretation> entries;

  bool is_distribution() const {
    CompensatedSum total;
    for (const auto& e : entries) {
      if (e.weight < 0.0) return false;
      total.add(e.weight);
    }
    return std::abs(total.value() - 1.0) <= kProbabilityTolerance;
  }
};

/// Every entry satisfies every V-GCI (no consistency requirement).
inline bool is_tbox_model(const ProbabilisticInterpretation& pi, const InfluenceDiagram& d,
                          const std::vector<VGCI>& vtbox) {
  for (const auto& e : pi.entries) {
    for (const auto& a : vtbox) {
      if (!satisfies_vgci(d, e.interp, e.valuation, a)) return false;
    }
  }
  return true;
}

/// Model of the V-TBox whose per-valuation weights equal the joint
/// probability induced by the strategy.
inline bool is_model(const ProbabilisticInterpretation& pi, const KnowledgeBase& kb, const GlobalStrategy& s) {
  if (!pi.is_distribution() || !is_tbox_model(pi, kb.diagram, kb.vtbox)) return false;
  std::map<std::uint64_t, CompensatedSum> mass;
  for (const auto& e : pi.entries) {
    if (e.valuation.bits >> kb.diagram.size()) return false;
    mass[e.valuation.bits].add(e.weight);
  }
  bool ok = true;
  for_each_world(kb.diagram, [&](const Valuation& w) {
    const double expected = joint_probability(kb.diagram, s, w);
    auto it = mass.find(w.bits);
    const double got = it == mass.end() ? 0.0 : it->second.value();
    if (std::abs(got - expected) > kProbabilityTolerance) ok = false;
  });
  return ok;
}

/// The single element belongs to every name in the signature and is
/// connected to itself by every role, so every EL concept holds of it.
inline FiniteInterpretation universal_interpretation(const std::vector<VGCI>& vtbox) {
  std::set<std::string> concepts, roles;
  for (const auto& a : vtbox) {
    a.gci.lhs.collect_names(concepts, roles);
    a.gci.rhs.collect_names(concepts, roles);
  }
  FiniteInterpretation out{{0}, {}, {}};
  for (const auto& c : concepts) out.concept_ext[c] = {0};
  for (const auto& r : roles) out.role_ext[r] = {{0, 0}};
  return out;
}

/// One single-element interpretation per world, weighted by its joint
/// probability (zero-mass worlds included). Extensions are empty unless that
/// violates an axiom with a ⊤-equivalent left-hand side active in the world,
/// in which case the universal interpretation is used instead.
inline ProbabilisticInterpretation build_trivial_model(const KnowledgeBase& kb, const GlobalStrategy& s) {
  const FiniteInterpretation empty{{0}, {}, {}};
  const FiniteInterpretation universal = universal_interpretation(kb.vtbox);
  ProbabilisticInterpretation pi;
  for_each_world(kb.diagram, [&](const Valuation& w) {
    bool empty_ok = true;
    for (const auto& a : kb.vtbox) empty_ok = empty_ok && satisfies_vgci(kb.diagram, empty, w, a);
    pi.entries.push_back({empty_ok ? empty : universal, w, joint_probability(kb.diagram, s, w)});
  });
  return pi;
}

/// Mass of the entries satisfying ⟨c ⊑ d : α⟩.
inline double prob_subsumption_in_model(const ProbabilisticInterpretation& pi, const InfluenceDiagram& d,
                                        const Concept& c, const Concept& dc, const ContextFormula& alpha) {
  const VGCI a{{c, dc}, alpha};
  CompensatedSum sum;
  for (const auto& e : pi.entries) {
    if (satisfies_vgci(d, e.interp, e.valuation, a)) sum.add(e.weight);
  }
  return sum.value();
}

/// For each world in enumeration order, whether T_W ⊨ c ⊑ d. Worlds for
/// which `skip` returns true are reported as false without reasoning.
/// `threads` > 1 partitions the worlds across async tasks.
template <class Skip>
std::vector<char> entailment_by_world(const KnowledgeBase& kb, const Concept& c, const Concept& d, Skip&& skip,
                                      unsigned threads = 1) {
  const std::uint64_t total = kb.diagram.world_count();
  const std::size_t n = kb.diagram.size();
  std::vector<char> out(total, 0);
  auto run = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t r = lo; r < hi; ++r) {
      const Valuation w = Valuation::from_rank(r, n);
      if (!skip(w)) out[r] = is_subsumed(restrict(kb.diagram, kb.vtbox, w), c, d) ? 1 : 0;
    }
  };
  if (threads <= 1 || total < 2) {
    run(0, total);
    return out;
  }
  std::vector<std::future<void>> tasks;
  const std::uint64_t chunk = (total + threads - 1) / threads;
  for (std::uint64_t lo = 0; lo < total; lo += chunk) {
    tasks.push_back(std::async(std::launch::async, run, lo, std::min(total, lo + chunk)));
  }
  for (auto& t : tasks) t.get();
  return out;
}

/// Infimum over all models of the mass satisfying ⟨c ⊑ d : α⟩, computed in
/// closed form: a world contributes its joint probability iff α fails in it
/// or its restricted TBox entails c ⊑ d.
inline double prob_subsumption(const KnowledgeBase& kb, const GlobalStrategy& s, const Concept& c,
                               const Concept& d, const ContextFormula& alpha, unsigned threads = 1) {
  const std::size_t n = kb.diagram.size();
  std::vector<double> joint(kb.diagram.world_count());
  for (std::uint64_t r = 0; r < joint.size(); ++r) joint[r] = joint_probability(kb.diagram, s, Valuation::from_rank(r, n));
  const auto entailed = entailment_by_world(
      kb, c, d,
      [&](const Valuation& w) { return joint[w.rank(n)] == 0.0 || !eval_context(kb.diagram, w, alpha); }, threads);
  CompensatedSum included;
  bool excluded_any = false;
  for (std::uint64_t r = 0; r < joint.size(); ++r) {
    if (joint[r] == 0.0) continue;
    const Valuation w = Valuation::from_rank(r, n);
    if (!eval_context(kb.diagram, w, alpha) || entailed[r]) {
      included.add(joint[r]);
    } else {
      excluded_any = true;
    }
  }
  return excluded_any ? included.value() : 1.0;
}

enum class ContextCostMode { AxiomCount, VocabularySize };

/// Diagram whose cost node observes every variable and charges the size of
/// the restricted TBox (axiom count or signature size) in each world.
inline InfluenceDiagram context_size_cost(const KnowledgeBase& kb, ContextCostMode mode) {
  InfluenceDiagram out = kb.diagram;
  const std::size_t n = out.size();
  out.cost_parents.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.cost_parents[i] = i;
  out.cost_table.assign(out.world_count(), 0.0);
  for_each_world(out, [&](const Valuation& w) {
    const TBox t = restrict(kb.diagram, kb.vtbox, w);
    const double cost = static_cast<double>(mode == ContextCostMode::AxiomCount ? t.size() : t.signature_size());
    out.cost_table[row_index(out.cost_parents, w)] = cost;
  });
  return out;
}

}  // namespace idel
