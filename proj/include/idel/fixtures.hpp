#pragma once

/// @file
/// Bundled example knowledge bases: the idelium diagnosis diagram with its
/// contextual TBox, and an explicit eight-world probabilistic model.

#include <string>
#include <vector>

#include "idel/contextual.hpp"
#include "idel/diagram.hpp"
#include "idel/el.hpp"

namespace idel::fixtures {

/// Variables D (infection), S (symptoms), TA (decision: use test A) and
/// P (positive diagnosis); cost observes D, P and TA.
inline InfluenceDiagram idelium_diagram() {
  InfluenceDiagram d;
  d.add_chance("D", {}, {0.3});
  d.add_chance("S", {"D"}, {0.1, 0.4});
  d.add_decision("TA", {"S"});
  // Rows over (D, TA): 00, 01, 10, 11.
  d.add_chance("P", {"D", "TA"}, {0.1, 0.4, 0.9, 0.7});
  // Rows over (D, P, TA): 000 .. 111.
  d.set_cost({"D", "P", "TA"}, {20, 0, 20, 2, 90, 20, 5, 0});
  return d;
}

inline std::vector<VGCI> idelium_vtbox() {
  auto ax = [](const char* lhs, const char* rhs, const char* ctx) {
    return VGCI{{parse_concept(lhs), parse_concept(rhs)}, parse_formula(ctx)};
  };
  return {
      ax("Subject", "Infectious", "D"),
      ax("Subject", "Control", "(or S P)"),
      ax("Control", "Distance", "S"),
      ax("Control", "Benefits", "(not P)"),
      ax("Subject", "Safe", "(and (not P) (not S))"),
  };
}

inline KnowledgeBase idelium() { return {idelium_diagram(), idelium_vtbox()}; }

/// TA iff ¬S.
inline GlobalStrategy strategy_ta_unless_s(const InfluenceDiagram& d) {
  const std::size_t ta = d.require("TA"), s = d.require("S");
  GlobalStrategy g;
  g.locals.emplace(ta, make_local_strategy(d, ta, [&](const Valuation& w) { return w[s] ? 0.0 : 1.0; }));
  return g;
}

/// Always TA.
inline GlobalStrategy strategy_always_ta(const InfluenceDiagram& d) {
  const std::size_t ta = d.require("TA");
  GlobalStrategy g;
  g.locals.emplace(ta, make_local_strategy(d, ta, [](const Valuation&) { return 1.0; }));
  return g;
}

/// Eight single-element interpretations over the idelium variables, each a
/// model of its restricted TBox. Subject ⊑ Benefits holds exactly in
/// I2, I4, I6 and Subject ⊑ Safe exactly in I4, I8.
struct Table2 {
  std::vector<std::string> variables;
  std::vector<VGCI> vtbox;
  std::vector<std::string> ids;
  ProbabilisticInterpretation model;
  /// Per-entry costs for the two conditional-cost examples.
  std::vector<double> costs_subject_benefits;
  std::vector<double> costs_subject_safe;
};

inline Table2 table2() {
  Table2 t;
  t.variables = {"D", "S", "TA", "P"};
  t.vtbox = idelium_vtbox();
  struct Row {
    const char* id;
    const char* valuation;  // D S TA P
    std::vector<std::string> members;
    double weight;
  };
  const std::vector<Row> rows = {
      {"I1", "1101", {"Subject", "Infectious", "Control", "Distance"}, 0.108},
      {"I2", "1100", {"Subject", "Infectious", "Control", "Distance", "Benefits"}, 0.012},
      {"I3", "1011", {"Subject", "Infectious", "Control"}, 0.126},
      {"I4", "1010", {"Subject", "Infectious", "Benefits", "Safe"}, 0.054},
      {"I5", "0101", {"Subject", "Control", "Distance"}, 0.252},
      {"I6", "0100", {"Subject", "Control", "Distance", "Benefits"}, 0.028},
      {"I7", "0011", {"Subject", "Control"}, 0.294},
      {"I8", "0010", {"Subject", "Safe"}, 0.126},
  };
  for (const auto& r : rows) {
    FiniteInterpretation interp;
    interp.domain = {0};
    for (const auto& m : r.members) interp.concept_ext[m] = {0};
    t.ids.push_back(r.id);
    t.model.entries.push_back({interp, Valuation::from_bitstring(r.valuation), r.weight});
  }
  t.costs_subject_benefits = {5, 90, 0, 90, 20, 20, 2, 0};
  t.costs_subject_safe = {5, 90, 0, 5, 20, 20, 2, 0};
  return t;
}

/// Diagram over the Table 2 variables; only names are meaningful.
inline InfluenceDiagram table2_variables(const Table2& t) {
  InfluenceDiagram d;
  for (const auto& v : t.variables) d.add_chance(v, {}, {0.5});
  d.set_cost({}, {0.0});
  return d;
}

}  // namespace idel::fixtures
