#include <gtest/gtest.h>

#include "idel/evidence.hpp"
#include "idel/fixtures.hpp"
#include "support.hpp"

namespace idel {
namespace {

const EvidenceQuery kInfectious{Concept::name("Subject"), Concept::name("Infectious")};
const EvidenceQuery kTautology{Concept::name("Subject"), Concept::name("Subject")};

TEST(ConditionalExpectation, WorkedValues) {
  EXPECT_NEAR(conditional_expectation({{0.012, 90}, {0.054, 90}, {0.028, 20}}), 69.149, 1e-3);
  EXPECT_NEAR(conditional_expectation({{0.054, 5}, {0.126, 0}}), 1.5, 1e-9);
  EXPECT_DOUBLE_EQ(conditional_expectation({{0.25, 7}}), 7.0);
  EXPECT_THROW(conditional_expectation({}), UndefinedConditional);
  EXPECT_THROW(conditional_expectation({{0.0, 3}}), UndefinedConditional);
}

TEST(ConditionalExpectation, Table2Overlays) {
  const auto t = fixtures::table2();
  EXPECT_NEAR(conditional_expected_cost_in_model(t.model, t.costs_subject_benefits, Concept::name("Subject"),
                                                 Concept::name("Benefits")),
              69.149, 1e-3);
  EXPECT_NEAR(conditional_expected_cost_in_model(t.model, t.costs_subject_safe, Concept::name("Subject"),
                                                 Concept::name("Safe")),
              1.5, 1e-9);
}

TEST(Classify, FixtureForcesExactlyTheInfectedWorlds) {
  const auto kb = fixtures::idelium();
  const auto wc = classify_worlds(kb, fixtures::strategy_ta_unless_s(kb.diagram), kInfectious);
  ASSERT_EQ(wc.worlds.size(), 16u);
  for (const auto& w : wc.worlds) EXPECT_EQ(w.status == WorldStatus::Forced, w.valuation[0]);
}

TEST(Classify, TautologyAndEmptyTBox) {
  auto kb = fixtures::idelium();
  const auto s = fixtures::strategy_ta_unless_s(kb.diagram);
  for (const auto& w : classify_worlds(kb, s, kTautology).worlds) EXPECT_EQ(w.status, WorldStatus::Forced);
  kb.vtbox.clear();
  for (const auto& w : classify_worlds(kb, s, kInfectious).worlds) EXPECT_EQ(w.status, WorldStatus::Optional);
}

TEST(Bounds, FixtureGreedyTrace) {
  const auto kb = fixtures::idelium();
  const auto s = fixtures::strategy_ta_unless_s(kb.diagram);
  const auto lo = optimistic_expected_cost(kb, s, kInfectious);
  const auto hi = pessimistic_expected_cost(kb, s, kInfectious);
  EXPECT_NEAR(lo.value, 3.445, 1e-3);
  EXPECT_NEAR(hi.value, 11.081, 1e-3);
  // Forced mass 0.3 plus optional cost-0 (0.378) and cost-2 (0.252) worlds.
  EXPECT_NEAR(lo.evidence_probability, 0.93, 1e-9);
  // Forced mass 0.3 plus the optional cost-20 world (0.07).
  EXPECT_NEAR(hi.evidence_probability, 0.37, 1e-9);
  const auto oracle = brute_force_conditional_bounds(kb, s, kInfectious);
  EXPECT_NEAR(oracle.inf, lo.value, 1e-9);
  EXPECT_NEAR(oracle.sup, hi.value, 1e-9);
}

TEST(Bounds, TautologyGivesExpectedCost) {
  const auto kb = fixtures::idelium();
  const auto s = fixtures::strategy_ta_unless_s(kb.diagram);
  EXPECT_NEAR(optimistic_expected_cost(kb, s, kTautology).value, 4.604, 1e-9);
  EXPECT_NEAR(pessimistic_expected_cost(kb, s, kTautology).value, 4.604, 1e-9);
}

TEST(Bounds, EmptyTBoxConcentratesOnExtremes) {
  auto kb = fixtures::idelium();
  kb.vtbox.clear();
  const auto s = fixtures::strategy_ta_unless_s(kb.diagram);
  const EvidenceQuery q{Concept::name("A"), Concept::name("B")};
  EXPECT_DOUBLE_EQ(optimistic_expected_cost(kb, s, q).value, 0.0);
  EXPECT_DOUBLE_EQ(pessimistic_expected_cost(kb, s, q).value, 90.0);
}

TEST(Bounds, SingleWorldDiagram) {
  KnowledgeBase kb;
  kb.diagram.add_chance("X", {}, {1.0});
  kb.diagram.set_cost({"X"}, {3.0, 8.0});
  const EvidenceQuery q{Concept::name("A"), Concept::name("B")};
  EXPECT_DOUBLE_EQ(optimistic_expected_cost(kb, {}, q).value, 8.0);
  EXPECT_DOUBLE_EQ(pessimistic_expected_cost(kb, {}, q).value, 8.0);
}

TEST(Bounds, ZeroMassEverywhereIsUndefined) {
  WorldClassification wc;
  wc.worlds.push_back({Valuation{}, WorldStatus::Optional, 0.0, 1.0});
  EXPECT_THROW(optimistic_expected_cost(wc, 1), UndefinedConditional);
  EXPECT_THROW(brute_force_conditional_bounds(wc), UndefinedConditional);
}

TEST(Bounds, OracleRefusesLargeInputs) {
  WorldClassification wc;
  for (std::uint64_t r = 0; r <= kBruteForceOptionalLimit; ++r) {
    wc.worlds.push_back({Valuation::from_rank(r, 6), WorldStatus::Optional, 0.01, static_cast<double>(r)});
  }
  EXPECT_THROW(brute_force_conditional_bounds(wc), CapExceeded);
}

TEST(Bounds, RandomKbsMatchOracleAndSandwich) {
  testing::Rng rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const auto kb = testing::random_kb(rng);
    const auto s = testing::random_strategy(rng, kb.diagram);
    const EvidenceQuery q{testing::random_concept(rng, 1), testing::random_concept(rng, 1)};
    const auto wc = classify_worlds(kb, s, q);
    const auto oracle = brute_force_conditional_bounds(wc);
    const double lo = optimistic_expected_cost(wc, kb.diagram.size()).value;
    const double hi = pessimistic_expected_cost(wc, kb.diagram.size()).value;
    EXPECT_NEAR(lo, oracle.inf, 1e-9);
    EXPECT_NEAR(hi, oracle.sup, 1e-9);
    const double e = expected_cost(kb.diagram, s);
    EXPECT_LE(lo, e + 1e-9);
    EXPECT_LE(e, hi + 1e-9);
  }
}

}  // namespace
}  // namespace idel
