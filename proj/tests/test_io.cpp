#include <gtest/gtest.h>

#include "idel/fixtures.hpp"
#include "idel/io.hpp"
#include "idel/report.hpp"

namespace idel {
namespace {

const std::string kFixtures = IDEL_FIXTURE_DIR;

Json minimal_doc() {
  return parse_json_text(R"json({
    "variables": ["X", "T"],
    "nodes": {
      "X": {"kind": "chance", "parents": [], "cpt": {"": 0.25}},
      "T": {"kind": "decision", "parents": ["X"]}
    },
    "cost": {"parents": ["X", "T"], "table": {"00": 1, "01": 2, "10": 3, "11": 4}},
    "tbox": [{"lhs": "A", "rhs": "(some r B)", "context": "(not X)"}],
    "strategies": {"always": {"T": {"0": 1, "1": 1}}}
  })json");
}

TEST(KbDocument, ParsesMinimalDocument) {
  const auto doc = parse_kb_document(minimal_doc());
  EXPECT_TRUE(validate(doc.kb).empty());
  EXPECT_EQ(doc.kb.diagram.cost_name, "c");
  EXPECT_EQ(doc.kb.diagram.cost_table, (std::vector<double>{1, 2, 3, 4}));
  ASSERT_EQ(doc.kb.vtbox.size(), 1u);
  EXPECT_EQ(doc.kb.vtbox[0].context.str(), "(not X)");
  EXPECT_NEAR(expected_cost(doc.kb.diagram, doc.strategy("always")), 0.75 * 2 + 0.25 * 4, 1e-12);
  EXPECT_THROW(doc.strategy("missing"), ParseError);
}

TEST(KbDocument, GoldenFixtureMatchesBuiltFixture) {
  const auto doc = load_kb_document(kFixtures + "/idelium.kb");
  const auto built = fixtures::idelium();
  EXPECT_EQ(kb_json(doc.kb), kb_json(built));
  EXPECT_NEAR(expected_cost(doc.kb.diagram, doc.strategy("s_ta_unless_s")), 4.604, 1e-9);
  EXPECT_NEAR(expected_cost(doc.kb.diagram, doc.strategy("s_always_ta")), 2.36, 1e-9);
  EXPECT_EQ(read_file(kFixtures + "/idelium.kb"), render_json(idelium_document()));
}

TEST(KbDocument, RoundTrip) {
  const auto doc = parse_kb_document(minimal_doc());
  const auto again = parse_kb_document(kb_json(doc.kb, {{"always", doc.strategy("always")}}));
  EXPECT_EQ(kb_json(again.kb), kb_json(doc.kb));
}

TEST(KbDocument, MissingRowsSurfaceAsViolations) {
  Json j = minimal_doc();
  j["cost"]["table"].erase("11");
  const auto doc = parse_kb_document(j);
  const auto vs = validate(doc.kb);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].message, "missing cost row 11");
}

TEST(KbDocument, StructuralErrorsAreParseErrors) {
  auto expect_parse_error = [](auto mutate) {
    Json j = minimal_doc();
    mutate(j);
    EXPECT_THROW(parse_kb_document(j), ParseError) << j.dump();
  };
  expect_parse_error([](Json& j) { j["nodes"]["X"]["parents"] = {"Nope"}; });
  expect_parse_error([](Json& j) { j["nodes"]["X"]["kind"] = "utility"; });
  expect_parse_error([](Json& j) { j["nodes"]["X"]["cpt"] = Json{{"1", 0.5}}; });
  expect_parse_error([](Json& j) { j["nodes"].erase("T"); });
  expect_parse_error([](Json& j) { j["nodes"]["Z"] = Json{{"kind", "chance"}, {"cpt", {{"", 0.5}}}}; });
  expect_parse_error([](Json& j) { j["tbox"][0]["lhs"] = "(and A)"; });
  expect_parse_error([](Json& j) { j["tbox"][0]["context"] = "(xor X X)"; });
  expect_parse_error([](Json& j) { j.erase("cost"); });
}

TEST(KbDocument, CostNodeAsParentIsAViolation) {
  Json j = minimal_doc();
  j["nodes"]["X"]["parents"] = {"c"};
  j["nodes"]["X"]["cpt"] = Json{{"0", 0.1}, {"1", 0.2}};
  const auto doc = parse_kb_document(j);
  EXPECT_FALSE(validate(doc.kb).empty());
}

TEST(KbDocument, StrategyErrors) {
  const auto doc = parse_kb_document(minimal_doc());
  EXPECT_THROW(parse_strategy(doc.kb.diagram, parse_json_text(R"json({"T": {"0": 1}})json")), ParseError);
  EXPECT_THROW(parse_strategy(doc.kb.diagram, parse_json_text(R"json({"X": {"0": 1, "1": 0}})json")), ParseError);
  EXPECT_THROW(parse_strategy(doc.kb.diagram, parse_json_text(R"json({})json")), ParseError);
  EXPECT_THROW(parse_strategy(doc.kb.diagram, parse_json_text(R"json({"T": {"0": 1.5, "1": 0}})json")), ParseError);
}

TEST(KbDocument, ForgetfulChangesStrategyWidth) {
  Json j = parse_json_text(R"json({
    "variables": ["D1", "Y", "D2"],
    "nodes": {
      "D1": {"kind": "decision", "parents": []},
      "Y": {"kind": "chance", "parents": ["D1"], "cpt": {"0": 0.5, "1": 0.5}},
      "D2": {"kind": "decision", "parents": ["Y"]}
    },
    "cost": {"parents": [], "table": {"": 0}},
    "strategies": {"narrow": {"D1": {"": 1}, "D2": {"0": 0, "1": 1}}}
  })json");
  EXPECT_THROW(parse_kb_document(j).strategy("narrow"), ParseError);
  EXPECT_NO_THROW(parse_kb_document(j, true).strategy("narrow"));
}

TEST(JsonText, MalformedInputCarriesPosition) {
  try {
    parse_json_text("{\"variables\": [");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.position(), ParseError::npos);
  }
  EXPECT_THROW(read_file(kFixtures + "/does-not-exist.kb"), InputError);
}

TEST(ModelDocument, GoldenTable2) {
  const auto m = parse_model_document(parse_json_text(read_file(kFixtures + "/table2.json")));
  ASSERT_EQ(m.model.entries.size(), 8u);
  EXPECT_EQ(m.ids.front(), "I1");
  EXPECT_EQ(m.model.entries[0].valuation.bitstring(4), "1101");
  EXPECT_EQ(m.cost_overlays.size(), 2u);
  EXPECT_EQ(read_file(kFixtures + "/table2.json"), render_json(model_json(table2_document())));
  EXPECT_EQ(model_json(m), model_json(table2_document()));
}

TEST(Report, NumberFormatting) {
  EXPECT_EQ(format_number(4.604), "4.604");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.3");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(69.14893617021276), "69.1489362");
  EXPECT_EQ(format_number(1e-9), "1e-09");
}

TEST(Report, Fnv1a) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Report, RenderIsStable) {
  Json j = Json::object();
  j["b"] = 0.30000000000000004;
  j["a"] = Json::array({1, 2.5, "x"});
  j["e"] = Json::object();
  EXPECT_EQ(render_json(j), "{\n  \"b\": 0.3,\n  \"a\": [\n    1,\n    2.5,\n    \"x\"\n  ],\n  \"e\": {}\n}\n");
}

}  // namespace
}  // namespace idel
