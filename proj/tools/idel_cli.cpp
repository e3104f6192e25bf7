// idel: command-line front end for ID-EL knowledge bases.
//
// Every query prints one JSON report on stdout; diagnostics go to stderr.
// Exit codes: 0 ok, 1 validation violations, 2 input errors,
// 3 undefined or unsupported computations.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "idel/contextual.hpp"
#include "idel/diagram.hpp"
#include "idel/el.hpp"
#include "idel/errors.hpp"
#include "idel/evidence.hpp"
#include "idel/fixtures.hpp"
#include "idel/game_tree.hpp"
#include "idel/io.hpp"
#include "idel/optimizer.hpp"
#include "idel/report.hpp"

namespace {

using idel::Json;

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kInputError = 2;
constexpr int kUndefined = 3;

struct Options {
  bool forgetful = false;
  unsigned threads = 1;
  std::uint64_t cap = idel::kDefaultEnumerationCap;

  std::string path;
  std::string strategy;
  std::string world;
  std::string context = "true";
  std::string mode;
  std::string direction = "min";
  std::string problem;
  std::string fixture;
  std::string output;
  std::string overlay;
  std::vector<std::string> concepts;
  std::vector<std::string> evidence;
  double bound = 0.0;
  double fully_mixed = 0.0;
  bool pure = false;
  bool lp = false;
};

struct InvalidKnowledgeBase : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  idel::KBDocument doc;
  std::string digest;
};

Loaded load_valid(const Options& o) {
  const std::string text = idel::read_file(o.path);
  Loaded l{idel::parse_kb_document(idel::parse_json_text(text), o.forgetful), idel::fnv1a_hex(text)};
  if (auto v = idel::validate(l.doc.kb); !v.empty()) {
    for (const auto& x : v) std::cerr << "violation: " << x.node << ": " << x.message << "\n";
    throw InvalidKnowledgeBase("knowledge base is not valid");
  }
  return l;
}

std::pair<idel::Concept, idel::Concept> concept_pair(const std::vector<std::string>& v) {
  if (v.size() != 2) throw idel::ParseError("expected two concepts, got " + std::to_string(v.size()));
  return {idel::parse_concept(v[0]), idel::parse_concept(v[1])};
}

Json tolerances() {
  return Json{{"probability", idel::kProbabilityTolerance}, {"pivot", idel::kPivotTolerance}};
}

void emit(const std::string& command, const std::string& digest, Json result) {
  Json report = Json::object();
  report["command"] = command;
  report["input_digest"] = digest;
  report["result"] = std::move(result);
  report["tolerances"] = tolerances();
  std::cout << idel::render_json(report);
}

Json bitstrings(const std::vector<idel::Valuation>& ws, std::size_t n) {
  Json out = Json::array();
  for (const auto& w : ws) out.push_back(w.bitstring(n));
  return out;
}

Json conditional_json(const idel::ConditionalCostResult& r, std::size_t n) {
  return Json{{"value", r.value},
              {"evidence_probability", r.evidence_probability},
              {"included_worlds", bitstrings(r.included_worlds, n)}};
}

Json optimization_json(const idel::InfluenceDiagram& d, const idel::OptimizationResult& r) {
  Json out = Json::object();
  out["value"] = r.value;
  out["kind"] = r.kind == idel::StrategyKind::Pure ? "pure" : "mixed";
  out["strategy"] = r.strategy ? idel::strategy_json(d, *r.strategy) : Json(nullptr);
  if (r.kind == idel::StrategyKind::Mixed) {
    out["realization_plan"] = r.realization_plan;
    out["behaviour"] = r.behaviour;
    out["epsilon"] = r.epsilon;
  }
  return out;
}

std::optional<idel::EvidenceQuery> evidence_of(const Options& o) {
  if (o.evidence.empty()) return std::nullopt;
  auto [c, d] = concept_pair(o.evidence);
  return idel::EvidenceQuery{c, d};
}

idel::Objective objective_of(const Options& o) {
  auto q = evidence_of(o);
  if (!q) return idel::Objective::expected();
  if (o.mode == "pes") return idel::Objective::dominant_pessimistic(*q);
  return idel::Objective::dominant_optimistic(*q);
}

int run_validate(const Options& o, const std::string& command) {
  const std::string text = idel::read_file(o.path);
  const auto doc = idel::parse_kb_document(idel::parse_json_text(text), o.forgetful);
  auto violations = idel::validate(doc.kb);
  for (const auto& [name, _] : doc.strategies) {
    try {
      doc.strategy(name);
    } catch (const idel::ParseError& e) {
      violations.push_back({name, e.what()});
    } catch (const std::invalid_argument& e) {
      violations.push_back({name, e.what()});
    }
  }
  Json result = Json::object();
  if (violations.empty()) {
    result["status"] = "ok";
  } else {
    Json list = Json::array();
    for (const auto& v : violations) list.push_back(Json{{"node", v.node}, {"message", v.message}});
    result["status"] = "violations";
    result["violations"] = list;
  }
  emit(command, idel::fnv1a_hex(text), result);
  return violations.empty() ? kOk : kViolations;
}

int run_query(const std::string& sub, const Options& o, const std::string& command) {
  const Loaded l = load_valid(o);
  const auto& kb = l.doc.kb;
  const std::size_t n = kb.diagram.size();
  Json result = Json::object();

  if (sub == "subsume") {
    if (o.world.size() != n) throw idel::ParseError("--world needs " + std::to_string(n) + " bits");
    const auto w = idel::Valuation::from_bitstring(o.world);
    auto [c, d] = concept_pair(o.concepts);
    const auto t = idel::restrict(kb.diagram, kb.vtbox, w);
    Json tbox = Json::array();
    for (const auto& g : t.axioms()) tbox.push_back(idel::gci_json(g));
    result["world"] = o.world;
    result["restricted_tbox"] = tbox;
    result["subsumed"] = idel::is_subsumed(t, c, d);
  } else if (sub == "prob-subsume") {
    auto [c, d] = concept_pair(o.concepts);
    const auto alpha = idel::parse_formula(o.context);
    result["probability"] = idel::prob_subsumption(kb, l.doc.strategy(o.strategy), c, d, alpha, o.threads);
  } else if (sub == "expected-cost") {
    const auto s = l.doc.strategy(o.strategy);
    Json dist = Json::object();
    for (const auto& [cost, p] : idel::cost_distribution(kb.diagram, s)) dist[idel::format_number(cost)] = p;
    result["value"] = idel::expected_cost(kb.diagram, s);
    result["distribution"] = dist;
  } else if (sub == "cond-cost") {
    auto [c, d] = concept_pair(o.concepts);
    const auto s = l.doc.strategy(o.strategy);
    const idel::EvidenceQuery q{c, d};
    const auto r = o.mode == "pes" ? idel::pessimistic_expected_cost(kb, s, q, o.threads)
                                   : idel::optimistic_expected_cost(kb, s, q, o.threads);
    result = conditional_json(r, n);
  } else if (sub == "optimize") {
    if (o.pure == o.lp) throw idel::ParseError("choose exactly one of --pure and --lp");
    if (o.lp) {
      if (!o.evidence.empty()) throw idel::Unsupported("evidence-conditioned mixed optimization is not supported");
      if (o.direction != "min") throw idel::Unsupported("the sequence-form LP only minimizes");
      std::optional<double> eps;
      if (o.fully_mixed > 0.0) eps = o.fully_mixed;
      result = optimization_json(kb.diagram, idel::optimal_mixed_strategy(kb, eps));
    } else {
      const auto dir = o.direction == "max" ? idel::Direction::Max : idel::Direction::Min;
      result = optimization_json(kb.diagram, idel::optimal_pure_strategy(kb, objective_of(o), dir, o.cap, o.threads));
    }
  } else if (sub == "decide") {
    idel::ThresholdProblem p{};
    idel::Objective obj = idel::Objective::expected();
    idel::Direction dir = idel::Direction::Min;
    if (o.problem == "d-opt") {
      p = idel::ThresholdProblem::DOpt;
    } else if (o.problem == "d-pes") {
      p = idel::ThresholdProblem::DPes;
      dir = idel::Direction::Max;
    } else {
      auto q = evidence_of(o);
      if (!q) throw idel::ParseError(o.problem + " needs --evidence <C> <D>");
      const bool opt = o.problem == "d-dom-opt";
      p = opt ? idel::ThresholdProblem::DDomOpt : idel::ThresholdProblem::DDomPes;
      obj = opt ? idel::Objective::dominant_optimistic(*q) : idel::Objective::dominant_pessimistic(*q);
    }
    const auto r = idel::optimal_pure_strategy(kb, obj, dir, o.cap, o.threads);
    result["problem"] = o.problem;
    result["bound"] = o.bound;
    result["answer"] = idel::decide_threshold(r, o.bound, p);
    result["value"] = r.value;
    result["strategy"] = idel::strategy_json(kb.diagram, *r.strategy);
  } else if (sub == "worlds") {
    const auto s = l.doc.strategy(o.strategy);
    Json list = Json::array();
    idel::for_each_world(kb.diagram, [&](const idel::Valuation& w) {
      Json tbox = Json::array();
      const auto restricted = idel::restrict(kb.diagram, kb.vtbox, w);
      for (const auto& g : restricted.axioms()) tbox.push_back(idel::gci_json(g));
      list.push_back(Json{{"valuation", w.bitstring(n)},
                          {"probability", idel::joint_probability(kb.diagram, s, w)},
                          {"cost", idel::cost_of_valuation(kb.diagram, w)},
                          {"restricted_tbox", tbox}});
    });
    result["worlds"] = list;
  } else if (sub == "export-game-tree") {
    std::cout << idel::to_dot(kb.diagram, idel::build_game_tree(kb.diagram));
    return kOk;
  }
  emit(command, l.digest, result);
  return kOk;
}

int run_model(const std::string& sub, const Options& o, const std::string& command) {
  const std::string text = idel::read_file(o.path);
  const auto m = idel::parse_model_document(idel::parse_json_text(text));
  auto [c, d] = concept_pair(o.concepts);
  Json result = Json::object();
  if (sub == "model-prob") {
    idel::InfluenceDiagram names;
    for (const auto& v : m.variables) names.add_chance(v, {}, {0.5});
    result["probability"] = idel::prob_subsumption_in_model(m.model, names, c, d, idel::parse_formula(o.context));
  } else {
    auto it = m.cost_overlays.find(o.overlay);
    if (it == m.cost_overlays.end()) throw idel::ParseError("unknown cost overlay '" + o.overlay + "'");
    result["value"] = idel::conditional_expected_cost_in_model(m.model, it->second, c, d);
  }
  emit(command, idel::fnv1a_hex(text), result);
  return kOk;
}

int run_fixtures(const Options& o) {
  std::string text;
  if (o.fixture == "idelium") {
    text = idel::render_json(idel::idelium_document());
  } else if (o.fixture == "table2") {
    text = idel::render_json(idel::model_json(idel::table2_document()));
  } else {
    throw idel::ParseError("unknown fixture '" + o.fixture + "' (known: idelium, table2)");
  }
  if (o.output.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw idel::InputError("cannot write '" + o.output + "'");
  out << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ID-EL reasoner: EL ontologies under influence-diagram contexts"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--forgetful", o.forgetful, "condition local strategies on parents only");
  app.add_option("--threads", o.threads, "worker threads for world enumeration")->check(CLI::Range(1u, 256u));
  app.add_option("--cap", o.cap, "pure-strategy enumeration cap");

  auto kb_arg = [&](CLI::App* s) { s->add_option("kb", o.path, "knowledge base file")->required(); };
  auto concepts = [&](CLI::App* s) { s->add_option("concepts", o.concepts, "<C> <D>")->expected(2)->required(); };
  auto strategy = [&](CLI::App* s) { s->add_option("--strategy", o.strategy, "named strategy")->required(); };
  auto evidence = [&](CLI::App* s) { s->add_option("--evidence", o.evidence, "observed <C> <D>")->expected(2); };

  auto* validate = app.add_subcommand("validate", "check a knowledge base");
  kb_arg(validate);

  auto* subsume = app.add_subcommand("subsume", "subsumption in the TBox restricted to one world");
  kb_arg(subsume);
  subsume->add_option("--world", o.world, "valuation bitstring in declared order")->required();
  concepts(subsume);

  auto* prob = app.add_subcommand("prob-subsume", "probabilistic subsumption");
  kb_arg(prob);
  strategy(prob);
  prob->add_option("--context", o.context, "context formula");
  concepts(prob);

  auto* expected = app.add_subcommand("expected-cost", "expected cost and cost distribution");
  kb_arg(expected);
  strategy(expected);

  auto* cond = app.add_subcommand("cond-cost", "optimistic or pessimistic conditional expected cost");
  kb_arg(cond);
  strategy(cond);
  cond->add_option("--mode", o.mode, "opt or pes")->required()->check(CLI::IsMember({"opt", "pes"}));
  concepts(cond);

  auto* optimize = app.add_subcommand("optimize", "optimal strategy");
  kb_arg(optimize);
  optimize->add_flag("--pure", o.pure, "enumerate pure strategies");
  optimize->add_flag("--lp", o.lp, "solve the sequence-form LP");
  evidence(optimize);
  optimize->add_option("--mode", o.mode, "opt or pes")->check(CLI::IsMember({"opt", "pes"}));
  optimize->add_option("--direction", o.direction, "min or max")->check(CLI::IsMember({"min", "max"}));
  optimize->add_option("--fully-mixed", o.fully_mixed, "lower bound on every realization-plan entry");

  auto* decide = app.add_subcommand("decide", "threshold decision problems");
  kb_arg(decide);
  decide->add_option("--problem", o.problem, "d-opt, d-pes, d-dom-opt or d-dom-pes")
      ->required()
      ->check(CLI::IsMember({"d-opt", "d-pes", "d-dom-opt", "d-dom-pes"}));
  decide->add_option("--bound", o.bound, "threshold b")->required();
  evidence(decide);

  auto* worlds = app.add_subcommand("worlds", "every world with its probability, cost and restricted TBox");
  kb_arg(worlds);
  strategy(worlds);

  auto* tree = app.add_subcommand("export-game-tree", "game tree in DOT");
  kb_arg(tree);

  auto* model_prob = app.add_subcommand("model-prob", "subsumption mass in an explicit interpretation");
  model_prob->add_option("model", o.path, "model file")->required();
  model_prob->add_option("--context", o.context, "context formula");
  concepts(model_prob);

  auto* model_cost = app.add_subcommand("model-cond-cost", "conditional expected cost in an explicit interpretation");
  model_cost->add_option("model", o.path, "model file")->required();
  model_cost->add_option("--overlay", o.overlay, "cost overlay name")->required();
  concepts(model_cost);

  auto* fixtures = app.add_subcommand("fixtures", "write a bundled fixture");
  fixtures->add_option("name", o.fixture, "idelium or table2")->required();
  fixtures->add_option("-o,--output", o.output, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    if (sub == "validate") return run_validate(o, command);
    if (sub == "fixtures") return run_fixtures(o);
    if (sub == "model-prob" || sub == "model-cond-cost") return run_model(sub, o, command);
    return run_query(sub, o, command);
  } catch (const idel::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const idel::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const InvalidKnowledgeBase& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolations;
  } catch (const idel::Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kUndefined;
  } catch (const idel::UndefinedConditional& e) {
    std::cerr << "undefined: " << e.what() << "\n";
    return kUndefined;
  } catch (const idel::CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kUndefined;
  } catch (const idel::SolverError& e) {
    std::cerr << "solver: " << e.what() << "\n";
    return kUndefined;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
