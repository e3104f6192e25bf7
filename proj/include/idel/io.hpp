#pragma once

/// @file
/// JSON documents: knowledge bases (diagram, V-TBox, named strategies),
/// standalone strategy files and explicit probabilistic interpretations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "idel/contextual.hpp"
#include "idel/diagram.hpp"
#include "idel/el.hpp"
#include "idel/errors.hpp"
#include "idel/fixtures.hpp"

namespace idel {

using Json = nlohmann::ordered_json;

/// The file could not be read.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

namespace detail {

inline const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  return obj.at(key);
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline std::vector<std::string> as_names(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of names");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(as_string(e, where));
  return out;
}

// Rows absent from `table` stay NaN so validation can name them.
inline std::vector<double> read_table(const Json& table, std::size_t width, const std::string& where) {
  if (!table.is_object()) throw ParseError(where + ": expected an object of rows");
  if (width >= 63) throw ParseError(where + ": too many parents");
  std::vector<double> out(std::size_t{1} << width, std::numeric_limits<double>::quiet_NaN());
  for (const auto& [key, value] : table.items()) {
    std::size_t row = 0;
    try {
      row = parse_row_key(key, width);
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ": " + e.what());
    }
    out[row] = as_number(value, where + " row " + key);
  }
  return out;
}

inline Json write_table(const std::vector<double>& table, std::size_t width) {
  Json out = Json::object();
  for (std::size_t r = table.size(); r-- > 0;) out[row_key(r, width)] = table[r];
  return out;
}

inline Concept concept_field(const Json& j, const char* key, const std::string& where) {
  const std::string text = as_string(member(j, key, where), where + "." + key);
  try {
    return parse_concept(text);
  } catch (const ParseError& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

/// Diagram section of a KB document. Parent names resolve against the
/// declared variables and the cost node; unknown names are parse errors,
/// structural problems are left for validate().
inline InfluenceDiagram parse_diagram(const Json& doc) {
  InfluenceDiagram d;
  const auto names = detail::as_names(detail::member(doc, "variables", "document"), "variables");
  const Json& cost = detail::member(doc, "cost", "document");
  if (cost.contains("name")) d.cost_name = detail::as_string(cost.at("name"), "cost.name");
  const Json& nodes = detail::member(doc, "nodes", "document");
  if (!nodes.is_object()) throw ParseError("nodes: expected an object");

  auto resolve = [&](const std::string& name, const std::string& where) -> std::size_t {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    if (name == d.cost_name) return names.size();
    throw ParseError(where + ": unknown node '" + name + "'");
  };

  for (const auto& name : names) {
    const std::string where = "nodes." + name;
    if (!nodes.contains(name)) throw ParseError(where + ": declared variable has no node entry");
    const Json& node = nodes.at(name);
    Variable v;
    v.name = name;
    const std::string kind = detail::as_string(detail::member(node, "kind", where), where + ".kind");
    if (kind == "chance") {
      v.kind = NodeKind::Chance;
    } else if (kind == "decision") {
      v.kind = NodeKind::Decision;
    } else {
      throw ParseError(where + ".kind: expected chance or decision, got '" + kind + "'");
    }
    if (node.contains("parents")) {
      for (const auto& p : detail::as_names(node.at("parents"), where + ".parents")) {
        v.parents.push_back(resolve(p, where + ".parents"));
      }
    }
    if (node.contains("cpt")) {
      v.cpt = detail::read_table(node.at("cpt"), v.parents.size(), where + ".cpt");
    } else if (v.kind == NodeKind::Chance) {
      throw ParseError(where + ": chance node without cpt");
    }
    d.variables.push_back(std::move(v));
  }
  for (const auto& [name, _] : nodes.items()) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ParseError("nodes." + name + ": not listed in variables");
    }
  }

  if (cost.contains("parents")) {
    for (const auto& p : detail::as_names(cost.at("parents"), "cost.parents")) {
      d.cost_parents.push_back(resolve(p, "cost.parents"));
    }
  }
  d.cost_table = detail::read_table(detail::member(cost, "table", "cost"), d.cost_parents.size(), "cost.table");
  return d;
}

inline std::vector<VGCI> parse_vtbox(const Json& tbox) {
  if (!tbox.is_array()) throw ParseError("tbox: expected an array");
  std::vector<VGCI> out;
  for (std::size_t i = 0; i < tbox.size(); ++i) {
    const std::string where = "tbox[" + std::to_string(i) + "]";
    const Json& ax = tbox[i];
    VGCI v{{detail::concept_field(ax, "lhs", where), detail::concept_field(ax, "rhs", where)},
           ContextFormula::truth()};
    if (ax.contains("context")) {
      try {
        v.context = parse_formula(detail::as_string(ax.at("context"), where + ".context"));
      } catch (const ParseError& e) {
        throw ParseError(where + ".context: " + e.what());
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

/// Strategy document `{decision: {rowkey over infl(d): p}}`. Rows are keyed
/// over the influence set in declared variable order.
inline GlobalStrategy parse_strategy(const InfluenceDiagram& d, const Json& doc) {
  if (!doc.is_object()) throw ParseError("strategy: expected an object");
  GlobalStrategy s;
  for (const auto& [name, table] : doc.items()) {
    const auto idx = d.index_of(name);
    if (!idx || d.variables[*idx].kind != NodeKind::Decision) {
      throw ParseError("strategy: '" + name + "' is not a decision node");
    }
    LocalStrategy ls{*idx, influence_set(d, *idx), {}};
    ls.table = detail::read_table(table, ls.scope.size(), "strategy." + name);
    for (std::size_t r = 0; r < ls.table.size(); ++r) {
      if (std::isnan(ls.table[r])) {
        throw ParseError("strategy." + name + ": missing row " + row_key(r, ls.scope.size()));
      }
    }
    s.locals.emplace(*idx, std::move(ls));
  }
  if (auto problems = check_strategy(d, s); !problems.empty()) throw ParseError("strategy: " + problems.front());
  return s;
}

struct KBDocument {
  KnowledgeBase kb;
  /// Raw named strategy tables; resolved against the diagram on demand
  /// because their row width depends on the influence sets.
  std::map<std::string, Json> strategies;

  GlobalStrategy strategy(const std::string& name) const {
    auto it = strategies.find(name);
    if (it == strategies.end()) throw ParseError("unknown strategy '" + name + "'");
    try {
      return parse_strategy(kb.diagram, it->second);
    } catch (const ParseError& e) {
      throw ParseError(name + ": " + e.what());
    }
  }
};

inline KBDocument parse_kb_document(const Json& doc, bool forgetful = false) {
  KBDocument out;
  out.kb.diagram = parse_diagram(doc);
  out.kb.diagram.forgetful = forgetful;
  if (doc.contains("tbox")) out.kb.vtbox = parse_vtbox(doc.at("tbox"));
  if (doc.contains("strategies")) {
    const Json& s = doc.at("strategies");
    if (!s.is_object()) throw ParseError("strategies: expected an object");
    for (const auto& [name, table] : s.items()) out.strategies.emplace(name, table);
  }
  return out;
}

inline KBDocument load_kb_document(const std::string& path, bool forgetful = false) {
  return parse_kb_document(parse_json_text(read_file(path)), forgetful);
}

inline Json gci_json(const GCI& g) { return Json{{"lhs", g.lhs.str()}, {"rhs", g.rhs.str()}}; }

inline Json vgci_json(const VGCI& v) {
  return Json{{"lhs", v.gci.lhs.str()}, {"rhs", v.gci.rhs.str()}, {"context", v.context.str()}};
}

inline Json strategy_json(const InfluenceDiagram& d, const GlobalStrategy& s) {
  Json out = Json::object();
  for (const auto& [dec, ls] : s.locals) out[d.variables[dec].name] = detail::write_table(ls.table, ls.scope.size());
  return out;
}

inline Json diagram_json(const InfluenceDiagram& d) {
  Json out = Json::object();
  Json vars = Json::array();
  for (const auto& v : d.variables) vars.push_back(v.name);
  out["variables"] = vars;
  Json nodes = Json::object();
  for (const auto& v : d.variables) {
    Json node = Json::object();
    node["kind"] = v.kind == NodeKind::Chance ? "chance" : "decision";
    Json parents = Json::array();
    for (std::size_t p : v.parents) parents.push_back(d.node_name(p));
    node["parents"] = parents;
    if (v.kind == NodeKind::Chance) node["cpt"] = detail::write_table(v.cpt, v.parents.size());
    nodes[v.name] = node;
  }
  out["nodes"] = nodes;
  Json cost = Json::object();
  cost["name"] = d.cost_name;
  Json parents = Json::array();
  for (std::size_t p : d.cost_parents) parents.push_back(d.node_name(p));
  cost["parents"] = parents;
  cost["table"] = detail::write_table(d.cost_table, d.cost_parents.size());
  out["cost"] = cost;
  return out;
}

inline Json kb_json(const KnowledgeBase& kb, const std::map<std::string, GlobalStrategy>& strategies = {}) {
  Json out = diagram_json(kb.diagram);
  Json tbox = Json::array();
  for (const auto& v : kb.vtbox) tbox.push_back(vgci_json(v));
  out["tbox"] = tbox;
  if (!strategies.empty()) {
    Json s = Json::object();
    for (const auto& [name, g] : strategies) s[name] = strategy_json(kb.diagram, g);
    out["strategies"] = s;
  }
  return out;
}

/// Explicit probabilistic interpretation with named entries and optional
/// per-entry cost overlays.
struct ModelDocument {
  std::vector<std::string> variables;
  std::vector<VGCI> vtbox;
  std::vector<std::string> ids;
  ProbabilisticInterpretation model;
  std::map<std::string, std::vector<double>> cost_overlays;
};

inline ModelDocument parse_model_document(const Json& doc) {
  ModelDocument out;
  out.variables = detail::as_names(detail::member(doc, "variables", "document"), "variables");
  if (doc.contains("tbox")) out.vtbox = parse_vtbox(doc.at("tbox"));
  const Json& entries = detail::member(doc, "interpretations", "document");
  if (!entries.is_array()) throw ParseError("interpretations: expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "interpretations[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    out.ids.push_back(e.contains("id") ? detail::as_string(e.at("id"), where + ".id") : std::to_string(i));
    WeightedInterpretation wi;
    const std::string bits = detail::as_string(detail::member(e, "valuation", where), where + ".valuation");
    if (bits.size() != out.variables.size()) throw ParseError(where + ".valuation: wrong width");
    try {
      wi.valuation = Valuation::from_bitstring(bits);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(where + ".valuation: " + ex.what());
    }
    wi.weight = detail::as_number(detail::member(e, "weight", where), where + ".weight");
    const Json& domain = detail::member(e, "domain", where);
    if (!domain.is_array()) throw ParseError(where + ".domain: expected an array");
    for (const auto& x : domain) {
      if (!x.is_number_integer()) throw ParseError(where + ".domain: expected integers");
      wi.interp.domain.insert(x.get<int>());
    }
    if (e.contains("concepts")) {
      for (const auto& [name, ext] : e.at("concepts").items()) {
        auto& set = wi.interp.concept_ext[name];
        for (const auto& x : ext) set.insert(x.get<int>());
      }
    }
    if (e.contains("roles")) {
      for (const auto& [name, pairs] : e.at("roles").items()) {
        auto& set = wi.interp.role_ext[name];
        for (const auto& p : pairs) {
          if (!p.is_array() || p.size() != 2) throw ParseError(where + ".roles." + name + ": expected pairs");
          set.insert({p[0].get<int>(), p[1].get<int>()});
        }
      }
    }
    if (!wi.interp.well_formed()) throw ParseError(where + ": extension outside the domain");
    out.model.entries.push_back(std::move(wi));
  }
  if (doc.contains("cost_overlays")) {
    for (const auto& [name, costs] : doc.at("cost_overlays").items()) {
      std::vector<double> v;
      for (const auto& c : costs) v.push_back(detail::as_number(c, "cost_overlays." + name));
      if (v.size() != out.model.entries.size()) throw ParseError("cost_overlays." + name + ": wrong length");
      out.cost_overlays.emplace(name, std::move(v));
    }
  }
  return out;
}

inline Json model_json(const ModelDocument& m) {
  Json out = Json::object();
  out["variables"] = m.variables;
  Json tbox = Json::array();
  for (const auto& v : m.vtbox) tbox.push_back(vgci_json(v));
  out["tbox"] = tbox;
  Json entries = Json::array();
  for (std::size_t i = 0; i < m.model.entries.size(); ++i) {
    const auto& e = m.model.entries[i];
    Json j = Json::object();
    j["id"] = m.ids.at(i);
    j["valuation"] = e.valuation.bitstring(m.variables.size());
    j["weight"] = e.weight;
    j["domain"] = Json(std::vector<int>(e.interp.domain.begin(), e.interp.domain.end()));
    Json concepts = Json::object();
    for (const auto& [name, ext] : e.interp.concept_ext) concepts[name] = std::vector<int>(ext.begin(), ext.end());
    j["concepts"] = concepts;
    Json roles = Json::object();
    for (const auto& [name, pairs] : e.interp.role_ext) {
      Json arr = Json::array();
      for (const auto& [a, b] : pairs) arr.push_back(Json::array({a, b}));
      roles[name] = arr;
    }
    j["roles"] = roles;
    entries.push_back(j);
  }
  out["interpretations"] = entries;
  Json overlays = Json::object();
  for (const auto& [name, costs] : m.cost_overlays) overlays[name] = costs;
  out["cost_overlays"] = overlays;
  return out;
}

inline ModelDocument table2_document() {
  const auto t = fixtures::table2();
  ModelDocument m;
  m.variables = t.variables;
  m.vtbox = t.vtbox;
  m.ids = t.ids;
  m.model = t.model;
  m.cost_overlays = {{"subject_benefits", t.costs_subject_benefits}, {"subject_safe", t.costs_subject_safe}};
  return m;
}

inline Json idelium_document() {
  const KnowledgeBase kb = fixtures::idelium();
  return kb_json(kb, {{"s_ta_unless_s", fixtures::strategy_ta_unless_s(kb.diagram)},
                      {"s_always_ta", fixtures::strategy_always_ta(kb.diagram)}});
}

}  // namespace idel
