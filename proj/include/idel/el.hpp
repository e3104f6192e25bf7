#pragma once

/// @file
/// The description logic EL: concepts, TBoxes, normalization into the four
/// normal forms, completion-based subsumption and model checking over
/// explicit finite interpretations.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "idel/errors.hpp"
#include "idel/sexpr.hpp"

namespace idel {

/// Names beginning with this prefix are reserved for normalization.
inline constexpr std::string_view kFreshPrefix = "_n";
inline constexpr std::string_view kTopName = "top";

/// An immutable EL concept. Conjunction operands are kept in canonical
/// order, so two concepts are equal iff their printed forms are equal.
class Concept {
 public:
  enum class Kind { Name, Top, And, Some };

  Concept() : Concept(top()) {}

  static Concept top() {
    static const Concept t{std::make_shared<const Node>(Node{Kind::Top, "", nullptr, nullptr, "top"})};
    return t;
  }

  /// A user concept name. Throws std::invalid_argument for names outside
  /// `[A-Za-z][A-Za-z0-9_]*` and for the keyword `top`.
  static Concept name(std::string n) {
    if (!detail::is_identifier(n) || n == kTopName) {
      throw std::invalid_argument("invalid concept name '" + n + "'");
    }
    return reserved(std::move(n));
  }

  /// Unchecked name, used for fresh normalization symbols.
  static Concept reserved(std::string n) {
    std::string text = n;
    return Concept{std::make_shared<const Node>(Node{Kind::Name, std::move(n), nullptr, nullptr, std::move(text)})};
  }

  static Concept conj(Concept a, Concept b) {
    if (b.str() < a.str()) std::swap(a, b);
    std::string text = "(and " + a.str() + " " + b.str() + ")";
    return Concept{std::make_shared<const Node>(Node{Kind::And, "", a.node_, b.node_, std::move(text)})};
  }

  static Concept some(std::string role, Concept filler) {
    if (!detail::is_identifier(role)) throw std::invalid_argument("invalid role name '" + role + "'");
    std::string text = "(some " + role + " " + filler.str() + ")";
    return Concept{std::make_shared<const Node>(Node{Kind::Some, std::move(role), filler.node_, nullptr, std::move(text)})};
  }

  Kind kind() const { return node_->kind; }
  bool is_atomic() const { return kind() == Kind::Name || kind() == Kind::Top; }

  /// Concept name for Name, role name for Some.
  const std::string& label() const { return node_->label; }
  Concept left() const { return Concept{node_->a}; }
  Concept right() const { return Concept{node_->b}; }
  Concept filler() const { return Concept{node_->a}; }

  /// Canonical, fully parenthesized text; re-parses to an equal concept.
  const std::string& str() const { return node_->text; }

  /// Name used for atomic concepts inside normalized TBoxes.
  const std::string& atom() const { return kind() == Kind::Top ? node_->text : node_->label; }

  friend bool operator==(const Concept& a, const Concept& b) { return a.str() == b.str(); }
  friend auto operator<=>(const Concept& a, const Concept& b) { return a.str() <=> b.str(); }

  void collect_names(std::set<std::string>& concepts, std::set<std::string>& roles) const {
    switch (kind()) {
      case Kind::Name: concepts.insert(label()); break;
      case Kind::Top: break;
      case Kind::And:
        left().collect_names(concepts, roles);
        right().collect_names(concepts, roles);
        break;
      case Kind::Some:
        roles.insert(label());
        filler().collect_names(concepts, roles);
        break;
    }
  }

 private:
  struct Node {
    Kind kind;
    std::string label;
    std::shared_ptr<const Node> a, b;
    std::string text;
  };
  explicit Concept(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline Concept parse_concept_at(SexprCursor& in) {
  if (in.peek_open()) {
    in.expect('(');
    std::size_t at = 0;
    const std::string op = in.word(at);
    if (op == "and") {
      Concept a = parse_concept_at(in);
      Concept b = parse_concept_at(in);
      in.expect(')');
      return Concept::conj(std::move(a), std::move(b));
    }
    if (op == "some") {
      std::size_t role_at = 0;
      std::string role = in.word(role_at);
      if (!is_identifier(role)) throw ParseError("invalid role name '" + role + "'", role_at);
      if (role.starts_with(kFreshPrefix)) throw ParseError("reserved name '" + role + "'", role_at);
      Concept f = parse_concept_at(in);
      in.expect(')');
      return Concept::some(std::move(role), std::move(f));
    }
    throw ParseError("unknown constructor '" + op + "'", at);
  }
  std::size_t at = 0;
  std::string w = in.word(at);
  if (w == kTopName) return Concept::top();
  if (w.starts_with(kFreshPrefix)) throw ParseError("reserved name '" + w + "'", at);
  if (!is_identifier(w)) throw ParseError("invalid concept name '" + w + "'", at);
  return Concept::name(std::move(w));
}

}  // namespace detail

/// Parses `concept := NAME | top | (and C C) | (some NAME C)`.
inline Concept parse_concept(std::string_view text) {
  detail::SexprCursor in(text);
  Concept c = detail::parse_concept_at(in);
  in.finish();
  return c;
}

/// General concept inclusion lhs ⊑ rhs.
struct GCI {
  Concept lhs;
  Concept rhs;

  std::string str() const { return lhs.str() + " <= " + rhs.str(); }
  friend bool operator==(const GCI& a, const GCI& b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
  friend auto operator<=>(const GCI& a, const GCI& b) {
    if (auto c = a.lhs <=> b.lhs; c != 0) return c;
    return a.rhs <=> b.rhs;
  }
};

/// A finite, duplicate-free set of GCIs. Insertion order is preserved.
class TBox {
 public:
  TBox() = default;
  TBox(std::initializer_list<GCI> axioms) {
    for (const auto& a : axioms) insert(a);
  }

  bool insert(const GCI& g) {
    if (std::find(axioms_.begin(), axioms_.end(), g) != axioms_.end()) return false;
    axioms_.push_back(g);
    return true;
  }

  const std::vector<GCI>& axioms() const { return axioms_; }
  std::size_t size() const { return axioms_.size(); }
  bool empty() const { return axioms_.empty(); }
  auto begin() const { return axioms_.begin(); }
  auto end() const { return axioms_.end(); }

  /// Distinct concept names plus distinct role names.
  std::size_t signature_size() const {
    std::set<std::string> cs, rs;
    for (const auto& g : axioms_) {
      g.lhs.collect_names(cs, rs);
      g.rhs.collect_names(cs, rs);
    }
    return cs.size() + rs.size();
  }

 private:
  std::vector<GCI> axioms_;
};

/// Axiom in one of the four normal forms. Atoms are concept names or "top".
struct NormalAxiom {
  enum class Form {
    Subclass,      // a ⊑ b
    Conjunction,   // a ⊓ a2 ⊑ b
    ExistsRight,   // a ⊑ ∃role.b
    ExistsLeft,    // ∃role.a ⊑ b
  };
  Form form;
  std::string a;
  std::string a2;
  std::string role;
  std::string b;

  friend bool operator==(const NormalAxiom&, const NormalAxiom&) = default;
  friend auto operator<=>(const NormalAxiom&, const NormalAxiom&) = default;

  GCI to_gci() const {
    auto atom = [](const std::string& s) { return s == kTopName ? Concept::top() : Concept::reserved(s); };
    switch (form) {
      case Form::Subclass: return {atom(a), atom(b)};
      case Form::Conjunction: return {Concept::conj(atom(a), atom(a2)), atom(b)};
      case Form::ExistsRight: return {atom(a), Concept::some(role, atom(b))};
      case Form::ExistsLeft: return {Concept::some(role, atom(a)), atom(b)};
    }
    throw std::logic_error("bad normal form");
  }
};

struct NormalizedTBox {
  std::vector<NormalAxiom> axioms;
  /// Fresh name -> the complex concept it abbreviates.
  std::map<std::string, Concept> name_map;
};

namespace detail {

class Normalizer {
 public:
  explicit Normalizer(NormalizedTBox& out) : out_(out) {}

  void add(const Concept& lhs, const Concept& rhs) {
    switch (rhs.kind()) {
      case Concept::Kind::Top:
        return;
      case Concept::Kind::And:
        add(lhs, rhs.left());
        add(lhs, rhs.right());
        return;
      case Concept::Kind::Some:
        emit({NormalAxiom::Form::ExistsRight, lhs_atom(lhs), "", rhs.label(), rhs_atom(rhs.filler())});
        return;
      case Concept::Kind::Name:
        break;
    }
    const std::string b = rhs.atom();
    switch (lhs.kind()) {
      case Concept::Kind::Name:
      case Concept::Kind::Top:
        if (lhs.atom() != b) emit({NormalAxiom::Form::Subclass, lhs.atom(), "", "", b});
        return;
      case Concept::Kind::And:
        emit({NormalAxiom::Form::Conjunction, lhs_atom(lhs.left()), lhs_atom(lhs.right()), "", b});
        return;
      case Concept::Kind::Some:
        emit({NormalAxiom::Form::ExistsLeft, lhs_atom(lhs.filler()), "", lhs.label(), b});
        return;
    }
  }

 private:
  // Atom X with C ⊑ X (C occurs on a left-hand side).
  std::string lhs_atom(const Concept& c) {
    if (c.is_atomic()) return c.atom();
    if (auto it = lhs_names_.find(c.str()); it != lhs_names_.end()) return it->second;
    std::string x = fresh(c);
    lhs_names_.emplace(c.str(), x);
    add(c, Concept::reserved(x));
    return x;
  }

  // Atom X with X ⊑ C (C occurs on a right-hand side).
  std::string rhs_atom(const Concept& c) {
    if (c.is_atomic()) return c.atom();
    if (auto it = rhs_names_.find(c.str()); it != rhs_names_.end()) return it->second;
    std::string x = fresh(c);
    rhs_names_.emplace(c.str(), x);
    add(Concept::reserved(x), c);
    return x;
  }

  std::string fresh(const Concept& c) {
    std::string x = std::string(kFreshPrefix) + std::to_string(out_.name_map.size());
    out_.name_map.emplace(x, c);
    return x;
  }

  void emit(NormalAxiom ax) {
    if (std::find(out_.axioms.begin(), out_.axioms.end(), ax) == out_.axioms.end()) {
      out_.axioms.push_back(std::move(ax));
    }
  }

  NormalizedTBox& out_;
  std::unordered_map<std::string, std::string> lhs_names_;
  std::unordered_map<std::string, std::string> rhs_names_;
};

}  // namespace detail

/// Rewrites a TBox into the four normal forms. The result is a conservative
/// extension: entailments between original names are unchanged.
inline NormalizedTBox normalize(const TBox& tbox) {
  NormalizedTBox out;
  detail::Normalizer n(out);
  for (const auto& g : tbox) n.add(g.lhs, g.rhs);
  return out;
}

/// Saturated completion sets: for each atom A, all atoms B with A ⊑ B, plus
/// derived existential edges A ⊑ ∃r.B.
class SubsumptionIndex {
 public:
  bool subsumes(const std::string& sub, const std::string& super) const {
    if (super == kTopName) return true;
    if (sub == super) return true;
    const auto i = id(sub), j = id(super);
    if (i < 0 || j < 0) return false;
    return subsumers_[i].count(j) > 0;
  }

  std::set<std::string> subsumers(const std::string& a) const {
    std::set<std::string> out{a, std::string(kTopName)};
    if (const auto i = id(a); i >= 0) {
      for (int j : subsumers_[i]) out.insert(names_[j]);
    }
    return out;
  }

  bool has_edge(const std::string& a, const std::string& role, const std::string& b) const {
    const auto i = id(a), j = id(b);
    auto it = edges_.find(role);
    if (i < 0 || j < 0 || it == edges_.end()) return false;
    return it->second.count({i, j}) > 0;
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  friend SubsumptionIndex saturate(const NormalizedTBox&);

  int id(const std::string& s) const {
    auto it = ids_.find(s);
    return it == ids_.end() ? -1 : it->second;
  }

  int intern(const std::string& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(s);
    return it->second;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::set<int>> subsumers_;
  std::map<std::string, std::set<std::pair<int, int>>> edges_;
};

/// Completion calculus with a worklist fixpoint over the four rules:
/// hierarchy, conjunction, existential introduction and existential
/// propagation.
inline SubsumptionIndex saturate(const NormalizedTBox& ntbox) {
  SubsumptionIndex ix;
  const int top = ix.intern(std::string(kTopName));
  for (const auto& ax : ntbox.axioms) {
    ix.intern(ax.a);
    if (ax.form == NormalAxiom::Form::Conjunction) ix.intern(ax.a2);
    ix.intern(ax.b);
  }
  const std::size_t n = ix.names_.size();

  std::vector<std::vector<int>> told(n);                       // a ⊑ b
  std::vector<std::vector<std::pair<int, int>>> conj(n);       // a ⊓ other ⊑ b, per operand
  std::vector<std::vector<std::pair<std::string, int>>> exr(n);  // a ⊑ ∃r.b
  std::map<std::pair<std::string, int>, std::vector<int>> exl;   // ∃r.a ⊑ b
  for (const auto& ax : ntbox.axioms) {
    const int a = ix.id(ax.a), b = ix.id(ax.b);
    switch (ax.form) {
      case NormalAxiom::Form::Subclass: told[a].push_back(b); break;
      case NormalAxiom::Form::Conjunction: {
        const int a2 = ix.id(ax.a2);
        conj[a].emplace_back(a2, b);
        if (a2 != a) conj[a2].emplace_back(a, b);
        break;
      }
      case NormalAxiom::Form::ExistsRight: exr[a].emplace_back(ax.role, b); break;
      case NormalAxiom::Form::ExistsLeft: exl[{ax.role, a}].push_back(b); break;
    }
  }

  ix.subsumers_.assign(n, {});
  std::vector<std::vector<std::pair<std::string, int>>> preds(n);  // (role, source) into node
  struct Item {
    int node;
    int added;          // subsumer added, or -1 for an edge
    std::string role;
    int target;
  };
  std::deque<Item> work;

  auto add_subsumer = [&](int node, int s) {
    if (ix.subsumers_[node].insert(s).second) work.push_back({node, s, "", -1});
  };
  auto add_edge = [&](int from, const std::string& role, int to) {
    if (ix.edges_[role].insert({from, to}).second) {
      preds[to].emplace_back(role, from);
      work.push_back({from, -1, role, to});
    }
  };

  for (int i = 0; i < static_cast<int>(n); ++i) {
    add_subsumer(i, i);
    add_subsumer(i, top);
  }

  while (!work.empty()) {
    Item it = std::move(work.front());
    work.pop_front();
    if (it.added >= 0) {
      const int a = it.node, x = it.added;
      for (int b : told[x]) add_subsumer(a, b);
      for (const auto& [other, b] : conj[x]) {
        if (ix.subsumers_[a].count(other)) add_subsumer(a, b);
      }
      for (const auto& [role, b] : exr[x]) add_edge(a, role, b);
      const auto incoming = preds[a];
      for (const auto& [role, p] : incoming) {
        if (auto e = exl.find({role, x}); e != exl.end()) {
          for (int b : e->second) add_subsumer(p, b);
        }
      }
    } else {
      const std::vector<int> fillers(ix.subsumers_[it.target].begin(), ix.subsumers_[it.target].end());
      for (int x : fillers) {
        if (auto e = exl.find({it.role, x}); e != exl.end()) {
          for (int b : e->second) add_subsumer(it.node, b);
        }
      }
    }
  }
  return ix;
}

/// Decides tbox ⊨ c ⊑ d. The query concepts are internalized through two
/// fresh names and the index is rebuilt for every call.
inline bool is_subsumed(const TBox& tbox, const Concept& c, const Concept& d) {
  if (c == d || d.kind() == Concept::Kind::Top) return true;
  TBox extended = tbox;
  const Concept xc = Concept::reserved(std::string(kFreshPrefix) + "qc");
  const Concept xd = Concept::reserved(std::string(kFreshPrefix) + "qd");
  extended.insert({xc, c});
  extended.insert({c, xc});
  extended.insert({xd, d});
  extended.insert({d, xd});
  return saturate(normalize(extended)).subsumes(xc.atom(), xd.atom());
}

/// A finite EL interpretation. Names missing from the maps have empty
/// extensions.
struct FiniteInterpretation {
  std::set<int> domain;
  std::map<std::string, std::set<int>> concept_ext;
  std::map<std::string, std::set<std::pair<int, int>>> role_ext;

  /// Every extension refers only to domain elements.
  bool well_formed() const {
    for (const auto& [_, ext] : concept_ext) {
      for (int e : ext) {
        if (!domain.count(e)) return false;
      }
    }
    for (const auto& [_, ext] : role_ext) {
      for (const auto& [x, y] : ext) {
        if (!domain.count(x) || !domain.count(y)) return false;
      }
    }
    return true;
  }

  std::set<int> extension(const Concept& c) const {
    switch (c.kind()) {
      case Concept::Kind::Top: return domain;
      case Concept::Kind::Name: {
        auto it = concept_ext.find(c.label());
        return it == concept_ext.end() ? std::set<int>{} : it->second;
      }
      case Concept::Kind::And: {
        const auto l = extension(c.left());
        const auto r = extension(c.right());
        std::set<int> out;
        std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(out, out.end()));
        return out;
      }
      case Concept::Kind::Some: {
        const auto f = extension(c.filler());
        std::set<int> out;
        if (auto it = role_ext.find(c.label()); it != role_ext.end()) {
          for (const auto& [x, y] : it->second) {
            if (f.count(y)) out.insert(x);
          }
        }
        return out;
      }
    }
    return {};
  }
};

inline bool check_gci_on_interpretation(const FiniteInterpretation& interp, const GCI& gci) {
  const auto l = interp.extension(gci.lhs);
  const auto r = interp.extension(gci.rhs);
  return std::includes(r.begin(), r.end(), l.begin(), l.end());
}

inline bool is_model_of(const FiniteInterpretation& interp, const TBox& tbox) {
  return std::all_of(tbox.begin(), tbox.end(),
                     [&](const GCI& g) { return check_gci_on_interpretation(interp, g); });
}

}  // namespace idel
