#include <algorithm>
#include <functional>
#include <sstream>

#include "ct/dl.hpp"

namespace ct {

Logic parse_logic(const std::string& s) {
  if (s == "alco") return Logic::Alco;
  if (s == "alci") return Logic::Alci;
  if (s == "alcof") return Logic::Alcof;
  fail(Errc::UsageError, "unknown logic '" + s + "' (expected alco, alci, or alcof)");
}

std::string logic_name(Logic l) {
  switch (l) {
    case Logic::Alco: return "alco";
    case Logic::Alci: return "alci";
    case Logic::Alcof: return "alcof";
  }
  return "?";
}

Role role_inverse(Role r) {
  r.inverted = !r.inverted;
  return r;
}

std::string role_str(const Role& r) {
  if (r.inverted) return "(inv " + sym_name(r.name) + ")";
  return sym_name(r.name);
}

std::string role_path_str(const RolePath& p) {
  if (!p.has_role) return sym_name(p.feature);
  return "(" + role_str(p.role) + " " + sym_name(p.feature) + ")";
}

// ---------------------------------------------------------------------------
// Concept interning

namespace {

std::string concept_key(const Concept& c) {
  std::ostringstream k;
  k << static_cast<int>(c.kind) << ':' << c.name << ':' << c.role.name << (c.role.inverted ? 'i' : 'p') << ':'
    << c.lhs << ',' << c.rhs;
  for (const auto& b : c.bindings) {
    k << ';' << b.var << '=' << (b.path.has_role ? b.path.role.name : 0) << (b.path.role.inverted ? 'i' : 'p') << '.'
      << b.path.feature;
  }
  if (c.theta) k << '|' << constraint_str(c.theta);
  return k.str();
}

}  // namespace

ConceptId ConceptTable::intern(Concept c) const {
  std::string key = concept_key(c);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  ConceptId id = static_cast<ConceptId>(nodes_.size());
  nodes_.push_back(std::move(c));
  index_.emplace(std::move(key), id);
  return id;
}

const Concept& ConceptTable::at(ConceptId id) const {
  if (id >= nodes_.size()) fail(Errc::InternalInconsistency, "concept id out of range");
  return nodes_[id];
}

ConceptId ConceptTable::top() const {
  Concept c;
  c.kind = Concept::Kind::Top;
  return intern(std::move(c));
}
ConceptId ConceptTable::bot() const {
  Concept c;
  c.kind = Concept::Kind::Bot;
  return intern(std::move(c));
}
ConceptId ConceptTable::name(Sym a) const {
  Concept c;
  c.kind = Concept::Kind::Name;
  c.name = a;
  return intern(std::move(c));
}
ConceptId ConceptTable::neg_name(Sym a) const {
  Concept c;
  c.kind = Concept::Kind::NegName;
  c.name = a;
  return intern(std::move(c));
}
ConceptId ConceptTable::nominal(Sym a) const {
  Concept c;
  c.kind = Concept::Kind::Nominal;
  c.name = a;
  return intern(std::move(c));
}
ConceptId ConceptTable::neg_nominal(Sym a) const {
  Concept c;
  c.kind = Concept::Kind::NegNominal;
  c.name = a;
  return intern(std::move(c));
}
ConceptId ConceptTable::conj(ConceptId l, ConceptId r) const {
  Concept c;
  c.kind = Concept::Kind::And;
  c.lhs = l;
  c.rhs = r;
  return intern(std::move(c));
}
ConceptId ConceptTable::disj(ConceptId l, ConceptId r) const {
  Concept c;
  c.kind = Concept::Kind::Or;
  c.lhs = l;
  c.rhs = r;
  return intern(std::move(c));
}
ConceptId ConceptTable::exists(Role r, ConceptId filler) const {
  Concept c;
  c.kind = Concept::Kind::Exists;
  c.role = r;
  c.lhs = filler;
  return intern(std::move(c));
}
ConceptId ConceptTable::forall(Role r, ConceptId filler) const {
  Concept c;
  c.kind = Concept::Kind::Forall;
  c.role = r;
  c.lhs = filler;
  return intern(std::move(c));
}
ConceptId ConceptTable::cd(bool existential, std::vector<CdBinding> bs, CPtr theta) const {
  Concept c;
  c.kind = existential ? Concept::Kind::CdExists : Concept::Kind::CdForall;
  c.bindings = std::move(bs);
  c.theta = std::move(theta);
  return intern(std::move(c));
}

ConceptId ConceptTable::negate(ConceptId id) const {
  Concept c = at(id);  // copy: intern below may reallocate nodes_
  switch (c.kind) {
    case Concept::Kind::Top: return bot();
    case Concept::Kind::Bot: return top();
    case Concept::Kind::Name: return neg_name(c.name);
    case Concept::Kind::NegName: return name(c.name);
    case Concept::Kind::Nominal: return neg_nominal(c.name);
    case Concept::Kind::NegNominal: return nominal(c.name);
    case Concept::Kind::And: return disj(negate(c.lhs), negate(c.rhs));
    case Concept::Kind::Or: return conj(negate(c.lhs), negate(c.rhs));
    case Concept::Kind::Exists: return forall(c.role, negate(c.lhs));
    case Concept::Kind::Forall: return exists(c.role, negate(c.lhs));
    case Concept::Kind::CdExists: return cd(false, c.bindings, negate_nnf(c.theta));
    case Concept::Kind::CdForall: return cd(true, c.bindings, negate_nnf(c.theta));
  }
  fail(Errc::InternalInconsistency, "unhandled concept kind");
}

std::string concept_str(const ConceptTable& t, ConceptId id) {
  const Concept& c = t.at(id);
  switch (c.kind) {
    case Concept::Kind::Top: return "top";
    case Concept::Kind::Bot: return "bot";
    case Concept::Kind::Name: return sym_name(c.name);
    case Concept::Kind::NegName: return "(not " + sym_name(c.name) + ")";
    case Concept::Kind::Nominal: return "(nom " + sym_name(c.name) + ")";
    case Concept::Kind::NegNominal: return "(not (nom " + sym_name(c.name) + "))";
    case Concept::Kind::And: return "(and " + concept_str(t, c.lhs) + " " + concept_str(t, c.rhs) + ")";
    case Concept::Kind::Or: return "(or " + concept_str(t, c.lhs) + " " + concept_str(t, c.rhs) + ")";
    case Concept::Kind::Exists: return "(some " + role_str(c.role) + " " + concept_str(t, c.lhs) + ")";
    case Concept::Kind::Forall: return "(all " + role_str(c.role) + " " + concept_str(t, c.lhs) + ")";
    case Concept::Kind::CdExists:
    case Concept::Kind::CdForall: {
      std::string out = c.kind == Concept::Kind::CdExists ? "(cd-some (" : "(cd-all (";
      for (size_t i = 0; i < c.bindings.size(); ++i) {
        if (i) out += " ";
        out += "(" + std::string(sym_name(c.bindings[i].var)) + " " + role_path_str(c.bindings[i].path) + ")";
      }
      out += ") " + constraint_str(c.theta) + ")";
      return out;
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Name tables

uint32_t Ontology::individual_index(Sym a) const {
  for (uint32_t i = 0; i < individuals.size(); ++i)
    if (individuals[i] == a) return i;
  fail(Errc::UnknownIndividual, "no such individual '" + sym_name(a) + "'");
}
uint32_t Ontology::feature_index(Sym f) const {
  for (uint32_t i = 0; i < features.size(); ++i)
    if (features[i] == f) return i;
  fail(Errc::UnknownFeature, "no such concrete feature '" + sym_name(f) + "'");
}
uint32_t Ontology::role_index(Sym r) const {
  for (uint32_t i = 0; i < role_names.size(); ++i)
    if (role_names[i] == r) return i;
  fail(Errc::InternalInconsistency, "role '" + sym_name(r) + "' missing from the name table");
}

namespace {

// Rebuild the name tables from the syntax, in deterministic first-use order.
void collect_names(Ontology& o) {
  o.individuals.clear();
  o.features.clear();
  o.role_names.clear();
  o.uses_inverse = false;
  o.uses_nominals = false;
  std::set<Sym> iseen, fseen, rseen;
  auto add = [](std::vector<Sym>& v, std::set<Sym>& s, Sym x) {
    if (s.insert(x).second) v.push_back(x);
  };
  auto see_role = [&](const Role& r) {
    add(o.role_names, rseen, r.name);
    if (r.inverted) o.uses_inverse = true;
  };
  std::set<ConceptId> visited;
  std::function<void(ConceptId)> walk = [&](ConceptId id) {
    if (!visited.insert(id).second) return;
    const Concept& c = o.table.at(id);
    switch (c.kind) {
      case Concept::Kind::Nominal:
      case Concept::Kind::NegNominal:
        o.uses_nominals = true;
        add(o.individuals, iseen, c.name);
        break;
      case Concept::Kind::And:
      case Concept::Kind::Or:
        walk(c.lhs);
        walk(c.rhs);
        break;
      case Concept::Kind::Exists:
      case Concept::Kind::Forall:
        see_role(c.role);
        walk(c.lhs);
        break;
      case Concept::Kind::CdExists:
      case Concept::Kind::CdForall:
        for (const auto& b : c.bindings) {
          if (b.path.has_role) see_role(b.path.role);
          add(o.features, fseen, b.path.feature);
        }
        break;
      default: break;
    }
  };
  for (const auto& [l, r] : o.tbox) {
    walk(l);
    walk(r);
  }
  for (const auto& ca : o.concept_asserts) {
    add(o.individuals, iseen, ca.individual);
    walk(ca.concept_id);
  }
  for (const auto& ra : o.role_asserts) {
    add(o.individuals, iseen, ra.a);
    add(o.individuals, iseen, ra.b);
    add(o.role_names, rseen, ra.role);
  }
  for (const auto& xa : o.constraint_asserts)
    for (const auto& [v, t] : xa.terms) {
      add(o.features, fseen, t.feature);
      add(o.individuals, iseen, t.individual);
    }
  for (Sym r : o.functional) add(o.role_names, rseen, r);
}

// ---------------------------------------------------------------------------
// Parser

struct OntologyParser {
  Ontology o;
  bool saw_domain = false;

  Role parse_role(const SNode& n) {
    if (n.is_sym()) return Role{intern(n.text), false};
    if (n.is_list && n.items.size() == 2 && n.items[0].sym_is("inv") && n.items[1].is_sym())
      return Role{intern(n.items[1].text), true};
    fail(Errc::SyntaxError, "expected a role name or (inv r) at " + n.where());
  }

  RolePath parse_path(const SNode& n) {
    RolePath p;
    if (n.is_sym()) {
      p.feature = intern(n.text);
      return p;
    }
    if (n.is_list && n.items.size() == 2 && n.items[1].is_sym()) {
      p.has_role = true;
      p.role = parse_role(n.items[0]);
      p.feature = intern(n.items[1].text);
      return p;
    }
    fail(Errc::SyntaxError, "expected a role path 'f' or '(r f)' at " + n.where());
  }

  ConceptId parse_concept(const SNode& n) {
    if (n.is_sym()) {
      if (n.text == "top") return o.table.top();
      if (n.text == "bot") return o.table.bot();
      return o.table.name(intern(n.text));
    }
    if (n.items.empty() || !n.items[0].is_sym()) fail(Errc::SyntaxError, "malformed concept at " + n.where());
    const std::string& head = n.items[0].text;
    if (head == "not") {
      if (n.items.size() != 2) fail(Errc::SyntaxError, "(not C) expects one concept at " + n.where());
      return o.table.negate(parse_concept(n.items[1]));
    }
    if (head == "nom") {
      if (n.items.size() != 2 || !n.items[1].is_sym())
        fail(Errc::SyntaxError, "(nom a) expects an individual name at " + n.where());
      return o.table.nominal(intern(n.items[1].text));
    }
    if (head == "and" || head == "or") {
      if (n.items.size() != 3) fail(Errc::SyntaxError, "(" + head + " C D) expects two concepts at " + n.where());
      ConceptId l = parse_concept(n.items[1]);
      ConceptId r = parse_concept(n.items[2]);
      return head == "and" ? o.table.conj(l, r) : o.table.disj(l, r);
    }
    if (head == "some" || head == "all") {
      if (n.items.size() != 3) fail(Errc::SyntaxError, "(" + head + " r C) expects a role and a concept at " + n.where());
      Role r = parse_role(n.items[1]);
      ConceptId f = parse_concept(n.items[2]);
      return head == "some" ? o.table.exists(r, f) : o.table.forall(r, f);
    }
    if (head == "cd-some" || head == "cd-all") {
      if (n.items.size() != 3 || !n.items[1].is_list)
        fail(Errc::SyntaxError, "(" + head + " ((v p) ...) T) expects bindings and a constraint at " + n.where());
      std::vector<CdBinding> bs;
      std::set<Sym> vars;
      for (const auto& bn : n.items[1].items) {
        if (!bn.is_list || bn.items.size() != 2 || !bn.items[0].is_sym())
          fail(Errc::SyntaxError, "expected a binding (v p) at " + bn.where());
        CdBinding b;
        b.var = intern(bn.items[0].text);
        if (!vars.insert(b.var).second)
          fail(Errc::DuplicateCdVariable, "binding variable '" + bn.items[0].text + "' repeats at " + bn.where());
        b.path = parse_path(bn.items[1]);
        bs.push_back(std::move(b));
      }
      if (bs.empty()) fail(Errc::SyntaxError, "at least one binding required at " + n.where());
      CPtr theta = parse_constraint(n.items[2]);
      std::set<Variable> used;
      collect_variables(theta, used);
      for (const auto& v : used) {
        bool known = v.kind == Variable::Kind::Named && vars.count(v.j) != 0;
        if (!known)
          fail(Errc::SyntaxError,
               "constraint variable '" + variable_str(v) + "' is not one of the binding variables at " + n.where());
      }
      return o.table.cd(head == "cd-some", std::move(bs), std::move(theta));
    }
    fail(Errc::SyntaxError, "unknown concept form '" + head + "' at " + n.where());
  }

  // A constraint whose leaves use (feature individual) terms as arguments.
  struct AssertCtx {
    std::vector<std::pair<Variable, AssertedTerm>> terms;
    std::map<std::pair<Sym, Sym>, Variable> seen;

    Variable term_var(const SNode& n) {
      if (!n.is_list || n.items.size() != 2 || !n.items[0].is_sym() || !n.items[1].is_sym())
        fail(Errc::SyntaxError, "expected a (feature individual) term at " + n.where());
      Sym f = intern(n.items[0].text);
      Sym a = intern(n.items[1].text);
      auto key = std::make_pair(f, a);
      auto it = seen.find(key);
      if (it != seen.end()) return it->second;
      Variable v = Variable::named(n.items[0].text + "(" + n.items[1].text + ")");
      seen.emplace(key, v);
      terms.emplace_back(v, AssertedTerm{f, a});
      return v;
    }

    Atom atom_form(const SNode& n) {
      if (!n.is_list || n.items.empty() || !n.items[0].is_sym())
        fail(Errc::SyntaxError, "expected predicate form at " + n.where());
      const std::string& head = n.items[0].text;
      if (head == "lt" || head == "eq") {
        if (n.items.size() != 3) fail(Errc::SyntaxError, "(" + head + " t1 t2) expects 2 terms at " + n.where());
        return Atom{intern_pred(head, 2), {term_var(n.items[1]), term_var(n.items[2])}};
      }
      if (head == "eqC" || head == "ltC" || head == "gtC") {
        if (n.items.size() != 3) fail(Errc::SyntaxError, "(" + head + " q t) expects rational + term at " + n.where());
        Rational q = parse_rational(n.at(1).text);
        return Atom{intern_pred_const(head, q), {term_var(n.items[2])}};
      }
      if (head == "p") {
        if (n.items.size() < 2) fail(Errc::SyntaxError, "(p name term...) at " + n.where());
        Atom a;
        a.pred = intern_pred(n.at(1).text, static_cast<uint32_t>(n.items.size() - 2));
        for (size_t i = 2; i < n.items.size(); ++i) a.args.push_back(term_var(n.items[i]));
        return a;
      }
      fail(Errc::SyntaxError, "unknown predicate '" + head + "' at " + n.where());
    }

    CPtr go(const SNode& n) {
      if (n.is_sym()) {
        if (n.text == "true") return c_true();
        if (n.text == "false") return c_false();
        fail(Errc::SyntaxError, "expected constraint, got '" + n.text + "' at " + n.where());
      }
      if (n.items.empty() || !n.items[0].is_sym()) fail(Errc::SyntaxError, "malformed constraint at " + n.where());
      const std::string& head = n.items[0].text;
      if (head == "not") {
        if (n.items.size() != 2) fail(Errc::SyntaxError, "(not T) expects one operand at " + n.where());
        return c_not(go(n.items[1]));
      }
      if (head == "and" || head == "or") {
        std::vector<CPtr> kids;
        for (size_t i = 1; i < n.items.size(); ++i) kids.push_back(go(n.items[i]));
        return head == "and" ? c_and(std::move(kids)) : c_or(std::move(kids));
      }
      return c_atom(atom_form(n));
    }
  };

  void parse_form(const SNode& n) {
    if (!n.is_list || n.items.empty() || !n.items[0].is_sym())
      fail(Errc::SyntaxError, "expected a top-level form at " + n.where());
    const std::string& head = n.items[0].text;
    if (head == "domain") {
      if (n.items.size() != 2 || !n.items[1].is_sym())
        fail(Errc::SyntaxError, "(domain name) expects a domain name at " + n.where());
      if (saw_domain) fail(Errc::SyntaxError, "duplicate domain declaration at " + n.where());
      o.domain = domain_by_name(n.items[1].text).id();
      saw_domain = true;
      return;
    }
    if (head == "sub") {
      if (n.items.size() != 3) fail(Errc::SyntaxError, "(sub C D) expects two concepts at " + n.where());
      ConceptId l = parse_concept(n.items[1]);
      ConceptId r = parse_concept(n.items[2]);
      o.tbox.emplace_back(l, r);
      return;
    }
    if (head == "instance") {
      if (n.items.size() != 3 || !n.items[1].is_sym())
        fail(Errc::SyntaxError, "(instance a C) expects an individual and a concept at " + n.where());
      o.concept_asserts.push_back({intern(n.items[1].text), parse_concept(n.items[2])});
      return;
    }
    if (head == "related") {
      if (n.items.size() != 4 || !n.items[1].is_sym() || !n.items[2].is_sym())
        fail(Errc::SyntaxError, "(related a b r) expects two individuals and a role at " + n.where());
      Sym a = intern(n.items[1].text);
      Sym b = intern(n.items[2].text);
      Role r = parse_role(n.items[3]);
      if (r.inverted)
        o.role_asserts.push_back({b, a, r.name});  // (a,b):r^- names the assertion (b,a):r
      else
        o.role_asserts.push_back({a, b, r.name});
      return;
    }
    if (head == "functional") {
      if (n.items.size() != 2 || !n.items[1].is_sym())
        fail(Errc::SyntaxError, "(functional r) expects a role name at " + n.where());
      o.functional.insert(intern(n.items[1].text));
      return;
    }
    if (head == "assert-constraint") {
      if (n.items.size() != 2) fail(Errc::SyntaxError, "(assert-constraint T) expects one constraint at " + n.where());
      AssertCtx ctx;
      CPtr theta = ctx.go(n.items[1]);
      o.constraint_asserts.push_back({std::move(theta), std::move(ctx.terms)});
      return;
    }
    fail(Errc::SyntaxError, "unknown form '" + head + "' at " + n.where());
  }
};

}  // namespace

Ontology parse_ontology(const std::string& text) {
  OntologyParser p;
  for (const auto& form : parse_sexprs(text)) p.parse_form(form);
  collect_names(p.o);
  return std::move(p.o);
}

Ontology normalize(const Ontology& o) {
  Ontology n = o;
  ConceptId top = n.table.top();
  for (auto& [l, r] : n.tbox) {
    if (l != top) {
      r = n.table.disj(n.table.negate(l), r);
      l = top;
    }
  }
  if (n.individuals.empty()) n.concept_asserts.push_back({intern("a0"), top});
  n.normalized = true;
  collect_names(n);
  return n;
}

Ontology quotient(const Ontology& o, const std::vector<uint32_t>& block_of) {
  if (block_of.size() != o.individuals.size())
    fail(Errc::ShapeMismatch, "partition size differs from the individual count");
  // Least member of each block names the merged individual.
  std::map<uint32_t, uint32_t> rep_of_block;
  for (uint32_t i = 0; i < block_of.size(); ++i)
    if (!rep_of_block.count(block_of[i])) rep_of_block[block_of[i]] = i;  // first occurrence = least index
  auto rep = [&](Sym a) { return o.individuals[rep_of_block.at(block_of[o.individual_index(a)])]; };

  Ontology n;
  n.domain = o.domain;
  n.table = o.table;
  n.functional = o.functional;
  n.normalized = o.normalized;

  std::map<ConceptId, ConceptId> memo;
  std::function<ConceptId(ConceptId)> rw = [&](ConceptId id) -> ConceptId {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Concept c = o.table.at(id);
    ConceptId out;
    switch (c.kind) {
      case Concept::Kind::Nominal: out = n.table.nominal(rep(c.name)); break;
      case Concept::Kind::NegNominal: out = n.table.neg_nominal(rep(c.name)); break;
      case Concept::Kind::And: out = n.table.conj(rw(c.lhs), rw(c.rhs)); break;
      case Concept::Kind::Or: out = n.table.disj(rw(c.lhs), rw(c.rhs)); break;
      case Concept::Kind::Exists: out = n.table.exists(c.role, rw(c.lhs)); break;
      case Concept::Kind::Forall: out = n.table.forall(c.role, rw(c.lhs)); break;
      default: out = id; break;  // leaves are table-stable
    }
    memo.emplace(id, out);
    return out;
  };

  for (const auto& [l, r] : o.tbox) n.tbox.emplace_back(rw(l), rw(r));
  for (const auto& ca : o.concept_asserts) n.concept_asserts.push_back({rep(ca.individual), rw(ca.concept_id)});
  for (const auto& ra : o.role_asserts) n.role_asserts.push_back({rep(ra.a), rep(ra.b), ra.role});
  for (const auto& xa : o.constraint_asserts) {
    ConstraintAssertion out;
    std::map<Variable, Variable> vmap;
    std::map<std::pair<Sym, Sym>, Variable> seen;
    for (const auto& [v, t] : xa.terms) {
      Sym a2 = rep(t.individual);
      auto key = std::make_pair(t.feature, a2);
      auto it = seen.find(key);
      Variable nv;
      if (it != seen.end()) {
        nv = it->second;
      } else {
        nv = Variable::named(sym_name(t.feature) + "(" + sym_name(a2) + ")");
        seen.emplace(key, nv);
        out.terms.emplace_back(nv, AssertedTerm{t.feature, a2});
      }
      vmap[v] = nv;
    }
    out.theta = substitute(xa.theta, vmap);
    n.constraint_asserts.push_back(std::move(out));
  }
  collect_names(n);
  return n;
}

std::string partition_str(const Ontology& o, const std::vector<std::vector<uint32_t>>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    out += "{";
    for (size_t i = 0; i < b.size(); ++i) {
      if (i) out += ",";
      out += sym_name(o.individuals[b[i]]);
    }
    out += "}";
  }
  return out;
}

}  // namespace ct
