#include "ct/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "ct/domains.hpp"

namespace ct {

// ---------------------------------------------------------------- interning

namespace {
struct SymTab {
  std::mutex mu;
  std::vector<std::string> names;
  std::unordered_map<std::string, Sym> ids;
};
SymTab& symtab() {
  static SymTab t;
  return t;
}

struct PredTab {
  std::mutex mu;
  std::vector<Predicate> preds;
  std::map<std::tuple<std::string, uint32_t, bool, Rational>, PredId> ids;
};
PredTab& predtab() {
  static PredTab t;
  return t;
}
}  // namespace

Sym intern(const std::string& s) {
  auto& t = symtab();
  std::lock_guard<std::mutex> lk(t.mu);
  auto it = t.ids.find(s);
  if (it != t.ids.end()) return it->second;
  Sym id = static_cast<Sym>(t.names.size());
  t.names.push_back(s);
  t.ids.emplace(s, id);
  return id;
}

const std::string& sym_name(Sym s) {
  auto& t = symtab();
  std::lock_guard<std::mutex> lk(t.mu);
  return t.names.at(s);
}

static PredId intern_pred_raw(Predicate p) {
  auto& t = predtab();
  std::lock_guard<std::mutex> lk(t.mu);
  auto key = std::make_tuple(p.name, p.arity, p.has_param, p.param);
  auto it = t.ids.find(key);
  if (it != t.ids.end()) return it->second;
  PredId id = static_cast<PredId>(t.preds.size());
  t.preds.push_back(std::move(p));
  t.ids.emplace(std::move(key), id);
  return id;
}

PredId intern_pred(const std::string& name, uint32_t arity) {
  return intern_pred_raw(Predicate{name, arity, false, Rational(0)});
}

PredId intern_pred_const(const std::string& name, const Rational& param) {
  return intern_pred_raw(Predicate{name, 1, true, param});
}

const Predicate& pred_info(PredId p) {
  auto& t = predtab();
  std::lock_guard<std::mutex> lk(t.mu);
  return t.preds.at(p);
}

std::string pred_str(PredId p) {
  const Predicate& q = pred_info(p);
  if (!q.has_param) return q.name;
  return q.name + " " + rational_str(q.param);
}

bool pred_less(PredId a, PredId b) {
  if (a == b) return false;
  const Predicate& pa = pred_info(a);
  const Predicate& pb = pred_info(b);
  if (pa.name != pb.name) return pa.name < pb.name;
  if (pa.has_param != pb.has_param) return pa.has_param < pb.has_param;
  if (pa.has_param && pa.param != pb.param) return pa.param < pb.param;
  return pa.arity < pb.arity;
}

std::string variable_str(const Variable& v) {
  switch (v.kind) {
    case Variable::Kind::Named: return sym_name(v.j);
    case Variable::Kind::Current: return "x" + std::to_string(v.j);
    case Variable::Kind::Child: return "x" + std::to_string(v.j) + "." + std::to_string(v.i);
    case Variable::Kind::Parent: return "x" + std::to_string(v.j) + ".up";
  }
  return "?";
}

// ------------------------------------------------------------- constructors

CPtr c_true() {
  static CPtr t = std::make_shared<Constraint>(Constraint{Constraint::Kind::True, {}, {}});
  return t;
}
CPtr c_false() {
  static CPtr f = std::make_shared<Constraint>(Constraint{Constraint::Kind::False, {}, {}});
  return f;
}
CPtr c_atom(Atom a) {
  auto c = std::make_shared<Constraint>();
  c->kind = Constraint::Kind::Leaf;
  c->atom = std::move(a);
  return c;
}
CPtr c_not(CPtr x) {
  auto c = std::make_shared<Constraint>();
  c->kind = Constraint::Kind::Not;
  c->kids.push_back(std::move(x));
  return c;
}
CPtr c_and(std::vector<CPtr> kids) {
  if (kids.empty()) return c_true();
  if (kids.size() == 1) return kids[0];
  auto c = std::make_shared<Constraint>();
  c->kind = Constraint::Kind::And;
  c->kids = std::move(kids);
  return c;
}
CPtr c_or(std::vector<CPtr> kids) {
  if (kids.empty()) return c_false();
  if (kids.size() == 1) return kids[0];
  auto c = std::make_shared<Constraint>();
  c->kind = Constraint::Kind::Or;
  c->kids = std::move(kids);
  return c;
}
CPtr c_eq(Variable a, Variable b) { return c_atom(Atom{intern_pred("eq", 2), {a, b}}); }
CPtr c_lt(Variable a, Variable b) { return c_atom(Atom{intern_pred("lt", 2), {a, b}}); }

// ------------------------------------------------------------------ system

void ConstraintSystem::add(Literal l) {
  auto it = std::lower_bound(lits.begin(), lits.end(), l);
  if (it != lits.end() && *it == l) return;
  lits.insert(it, std::move(l));
}

void ConstraintSystem::merge(const ConstraintSystem& other) {
  for (const auto& l : other.lits) add(l);
}

std::vector<Variable> ConstraintSystem::variables() const {
  std::set<Variable> s;
  for (const auto& l : lits)
    for (const auto& v : l.atom.args) s.insert(v);
  return std::vector<Variable>(s.begin(), s.end());
}

const Rational& Valuation::at(const Variable& v) const {
  auto it = m.find(v);
  if (it == m.end()) fail(Errc::UnboundVariable, "no value for " + variable_str(v));
  return it->second;
}

// -------------------------------------------------------------- evaluation

bool eval_atom(const Atom& a, const Valuation& v, const DomainHandle& dom) {
  if (!dom.knows_pred(a.pred)) fail(Errc::UnknownPredicate, pred_str(a.pred) + " not in domain " + dom.name());
  const Predicate& p = pred_info(a.pred);
  if (a.args.size() != p.arity) fail(Errc::ArityMismatch, atom_str(a));
  if (p.name == "eq") return v.at(a.args[0]) == v.at(a.args[1]);
  if (p.name == "lt") return v.at(a.args[0]) < v.at(a.args[1]);
  if (p.name == "eqC") return v.at(a.args[0]) == p.param;
  if (p.name == "ltC") return v.at(a.args[0]) < p.param;
  if (p.name == "gtC") return v.at(a.args[0]) > p.param;
  fail(Errc::UnknownPredicate, pred_str(a.pred));
}

bool eval_literal(const Literal& l, const Valuation& v, const DomainHandle& dom) {
  return eval_atom(l.atom, v, dom) == l.positive;
}

bool evaluate(const CPtr& theta, const Valuation& v, const DomainHandle& dom) {
  switch (theta->kind) {
    case Constraint::Kind::True: return true;
    case Constraint::Kind::False: return false;
    case Constraint::Kind::Leaf: return eval_atom(theta->atom, v, dom);
    case Constraint::Kind::Not: return !evaluate(theta->kids[0], v, dom);
    case Constraint::Kind::And:
      for (const auto& k : theta->kids)
        if (!evaluate(k, v, dom)) return false;
      return true;
    case Constraint::Kind::Or:
      for (const auto& k : theta->kids)
        if (evaluate(k, v, dom)) return true;
      return false;
  }
  return false;
}

CPtr negate_nnf(const CPtr& theta) {
  switch (theta->kind) {
    case Constraint::Kind::True: return c_false();
    case Constraint::Kind::False: return c_true();
    case Constraint::Kind::Leaf: return c_not(theta);
    case Constraint::Kind::Not: {
      // push through: the operand is flipped back to positive position
      const CPtr& inner = theta->kids[0];
      if (inner->kind == Constraint::Kind::Leaf) return inner;
      // ¬¬X and negations over composites: recurse twice
      return nnf_of(inner);
    }
    case Constraint::Kind::And: {
      std::vector<CPtr> kids;
      kids.reserve(theta->kids.size());
      for (const auto& k : theta->kids) kids.push_back(negate_nnf(k));
      return c_or(std::move(kids));
    }
    case Constraint::Kind::Or: {
      std::vector<CPtr> kids;
      kids.reserve(theta->kids.size());
      for (const auto& k : theta->kids) kids.push_back(negate_nnf(k));
      return c_and(std::move(kids));
    }
  }
  return c_false();
}

// NNF with negation pushed to atoms (public helper used by negate_nnf and the
// ontology normalizer).
CPtr nnf_of(const CPtr& theta) {
  switch (theta->kind) {
    case Constraint::Kind::True:
    case Constraint::Kind::False:
    case Constraint::Kind::Leaf: return theta;
    case Constraint::Kind::Not: return negate_nnf(theta->kids[0]);
    case Constraint::Kind::And: {
      std::vector<CPtr> kids;
      for (const auto& k : theta->kids) kids.push_back(nnf_of(k));
      return c_and(std::move(kids));
    }
    case Constraint::Kind::Or: {
      std::vector<CPtr> kids;
      for (const auto& k : theta->kids) kids.push_back(nnf_of(k));
      return c_or(std::move(kids));
    }
  }
  return theta;
}

ConstraintSystem restrict_system(const ConstraintSystem& s, const std::set<Variable>& xs) {
  ConstraintSystem out;
  for (const auto& l : s.lits) {
    bool ok = true;
    for (const auto& v : l.atom.args)
      if (!xs.count(v)) {
        ok = false;
        break;
      }
    if (ok) out.add(l);
  }
  return out;
}

bool is_complete(const ConstraintSystem& s, const std::vector<PredId>& preds, const std::vector<Variable>& xs) {
  std::set<PredId> pset(preds.begin(), preds.end());
  std::set<Variable> vset(xs.begin(), xs.end());
  for (const auto& l : s.lits) {
    if (!pset.count(l.atom.pred)) return false;
    for (const auto& v : l.atom.args)
      if (!vset.count(v)) return false;
  }
  // every tuple must occur with exactly one polarity
  std::map<Atom, int> seen;  // +1 positive, +2 negative
  for (const auto& l : s.lits) seen[l.atom] |= l.positive ? 1 : 2;
  for (const auto& [a, mask] : seen)
    if (mask == 3) return false;  // both polarities
  uint64_t expected = 0;
  for (PredId p : preds) {
    uint64_t tuples = 1;
    for (uint32_t k = 0; k < pred_info(p).arity; ++k) tuples *= xs.size();
    expected += tuples;
  }
  return seen.size() == expected;
}

CPtr rename(const CPtr& theta, const std::map<Variable, Variable>& m) {
  // injectivity on the variables actually used
  std::set<Variable> used;
  collect_variables(theta, used);
  std::set<Variable> image;
  for (const auto& v : used) {
    auto it = m.find(v);
    Variable tgt = (it == m.end()) ? v : it->second;
    if (!image.insert(tgt).second) fail(Errc::NonInjectiveRename, "two variables map to " + variable_str(tgt));
  }
  struct Walk {
    const std::map<Variable, Variable>& m;
    CPtr go(const CPtr& c) {
      switch (c->kind) {
        case Constraint::Kind::True:
        case Constraint::Kind::False: return c;
        case Constraint::Kind::Leaf: {
          Atom a = c->atom;
          for (auto& v : a.args) {
            auto it = m.find(v);
            if (it != m.end()) v = it->second;
          }
          return c_atom(std::move(a));
        }
        case Constraint::Kind::Not: return c_not(go(c->kids[0]));
        case Constraint::Kind::And: {
          std::vector<CPtr> kids;
          for (const auto& k : c->kids) kids.push_back(go(k));
          auto r = std::make_shared<Constraint>();
          r->kind = Constraint::Kind::And;
          r->kids = std::move(kids);
          return r;
        }
        case Constraint::Kind::Or: {
          std::vector<CPtr> kids;
          for (const auto& k : c->kids) kids.push_back(go(k));
          auto r = std::make_shared<Constraint>();
          r->kind = Constraint::Kind::Or;
          r->kids = std::move(kids);
          return r;
        }
      }
      return c;
    }
  } w{m};
  return w.go(theta);
}

CPtr substitute(const CPtr& theta, const std::map<Variable, Variable>& m) {
  switch (theta->kind) {
    case Constraint::Kind::True:
    case Constraint::Kind::False: return theta;
    case Constraint::Kind::Leaf: {
      Atom a = theta->atom;
      for (auto& v : a.args) {
        auto it = m.find(v);
        if (it != m.end()) v = it->second;
      }
      return c_atom(std::move(a));
    }
    case Constraint::Kind::Not: return c_not(substitute(theta->kids[0], m));
    case Constraint::Kind::And:
    case Constraint::Kind::Or: {
      std::vector<CPtr> kids;
      kids.reserve(theta->kids.size());
      for (const auto& k : theta->kids) kids.push_back(substitute(k, m));
      auto r = std::make_shared<Constraint>();
      r->kind = theta->kind;
      r->kids = std::move(kids);
      return r;
    }
  }
  return theta;
}

void collect_atoms(const CPtr& theta, std::vector<Atom>& out) {
  switch (theta->kind) {
    case Constraint::Kind::True:
    case Constraint::Kind::False: return;
    case Constraint::Kind::Leaf: out.push_back(theta->atom); return;
    default:
      for (const auto& k : theta->kids) collect_atoms(k, out);
  }
}

void collect_variables(const CPtr& theta, std::set<Variable>& out) {
  std::vector<Atom> atoms;
  collect_atoms(theta, atoms);
  for (const auto& a : atoms)
    for (const auto& v : a.args) out.insert(v);
}

size_t constraint_size(const CPtr& theta) {
  switch (theta->kind) {
    case Constraint::Kind::True:
    case Constraint::Kind::False: return 1;
    case Constraint::Kind::Leaf: return 1 + theta->atom.args.size();
    default: {
      size_t n = 1;
      for (const auto& k : theta->kids) n += constraint_size(k);
      return n;
    }
  }
}

// ----------------------------------------------------------------- parsing

Variable parse_variable(const std::string& tok) {
  if (tok.size() >= 2 && tok[0] == 'x' && std::isdigit(static_cast<unsigned char>(tok[1]))) {
    size_t i = 1;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) i++;
    uint32_t j = static_cast<uint32_t>(std::stoul(tok.substr(1, i - 1)));
    if (i == tok.size()) return Variable::current(j);
    if (tok[i] == '.') {
      std::string rest = tok.substr(i + 1);
      if (rest == "up") return Variable::parent(j);
      if (!rest.empty() && std::all_of(rest.begin(), rest.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c));
          }))
        return Variable::child(static_cast<uint32_t>(std::stoul(rest)), j);
    }
  }
  return Variable::named(tok);
}

namespace {

Atom parse_atom_form(const SNode& n) {
  if (!n.is_list || n.items.empty() || !n.items[0].is_sym())
    fail(Errc::SyntaxError, "expected predicate form at " + n.where());
  const std::string& head = n.items[0].text;
  auto arg = [&](size_t i) { return parse_variable(n.at(i).text); };
  if (head == "lt" || head == "eq") {
    if (n.items.size() != 3) fail(Errc::SyntaxError, "(" + head + " a b) expects 2 arguments at " + n.where());
    return Atom{intern_pred(head, 2), {arg(1), arg(2)}};
  }
  if (head == "eqC" || head == "ltC" || head == "gtC") {
    if (n.items.size() != 3) fail(Errc::SyntaxError, "(" + head + " q v) expects rational + variable at " + n.where());
    Rational q = parse_rational(n.at(1).text);
    return Atom{intern_pred_const(head, q), {arg(2)}};
  }
  if (head == "p") {
    if (n.items.size() < 2) fail(Errc::SyntaxError, "(p name arg...) at " + n.where());
    const std::string& name = n.at(1).text;
    Atom a;
    a.pred = intern_pred(name, static_cast<uint32_t>(n.items.size() - 2));
    for (size_t i = 2; i < n.items.size(); ++i) a.args.push_back(arg(i));
    return a;
  }
  fail(Errc::SyntaxError, "unknown predicate '" + head + "' at " + n.where());
}

}  // namespace

CPtr parse_constraint(const SNode& n) {
  if (n.is_sym()) {
    if (n.text == "true") return c_true();
    if (n.text == "false") return c_false();
    fail(Errc::SyntaxError, "expected constraint, got '" + n.text + "' at " + n.where());
  }
  if (n.items.empty() || !n.items[0].is_sym()) fail(Errc::SyntaxError, "malformed constraint at " + n.where());
  const std::string& head = n.items[0].text;
  if (head == "not") {
    if (n.items.size() != 2) fail(Errc::SyntaxError, "(not T) expects one operand at " + n.where());
    return c_not(parse_constraint(n.items[1]));
  }
  if (head == "and" || head == "or") {
    std::vector<CPtr> kids;
    for (size_t i = 1; i < n.items.size(); ++i) kids.push_back(parse_constraint(n.items[i]));
    return head == "and" ? c_and(std::move(kids)) : c_or(std::move(kids));
  }
  return c_atom(parse_atom_form(n));
}

CPtr parse_constraint(const std::string& text) {
  auto forms = parse_sexprs(text);
  if (forms.size() != 1) fail(Errc::SyntaxError, "expected exactly one constraint form");
  return parse_constraint(forms[0]);
}

std::string atom_str(const Atom& a) {
  const Predicate& p = pred_info(a.pred);
  std::ostringstream out;
  out << "(";
  bool builtin = (p.name == "lt" || p.name == "eq" || p.name == "eqC" || p.name == "ltC" || p.name == "gtC");
  if (!builtin) out << "p ";
  out << p.name;
  if (p.has_param) out << " " << rational_str(p.param);
  for (const auto& v : a.args) out << " " << variable_str(v);
  out << ")";
  return out.str();
}

std::string literal_str(const Literal& l) {
  if (l.positive) return atom_str(l.atom);
  return "(not " + atom_str(l.atom) + ")";
}

std::string constraint_str(const CPtr& c) {
  switch (c->kind) {
    case Constraint::Kind::True: return "true";
    case Constraint::Kind::False: return "false";
    case Constraint::Kind::Leaf: return atom_str(c->atom);
    case Constraint::Kind::Not: return "(not " + constraint_str(c->kids[0]) + ")";
    case Constraint::Kind::And:
    case Constraint::Kind::Or: {
      std::string out = c->kind == Constraint::Kind::And ? "(and" : "(or";
      for (const auto& k : c->kids) out += " " + constraint_str(k);
      return out + ")";
    }
  }
  return "?";
}

ConstraintSystem parse_system(const std::string& text) {
  ConstraintSystem s;
  for (const auto& n : parse_sexprs(text)) {
    if (n.is_list && !n.items.empty() && n.items[0].sym_is("not")) {
      s.add(parse_atom_form(n.at(1)), false);
    } else {
      s.add(parse_atom_form(n), true);
    }
  }
  return s;
}

std::string system_str(const ConstraintSystem& s) {
  std::string out;
  for (const auto& l : s.lits) {
    if (!out.empty()) out += " ";
    out += literal_str(l);
  }
  return out;
}

}  // namespace ct
