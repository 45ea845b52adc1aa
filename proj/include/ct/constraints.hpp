#pragma once
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ct/error.hpp"
#include "ct/rational.hpp"
#include "ct/sexpr.hpp"

namespace ct {

// Process-wide string interning. Stable within a process; ids are only handles,
// every externally visible ordering goes through the spelled-out name.
using Sym = uint32_t;
Sym intern(const std::string& s);
const std::string& sym_name(Sym s);

// A variable is either a free name or one of the automaton registers.
// Registers and named variables share one identifier space so the same
// constraint type serves raw CSP inputs and transition guards.
struct Variable {
  enum class Kind : uint8_t { Named = 0, Current = 1, Child = 2, Parent = 3 };
  Kind kind = Kind::Named;
  uint32_t j = 0;  // register index (1-based), or the interned symbol for Named
  int32_t i = -1;  // child direction (0-based); -1 otherwise

  static Variable named(Sym s) { return {Kind::Named, s, -1}; }
  static Variable named(const std::string& s) { return {Kind::Named, intern(s), -1}; }
  static Variable current(uint32_t j) { return {Kind::Current, j, -1}; }
  static Variable child(uint32_t dir, uint32_t j) { return {Kind::Child, j, static_cast<int32_t>(dir)}; }
  static Variable parent(uint32_t j) { return {Kind::Parent, j, -1}; }

  friend bool operator==(const Variable& a, const Variable& b) {
    return a.kind == b.kind && a.j == b.j && a.i == b.i;
  }
  friend auto operator<=>(const Variable& a, const Variable& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    if (a.i != b.i) return a.i <=> b.i;
    return a.j <=> b.j;
  }
};
std::string variable_str(const Variable& v);  // x<j>, x<j>.<i>, x<j>.up, or the name

// Predicate symbols are interned. The constant predicates of the dense-const
// domain carry their rational parameter as part of the symbol identity.
struct Predicate {
  std::string name;
  uint32_t arity = 0;
  bool has_param = false;
  Rational param;
};
using PredId = uint32_t;
PredId intern_pred(const std::string& name, uint32_t arity);
PredId intern_pred_const(const std::string& name, const Rational& param);  // arity 1
const Predicate& pred_info(PredId p);
std::string pred_str(PredId p);  // "lt", "eqC 18", ...
// Deterministic predicate ordering: by name, then by parameter value.
bool pred_less(PredId a, PredId b);

struct Atom {
  PredId pred = 0;
  std::vector<Variable> args;  // size == arity; repetitions allowed

  friend bool operator==(const Atom& a, const Atom& b) { return a.pred == b.pred && a.args == b.args; }
  friend auto operator<=>(const Atom& a, const Atom& b) {
    if (a.pred != b.pred) return a.pred <=> b.pred;
    return a.args <=> b.args;
  }
};

// Immutable constraint tree. True/False are the canonical empty conjunction
// and disjunction.
struct Constraint;
using CPtr = std::shared_ptr<const Constraint>;
struct Constraint {
  enum class Kind : uint8_t { True, False, Leaf, Not, And, Or };
  Kind kind = Kind::True;
  Atom atom;               // Leaf
  std::vector<CPtr> kids;  // Not: 1 child; And/Or: >= 1 after normalization
};

CPtr c_true();
CPtr c_false();
CPtr c_atom(Atom a);
CPtr c_not(CPtr c);
CPtr c_and(std::vector<CPtr> kids);  // empty -> True
CPtr c_or(std::vector<CPtr> kids);   // empty -> False
CPtr c_eq(Variable a, Variable b);   // convenience: (eq a b)
CPtr c_lt(Variable a, Variable b);

struct Literal {
  Atom atom;
  bool positive = true;
  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal& a, const Literal& b) {
    if (a.atom != b.atom) return a.atom <=> b.atom;
    return a.positive <=> b.positive;
  }
};

// Finite set of literals, kept sorted and duplicate-free.
struct ConstraintSystem {
  std::vector<Literal> lits;

  void add(Literal l);
  void add(Atom a, bool positive) { add(Literal{std::move(a), positive}); }
  void merge(const ConstraintSystem& other);
  std::vector<Variable> variables() const;  // sorted, unique
  bool empty() const { return lits.empty(); }
  size_t size() const { return lits.size(); }
  friend bool operator==(const ConstraintSystem&, const ConstraintSystem&) = default;
};

struct Valuation {
  std::map<Variable, Rational> m;

  bool has(const Variable& v) const { return m.count(v) != 0; }
  const Rational& at(const Variable& v) const;
  void set(const Variable& v, const Rational& r) { m[v] = r; }
  size_t size() const { return m.size(); }
};

class DomainHandle;  // domains.hpp

// Truth of theta under v in the domain structure.
bool evaluate(const CPtr& theta, const Valuation& v, const DomainHandle& dom);
bool eval_atom(const Atom& a, const Valuation& v, const DomainHandle& dom);
bool eval_literal(const Literal& l, const Valuation& v, const DomainHandle& dom);

// Logically equivalent to ¬theta with Not only directly above atoms.
CPtr negate_nnf(const CPtr& theta);
// theta itself in negation normal form.
CPtr nnf_of(const CPtr& theta);

// { l in s | vars(l) ⊆ xs }
ConstraintSystem restrict_system(const ConstraintSystem& s, const std::set<Variable>& xs);

// True iff s mentions only preds/xs and for every pred of arity k and every
// k-tuple over xs exactly one polarity is present.
bool is_complete(const ConstraintSystem& s, const std::vector<PredId>& preds, const std::vector<Variable>& xs);

// Structural copy with variables replaced; m must be injective on vars(theta).
CPtr rename(const CPtr& theta, const std::map<Variable, Variable>& m);
// Like rename but without the injectivity requirement (a substitution may
// merge variables); unmapped variables are kept.
CPtr substitute(const CPtr& theta, const std::map<Variable, Variable>& m);

void collect_atoms(const CPtr& theta, std::vector<Atom>& out);
void collect_variables(const CPtr& theta, std::set<Variable>& out);
size_t constraint_size(const CPtr& theta);  // nodes, atoms weighted by 1 + arity

// Textual syntax:  (lt a b) (eq a b) (eqC 18 v) (ltC 18 v) (gtC 18 v)
// (p name arg...) (not T) (and T...) (or T...) true false
// Registers: x<j>, x<j>.<i>, x<j>.up; anything else is a named variable.
CPtr parse_constraint(const SNode& n);
CPtr parse_constraint(const std::string& text);
std::string constraint_str(const CPtr& theta);
std::string atom_str(const Atom& a);
std::string literal_str(const Literal& l);
Variable parse_variable(const std::string& token);

// A literal system is a sequence of top-level literal forms.
ConstraintSystem parse_system(const std::string& text);
std::string system_str(const ConstraintSystem& s);

}  // namespace ct
