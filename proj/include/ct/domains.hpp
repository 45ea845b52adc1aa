#pragma once
#include <optional>
#include <string>

#include "ct/constraints.hpp"

namespace ct {

enum class DomainId { Eq, Dense, DenseConst };

// A concrete domain: an infinite structure with a decidable constraint
// satisfiability problem, model construction, and model extension (the
// operational form of the completion property).
class DomainHandle {
 public:
  explicit DomainHandle(DomainId id) : id_(id) {}

  DomainId id() const { return id_; }
  std::string name() const;
  bool has_equality() const { return true; }
  bool supports_completion() const { return true; }
  uint32_t max_arity() const { return 2; }  // k0 for every shipped domain
  bool knows_pred(PredId p) const;

 private:
  DomainId id_;
};

DomainHandle domain_by_name(const std::string& name);  // "eq" | "dense" | "dense-const"

// Satisfiability of a literal system over the domain.
bool csp_satisfiable(const DomainHandle& dom, const ConstraintSystem& s);

// A satisfying valuation, or nullopt when UNSAT. Every returned model passes
// eval_literal on every literal.
std::optional<Valuation> solve_model(const DomainHandle& dom, const ConstraintSystem& s);

// Extends `partial` (which must satisfy the restriction of satisfiable `s` to
// its variables) to a total model of s that agrees with partial exactly.
// Throws PreconditionViolated otherwise.
Valuation extend_model(const DomainHandle& dom, const ConstraintSystem& s, const Valuation& partial);

// Decision procedure for the dense linear order without endpoints, with
// optional pinned-constant predicates: union-find over equalities, strict and
// weak order edges, SCC analysis. See README for the exact rule.
bool dense_order_decide(const ConstraintSystem& s);

// Decision procedure for pure equality over an infinite set.
bool equality_decide(const ConstraintSystem& s);

}  // namespace ct
