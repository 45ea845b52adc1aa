#pragma once
#include <cstdint>
#include <map>
#include <vector>

#include "ct/constraints.hpp"
#include "ct/domains.hpp"

namespace ct {

struct Budget {
  size_t max_atoms = 4096;
  size_t max_types = 200000;
  size_t max_transitions = 1000000;
};

// All atoms P(u...) with P drawn from a fixed predicate list and arguments
// drawn from the registers x_1..x_beta and x_j^i for directions i < d,
// enumerated in a canonical deterministic order.
struct AtomUniverse {
  uint32_t beta = 0;
  uint32_t d = 0;
  std::vector<PredId> preds;      // canonically sorted, deduplicated
  std::vector<Variable> regs;     // Current(1..beta), then Child(i,1..beta) per direction
  std::vector<Atom> atoms;        // canonical order: by predicate, then argument tuple
  std::map<Atom, uint32_t> index;
  std::vector<uint32_t> cur_idx;                // atoms whose arguments are all Current
  std::vector<std::vector<uint32_t>> proj_idx;  // per direction i: cur_idx with Current(j) -> Child(i,j)

  size_t size() const { return atoms.size(); }
  bool contains(const Atom& a) const { return index.count(a) != 0; }
  uint32_t index_of(const Atom& a) const;  // throws AtomOutsideUniverse
};

AtomUniverse build_universe(std::vector<PredId> preds, uint32_t beta, uint32_t d, const Budget& budget);

// A complete polarity assignment over a universe's atoms.
struct SymbolicType {
  std::vector<bool> bits;
  bool operator==(const SymbolicType&) const = default;
  bool operator<(const SymbolicType& o) const { return bits < o.bits; }
};

using Fingerprint = std::vector<bool>;

// The unique type realized by a register valuation.
SymbolicType type_of_values(const AtomUniverse& u, const DomainHandle& dom, const Valuation& v);

// The type's literals as a constraint system.
ConstraintSystem type_system(const AtomUniverse& u, const SymbolicType& t);

bool is_satisfiable_type(const AtomUniverse& u, const DomainHandle& dom, const SymbolicType& t);

// Whether every valuation realizing t satisfies theta; every atom of theta
// must lie in the universe.
bool entails(const AtomUniverse& u, const SymbolicType& t, const CPtr& theta);

// Child-coherence: the bit t assigns to P(x^i...) equals the bit child
// assigns to P(x...), for every all-Current atom P(x...).
bool projection_compatible(const AtomUniverse& u, const SymbolicType& t, uint32_t dir, const SymbolicType& child);

Fingerprint fingerprint_current(const AtomUniverse& u, const SymbolicType& t);
Fingerprint fingerprint_child(const AtomUniverse& u, const SymbolicType& t, uint32_t dir);

// All satisfiable types over the universe, deterministically ordered;
// throws BudgetExceeded past budget.max_types.
std::vector<SymbolicType> enumerate_satisfiable_types(const AtomUniverse& u, const DomainHandle& dom,
                                                      const Budget& budget);

}  // namespace ct
