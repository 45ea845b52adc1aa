#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ct/bta.hpp"
#include "ct/constraints.hpp"
#include "ct/domains.hpp"
#include "ct/symtypes.hpp"

namespace ct {

struct TgcaTransition {
  uint32_t src = 0;
  Sym letter = 0;
  CPtr guard;
  std::vector<uint32_t> targets;  // size d
};

// Automaton on full infinite d-ary trees whose nodes carry beta-tuples of
// domain values; guards relate a node's registers x_j to its children's
// registers x_j^i (siblings included).
struct Tgca {
  DomainHandle domain{DomainId::Eq};
  uint32_t d = 1;
  uint32_t beta = 0;
  std::vector<std::string> locations;
  std::vector<Sym> alphabet;
  std::vector<uint32_t> initial;
  std::vector<bool> accepting;
  std::vector<TgcaTransition> trans;

  bool all_accepting() const;
  std::vector<PredId> guard_preds() const;  // distinct predicates over all guards
};

// Structural defects as data (empty = well-formed).
std::vector<std::string> validate(const Tgca& a);

// Complete d-ary tree truncation, heap-indexed breadth-first: node k's
// children sit at k*d+1+i. Nodes of depth <= depth carry letters and values.
struct DataTreePrefix {
  uint32_t d = 1;
  uint32_t depth = 0;
  std::vector<Sym> letters;
  std::vector<std::vector<Rational>> values;  // beta entries per node
};

// Transitions for the nodes of depth <= depth-1, same indexing.
struct RunPrefix {
  std::vector<uint32_t> trans;  // indices into Tgca::trans
};

size_t full_tree_size(uint32_t d, uint32_t depth);
std::string node_path(uint32_t d, size_t index);  // "e" for the root

bool check_run_prefix(const Tgca& a, const DataTreePrefix& t, const RunPrefix& r);

struct ReduceResult {
  Bta bta;
  AtomUniverse universe;
  std::vector<SymbolicType> types;     // enumerated satisfiable types, canonical order
  std::vector<uint32_t> trans_origin;  // bta transition index -> source transition index
  uint32_t num_locations = 0;

  // bta state id = location * types.size() + type index
  std::pair<uint32_t, uint32_t> decode_state(uint32_t s) const {
    uint32_t n = static_cast<uint32_t>(types.size());
    return {s / n, s % n};
  }
};

// The symbolic-type product construction. Deterministic output; the guard
// entailment sweep may run multi-threaded (serial=true forces one thread).
ReduceResult reduce_to_bta(const Tgca& a, const Budget& budget, bool serial = false);

struct TgcaVerdict {
  bool nonempty = false;
  ReduceResult reduced;
  Strategy strategy;  // over bta states, meaningful iff nonempty
};

TgcaVerdict nonemptiness(const Tgca& a, const Budget& budget);

struct Witness {
  DataTreePrefix data;
  RunPrefix run;
};

// Unfolds a Nonempty strategy to the given depth and concretizes register
// values breadth-first by completing the accumulated per-node constraint
// systems. Output passes check_run_prefix (depth >= 1).
Witness concretize_witness(const Tgca& a, const TgcaVerdict& v, uint32_t depth);

struct StatsReport {
  size_t m = 0;  // distinct guard predicates
  uint32_t beta = 0;
  uint32_t d = 0;
  uint32_t k0 = 0;  // max predicate arity
  size_t num_locations = 0;
  size_t num_transitions = 0;
  size_t max_constraint_size = 0;
  size_t num_atoms = 0;
  size_t atoms_bound = 0;  // m * (beta*(d+1))^k0, saturating
  bool enumerated = false;
  size_t num_types = 0;
  size_t bta_states = 0;
  size_t bta_transitions = 0;           // factored
  size_t bta_transitions_expanded = 0;  // denoted, saturating at the budget
};

// enumerate=true additionally runs the reduction to fill type/state counts.
StatsReport stats(const Tgca& a, const Budget& budget, bool enumerate);

Tgca parse_tgca(const SNode& form);
Tgca parse_tgca_text(const std::string& text);
std::string print_tgca(const Tgca& a);

// One line per node: "node <path> letter=<l> values=<v1,...,vbeta>".
std::string data_tree_str(const DataTreePrefix& t);

}  // namespace ct
