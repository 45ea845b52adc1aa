#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "ct/constraints.hpp"

namespace ct {

// Tree automaton with no registers. Transitions are factored: each carries,
// per direction, a slot id naming an interned list of alternative target
// states; the denoted transition set is the cartesian product over slots.
// Explicit automata use singleton slots, so the factoring is invisible there;
// product constructions share slots across many transitions instead of
// materializing the product.
struct Bta {
  uint32_t d = 1;
  std::vector<std::string> state_names;  // may be empty (ids name themselves)
  std::vector<bool> accepting;           // size = state count
  std::vector<uint32_t> initial;
  std::vector<std::vector<uint32_t>> slots;  // interned member lists (state ids)

  struct Trans {
    uint32_t src;
    Sym letter;
    std::vector<uint32_t> dirs;  // size d: slot id per direction
  };
  std::vector<Trans> trans;

  size_t num_states() const { return accepting.size(); }
  std::string state_name(uint32_t s) const;
  // Denoted (product-expanded) transition count, saturating at cap.
  size_t expanded_transition_count(size_t cap) const;
};

// Memoryless witness for nonemptiness: per winning state a chosen transition
// and, per direction, a chosen member of that transition's slot.
struct Strategy {
  std::vector<int64_t> trans_of;                // per state: transition index or -1
  std::vector<std::vector<uint32_t>> child_of;  // per state: chosen child state per direction
  uint32_t root = 0;                            // a winning initial state
};

struct BtaVerdict {
  bool nonempty = false;
  Strategy strategy;  // meaningful iff nonempty
};

// Greatest-fixpoint pruning; requires F = Q.
BtaVerdict looping_nonemptiness(const Bta& b);

// Two-player game: the automaton picks transitions and slot members, the
// path picks directions; win = visiting F infinitely often along the path.
BtaVerdict buchi_nonemptiness(const Bta& b);

struct UnfoldNode {
  std::string path;  // "e" for the root, then digit strings
  uint32_t state;
  Sym letter;
  int64_t trans;  // transition taken at this node
};

// Complete d-ary unfolding of the strategy to the given depth, breadth-first.
std::vector<UnfoldNode> unfold(const Bta& b, const Strategy& s, uint32_t depth);

std::string strategy_dump(const Bta& b, const Strategy& s);

}  // namespace ct
