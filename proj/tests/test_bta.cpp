#include <queue>
#include <random>
#include <set>

#include "ct/bta.hpp"
#include "doctest.h"

using namespace ct;

namespace {

Sym letter_a() { return intern("a"); }

// Explicit random automaton: singleton slots only.
Bta random_bta(std::mt19937& rng, uint32_t max_states, uint32_t max_d, bool all_accepting) {
  Bta b;
  uint32_t n = 1 + rng() % max_states;
  b.d = 1 + rng() % max_d;
  b.accepting.assign(n, true);
  if (!all_accepting)
    for (uint32_t s = 0; s < n; ++s) b.accepting[s] = rng() % 2;
  b.initial.push_back(rng() % n);
  auto slot_of = [&](uint32_t state) {
    b.slots.push_back({state});
    return static_cast<uint32_t>(b.slots.size() - 1);
  };
  for (uint32_t s = 0; s < n; ++s) {
    uint32_t k = rng() % 3;  // possibly a dead state
    for (uint32_t t = 0; t < k; ++t) {
      Bta::Trans tr;
      tr.src = s;
      tr.letter = letter_a();
      for (uint32_t i = 0; i < b.d; ++i) tr.dirs.push_back(slot_of(rng() % n));
      b.trans.push_back(std::move(tr));
    }
  }
  return b;
}

// Word-automaton emptiness by lasso search: some accepting state reachable
// from an initial state and lying on a cycle.
bool lasso_nonempty(const Bta& b) {
  REQUIRE(b.d == 1);
  uint32_t n = static_cast<uint32_t>(b.num_states());
  std::vector<std::vector<uint32_t>> succ(n);
  for (const auto& tr : b.trans)
    for (uint32_t m : b.slots[tr.dirs[0]]) succ[tr.src].push_back(m);
  auto reach_from = [&](std::vector<uint32_t> start) {
    std::vector<bool> seen(n, false);
    std::queue<uint32_t> q;
    for (uint32_t s : start)
      if (!seen[s]) {
        seen[s] = true;
        q.push(s);
      }
    while (!q.empty()) {
      uint32_t s = q.front();
      q.pop();
      for (uint32_t m : succ[s])
        if (!seen[m]) {
          seen[m] = true;
          q.push(m);
        }
    }
    return seen;
  };
  std::vector<bool> from_init = reach_from(b.initial);
  for (uint32_t f = 0; f < n; ++f) {
    if (!b.accepting[f] || !from_init[f]) continue;
    std::vector<bool> from_f = reach_from(succ[f]);
    if (from_f[f]) return true;
  }
  return false;
}

// The strategy names, per winning state, one transition and one slot member
// per direction; check shape, and for Buchi check that every strategy path
// revisits acceptance within |Q| steps.
void check_strategy(const Bta& b, const Strategy& st, bool require_recurrence) {
  uint32_t n = static_cast<uint32_t>(b.num_states());
  REQUIRE(st.root < n);
  bool root_initial = false;
  for (uint32_t s : b.initial) root_initial |= s == st.root;
  CHECK(root_initial);
  // steps-since-acceptance bound: n transitions suffice for a memoryless win
  std::set<std::pair<uint32_t, uint32_t>> seen;
  std::queue<std::pair<uint32_t, uint32_t>> q;
  auto push = [&](uint32_t s, uint32_t debt) {
    if (b.accepting[s]) debt = 0;
    REQUIRE(debt <= n);
    if (seen.insert({s, debt}).second) q.push({s, debt});
  };
  push(st.root, 0);
  while (!q.empty()) {
    auto [s, debt] = q.front();
    q.pop();
    REQUIRE(st.trans_of[s] >= 0);
    const auto& tr = b.trans[static_cast<size_t>(st.trans_of[s])];
    CHECK(tr.src == s);
    REQUIRE(st.child_of[s].size() == b.d);
    for (uint32_t i = 0; i < b.d; ++i) {
      uint32_t c = st.child_of[s][i];
      const auto& slot = b.slots[tr.dirs[i]];
      CHECK(std::find(slot.begin(), slot.end(), c) != slot.end());
      push(c, require_recurrence ? debt + 1 : 0);
    }
  }
}

// Expand factored slots into explicit singleton-slot transitions.
Bta expand(const Bta& b) {
  Bta e;
  e.d = b.d;
  e.accepting = b.accepting;
  e.initial = b.initial;
  for (const auto& tr : b.trans) {
    std::vector<uint32_t> pick(b.d, 0);
    while (true) {
      Bta::Trans x;
      x.src = tr.src;
      x.letter = tr.letter;
      for (uint32_t i = 0; i < b.d; ++i) {
        e.slots.push_back({b.slots[tr.dirs[i]][pick[i]]});
        x.dirs.push_back(static_cast<uint32_t>(e.slots.size() - 1));
      }
      e.trans.push_back(std::move(x));
      uint32_t i = 0;
      while (i < b.d && ++pick[i] == b.slots[tr.dirs[i]].size()) pick[i++] = 0;
      if (i == b.d) break;
    }
  }
  return e;
}

}  // namespace

TEST_CASE("hand-picked verdicts") {
  Bta b;
  b.d = 2;
  b.accepting = {true, true};
  b.initial = {0};
  b.slots = {{0}, {1}, {1}};
  b.trans.push_back({0, letter_a(), {0, 1}});
  b.trans.push_back({1, letter_a(), {2, 2}});
  CHECK(looping_nonemptiness(b).nonempty);
  CHECK(buchi_nonemptiness(b).nonempty);

  // removing q1's loop kills every run
  Bta dead = b;
  dead.trans.pop_back();
  CHECK(!looping_nonemptiness(dead).nonempty);
  CHECK(!buchi_nonemptiness(dead).nonempty);

  // an abandoned accepting state fails Buchi but not looping shape
  Bta gate;
  gate.d = 1;
  gate.accepting = {true, false};
  gate.initial = {0};
  gate.slots = {{1}, {1}};
  gate.trans.push_back({0, letter_a(), {0}});
  gate.trans.push_back({1, letter_a(), {1}});
  CHECK(!buchi_nonemptiness(gate).nonempty);

  Bta no_init;
  no_init.d = 1;
  no_init.accepting = {true};
  no_init.slots = {{0}};
  no_init.trans.push_back({0, letter_a(), {0}});
  CHECK(!looping_nonemptiness(no_init).nonempty);
  CHECK(!buchi_nonemptiness(no_init).nonempty);
}

TEST_CASE("buchi and looping agree when every state accepts") {
  std::mt19937 rng(21);
  int nonempty = 0;
  for (int round = 0; round < 300; ++round) {
    Bta b = random_bta(rng, 6, 3, true);
    auto l = looping_nonemptiness(b);
    auto g = buchi_nonemptiness(b);
    CHECK(l.nonempty == g.nonempty);
    if (l.nonempty) {
      check_strategy(b, l.strategy, false);
      check_strategy(b, g.strategy, true);
      ++nonempty;
    }
  }
  CHECK(nonempty > 30);
  CHECK(nonempty < 270);
}

TEST_CASE("buchi on word automata agrees with lasso search") {
  std::mt19937 rng(22);
  int nonempty = 0;
  for (int round = 0; round < 300; ++round) {
    Bta b = random_bta(rng, 6, 1, false);
    bool expect = lasso_nonempty(b);
    auto g = buchi_nonemptiness(b);
    CHECK(g.nonempty == expect);
    if (g.nonempty) {
      check_strategy(b, g.strategy, true);
      ++nonempty;
    }
  }
  CHECK(nonempty > 30);
  CHECK(nonempty < 270);
}

TEST_CASE("factored slots denote the expanded product") {
  std::mt19937 rng(23);
  for (int round = 0; round < 200; ++round) {
    // random factored automaton with shared multi-member slots
    Bta b;
    uint32_t n = 1 + rng() % 5;
    b.d = 1 + rng() % 2;
    b.accepting.assign(n, true);
    if (rng() % 2)
      for (uint32_t s = 0; s < n; ++s) b.accepting[s] = rng() % 2;
    b.initial = {static_cast<uint32_t>(rng() % n)};
    uint32_t num_slots = 1 + rng() % 4;
    for (uint32_t s = 0; s < num_slots; ++s) {
      std::set<uint32_t> members;
      uint32_t k = 1 + rng() % 3;
      for (uint32_t i = 0; i < k; ++i) members.insert(rng() % n);
      b.slots.emplace_back(members.begin(), members.end());
    }
    for (uint32_t s = 0; s < n; ++s) {
      uint32_t k = rng() % 3;
      for (uint32_t t = 0; t < k; ++t) {
        Bta::Trans tr;
        tr.src = s;
        tr.letter = letter_a();
        for (uint32_t i = 0; i < b.d; ++i) tr.dirs.push_back(rng() % num_slots);
        b.trans.push_back(std::move(tr));
      }
    }
    Bta e = expand(b);
    CHECK(b.expanded_transition_count(1 << 20) == e.trans.size());
    bool all = true;
    for (bool acc : b.accepting) all = all && acc;
    if (all) CHECK(looping_nonemptiness(b).nonempty == looping_nonemptiness(e).nonempty);
    CHECK(buchi_nonemptiness(b).nonempty == buchi_nonemptiness(e).nonempty);
  }
}

TEST_CASE("expanded transition counts saturate at the cap") {
  Bta b;
  b.d = 3;
  b.accepting = {true, true, true};
  b.initial = {0};
  b.slots = {{0, 1, 2}};
  b.trans.push_back({0, letter_a(), {0, 0, 0}});  // 27 denoted transitions
  CHECK(b.expanded_transition_count(1000) == 27);
  CHECK(b.expanded_transition_count(10) == 10);
}

TEST_CASE("unfolding a strategy lists the full tree breadth-first") {
  Bta b;
  b.d = 2;
  b.accepting = {true, true};
  b.initial = {0};
  b.slots = {{0}, {1}};
  b.trans.push_back({0, intern("a"), {0, 1}});
  b.trans.push_back({1, intern("b"), {1, 1}});
  auto v = looping_nonemptiness(b);
  REQUIRE(v.nonempty);
  auto nodes = unfold(b, v.strategy, 2);
  REQUIRE(nodes.size() == 7);  // 1 + 2 + 4
  CHECK(nodes[0].path == "e");
  CHECK(nodes[1].path == "0");
  CHECK(nodes[2].path == "1");
  CHECK(nodes[3].path == "00");
  CHECK(nodes[6].path == "11");
  CHECK(nodes[0].state == 0);
  CHECK(nodes[1].state == 0);
  CHECK(nodes[2].state == 1);
  CHECK(nodes[0].letter == intern("a"));
  CHECK(nodes[2].letter == intern("b"));
  CHECK(nodes[6].letter == intern("b"));
  // every child's state is the strategy's choice for its parent
  for (size_t k = 0; k < 3; ++k)
    for (uint32_t i = 0; i < 2; ++i)
      CHECK(nodes[2 * k + 1 + i].state == v.strategy.child_of[nodes[k].state][i]);
  CHECK(!strategy_dump(b, v.strategy).empty());
}
