#include "ct/bta.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "ct/error.hpp"

namespace ct {

std::string Bta::state_name(uint32_t s) const {
  if (s < state_names.size() && !state_names[s].empty()) return state_names[s];
  return "s" + std::to_string(s);
}

size_t Bta::expanded_transition_count(size_t cap) const {
  size_t total = 0;
  for (const auto& t : trans) {
    size_t prod = 1;
    for (uint32_t s : t.dirs) {
      size_t n = slots[s].size();
      if (n == 0) {
        prod = 0;
        break;
      }
      if (prod > cap / n) {
        prod = cap;
        break;
      }
      prod *= n;
    }
    if (total > cap - std::min(prod, cap)) return cap;
    total += prod;
    if (total >= cap) return cap;
  }
  return total;
}

namespace {

struct Incidence {
  std::vector<std::vector<uint32_t>> slots_of_member;  // state -> slots containing it
  std::vector<std::vector<uint32_t>> trans_of_slot;    // slot -> transitions using it (per use)
  std::vector<std::vector<uint32_t>> trans_of_src;     // state -> transitions from it
};

Incidence build_incidence(const Bta& b) {
  Incidence inc;
  inc.slots_of_member.resize(b.num_states());
  inc.trans_of_slot.resize(b.slots.size());
  inc.trans_of_src.resize(b.num_states());
  for (uint32_t s = 0; s < b.slots.size(); ++s)
    for (uint32_t m : b.slots[s]) inc.slots_of_member[m].push_back(s);
  for (uint32_t t = 0; t < b.trans.size(); ++t) {
    inc.trans_of_src[b.trans[t].src].push_back(t);
    for (uint32_t s : b.trans[t].dirs) inc.trans_of_slot[s].push_back(t);
  }
  return inc;
}

Strategy make_strategy(const Bta& b, const std::vector<char>& winning,
                       const std::vector<int64_t>& trans_of,
                       const std::vector<std::vector<uint32_t>>& child_of) {
  Strategy st;
  st.trans_of = trans_of;
  st.child_of = child_of;
  for (uint32_t q : b.initial)
    if (winning[q]) {
      st.root = q;
      return st;
    }
  fail(Errc::InternalInconsistency, "strategy requested without a winning initial state");
}

}  // namespace

BtaVerdict looping_nonemptiness(const Bta& b) {
  for (size_t q = 0; q < b.num_states(); ++q)
    if (!b.accepting[q]) fail(Errc::PreconditionViolated, "looping nonemptiness requires every state accepting");

  Incidence inc = build_incidence(b);
  size_t nQ = b.num_states(), nT = b.trans.size();
  std::vector<char> alive(nQ, 1);
  std::vector<uint32_t> slot_alive(b.slots.size());
  for (size_t s = 0; s < b.slots.size(); ++s) slot_alive[s] = static_cast<uint32_t>(b.slots[s].size());
  std::vector<uint32_t> empty_slots(nT, 0);
  for (size_t t = 0; t < nT; ++t)
    for (uint32_t s : b.trans[t].dirs)
      if (slot_alive[s] == 0) ++empty_slots[t];
  std::vector<uint32_t> live_trans(nQ, 0);
  for (size_t t = 0; t < nT; ++t)
    if (empty_slots[t] == 0) ++live_trans[b.trans[t].src];

  std::deque<uint32_t> work;
  for (uint32_t q = 0; q < nQ; ++q)
    if (live_trans[q] == 0) {
      alive[q] = 0;
      work.push_back(q);
    }
  while (!work.empty()) {
    uint32_t q = work.front();
    work.pop_front();
    for (uint32_t s : inc.slots_of_member[q]) {
      if (--slot_alive[s] == 0) {
        for (uint32_t t : inc.trans_of_slot[s]) {
          if (empty_slots[t]++ == 0) {
            uint32_t src = b.trans[t].src;
            if (--live_trans[src] == 0 && alive[src]) {
              alive[src] = 0;
              work.push_back(src);
            }
          }
        }
      }
    }
  }

  BtaVerdict v;
  bool any = false;
  for (uint32_t q : b.initial)
    if (alive[q]) any = true;
  if (!any) return v;
  v.nonempty = true;

  std::vector<int64_t> trans_of(nQ, -1);
  std::vector<std::vector<uint32_t>> child_of(nQ);
  for (uint32_t q = 0; q < nQ; ++q) {
    if (!alive[q]) continue;
    for (uint32_t t : inc.trans_of_src[q]) {
      if (empty_slots[t] != 0) continue;
      trans_of[q] = t;
      child_of[q].reserve(b.d);
      for (uint32_t s : b.trans[t].dirs) {
        uint32_t pick = 0;
        bool found = false;
        for (uint32_t m : b.slots[s])
          if (alive[m]) {
            pick = m;
            found = true;
            break;
          }
        if (!found) fail(Errc::InternalInconsistency, "live transition with a dead slot");
        child_of[q].push_back(pick);
      }
      break;
    }
  }
  v.strategy = make_strategy(b, alive, trans_of, child_of);
  return v;
}

namespace {

// Game nodes: [0,nQ) automaton states (chooser: automaton), [nQ, nQ+nT)
// transitions (chooser: path/direction), [nQ+nT, ...) slots (chooser:
// automaton). Acceptance is tracked on state nodes only.
struct BuchiGame {
  const Bta& b;
  Incidence inc;
  size_t nQ, nT, nS, total;
  std::vector<char> removed;

  explicit BuchiGame(const Bta& bb) : b(bb), inc(build_incidence(bb)) {
    nQ = b.num_states();
    nT = b.trans.size();
    nS = b.slots.size();
    total = nQ + nT + nS;
    removed.assign(total, 0);
  }
  size_t tnode(uint32_t t) const { return nQ + t; }
  size_t snode(uint32_t s) const { return nQ + nT + s; }

  // Attractor for the automaton player toward a set of state nodes, within
  // the live (non-removed) subgame. Fills rank and the triggering edge.
  void attract_eve(const std::vector<char>& target, std::vector<char>& in,
                   std::vector<uint32_t>& rank, std::vector<int64_t>& via_trans,
                   std::vector<int64_t>& via_member) const {
    in.assign(total, 0);
    rank.assign(total, 0);
    via_trans.assign(nQ, -1);
    via_member.assign(nS, -1);
    std::vector<uint32_t> need(nT, 0);
    for (uint32_t t = 0; t < nT; ++t) need[t] = b.d;
    std::deque<size_t> work;
    for (uint32_t q = 0; q < nQ; ++q)
      if (!removed[q] && target[q]) {
        in[q] = 1;
        rank[q] = 0;
        work.push_back(q);
      }
    while (!work.empty()) {
      size_t v = work.front();
      work.pop_front();
      if (v < nQ) {
        uint32_t q = static_cast<uint32_t>(v);
        for (uint32_t s : inc.slots_of_member[q]) {
          if (removed[snode(s)] || in[snode(s)]) continue;
          in[snode(s)] = 1;
          rank[snode(s)] = rank[v] + 1;
          via_member[s] = q;
          work.push_back(snode(s));
        }
      } else if (v < nQ + nT) {
        uint32_t t = static_cast<uint32_t>(v - nQ);
        uint32_t q = b.trans[t].src;
        if (!removed[q] && !in[q]) {
          in[q] = 1;
          rank[q] = rank[v] + 1;
          via_trans[q] = t;
          work.push_back(q);
        }
      } else {
        uint32_t s = static_cast<uint32_t>(v - nQ - nT);
        for (uint32_t t : inc.trans_of_slot[s]) {
          if (removed[tnode(t)] || in[tnode(t)]) continue;
          if (--need[t] == 0) {
            in[tnode(t)] = 1;
            rank[tnode(t)] = rank[v] + 1;
            work.push_back(tnode(t));
          }
        }
      }
    }
  }

  // Attractor for the path player toward an arbitrary node set, within the
  // live subgame.
  void attract_adam(const std::vector<char>& target, std::vector<char>& in) const {
    in.assign(total, 0);
    std::vector<uint32_t> cnt_q(nQ, 0), cnt_s(nS, 0);
    for (uint32_t t = 0; t < nT; ++t)
      if (!removed[tnode(t)]) ++cnt_q[b.trans[t].src];
    for (uint32_t s = 0; s < nS; ++s)
      if (!removed[snode(s)])
        for (uint32_t m : b.slots[s])
          if (!removed[m]) ++cnt_s[s];
    std::deque<size_t> work;
    for (size_t v = 0; v < total; ++v)
      if (!removed[v] && target[v]) {
        in[v] = 1;
        work.push_back(v);
      }
    auto add = [&](size_t v) {
      if (removed[v] || in[v]) return;
      in[v] = 1;
      work.push_back(v);
    };
    while (!work.empty()) {
      size_t v = work.front();
      work.pop_front();
      if (v < nQ) {
        uint32_t q = static_cast<uint32_t>(v);
        // a state joined: slots containing it lose a live member
        for (uint32_t s : inc.slots_of_member[q]) {
          size_t sv = snode(s);
          if (removed[sv] || in[sv]) continue;
          if (--cnt_s[s] == 0) add(sv);
        }
      } else if (v < nQ + nT) {
        uint32_t t = static_cast<uint32_t>(v - nQ);
        uint32_t q = b.trans[t].src;
        if (!removed[q] && !in[q] && --cnt_q[q] == 0) add(q);
      } else {
        uint32_t s = static_cast<uint32_t>(v - nQ - nT);
        for (uint32_t t : inc.trans_of_slot[s]) add(tnode(t));
      }
    }
  }
};

}  // namespace

BtaVerdict buchi_nonemptiness(const Bta& b) {
  BuchiGame g(b);
  std::vector<char> target(g.nQ, 0);
  std::vector<char> in, rem_target(g.total, 0), attr;
  std::vector<uint32_t> rank;
  std::vector<int64_t> via_trans, via_member;

  while (true) {
    // an accepting state only counts as a target while it can still move;
    // a stuck automaton player loses regardless of acceptance
    std::vector<uint32_t> live_out(g.nQ, 0);
    for (uint32_t t = 0; t < g.nT; ++t)
      if (!g.removed[g.tnode(t)]) ++live_out[b.trans[t].src];
    for (uint32_t q = 0; q < g.nQ; ++q)
      target[q] = (!g.removed[q] && b.accepting[q] && live_out[q] > 0) ? 1 : 0;
    g.attract_eve(target, in, rank, via_trans, via_member);
    bool losing = false;
    std::fill(rem_target.begin(), rem_target.end(), 0);
    for (size_t v = 0; v < g.total; ++v)
      if (!g.removed[v] && !in[v]) {
        rem_target[v] = 1;
        losing = true;
      }
    if (!losing) break;
    g.attract_adam(rem_target, attr);
    for (size_t v = 0; v < g.total; ++v)
      if (attr[v]) g.removed[v] = 1;
  }

  BtaVerdict v;
  bool any = false;
  for (uint32_t q : b.initial)
    if (!g.removed[q]) any = true;
  if (!any) return v;
  v.nonempty = true;

  // in/rank/via_* hold the final attractor, which covers every live node.
  std::vector<int64_t> trans_of(g.nQ, -1);
  std::vector<std::vector<uint32_t>> child_of(g.nQ);
  std::vector<char> winning(g.nQ, 0);
  for (uint32_t q = 0; q < g.nQ; ++q) {
    if (g.removed[q]) continue;
    winning[q] = 1;
    int64_t t = -1;
    if (b.accepting[q]) {
      // restart: any live transition keeps the play winning
      for (uint32_t cand : g.inc.trans_of_src[q])
        if (!g.removed[g.tnode(cand)]) {
          t = cand;
          break;
        }
    } else {
      t = via_trans[q];
    }
    if (t < 0) fail(Errc::InternalInconsistency, "winning state lacks a strategy transition");
    trans_of[q] = t;
    for (uint32_t s : b.trans[t].dirs) {
      int64_t m = via_member[s];
      if (m < 0) fail(Errc::InternalInconsistency, "strategy slot lacks a chosen member");
      child_of[q].push_back(static_cast<uint32_t>(m));
    }
  }
  v.strategy = make_strategy(b, winning, trans_of, child_of);
  return v;
}

std::vector<UnfoldNode> unfold(const Bta& b, const Strategy& s, uint32_t depth) {
  if (s.root >= b.num_states()) fail(Errc::InvalidStrategy, "root state out of range");
  std::vector<UnfoldNode> out;
  struct Item {
    std::string path;
    uint32_t state;
    uint32_t level;
  };
  std::deque<Item> work;
  work.push_back({"e", s.root, 0});
  while (!work.empty()) {
    Item it = work.front();
    work.pop_front();
    if (it.state >= b.num_states() || s.trans_of.size() <= it.state)
      fail(Errc::InvalidStrategy, "state outside the strategy");
    int64_t t = s.trans_of[it.state];
    if (t < 0 || static_cast<size_t>(t) >= b.trans.size() || b.trans[t].src != it.state)
      fail(Errc::InvalidStrategy, "no valid transition chosen at " + b.state_name(it.state));
    const auto& tr = b.trans[t];
    const auto& kids = s.child_of[it.state];
    if (kids.size() != b.d) fail(Errc::InvalidStrategy, "child choices do not cover all directions");
    for (uint32_t i = 0; i < b.d; ++i) {
      const auto& slot = b.slots[tr.dirs[i]];
      if (std::find(slot.begin(), slot.end(), kids[i]) == slot.end())
        fail(Errc::InvalidStrategy, "chosen child not offered by the transition");
    }
    out.push_back({it.path, it.state, tr.letter, t});
    if (it.level < depth) {
      for (uint32_t i = 0; i < b.d; ++i) {
        std::string child_path = (it.path == "e") ? std::to_string(i) : it.path + std::to_string(i);
        work.push_back({child_path, kids[i], it.level + 1});
      }
    }
  }
  return out;
}

std::string strategy_dump(const Bta& b, const Strategy& s) {
  std::ostringstream os;
  for (size_t q = 0; q < s.trans_of.size(); ++q)
    if (s.trans_of[q] >= 0) os << "state " << b.state_name(static_cast<uint32_t>(q)) << " -> trans " << s.trans_of[q] << "\n";
  return os.str();
}

}  // namespace ct
