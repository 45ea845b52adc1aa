#include "ct/symtypes.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace ct {

uint32_t AtomUniverse::index_of(const Atom& a) const {
  auto it = index.find(a);
  if (it == index.end()) fail(Errc::AtomOutsideUniverse, atom_str(a));
  return it->second;
}

AtomUniverse build_universe(std::vector<PredId> preds, uint32_t beta, uint32_t d, const Budget& budget) {
  std::sort(preds.begin(), preds.end(), pred_less);
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());

  AtomUniverse u;
  u.beta = beta;
  u.d = d;
  u.preds = preds;
  for (uint32_t j = 1; j <= beta; ++j) u.regs.push_back(Variable::current(j));
  for (uint32_t i = 0; i < d; ++i)
    for (uint32_t j = 1; j <= beta; ++j) u.regs.push_back(Variable::child(i, j));

  size_t n = u.regs.size();
  size_t total = 0;
  for (PredId p : preds) {
    size_t tuples = 1;
    for (uint32_t k = 0; k < pred_info(p).arity; ++k) {
      tuples *= n;
      if (tuples > budget.max_atoms) fail(Errc::BudgetExceeded, "atom universe exceeds the atom budget");
    }
    total += tuples;
    if (total > budget.max_atoms) fail(Errc::BudgetExceeded, "atom universe exceeds the atom budget");
  }

  for (PredId p : preds) {
    uint32_t arity = pred_info(p).arity;
    if (n == 0) continue;
    std::vector<size_t> odo(arity, 0);
    while (true) {
      Atom a;
      a.pred = p;
      for (uint32_t k = 0; k < arity; ++k) a.args.push_back(u.regs[odo[k]]);
      u.index.emplace(a, static_cast<uint32_t>(u.atoms.size()));
      u.atoms.push_back(std::move(a));
      // odometer: last position varies fastest
      uint32_t k = arity;
      while (k > 0) {
        --k;
        if (++odo[k] < n) break;
        odo[k] = 0;
        if (k == 0) goto done_pred;
      }
      if (arity == 0) break;
    }
  done_pred:;
  }

  for (uint32_t ai = 0; ai < u.atoms.size(); ++ai) {
    const Atom& a = u.atoms[ai];
    bool all_cur = true;
    for (const auto& v : a.args)
      if (v.kind != Variable::Kind::Current) all_cur = false;
    if (all_cur) u.cur_idx.push_back(ai);
  }
  u.proj_idx.resize(d);
  for (uint32_t i = 0; i < d; ++i) {
    for (uint32_t ai : u.cur_idx) {
      Atom shifted = u.atoms[ai];
      for (auto& v : shifted.args) v = Variable::child(i, v.j);
      u.proj_idx[i].push_back(u.index.at(shifted));
    }
  }
  return u;
}

SymbolicType type_of_values(const AtomUniverse& u, const DomainHandle& dom, const Valuation& v) {
  SymbolicType t;
  t.bits.reserve(u.atoms.size());
  for (const Atom& a : u.atoms) t.bits.push_back(eval_atom(a, v, dom));
  return t;
}

ConstraintSystem type_system(const AtomUniverse& u, const SymbolicType& t) {
  if (t.bits.size() != u.atoms.size()) fail(Errc::UniverseMismatch, "type width does not match universe");
  ConstraintSystem s;
  for (size_t i = 0; i < u.atoms.size(); ++i) s.add(Literal{u.atoms[i], static_cast<bool>(t.bits[i])});
  return s;
}

bool is_satisfiable_type(const AtomUniverse& u, const DomainHandle& dom, const SymbolicType& t) {
  return csp_satisfiable(dom, type_system(u, t));
}

namespace {

bool entails_rec(const AtomUniverse& u, const SymbolicType& t, const CPtr& theta) {
  switch (theta->kind) {
    case Constraint::Kind::True: return true;
    case Constraint::Kind::False: return false;
    case Constraint::Kind::Leaf: return t.bits[u.index_of(theta->atom)];
    case Constraint::Kind::Not: return !entails_rec(u, t, theta->kids[0]);
    case Constraint::Kind::And:
      for (const auto& k : theta->kids)
        if (!entails_rec(u, t, k)) return false;
      return true;
    case Constraint::Kind::Or:
      for (const auto& k : theta->kids)
        if (entails_rec(u, t, k)) return true;
      return false;
  }
  return false;
}

}  // namespace

bool entails(const AtomUniverse& u, const SymbolicType& t, const CPtr& theta) {
  if (t.bits.size() != u.atoms.size()) fail(Errc::UniverseMismatch, "type width does not match universe");
  return entails_rec(u, t, theta);
}

bool projection_compatible(const AtomUniverse& u, const SymbolicType& t, uint32_t dir, const SymbolicType& child) {
  if (dir >= u.d) fail(Errc::ShapeMismatch, "direction out of range");
  if (t.bits.size() != u.atoms.size() || child.bits.size() != u.atoms.size())
    fail(Errc::UniverseMismatch, "type width does not match universe");
  const auto& proj = u.proj_idx[dir];
  for (size_t k = 0; k < u.cur_idx.size(); ++k)
    if (t.bits[proj[k]] != child.bits[u.cur_idx[k]]) return false;
  return true;
}

Fingerprint fingerprint_current(const AtomUniverse& u, const SymbolicType& t) {
  Fingerprint f;
  f.reserve(u.cur_idx.size());
  for (uint32_t ai : u.cur_idx) f.push_back(t.bits[ai]);
  return f;
}

Fingerprint fingerprint_child(const AtomUniverse& u, const SymbolicType& t, uint32_t dir) {
  if (dir >= u.d) fail(Errc::ShapeMismatch, "direction out of range");
  Fingerprint f;
  f.reserve(u.proj_idx[dir].size());
  for (uint32_t ai : u.proj_idx[dir]) f.push_back(t.bits[ai]);
  return f;
}

namespace {

// Model-driven enumeration: every satisfiable type is realized by some
// register valuation, and the type only depends on (a) which registers are
// equal, (b) their relative order (dense orders), and (c) their position
// relative to any mentioned constants. Enumerating those configurations and
// evaluating the universe under a canonical model per configuration yields
// every satisfiable type; a set dedupes configurations the predicate list
// cannot distinguish.

struct TypeCollector {
  const AtomUniverse& u;
  const DomainHandle& dom;
  size_t cap;
  std::set<SymbolicType> out;

  void emit(const Valuation& v) {
    out.insert(type_of_values(u, dom, v));
    if (out.size() > cap) fail(Errc::BudgetExceeded, "satisfiable types exceed the type budget");
  }
};

// Ordered partitions of regs into strictly increasing blocks; calls use()
// with the block index of every register.
void enumerate_ordered_partitions(const std::vector<Variable>& regs,
                                  const std::function<void(const std::vector<uint32_t>&, uint32_t)>& use) {
  size_t n = regs.size();
  std::vector<uint32_t> block_of(n, 0);
  std::function<void(size_t, uint32_t)> go = [&](size_t i, uint32_t nblocks) {
    if (i == n) {
      use(block_of, nblocks);
      return;
    }
    // join an existing block
    for (uint32_t b = 0; b < nblocks; ++b) {
      // shift blocks >= position up is not needed when joining
      block_of[i] = b;
      go(i + 1, nblocks);
    }
    // open a new block at any rank: relabel existing blocks >= pos
    for (uint32_t pos = 0; pos <= nblocks; ++pos) {
      for (size_t j = 0; j < i; ++j)
        if (block_of[j] >= pos) ++block_of[j];
      block_of[i] = pos;
      go(i + 1, nblocks + 1);
      for (size_t j = 0; j < i; ++j)
        if (block_of[j] > pos) --block_of[j];
    }
  };
  if (n == 0)
    use(block_of, 0);
  else
    go(0, 0);
}

void enumerate_dense(const std::vector<Variable>& regs, TypeCollector& tc) {
  enumerate_ordered_partitions(regs, [&](const std::vector<uint32_t>& block_of, uint32_t) {
    Valuation v;
    for (size_t i = 0; i < regs.size(); ++i) v.set(regs[i], Rational(block_of[i]));
    tc.emit(v);
  });
}

void enumerate_dense_const(const std::vector<Variable>& regs, const std::vector<Rational>& consts,
                           TypeCollector& tc) {
  if (consts.empty()) {
    enumerate_dense(regs, tc);
    return;
  }
  size_t m = consts.size();
  // slots: 0 = below consts[0], 2c+1 = equal to consts[c], 2c+2 = between
  // consts[c] and consts[c+1] (or above the last one)
  enumerate_ordered_partitions(regs, [&](const std::vector<uint32_t>& block_of, uint32_t nblocks) {
    std::vector<uint32_t> slot_of(nblocks, 0);
    std::function<void(uint32_t, uint32_t)> assign = [&](uint32_t b, uint32_t min_slot) {
      if (b == nblocks) {
        // concrete values: within each slot, blocks get increasing values
        std::vector<uint32_t> blocks_in_slot(2 * m + 1, 0);
        for (uint32_t x = 0; x < nblocks; ++x) ++blocks_in_slot[slot_of[x]];
        std::vector<Rational> value_of_block(nblocks);
        std::vector<uint32_t> seen(2 * m + 1, 0);
        for (uint32_t x = 0; x < nblocks; ++x) {
          uint32_t s = slot_of[x];
          uint32_t r = seen[s]++;
          uint32_t t = blocks_in_slot[s];
          if (s % 2 == 1) {
            value_of_block[x] = consts[(s - 1) / 2];
          } else if (s == 0) {
            value_of_block[x] = consts[0] - Rational(t - r);
          } else if (s == 2 * m) {
            value_of_block[x] = consts[m - 1] + Rational(r + 1);
          } else {
            const Rational& lo = consts[s / 2 - 1];
            const Rational& hi = consts[s / 2];
            value_of_block[x] = lo + (hi - lo) * Rational(r + 1) / Rational(t + 1);
          }
        }
        Valuation v;
        for (size_t i = 0; i < regs.size(); ++i) v.set(regs[i], value_of_block[block_of[i]]);
        tc.emit(v);
        return;
      }
      for (uint32_t s = min_slot; s < 2 * m + 1; ++s) {
        slot_of[b] = s;
        // a constant slot holds at most one block (blocks are distinct values)
        assign(b + 1, (s % 2 == 1) ? s + 1 : s);
      }
    };
    assign(0, 0);
  });
}

}  // namespace

std::vector<SymbolicType> enumerate_satisfiable_types(const AtomUniverse& u, const DomainHandle& dom,
                                                      const Budget& budget) {
  TypeCollector tc{u, dom, budget.max_types, {}};
  switch (dom.id()) {
    case DomainId::Eq: {
      // set partitions via restricted growth strings
      size_t n = u.regs.size();
      if (n == 0) {
        tc.emit(Valuation{});
        break;
      }
      std::vector<uint32_t> a(n, 0);
      std::vector<uint32_t> b(n, 0);  // b[i] = max(a[0..i-1])
      while (true) {
        Valuation v;
        for (size_t j = 0; j < n; ++j) v.set(u.regs[j], Rational(a[j]));
        tc.emit(v);
        size_t i = n - 1;
        while (i > 0 && a[i] == b[i] + 1) --i;
        if (i == 0) break;
        ++a[i];
        for (size_t j = i + 1; j < n; ++j) {
          b[j] = std::max(b[j - 1], a[j - 1]);
          a[j] = 0;
        }
      }
      break;
    }
    case DomainId::Dense: {
      enumerate_dense(u.regs, tc);
      break;
    }
    case DomainId::DenseConst: {
      std::set<Rational> cs;
      for (PredId p : u.preds)
        if (pred_info(p).has_param) cs.insert(pred_info(p).param);
      enumerate_dense_const(u.regs, std::vector<Rational>(cs.begin(), cs.end()), tc);
      break;
    }
  }
  return std::vector<SymbolicType>(tc.out.begin(), tc.out.end());
}

}  // namespace ct
