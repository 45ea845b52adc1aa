#include <algorithm>
#include <map>

#include "ct/tgca.hpp"

#ifdef CTREE_HAVE_OPENMP
#include <omp.h>
#endif

namespace ct {

namespace {

// Per source transition, the ascending list of type indices whose polarity
// assignment entails the guard. Pure per-cell work over immutable data, so
// the sweep parallelizes over transitions x type chunks; results are merged
// in index order, keeping the output independent of the thread count.
std::vector<std::vector<uint32_t>> entailment_lists(const Tgca& a, const AtomUniverse& u,
                                                    const std::vector<SymbolicType>& types, bool serial) {
  size_t nt = a.trans.size();
  size_t nty = types.size();
  std::vector<std::vector<uint32_t>> out(nt);
#ifdef CTREE_HAVE_OPENMP
  if (!serial && nt * nty >= 4096) {
    constexpr size_t kChunk = 512;
    size_t chunks_per_trans = (nty + kChunk - 1) / kChunk;
    size_t total = nt * chunks_per_trans;
    std::vector<std::vector<uint32_t>> partial(total);
#pragma omp parallel for schedule(dynamic)
    for (size_t job = 0; job < total; ++job) {
      size_t t = job / chunks_per_trans;
      size_t lo = (job % chunks_per_trans) * kChunk;
      size_t hi = std::min(lo + kChunk, nty);
      for (size_t ty = lo; ty < hi; ++ty)
        if (entails(u, types[ty], a.trans[t].guard)) partial[job].push_back(static_cast<uint32_t>(ty));
    }
    for (size_t job = 0; job < total; ++job) {
      size_t t = job / chunks_per_trans;
      auto& dst = out[t];
      dst.insert(dst.end(), partial[job].begin(), partial[job].end());
    }
    return out;
  }
#else
  (void)serial;
#endif
  for (size_t t = 0; t < nt; ++t)
    for (size_t ty = 0; ty < nty; ++ty)
      if (entails(u, types[ty], a.trans[t].guard)) out[t].push_back(static_cast<uint32_t>(ty));
  return out;
}

}  // namespace

ReduceResult reduce_to_bta(const Tgca& a, const Budget& budget, bool serial) {
  ReduceResult rr;
  rr.universe = build_universe(a.guard_preds(), a.beta, a.d, budget);
  rr.types = enumerate_satisfiable_types(rr.universe, a.domain, budget);
  rr.num_locations = static_cast<uint32_t>(a.locations.size());
  size_t nty = rr.types.size();
  size_t nloc = a.locations.size();

  // group types by their all-Current polarity pattern: projection
  // compatibility pins each child's pattern, so the legal child types per
  // direction form exactly one group
  std::map<Fingerprint, uint32_t> group_of_fp;
  std::vector<std::vector<uint32_t>> groups;
  for (uint32_t ty = 0; ty < nty; ++ty) {
    Fingerprint fp = fingerprint_current(rr.universe, rr.types[ty]);
    auto [it, fresh] = group_of_fp.emplace(std::move(fp), static_cast<uint32_t>(groups.size()));
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(ty);
  }

  std::vector<std::vector<uint32_t>> entailing = entailment_lists(a, rr.universe, rr.types, serial);

  Bta& b = rr.bta;
  b.d = a.d;
  b.accepting.resize(nloc * nty);
  for (size_t q = 0; q < nloc; ++q)
    for (size_t ty = 0; ty < nty; ++ty) b.accepting[q * nty + ty] = a.accepting[q];
  for (uint32_t q : a.initial)
    for (uint32_t ty = 0; ty < nty; ++ty) b.initial.push_back(q * static_cast<uint32_t>(nty) + ty);

  // slots are interned per (target location, fingerprint group)
  std::map<std::pair<uint32_t, uint32_t>, uint32_t> slot_of;
  auto slot_id = [&](uint32_t loc, uint32_t group) {
    auto [it, fresh] = slot_of.emplace(std::make_pair(loc, group), static_cast<uint32_t>(b.slots.size()));
    if (fresh) {
      std::vector<uint32_t> members;
      members.reserve(groups[group].size());
      for (uint32_t ty : groups[group]) members.push_back(loc * static_cast<uint32_t>(nty) + ty);
      b.slots.push_back(std::move(members));
    }
    return it->second;
  };

  // per (type, direction) group lookup, shared across transitions
  std::vector<std::vector<uint32_t>> child_group(nty, std::vector<uint32_t>(a.d));
  for (uint32_t ty = 0; ty < nty; ++ty) {
    for (uint32_t i = 0; i < a.d; ++i) {
      auto it = group_of_fp.find(fingerprint_child(rr.universe, rr.types[ty], i));
      if (it == group_of_fp.end())
        fail(Errc::InternalInconsistency, "satisfiable type whose child pattern no type realizes");
      child_group[ty][i] = it->second;
    }
  }

  for (uint32_t t = 0; t < a.trans.size(); ++t) {
    const TgcaTransition& src = a.trans[t];
    for (uint32_t ty : entailing[t]) {
      if (b.trans.size() >= budget.max_transitions)
        fail(Errc::BudgetExceeded, "reduced automaton exceeds the transition budget");
      Bta::Trans bt;
      bt.src = src.src * static_cast<uint32_t>(nty) + ty;
      bt.letter = src.letter;
      bt.dirs.reserve(a.d);
      for (uint32_t i = 0; i < a.d; ++i) bt.dirs.push_back(slot_id(src.targets[i], child_group[ty][i]));
      b.trans.push_back(std::move(bt));
      rr.trans_origin.push_back(t);
    }
  }
  return rr;
}

TgcaVerdict nonemptiness(const Tgca& a, const Budget& budget) {
  TgcaVerdict v;
  v.reduced = reduce_to_bta(a, budget);
  BtaVerdict bv = a.all_accepting() ? looping_nonemptiness(v.reduced.bta) : buchi_nonemptiness(v.reduced.bta);
  v.nonempty = bv.nonempty;
  v.strategy = std::move(bv.strategy);
  return v;
}

}  // namespace ct
