#pragma once
#include <bit>
#include <cstdint>
#include <vector>

#include "ct/dl.hpp"

namespace ct::dl_detail {

inline uint64_t low_mask(uint32_t n) { return n >= 64 ? ~0ull : (1ull << n) - 1; }

// All supersets of req inside full, numerically ascending.
inline std::vector<uint64_t> mask_supersets(uint64_t req, uint64_t full) {
  uint64_t free_bits = full & ~req;
  if (std::popcount(free_bits) > 20) fail(Errc::BudgetExceeded, "mask enumeration space exceeds 2^20");
  std::vector<uint64_t> out;
  uint64_t s = 0;
  do {
    out.push_back(req | s);
    s = (s - free_bits) & free_bits;
  } while (s != 0);
  return out;
}

// A feature's activity bit is only ever read by a cd-restriction binding or an
// asserted feature term; every other feature can stay inactive everywhere, so
// the compilers enumerate activity masks over this subset only.
inline uint32_t live_features(const Ontology& o, const DlParams& p) {
  uint32_t live = 0;
  for (ConceptId s : p.sub) {
    const Concept& c = o.table.at(s);
    if (c.kind != Concept::Kind::CdExists && c.kind != Concept::Kind::CdForall) continue;
    for (const CdBinding& b : c.bindings) live |= 1u << o.feature_index(b.path.feature);
  }
  for (const ConstraintAssertion& ca : o.constraint_asserts)
    for (const auto& [v, t] : ca.terms) live |= 1u << o.feature_index(t.feature);
  return live;
}

// Direction-owning role of a labeling element as an index into DlParams::roles
// (inverses offset by kappa); -1 for padding slots and bare-feature bindings,
// which never host a child.
inline int32_t belem_role_index(const Ontology& o, const DlParams& p, const BElem& b, bool with_inverse) {
  const Concept& c = o.table.at(p.sub[b.sub_index]);
  Role r;
  if (!b.is_cd) {
    r = c.role;
  } else {
    if (b.j == 0 || b.j > c.bindings.size()) return -1;
    const RolePath& path = c.bindings[b.j - 1].path;
    if (!path.has_role) return -1;
    r = path.role;
  }
  int32_t idx = static_cast<int32_t>(o.role_index(r.name));
  if (r.inverted) {
    if (!with_inverse) fail(Errc::UsageError, "inverse roles require the alci path");
    idx += static_cast<int32_t>(p.kappa);
  }
  return idx;
}

// Every predicate inside cd-restriction and assertion constraints must be one
// the domain decides.
inline void check_theta_preds(const Ontology& o, const DlParams& p, const DomainHandle& dom) {
  std::vector<Atom> atoms;
  for (ConceptId id : p.sub) {
    const Concept& c = o.table.at(id);
    if (c.kind == Concept::Kind::CdExists || c.kind == Concept::Kind::CdForall) collect_atoms(c.theta, atoms);
  }
  for (const auto& xa : o.constraint_asserts) collect_atoms(xa.theta, atoms);
  for (const Atom& at : atoms)
    if (!dom.knows_pred(at.pred))
      fail(Errc::UnknownPredicate, pred_str(at.pred) + " is not a predicate of domain " + dom.name());
}

}  // namespace ct::dl_detail
