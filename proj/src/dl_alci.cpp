#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ct/dl.hpp"
#include "dl_internal.hpp"

namespace ct {

// The inverse-role path. Locations abstract the parent instead of tracking
// symbolic links: an interior location remembers the role, type, and activity
// of its parent; a depth-1 location remembers which individual it is and the
// activity every individual chose. Register layout per node: the node's own
// feature values, a copy of its parent's, and a copy of each individual's.

namespace {

struct ChildOpt {
  bool pad = true;
  uint32_t type = 0;
  uint32_t act = 0;
};

struct RootOpt {
  uint32_t type = 0;
  uint32_t act = 0;
};

struct AlciCompiler {
  const Ontology& o;
  DomainHandle dom;
  Budget budget;

  DlParams p;
  std::vector<TypeBits> types;
  std::vector<std::vector<uint32_t>> belems_at_dir;
  std::vector<int32_t> belem_role;
  std::vector<std::tuple<uint32_t, uint32_t, uint32_t>> forall_subs;  // (sub, role incl. inverses, filler)
  std::vector<uint32_t> cd_like;
  std::vector<uint32_t> act_masks;
  uint32_t live_act = 0;

  std::vector<std::vector<uint32_t>> fvecs;  // per-individual activity vectors
  std::map<std::vector<uint32_t>, uint32_t> fvec_ids;

  struct Key {
    bool interior = false;
    uint32_t x = 0;  // interior: parent-to-node role; depth 1: individual index
    uint32_t y = 0;  // interior: parent type; depth 1: activity-vector id
    uint32_t z = 0;  // interior: parent activity; depth 1: zero
    uint32_t type = 0;
    uint32_t act = 0;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, uint32_t> loc_ids;
  std::deque<std::pair<uint32_t, Key>> todo;

  Tgca a;
  LocationTable table;
  Sym letter = intern("n");

  AlciCompiler(const Ontology& o_, const DomainHandle& dom_, const Budget& budget_)
      : o(o_), dom(dom_), budget(budget_) {}

  uint32_t inv_idx(uint32_t r) const { return r < p.kappa ? r + p.kappa : r - p.kappa; }
  // The parent is an r-successor of the node iff the parent reached the node
  // along the inverse of r.
  bool parent_is(const Key& k, uint32_t r) const { return k.interior && k.x == inv_idx(r); }

  uint32_t reg_local(uint32_t f0) const { return f0 + 1; }
  uint32_t reg_parent(uint32_t f0) const { return p.alpha + f0 + 1; }
  uint32_t reg_ind(uint32_t ell, uint32_t f0) const { return p.alpha * (ell + 2) + f0 + 1; }

  uint32_t fvec_id(const std::vector<uint32_t>& f) {
    auto it = fvec_ids.find(f);
    if (it != fvec_ids.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(fvecs.size());
    fvecs.push_back(f);
    fvec_ids.emplace(f, id);
    return id;
  }

  uint32_t loc_id(const Key& k) {
    auto it = loc_ids.find(k);
    if (it != loc_ids.end()) return it->second;
    if (a.locations.size() >= budget.max_types)
      fail(Errc::BudgetExceeded, "location count exceeds the type budget");
    uint32_t id = static_cast<uint32_t>(a.locations.size());
    a.locations.push_back("c" + std::to_string(id - 2));
    a.accepting.push_back(true);
    LocationInfo li;
    li.kind = LocationInfo::Kind::Contextual;
    li.type = types[k.type];
    li.act = k.act;
    li.interior = k.interior;
    if (k.interior) {
      li.up_role = p.roles[k.x];
      li.up_type = types[k.y];
      li.up_act = k.z;
    } else {
      li.depth1_gamma = k.x;
    }
    table.push_back(std::move(li));
    loc_ids.emplace(k, id);
    todo.emplace_back(id, k);
    return id;
  }

  void push_trans(uint32_t src, CPtr guard, std::vector<uint32_t> targets) {
    if (a.trans.size() >= budget.max_transitions)
      fail(Errc::BudgetExceeded, "transition count exceeds the transition budget");
    a.trans.push_back(TgcaTransition{src, letter, std::move(guard), std::move(targets)});
  }

  std::vector<ChildOpt> dir_options(uint32_t i, const Key& k) {
    const TypeBits& t = types[k.type];
    bool has_active = false, has_cd = false, undischarged = false;
    std::vector<uint32_t> need;
    for (uint32_t b : belems_at_dir[i]) {
      const BElem& be = p.belems[b];
      if (!t[be.sub_index]) continue;
      if (be.is_cd) {
        if (belem_role[b] < 0) continue;  // padding slot or bare-feature binding
        has_active = true;
        has_cd = true;
      } else {
        has_active = true;
        uint32_t filler = p.sub_index.at(o.table.at(p.sub[be.sub_index]).lhs);
        uint32_t r = static_cast<uint32_t>(belem_role[b]);
        if (parent_is(k, r) && types[k.y][filler]) continue;  // the parent is the witness
        undischarged = true;
        need.push_back(filler);
      }
    }
    std::vector<ChildOpt> out;
    if (!has_active || (!undischarged && !has_cd)) {
      out.push_back(ChildOpt{});
      return out;
    }
    if (!undischarged) out.push_back(ChildOpt{});
    uint32_t r = static_cast<uint32_t>(p.role_of_dir[i]);
    for (const auto& [fs, fr, fil] : forall_subs)
      if (fr == r && t[fs]) need.push_back(fil);
    for (uint32_t ti = 0; ti < types.size(); ++ti) {
      const TypeBits& tt = types[ti];
      bool ok = true;
      for (uint32_t f : need)
        if (!tt[f]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      // The node is an inv(r)-successor of its child, so the child's value
      // restrictions along inv(r) reach back to the node.
      for (const auto& [fs, fr, fil] : forall_subs)
        if (fr == inv_idx(r) && tt[fs] && !t[fil]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (uint32_t act2 : act_masks) out.push_back(ChildOpt{false, ti, act2});
    }
    return out;
  }

  CPtr cd_part(uint32_t s, const Key& k, const std::vector<const ChildOpt*>& ch, bool& dead) {
    const Concept& c = o.table.at(p.sub[s]);
    bool ex = c.kind == Concept::Kind::CdExists;
    size_t nb = c.bindings.size();
    std::vector<std::vector<Variable>> zs(nb);
    for (size_t j = 0; j < nb; ++j) {
      const RolePath& path = c.bindings[j].path;
      uint32_t f0 = o.feature_index(path.feature);
      if (!path.has_role) {
        if (k.act >> f0 & 1) zs[j].push_back(Variable::current(reg_local(f0)));
      } else {
        uint32_t r = o.role_index(path.role.name) + (path.role.inverted ? p.kappa : 0);
        for (uint32_t i : p.dir_of_role[r])
          if (!ch[i]->pad && (ch[i]->act >> f0 & 1)) zs[j].push_back(Variable::child(i, reg_local(f0)));
        if (parent_is(k, r) && (k.z >> f0 & 1)) zs[j].push_back(Variable::current(reg_parent(f0)));
        if (!k.interior) {
          // Asserted r-successors among the individuals; identification can
          // assert one edge twice, so the terms are deduplicated.
          const std::vector<uint32_t>& fv = fvecs[k.y];
          for (const auto& ra : o.role_asserts) {
            uint32_t r0 = o.role_index(ra.role);
            uint32_t g2;
            if (r < p.kappa) {
              if (r0 != r || o.individual_index(ra.a) != k.x) continue;
              g2 = o.individual_index(ra.b);
            } else {
              if (r0 != r - p.kappa || o.individual_index(ra.b) != k.x) continue;
              g2 = o.individual_index(ra.a);
            }
            if (fv[g2] >> f0 & 1) zs[j].push_back(Variable::current(reg_ind(g2, f0)));
          }
          std::sort(zs[j].begin(), zs[j].end());
          zs[j].erase(std::unique(zs[j].begin(), zs[j].end()), zs[j].end());
        }
      }
      if (zs[j].empty()) {
        if (ex) dead = true;
        return c_true();
      }
    }
    uint64_t count = 1;
    for (const auto& z : zs) {
      count *= z.size();
      if (count > budget.max_transitions)
        fail(Errc::BudgetExceeded, "cd instantiation exceeds the transition budget");
    }
    std::vector<CPtr> parts;
    std::vector<size_t> pick(nb, 0);
    while (true) {
      std::map<Variable, Variable> m;
      for (size_t j = 0; j < nb; ++j) m.emplace(Variable::named(c.bindings[j].var), zs[j][pick[j]]);
      parts.push_back(substitute(c.theta, m));
      size_t j = nb;
      while (j > 0) {
        if (++pick[j - 1] < zs[j - 1].size()) break;
        pick[j - 1] = 0;
        --j;
      }
      if (j == 0) break;
    }
    return ex ? c_or(std::move(parts)) : c_and(std::move(parts));
  }

  void emit(uint32_t src, const Key& k, const std::vector<std::vector<ChildOpt>>& opts,
            const std::vector<size_t>& pick) {
    const TypeBits& t = types[k.type];
    std::vector<const ChildOpt*> ch(p.d);
    for (uint32_t i = 0; i < p.d; ++i) ch[i] = &opts[i][pick[i]];
    std::vector<CPtr> conj;
    bool dead = false;
    for (uint32_t s : cd_like)
      if (t[s]) {
        CPtr part = cd_part(s, k, ch, dead);
        if (dead) return;
        if (part->kind != Constraint::Kind::True) conj.push_back(std::move(part));
      }
    // Each real child's parent-copy registers mirror the node's own values.
    for (uint32_t i = 0; i < p.d; ++i) {
      if (ch[i]->pad) continue;
      for (uint32_t f0 = 0; f0 < p.alpha; ++f0)
        if (k.act >> f0 & 1)
          conj.push_back(c_eq(Variable::child(i, reg_parent(f0)), Variable::current(reg_local(f0))));
    }
    std::vector<uint32_t> tg(p.d, 1);
    for (uint32_t i = 0; i < p.d; ++i)
      if (!ch[i]->pad)
        tg[i] = loc_id(
            Key{true, static_cast<uint32_t>(p.role_of_dir[i]), k.type, k.act, ch[i]->type, ch[i]->act});
    push_trans(src, c_and(std::move(conj)), std::move(tg));
  }

  void source_transitions(uint32_t src, const Key& k) {
    const TypeBits& t = types[k.type];
    // The parent must satisfy every value restriction that reaches it.
    for (const auto& [fs, fr, fil] : forall_subs)
      if (t[fs] && parent_is(k, fr) && !types[k.y][fil]) return;
    std::vector<std::vector<ChildOpt>> opts(p.d);
    uint64_t combos = 1;
    for (uint32_t i = 0; i < p.d; ++i) {
      opts[i] = dir_options(i, k);
      if (opts[i].empty()) return;
      combos *= opts[i].size();
      if (combos > budget.max_transitions)
        fail(Errc::BudgetExceeded, "per-source child combinations exceed the transition budget");
    }
    std::vector<size_t> pick(p.d, 0);
    while (true) {
      emit(src, k, opts, pick);
      size_t i = p.d;
      while (i > 0) {
        if (++pick[i - 1] < opts[i - 1].size()) break;
        pick[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
    }
  }

  void root_transitions() {
    std::vector<uint32_t> req_act(p.eta, 0);
    for (const auto& xa : o.constraint_asserts)
      for (const auto& [v, tm] : xa.terms)
        req_act[o.individual_index(tm.individual)] |= 1u << o.feature_index(tm.feature);
    std::vector<std::vector<uint32_t>> asserted(p.eta);
    for (const auto& ca : o.concept_asserts)
      asserted[o.individual_index(ca.individual)].push_back(p.sub_index.at(ca.concept_id));

    std::vector<std::vector<RootOpt>> opts(p.eta);
    uint64_t combos = 1;
    for (uint32_t i = 0; i < p.eta; ++i) {
      std::vector<uint32_t> acts;
      for (uint64_t m : dl_detail::mask_supersets(req_act[i], live_act))
        acts.push_back(static_cast<uint32_t>(m));
      for (uint32_t ti = 0; ti < types.size(); ++ti) {
        bool ok = true;
        for (uint32_t s : asserted[i])
          if (!types[ti][s]) {
            ok = false;
            break;
          }
        if (!ok) continue;
        for (uint32_t act : acts) opts[i].push_back(RootOpt{ti, act});
      }
      if (opts[i].empty()) return;  // some individual cannot be realized
      combos *= opts[i].size();
      if (combos > budget.max_transitions)
        fail(Errc::BudgetExceeded, "root label combinations exceed the transition budget");
    }

    struct Edge {
      uint32_t ia, ib, r;
    };
    std::vector<Edge> edges;
    for (const auto& ra : o.role_asserts)
      edges.push_back(Edge{o.individual_index(ra.a), o.individual_index(ra.b), o.role_index(ra.role)});

    std::vector<size_t> pick(p.eta, 0);
    while (true) {
      // Asserted edges transport value restrictions in both directions.
      bool ok = true;
      for (const Edge& e : edges) {
        const TypeBits& ta = types[opts[e.ia][pick[e.ia]].type];
        const TypeBits& tb = types[opts[e.ib][pick[e.ib]].type];
        for (const auto& [fs, fr, fil] : forall_subs) {
          if (fr == e.r && ta[fs] && !tb[fil]) ok = false;
          if (fr == e.r + p.kappa && tb[fs] && !ta[fil]) ok = false;
          if (!ok) break;
        }
        if (!ok) break;
      }
      if (ok) {
        std::vector<uint32_t> fv(p.eta);
        for (uint32_t i = 0; i < p.eta; ++i) fv[i] = opts[i][pick[i]].act;
        uint32_t fid = fvec_id(fv);
        std::vector<CPtr> conj;
        // Each individual's own registers agree with its copy at every sibling.
        for (uint32_t i = 0; i < p.eta; ++i)
          for (uint32_t i2 = 0; i2 < p.eta; ++i2)
            for (uint32_t f0 = 0; f0 < p.alpha; ++f0)
              if (fv[i] >> f0 & 1)
                conj.push_back(c_eq(Variable::child(i, reg_local(f0)), Variable::child(i2, reg_ind(i, f0))));
        for (const auto& xa : o.constraint_asserts) {
          std::map<Variable, Variable> m;
          for (const auto& [v, tm] : xa.terms)
            m.emplace(v, Variable::child(o.individual_index(tm.individual),
                                         reg_local(o.feature_index(tm.feature))));
          conj.push_back(substitute(xa.theta, m));
        }
        std::vector<uint32_t> tg(p.d, 1);
        for (uint32_t i = 0; i < p.eta; ++i)
          tg[i] = loc_id(Key{false, i, fid, 0, opts[i][pick[i]].type, opts[i][pick[i]].act});
        push_trans(0, c_and(std::move(conj)), std::move(tg));
      }
      size_t i = p.eta;
      while (i > 0) {
        if (++pick[i - 1] < opts[i - 1].size()) break;
        pick[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
    }
  }

  Tgca build(LocationTable* info) {
    if (o.domain != dom.id()) fail(Errc::UsageError, "ontology domain differs from the requested domain");
    if (!o.functional.empty()) fail(Errc::UsageError, "functional roles are not supported on the alci path");
    p = derive_params(o, Logic::Alci);
    if (p.alpha > 32) fail(Errc::BudgetExceeded, "feature count exceeds 32");
    dl_detail::check_theta_preds(o, p, dom);

    types = enumerate_concept_types(o, p, budget);
    belems_at_dir.assign(p.d, {});
    belem_role.resize(p.belems.size());
    for (uint32_t b = 0; b < p.belems.size(); ++b) {
      belem_role[b] = dl_detail::belem_role_index(o, p, p.belems[b], true);
      belems_at_dir[p.lambda[b]].push_back(b);
    }
    for (uint32_t s = 0; s < p.sub.size(); ++s) {
      const Concept& c = o.table.at(p.sub[s]);
      if (c.kind == Concept::Kind::Forall)
        forall_subs.emplace_back(s, o.role_index(c.role.name) + (c.role.inverted ? p.kappa : 0),
                                 p.sub_index.at(c.lhs));
      if (c.kind == Concept::Kind::CdExists || c.kind == Concept::Kind::CdForall) cd_like.push_back(s);
    }
    live_act = dl_detail::live_features(o, p);
    for (uint64_t m : dl_detail::mask_supersets(0, live_act))
      act_masks.push_back(static_cast<uint32_t>(m));

    a.domain = dom;
    a.d = p.d;
    a.beta = p.beta;
    a.alphabet = {letter};
    a.locations = {"root", "pad"};
    a.accepting = {true, true};
    a.initial = {0};
    LocationInfo root_info;
    root_info.kind = LocationInfo::Kind::Root;
    table.push_back(std::move(root_info));
    table.push_back(LocationInfo{});
    push_trans(1, c_true(), std::vector<uint32_t>(p.d, 1));
    root_transitions();
    while (!todo.empty()) {
      auto [id, key] = todo.front();
      todo.pop_front();
      source_transitions(id, key);
    }
    if (info) *info = table;
    return std::move(a);
  }
};

}  // namespace

Tgca compile_automaton_alci(const Ontology& o, const DomainHandle& dom, const Budget& budget,
                            LocationTable* info) {
  AlciCompiler c(o, dom, budget);
  return c.build(info);
}

}  // namespace ct
