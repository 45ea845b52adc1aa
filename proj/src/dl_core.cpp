#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ct/dl.hpp"
#include "dl_internal.hpp"

namespace ct {

// ---------------------------------------------------------------------------
// Parameter derivation

DlParams derive_params(const Ontology& o, Logic logic) {
  if (!o.normalized) fail(Errc::PreconditionViolated, "parameter derivation needs a normalized ontology");
  if (logic != Logic::Alci && o.uses_inverse) fail(Errc::UsageError, "inverse roles require the alci path");
  if (logic == Logic::Alci && o.uses_nominals)
    fail(Errc::NominalsNotSupported, "nominals are not supported on the alci path");

  DlParams p;
  p.eta = static_cast<uint32_t>(o.individuals.size());
  p.alpha = static_cast<uint32_t>(o.features.size());
  p.kappa = static_cast<uint32_t>(o.role_names.size());

  std::set<ConceptId> seen;
  std::function<void(ConceptId)> walk = [&](ConceptId id) {
    if (!seen.insert(id).second) return;
    p.sub.push_back(id);
    const Concept c = o.table.at(id);  // copy: interning below may grow the table
    switch (c.kind) {
      case Concept::Kind::And:
      case Concept::Kind::Or:
        walk(c.lhs);
        walk(c.rhs);
        break;
      case Concept::Kind::Exists:
      case Concept::Kind::Forall:
        walk(c.lhs);
        break;
      default:
        break;
    }
  };
  for (const auto& [l, r] : o.tbox) {
    walk(l);
    walk(r);
  }
  for (const auto& ca : o.concept_asserts) walk(ca.concept_id);
  if (logic != Logic::Alci)
    for (Sym a : o.individuals) {
      walk(o.table.nominal(a));
      walk(o.table.neg_nominal(a));
    }

  for (uint32_t i = 0; i < p.sub.size(); ++i) p.sub_index.emplace(p.sub[i], i);

  for (uint32_t i = 0; i < p.sub.size(); ++i) {
    switch (o.table.at(p.sub[i]).kind) {
      case Concept::Kind::Exists: p.ex_subs.push_back(i); break;
      case Concept::Kind::CdExists: p.cd_subs.push_back(i); break;
      default: break;
    }
  }
  p.n_ex = static_cast<uint32_t>(p.ex_subs.size());
  p.n_cd = static_cast<uint32_t>(p.cd_subs.size());
  for (uint32_t s : p.cd_subs)
    p.n_var = std::max<uint32_t>(p.n_var, static_cast<uint32_t>(o.table.at(p.sub[s]).bindings.size()));

  for (Sym r : o.role_names) p.roles.push_back(Role{r, false});
  if (logic == Logic::Alci)
    for (Sym r : o.role_names) p.roles.push_back(Role{r, true});

  for (uint32_t e : p.ex_subs) p.belems.push_back(BElem{false, e, 0});
  for (uint32_t s : p.cd_subs)
    for (uint32_t j = 1; j <= p.n_var; ++j) p.belems.push_back(BElem{true, s, j});

  p.d = std::max(p.n_ex + p.n_cd * p.n_var, std::max(p.eta, 1u));
  p.beta = logic == Logic::Alci ? p.alpha * (p.eta + 2) : (p.eta + 1) * p.alpha;

  p.lambda.resize(p.belems.size());
  if (logic == Logic::Alcof) {
    // Elements of one functional role share a single direction.
    uint32_t next = 0;
    std::map<int32_t, uint32_t> shared;
    for (size_t b = 0; b < p.belems.size(); ++b) {
      int32_t r = dl_detail::belem_role_index(o, p, p.belems[b], false);
      if (r >= 0 && o.functional.count(o.role_names[static_cast<uint32_t>(r)]) != 0) {
        auto it = shared.find(r);
        if (it != shared.end()) {
          p.lambda[b] = it->second;
          continue;
        }
        shared.emplace(r, next);
        p.lambda[b] = next++;
      } else {
        p.lambda[b] = next++;
      }
    }
  } else {
    for (size_t b = 0; b < p.belems.size(); ++b) p.lambda[b] = static_cast<uint32_t>(b);
  }

  p.role_of_dir.assign(p.d, -1);
  p.dir_of_role.assign(p.roles.size(), {});
  for (size_t b = 0; b < p.belems.size(); ++b) {
    int32_t r = dl_detail::belem_role_index(o, p, p.belems[b], logic == Logic::Alci);
    if (r < 0) continue;
    uint32_t i = p.lambda[b];
    p.role_of_dir[i] = r;
    p.dir_of_role[static_cast<uint32_t>(r)].push_back(i);
  }
  for (auto& v : p.dir_of_role) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Concept types

namespace {

struct TypeCheck {
  enum class Kind : uint8_t { ForbidTrue, ForceTrue, Clash, Dichotomy, AndClosure, OrClosure };
  Kind kind;
  uint32_t x = 0, y = 0, z = 0;
};

// The membership conditions, each indexed by the last closure position it
// reads so prefix enumeration can prune early.
struct TypeRules {
  size_t n = 0;
  std::vector<std::vector<TypeCheck>> at;

  bool check_at(const TypeBits& t, uint32_t idx) const {
    for (const TypeCheck& c : at[idx]) {
      switch (c.kind) {
        case TypeCheck::Kind::ForbidTrue:
          if (t[c.x]) return false;
          break;
        case TypeCheck::Kind::ForceTrue:
          if (!t[c.x]) return false;
          break;
        case TypeCheck::Kind::Clash:
          if (t[c.x] && t[c.y]) return false;
          break;
        case TypeCheck::Kind::Dichotomy:
          if (t[c.x] == t[c.y]) return false;
          break;
        case TypeCheck::Kind::AndClosure:
          if (t[c.z] && !(t[c.x] && t[c.y])) return false;
          break;
        case TypeCheck::Kind::OrClosure:
          if (t[c.z] && !(t[c.x] || t[c.y])) return false;
          break;
      }
    }
    return true;
  }
};

TypeRules build_rules(const Ontology& o, const DlParams& p) {
  TypeRules rules;
  rules.n = p.sub.size();
  rules.at.resize(rules.n);
  auto add = [&](TypeCheck c) { rules.at[std::max(c.x, std::max(c.y, c.z))].push_back(c); };
  std::map<Sym, uint32_t> name_at, negname_at, nom_at, negnom_at;
  for (uint32_t i = 0; i < p.sub.size(); ++i) {
    const Concept& c = o.table.at(p.sub[i]);
    switch (c.kind) {
      case Concept::Kind::Bot:
        add({TypeCheck::Kind::ForbidTrue, i, 0, 0});
        break;
      case Concept::Kind::Name:
        name_at.emplace(c.name, i);
        break;
      case Concept::Kind::NegName:
        negname_at.emplace(c.name, i);
        break;
      case Concept::Kind::Nominal:
        nom_at.emplace(c.name, i);
        break;
      case Concept::Kind::NegNominal:
        negnom_at.emplace(c.name, i);
        break;
      case Concept::Kind::And:
        add({TypeCheck::Kind::AndClosure, p.sub_index.at(c.lhs), p.sub_index.at(c.rhs), i});
        break;
      case Concept::Kind::Or:
        add({TypeCheck::Kind::OrClosure, p.sub_index.at(c.lhs), p.sub_index.at(c.rhs), i});
        break;
      default:
        break;
    }
  }
  for (const auto& [sym, i] : name_at) {
    auto it = negname_at.find(sym);
    if (it != negname_at.end()) add({TypeCheck::Kind::Clash, i, it->second, 0});
  }
  for (const auto& [sym, i] : nom_at) {
    auto it = negnom_at.find(sym);
    if (it != negnom_at.end()) add({TypeCheck::Kind::Dichotomy, i, it->second, 0});
  }
  for (const auto& [l, r] : o.tbox) {
    if (o.table.at(l).kind != Concept::Kind::Top)
      fail(Errc::PreconditionViolated, "axioms must be rewritten under top before type enumeration");
    add({TypeCheck::Kind::ForceTrue, p.sub_index.at(r), 0, 0});
  }
  return rules;
}

void require_width(const DlParams& p, const TypeBits& t) {
  if (t.size() != p.sub.size()) fail(Errc::ShapeMismatch, "type width differs from the closure size");
}

}  // namespace

bool is_concept_type(const Ontology& o, const DlParams& p, const TypeBits& t) {
  require_width(p, t);
  TypeRules rules = build_rules(o, p);
  for (uint32_t i = 0; i < rules.n; ++i)
    if (!rules.check_at(t, i)) return false;
  return true;
}

bool type_is_anonymous(const Ontology& o, const DlParams& p, const TypeBits& t) {
  require_width(p, t);
  for (Sym a : o.individuals) {
    auto it = p.sub_index.find(o.table.neg_nominal(a));
    if (it != p.sub_index.end() && !t[it->second]) return false;
  }
  return true;
}

int32_t type_a_index(const Ontology& o, const DlParams& p, const TypeBits& t) {
  require_width(p, t);
  int32_t found = -1;
  for (uint32_t j = 0; j < o.individuals.size(); ++j) {
    auto it = p.sub_index.find(o.table.nominal(o.individuals[j]));
    if (it != p.sub_index.end() && t[it->second]) {
      if (found >= 0) return -1;
      found = static_cast<int32_t>(j);
    }
  }
  if (found < 0) return -1;
  for (uint32_t j = 0; j < o.individuals.size(); ++j) {
    if (static_cast<int32_t>(j) == found) continue;
    auto it = p.sub_index.find(o.table.neg_nominal(o.individuals[j]));
    if (it == p.sub_index.end() || !t[it->second]) return -1;
  }
  return found;
}

std::vector<TypeBits> enumerate_concept_types(const Ontology& o, const DlParams& p, const Budget& budget) {
  TypeRules rules = build_rules(o, p);
  uint32_t n = static_cast<uint32_t>(p.sub.size());
  std::vector<TypeBits> out;
  TypeBits t(n, false);
  std::function<void(uint32_t)> rec = [&](uint32_t idx) {
    if (idx == n) {
      out.push_back(t);
      if (out.size() > budget.max_types) fail(Errc::BudgetExceeded, "concept type count exceeds the type budget");
      return;
    }
    for (int v = 0; v < 2; ++v) {
      t[idx] = v != 0;
      if (rules.check_at(t, idx)) rec(idx + 1);
    }
    t[idx] = false;
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Compilation, plain and functional-role paths

namespace {

struct RootOpt {
  uint32_t type = 0;
  uint64_t sl = 0;
  uint32_t act = 0;
};

struct ChildOpt {
  bool pad = true;
  uint32_t type = 0;
  uint64_t sl = 0;
  uint32_t act = 0;
};

struct AlcoCompiler {
  const Ontology& o;
  DomainHandle dom;
  Budget budget;
  Logic logic;

  DlParams p;
  std::vector<TypeBits> types;
  std::vector<int32_t> a_idx;          // per type: the individual it names, or -1
  std::vector<uint32_t> anon_types;    // types rejecting every individual
  std::vector<std::vector<uint32_t>> belems_at_dir;
  std::vector<int32_t> belem_role;
  std::vector<bool> functional_role;
  std::vector<std::tuple<uint32_t, uint32_t, uint32_t>> forall_subs;  // (sub, role, filler)
  std::vector<uint32_t> cd_like;                                      // both cd kinds, closure order
  std::vector<uint64_t> sl_masks;
  std::vector<uint32_t> act_masks;
  uint64_t full_sl = 0;
  uint32_t live_act = 0;

  // The per-individual (type, activity) table every location of one run tree
  // shares; fixed by the root transition and threaded through the keys.
  struct G {
    std::vector<uint32_t> type, act;
    auto operator<=>(const G&) const = default;
  };
  std::vector<G> gs;
  std::map<G, uint32_t> g_ids;

  struct Key {
    uint32_t g = 0, type = 0, act = 0;
    uint64_t sl = 0;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, uint32_t> loc_ids;
  std::deque<std::pair<uint32_t, Key>> todo;

  Tgca a;
  LocationTable table;
  Sym letter = intern("n");

  AlcoCompiler(const Ontology& o_, const DomainHandle& dom_, const Budget& budget_, Logic logic_)
      : o(o_), dom(dom_), budget(budget_), logic(logic_) {}

  uint32_t g_id(const G& g) {
    auto it = g_ids.find(g);
    if (it != g_ids.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(gs.size());
    gs.push_back(g);
    g_ids.emplace(g, id);
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
    li.sl = k.sl;
    li.act = k.act;
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

  // At most one link per functional role.
  bool sl_ok(uint64_t sl) const {
    if (logic != Logic::Alcof) return true;
    uint64_t em = dl_detail::low_mask(p.eta);
    for (uint32_t r = 0; r < p.kappa; ++r)
      if (functional_role[r] && std::popcount(sl >> (r * p.eta) & em) > 1) return false;
    return true;
  }

  // Some linked individual's type carries the filler.
  bool discharged(uint32_t filler, int32_t role, uint64_t sl, const G& g) const {
    for (uint32_t b = 0; b < p.eta; ++b)
      if (sl >> p.role_slot(static_cast<uint32_t>(role), b) & 1)
        if (types[g.type[b]][filler]) return true;
    return false;
  }

  // Admissible child labels for one direction; empty means the source has no
  // transitions at all.
  std::vector<ChildOpt> dir_options(uint32_t i, const TypeBits& t, uint64_t sl, const G& g) {
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
        if (!discharged(filler, belem_role[b], sl, g)) {
          undischarged = true;
          need.push_back(filler);
        }
      }
    }
    std::vector<ChildOpt> out;
    if (!has_active || (!undischarged && !has_cd)) {
      out.push_back(ChildOpt{});
      return out;
    }
    if (!undischarged) out.push_back(ChildOpt{});
    int32_t r = p.role_of_dir[i];
    if (logic == Logic::Alcof && r >= 0 && functional_role[static_cast<uint32_t>(r)] &&
        (sl >> (static_cast<uint32_t>(r) * p.eta) & dl_detail::low_mask(p.eta)) != 0)
      return out;  // the one successor the functional role allows is named
    if (r >= 0)
      for (const auto& [fs, fr, fil] : forall_subs)
        if (static_cast<int32_t>(fr) == r && t[fs]) need.push_back(fil);
    for (uint32_t ti : anon_types) {
      const TypeBits& tt = types[ti];
      bool ok = true;
      for (uint32_t f : need)
        if (!tt[f]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (uint64_t sl2 : sl_masks)
        for (uint32_t act2 : act_masks) out.push_back(ChildOpt{false, ti, sl2, act2});
    }
    return out;
  }

  // One cd-restriction's contribution to the guard. Sets dead when an
  // existential restriction has no candidate term for some variable.
  CPtr cd_part(uint32_t s, const Key& k, const G& g, const std::vector<const ChildOpt*>& ch, bool& dead) {
    const Concept& c = o.table.at(p.sub[s]);
    bool ex = c.kind == Concept::Kind::CdExists;
    size_t nb = c.bindings.size();
    std::vector<std::vector<Variable>> zs(nb);
    for (size_t j = 0; j < nb; ++j) {
      const RolePath& path = c.bindings[j].path;
      uint32_t f0 = o.feature_index(path.feature);
      if (!path.has_role) {
        if (k.act >> f0 & 1) zs[j].push_back(Variable::current(f0 + 1));
      } else {
        uint32_t r = o.role_index(path.role.name);
        for (uint32_t i : p.dir_of_role[r])
          if (!ch[i]->pad && (ch[i]->act >> f0 & 1)) zs[j].push_back(Variable::child(i, f0 + 1));
        for (uint32_t b = 0; b < p.eta; ++b)
          if ((k.sl >> p.role_slot(r, b) & 1) && (g.act[b] >> f0 & 1))
            zs[j].push_back(Variable::current(p.alpha * (b + 1) + f0 + 1));
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
    const G& g = gs[k.g];
    const TypeBits& t = types[k.type];
    std::vector<const ChildOpt*> ch(p.d);
    for (uint32_t i = 0; i < p.d; ++i) ch[i] = &opts[i][pick[i]];
    std::vector<CPtr> conj;
    bool dead = false;
    for (uint32_t s : cd_like)
      if (t[s]) {
        CPtr part = cd_part(s, k, g, ch, dead);
        if (dead) return;
        if (part->kind != Constraint::Kind::True) conj.push_back(std::move(part));
      }
    // Individual registers carry over to every real child.
    for (uint32_t i = 0; i < p.d; ++i) {
      if (ch[i]->pad) continue;
      for (uint32_t b = 0; b < p.eta; ++b)
        for (uint32_t f0 = 0; f0 < p.alpha; ++f0)
          if (g.act[b] >> f0 & 1) {
            uint32_t reg = p.alpha * (b + 1) + f0 + 1;
            conj.push_back(c_eq(Variable::current(reg), Variable::child(i, reg)));
          }
    }
    std::vector<uint32_t> tg(p.d, 1);
    for (uint32_t i = 0; i < p.d; ++i)
      if (!ch[i]->pad) tg[i] = loc_id(Key{k.g, ch[i]->type, ch[i]->act, ch[i]->sl});
    push_trans(src, c_and(std::move(conj)), std::move(tg));
  }

  void source_transitions(uint32_t src, const Key& k) {
    const TypeBits& t = types[k.type];
    const G& g = gs[k.g];
    // Every linked individual must satisfy the applicable value restrictions.
    for (const auto& [fs, fr, fil] : forall_subs)
      if (t[fs])
        for (uint32_t b = 0; b < p.eta; ++b)
          if ((k.sl >> p.role_slot(fr, b) & 1) && !types[g.type[b]][fil]) return;
    std::vector<std::vector<ChildOpt>> opts(p.d);
    uint64_t combos = 1;
    for (uint32_t i = 0; i < p.d; ++i) {
      opts[i] = dir_options(i, t, k.sl, g);
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
    std::vector<uint64_t> req_sl(p.eta, 0);
    std::vector<uint32_t> req_act(p.eta, 0);
    for (const auto& ra : o.role_asserts)
      req_sl[o.individual_index(ra.a)] |= 1ull << p.role_slot(o.role_index(ra.role), o.individual_index(ra.b));
    for (const auto& xa : o.constraint_asserts)
      for (const auto& [v, t] : xa.terms)
        req_act[o.individual_index(t.individual)] |= 1u << o.feature_index(t.feature);
    std::vector<std::vector<uint32_t>> asserted(p.eta);
    for (const auto& ca : o.concept_asserts)
      asserted[o.individual_index(ca.individual)].push_back(p.sub_index.at(ca.concept_id));

    std::vector<std::vector<RootOpt>> opts(p.eta);
    for (uint32_t i = 0; i < p.eta; ++i) {
      std::vector<uint64_t> sls;
      if (sl_ok(req_sl[i]))
        for (uint64_t sl : dl_detail::mask_supersets(req_sl[i], full_sl))
          if (sl_ok(sl)) sls.push_back(sl);
      std::vector<uint32_t> acts;
      for (uint64_t m : dl_detail::mask_supersets(req_act[i], live_act))
        acts.push_back(static_cast<uint32_t>(m));
      for (uint32_t ti = 0; ti < types.size(); ++ti) {
        if (a_idx[ti] != static_cast<int32_t>(i)) continue;
        bool ok = true;
        for (uint32_t s : asserted[i])
          if (!types[ti][s]) {
            ok = false;
            break;
          }
        if (!ok) continue;
        for (uint64_t sl : sls)
          for (uint32_t act : acts) opts[i].push_back(RootOpt{ti, sl, act});
      }
      if (opts[i].empty()) return;  // some individual cannot be realized
    }

    std::vector<size_t> pick(p.eta, 0);
    while (true) {
      G g;
      g.type.resize(p.eta);
      g.act.resize(p.eta);
      for (uint32_t i = 0; i < p.eta; ++i) {
        g.type[i] = opts[i][pick[i]].type;
        g.act[i] = opts[i][pick[i]].act;
      }
      uint32_t gid = g_id(g);
      std::vector<CPtr> conj;
      // Each individual's own registers agree with its copy at every sibling.
      for (uint32_t i = 0; i < p.eta; ++i)
        for (uint32_t i2 = 0; i2 < p.eta; ++i2)
          for (uint32_t f0 = 0; f0 < p.alpha; ++f0)
            if (g.act[i] >> f0 & 1)
              conj.push_back(c_eq(Variable::child(i, f0 + 1), Variable::child(i2, p.alpha * (i + 1) + f0 + 1)));
      for (const auto& xa : o.constraint_asserts) {
        std::map<Variable, Variable> m;
        for (const auto& [v, t] : xa.terms)
          m.emplace(v, Variable::child(o.individual_index(t.individual), o.feature_index(t.feature) + 1));
        conj.push_back(substitute(xa.theta, m));
      }
      std::vector<uint32_t> tg(p.d, 1);
      for (uint32_t i = 0; i < p.eta; ++i) {
        const RootOpt& r = opts[i][pick[i]];
        tg[i] = loc_id(Key{gid, r.type, r.act, r.sl});
      }
      push_trans(0, c_and(std::move(conj)), std::move(tg));
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
    p = derive_params(o, logic);
    if (static_cast<uint64_t>(p.kappa) * p.eta > 64) fail(Errc::BudgetExceeded, "symbolic link slots exceed 64");
    if (p.alpha > 32) fail(Errc::BudgetExceeded, "feature count exceeds 32");
    dl_detail::check_theta_preds(o, p, dom);
    full_sl = dl_detail::low_mask(p.kappa * p.eta);

    types = enumerate_concept_types(o, p, budget);
    a_idx.resize(types.size());
    for (uint32_t ti = 0; ti < types.size(); ++ti) {
      a_idx[ti] = type_a_index(o, p, types[ti]);
      if (type_is_anonymous(o, p, types[ti])) anon_types.push_back(ti);
    }

    belems_at_dir.assign(p.d, {});
    belem_role.resize(p.belems.size());
    for (uint32_t b = 0; b < p.belems.size(); ++b) {
      belem_role[b] = dl_detail::belem_role_index(o, p, p.belems[b], false);
      belems_at_dir[p.lambda[b]].push_back(b);
    }
    functional_role.assign(p.kappa, false);
    if (logic == Logic::Alcof)
      for (uint32_t r = 0; r < p.kappa; ++r) functional_role[r] = o.functional.count(o.role_names[r]) != 0;
    for (uint32_t s = 0; s < p.sub.size(); ++s) {
      const Concept& c = o.table.at(p.sub[s]);
      if (c.kind == Concept::Kind::Forall)
        forall_subs.emplace_back(s, o.role_index(c.role.name), p.sub_index.at(c.lhs));
      if (c.kind == Concept::Kind::CdExists || c.kind == Concept::Kind::CdForall) cd_like.push_back(s);
    }
    for (uint64_t sl : dl_detail::mask_supersets(0, full_sl))
      if (sl_ok(sl)) sl_masks.push_back(sl);
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

Tgca compile_automaton(const Ontology& o, const DomainHandle& dom, const Budget& budget, LocationTable* info) {
  AlcoCompiler c(o, dom, budget, Logic::Alco);
  return c.build(info);
}

Tgca compile_automaton_alcof(const Ontology& o, const DomainHandle& dom, const Budget& budget,
                             LocationTable* info) {
  AlcoCompiler c(o, dom, budget, Logic::Alcof);
  return c.build(info);
}

// ---------------------------------------------------------------------------
// Consistency

namespace {

// Restricted growth strings; one block id per element, blocks numbered by
// first occurrence.
std::vector<std::vector<uint32_t>> all_partitions(uint32_t n) {
  std::vector<std::vector<uint32_t>> out;
  if (n == 0) return out;
  std::vector<uint32_t> rgs(n, 0);
  std::function<void(uint32_t, uint32_t)> rec = [&](uint32_t i, uint32_t used) {
    if (i == n) {
      out.push_back(rgs);
      return;
    }
    for (uint32_t v = 0; v <= used; ++v) {
      rgs[i] = v;
      rec(i + 1, std::max(used, v + 1));
    }
  };
  rec(0, 0);
  std::stable_sort(out.begin(), out.end(), [](const std::vector<uint32_t>& x, const std::vector<uint32_t>& y) {
    return *std::max_element(x.begin(), x.end()) > *std::max_element(y.begin(), y.end());
  });
  return out;
}

std::vector<std::vector<uint32_t>> blocks_of(const std::vector<uint32_t>& block_of) {
  uint32_t nb = block_of.empty() ? 0 : *std::max_element(block_of.begin(), block_of.end()) + 1;
  std::vector<std::vector<uint32_t>> blocks(nb);
  for (uint32_t i = 0; i < block_of.size(); ++i) blocks[block_of[i]].push_back(i);
  return blocks;
}

// Two distinct asserted successors under one functional role can never be
// satisfied, so the partition is rejected before compiling.
bool functional_conflict(const Ontology& q) {
  std::map<std::pair<Sym, Sym>, Sym> first;
  for (const auto& ra : q.role_asserts) {
    if (q.functional.count(ra.role) == 0) continue;
    auto key = std::make_pair(ra.role, ra.a);
    auto it = first.find(key);
    if (it == first.end())
      first.emplace(key, ra.b);
    else if (it->second != ra.b)
      return true;
  }
  return false;
}

}  // namespace

ConsistencyResult check_consistency(const Ontology& o, const DomainHandle& dom, const CheckOptions& opts) {
  Ontology n = o.normalized ? o : normalize(o);
  if (opts.logic == Logic::Alci) {
    if (n.uses_nominals) fail(Errc::NominalsNotSupported, "nominals are not supported on the alci path");
    if (!n.functional.empty()) fail(Errc::UsageError, "functional roles are not supported on the alci path");
  } else {
    if (n.uses_inverse) fail(Errc::UsageError, "inverse roles require the alci path");
    if (opts.logic == Logic::Alco && !n.functional.empty())
      fail(Errc::UsageError, "functional roles require the alcof path");
  }

  ConsistencyResult res;
  uint32_t eta = static_cast<uint32_t>(n.individuals.size());
  if (!opts.una && eta > opts.partition_cap) {
    res.status = ConsistencyResult::Status::ResourceExceeded;
    res.checked = std::move(n);
    res.message = std::to_string(eta) + " individuals exceed the partition cap of " +
                  std::to_string(opts.partition_cap) + "; rerun with the unique-name assumption or raise the cap";
    return res;
  }

  std::vector<std::vector<uint32_t>> parts;
  if (opts.una) {
    std::vector<uint32_t> ident(eta);
    for (uint32_t i = 0; i < eta; ++i) ident[i] = i;
    parts.push_back(std::move(ident));
  } else {
    parts = all_partitions(eta);
  }

  auto compile_one = [&](const Ontology& q, LocationTable& info) -> Tgca {
    switch (opts.logic) {
      case Logic::Alco: return compile_automaton(q, dom, opts.budget, &info);
      case Logic::Alcof: return compile_automaton_alcof(q, dom, opts.budget, &info);
      case Logic::Alci: return compile_automaton_alci(q, dom, opts.budget, &info);
    }
    fail(Errc::InternalInconsistency, "unhandled logic");
  };

  try {
    bool saved = false;
    for (const auto& block_of : parts) {
      Ontology q = quotient(n, block_of);
      if (opts.logic == Logic::Alcof && functional_conflict(q)) continue;
      LocationTable info;
      Tgca a = compile_one(q, info);
      ++res.partitions_tried;
      TgcaVerdict v = nonemptiness(a, opts.budget);
      if (v.nonempty || !saved) {
        res.checked = q;
        res.params = derive_params(q, opts.logic);
        res.automaton = std::move(a);
        res.location_info = std::move(info);
        saved = true;
      }
      if (v.nonempty) {
        res.status = ConsistencyResult::Status::Consistent;
        res.partition = blocks_of(block_of);
        if (opts.witness_depth >= 1) res.witness = concretize_witness(res.automaton, v, opts.witness_depth);
        res.stats_report = stats(res.automaton, opts.budget, true);
        return res;
      }
    }
    if (!saved && !parts.empty()) {
      // Every identification fell to the functional-role prefilter; compile the
      // first anyway so the report has an automaton (it is empty).
      Ontology q = quotient(n, parts.front());
      LocationTable info;
      res.automaton = compile_one(q, info);
      res.partitions_tried = 1;
      res.checked = std::move(q);
      res.params = derive_params(res.checked, opts.logic);
      res.location_info = std::move(info);
    }
    res.status = ConsistencyResult::Status::Inconsistent;
    res.stats_report = stats(res.automaton, opts.budget, true);
    return res;
  } catch (const Error& e) {
    if (e.code != Errc::BudgetExceeded) throw;
    res.status = ConsistencyResult::Status::ResourceExceeded;
    res.message = e.what();
    return res;
  }
}

}  // namespace ct
