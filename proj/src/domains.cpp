#include "ct/domains.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace ct {

std::string DomainHandle::name() const {
  switch (id_) {
    case DomainId::Eq: return "eq";
    case DomainId::Dense: return "dense";
    case DomainId::DenseConst: return "dense-const";
  }
  return "?";
}

bool DomainHandle::knows_pred(PredId p) const {
  const Predicate& q = pred_info(p);
  if (q.name == "eq" && q.arity == 2) return true;
  if (id_ == DomainId::Eq) return false;
  if (q.name == "lt" && q.arity == 2) return true;
  if (id_ == DomainId::Dense) return false;
  return q.has_param && (q.name == "eqC" || q.name == "ltC" || q.name == "gtC");
}

DomainHandle domain_by_name(const std::string& name) {
  if (name == "eq") return DomainHandle(DomainId::Eq);
  if (name == "dense") return DomainHandle(DomainId::Dense);
  if (name == "dense-const") return DomainHandle(DomainId::DenseConst);
  fail(Errc::UnknownDomain, name);
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Shared scaffolding for the order solver: nodes are the system's variables
// plus one node per distinct pinned rational.
struct OrderGraph {
  std::vector<Variable> vars;                 // sorted
  std::map<Variable, int> var_idx;
  std::vector<Rational> consts;               // sorted distinct pins
  std::map<Rational, int> const_idx;          // value -> node id (offset by vars)
  int n = 0;                                  // total nodes
  UnionFind uf{0};
  std::vector<std::pair<int, int>> strict;    // u < v
  std::vector<std::pair<int, int>> weak;      // u <= v
  std::vector<std::pair<int, int>> diseq;     // u != v

  int node_of(const Variable& v) const { return var_idx.at(v); }
  int node_of_const(const Rational& q) const { return static_cast<int>(vars.size()) + const_idx.at(q); }
};

bool build_order_graph(const ConstraintSystem& s, const std::optional<Valuation>& pins, OrderGraph& g,
                       bool allow_consts) {
  std::set<Variable> vs;
  std::set<Rational> cs;
  for (const auto& l : s.lits)
    for (const auto& v : l.atom.args) vs.insert(v);
  for (const auto& l : s.lits) {
    const Predicate& p = pred_info(l.atom.pred);
    if (p.has_param) {
      if (!allow_consts) fail(Errc::UnknownPredicate, pred_str(l.atom.pred) + " needs the dense-const domain");
      cs.insert(p.param);
    }
  }
  if (pins) {
    for (const auto& [v, q] : pins->m) {
      vs.insert(v);
      cs.insert(q);
    }
  }
  g.vars.assign(vs.begin(), vs.end());
  for (size_t i = 0; i < g.vars.size(); ++i) g.var_idx[g.vars[i]] = static_cast<int>(i);
  g.consts.assign(cs.begin(), cs.end());
  for (size_t i = 0; i < g.consts.size(); ++i) g.const_idx[g.consts[i]] = static_cast<int>(i);
  g.n = static_cast<int>(g.vars.size() + g.consts.size());
  g.uf = UnionFind(g.n);

  // numeric order among the pinned constants
  for (size_t i = 0; i + 1 < g.consts.size(); ++i)
    g.strict.emplace_back(g.node_of_const(g.consts[i]), g.node_of_const(g.consts[i + 1]));

  for (const auto& l : s.lits) {
    const Predicate& p = pred_info(l.atom.pred);
    if (p.name == "eq") {
      int a = g.node_of(l.atom.args[0]), b = g.node_of(l.atom.args[1]);
      if (l.positive)
        g.uf.unite(a, b);
      else
        g.diseq.emplace_back(a, b);
    } else if (p.name == "lt") {
      int a = g.node_of(l.atom.args[0]), b = g.node_of(l.atom.args[1]);
      if (l.positive)
        g.strict.emplace_back(a, b);
      else
        g.weak.emplace_back(b, a);  // ¬(a<b)  <=>  b<=a
    } else if (p.name == "eqC") {
      int a = g.node_of(l.atom.args[0]), c = g.node_of_const(p.param);
      if (l.positive)
        g.uf.unite(a, c);
      else
        g.diseq.emplace_back(a, c);
    } else if (p.name == "ltC") {
      int a = g.node_of(l.atom.args[0]), c = g.node_of_const(p.param);
      if (l.positive)
        g.strict.emplace_back(a, c);
      else
        g.weak.emplace_back(c, a);
    } else if (p.name == "gtC") {
      int a = g.node_of(l.atom.args[0]), c = g.node_of_const(p.param);
      if (l.positive)
        g.strict.emplace_back(c, a);
      else
        g.weak.emplace_back(a, c);
    } else {
      fail(Errc::UnknownPredicate, pred_str(l.atom.pred));
    }
  }
  if (pins) {
    for (const auto& [v, q] : pins->m) g.uf.unite(g.node_of(v), g.node_of_const(q));
  }
  return true;
}

// Tarjan over the union-find-contracted graph; components come out in reverse
// topological order of the condensation.
struct SccResult {
  std::vector<int> comp;           // class-representative -> component id
  int n_comp = 0;
  std::vector<std::vector<int>> order;  // components in topological order (each = list of class reps)
};

SccResult scc_condense(const OrderGraph& g) {
  // adjacency over class representatives
  std::map<int, std::vector<int>> adj;
  std::set<int> nodes;
  auto rep = [&](int x) { return const_cast<OrderGraph&>(g).uf.find(x); };
  for (int i = 0; i < g.n; ++i) nodes.insert(rep(i));
  auto add_edge = [&](int u, int v) {
    int a = rep(u), b = rep(v);
    adj[a].push_back(b);
  };
  for (auto [u, v] : g.strict) add_edge(u, v);
  for (auto [u, v] : g.weak) add_edge(u, v);

  SccResult r;
  std::map<int, int> index, low;
  std::map<int, bool> on_stack;
  std::vector<int> stack;
  int next_index = 0;
  std::vector<std::vector<int>> comps;

  // iterative Tarjan to avoid deep recursion
  struct Frame {
    int v;
    size_t ei;
  };
  for (int start : nodes) {
    if (index.count(start)) continue;
    std::vector<Frame> call;
    call.push_back({start, 0});
    index[start] = low[start] = next_index++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto& edges = adj[f.v];
      if (f.ei < edges.size()) {
        int w = edges[f.ei++];
        if (!index.count(w)) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == f.v) break;
          }
          comps.push_back(std::move(comp));
        }
        int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  // Tarjan emits components in reverse topological order.
  std::reverse(comps.begin(), comps.end());
  r.n_comp = static_cast<int>(comps.size());
  std::map<int, int> comp_of;
  for (int c = 0; c < r.n_comp; ++c)
    for (int w : comps[c]) comp_of[w] = c;
  r.comp.assign(g.n, -1);
  for (int i = 0; i < g.n; ++i) r.comp[i] = comp_of.at(const_cast<OrderGraph&>(g).uf.find(i));
  r.order = std::move(comps);
  return r;
}

struct DenseSolve {
  bool sat = false;
  Valuation model;  // variables only
};

DenseSolve dense_solve(const ConstraintSystem& s, const std::optional<Valuation>& pins, bool allow_consts,
                       bool want_model) {
  OrderGraph g;
  build_order_graph(s, pins, g, allow_consts);
  SccResult scc = scc_condense(g);
  auto comp_of_node = [&](int x) { return scc.comp[x]; };

  // UNSAT checks: a strict edge inside a component, a disequality inside one,
  // or two distinct pinned rationals sharing one.
  for (auto [u, v] : g.strict)
    if (comp_of_node(u) == comp_of_node(v)) return {};
  for (auto [u, v] : g.diseq)
    if (comp_of_node(u) == comp_of_node(v)) return {};
  std::map<int, const Rational*> pin_of_comp;
  for (size_t ci = 0; ci < g.consts.size(); ++ci) {
    int c = comp_of_node(static_cast<int>(g.vars.size() + ci));
    auto it = pin_of_comp.find(c);
    if (it != pin_of_comp.end() && *it->second != g.consts[ci]) return {};
    pin_of_comp[c] = &g.consts[ci];
  }

  DenseSolve out;
  out.sat = true;
  if (!want_model) return out;

  // Assign strictly increasing values along a topological linearization:
  // pinned components keep their pins (they appear in increasing numeric
  // order because consecutive pins are chained by strict edges), free
  // components interpolate between neighbouring pins.
  int k = scc.n_comp;
  std::vector<std::optional<Rational>> val(k);
  std::vector<int> pinned_pos;
  for (int c = 0; c < k; ++c) {
    // component ids from scc.order; map order position -> component id is identity
    if (pin_of_comp.count(c)) {
      val[c] = *pin_of_comp[c];
      pinned_pos.push_back(c);
    }
  }
  if (pinned_pos.empty()) {
    for (int c = 0; c < k; ++c) val[c] = Rational(c);
  } else {
    // before the first pin: descending integers below it
    int first = pinned_pos.front();
    for (int c = 0; c < first; ++c) val[c] = *val[first] - Rational(first - c);
    // between consecutive pins: evenly spaced interpolation
    for (size_t pi = 0; pi + 1 < pinned_pos.size(); ++pi) {
      int a = pinned_pos[pi], b = pinned_pos[pi + 1];
      Rational lo = *val[a], hi = *val[b];
      int gap = b - a;
      for (int c = a + 1; c < b; ++c) val[c] = lo + (hi - lo) * Rational(c - a) / Rational(gap);
    }
    // after the last pin: ascending integers above it
    int last = pinned_pos.back();
    for (int c = last + 1; c < k; ++c) val[c] = *val[last] + Rational(c - last);
  }

  // components in scc.order are indexed 0..k-1 in topological order; scc.comp
  // maps nodes to those indices directly.
  for (size_t i = 0; i < g.vars.size(); ++i) out.model.set(g.vars[i], *val[scc.comp[static_cast<int>(i)]]);
  return out;
}

struct EqSolve {
  bool sat = false;
  Valuation model;
};

EqSolve eq_solve(const ConstraintSystem& s, const std::optional<Valuation>& pins, bool want_model) {
  std::set<Variable> vs;
  for (const auto& l : s.lits) {
    const Predicate& p = pred_info(l.atom.pred);
    if (p.name != "eq" || p.arity != 2) fail(Errc::UnknownPredicate, pred_str(l.atom.pred) + " in eq domain");
    for (const auto& v : l.atom.args) vs.insert(v);
  }
  if (pins)
    for (const auto& [v, q] : pins->m) vs.insert(v);
  std::vector<Variable> vars(vs.begin(), vs.end());
  std::map<Variable, int> idx;
  for (size_t i = 0; i < vars.size(); ++i) idx[vars[i]] = static_cast<int>(i);
  UnionFind uf(vars.size());
  for (const auto& l : s.lits)
    if (l.positive) uf.unite(idx[l.atom.args[0]], idx[l.atom.args[1]]);

  // pins: classes must not receive two distinct values
  std::map<int, Rational> pin_of_class;
  if (pins) {
    for (const auto& [v, q] : pins->m) {
      int c = uf.find(idx[v]);
      auto it = pin_of_class.find(c);
      if (it != pin_of_class.end() && it->second != q) return {};
      pin_of_class.emplace(c, q);
    }
  }
  for (const auto& l : s.lits)
    if (!l.positive && uf.find(idx[l.atom.args[0]]) == uf.find(idx[l.atom.args[1]])) return {};
  // pinned classes with equal pins would collide only if the same value pins
  // two classes that a disequality separates — that is fine (distinct classes
  // may share a value only if no disequality separates them). Check those:
  if (pins) {
    for (const auto& l : s.lits) {
      if (l.positive) continue;
      int a = uf.find(idx[l.atom.args[0]]), b = uf.find(idx[l.atom.args[1]]);
      auto ia = pin_of_class.find(a), ib = pin_of_class.find(b);
      if (ia != pin_of_class.end() && ib != pin_of_class.end() && ia->second == ib->second) return {};
    }
  }

  EqSolve out;
  out.sat = true;
  if (!want_model) return out;
  // fresh tags: integers above every pinned integer value
  Rational next(0);
  for (const auto& [c, q] : pin_of_class)
    if (q >= next) next = Rational(boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q) + 1);
  std::map<int, Rational> value_of_class;
  for (size_t i = 0; i < vars.size(); ++i) {
    int c = uf.find(static_cast<int>(i));
    if (!value_of_class.count(c)) {
      auto it = pin_of_class.find(c);
      if (it != pin_of_class.end()) {
        value_of_class[c] = it->second;
      } else {
        value_of_class[c] = next;
        next += 1;
      }
    }
    out.model.set(vars[i], value_of_class[c]);
  }
  return out;
}

}  // namespace

bool dense_order_decide(const ConstraintSystem& s) { return dense_solve(s, std::nullopt, true, false).sat; }

bool equality_decide(const ConstraintSystem& s) { return eq_solve(s, std::nullopt, false).sat; }

bool csp_satisfiable(const DomainHandle& dom, const ConstraintSystem& s) {
  for (const auto& l : s.lits)
    if (!dom.knows_pred(l.atom.pred))
      fail(Errc::UnknownPredicate, pred_str(l.atom.pred) + " not in domain " + dom.name());
  switch (dom.id()) {
    case DomainId::Eq: return eq_solve(s, std::nullopt, false).sat;
    case DomainId::Dense: return dense_solve(s, std::nullopt, false, false).sat;
    case DomainId::DenseConst: return dense_solve(s, std::nullopt, true, false).sat;
  }
  return false;
}

std::optional<Valuation> solve_model(const DomainHandle& dom, const ConstraintSystem& s) {
  for (const auto& l : s.lits)
    if (!dom.knows_pred(l.atom.pred))
      fail(Errc::UnknownPredicate, pred_str(l.atom.pred) + " not in domain " + dom.name());
  if (dom.id() == DomainId::Eq) {
    auto r = eq_solve(s, std::nullopt, true);
    if (!r.sat) return std::nullopt;
    return r.model;
  }
  auto r = dense_solve(s, std::nullopt, dom.id() == DomainId::DenseConst, true);
  if (!r.sat) return std::nullopt;
  return r.model;
}

Valuation extend_model(const DomainHandle& dom, const ConstraintSystem& s, const Valuation& partial) {
  if (!dom.supports_completion()) fail(Errc::CapabilityMissing, dom.name() + " lacks the completion capability");
  std::optional<Valuation> result;
  if (dom.id() == DomainId::Eq) {
    auto r = eq_solve(s, partial, true);
    if (r.sat) result = std::move(r.model);
  } else {
    auto r = dense_solve(s, partial, dom.id() == DomainId::DenseConst, true);
    if (r.sat) result = std::move(r.model);
  }
  if (!result)
    fail(Errc::PreconditionViolated,
         "partial valuation does not extend: either it violates the restriction or the system is unsatisfiable");
  // exactness on the partial's variables
  Valuation out = *result;
  for (const auto& [v, q] : partial.m) out.set(v, q);
  for (const auto& [v, q] : partial.m)
    if (result->at(v) != q) fail(Errc::InternalInconsistency, "pinned variable drifted: " + variable_str(v));
  return out;
}

}  // namespace ct
