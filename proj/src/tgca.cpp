#include "ct/tgca.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ct {

bool Tgca::all_accepting() const {
  for (bool f : accepting)
    if (!f) return false;
  return true;
}

std::vector<PredId> Tgca::guard_preds() const {
  std::set<PredId> seen;
  std::vector<Atom> atoms;
  for (const auto& t : trans) {
    atoms.clear();
    collect_atoms(t.guard, atoms);
    for (const auto& a : atoms) seen.insert(a.pred);
  }
  std::vector<PredId> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), pred_less);
  return out;
}

std::vector<std::string> validate(const Tgca& a) {
  std::vector<std::string> defects;
  auto bad = [&](const std::string& msg) { defects.push_back(msg); };
  if (a.d == 0) bad("degree must be at least 1");
  if (a.locations.empty()) bad("no locations");
  if (a.accepting.size() != a.locations.size()) bad("accepting vector size mismatch");
  for (uint32_t q : a.initial)
    if (q >= a.locations.size()) bad("initial location out of range");
  if (a.initial.empty()) bad("no initial locations");
  for (size_t ti = 0; ti < a.trans.size(); ++ti) {
    const auto& t = a.trans[ti];
    std::string at = "transition " + std::to_string(ti) + ": ";
    if (t.src >= a.locations.size()) bad(at + "source location out of range");
    if (t.targets.size() != a.d) bad(at + "target tuple arity differs from degree");
    for (uint32_t q : t.targets)
      if (q >= a.locations.size()) bad(at + "target location out of range");
    if (std::find(a.alphabet.begin(), a.alphabet.end(), t.letter) == a.alphabet.end())
      bad(at + "letter not in the alphabet");
    if (!t.guard) {
      bad(at + "missing guard");
      continue;
    }
    std::set<Variable> vars;
    collect_variables(t.guard, vars);
    for (const auto& v : vars) {
      switch (v.kind) {
        case Variable::Kind::Current:
          if (v.j < 1 || v.j > a.beta) bad(at + "register " + variable_str(v) + " out of range");
          break;
        case Variable::Kind::Child:
          if (v.i < 0 || static_cast<uint32_t>(v.i) >= a.d) bad(at + "direction out of range in " + variable_str(v));
          if (v.j < 1 || v.j > a.beta) bad(at + "register " + variable_str(v) + " out of range");
          break;
        case Variable::Kind::Parent:
          bad(at + "parent register " + variable_str(v) + " not allowed in guards");
          break;
        case Variable::Kind::Named:
          bad(at + "free variable " + variable_str(v) + " in guard");
          break;
      }
    }
    std::vector<Atom> atoms;
    collect_atoms(t.guard, atoms);
    for (const auto& atom : atoms)
      if (!a.domain.knows_pred(atom.pred))
        bad(at + "predicate " + pred_str(atom.pred) + " unknown to domain " + a.domain.name());
  }
  return defects;
}

size_t full_tree_size(uint32_t d, uint32_t depth) {
  size_t total = 0, level = 1;
  for (uint32_t l = 0; l <= depth; ++l) {
    total += level;
    level *= d;
  }
  return total;
}

std::string node_path(uint32_t d, size_t index) {
  if (index == 0) return "e";
  std::string rev;
  while (index != 0) {
    size_t parent = (index - 1) / d;
    rev.push_back(static_cast<char>('0' + (index - 1 - parent * d)));
    index = parent;
  }
  return std::string(rev.rbegin(), rev.rend());
}

bool check_run_prefix(const Tgca& a, const DataTreePrefix& t, const RunPrefix& r) {
  if (t.depth < 1) fail(Errc::ShapeMismatch, "run checking needs depth at least 1");
  if (t.d != a.d) fail(Errc::ShapeMismatch, "tree degree differs from the automaton");
  size_t data_nodes = full_tree_size(a.d, t.depth);
  size_t run_nodes = full_tree_size(a.d, t.depth - 1);
  if (t.letters.size() != data_nodes || t.values.size() != data_nodes)
    fail(Errc::ShapeMismatch, "data tree not complete to its depth");
  if (r.trans.size() != run_nodes) fail(Errc::ShapeMismatch, "run prefix not complete to depth-1");
  for (const auto& tuple : t.values)
    if (tuple.size() != a.beta) fail(Errc::ShapeMismatch, "value tuple width differs from beta");
  for (uint32_t ti : r.trans)
    if (ti >= a.trans.size()) fail(Errc::ShapeMismatch, "run references a missing transition");

  // root transition must start in the initial set
  uint32_t root_src = a.trans[r.trans[0]].src;
  if (std::find(a.initial.begin(), a.initial.end(), root_src) == a.initial.end()) return false;

  for (size_t n = 0; n < run_nodes; ++n) {
    const auto& tr = a.trans[r.trans[n]];
    if (tr.letter != t.letters[n]) return false;
    // source chaining into children that still carry transitions
    for (uint32_t i = 0; i < a.d; ++i) {
      size_t child = n * a.d + 1 + i;
      if (child < run_nodes && a.trans[r.trans[child]].src != tr.targets[i]) return false;
    }
    Valuation v;
    for (uint32_t j = 1; j <= a.beta; ++j) v.set(Variable::current(j), t.values[n][j - 1]);
    for (uint32_t i = 0; i < a.d; ++i) {
      size_t child = n * a.d + 1 + i;
      for (uint32_t j = 1; j <= a.beta; ++j) v.set(Variable::child(i, j), t.values[child][j - 1]);
    }
    if (!evaluate(tr.guard, v, a.domain)) return false;
  }
  return true;
}

namespace {

const SNode& named_form(const SNode& form, const std::string& key, bool required) {
  static SNode missing;
  for (size_t i = 1; i < form.items.size(); ++i) {
    const SNode& f = form.at(i);
    if (f.is_list && !f.items.empty() && f.items[0].sym_is(key)) return f;
  }
  if (required) fail(Errc::SyntaxError, form.where() + ": missing (" + key + " ...)");
  return missing;
}

uint64_t parse_count(const SNode& n) {
  if (n.is_sym()) {
    try {
      size_t pos = 0;
      unsigned long long v = std::stoull(n.text, &pos);
      if (pos == n.text.size()) return v;
    } catch (...) {
    }
  }
  fail(Errc::SyntaxError, n.where() + ": expected a number, got " + n.text);
}

}  // namespace

Tgca parse_tgca(const SNode& form) {
  if (!form.is_list || form.items.empty() || !form.items[0].sym_is("tgca"))
    fail(Errc::SyntaxError, form.where() + ": expected (tgca ...)");
  Tgca a;
  a.domain = domain_by_name(named_form(form, "domain", true).at(1).text);
  a.d = static_cast<uint32_t>(parse_count(named_form(form, "degree", true).at(1)));
  a.beta = static_cast<uint32_t>(parse_count(named_form(form, "beta", true).at(1)));
  if (a.d == 0) fail(Errc::SyntaxError, form.where() + ": degree must be at least 1");

  const SNode& locs = named_form(form, "locations", true);
  std::map<std::string, uint32_t> loc_of;
  for (size_t i = 1; i < locs.items.size(); ++i) {
    const std::string& name = locs.at(i).text;
    if (loc_of.count(name)) fail(Errc::SyntaxError, locs.at(i).where() + ": duplicate location " + name);
    loc_of[name] = static_cast<uint32_t>(a.locations.size());
    a.locations.push_back(name);
  }
  auto loc_id = [&](const SNode& n) {
    auto it = loc_of.find(n.text);
    if (it == loc_of.end()) fail(Errc::SyntaxError, n.where() + ": unknown location " + n.text);
    return it->second;
  };

  const SNode& alpha = named_form(form, "alphabet", true);
  std::set<Sym> alpha_set;
  for (size_t i = 1; i < alpha.items.size(); ++i) {
    Sym s = intern(alpha.at(i).text);
    if (!alpha_set.insert(s).second)
      fail(Errc::SyntaxError, alpha.at(i).where() + ": duplicate letter " + alpha.at(i).text);
    a.alphabet.push_back(s);
  }

  const SNode& init = named_form(form, "initial", true);
  for (size_t i = 1; i < init.items.size(); ++i) a.initial.push_back(loc_id(init.at(i)));

  a.accepting.assign(a.locations.size(), false);
  const SNode& acc = named_form(form, "accepting", true);
  for (size_t i = 1; i < acc.items.size(); ++i) a.accepting[loc_id(acc.at(i))] = true;

  for (size_t i = 1; i < form.items.size(); ++i) {
    const SNode& f = form.at(i);
    if (!f.is_list || f.items.empty() || !f.items[0].sym_is("trans")) continue;
    // (trans src letter GUARD tgt0 ... tgt_{d-1})
    if (f.items.size() != static_cast<size_t>(4 + a.d))
      fail(Errc::SyntaxError, f.where() + ": trans needs source, letter, guard and one target per direction");
    TgcaTransition t;
    t.src = loc_id(f.at(1));
    t.letter = intern(f.at(2).text);
    if (!alpha_set.count(t.letter)) fail(Errc::SyntaxError, f.at(2).where() + ": letter not in the alphabet");
    t.guard = parse_constraint(f.at(3));
    for (uint32_t k = 0; k < a.d; ++k) t.targets.push_back(loc_id(f.at(4 + k)));
    a.trans.push_back(std::move(t));
  }
  return a;
}

Tgca parse_tgca_text(const std::string& text) {
  std::vector<SNode> forms = parse_sexprs(text);
  if (forms.size() != 1) fail(Errc::SyntaxError, "expected exactly one (tgca ...) form");
  return parse_tgca(forms[0]);
}

std::string print_tgca(const Tgca& a) {
  std::ostringstream os;
  os << "(tgca\n";
  os << "  (domain " << a.domain.name() << ")\n";
  os << "  (degree " << a.d << ")\n";
  os << "  (beta " << a.beta << ")\n";
  os << "  (alphabet";
  for (Sym s : a.alphabet) os << " " << sym_name(s);
  os << ")\n  (locations";
  for (const auto& q : a.locations) os << " " << q;
  os << ")\n  (initial";
  for (uint32_t q : a.initial) os << " " << a.locations[q];
  os << ")\n  (accepting";
  for (size_t q = 0; q < a.locations.size(); ++q)
    if (a.accepting[q]) os << " " << a.locations[q];
  os << ")\n";
  for (const auto& t : a.trans) {
    os << "  (trans " << a.locations[t.src] << " " << sym_name(t.letter) << " " << constraint_str(t.guard);
    for (uint32_t q : t.targets) os << " " << a.locations[q];
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string data_tree_str(const DataTreePrefix& t) {
  std::ostringstream os;
  for (size_t n = 0; n < t.letters.size(); ++n) {
    os << "node " << node_path(t.d, n) << " letter=" << sym_name(t.letters[n]) << " values=";
    for (size_t j = 0; j < t.values[n].size(); ++j) {
      if (j) os << ",";
      os << rational_str(t.values[n][j]);
    }
    os << "\n";
  }
  return os.str();
}

namespace {

size_t saturating_mul(size_t a, size_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > SIZE_MAX / b) return SIZE_MAX;
  return a * b;
}

}  // namespace

StatsReport stats(const Tgca& a, const Budget& budget, bool enumerate) {
  StatsReport r;
  r.beta = a.beta;
  r.d = a.d;
  r.num_locations = a.locations.size();
  r.num_transitions = a.trans.size();
  std::vector<PredId> preds = a.guard_preds();
  r.m = preds.size();
  for (PredId p : preds) r.k0 = std::max(r.k0, pred_info(p).arity);
  for (const auto& t : a.trans) r.max_constraint_size = std::max(r.max_constraint_size, constraint_size(t.guard));

  size_t nregs = static_cast<size_t>(a.beta) * (a.d + 1);
  r.num_atoms = 0;
  for (PredId p : preds) {
    size_t tuples = 1;
    for (uint32_t k = 0; k < pred_info(p).arity; ++k) tuples = saturating_mul(tuples, nregs);
    r.num_atoms += tuples;
  }
  size_t powed = 1;
  for (uint32_t k = 0; k < r.k0; ++k) powed = saturating_mul(powed, nregs);
  r.atoms_bound = saturating_mul(r.m, powed);

  if (enumerate) {
    ReduceResult rr = reduce_to_bta(a, budget);
    r.enumerated = true;
    r.num_types = rr.types.size();
    r.bta_states = rr.bta.num_states();
    r.bta_transitions = rr.bta.trans.size();
    r.bta_transitions_expanded = rr.bta.expanded_transition_count(budget.max_transitions);
  }
  return r;
}

Witness concretize_witness(const Tgca& a, const TgcaVerdict& v, uint32_t depth) {
  if (!a.domain.supports_completion())
    fail(Errc::CapabilityMissing, a.domain.name() + " cannot complete partial valuations");
  if (!v.nonempty) fail(Errc::InvalidStrategy, "cannot concretize an Empty verdict");

  std::vector<UnfoldNode> nodes = unfold(v.reduced.bta, v.strategy, depth);
  size_t data_nodes = full_tree_size(a.d, depth);
  size_t run_nodes = depth == 0 ? 0 : full_tree_size(a.d, depth - 1);
  if (nodes.size() != data_nodes) fail(Errc::InternalInconsistency, "unfolding has unexpected shape");

  Witness w;
  w.data.d = a.d;
  w.data.depth = depth;
  w.data.letters.reserve(data_nodes);
  for (const auto& n : nodes) w.data.letters.push_back(n.letter);
  for (size_t n = 0; n < run_nodes; ++n) w.run.trans.push_back(v.reduced.trans_origin[nodes[n].trans]);

  // per-node variables v_<node>_<register>
  auto node_var = [](size_t n, uint32_t j) {
    return Variable::named(intern("v_" + std::to_string(n) + "_" + std::to_string(j)));
  };
  auto rename_reg = [&](size_t n, const Variable& reg) -> Variable {
    if (reg.kind == Variable::Kind::Current) return node_var(n, reg.j);
    if (reg.kind == Variable::Kind::Child) return node_var(n * a.d + 1 + static_cast<uint32_t>(reg.i), reg.j);
    fail(Errc::InternalInconsistency, "unexpected register " + variable_str(reg));
  };

  ConstraintSystem all;
  Valuation assigned;
  for (size_t n = 0; n < run_nodes; ++n) {
    uint32_t type_idx = v.reduced.decode_state(nodes[n].state).second;
    ConstraintSystem sys = type_system(v.reduced.universe, v.reduced.types[type_idx]);
    for (const auto& lit : sys.lits) {
      Atom renamed = lit.atom;
      for (auto& arg : renamed.args) arg = rename_reg(n, arg);
      all.add(Literal{std::move(renamed), lit.positive});
    }
    try {
      assigned = extend_model(a.domain, all, assigned);
    } catch (const Error& e) {
      if (e.code == Errc::PreconditionViolated)
        fail(Errc::InternalInconsistency, "witness completion failed: " + std::string(e.what()));
      throw;
    }
  }

  w.data.values.reserve(data_nodes);
  for (size_t n = 0; n < data_nodes; ++n) {
    std::vector<Rational> tuple;
    tuple.reserve(a.beta);
    for (uint32_t j = 1; j <= a.beta; ++j) {
      Variable var = node_var(n, j);
      tuple.push_back(assigned.has(var) ? assigned.at(var) : Rational(0));
    }
    w.data.values.push_back(std::move(tuple));
  }
  return w;
}

}  // namespace ct
