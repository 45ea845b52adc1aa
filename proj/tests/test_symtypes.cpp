#include <random>
#include <set>

#include "ct/symtypes.hpp"
#include "doctest.h"

using namespace ct;

namespace {

PredId p_lt() { return intern_pred("lt", 2); }
PredId p_eq() { return intern_pred("eq", 2); }

std::vector<PredId> dense_preds() { return {p_lt(), p_eq()}; }
std::vector<PredId> eq_preds() { return {p_eq()}; }

Valuation random_valuation(const AtomUniverse& u, std::mt19937& rng, int spread) {
  Valuation v;
  for (const Variable& r : u.regs) v.set(r, Rational(static_cast<int>(rng() % spread)));
  return v;
}

// All 2^n polarity vectors whose literal systems the domain satisfies.
std::vector<SymbolicType> brute_force_types(const AtomUniverse& u, const DomainHandle& dom) {
  REQUIRE(u.size() <= 12);
  std::vector<SymbolicType> out;
  for (uint64_t bits = 0; bits < (1ull << u.size()); ++bits) {
    SymbolicType t;
    t.bits.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) t.bits[i] = (bits >> i) & 1;
    if (csp_satisfiable(dom, type_system(u, t))) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

TEST_CASE("universe atoms come in canonical order") {
  AtomUniverse u = build_universe(dense_preds(), 1, 1, Budget{});
  REQUIRE(u.regs.size() == 2);
  CHECK(variable_str(u.regs[0]) == "x1");
  CHECK(variable_str(u.regs[1]) == "x1.0");
  REQUIRE(u.size() == 8);
  // predicates sorted by name (eq before lt), argument tuples lexicographic
  // over register order with the last argument varying fastest
  const char* expect[] = {
      "(eq x1 x1)",   "(eq x1 x1.0)",   "(eq x1.0 x1)",   "(eq x1.0 x1.0)",
      "(lt x1 x1)",   "(lt x1 x1.0)",   "(lt x1.0 x1)",   "(lt x1.0 x1.0)",
  };
  for (size_t i = 0; i < 8; ++i) CHECK(atom_str(u.atoms[i]) == expect[i]);
  for (size_t i = 0; i < 8; ++i) CHECK(u.index_of(u.atoms[i]) == i);

  // all-current atoms and their per-direction projections line up
  REQUIRE(u.cur_idx.size() == 2);
  CHECK(atom_str(u.atoms[u.cur_idx[0]]) == "(eq x1 x1)");
  CHECK(atom_str(u.atoms[u.cur_idx[1]]) == "(lt x1 x1)");
  REQUIRE(u.proj_idx.size() == 1);
  REQUIRE(u.proj_idx[0].size() == 2);
  CHECK(atom_str(u.atoms[u.proj_idx[0][0]]) == "(eq x1.0 x1.0)");
  CHECK(atom_str(u.atoms[u.proj_idx[0][1]]) == "(lt x1.0 x1.0)");

  Atom outside{p_eq(), {Variable::current(2), Variable::current(2)}};
  CHECK(!u.contains(outside));
  CHECK_THROWS_AS(u.index_of(outside), Error);
}

TEST_CASE("duplicated predicate lists are deduplicated") {
  AtomUniverse u = build_universe({p_lt(), p_eq(), p_lt()}, 1, 0, Budget{});
  CHECK(u.preds.size() == 2);
  CHECK(u.size() == 2);  // eq(x1,x1), lt(x1,x1)
}

TEST_CASE("satisfiable type counts over two registers") {
  Budget b;
  DomainHandle dense(DomainId::Dense), eq(DomainId::Eq);
  AtomUniverse u = build_universe(dense_preds(), 1, 1, b);
  CHECK(enumerate_satisfiable_types(u, dense, b).size() == 3);  // x<y, x=y, x>y
  AtomUniverse ue = build_universe(eq_preds(), 1, 1, b);
  CHECK(enumerate_satisfiable_types(ue, eq, b).size() == 2);  // x=y, x!=y
}

TEST_CASE("satisfiable type counts follow the weak-ordering and partition counts") {
  Budget b;
  // six registers: 4683 weak orderings over the dense order
  AtomUniverse u6 = build_universe(dense_preds(), 2, 2, b);
  REQUIRE(u6.regs.size() == 6);
  CHECK(enumerate_satisfiable_types(u6, DomainHandle(DomainId::Dense), b).size() == 4683);
  // six registers: 203 partitions under pure equality
  AtomUniverse ue6 = build_universe(eq_preds(), 3, 1, b);
  REQUIRE(ue6.regs.size() == 6);
  CHECK(enumerate_satisfiable_types(ue6, DomainHandle(DomainId::Eq), b).size() == 203);
  // nine registers: 21147 partitions
  AtomUniverse ue9 = build_universe(eq_preds(), 3, 2, b);
  REQUIRE(ue9.regs.size() == 9);
  CHECK(enumerate_satisfiable_types(ue9, DomainHandle(DomainId::Eq), b).size() == 21147);
}

TEST_CASE("ten equality registers fit the default type budget exactly once") {
  Budget b;
  AtomUniverse u10 = build_universe(eq_preds(), 2, 4, b);
  REQUIRE(u10.regs.size() == 10);
  CHECK(enumerate_satisfiable_types(u10, DomainHandle(DomainId::Eq), b).size() == 115975);
  // one more register overflows the 200000 budget
  AtomUniverse u11 = build_universe(eq_preds(), 1, 10, b);
  REQUIRE(u11.regs.size() == 11);
  CHECK_THROWS_AS(enumerate_satisfiable_types(u11, DomainHandle(DomainId::Eq), b), Error);
}

TEST_CASE("pinned constants split a single register three ways") {
  Budget b;
  std::vector<PredId> preds{p_lt(), p_eq(), intern_pred_const("eqC", Rational(0)),
                            intern_pred_const("ltC", Rational(0)), intern_pred_const("gtC", Rational(0))};
  AtomUniverse u = build_universe(preds, 1, 0, b);
  CHECK(u.size() == 5);
  auto types = enumerate_satisfiable_types(u, DomainHandle(DomainId::DenseConst), b);
  CHECK(types.size() == 3);  // below, at, above the constant
}

TEST_CASE("the empty universe has exactly the empty type") {
  Budget b;
  AtomUniverse u = build_universe(dense_preds(), 0, 2, b);
  CHECK(u.size() == 0);
  CHECK(enumerate_satisfiable_types(u, DomainHandle(DomainId::Dense), b).size() == 1);
}

TEST_CASE("enumeration matches exhaustive search on small universes") {
  Budget b;
  struct Shape {
    DomainId id;
    std::vector<PredId> preds;
    uint32_t beta, d;
  };
  std::vector<Shape> shapes{
      {DomainId::Dense, dense_preds(), 1, 1},
      {DomainId::Eq, eq_preds(), 1, 2},
      {DomainId::Eq, eq_preds(), 3, 0},
      {DomainId::DenseConst,
       {p_lt(), p_eq(), intern_pred_const("ltC", Rational(2)), intern_pred_const("gtC", Rational(1))},
       1, 0},
  };
  for (const Shape& sh : shapes) {
    DomainHandle dom(sh.id);
    AtomUniverse u = build_universe(sh.preds, sh.beta, sh.d, b);
    REQUIRE(u.size() <= 12);
    auto fast = enumerate_satisfiable_types(u, dom, b);
    auto slow = brute_force_types(u, dom);
    REQUIRE(fast.size() == slow.size());
    std::set<std::vector<bool>> fs, ss;
    for (auto& t : fast) fs.insert(t.bits);
    for (auto& t : slow) ss.insert(t.bits);
    CHECK(fs == ss);
    // deterministic order across calls
    CHECK(enumerate_satisfiable_types(u, dom, b) == fast);
  }
}

TEST_CASE("every valuation realizes exactly one satisfiable type") {
  Budget b;
  std::mt19937 rng(7);
  struct Shape {
    DomainId id;
    std::vector<PredId> preds;
    uint32_t beta, d;
  };
  std::vector<Shape> shapes{
      {DomainId::Dense, dense_preds(), 1, 1},
      {DomainId::Dense, dense_preds(), 2, 1},
      {DomainId::Eq, eq_preds(), 2, 2},
      {DomainId::DenseConst,
       {p_lt(), p_eq(), intern_pred_const("eqC", Rational(1)), intern_pred_const("ltC", Rational(1))},
       1, 1},
  };
  for (const Shape& sh : shapes) {
    DomainHandle dom(sh.id);
    AtomUniverse u = build_universe(sh.preds, sh.beta, sh.d, b);
    auto types = enumerate_satisfiable_types(u, dom, b);
    std::set<std::vector<bool>> all;
    for (auto& t : types) all.insert(t.bits);
    for (int round = 0; round < 200; ++round) {
      Valuation v = random_valuation(u, rng, 3);
      SymbolicType t = type_of_values(u, dom, v);
      CHECK(is_satisfiable_type(u, dom, t));
      CHECK(all.count(t.bits) == 1);
      // v satisfies its own type's literals and no other type's
      for (const Literal& l : type_system(u, t).lits) CHECK(eval_literal(l, v, dom));
      int holders = 0;
      for (const SymbolicType& other : types) {
        bool sat = true;
        for (const Literal& l : type_system(u, other).lits)
          if (!eval_literal(l, v, dom)) {
            sat = false;
            break;
          }
        holders += sat;
      }
      CHECK(holders == 1);
    }
  }
}

TEST_CASE("distinct satisfiable types are jointly unsatisfiable") {
  Budget b;
  struct Shape {
    DomainId id;
    std::vector<PredId> preds;
    uint32_t beta, d;
  };
  std::vector<Shape> shapes{
      {DomainId::Dense, dense_preds(), 1, 1},
      {DomainId::Eq, eq_preds(), 1, 2},
      {DomainId::DenseConst,
       {p_lt(), p_eq(), intern_pred_const("gtC", Rational(0))},
       1, 1},
  };
  for (const Shape& sh : shapes) {
    DomainHandle dom(sh.id);
    AtomUniverse u = build_universe(sh.preds, sh.beta, sh.d, b);
    auto types = enumerate_satisfiable_types(u, dom, b);
    for (size_t i = 0; i < types.size(); ++i)
      for (size_t j = i + 1; j < types.size(); ++j) {
        ConstraintSystem joint = type_system(u, types[i]);
        joint.merge(type_system(u, types[j]));
        CHECK(!csp_satisfiable(dom, joint));
      }
  }
}

TEST_CASE("entailment equals evaluation of any realizing model") {
  Budget b;
  std::mt19937 rng(9);
  DomainHandle dom(DomainId::Dense);
  AtomUniverse u = build_universe(dense_preds(), 1, 1, b);
  auto types = enumerate_satisfiable_types(u, dom, b);
  auto random_theta = [&](auto&& self, int depth) -> CPtr {
    int pick = rng() % (depth <= 0 ? 2 : 5);
    const Atom& a = u.atoms[rng() % u.size()];
    switch (pick) {
      case 0: return c_atom(a);
      case 1: return c_not(c_atom(a));
      case 2: return c_and({self(self, depth - 1), self(self, depth - 1)});
      case 3: return c_or({self(self, depth - 1), self(self, depth - 1)});
      default: return rng() % 2 ? c_true() : c_false();
    }
  };
  for (int round = 0; round < 150; ++round) {
    CPtr theta = random_theta(random_theta, 3);
    for (const SymbolicType& t : types) {
      auto model = solve_model(dom, type_system(u, t));
      REQUIRE(model.has_value());
      CHECK(entails(u, t, theta) == evaluate(theta, *model, dom));
    }
  }
}

TEST_CASE("projection compatibility is fingerprint equality") {
  Budget b;
  std::mt19937 rng(11);
  for (DomainId id : {DomainId::Dense, DomainId::Eq}) {
    DomainHandle dom(id);
    AtomUniverse u = build_universe(id == DomainId::Eq ? eq_preds() : dense_preds(), 2, 2, b);
    auto types = enumerate_satisfiable_types(u, dom, b);
    for (int round = 0; round < 400; ++round) {
      const SymbolicType& t = types[rng() % types.size()];
      const SymbolicType& c = types[rng() % types.size()];
      uint32_t dir = rng() % u.d;
      bool compat = projection_compatible(u, t, dir, c);
      CHECK(compat == (fingerprint_child(u, t, dir) == fingerprint_current(u, c)));
    }
    // a valuation's type is projection-compatible with the type of the
    // valuation shifted so that child dir registers become current
    for (int round = 0; round < 100; ++round) {
      Valuation v = random_valuation(u, rng, 3);
      SymbolicType t = type_of_values(u, dom, v);
      for (uint32_t dir = 0; dir < u.d; ++dir) {
        Valuation w;
        for (uint32_t j = 1; j <= u.beta; ++j) w.set(Variable::current(j), v.at(Variable::child(dir, j)));
        // remaining registers copy the parent arbitrarily
        for (uint32_t i = 0; i < u.d; ++i)
          for (uint32_t j = 1; j <= u.beta; ++j) w.set(Variable::child(i, j), v.at(Variable::current(j)));
        CHECK(projection_compatible(u, t, dir, type_of_values(u, dom, w)));
      }
    }
  }
}

TEST_CASE("budgets cut off atom and type blowups cleanly") {
  Budget tiny;
  tiny.max_atoms = 10;
  CHECK_THROWS_AS(build_universe(dense_preds(), 2, 2, tiny), Error);
  Budget few;
  few.max_types = 2;
  AtomUniverse u = build_universe(dense_preds(), 1, 1, Budget{});
  CHECK_THROWS_AS(enumerate_satisfiable_types(u, DomainHandle(DomainId::Dense), few), Error);
}
