#include <algorithm>
#include <random>

#include "ct/domains.hpp"
#include "doctest.h"

using namespace ct;

namespace {

// Every assignment of n variables to "levels" 0..n-1 (not necessarily onto)
// induces a weak ordering; a {lt,eq} system is satisfiable over a dense order
// without endpoints iff some level assignment satisfies every literal.
bool weak_order_oracle(const ConstraintSystem& s) {
  std::vector<Variable> vars = s.variables();
  size_t n = vars.size();
  if (n == 0) {
    for (const Literal& l : s.lits) {
      (void)l;
      return false;  // no variables means no literals can exist
    }
    return true;
  }
  std::vector<uint32_t> level(n, 0);
  auto level_of = [&](const Variable& v) {
    return level[std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()];
  };
  PredId lt = intern_pred("lt", 2);
  while (true) {
    bool ok = true;
    for (const Literal& l : s.lits) {
      uint32_t a = level_of(l.atom.args[0]), b = level_of(l.atom.args[1]);
      bool truth = l.atom.pred == lt ? a < b : a == b;
      if (truth != l.positive) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
    size_t i = 0;
    while (i < n && ++level[i] == n) level[i++] = 0;
    if (i == n) return false;
  }
}

// A pure-equality system is satisfiable over an infinite set iff some
// partition of the variables satisfies it; levels double as block ids.
bool partition_oracle(const ConstraintSystem& s) {
  std::vector<Variable> vars = s.variables();
  size_t n = vars.size();
  std::vector<uint32_t> block(n, 0);
  auto block_of = [&](const Variable& v) {
    return block[std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()];
  };
  while (true) {
    bool ok = true;
    for (const Literal& l : s.lits) {
      bool truth = block_of(l.atom.args[0]) == block_of(l.atom.args[1]);
      if (truth != l.positive) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
    size_t i = 0;
    while (i < n && ++block[i] == n) block[i++] = 0;
    if (i == n) return false;
  }
}

ConstraintSystem random_order_system(std::mt19937& rng, size_t max_vars, size_t lits, bool with_lt) {
  const char* names[] = {"a", "b", "c", "d", "e"};
  size_t n = 1 + rng() % max_vars;
  ConstraintSystem s;
  PredId lt = intern_pred("lt", 2);
  PredId eq = intern_pred("eq", 2);
  for (size_t i = 0; i < lits; ++i) {
    Atom a;
    a.pred = with_lt && rng() % 2 ? lt : eq;
    a.args = {Variable::named(names[rng() % n]), Variable::named(names[rng() % n])};
    s.add(std::move(a), rng() % 2 == 0);
  }
  return s;
}

}  // namespace

TEST_CASE("domain lookup by name") {
  CHECK(domain_by_name("eq").id() == DomainId::Eq);
  CHECK(domain_by_name("dense").id() == DomainId::Dense);
  CHECK(domain_by_name("dense-const").id() == DomainId::DenseConst);
  CHECK_THROWS_AS(domain_by_name("float"), Error);
  CHECK(DomainHandle(DomainId::Dense).name() == "dense");
  CHECK(DomainHandle(DomainId::Dense).max_arity() == 2);
}

TEST_CASE("dense order decision agrees with the weak-ordering oracle") {
  std::mt19937 rng(42);
  DomainHandle dom(DomainId::Dense);
  int sat = 0;
  for (int round = 0; round < 600; ++round) {
    ConstraintSystem s = random_order_system(rng, 4, 1 + rng() % 7, true);
    bool expect = weak_order_oracle(s);
    CHECK(dense_order_decide(s) == expect);
    CHECK(csp_satisfiable(dom, s) == expect);
    sat += expect;
  }
  CHECK(sat > 50);
  CHECK(sat < 550);
}

TEST_CASE("equality decision agrees with the partition oracle") {
  std::mt19937 rng(43);
  DomainHandle dom(DomainId::Eq);
  int sat = 0;
  for (int round = 0; round < 600; ++round) {
    ConstraintSystem s = random_order_system(rng, 5, 1 + rng() % 8, false);
    bool expect = partition_oracle(s);
    CHECK(equality_decide(s) == expect);
    CHECK(csp_satisfiable(dom, s) == expect);
    sat += expect;
  }
  CHECK(sat > 50);
  CHECK(sat < 550);
}

TEST_CASE("known dense verdicts") {
  CHECK(dense_order_decide(parse_system("(lt a b)\n(lt b c)\n")));
  CHECK(!dense_order_decide(parse_system("(lt a b)\n(lt b a)\n")));
  CHECK(!dense_order_decide(parse_system("(lt a a)\n")));
  CHECK(!dense_order_decide(parse_system("(eq a b)\n(lt a b)\n")));
  CHECK(!dense_order_decide(parse_system("(not (eq a a))\n")));
  // strictness has no floor in a dense order: between any two points lies a third
  CHECK(dense_order_decide(parse_system("(lt a c)\n(lt a b)\n(lt b c)\n")));
  // irreflexive-negative cycle: a<=b<=a collapses to a=b, contradicting not-eq
  CHECK(!dense_order_decide(parse_system("(not (lt b a))\n(not (lt a b))\n(not (eq a b))\n")));
}

TEST_CASE("constant predicates pin values in the dense-const domain") {
  DomainHandle dom(DomainId::DenseConst);
  CHECK(csp_satisfiable(dom, parse_system("(ltC 5 x)\n(gtC 3 x)\n")));
  CHECK(!csp_satisfiable(dom, parse_system("(ltC 3 x)\n(gtC 5 x)\n")));
  CHECK(!csp_satisfiable(dom, parse_system("(eqC 3 x)\n(eqC 5 x)\n")));
  CHECK(csp_satisfiable(dom, parse_system("(eqC 3 x)\n(ltC 5 x)\n")));
  CHECK(!csp_satisfiable(dom, parse_system("(eqC 3 x)\n(lt x y)\n(ltC 3 y)\n")));
  // density between pinned constants
  CHECK(csp_satisfiable(dom, parse_system("(gtC 3 x)\n(ltC 4 x)\n(lt x y)\n(ltC 4 y)\n")));
}

TEST_CASE("models certify satisfiability") {
  std::mt19937 rng(44);
  for (DomainId id : {DomainId::Eq, DomainId::Dense, DomainId::DenseConst}) {
    DomainHandle dom(id);
    for (int round = 0; round < 200; ++round) {
      ConstraintSystem s = random_order_system(rng, 4, 1 + rng() % 6, id != DomainId::Eq);
      auto model = solve_model(dom, s);
      CHECK(model.has_value() == csp_satisfiable(dom, s));
      if (model) {
        for (const Literal& l : s.lits) CHECK(eval_literal(l, *model, dom));
        for (const Variable& v : s.variables()) CHECK(model->has(v));
      }
    }
  }
}

TEST_CASE("model extension agrees with the partial valuation exactly") {
  std::mt19937 rng(45);
  for (DomainId id : {DomainId::Eq, DomainId::Dense}) {
    DomainHandle dom(id);
    int extended = 0;
    for (int round = 0; round < 300; ++round) {
      ConstraintSystem s = random_order_system(rng, 4, 1 + rng() % 6, id == DomainId::Dense);
      auto full = solve_model(dom, s);
      if (!full) continue;
      // keep a random subset of the model as the partial valuation
      Valuation partial;
      for (const auto& [v, q] : full->m)
        if (rng() % 2) partial.set(v, q);
      Valuation ext = extend_model(dom, s, partial);
      for (const auto& [v, q] : partial.m) CHECK(ext.at(v) == q);
      for (const Literal& l : s.lits) CHECK(eval_literal(l, ext, dom));
      ++extended;
    }
    CHECK(extended > 30);
  }
}

TEST_CASE("model extension rejects a partial valuation that breaks the restriction") {
  DomainHandle dom(DomainId::Dense);
  ConstraintSystem s = parse_system("(lt a b)\n");
  Valuation bad;
  bad.set(Variable::named("a"), Rational(2));
  bad.set(Variable::named("b"), Rational(1));
  CHECK_THROWS_AS(extend_model(dom, s, bad), Error);
}

TEST_CASE("unknown predicates are not part of a domain") {
  DomainHandle eq(DomainId::Eq);
  DomainHandle dense(DomainId::Dense);
  DomainHandle dc(DomainId::DenseConst);
  PredId lt = intern_pred("lt", 2);
  PredId eqp = intern_pred("eq", 2);
  PredId ltc = intern_pred_const("ltC", Rational(7));
  CHECK(eq.knows_pred(eqp));
  CHECK(!eq.knows_pred(lt));
  CHECK(dense.knows_pred(lt));
  CHECK(dense.knows_pred(eqp));
  CHECK(!dense.knows_pred(ltc));
  CHECK(dc.knows_pred(ltc));
  CHECK(dc.knows_pred(lt));
}
