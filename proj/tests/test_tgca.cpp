#include <random>
#include <set>

#include "ct/tgca.hpp"
#include "doctest.h"

using namespace ct;

namespace {

const char* kChain = R"((tgca (domain dense) (degree 1) (beta 1) (alphabet a)
  (locations q0) (initial q0) (accepting q0)
  (trans q0 a (lt x1 x1.0) q0)))";

const char* kBranch = R"((tgca (domain dense) (degree 2) (beta 1) (alphabet a)
  (locations q0) (initial q0) (accepting q0)
  (trans q0 a (and (lt x1 x1.0) (eq x1 x1.1)) q0 q0)))";

const char* kHandoff = R"((tgca (domain dense) (degree 1) (beta 1) (alphabet a b)
  (locations q0 q1) (initial q0) (accepting q0 q1)
  (trans q0 a (lt x1 x1.0) q1)
  (trans q1 b (eq x1 x1.0) q0)))";

Tgca chain() { return parse_tgca_text(kChain); }

}  // namespace

TEST_CASE("parse and print round-trip") {
  for (const char* text : {kChain, kBranch, kHandoff}) {
    Tgca a = parse_tgca_text(text);
    Tgca b = parse_tgca_text(print_tgca(a));
    CHECK(print_tgca(a) == print_tgca(b));
    CHECK(a.locations == b.locations);
    CHECK(a.initial == b.initial);
    CHECK(a.accepting == b.accepting);
    CHECK(a.d == b.d);
    CHECK(a.beta == b.beta);
    REQUIRE(a.trans.size() == b.trans.size());
    for (size_t i = 0; i < a.trans.size(); ++i) {
      CHECK(a.trans[i].src == b.trans[i].src);
      CHECK(a.trans[i].letter == b.trans[i].letter);
      CHECK(a.trans[i].targets == b.trans[i].targets);
      CHECK(constraint_str(a.trans[i].guard) == constraint_str(b.trans[i].guard));
    }
  }
}

TEST_CASE("validation reports structural defects") {
  CHECK(validate(chain()).empty());

  Tgca a = chain();
  a.trans[0].targets.push_back(0);  // degree mismatch
  CHECK(!validate(a).empty());

  a = chain();
  a.trans[0].guard = parse_constraint("(lt x1 x1.1)");  // direction 1 with d=1
  CHECK(!validate(a).empty());

  a = chain();
  a.trans[0].guard = parse_constraint("(lt x1 x2.0)");  // register 2 with beta=1
  CHECK(!validate(a).empty());

  a = chain();
  a.trans[0].guard = parse_constraint("(lt x1 v)");  // named variable in a guard
  CHECK(!validate(a).empty());

  a = chain();
  a.initial = {5};
  CHECK(!validate(a).empty());

  a = chain();
  a.accepting = {true, true};
  CHECK(!validate(a).empty());

  a = chain();
  a.trans[0].src = 9;
  CHECK(!validate(a).empty());

  a = chain();
  a.trans[0].letter = intern("zz");  // letter outside the alphabet
  CHECK(!validate(a).empty());
}

TEST_CASE("run prefix checking accepts a real run and rejects corruptions") {
  Tgca a = parse_tgca_text(kBranch);
  DataTreePrefix t;
  t.d = 2;
  t.depth = 2;
  size_t n = full_tree_size(2, 2);
  REQUIRE(n == 7);
  t.letters.assign(n, intern("a"));
  // values: left child strictly above, right child equal
  t.values = {{Rational(0)}, {Rational(1)}, {Rational(0)}, {Rational(2)},
              {Rational(1)}, {Rational(1)}, {Rational(0)}};
  RunPrefix r;
  r.trans.assign(full_tree_size(2, 1), 0);
  CHECK(check_run_prefix(a, t, r));

  DataTreePrefix bad = t;
  bad.values[1] = {Rational(-1)};  // breaks lt at the root
  CHECK(!check_run_prefix(a, bad, r));

  bad = t;
  bad.letters[2] = intern("b");  // letter not matching the transition
  CHECK(!check_run_prefix(a, bad, r));

  RunPrefix badrun;
  badrun.trans.assign(full_tree_size(2, 1), 7);  // transition index out of range
  CHECK_THROWS_AS(check_run_prefix(a, t, badrun), Error);
}

TEST_CASE("node paths are heap-indexed breadth-first") {
  CHECK(node_path(2, 0) == "e");
  CHECK(node_path(2, 1) == "0");
  CHECK(node_path(2, 2) == "1");
  CHECK(node_path(2, 3) == "00");
  CHECK(node_path(2, 4) == "01");
  CHECK(node_path(2, 5) == "10");
  CHECK(node_path(2, 6) == "11");
  CHECK(node_path(3, 3) == "2");
  CHECK(node_path(3, 4) == "00");
  CHECK(node_path(3, 5) == "01");
  CHECK(node_path(3, 13) == "000");
  CHECK(full_tree_size(3, 2) == 13);
  CHECK(full_tree_size(1, 4) == 5);
}

TEST_CASE("reduction is the location-type product") {
  Budget budget;
  for (const char* text : {kChain, kBranch, kHandoff}) {
    Tgca a = parse_tgca_text(text);
    ReduceResult r = reduce_to_bta(a, budget);
    CHECK(r.num_locations == a.locations.size());
    CHECK(r.bta.num_states() == a.locations.size() * r.types.size());
    // initial bta states = initial locations x all types
    std::set<uint32_t> init(r.bta.initial.begin(), r.bta.initial.end());
    CHECK(init.size() == a.initial.size() * r.types.size());
    for (uint32_t q : a.initial)
      for (uint32_t ti = 0; ti < r.types.size(); ++ti) CHECK(init.count(q * r.types.size() + ti) == 1);
    // decode is the inverse of the pairing
    for (uint32_t s = 0; s < r.bta.num_states(); ++s) {
      auto [loc, ti] = r.decode_state(s);
      CHECK(loc < a.locations.size());
      CHECK(ti < r.types.size());
      CHECK(loc * r.types.size() + ti == s);
    }
    // every bta transition originates from a guard-satisfying source type
    for (size_t bt = 0; bt < r.bta.trans.size(); ++bt) {
      auto [loc, ti] = r.decode_state(r.bta.trans[bt].src);
      uint32_t origin = r.trans_origin[bt];
      REQUIRE(origin < a.trans.size());
      CHECK(a.trans[origin].src == loc);
      CHECK(entails(r.universe, r.types[ti], a.trans[origin].guard));
    }
  }
}

TEST_CASE("serial and parallel reduction agree exactly") {
  Budget budget;
  Tgca a = parse_tgca_text(kBranch);
  ReduceResult p = reduce_to_bta(a, budget, false);
  ReduceResult s = reduce_to_bta(a, budget, true);
  CHECK(p.types.size() == s.types.size());
  CHECK(p.bta.num_states() == s.bta.num_states());
  CHECK(p.bta.initial == s.bta.initial);
  CHECK(p.bta.slots == s.bta.slots);
  CHECK(p.trans_origin == s.trans_origin);
  REQUIRE(p.bta.trans.size() == s.bta.trans.size());
  for (size_t i = 0; i < p.bta.trans.size(); ++i) {
    CHECK(p.bta.trans[i].src == s.bta.trans[i].src);
    CHECK(p.bta.trans[i].dirs == s.bta.trans[i].dirs);
  }
}

TEST_CASE("nonemptiness verdicts on small automata") {
  CHECK(nonemptiness(chain(), Budget{}).nonempty);
  CHECK(nonemptiness(parse_tgca_text(kBranch), Budget{}).nonempty);
  CHECK(nonemptiness(parse_tgca_text(kHandoff), Budget{}).nonempty);
  Tgca broke = chain();
  broke.trans[0].guard = parse_constraint("(and (lt x1 x1.0) (lt x1.0 x1))");
  CHECK(!nonemptiness(broke, Budget{}).nonempty);
}

TEST_CASE("witnesses concretize into checkable run prefixes") {
  Budget budget;
  for (const char* text : {kChain, kBranch, kHandoff}) {
    Tgca a = parse_tgca_text(text);
    TgcaVerdict v = nonemptiness(a, budget);
    REQUIRE(v.nonempty);
    for (uint32_t depth : {1u, 2u, 3u}) {
      Witness w = concretize_witness(a, v, depth);
      CHECK(w.data.depth == depth);
      CHECK(w.data.letters.size() == full_tree_size(a.d, depth));
      CHECK(w.run.trans.size() == full_tree_size(a.d, depth - 1));
      CHECK(check_run_prefix(a, w.data, w.run));
      for (const auto& vals : w.data.values) CHECK(vals.size() == a.beta);
    }
  }
}

TEST_CASE("witness text lists one node per line") {
  Tgca a = chain();
  TgcaVerdict v = nonemptiness(a, Budget{});
  Witness w = concretize_witness(a, v, 2);
  std::string s = data_tree_str(w.data);
  CHECK(s.find("node e letter=a values=") == 0);
  CHECK(s.find("node 0 letter=a") != std::string::npos);
  CHECK(s.find("node 00 letter=a") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}

TEST_CASE("stats reports the atom bound") {
  Tgca a = parse_tgca_text(kBranch);
  StatsReport st = stats(a, Budget{}, true);
  CHECK(st.m == 2);  // lt and eq
  CHECK(st.beta == 1);
  CHECK(st.d == 2);
  CHECK(st.k0 == 2);
  CHECK(st.num_locations == 1);
  CHECK(st.num_transitions == 1);
  CHECK(st.num_atoms <= st.atoms_bound);
  CHECK(st.atoms_bound == 2 * (1 * 3) * (1 * 3));  // m * (beta*(d+1))^k0
  CHECK(st.enumerated);
  CHECK(st.num_types == 13);  // weak orderings of three registers
  CHECK(st.bta_states == st.num_locations * st.num_types);

  StatsReport quick = stats(a, Budget{}, false);
  CHECK(!quick.enumerated);
  CHECK(quick.num_types == 0);
}

TEST_CASE("guards collect distinct predicates across transitions") {
  Tgca a = parse_tgca_text(kHandoff);
  auto preds = a.guard_preds();
  CHECK(preds.size() == 2);
  Tgca c = chain();
  CHECK(c.guard_preds().size() == 1);
}

TEST_CASE("reduction respects the type budget") {
  Tgca a = parse_tgca_text(kBranch);
  Budget tiny;
  tiny.max_types = 5;
  CHECK_THROWS_AS(reduce_to_bta(a, tiny), Error);
}

TEST_CASE("degenerate register-free automata reduce to themselves") {
  Tgca a = parse_tgca_text(R"((tgca (domain dense) (degree 2) (beta 0) (alphabet a b)
    (locations q0 q1) (initial q0) (accepting q0 q1)
    (trans q0 a true q0 q1)
    (trans q1 b true q1 q1)))");
  REQUIRE(validate(a).empty());
  ReduceResult r = reduce_to_bta(a, Budget{});
  CHECK(r.types.size() == 1);
  CHECK(r.bta.num_states() == 2);
  CHECK(nonemptiness(a, Budget{}).nonempty);

  // cutting q1's loop starves both branches
  Tgca cut = a;
  cut.trans.pop_back();
  CHECK(!nonemptiness(cut, Budget{}).nonempty);
}

TEST_CASE("malformed automaton text is rejected") {
  CHECK_THROWS_AS(parse_tgca_text("(tgca (degree 1))"), Error);
  CHECK_THROWS_AS(parse_tgca_text("(notatgca)"), Error);
  CHECK_THROWS_AS(parse_tgca_text(R"((tgca (domain dense) (degree 1) (beta 1) (alphabet a)
    (locations q0) (initial qX) (accepting q0)
    (trans q0 a true q0)))"),
                  Error);
}
