#include <chrono>
#include <iostream>
#include <string>

#include "ct/tgca.hpp"

// Compares the serial and multi-threaded reductions on a synthetic automaton
// large enough to exercise the entailment sweep, and reports wall times.

namespace {

ct::Tgca synthetic(uint32_t locations) {
  using namespace ct;
  Tgca a;
  a.domain = DomainHandle(DomainId::Dense);
  a.d = 2;
  a.beta = 2;
  a.alphabet = {intern("s")};
  for (uint32_t q = 0; q < locations; ++q) {
    a.locations.push_back("q" + std::to_string(q));
    a.accepting.push_back(true);
  }
  a.initial = {0};
  for (uint32_t q = 0; q < locations; ++q) {
    uint32_t next = (q + 1) % locations;
    // Strictly increasing along direction 0, equal along direction 1.
    a.trans.push_back(TgcaTransition{
        q, a.alphabet[0],
        c_and({c_lt(Variable::current(1), Variable::child(0, 1)),
               c_eq(Variable::current(2), Variable::child(1, 2)),
               c_or({c_lt(Variable::current(2), Variable::child(0, 2)),
                     c_eq(Variable::current(1), Variable::child(1, 1))})}),
        {next, q}});
  }
  return a;
}

double run(const ct::Tgca& a, const ct::Budget& b, bool serial, ct::ReduceResult& out) {
  auto t0 = std::chrono::steady_clock::now();
  out = ct::reduce_to_bta(a, b, serial);
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

bool same(const ct::ReduceResult& x, const ct::ReduceResult& y) {
  if (x.types.size() != y.types.size()) return false;
  if (x.bta.num_states() != y.bta.num_states()) return false;
  if (x.bta.initial != y.bta.initial) return false;
  if (x.bta.slots != y.bta.slots) return false;
  if (x.bta.trans.size() != y.bta.trans.size()) return false;
  for (size_t i = 0; i < x.bta.trans.size(); ++i) {
    const auto& tx = x.bta.trans[i];
    const auto& ty = y.bta.trans[i];
    if (tx.src != ty.src || tx.letter != ty.letter || tx.dirs != ty.dirs) return false;
  }
  return x.trans_origin == y.trans_origin;
}

}  // namespace

int main(int argc, char** argv) {
  uint32_t locations = argc > 1 ? static_cast<uint32_t>(std::stoul(argv[1])) : 6;
  ct::Tgca a = synthetic(locations);
  ct::Budget budget;

  ct::ReduceResult serial, parallel;
  double ts = run(a, budget, true, serial);
  double tp = run(a, budget, false, parallel);

  std::cout << "locations=" << a.locations.size() << " types=" << serial.types.size()
            << " bta_states=" << serial.bta.num_states() << " bta_transitions=" << serial.bta.trans.size()
            << "\n";
  std::cout << "serial_seconds=" << ts << " parallel_seconds=" << tp << "\n";
  if (!same(serial, parallel)) {
    std::cout << "mismatch: serial and parallel reductions differ\n";
    return 1;
  }
  std::cout << "identical=true\n";
  return 0;
}
