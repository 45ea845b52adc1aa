#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ct/dl.hpp"
#include "ct/sexpr.hpp"
#include "ct/tgca.hpp"

namespace {

struct RunConfig {
  std::string path;
  std::string domain;  // empty: the ontology's declared domain / dense for csp
  std::string logic = "alco";
  bool una = false;
  int32_t witness_depth = -1;  // -1: per-command default
  ct::Budget budget;
  bool machine = false;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("file", cfg.path, "input file")->required();
  cmd->add_option("--domain", cfg.domain, "concrete domain: eq | dense | dense-const");
  cmd->add_option("--max-atoms", cfg.budget.max_atoms, "atom universe budget");
  cmd->add_option("--max-types", cfg.budget.max_types, "symbolic type / location budget");
  cmd->add_option("--max-transitions", cfg.budget.max_transitions, "transition budget");
  cmd->add_flag("--machine", cfg.machine, "line-oriented key=value output");
}

std::string params_str(const ct::DlParams& p) {
  std::ostringstream os;
  os << "eta=" << p.eta << " alpha=" << p.alpha << " kappa=" << p.kappa << " n_ex=" << p.n_ex
     << " n_cd=" << p.n_cd << " n_var=" << p.n_var << " d=" << p.d << " beta=" << p.beta;
  return os.str();
}

std::string stats_str(const ct::StatsReport& r) {
  std::ostringstream os;
  os << "m=" << r.m << " k0=" << r.k0 << " locations=" << r.num_locations
     << " transitions=" << r.num_transitions << " max_constraint_size=" << r.max_constraint_size
     << " atoms=" << r.num_atoms << " atoms_bound=" << r.atoms_bound;
  if (r.enumerated)
    os << " types=" << r.num_types << " bta_states=" << r.bta_states << " bta_transitions=" << r.bta_transitions
       << " bta_transitions_expanded=" << r.bta_transitions_expanded;
  return os.str();
}

void print_stats_human(std::ostream& os, const ct::StatsReport& r) {
  os << "automaton: locations=" << r.num_locations << " transitions=" << r.num_transitions << " d=" << r.d
     << " beta=" << r.beta << "\n";
  os << "guards: predicates m=" << r.m << " max arity k0=" << r.k0
     << " max constraint size=" << r.max_constraint_size << "\n";
  os << "atoms: " << r.num_atoms << " of bound " << r.atoms_bound << "\n";
  os << "atoms<=bound: " << (r.num_atoms <= r.atoms_bound ? "true" : "false") << "\n";
  if (r.enumerated)
    os << "satisfiable types: " << r.num_types << "\nbta: states=" << r.bta_states
       << " transitions=" << r.bta_transitions << " expanded=" << r.bta_transitions_expanded << "\n";
}

// Resource failures carry the original condition as the message prefix.
std::string error_label(const std::string& message) {
  size_t c = message.find(':');
  if (c != std::string::npos && c > 0 && message.substr(0, c).find(' ') == std::string::npos)
    return message.substr(0, c);
  return "ResourceExceeded";
}

// The head symbol decides how a file is interpreted.
bool is_tgca_forms(const std::vector<ct::SNode>& forms) {
  return forms.size() == 1 && forms[0].is_list && !forms[0].items.empty() && forms[0].items[0].sym_is("tgca");
}

ct::Tgca load_tgca(const std::vector<ct::SNode>& forms) {
  ct::Tgca a = ct::parse_tgca(forms[0]);
  std::vector<std::string> defects = ct::validate(a);
  if (!defects.empty()) ct::fail(ct::Errc::ShapeMismatch, defects.front());
  return a;
}

int cmd_check(const RunConfig& cfg) {
  ct::Ontology parsed = ct::parse_ontology(ct::read_file(cfg.path));
  ct::Ontology ont = ct::normalize(parsed);
  ct::DomainHandle dom = cfg.domain.empty() ? ct::DomainHandle(ont.domain) : ct::domain_by_name(cfg.domain);
  ct::CheckOptions co;
  co.logic = ct::parse_logic(cfg.logic);
  co.una = cfg.una;
  co.witness_depth = cfg.witness_depth < 0 ? 2 : static_cast<uint32_t>(cfg.witness_depth);
  co.budget = cfg.budget;
  ct::ConsistencyResult res = ct::check_consistency(ont, dom, co);

  if (res.status == ct::ConsistencyResult::Status::ResourceExceeded) {
    if (cfg.machine)
      std::cout << "error=" << error_label(res.message) << "\n";
    else
      std::cout << "error: " << res.message << "\n";
    return 2;
  }
  bool sat = res.status == ct::ConsistencyResult::Status::Consistent;
  if (cfg.machine) {
    std::cout << "verdict=" << (sat ? "consistent" : "inconsistent");
    if (sat) std::cout << " partition=" << ct::partition_str(ont, res.partition);
    std::cout << " partitions_tried=" << res.partitions_tried << " " << params_str(res.params) << " "
              << stats_str(res.stats_report) << "\n";
    if (res.witness) std::cout << ct::data_tree_str(res.witness->data);
  } else {
    std::cout << "verdict: " << (sat ? "consistent" : "inconsistent") << "\n";
    if (sat) std::cout << "partition: " << ct::partition_str(ont, res.partition) << "\n";
    std::cout << "partitions tried: " << res.partitions_tried << "\n";
    std::cout << "parameters: " << params_str(res.params) << "\n";
    print_stats_human(std::cout, res.stats_report);
    if (res.witness) std::cout << "witness:\n" << ct::data_tree_str(res.witness->data);
  }
  return sat ? 0 : 1;
}

int cmd_emptiness(const RunConfig& cfg) {
  std::vector<ct::SNode> forms = ct::parse_sexprs(ct::read_file(cfg.path));
  if (!is_tgca_forms(forms)) ct::fail(ct::Errc::UsageError, "expected a single tgca form");
  ct::Tgca a = load_tgca(forms);
  ct::TgcaVerdict v = ct::nonemptiness(a, cfg.budget);
  uint32_t depth = cfg.witness_depth < 0 ? 3 : static_cast<uint32_t>(cfg.witness_depth);
  if (cfg.machine)
    std::cout << "verdict=" << (v.nonempty ? "nonempty" : "empty") << "\n";
  else
    std::cout << "verdict: " << (v.nonempty ? "nonempty" : "empty") << "\n";
  if (v.nonempty && depth >= 1) {
    ct::Witness w = ct::concretize_witness(a, v, depth);
    if (!cfg.machine) std::cout << "witness:\n";
    std::cout << ct::data_tree_str(w.data);
  }
  return v.nonempty ? 0 : 1;
}

int cmd_csp(const RunConfig& cfg) {
  ct::ConstraintSystem s = ct::parse_system(ct::read_file(cfg.path));
  ct::DomainHandle dom = ct::domain_by_name(cfg.domain.empty() ? "dense" : cfg.domain);
  std::optional<ct::Valuation> model = ct::solve_model(dom, s);
  if (!model) {
    std::cout << (cfg.machine ? "verdict=unsat" : "UNSAT") << "\n";
    return 1;
  }
  for (const ct::Literal& l : s.lits)
    if (!ct::eval_literal(l, *model, dom))
      ct::fail(ct::Errc::InternalInconsistency, "solver model fails " + ct::literal_str(l));
  std::cout << (cfg.machine ? "verdict=sat" : "SAT") << "\n";
  for (const ct::Variable& v : s.variables())
    std::cout << "model " << ct::variable_str(v) << "=" << ct::rational_str(model->at(v)) << "\n";
  return 0;
}

int cmd_stats(const RunConfig& cfg) {
  std::string text = ct::read_file(cfg.path);
  std::vector<ct::SNode> forms = ct::parse_sexprs(text);
  if (is_tgca_forms(forms)) {
    ct::Tgca a = load_tgca(forms);
    ct::StatsReport r = ct::stats(a, cfg.budget, true);
    if (cfg.machine)
      std::cout << "d=" << r.d << " beta=" << r.beta << " " << stats_str(r)
                << " atoms_le_bound=" << (r.num_atoms <= r.atoms_bound ? "true" : "false") << "\n";
    else
      print_stats_human(std::cout, r);
    return 0;
  }
  ct::Ontology ont = ct::normalize(ct::parse_ontology(text));
  ct::DomainHandle dom = cfg.domain.empty() ? ct::DomainHandle(ont.domain) : ct::domain_by_name(cfg.domain);
  ct::Logic logic = ct::parse_logic(cfg.logic);
  ct::DlParams p = ct::derive_params(ont, logic);
  ct::Tgca a;
  switch (logic) {
    case ct::Logic::Alco: a = ct::compile_automaton(ont, dom, cfg.budget); break;
    case ct::Logic::Alcof: a = ct::compile_automaton_alcof(ont, dom, cfg.budget); break;
    case ct::Logic::Alci: a = ct::compile_automaton_alci(ont, dom, cfg.budget); break;
  }
  ct::StatsReport r = ct::stats(a, cfg.budget, true);
  if (cfg.machine) {
    std::cout << params_str(p) << " " << stats_str(r)
              << " atoms_le_bound=" << (r.num_atoms <= r.atoms_bound ? "true" : "false") << "\n";
  } else {
    std::cout << "parameters: " << params_str(p) << "\n";
    for (size_t b = 0; b < p.belems.size(); ++b) {
      const ct::BElem& be = p.belems[b];
      std::cout << "belem " << b << ": ";
      if (be.is_cd)
        std::cout << "binding " << be.j << " of " << ct::concept_str(ont.table, p.sub[be.sub_index]);
      else
        std::cout << ct::concept_str(ont.table, p.sub[be.sub_index]);
      std::cout << " -> direction " << p.lambda[b] << "\n";
    }
    print_stats_human(std::cout, r);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree global constraint automata over concrete domains"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* check = app.add_subcommand("check", "decide ontology consistency");
  add_common(check, cfg);
  check->add_option("--logic", cfg.logic, "alco | alci | alcof");
  check->add_flag("--una", cfg.una, "unique-name assumption (skip identification search)");
  check->add_option("--witness-depth", cfg.witness_depth, "witness tree depth (default 2, 0 = none)");

  CLI::App* emptiness = app.add_subcommand("emptiness", "decide tgca nonemptiness");
  add_common(emptiness, cfg);
  emptiness->add_option("--witness-depth", cfg.witness_depth, "witness tree depth (default 3, 0 = none)");

  CLI::App* csp = app.add_subcommand("csp", "decide a constraint system");
  add_common(csp, cfg);

  CLI::App* stats = app.add_subcommand("stats", "report derivation and size figures");
  add_common(stats, cfg);
  stats->add_option("--logic", cfg.logic, "alco | alci | alcof");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(cfg);
    if (app.got_subcommand(emptiness)) return cmd_emptiness(cfg);
    if (app.got_subcommand(csp)) return cmd_csp(cfg);
    return cmd_stats(cfg);
  } catch (const ct::Error& e) {
    if (cfg.machine)
      std::cout << "error=" << ct::errc_name(e.code) << "\n";
    else
      std::cout << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 2;
  }
}
