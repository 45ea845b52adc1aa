#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ct/constraints.hpp"
#include "ct/domains.hpp"
#include "ct/symtypes.hpp"
#include "ct/tgca.hpp"

namespace ct {

// Which compilation path to run. Alco: nominals allowed, plain roles.
// Alci: inverse roles, no nominals. Alcof: Alco plus functional role names.
enum class Logic { Alco, Alci, Alcof };
Logic parse_logic(const std::string& s);  // "alco" | "alci" | "alcof"
std::string logic_name(Logic l);

// A role name, possibly inverted. Inversions are meaningful only under Alci;
// the other paths reject them during compilation.
struct Role {
  Sym name = 0;
  bool inverted = false;
  friend bool operator==(const Role&, const Role&) = default;
  friend auto operator<=>(const Role& a, const Role& b) {
    if (a.name != b.name) return a.name <=> b.name;
    return a.inverted <=> b.inverted;
  }
};
Role role_inverse(Role r);
std::string role_str(const Role& r);

// Binding path inside a CD-restriction: a bare feature f, or role.feature.
struct RolePath {
  bool has_role = false;
  Role role;
  Sym feature = 0;
  friend bool operator==(const RolePath&, const RolePath&) = default;
  friend auto operator<=>(const RolePath& a, const RolePath& b) {
    if (a.has_role != b.has_role) return a.has_role <=> b.has_role;
    if (a.role != b.role) return a.role <=> b.role;
    return a.feature <=> b.feature;
  }
};
std::string role_path_str(const RolePath& p);

struct CdBinding {
  Sym var = 0;
  RolePath path;
  friend bool operator==(const CdBinding&, const CdBinding&) = default;
  friend auto operator<=>(const CdBinding& a, const CdBinding& b) {
    if (a.var != b.var) return a.var <=> b.var;
    return a.path <=> b.path;
  }
};

// Concepts are interned: structurally equal concepts share one id, so
// membership tests and closure sets work on plain integers.
using ConceptId = uint32_t;

struct Concept {
  enum class Kind : uint8_t {
    Top,
    Bot,
    Name,        // A
    NegName,     // not A
    Nominal,     // nom a
    NegNominal,  // not (nom a)
    And,
    Or,
    Exists,    // some R C
    Forall,    // all R C
    CdExists,  // cd-some bindings theta
    CdForall,  // cd-all bindings theta
  };
  Kind kind = Kind::Top;
  Sym name = 0;  // Name/NegName: concept name; Nominal/NegNominal: individual
  Role role;     // Exists/Forall
  ConceptId lhs = 0;  // And/Or left, Exists/Forall filler
  ConceptId rhs = 0;  // And/Or right
  std::vector<CdBinding> bindings;
  CPtr theta;  // CdExists/CdForall, over the binding variables as named vars
};

// Interning is memoization: building a concept through a const table never
// changes the meaning of existing ids, so the builders are const.
class ConceptTable {
 public:
  ConceptId intern(Concept c) const;
  const Concept& at(ConceptId id) const;
  size_t size() const { return nodes_.size(); }

  ConceptId top() const;
  ConceptId bot() const;
  ConceptId name(Sym a) const;
  ConceptId neg_name(Sym a) const;
  ConceptId nominal(Sym a) const;
  ConceptId neg_nominal(Sym a) const;
  ConceptId conj(ConceptId l, ConceptId r) const;
  ConceptId disj(ConceptId l, ConceptId r) const;
  ConceptId exists(Role r, ConceptId filler) const;
  ConceptId forall(Role r, ConceptId filler) const;
  ConceptId cd(bool existential, std::vector<CdBinding> bs, CPtr theta) const;

  // Negation in negation normal form; CD-restrictions dualize the quantifier
  // and negate the constraint.
  ConceptId negate(ConceptId id) const;

 private:
  mutable std::vector<Concept> nodes_;
  mutable std::map<std::string, ConceptId> index_;  // canonical text -> id
};
std::string concept_str(const ConceptTable& t, ConceptId id);

struct ConceptAssertion {
  Sym individual = 0;
  ConceptId concept_id = 0;
};
struct RoleAssertion {  // (a, b) : r with a plain role name
  Sym a = 0;
  Sym b = 0;
  Sym role = 0;
};
struct AssertedTerm {  // the feature value f(a)
  Sym feature = 0;
  Sym individual = 0;
  friend auto operator<=>(const AssertedTerm&, const AssertedTerm&) = default;
};
struct ConstraintAssertion {
  CPtr theta;  // over one named variable per distinct term
  std::vector<std::pair<Variable, AssertedTerm>> terms;
};

struct Ontology {
  DomainId domain = DomainId::Dense;
  ConceptTable table;
  std::vector<std::pair<ConceptId, ConceptId>> tbox;  // C subsumed-by D
  std::vector<ConceptAssertion> concept_asserts;
  std::vector<RoleAssertion> role_asserts;
  std::vector<ConstraintAssertion> constraint_asserts;

  // Name tables in first-occurrence order; indices into these vectors are the
  // canonical individual/feature/role numbers used everywhere downstream.
  std::vector<Sym> individuals;
  std::vector<Sym> features;
  std::vector<Sym> role_names;
  std::set<Sym> functional;  // declared functional role names

  bool normalized = false;
  bool uses_inverse = false;   // (inv r) occurred inside a concept or path
  bool uses_nominals = false;  // (nom a) occurred inside a concept

  uint32_t individual_index(Sym a) const;  // UnknownIndividual if absent
  uint32_t feature_index(Sym f) const;     // UnknownFeature if absent
  uint32_t role_index(Sym r) const;        // InternalInconsistency if absent
};

Ontology parse_ontology(const std::string& text);

// Negation normal form everywhere, every general concept inclusion rewritten
// under top, and a fresh individual carrying top when none is present.
Ontology normalize(const Ontology& o);

// Identify individuals per block_of (one block id per individual index); each
// block is renamed to its least member. Used to search for consistency
// without the unique-name assumption.
Ontology quotient(const Ontology& o, const std::vector<uint32_t>& block_of);

// One entry of the direction-labeling domain: an existential restriction or a
// (cd-existential, binding position) pair.
struct BElem {
  bool is_cd = false;
  uint32_t sub_index = 0;  // index into DlParams::sub
  uint32_t j = 0;          // 1-based binding position (cd entries)
};

struct DlParams {
  uint32_t n_ex = 0;
  uint32_t n_cd = 0;
  uint32_t n_var = 0;
  uint32_t eta = 0;
  uint32_t alpha = 0;
  uint32_t kappa = 0;
  uint32_t d = 0;
  uint32_t beta = 0;

  std::vector<ConceptId> sub;  // closure, deterministic order
  std::map<ConceptId, uint32_t> sub_index;
  std::vector<uint32_t> ex_subs;  // sub indices of existential restrictions
  std::vector<uint32_t> cd_subs;  // sub indices of cd-existentials

  std::vector<Role> roles;          // direction-owning roles (with inverses under Alci)
  std::vector<BElem> belems;        // labeling domain, canonical order
  std::vector<uint32_t> lambda;     // belems index -> direction
  std::vector<std::vector<uint32_t>> dir_of_role;  // roles index -> sorted directions
  std::vector<int32_t> role_of_dir;                // direction -> roles index or -1

  uint32_t role_slot(uint32_t role_idx, uint32_t ind_idx) const { return role_idx * eta + ind_idx; }
};

DlParams derive_params(const Ontology& o, Logic logic);

// A candidate concept type as a membership bit per closure entry.
using TypeBits = std::vector<bool>;

// The Hintikka conditions: no bottom, no name clash, nominal dichotomy,
// and/or closure, and every axiom's right-hand side present.
bool is_concept_type(const Ontology& o, const DlParams& p, const TypeBits& t);
bool type_is_anonymous(const Ontology& o, const DlParams& p, const TypeBits& t);
// The individual whose singleton concept the type contains, provided it
// rejects every other individual; -1 otherwise.
int32_t type_a_index(const Ontology& o, const DlParams& p, const TypeBits& t);

std::vector<TypeBits> enumerate_concept_types(const Ontology& o, const DlParams& p, const Budget& budget);

// What each compiled location stands for, parallel to Tgca::locations.
// Used by witness-faithfulness checks and structural tests.
struct LocationInfo {
  enum class Kind { Root, Pad, Contextual };
  Kind kind = Kind::Pad;
  TypeBits type;    // over DlParams::sub (Contextual only)
  uint64_t sl = 0;  // symbolic links as DlParams::role_slot bits (alco/alcof)
  uint32_t act = 0;  // activity bitmask over features
  // alci parent abstraction: Interior(up_role, up_type, up_act) when
  // interior, else the depth-1 abstraction anchored at individual gamma.
  bool interior = false;
  Role up_role;
  TypeBits up_type;
  uint32_t up_act = 0;
  uint32_t depth1_gamma = 0;
};
using LocationTable = std::vector<LocationInfo>;

// Ontology consistency compiled to tree-automaton nonemptiness. The plain
// path treats every role as ordinary; the alcof path enforces the declared
// functional roles; the alci path supports inverse roles and no nominals.
// When `info` is given it receives one LocationInfo per location.
Tgca compile_automaton(const Ontology& o, const DomainHandle& dom, const Budget& budget,
                       LocationTable* info = nullptr);
Tgca compile_automaton_alcof(const Ontology& o, const DomainHandle& dom, const Budget& budget,
                             LocationTable* info = nullptr);
Tgca compile_automaton_alci(const Ontology& o, const DomainHandle& dom, const Budget& budget,
                            LocationTable* info = nullptr);

struct CheckOptions {
  Logic logic = Logic::Alco;
  bool una = false;
  uint32_t witness_depth = 2;
  uint32_t partition_cap = 6;  // max individuals for partition enumeration
  Budget budget;
};

struct ConsistencyResult {
  enum class Status { Consistent, Inconsistent, ResourceExceeded };
  Status status = Status::Inconsistent;
  // Set for Consistent: the successful identification of individuals, as
  // blocks of original-individual indices, each block ascending.
  std::vector<std::vector<uint32_t>> partition;
  std::optional<Witness> witness;
  // The ontology/automaton pair behind the verdict (last one attempted when
  // inconsistent), for reporting and inspection.
  Ontology checked;
  DlParams params;
  Tgca automaton;
  LocationTable location_info;
  StatsReport stats_report;
  uint32_t partitions_tried = 0;
  std::string message;  // diagnostics for ResourceExceeded
};

ConsistencyResult check_consistency(const Ontology& o, const DomainHandle& dom, const CheckOptions& opts);

// "{a,b}{c}" with members in declaration order.
std::string partition_str(const Ontology& o, const std::vector<std::vector<uint32_t>>& blocks);

}  // namespace ct
