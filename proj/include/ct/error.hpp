#pragma once
#include <stdexcept>
#include <string>

namespace ct {

enum class Errc {
  UnknownPredicate,
  UnknownDomain,
  UnboundVariable,
  ArityMismatch,
  NonInjectiveRename,
  BudgetExceeded,
  SyntaxError,
  DuplicateCdVariable,
  UniverseMismatch,
  AtomOutsideUniverse,
  ShapeMismatch,
  PreconditionViolated,
  CapabilityMissing,
  InternalInconsistency,
  InvalidStrategy,
  NominalsNotSupported,
  UnknownFeature,
  UnknownIndividual,
  ResourceExceeded,
  UsageError,
};

const char* errc_name(Errc c);

struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& msg)
      : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

}  // namespace ct
