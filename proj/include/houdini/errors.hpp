#pragma once

#include <stdexcept>
#include <string>

namespace houdini {

enum class SolverErrorKind {
  kUnboundedStep,        // no blocking constraint along an improving direction
  kIterationLimit,       // iteration cap hit (cycling or numerical failure)
  kInfeasibleStart,      // starting point violates the constraints
  kInconsistentSystem,   // a multiplier system that must be solvable was not
  kPrecondition,         // caller contract violated
  kDegenerateStep,       // homotopy produced no decrease of the bound
};

const char* to_string(SolverErrorKind kind);

class SolverError : public std::runtime_error {
 public:
  SolverError(SolverErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  SolverErrorKind kind() const { return kind_; }

 private:
  SolverErrorKind kind_;
};

inline const char* to_string(SolverErrorKind kind) {
  switch (kind) {
    case SolverErrorKind::kUnboundedStep: return "unbounded step";
    case SolverErrorKind::kIterationLimit: return "iteration limit";
    case SolverErrorKind::kInfeasibleStart: return "infeasible start";
    case SolverErrorKind::kInconsistentSystem: return "inconsistent multiplier system";
    case SolverErrorKind::kPrecondition: return "precondition violated";
    case SolverErrorKind::kDegenerateStep: return "degenerate step";
  }
  return "solver error";
}

}  // namespace houdini
