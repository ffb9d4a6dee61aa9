#pragma once

// Serialized form of a solution path. See docs/formats.md for the schema.

#include "houdini/homotopy.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace houdini {

inline constexpr int kPathSchemaVersion = 1;

struct BreakpointRecord {
  Index k = 0;
  double delta = 0.0;
  double t = 0.0;
  Vec x;                                     // dense
  std::vector<std::pair<Index, double>> y;   // nonzero entries
  Index primal_support = 0;                  // |J_P|
  Index primal_active = 0;                   // |I_P|
  Index dual_active = 0;                     // |J_D|
  Index dual_support = 0;                    // |I_D|
  double objective = 0.0;                    // ‖x‖₁

  bool operator==(const BreakpointRecord&) const = default;
};

struct PathExport {
  int schema_version = kPathSchemaVersion;
  std::string instance_digest;
  Index m = 0;
  Index n = 0;
  double delta_target = 0.0;
  std::string terminated;
  std::string message;
  std::vector<BreakpointRecord> breakpoints;
  PhaseTiming timing;
  Index dual_iterations = 0;
  Index primal_iterations = 0;
  Index warm_starts_used = 0;
  Index degeneracy_retries = 0;

  bool operator==(const PathExport& o) const;
  Vec y_dense(std::size_t k) const;
};

/// 64-bit FNV-1a over m, n, δ and the entries of A and b, as 16 hex digits.
std::string instance_digest(const ProblemInstance& inst);

PathExport make_export(const ProblemInstance& inst, const SolutionPath& path);

std::string path_to_json(const PathExport& p, int indent = -1);
PathExport path_from_json(const std::string& text);
PathExport read_path_file(const std::string& filename);

/// One row per breakpoint: k,delta,t,nnz_x,nnz_y,objective.
void write_path_csv(std::ostream& out, const PathExport& p);

}  // namespace houdini
