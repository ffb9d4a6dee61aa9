#pragma once

#include "houdini/path_export.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace houdini::cli {

enum ExitCode : int { kOk = 0, kSolverFailure = 1, kParseError = 2 };

/// Runs the command line `houdini <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Deterministic SVG of x along the path, δ decreasing from left to right.
std::string render_svg(const PathExport& path);

}  // namespace houdini::cli
