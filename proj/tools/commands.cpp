#include "cli.hpp"

#include "houdini/homotopy.hpp"
#include "houdini/instances.hpp"
#include "houdini/oracle.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace houdini::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool trace_enabled() {
  const char* v = std::getenv("HOUDINI_TRACE");
  return v && std::string(v) == "1";
}

bool looks_like_json(const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return true;
  std::ifstream in(path);
  char c = 0;
  while (in.get(c))
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
  return false;
}

GroundTruthInstance load_instance(const std::string& input, const std::string& rhs,
                                  std::optional<double> delta) {
  GroundTruthInstance g;
  if (looks_like_json(input)) {
    g = read_instance_file(input);
    if (!rhs.empty()) g.inst.b = read_vector_file(rhs);
  } else {
    if (rhs.empty()) throw UsageError("a MatrixMarket matrix needs --rhs with the vector b");
    if (!delta) throw UsageError("a MatrixMarket matrix needs --delta");
    g.inst.a = read_matrix_market_file(input);
    g.inst.b = read_vector_file(rhs);
  }
  if (delta) g.inst.delta = *delta;
  g.inst.validate();
  return g;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

HomotopyOptions homotopy_options(std::optional<double> tol, std::optional<long> max_iters,
                                 std::ostream& err) {
  HomotopyOptions o;
  if (tol) {
    o.subsolver.zero_tol = o.subsolver.active_tol = o.subsolver.multiplier_tol = *tol;
    o.sets.zero = o.sets.active = *tol;
  }
  if (max_iters) o.max_iterations = *max_iters;
  if (trace_enabled())
    o.trace = [&err](const HomotopyTraceEntry& e) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "k=%lld delta=%.12g t=%.6g |J_P|=%lld |I_P|=%lld |J_D|=%lld |I_D|=%lld "
                    "dual_it=%lld primal_it=%lld warm=%d%d\n",
                    (long long)e.k, e.delta, e.t, (long long)e.primal_support,
                    (long long)e.primal_active, (long long)e.dual_active,
                    (long long)e.dual_support, (long long)e.dual_iterations,
                    (long long)e.primal_iterations, int(e.dual_warm), int(e.primal_warm));
      err << buf;
    };
  return o;
}

// ---------------------------------------------------------------- verify

struct PropertyTally {
  std::string name;
  Index passed = 0;
  Index total = 0;
  void record(bool ok) {
    ++total;
    passed += ok;
  }
  bool ok() const { return passed == total; }
};

struct VerifySettings {
  double tol = 1e-8;
  double perturb_y = 0.0;
  HomotopyOptions options;
};

// Runs every property on one instance. Returns false if any failed.
bool verify_instance(const ProblemInstance& inst, const VerifySettings& vs,
                     std::vector<PropertyTally>& tallies, std::ostream& err) {
  bool all = true;
  auto note = [&](std::size_t idx, bool ok, const std::string& why) {
    tallies[idx].record(ok);
    if (!ok) {
      err << "  " << tallies[idx].name << ": " << why << '\n';
      all = false;
    }
  };
  const SolutionPath path = solve_path(inst, vs.options);
  note(0, path.ok(), path.message);

  bool pairs = true;
  for (const PathBreakpoint& bp : path.breakpoints) {
    const Vec y = bp.y.array() + vs.perturb_y;
    const PairReport r = optimal_pair_report(inst, bp.x, y, bp.delta);
    if (r.sign_x > vs.tol || r.sign_y > vs.tol || r.gap > vs.tol * (1.0 + r.primal_value))
      pairs = false;
  }
  note(1, pairs, "a breakpoint fails the optimality conditions");

  bool progress = path.breakpoints.size() <= std::size_t(20 * (inst.m() + inst.n()) + 1);
  for (std::size_t k = 1; k < path.breakpoints.size(); ++k)
    if (!(path.breakpoints[k].t_step > 1e-12) ||
        !(path.breakpoints[k].delta < path.breakpoints[k - 1].delta))
      progress = false;
  note(2, progress && path.stats.degeneracy_retries == 0, "non-decreasing delta or retries");

  const double ref = reference_objective(inst);
  const double got = norm_1(path.final_breakpoint().x);
  note(3, std::abs(ref - got) <= 1e-7 * std::max(1.0, std::abs(ref)),
       "objective " + std::to_string(got) + " vs reference " + std::to_string(ref));

  bool exclusive = true;
  if (path.ok() && path.breakpoints.size() >= 3) {
    const std::size_t k = path.breakpoints.size() / 2;
    const PathBreakpoint& bp = path.breakpoints[k];
    for (const Vec* y : {&path.breakpoints[k + 1].y, &bp.y}) {
      const Alternatives a = check_alternatives(inst, bp.x, *y, bp.delta);
      if (a.system1_feasible == a.system2_feasible) exclusive = false;
    }
  }
  note(4, exclusive, "both or neither alternative system feasible");
  return all;
}

int cmd_verify(const std::optional<std::string>& input, long count, std::uint64_t seed,
               const VerifySettings& vs, const std::string& replay_dir, std::ostream& out,
               std::ostream& err) {
  std::vector<PropertyTally> tallies = {{"target-reached"},
                                        {"optimal-pair"},
                                        {"strict-progress"},
                                        {"oracle-objective"},
                                        {"alternatives-exclusive"}};
  bool all = true;
  auto replay = [&](const ProblemInstance& inst, std::uint64_t s) {
    const std::string file = replay_dir + "/verify-failure-" + std::to_string(s) + ".json";
    std::ofstream f(file);
    GroundTruthInstance g;
    g.inst = inst;
    g.seed = s;
    write_instance_json(f, g);
    err << "  failing instance written to " << file << '\n';
  };
  if (input) {
    const GroundTruthInstance g = load_instance(*input, "", std::nullopt);
    if (!verify_instance(g.inst, vs, tallies, err)) all = false;
  } else {
    for (long i = 0; i < count; ++i) {
      const std::uint64_t s = seed + std::uint64_t(i);
      std::mt19937_64 rng(s);
      const Index m = 5 + Index(rng() % 16);
      ProblemInstance inst = random_instance(m, 2 * m, 0.0, rng());
      std::uniform_real_distribution<double> frac(0.05, 0.95);
      inst.delta = frac(rng) * norm_inf(inst.b);
      if (!verify_instance(inst, vs, tallies, err)) {
        err << "instance seed " << s << " failed\n";
        replay(inst, s);
        all = false;
      }
    }
  }
  char buf[160];
  for (const PropertyTally& t : tallies) {
    std::snprintf(buf, sizeof buf, "%-24s %6lld/%-6lld %s\n", t.name.c_str(),
                  (long long)t.passed, (long long)t.total, t.ok() ? "PASS" : "FAIL");
    out << buf;
  }
  out << (all ? "all properties hold\n" : "property violations found\n");
  return all ? kOk : kSolverFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homotopy solver for min ||x||_1 s.t. ||Ax - b||_inf <= delta", "houdini"};
  app.require_subcommand(1);

  std::string input, rhs, output, format = "json";
  std::optional<double> delta, tol;
  std::optional<long> max_iters;

  auto* solve = app.add_subcommand("solve", "compute the solution path of an instance");
  solve->add_option("input", input, "instance JSON, or MatrixMarket matrix A")->required();
  solve->add_option("--rhs", rhs, "vector b (plain text or JSON array) for MatrixMarket input");
  solve->add_option("--delta", delta, "target delta (overrides the instance file)");
  solve->add_option("-o,--output", output, "output file (default stdout)");
  solve->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  solve->add_option("--tol", tol, "support and activity tolerance of the subsolvers");
  solve->add_option("--max-iters", max_iters, "cap on homotopy iterations");

  std::string path_file;
  auto* plot = app.add_subcommand("plot", "render a path JSON as SVG");
  plot->add_option("path", path_file, "path JSON written by solve")->required();
  plot->add_option("-o,--output", output, "SVG file (default stdout)");

  std::optional<std::string> verify_input;
  long count = 200;
  std::uint64_t seed = 1;
  double perturb_y = 0.0;
  std::string replay_dir = ".";
  auto* verify = app.add_subcommand("verify", "check solver properties on random instances");
  verify->add_option("input", verify_input, "verify a single instance file instead");
  verify->add_option("--count", count, "number of random instances")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", seed, "first seed");
  verify->add_option("--tol", tol, "tolerance of the optimality checks (default 1e-8)");
  verify->add_option("--max-iters", max_iters, "cap on homotopy iterations");
  verify->add_option("--perturb-y", perturb_y, "add a constant to every certificate (test only)");
  verify->add_option("--replay-dir", replay_dir, "where failing instances are written");

  long m = 0, n = 0, sparsity = 0;
  double dynamic_range = 100.0;
  bool dense = false;
  auto* gen = app.add_subcommand("gen", "generate an instance with known solution");
  gen->add_option("--m", m, "rows")->required();
  gen->add_option("--n", n, "columns")->required();
  gen->add_option("--sparsity", sparsity, "nonzeros of the planted solution")->required();
  gen->add_option("--delta", delta, "delta")->required();
  gen->add_option("--seed", seed, "seed");
  gen->add_option("--dynamic-range", dynamic_range, "max/min magnitude of the planted solution");
  gen->add_flag("--dense", dense, "dense dual certificate");
  gen->add_option("-o,--output", output, "output file (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "houdini: " << e.what() << '\n';
    if (app.get_subcommands().empty()) err << app.help();
    return kParseError;
  }

  try {
    if (solve->parsed()) {
      const GroundTruthInstance g = load_instance(input, rhs, delta);
      const SolutionPath path = solve_path(g.inst, homotopy_options(tol, max_iters, err));
      const PathExport exp = make_export(g.inst, path);
      if (format == "csv") {
        std::ostringstream ss;
        write_path_csv(ss, exp);
        write_output(output, ss.str(), out);
      } else {
        write_output(output, path_to_json(exp, 1) + "\n", out);
      }
      if (!path.ok()) {
        err << "houdini: solver failed: " << path.message << '\n';
        return kSolverFailure;
      }
      return kOk;
    }
    if (plot->parsed()) {
      write_output(output, render_svg(read_path_file(path_file)), out);
      return kOk;
    }
    if (verify->parsed()) {
      VerifySettings vs;
      if (tol) vs.tol = *tol;
      vs.perturb_y = perturb_y;
      vs.options = homotopy_options(std::nullopt, max_iters, err);
      return cmd_verify(verify_input, count, seed, vs, replay_dir, out, err);
    }
    if (gen->parsed()) {
      if (m < 1 || n < 1) throw UsageError("--m and --n must be positive");
      if (sparsity < 0 || sparsity > n || 2 * sparsity > m)
        throw UsageError("--sparsity must lie in [0, min(n, m/2)]");
      if (!(*delta >= 0.0)) throw UsageError("--delta must be nonnegative");
      const GroundTruthInstance g = generate_ground_truth(
          m, n, sparsity, *delta, dynamic_range, seed,
          dense ? CertificateRegime::kDense : CertificateRegime::kSparse);
      std::ostringstream ss;
      write_instance_json(ss, g);
      write_output(output, ss.str(), out);
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "houdini: " << e.what() << '\n';
    return kParseError;
  } catch (const LinalgError& e) {
    err << "houdini: " << e.what() << '\n';
    return kParseError;
  } catch (const SolverError& e) {
    err << "houdini: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::out_of_range& e) {
    err << "houdini: " << e.what() << '\n';
    return kParseError;
  }
  return kParseError;
}

}  // namespace houdini::cli
