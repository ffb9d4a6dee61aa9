#include "houdini/path_export.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

namespace houdini {

using nlohmann::json;

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  }
  void value(double v) { bytes(&v, sizeof v); }
  void value(std::int64_t v) { bytes(&v, sizeof v); }
};

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

bool PathExport::operator==(const PathExport& o) const {
  return schema_version == o.schema_version && instance_digest == o.instance_digest &&
         m == o.m && n == o.n && delta_target == o.delta_target && terminated == o.terminated &&
         message == o.message && breakpoints == o.breakpoints &&
         timing.dual_seconds == o.timing.dual_seconds &&
         timing.primal_seconds == o.timing.primal_seconds &&
         timing.refresh_seconds == o.timing.refresh_seconds &&
         dual_iterations == o.dual_iterations && primal_iterations == o.primal_iterations &&
         warm_starts_used == o.warm_starts_used && degeneracy_retries == o.degeneracy_retries;
}

Vec PathExport::y_dense(std::size_t k) const {
  Vec y = Vec::Zero(m);
  for (auto [i, v] : breakpoints.at(k).y) y(i) = v;
  return y;
}

std::string instance_digest(const ProblemInstance& inst) {
  Fnv1a f;
  f.value(std::int64_t(inst.m()));
  f.value(std::int64_t(inst.n()));
  f.value(inst.delta);
  for (Index j = 0; j < inst.n(); ++j)
    for (Index i = 0; i < inst.m(); ++i) f.value(inst.a(i, j));
  for (Index i = 0; i < inst.m(); ++i) f.value(inst.b(i));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

PathExport make_export(const ProblemInstance& inst, const SolutionPath& path) {
  PathExport p;
  p.instance_digest = instance_digest(inst);
  p.m = inst.m();
  p.n = inst.n();
  p.delta_target = path.delta_target;
  p.terminated = to_string(path.terminated);
  p.message = path.message;
  p.timing = path.stats.timing;
  p.dual_iterations = path.stats.dual_iterations;
  p.primal_iterations = path.stats.primal_iterations;
  p.warm_starts_used = path.stats.warm_starts_used;
  p.degeneracy_retries = path.stats.degeneracy_retries;
  for (const PathBreakpoint& bp : path.breakpoints) {
    BreakpointRecord r;
    r.k = bp.k;
    r.delta = bp.delta;
    r.t = bp.t_step;
    r.x = bp.x;
    for (Index i = 0; i < bp.y.size(); ++i)
      if (bp.y(i) != 0.0) r.y.emplace_back(i, bp.y(i));
    r.primal_support = bp.sets.primal_support.size();
    r.primal_active = bp.sets.primal_active.size();
    r.dual_active = bp.sets.dual_active.size();
    r.dual_support = bp.sets.dual_support.size();
    r.objective = norm_1(bp.x);
    p.breakpoints.push_back(std::move(r));
  }
  return p;
}

std::string path_to_json(const PathExport& p, int indent) {
  json j;
  j["schema_version"] = p.schema_version;
  j["instance_digest"] = p.instance_digest;
  j["m"] = p.m;
  j["n"] = p.n;
  j["delta_target"] = p.delta_target;
  j["terminated"] = p.terminated;
  j["message"] = p.message;
  json bps = json::array();
  for (const BreakpointRecord& r : p.breakpoints) {
    json b;
    b["k"] = r.k;
    b["delta"] = r.delta;
    b["t"] = r.t;
    b["x"] = to_std(r.x);
    json y = json::array();
    for (auto [i, v] : r.y) y.push_back(json::array({i, v}));
    b["y"] = y;
    b["sizes"] = {{"J_P", r.primal_support}, {"I_P", r.primal_active},
                  {"J_D", r.dual_active}, {"I_D", r.dual_support}};
    b["objective"] = r.objective;
    bps.push_back(std::move(b));
  }
  j["breakpoints"] = std::move(bps);
  j["timing"] = {{"dual_seconds", p.timing.dual_seconds},
                 {"primal_seconds", p.timing.primal_seconds},
                 {"refresh_seconds", p.timing.refresh_seconds}};
  j["counters"] = {{"dual_iterations", p.dual_iterations},
                   {"primal_iterations", p.primal_iterations},
                   {"warm_starts_used", p.warm_starts_used},
                   {"degeneracy_retries", p.degeneracy_retries}};
  return j.dump(indent);
}

PathExport path_from_json(const std::string& text) {
  PathExport p;
  try {
    const json j = json::parse(text);
    p.schema_version = j.at("schema_version").get<int>();
    if (p.schema_version != kPathSchemaVersion)
      throw LinalgError("path: unsupported schema_version " + std::to_string(p.schema_version));
    p.instance_digest = j.at("instance_digest").get<std::string>();
    p.m = j.at("m").get<Index>();
    p.n = j.at("n").get<Index>();
    p.delta_target = j.at("delta_target").get<double>();
    p.terminated = j.at("terminated").get<std::string>();
    p.message = j.value("message", std::string());
    for (const json& b : j.at("breakpoints")) {
      BreakpointRecord r;
      r.k = b.at("k").get<Index>();
      r.delta = b.at("delta").get<double>();
      r.t = b.at("t").get<double>();
      r.x = to_vec(b.at("x"));
      if (r.x.size() != p.n) throw LinalgError("path: breakpoint x has the wrong length");
      for (const json& e : b.at("y")) {
        const Index i = e.at(0).get<Index>();
        if (i < 0 || i >= p.m) throw LinalgError("path: y index out of range");
        r.y.emplace_back(i, e.at(1).get<double>());
      }
      const json& s = b.at("sizes");
      r.primal_support = s.at("J_P").get<Index>();
      r.primal_active = s.at("I_P").get<Index>();
      r.dual_active = s.at("J_D").get<Index>();
      r.dual_support = s.at("I_D").get<Index>();
      r.objective = b.at("objective").get<double>();
      p.breakpoints.push_back(std::move(r));
    }
    const json& t = j.at("timing");
    p.timing.dual_seconds = t.at("dual_seconds").get<double>();
    p.timing.primal_seconds = t.at("primal_seconds").get<double>();
    p.timing.refresh_seconds = t.at("refresh_seconds").get<double>();
    if (j.contains("counters")) {
      const json& c = j["counters"];
      p.dual_iterations = c.value("dual_iterations", Index{0});
      p.primal_iterations = c.value("primal_iterations", Index{0});
      p.warm_starts_used = c.value("warm_starts_used", Index{0});
      p.degeneracy_retries = c.value("degeneracy_retries", Index{0});
    }
  } catch (const json::exception& e) {
    throw LinalgError(std::string("path: invalid JSON: ") + e.what());
  }
  return p;
}

PathExport read_path_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw LinalgError("cannot open path file " + filename);
  std::stringstream ss;
  ss << in.rdbuf();
  return path_from_json(ss.str());
}

void write_path_csv(std::ostream& out, const PathExport& p) {
  out << "k,delta,t,nnz_x,nnz_y,objective\n";
  char buf[256];
  for (const BreakpointRecord& r : p.breakpoints) {
    Index nnz_x = 0;
    for (Index j = 0; j < r.x.size(); ++j) nnz_x += r.x(j) != 0.0;
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%lld,%lld,%.17g\n",
                  static_cast<long long>(r.k), r.delta, r.t, static_cast<long long>(nnz_x),
                  static_cast<long long>(r.y.size()), r.objective);
    out << buf;
  }
}

}  // namespace houdini
