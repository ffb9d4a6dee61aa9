#include "houdini/instances.hpp"

#include "houdini/errors.hpp"
#include "houdini/oracle.hpp"

#include <Eigen/QR>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace houdini {

using nlohmann::json;

namespace {

constexpr double kCertificateTol = 1e-10;

DenseMatrix gaussian_matrix(Index m, Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = normal(rng);
  return a;
}

void check_certificate(const DenseMatrix& a, const Vec& x_bar, const Vec& y_bar) {
  const Vec g = a.transpose() * y_bar;
  for (Index j = 0; j < a.cols(); ++j) {
    const double v = x_bar(j) != 0.0 ? std::abs(-g(j) - sign(x_bar(j)))
                                     : std::max(0.0, std::abs(g(j)) - 1.0);
    if (v > kCertificateTol)
      throw SolverError(SolverErrorKind::kPrecondition,
                        "certificate violates -A^T y in Sign(x) at column " + std::to_string(j) +
                            " by " + std::to_string(v));
  }
}

}  // namespace

const char* to_string(CertificateRegime r) {
  return r == CertificateRegime::kSparse ? "sparse" : "dense";
}

GroundTruthInstance make_ground_truth(const DenseMatrix& a, const Vec& x_bar, const Vec& y_bar,
                                      double delta) {
  if (x_bar.size() != a.cols() || y_bar.size() != a.rows())
    throw LinalgError("make_ground_truth: x_bar or y_bar has the wrong length");
  require_finite(a, "A");
  require_finite(x_bar, "x_bar");
  require_finite(y_bar, "y_bar");
  if (!std::isfinite(delta) || delta < 0.0)
    throw LinalgError("make_ground_truth: delta must be finite and nonnegative");
  if (norm_inf(y_bar) == 0.0 && norm_inf(x_bar) != 0.0)
    throw SolverError(SolverErrorKind::kPrecondition,
                      "make_ground_truth: zero certificate only certifies x_bar = 0");
  check_certificate(a, x_bar, y_bar);
  GroundTruthInstance g;
  g.inst.a = a;
  g.inst.b = a * x_bar - delta * sign(y_bar);
  g.inst.delta = delta;
  g.x_bar = x_bar;
  g.y_bar = y_bar;
  return g;
}

BpPair random_bp_pair(Index m, Index n, Index sparsity, double dynamic_range,
                      std::uint64_t seed, int max_retries) {
  if (m < 1 || n < 1) throw LinalgError("random_bp_pair: need m, n >= 1");
  if (sparsity < 0 || sparsity > n || 2 * sparsity > m)
    throw SolverError(SolverErrorKind::kPrecondition,
                      "random_bp_pair: need 0 <= sparsity <= min(n, m/2)");
  if (!(dynamic_range >= 1.0) || !std::isfinite(dynamic_range))
    throw LinalgError("random_bp_pair: dynamic range must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    BpPair p;
    p.a = gaussian_matrix(m, n, rng);
    for (Index j = 0; j < n; ++j) p.a.col(j).normalize();
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index k = 0; k < sparsity; ++k) {
      std::uniform_int_distribution<Index> pick(k, n - 1);
      std::swap(perm[k], perm[pick(rng)]);
    }
    p.x_bar = Vec::Zero(n);
    for (Index k = 0; k < sparsity; ++k) {
      const double mag = std::exp(unit(rng) * std::log(dynamic_range));
      p.x_bar(perm[k]) = coin(rng) ? mag : -mag;
    }
    if (sparsity == 0) return p;
    const double bp = basis_pursuit_value(p.a, p.a * p.x_bar);
    if (bp >= norm_1(p.x_bar) * (1.0 - 1e-9)) return p;
  }
  throw SolverError(SolverErrorKind::kPrecondition,
                    "random_bp_pair: no basis pursuit optimal draw after " +
                        std::to_string(max_retries + 1) + " attempts; lower the sparsity");
}

Vec make_certificate(const DenseMatrix& a, const Vec& x_bar, CertificateRegime regime) {
  Vec sparse = certificate_l1(a, x_bar);
  const double scale = norm_inf(sparse);
  for (Index i = 0; i < sparse.size(); ++i)
    if (std::abs(sparse(i)) <= 1e-12 * scale) sparse(i) = 0.0;
  if (regime == CertificateRegime::kSparse) return sparse;

  IndexSet support(x_bar.size());
  for (Index j = 0; j < x_bar.size(); ++j)
    if (x_bar(j) != 0.0) support.insert(j);
  if (support.empty()) return sparse;
  const DenseMatrix as_t = select_cols(a, support).transpose();
  Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(as_t);
  const Vec ls = cod.solve(-subvector(sign(x_bar), support));

  const Vec g_s = a.transpose() * sparse;
  const Vec g_ls = a.transpose() * ls;
  double theta = 1.0;
  for (Index j = 0; j < a.cols(); ++j) {
    if (support.contains(j)) continue;
    const double diff = g_ls(j) - g_s(j);
    if (diff > 0.0) theta = std::min(theta, (1.0 - g_s(j)) / diff);
    if (diff < 0.0) theta = std::min(theta, (1.0 + g_s(j)) / -diff);
  }
  if (theta >= 1.0) return ls;
  if (theta <= 1e-9)
    throw SolverError(SolverErrorKind::kPrecondition,
                      "make_certificate: no room to move towards the least-squares certificate");
  return sparse + 0.5 * theta * (ls - sparse);
}

GroundTruthInstance generate_ground_truth(Index m, Index n, Index sparsity, double delta,
                                          double dynamic_range, std::uint64_t seed,
                                          CertificateRegime regime) {
  constexpr int kAttempts = 20;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const std::uint64_t sub = seed + 0x9E3779B97F4A7C15ULL * std::uint64_t(attempt);
    BpPair p = random_bp_pair(m, n, sparsity, dynamic_range, sub);
    try {
      Vec y = make_certificate(p.a, p.x_bar, regime);
      GroundTruthInstance g = make_ground_truth(p.a, p.x_bar, y, delta);
      g.seed = seed;
      return g;
    } catch (const SolverError&) {
      continue;
    }
  }
  throw SolverError(SolverErrorKind::kPrecondition,
                    "generate_ground_truth: no usable certificate after " +
                        std::to_string(kAttempts) + " draws");
}

ProblemInstance random_instance(Index m, Index n, double delta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ProblemInstance inst;
  inst.a = gaussian_matrix(m, n, rng);
  inst.b = gaussian_matrix(m, 1, rng).col(0);
  inst.delta = delta;
  return inst;
}

LinfForm to_linf_form(const GeneralizedBounds& gb, double delta_hat) {
  const Index m = gb.a.rows();
  if (gb.b.size() != m || gb.alpha.size() != m || gb.beta.size() != m)
    throw LinalgError("to_linf_form: b, alpha, beta must have one entry per row of A");
  require_finite(gb.a, "A");
  require_finite(gb.b, "b");
  require_finite(gb.alpha, "alpha");
  require_finite(gb.beta, "beta");
  if (!(delta_hat > 0.0) || !std::isfinite(delta_hat))
    throw LinalgError("to_linf_form: delta must be positive");
  for (Index i = 0; i < m; ++i)
    if (!(gb.alpha(i) < gb.beta(i)))
      throw LinalgError("to_linf_form: alpha must be strictly below beta in row " +
                        std::to_string(i));
  const Vec gamma = (gb.beta - gb.alpha) / 2.0;
  const Vec b_tilde = gb.b + (gb.alpha + gb.beta) / 2.0;
  LinfForm f;
  f.g = delta_hat * gamma.cwiseInverse();
  f.ga = f.g.asDiagonal() * gb.a;
  f.gb = f.g.cwiseProduct(b_tilde);
  f.delta = delta_hat;
  return f;
}

bool satisfies_bounds(const GeneralizedBounds& gb, const Vec& x) {
  const Vec r = gb.a * x - gb.b;
  return (r.array() >= gb.alpha.array()).all() && (r.array() <= gb.beta.array()).all();
}

bool satisfies_linf(const LinfForm& f, const Vec& x) {
  return norm_inf(f.ga * x - f.gb) <= f.delta;
}

namespace {

Vec json_vector(const json& j, const char* name) {
  if (!j.is_array()) throw LinalgError(std::string("instance: ") + name + " must be an array");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw LinalgError(std::string("instance: ") + name + " entry is not a number");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

DenseMatrix json_matrix(const json& j) {
  if (j.is_string()) {
    std::istringstream in(j.get<std::string>());
    return read_matrix_market(in);
  }
  if (!j.is_array() || j.empty()) throw LinalgError("instance: A must be nested rows or a MatrixMarket string");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw LinalgError("instance: A rows must be non-empty arrays");
  DenseMatrix a(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw LinalgError("instance: A rows differ in length");
    a.row(static_cast<Index>(r)) = json_vector(j[r], "A row").transpose();
  }
  return a;
}

}  // namespace

GroundTruthInstance read_instance_json(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LinalgError(std::string("instance: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw LinalgError("instance: top level must be an object");
  const char* akey = j.contains("A") ? "A" : "a";
  for (const char* key : {akey, "b", "delta"})
    if (!j.contains(key)) throw LinalgError(std::string("instance: missing field ") + key);
  GroundTruthInstance g;
  g.inst.a = json_matrix(j[akey]);
  g.inst.b = json_vector(j["b"], "b");
  if (!j["delta"].is_number()) throw LinalgError("instance: delta must be a number");
  g.inst.delta = j["delta"].get<double>();
  if (j.contains("x_bar")) g.x_bar = json_vector(j["x_bar"], "x_bar");
  if (j.contains("y_bar")) g.y_bar = json_vector(j["y_bar"], "y_bar");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw LinalgError("instance: seed must be a nonnegative integer");
    g.seed = j["seed"].get<std::uint64_t>();
  }
  g.inst.validate();
  if (g.x_bar.size() != 0 && g.x_bar.size() != g.inst.n()) throw LinalgError("instance: x_bar has the wrong length");
  if (g.y_bar.size() != 0 && g.y_bar.size() != g.inst.m()) throw LinalgError("instance: y_bar has the wrong length");
  return g;
}

GroundTruthInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LinalgError("cannot open instance file " + path);
  return read_instance_json(in);
}

void write_instance_json(std::ostream& out, const GroundTruthInstance& g) {
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json j;
  json rows = json::array();
  for (Index r = 0; r < g.inst.a.rows(); ++r) rows.push_back(vec(g.inst.a.row(r).transpose()));
  j["A"] = rows;
  j["b"] = vec(g.inst.b);
  j["delta"] = g.inst.delta;
  if (g.x_bar.size()) j["x_bar"] = vec(g.x_bar);
  if (g.y_bar.size()) j["y_bar"] = vec(g.y_bar);
  if (g.seed) j["seed"] = *g.seed;
  out << j.dump() << '\n';
}

}  // namespace houdini
