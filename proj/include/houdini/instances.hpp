#pragma once

// Instance generation with known optimal solutions, and the transformation
// of two-sided bound problems  α ≤ Ax − b ≤ β  into  ‖GAx − Gb̃‖∞ ≤ δ̂.

#include "houdini/problem.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace houdini {

struct GroundTruthInstance {
  ProblemInstance inst;
  Vec x_bar;
  Vec y_bar;
  std::optional<std::uint64_t> seed;
};

/// b̂ = A x̄ − δ·sign(ȳ) with sign(0) = 0. Requires −Aᵀȳ ∈ Sign(x̄) within
/// 1e-10 and ȳ ≠ 0 unless x̄ = 0.
GroundTruthInstance make_ground_truth(const DenseMatrix& a, const Vec& x_bar, const Vec& y_bar,
                                      double delta);

struct BpPair {
  DenseMatrix a;
  Vec x_bar;
};

/// Gaussian A with unit columns, x̄ with `sparsity` nonzeros of log-uniform
/// magnitude in [1, dynamic_range] and random signs. Draws whose x̄ is not
/// basis pursuit optimal for b = A x̄ are rejected.
BpPair random_bp_pair(Index m, Index n, Index sparsity, double dynamic_range,
                      std::uint64_t seed, int max_retries = 50);

enum class CertificateRegime { kSparse, kDense };

const char* to_string(CertificateRegime r);

/// Certificate ȳ with −Aᵀȳ ∈ Sign(x̄). The sparse regime minimizes ‖ȳ‖₁,
/// the dense regime starts from the minimum-norm least-squares solution of
/// the support equations and, if that violates |Aⱼᵀȳ| ≤ 1, moves half way
/// from the sparse certificate to the largest feasible blend.
Vec make_certificate(const DenseMatrix& a, const Vec& x_bar, CertificateRegime regime);

GroundTruthInstance generate_ground_truth(Index m, Index n, Index sparsity, double delta,
                                          double dynamic_range, std::uint64_t seed,
                                          CertificateRegime regime = CertificateRegime::kSparse);

/// Gaussian A and b, with the given δ.
ProblemInstance random_instance(Index m, Index n, double delta, std::uint64_t seed);

struct GeneralizedBounds {
  DenseMatrix a;
  Vec b;
  Vec alpha;
  Vec beta;
};

struct LinfForm {
  DenseMatrix ga;
  Vec gb;
  Vec g;          // diagonal of G
  double delta = 0.0;
  ProblemInstance instance() const { return {ga, gb, delta}; }
};

/// γ = (β − α)/2, b̃ = b + (α + β)/2, G = diag(δ̂/γ).
LinfForm to_linf_form(const GeneralizedBounds& gb, double delta_hat);

bool satisfies_bounds(const GeneralizedBounds& gb, const Vec& x);
bool satisfies_linf(const LinfForm& f, const Vec& x);

/// JSON with fields A (nested rows or a MatrixMarket string), b, delta and
/// optional x_bar, y_bar, seed.
GroundTruthInstance read_instance_json(std::istream& in);
GroundTruthInstance read_instance_file(const std::string& path);
/// A is written as nested rows.
void write_instance_json(std::ostream& out, const GroundTruthInstance& g);

}  // namespace houdini
