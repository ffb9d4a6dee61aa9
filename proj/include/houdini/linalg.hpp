#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace houdini {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Raised for dimension mismatches, out-of-range indices and non-finite data.
class LinalgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sorted set of 0-based positions drawn from {0, ..., universe-1}.
///
/// Used for every row/column selection in the solver: primal support,
/// primal active rows, dual active columns, dual support, and the
/// active set / support of the generic LP engine.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(Index universe) : universe_(universe) {
    if (universe < 0) throw LinalgError("IndexSet: negative universe");
  }
  /// `indices` must be strictly increasing and below `universe`.
  IndexSet(Index universe, std::vector<Index> indices);
  IndexSet(Index universe, std::initializer_list<Index> indices)
      : IndexSet(universe, std::vector<Index>(indices)) {}

  static IndexSet all(Index universe);
  /// Sorts and deduplicates.
  static IndexSet from_unsorted(Index universe, std::vector<Index> indices);

  Index universe() const { return universe_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  Index operator[](Index k) const { return indices_[static_cast<std::size_t>(k)]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  std::span<const Index> indices() const { return indices_; }
  const std::vector<Index>& as_vector() const { return indices_; }

  bool contains(Index i) const;
  /// Position of `i` inside the set, or -1.
  Index position(Index i) const;

  void insert(Index i);
  void erase(Index i);

  IndexSet complement() const;
  IndexSet unite(const IndexSet& other) const;
  IndexSet minus(const IndexSet& other) const;
  IndexSet intersect(const IndexSet& other) const;
  bool is_subset_of(const IndexSet& other) const;

  /// Composition: the subset {(*this)[inner[k]]}.
  IndexSet select(const IndexSet& inner) const;

  bool operator==(const IndexSet&) const = default;

 private:
  Index universe_ = 0;
  std::vector<Index> indices_;
};

std::string to_string(const IndexSet& s);

/// Result of a possibly rank-deficient, possibly rectangular solve.
struct SolveReport {
  bool consistent = false;
  /// Minimum-norm least-squares solution. Present whenever the solve ran,
  /// also for inconsistent systems where it is the least-squares point.
  Vec solution;
  /// ‖M·solution − rhs‖∞.
  double residual_norm = 0.0;
};

inline constexpr double kDefaultConsistencyTol = 1e-9;
/// Relative threshold below which pivots of the orthogonal decomposition
/// count as zero for rank determination.
inline constexpr double kDefaultRankThreshold = 1e-10;

/// A(rows[i], cols[j]).
DenseMatrix submatrix(const DenseMatrix& a, const IndexSet& rows, const IndexSet& cols);
DenseMatrix select_rows(const DenseMatrix& a, const IndexSet& rows);
DenseMatrix select_cols(const DenseMatrix& a, const IndexSet& cols);
Vec subvector(const Vec& v, const IndexSet& s);
/// Writes `values` into positions `s` of a zero vector of length s.universe().
Vec scatter(const Vec& values, const IndexSet& s);

/// Solves M·z = rhs via a complete orthogonal decomposition (column pivoted
/// QR followed by a right orthogonal factor). Returns the minimum 2-norm
/// least-squares solution; the system counts as consistent iff
/// ‖M·z − rhs‖∞ ≤ tol·(1 + ‖rhs‖∞).
SolveReport solve_consistent(const DenseMatrix& m, const Vec& rhs,
                             double tol = kDefaultConsistencyTol,
                             double rank_threshold = kDefaultRankThreshold);

bool all_finite(const DenseMatrix& a);
bool all_finite(const Vec& v);
void require_finite(const DenseMatrix& a, const char* what);
void require_finite(const Vec& v, const char* what);

/// sign with sign(0) = 0.
inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
Vec sign(const Vec& v);

inline double norm_inf(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }
inline double norm_1(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<1>(); }

// Readers for the interchange formats.

/// MatrixMarket dense `array real general` format (column-major values).
DenseMatrix read_matrix_market(std::istream& in);
DenseMatrix read_matrix_market_file(const std::string& path);
void write_matrix_market(std::ostream& out, const DenseMatrix& a);

/// Whitespace/comma separated numbers, `#` or `%` comments.
Vec read_plain_vector(std::istream& in);
/// A JSON array of numbers.
Vec read_json_vector(std::istream& in);
/// Dispatches on the first non-blank character (`[` → JSON).
Vec read_vector_file(const std::string& path);

}  // namespace houdini
