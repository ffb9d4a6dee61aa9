#include "houdini/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace houdini {

IndexSet::IndexSet(Index universe, std::vector<Index> indices)
    : universe_(universe), indices_(std::move(indices)) {
  if (universe < 0) throw LinalgError("IndexSet: negative universe");
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] < 0 || indices_[k] >= universe_)
      throw LinalgError("IndexSet: index " + std::to_string(indices_[k]) +
                        " outside universe " + std::to_string(universe_));
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw LinalgError("IndexSet: indices not strictly increasing");
  }
}

IndexSet IndexSet::all(Index universe) {
  std::vector<Index> idx(static_cast<std::size_t>(universe));
  for (Index i = 0; i < universe; ++i) idx[static_cast<std::size_t>(i)] = i;
  return IndexSet(universe, std::move(idx));
}

IndexSet IndexSet::from_unsorted(Index universe, std::vector<Index> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return IndexSet(universe, std::move(indices));
}

bool IndexSet::contains(Index i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

Index IndexSet::position(Index i) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
  if (it == indices_.end() || *it != i) return -1;
  return static_cast<Index>(it - indices_.begin());
}

void IndexSet::insert(Index i) {
  if (i < 0 || i >= universe_) throw LinalgError("IndexSet::insert: index out of range");
  auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
  if (it == indices_.end() || *it != i) indices_.insert(it, i);
}

void IndexSet::erase(Index i) {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
  if (it != indices_.end() && *it == i) indices_.erase(it);
}

IndexSet IndexSet::complement() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(universe_ - size()));
  auto it = indices_.begin();
  for (Index i = 0; i < universe_; ++i) {
    if (it != indices_.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return IndexSet(universe_, std::move(out));
}

namespace {
void require_same_universe(const IndexSet& a, const IndexSet& b) {
  if (a.universe() != b.universe()) throw LinalgError("IndexSet: universes differ");
}
}  // namespace

IndexSet IndexSet::unite(const IndexSet& other) const {
  require_same_universe(*this, other);
  std::vector<Index> out;
  std::set_union(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
  return IndexSet(universe_, std::move(out));
}

IndexSet IndexSet::minus(const IndexSet& other) const {
  require_same_universe(*this, other);
  std::vector<Index> out;
  std::set_difference(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
  return IndexSet(universe_, std::move(out));
}

IndexSet IndexSet::intersect(const IndexSet& other) const {
  require_same_universe(*this, other);
  std::vector<Index> out;
  std::set_intersection(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
  return IndexSet(universe_, std::move(out));
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  return std::includes(other.begin(), other.end(), begin(), end());
}

IndexSet IndexSet::select(const IndexSet& inner) const {
  if (inner.universe() != size()) throw LinalgError("IndexSet::select: universe mismatch");
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(inner.size()));
  for (Index k : inner) out.push_back((*this)[k]);
  return IndexSet(universe_, std::move(out));
}

std::string to_string(const IndexSet& s) {
  std::ostringstream os;
  os << '{';
  for (Index k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
  os << '}';
  return os.str();
}

DenseMatrix submatrix(const DenseMatrix& a, const IndexSet& rows, const IndexSet& cols) {
  if (rows.universe() != a.rows() || cols.universe() != a.cols())
    throw LinalgError("submatrix: index set universe does not match matrix shape");
  DenseMatrix out(rows.size(), cols.size());
  for (Index j = 0; j < cols.size(); ++j)
    for (Index i = 0; i < rows.size(); ++i) out(i, j) = a(rows[i], cols[j]);
  return out;
}

DenseMatrix select_rows(const DenseMatrix& a, const IndexSet& rows) {
  return submatrix(a, rows, IndexSet::all(a.cols()));
}

DenseMatrix select_cols(const DenseMatrix& a, const IndexSet& cols) {
  return submatrix(a, IndexSet::all(a.rows()), cols);
}

Vec subvector(const Vec& v, const IndexSet& s) {
  if (s.universe() != v.size()) throw LinalgError("subvector: universe mismatch");
  Vec out(s.size());
  for (Index k = 0; k < s.size(); ++k) out(k) = v(s[k]);
  return out;
}

Vec scatter(const Vec& values, const IndexSet& s) {
  if (values.size() != s.size()) throw LinalgError("scatter: size mismatch");
  Vec out = Vec::Zero(s.universe());
  for (Index k = 0; k < s.size(); ++k) out(s[k]) = values(k);
  return out;
}

bool all_finite(const DenseMatrix& a) { return a.allFinite(); }
bool all_finite(const Vec& v) { return v.allFinite(); }

void require_finite(const DenseMatrix& a, const char* what) {
  if (!a.allFinite()) throw LinalgError(std::string(what) + ": non-finite entry");
}

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw LinalgError(std::string(what) + ": non-finite entry");
}

Vec sign(const Vec& v) { return v.unaryExpr([](double x) { return sign(x); }); }

SolveReport solve_consistent(const DenseMatrix& m, const Vec& rhs, double tol,
                             double rank_threshold) {
  if (m.rows() != rhs.size())
    throw LinalgError("solve_consistent: matrix has " + std::to_string(m.rows()) +
                      " rows but rhs has " + std::to_string(rhs.size()));
  require_finite(m, "solve_consistent matrix");
  require_finite(rhs, "solve_consistent rhs");

  SolveReport report;
  const double bound = tol * (1.0 + norm_inf(rhs));
  if (m.cols() == 0) {
    report.solution = Vec(0);
    report.residual_norm = norm_inf(rhs);
  } else if (m.rows() == 0) {
    report.solution = Vec::Zero(m.cols());
    report.residual_norm = 0.0;
  } else {
    Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod;
    cod.setThreshold(rank_threshold);
    cod.compute(m);
    report.solution = cod.solve(rhs);
    report.residual_norm = norm_inf(m * report.solution - rhs);
  }
  report.consistent = report.residual_norm <= bound;
  return report;
}

// ---------------------------------------------------------------------------
// Readers

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& tok, const char* context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw LinalgError(std::string(context) + ": cannot parse number '" + tok + "'");
  }
  if (used != tok.size())
    throw LinalgError(std::string(context) + ": trailing characters in '" + tok + "'");
  if (!std::isfinite(v)) throw LinalgError(std::string(context) + ": non-finite value");
  return v;
}

}  // namespace

DenseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw LinalgError("MatrixMarket: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw LinalgError("MatrixMarket: missing %%MatrixMarket banner");
  if (lower(object) != "matrix" || lower(format) != "array")
    throw LinalgError("MatrixMarket: only dense 'matrix array' is supported");
  if (lower(field) != "real" && lower(field) != "integer" && lower(field) != "double")
    throw LinalgError("MatrixMarket: unsupported field '" + field + "'");
  if (!symmetry.empty() && lower(symmetry) != "general")
    throw LinalgError("MatrixMarket: only 'general' symmetry is supported");

  // Skip comments, read the size line.
  Index rows = -1, cols = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sz(line);
    long long r = 0, c = 0;
    if (!(sz >> r >> c) || r < 0 || c < 0)
      throw LinalgError("MatrixMarket: malformed size line '" + line + "'");
    rows = static_cast<Index>(r);
    cols = static_cast<Index>(c);
    break;
  }
  if (rows < 0) throw LinalgError("MatrixMarket: missing size line");

  DenseMatrix a(rows, cols);
  Index count = 0;
  const Index total = rows * cols;
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '%') {
      std::getline(in, line);
      continue;
    }
    if (count >= total) throw LinalgError("MatrixMarket: more values than rows*cols");
    a(count % rows, count / rows) = parse_number(tok, "MatrixMarket");
    ++count;
  }
  if (count != total)
    throw LinalgError("MatrixMarket: expected " + std::to_string(total) + " values, found " +
                      std::to_string(count));
  return a;
}

DenseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LinalgError("cannot open '" + path + "'");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& a) {
  out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
  const auto old_precision = out.precision(17);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) out << a(i, j) << '\n';
  out.precision(old_precision);
}

Vec read_plain_vector(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find_first_of("#%");
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) values.push_back(parse_number(tok, "vector"));
  }
  return Eigen::Map<Vec>(values.data(), static_cast<Index>(values.size()));
}

Vec read_json_vector(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LinalgError(std::string("JSON vector: ") + e.what());
  }
  if (!j.is_array()) throw LinalgError("JSON vector: expected an array");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw LinalgError("JSON vector: non-numeric entry");
    v(static_cast<Index>(k)) = j[k].get<double>();
  }
  require_finite(v, "JSON vector");
  return v;
}

Vec read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LinalgError("cannot open '" + path + "'");
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  in.unget();
  if (c == '[') return read_json_vector(in);
  return read_plain_vector(in);
}

}  // namespace houdini
