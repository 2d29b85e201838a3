#include "pminres/linsolve.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cctype>
#include <cmath>

namespace pminres {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> ts) {
  for (const auto& t : ts)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("triplet index out of range");
  std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  for (size_t k = 0; k < ts.size();) {
    size_t j = k + 1;
    double sum = ts[k].value;
    while (j < ts.size() && ts[j].row == ts[k].row && ts[j].col == ts[k].col)
      sum += ts[j++].value;
    m.col_idx.push_back(ts[k].col);
    m.vals.push_back(sum);
    m.row_ptr[ts[k].row + 1]++;
    k = j;
  }
  for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != cols)
    throw std::invalid_argument("matvec dimension mismatch");
  std::vector<double> y(rows, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) y[r] += vals[k] * x[col_idx[k]];
  return y;
}

double SparseMatrix::coeff(int r, int c) const {
  auto begin = col_idx.begin() + row_ptr[r];
  auto end = col_idx.begin() + row_ptr[r + 1];
  auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return vals[row_ptr[r] + (it - begin)];
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : vals) m = std::max(m, std::abs(v));
  return m;
}

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(m.nnz());
  for (int r = 0; r < m.rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      ts.emplace_back(r, m.col_idx[k], m.vals[k]);
  Eigen::SparseMatrix<double> em(m.rows, m.cols);
  em.setFromTriplets(ts.begin(), ts.end());
  em.makeCompressed();
  return em;
}

int parse_pivot(const std::string& msg) {
  // the factorization error message ends with the 1-based failing column
  size_t pos = msg.find_last_not_of(" \t");
  if (pos == std::string::npos) return -1;
  size_t start = pos;
  while (start > 0 && std::isdigit(static_cast<unsigned char>(msg[start - 1]))) --start;
  if (!std::isdigit(static_cast<unsigned char>(msg[pos]))) return -1;
  return std::stoi(msg.substr(start, pos - start + 1)) - 1;
}

}  // namespace

std::vector<double> lu_solve(const SparseMatrix& M, const std::vector<double>& rhs) {
  if (M.rows != M.cols) throw std::invalid_argument("lu_solve needs a square matrix");
  if (static_cast<int>(rhs.size()) != M.rows)
    throw std::invalid_argument("rhs size mismatch");
  if (M.rows == 0) return {};

  Eigen::SparseMatrix<double> em = to_eigen(M);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.analyzePattern(em);
  solver.factorize(em);
  if (solver.info() != Eigen::Success) {
    int pivot = parse_pivot(solver.lastErrorMessage());
    throw SingularSystemError("singular system: " + solver.lastErrorMessage(), pivot);
  }
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
  Eigen::VectorXd x = solver.solve(b);

  // guard against numerically singular factorizations that formally succeed
  double bmax = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
  double resid = (em * x - b).cwiseAbs().maxCoeff();
  if (!x.allFinite() || resid > 1e-8 * (1.0 + bmax))
    throw SingularSystemError("numerically singular system (residual check failed)", -1);

  return std::vector<double>(x.data(), x.data() + x.size());
}

SaddleSolution solve_saddle(const SaddleSystem& sys) {
  int nv = sys.A.rows, nu = sys.B.cols;
  if (sys.A.cols != nv || sys.B.rows != nv || static_cast<int>(sys.F.size()) != nv)
    throw std::invalid_argument("inconsistent saddle system dimensions");

  std::vector<Triplet> ts;
  ts.reserve(sys.A.nnz() + 2 * sys.B.nnz());
  for (int r = 0; r < nv; ++r)
    for (int k = sys.A.row_ptr[r]; k < sys.A.row_ptr[r + 1]; ++k)
      ts.push_back({r, sys.A.col_idx[k], sys.A.vals[k]});
  for (int r = 0; r < nv; ++r)
    for (int k = sys.B.row_ptr[r]; k < sys.B.row_ptr[r + 1]; ++k) {
      ts.push_back({r, nv + sys.B.col_idx[k], sys.B.vals[k]});
      ts.push_back({nv + sys.B.col_idx[k], r, sys.B.vals[k]});
    }
  SparseMatrix K = SparseMatrix::from_triplets(nv + nu, nv + nu, std::move(ts));
  std::vector<double> rhs(nv + nu, 0.0);
  std::copy(sys.F.begin(), sys.F.end(), rhs.begin());

  std::vector<double> z;
  try {
    z = lu_solve(K, rhs);
  } catch (const SingularSystemError& e) {
    // identify the deficient block for the caller
    std::string block = "B";
    try {
      lu_solve(sys.A, std::vector<double>(nv, 0.0));
    } catch (const SingularSystemError&) {
      block = "A";
    }
    std::string what = block == "B"
        ? "saddle system singular: B block rank deficient (kernel in trial space)"
        : "saddle system singular: A block singular";
    throw SingularSystemError(what, e.pivot_index(), block);
  }

  SaddleSolution sol;
  sol.psi.assign(z.begin(), z.begin() + nv);
  sol.u.assign(z.begin() + nv, z.end());
  return sol;
}

}  // namespace pminres
