#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pminres {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Row-compressed sparse matrix; column indices sorted within each row,
// duplicates summed on construction.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> vals;

  int nnz() const { return static_cast<int>(vals.size()); }
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> ts);
  std::vector<double> apply(const std::vector<double>& x) const;
  double coeff(int r, int c) const;  // 0 when the entry is absent
  double max_abs() const;
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& msg, int pivot, std::string block = "")
      : std::runtime_error(msg), pivot_(pivot), block_(std::move(block)) {}
  // pivot/column at which elimination broke down (-1 if unknown)
  int pivot_index() const { return pivot_; }
  // deficient block of a saddle system ("A" or "B"), empty otherwise
  const std::string& block() const { return block_; }

 private:
  int pivot_;
  std::string block_;
};

// Direct sparse LU solve (partial pivoting). Structural or numerical
// singularity raises SingularSystemError carrying the pivot index.
std::vector<double> lu_solve(const SparseMatrix& M, const std::vector<double>& rhs);

// Symmetric indefinite block system
//   [ A   B ] [ psi ]   [ F ]
//   [ B^T 0 ] [  u  ] = [ 0 ]
// with A (n_V x n_V) and B (n_V x n_U), factored in a single sparse LU.
struct SaddleSystem {
  SparseMatrix A;
  SparseMatrix B;
  std::vector<double> F;
};

struct SaddleSolution {
  std::vector<double> psi;
  std::vector<double> u;
};

// Throws SingularSystemError naming the deficient block; a rank-deficient B
// (kernel in the trial space) is reported as block "B".
SaddleSolution solve_saddle(const SaddleSystem& sys);

}  // namespace pminres
