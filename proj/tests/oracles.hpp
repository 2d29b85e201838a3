// Self-contained reference solvers used to cross-check the library. These are
// deliberately written from scratch (plain Gaussian elimination) and share no
// code with the production solve path.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

// Dense Gaussian elimination with partial pivoting on a row-major matrix.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (std::abs(a[piv][k]) < 1e-300) throw std::runtime_error("oracle: singular matrix");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < n; ++i) {
      double f = a[i][k] / a[k][k];
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// Dense solve of the block system [[A, B], [B^T, 0]] [psi; u] = [F; 0].
struct BlockSolution {
  std::vector<double> psi;
  std::vector<double> u;
};

inline BlockSolution dense_block_solve(const std::vector<std::vector<double>>& A,
                                       const std::vector<std::vector<double>>& B,
                                       const std::vector<double>& F) {
  int nv = static_cast<int>(A.size());
  int nu = nv ? static_cast<int>(B[0].size()) : 0;
  int n = nv + nu;
  std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) K[i][j] = A[i][j];
    for (int j = 0; j < nu; ++j) {
      K[i][nv + j] = B[i][j];
      K[nv + j][i] = B[i][j];
    }
    rhs[i] = F[i];
  }
  auto x = dense_solve(std::move(K), std::move(rhs));
  BlockSolution s;
  s.psi.assign(x.begin(), x.begin() + nv);
  s.u.assign(x.begin() + nv, x.end());
  return s;
}

}  // namespace oracle
