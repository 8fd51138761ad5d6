#include "lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wdro {

LpResult solve_lp_max(const std::vector<double>& c, const std::vector<double>& A,
                      const std::vector<double>& b, int rows, int cols) {
  require(static_cast<int>(c.size()) == cols && static_cast<int>(A.size()) == rows * cols &&
              static_cast<int>(b.size()) == rows,
          Errc::invalid_argument, "lp: shape mismatch");
  for (double bi : b)
    require(bi >= 0.0, Errc::invalid_argument, "lp: needs b >= 0");

  // Tableau with slack columns appended; row 0..rows-1 constraints, last row
  // the (negated) objective.
  const int width = cols + rows + 1;
  std::vector<double> T(static_cast<std::size_t>(rows + 1) * width, 0.0);
  auto at = [&](int r, int col) -> double& { return T[static_cast<std::size_t>(r) * width + col]; };
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < cols; ++j) at(r, j) = A[static_cast<std::size_t>(r) * cols + j];
    at(r, cols + r) = 1.0;
    at(r, width - 1) = b[r];
  }
  for (int j = 0; j < cols; ++j) at(rows, j) = -c[j];

  std::vector<int> basis(rows);
  for (int r = 0; r < rows; ++r) basis[r] = cols + r;

  const double tol = 1e-11;
  const long max_iters = 2000L + 50L * static_cast<long>(rows) * (cols + rows);
  LpResult res;
  for (long it = 0; it < max_iters; ++it) {
    // Bland: first column with negative reduced cost.
    int pivot_col = -1;
    for (int j = 0; j < width - 1; ++j)
      if (at(rows, j) < -tol) {
        pivot_col = j;
        break;
      }
    if (pivot_col < 0) break;

    int pivot_row = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) {
      if (at(r, pivot_col) > tol) {
        const double ratio = at(r, width - 1) / at(r, pivot_col);
        if (ratio < best_ratio - 1e-15 ||
            (ratio < best_ratio + 1e-15 && (pivot_row < 0 || basis[r] < basis[pivot_row]))) {
          best_ratio = ratio;
          pivot_row = r;
        }
      }
    }
    if (pivot_row < 0) {
      res.bounded = false;
      return res;
    }

    const double piv = at(pivot_row, pivot_col);
    for (int j = 0; j < width; ++j) at(pivot_row, j) /= piv;
    for (int r = 0; r <= rows; ++r) {
      if (r == pivot_row) continue;
      const double f = at(r, pivot_col);
      if (f == 0.0) continue;
      for (int j = 0; j < width; ++j) at(r, j) -= f * at(pivot_row, j);
    }
    basis[pivot_row] = pivot_col;
  }

  res.x.assign(cols, 0.0);
  for (int r = 0; r < rows; ++r)
    if (basis[r] < cols) res.x[basis[r]] = at(r, width - 1);
  res.value = at(rows, width - 1);
  return res;
}

}  // namespace wdro
