#include "slamot/assignment.hpp"

#include <algorithm>
#include <limits>

namespace slamot {

ScoreMatrix ScoreMatrix::from_dense(const Eigen::MatrixXd& m) {
  ScoreMatrix s(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < s.rows(); ++r) {
    for (int c = 0; c < s.cols(); ++c) s.set(r, c, m(r, c));
  }
  return s;
}

Assignment solve_max_assignment(const ScoreMatrix& scores) {
  const int rows = scores.rows(), cols = scores.cols();
  Assignment out;
  out.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return out;

  // Square padding; a forbidden or padded cell costs 0, which is the same as
  // leaving the row unassigned. Allowed cells cost -score.
  const int n = std::max(rows, cols);
  auto cost = [&](int r, int c) -> double {
    if (r >= rows || c >= cols) return 0.0;
    const auto& v = scores.at(r, c);
    return v ? -*v : 0.0;
  };

  // Potentials-based O(n^3) Hungarian method, 1-indexed with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= n; ++j) {
    const int r = p[j] - 1, c = j - 1;
    if (r < rows && c < cols && scores.allowed(r, c)) out.row_to_col[r] = c;
  }
  for (int r = 0; r < rows; ++r) {
    if (out.row_to_col[r] >= 0) out.total += *scores.at(r, out.row_to_col[r]);
  }
  return out;
}

}  // namespace slamot
