#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace slamot {

/// Dense score matrix where an entry may be forbidden (no edge).
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(int rows, int cols) : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set(int r, int c, double v) { values_[index(r, c)] = v; }
  void forbid(int r, int c) { values_[index(r, c)].reset(); }
  const std::optional<double>& at(int r, int c) const { return values_[index(r, c)]; }
  bool allowed(int r, int c) const { return values_[index(r, c)].has_value(); }

  static ScoreMatrix from_dense(const Eigen::MatrixXd& m);

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols_ + c; }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::optional<double>> values_;
};

struct Assignment {
  std::vector<int> row_to_col;  ///< -1 when the row is unassigned
  double total = 0.0;           ///< sum of assigned scores in row order
};

/// Maximum-weight one-to-one assignment restricted to allowed entries.
/// Rows may stay unassigned; forbidden entries are never used. Solved by the
/// Kuhn-Munkres (Hungarian) algorithm on a square padded cost matrix.
Assignment solve_max_assignment(const ScoreMatrix& scores);

}  // namespace slamot
