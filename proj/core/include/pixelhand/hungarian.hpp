#pragma once

#include <cstddef>
#include <vector>

namespace pixelhand {

/// Row-major cost matrix of `rows` x `cols`.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0);

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

inline constexpr long kUnassigned = -1;

/// Minimum-cost assignment (Hungarian method, shortest augmenting paths).
/// Rectangular matrices are allowed; min(rows, cols) pairs are assigned.
/// Returns the column for each row, or kUnassigned.
std::vector<long> solve_assignment(const CostMatrix& cost);

}  // namespace pixelhand
