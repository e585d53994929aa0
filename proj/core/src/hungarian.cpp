#include "pixelhand/hungarian.hpp"

#include <cmath>
#include <limits>

#include "pixelhand/error.hpp"

namespace pixelhand {

CostMatrix::CostMatrix(std::size_t r, std::size_t c, double fill)
    : rows(r), cols(c), values(r * c, fill) {}

std::vector<long> solve_assignment(const CostMatrix& cost) {
  if (cost.values.size() != cost.rows * cost.cols) {
    throw ConfigurationError("cost matrix size does not match its shape");
  }
  for (double v : cost.values) {
    if (!std::isfinite(v)) throw ConfigurationError("cost matrix entries must be finite");
  }
  std::vector<long> result(cost.rows, kUnassigned);
  if (cost.rows == 0 || cost.cols == 0) return result;

  // Work on an n x m problem with n <= m, transposing if needed.
  const bool transposed = cost.rows > cost.cols;
  const std::size_t n = transposed ? cost.cols : cost.rows;
  const std::size_t m = transposed ? cost.rows : cost.cols;
  const auto a = [&](std::size_t i, std::size_t j) {
    return transposed ? cost(j - 1, i - 1) : cost(i - 1, j - 1);
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] is the row matched to column j (0 = none).
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed) {
      result[j - 1] = static_cast<long>(p[j] - 1);
    } else {
      result[p[j] - 1] = static_cast<long>(j - 1);
    }
  }
  return result;
}

}  // namespace pixelhand
