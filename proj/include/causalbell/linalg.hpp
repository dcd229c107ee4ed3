#pragma once

#include "causalbell/rational.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace causalbell {

// Dense row-major matrix of rationals. Only what the rank / elimination
// routines need; nothing fancy.
class RationalMatrix {
public:
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
  std::size_t rows_, cols_;
  RationalVector data_;
};

// Rank by exact Gaussian elimination (destroys its argument).
inline std::size_t rank_destructive(RationalMatrix& m) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t pivot = rank;
    while (pivot < m.rows() && m.at(pivot, col) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != rank)
      for (std::size_t c = col; c < m.cols(); ++c)
        swap(m.at(pivot, c), m.at(rank, c));
    const Rational inv = 1 / m.at(rank, col);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == rank || m.at(r, col) == 0) continue;
      const Rational f = m.at(r, col) * inv;
      for (std::size_t c = col; c < m.cols(); ++c)
        if (m.at(rank, c) != 0) m.at(r, c) -= f * m.at(rank, c);
    }
    ++rank;
  }
  return rank;
}

inline std::size_t rank(RationalMatrix m) { return rank_destructive(m); }

// Dimension of the affine hull of a point set.
inline std::size_t affine_rank(std::span<const RationalVector> points) {
  if (points.empty()) throw std::invalid_argument("affine_rank: empty point list");
  const std::size_t dim = points[0].size();
  for (const auto& p : points)
    if (p.size() != dim) throw std::invalid_argument("affine_rank: dimension mismatch");
  if (points.size() == 1) return 0;
  RationalMatrix m(points.size() - 1, dim);
  for (std::size_t i = 1; i < points.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j)
      m.at(i - 1, j) = points[i][j] - points[0][j];
  return rank_destructive(m);
}

inline std::size_t affine_rank(const std::vector<RationalVector>& points) {
  return affine_rank(std::span<const RationalVector>(points.data(), points.size()));
}

} // namespace causalbell
