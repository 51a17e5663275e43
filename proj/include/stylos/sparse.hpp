#pragma once

#include <cstdint>
#include <vector>

namespace stylos {

using DenseVector = std::vector<double>;

// Sorted-index sparse vector. Dimension is implied by the feature space the
// vector lives in and is checked by the consumers that know it.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  double get(std::uint32_t index) const;
  double squared_norm() const;
  double norm() const;
  // One past the largest stored index; 0 for the zero vector.
  std::uint32_t min_dimension() const { return indices.empty() ? 0 : indices.back() + 1; }

  DenseVector to_dense(std::size_t dim) const;
  static SparseVector from_dense(const DenseVector& dense);

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

double dot(const SparseVector& x, const DenseVector& w);
double squared_distance(const SparseVector& a, const SparseVector& b);
double squared_distance(const DenseVector& a, const DenseVector& b);

}  // namespace stylos
