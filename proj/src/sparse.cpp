#include "stylos/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace stylos {

double SparseVector::get(std::uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

DenseVector SparseVector::to_dense(std::size_t dim) const {
  DenseVector d(dim, 0.0);
  for (std::size_t k = 0; k < indices.size(); ++k) d[indices[k]] = values[k];
  return d;
}

SparseVector SparseVector::from_dense(const DenseVector& dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.indices.push_back(static_cast<std::uint32_t>(i));
      v.values.push_back(dense[i]);
    }
  }
  return v;
}

double dot(const SparseVector& x, const DenseVector& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.indices.size(); ++k) s += x.values[k] * w[x.indices[k]];
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() || j < b.indices.size()) {
    double d;
    if (j == b.indices.size() || (i < a.indices.size() && a.indices[i] < b.indices[j])) {
      d = a.values[i++];
    } else if (i == a.indices.size() || b.indices[j] < a.indices[i]) {
      d = b.values[j++];
    } else {
      d = a.values[i++] - b.values[j++];
    }
    s += d * d;
  }
  return s;
}

double squared_distance(const DenseVector& a, const DenseVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace stylos
