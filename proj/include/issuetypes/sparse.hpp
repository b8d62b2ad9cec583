#pragma once

// Sparse real vector with sorted coordinate storage. Feature vectors reach
// tens of thousands of textual columns of which a sentence touches a handful,
// so every model-facing routine works on this representation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace issuetypes {

struct SparseVector {
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<double> values;
  std::uint32_t dim = 0;

  std::size_t nnz() const { return indices.size(); }

  void push(std::uint32_t index, double value) {
    indices.push_back(index);
    values.push_back(value);
  }

  double value_at(std::uint32_t index) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), index);
    if (it == indices.end() || *it != index) return 0.0;
    return values[static_cast<std::size_t>(it - indices.begin())];
  }

  static SparseVector from_dense(const std::vector<double>& dense) {
    SparseVector v;
    v.dim = static_cast<std::uint32_t>(dense.size());
    for (std::uint32_t i = 0; i < v.dim; ++i) {
      if (dense[i] != 0.0) v.push(i, dense[i]);
    }
    return v;
  }

  std::vector<double> to_dense() const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t i = 0; i < indices.size(); ++i) out[indices[i]] = values[i];
    return out;
  }

  double l2_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
  }

  void scale(double factor) {
    for (double& v : values) v *= factor;
  }
};

inline double dot(const SparseVector& x, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.indices.size(); ++i) s += x.values[i] * w[x.indices[i]];
  return s;
}

// acc += factor * x, acc dense of length >= x.dim.
inline void add_scaled(std::vector<double>& acc, const SparseVector& x, double factor) {
  for (std::size_t i = 0; i < x.indices.size(); ++i) acc[x.indices[i]] += factor * x.values[i];
}

inline double squared_distance(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      const double d = a.values[i] - b.values[j];
      s += d * d;
      ++i;
      ++j;
    } else if (a.indices[i] < b.indices[j]) {
      s += a.values[i] * a.values[i];
      ++i;
    } else {
      s += b.values[j] * b.values[j];
      ++j;
    }
  }
  for (; i < a.indices.size(); ++i) s += a.values[i] * a.values[i];
  for (; j < b.indices.size(); ++j) s += b.values[j] * b.values[j];
  return s;
}

// a + lambda * (b - a), merging the two support sets.
inline SparseVector interpolate(const SparseVector& a, const SparseVector& b, double lambda) {
  if (a.dim != b.dim) throw std::invalid_argument("interpolate: dimension mismatch");
  SparseVector out;
  out.dim = a.dim;
  out.indices.reserve(a.indices.size() + b.indices.size());
  out.values.reserve(a.indices.size() + b.indices.size());
  std::size_t i = 0, j = 0;
  auto emit = [&out](std::uint32_t idx, double va, double vb, double lam) {
    const double v = va + lam * (vb - va);
    if (v != 0.0) out.push(idx, v);
  };
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      emit(a.indices[i], a.values[i], b.values[j], lambda);
      ++i;
      ++j;
    } else if (a.indices[i] < b.indices[j]) {
      emit(a.indices[i], a.values[i], 0.0, lambda);
      ++i;
    } else {
      emit(b.indices[j], 0.0, b.values[j], lambda);
      ++j;
    }
  }
  for (; i < a.indices.size(); ++i) emit(a.indices[i], a.values[i], 0.0, lambda);
  for (; j < b.indices.size(); ++j) emit(b.indices[j], 0.0, b.values[j], lambda);
  return out;
}

// Overwrites (or inserts) a single coordinate. Used for snapping binary
// columns after interpolation; call sites touch few coordinates.
inline void set_coordinate(SparseVector& v, std::uint32_t index, double value) {
  auto it = std::lower_bound(v.indices.begin(), v.indices.end(), index);
  const std::size_t pos = static_cast<std::size_t>(it - v.indices.begin());
  if (it != v.indices.end() && *it == index) {
    if (value == 0.0) {
      v.indices.erase(it);
      v.values.erase(v.values.begin() + static_cast<std::ptrdiff_t>(pos));
    } else {
      v.values[pos] = value;
    }
    return;
  }
  if (value == 0.0) return;
  v.indices.insert(it, index);
  v.values.insert(v.values.begin() + static_cast<std::ptrdiff_t>(pos), value);
}

}  // namespace issuetypes
