#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bregman {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Sorted, duplicate-free list of coordinate indices.
using IndexSet = std::vector<Index>;

/// Sorts and deduplicates in place; returns the normalized set.
IndexSet normalize_index_set(IndexSet set);

/// Indices i with v[i] != 0.
IndexSet support_of(const Vector& v);

/// [0, p) minus `set`.
IndexSet complement_of(const IndexSet& set, Index p);

/// Columns of `X` listed in `cols`, in order.
Matrix select_columns(const Matrix& X, const IndexSet& cols);

/// Entries of `v` listed in `idx`, in order.
Vector select_entries(const Vector& v, const IndexSet& idx);

}  // namespace bregman
