#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nkhodge/scalar.hpp"

namespace nkh {

using Mask = std::uint32_t;
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<Scalar, int>;

// Which degree-1 generators the basis monomials are built from: the real
// coframe u^1..u^2n, or the type-adapted coframe theta^1..theta^n followed
// by their conjugates.
enum class Coframe : std::uint8_t { real, pq };

inline int popcount(Mask m) { return __builtin_popcount(m); }

}  // namespace nkh
