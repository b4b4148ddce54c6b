#pragma once

#include <utility>
#include <vector>

#include "nkhodge/types.hpp"

namespace nkh {

// Sorted (index, value) pairs with no stored zeros.
using SparseVector = std::vector<std::pair<int, Scalar>>;

// Null space of the operators stacked vertically, restricted to the domain
// columns listed in `domain`.  Vectors are indexed by position in `domain`.
// Fraction-free Gauss-Jordan: rows are kept primitive (integral components,
// content 1) and the pivot in each column is the entry of least bit size.
std::vector<SparseVector> sparse_kernel(const std::vector<const SparseMatrix*>& blocks, const std::vector<int>& domain);

int sparse_rank(std::vector<SparseVector> rows);

// Reference implementation over the field: dense rows, first-nonzero pivot.
std::vector<SparseVector> dense_kernel(DenseMatrix a);
int dense_rank(DenseMatrix a);

// Same dimension and the concatenation has no larger rank.
bool same_span(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b, int ambient);

// Scales v by a positive rational so every rational component is an
// integer and their gcd is 1.
void make_primitive(SparseVector& v);

}  // namespace nkh
