#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nkhodge/exterior.hpp"

namespace nkh {

struct Bidegree {
    int p = 0;
    int q = 0;
    friend bool operator==(const Bidegree&, const Bidegree&) = default;
};

// Bidegree of a monomial in the pq coframe: generators 0..n-1 are the
// (1,0) forms, n..2n-1 their conjugates.
inline Bidegree pq_type(Mask m, int n) {
    return {popcount(m & ((Mask(1) << n) - 1)), popcount(m >> n)};
}

// Drop stored exact zeros.
void prune(SparseMatrix& m);

class GradedOperator {
public:
    GradedOperator() = default;
    // Verifies that every entry shifts degree by `degree`, and when a
    // bidegree is given in the pq coframe, that it shifts type accordingly.
    GradedOperator(std::shared_ptr<const ExteriorBasis> basis, SparseMatrix m, int degree, Coframe frame,
                   std::optional<Bidegree> bidegree = std::nullopt);

    static GradedOperator zero(std::shared_ptr<const ExteriorBasis> basis, int degree, Coframe frame);
    static GradedOperator identity(std::shared_ptr<const ExteriorBasis> basis, Coframe frame);

    const SparseMatrix& matrix() const { return m_; }
    int degree() const { return degree_; }
    int parity() const { return degree_ & 1; }
    Coframe frame() const { return frame_; }
    const std::optional<Bidegree>& bidegree() const { return bidegree_; }
    const ExteriorBasis& basis() const { return *basis_; }
    const std::shared_ptr<const ExteriorBasis>& basis_ptr() const { return basis_; }
    int dim() const { return basis_->dim(); }
    bool is_zero() const { return m_.nonZeros() == 0; }

    Form apply(const Form& a) const;
    Form column(Mask m) const;
    // Restriction to one degree or one pq type block of the domain.
    GradedOperator restrict_domain(const std::function<bool(Mask)>& keep) const;
    GradedOperator with_bidegree(Bidegree b) const;
    GradedOperator without_bidegree() const;

    GradedOperator operator-() const;
    GradedOperator& operator+=(const GradedOperator& o);
    GradedOperator& operator-=(const GradedOperator& o);
    GradedOperator& operator*=(const Scalar& s);

private:
    std::shared_ptr<const ExteriorBasis> basis_;
    SparseMatrix m_;
    int degree_ = 0;
    Coframe frame_ = Coframe::real;
    std::optional<Bidegree> bidegree_;
};

GradedOperator operator+(GradedOperator a, const GradedOperator& b);
GradedOperator operator-(GradedOperator a, const GradedOperator& b);
GradedOperator operator*(const Scalar& s, GradedOperator a);
// Composition: (a * b)(x) = a(b(x)).
GradedOperator operator*(const GradedOperator& a, const GradedOperator& b);
bool operator==(const GradedOperator& a, const GradedOperator& b);
inline bool operator!=(const GradedOperator& a, const GradedOperator& b) { return !(a == b); }

// [[P,Q]] = PQ - (-1)^{|P||Q|} QP.
GradedOperator graded_commutator(const GradedOperator& p, const GradedOperator& q);

// Outcome of an exact comparison; the residual is a floating embedding used
// for display only.
struct Comparison {
    bool equal = true;
    double residual = 0.0;
    std::optional<std::string> witness;
};
Comparison compare(const GradedOperator& a, const GradedOperator& b);
Comparison compare(const Form& a, const Form& b);

// Frame-agnostic constructors.  All images are expressed in `frame`.
// images[a] is the image of generator a, of degree 1 + degree.
GradedOperator derivation_operator(std::shared_ptr<const ExteriorBasis> basis, const std::vector<Form>& images,
                                   int degree, Coframe frame);
// images[a] is a degree-1 form; the operator is the induced algebra map.
GradedOperator multiplicative_operator(std::shared_ptr<const ExteriorBasis> basis, const std::vector<Form>& images,
                                       Coframe frame);
GradedOperator left_multiplication(std::shared_ptr<const ExteriorBasis> basis, const Form& beta);
// Interior product with the vector whose pairing with generator a is v[a].
GradedOperator contraction_operator(std::shared_ptr<const ExteriorBasis> basis, const Vector& v, Coframe frame);
GradedOperator diagonal_operator(std::shared_ptr<const ExteriorBasis> basis, Coframe frame,
                                 const std::function<Scalar(Mask)>& value);

// Applies a derivation given by generator images to a form directly.
Form apply_derivation(const std::vector<Form>& images, int degree, const Form& a);

}  // namespace nkh
