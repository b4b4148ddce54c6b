#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "nkhodge/lie_model.hpp"

namespace nkh {

// The complexified exterior algebra of one model, with both coframes.
// The pq coframe: theta^a = 1/2 (u^j - i J u^j) for the first n real
// generators giving independent (1,0) forms, Gram-Schmidt orthogonalized
// (not normalized); generators n..2n-1 are their exact conjugates.  Its Gram
// matrix is diagonal, which makes adjoints and type projections cheap.
class FormSpace {
public:
    explicit FormSpace(LieAlgebraModel m);
    FormSpace(const FormSpace&) = delete;
    FormSpace& operator=(const FormSpace&) = delete;

    const LieAlgebraModel& model() const { return model_; }
    int dim() const { return model_.dimension; }
    int n() const { return model_.n(); }
    const std::shared_ptr<const ExteriorBasis>& basis() const { return basis_; }
    const GramData& gram(Coframe f) const { return f == Coframe::real ? real_gram_ : pq_gram_; }
    // gen^a = sum_j pq_matrix(j,a) u^j;  u^j = sum_a pq_inverse(a,j) gen^a.
    const DenseMatrix& pq_matrix() const { return c1_; }
    const DenseMatrix& pq_inverse() const { return c1inv_; }
    // <theta^a, theta^a>, also the norm of its conjugate.
    const Scalar& pq_norm(int a) const { return norms_[a % n()]; }
    const ConnectionTable& connection() const { return conn_; }
    const Form& omega() const { return omega_; }

    Form to_frame(const Form& f, Coframe target) const;
    GradedOperator to_frame(const GradedOperator& p, Coframe target) const;

    // Builders from real-coframe data, returned in `frame`.
    GradedOperator derivation(const std::vector<Form>& real_images, int degree, Coframe frame) const;
    // Algebra map induced by A u^i = sum_j a(i,j) u^j.
    GradedOperator multiplicative(const DenseMatrix& a, Coframe frame) const;
    GradedOperator left_mult(const Form& beta, Coframe frame) const;
    // iota(X) for X = sum_i x[i] e_i.
    GradedOperator contraction(const Vector& x, Coframe frame) const;
    // nabla_{e_i}, a degree-0 derivation.
    GradedOperator covariant(int i, Coframe frame) const;

    GradedOperator adjoint(const GradedOperator& p) const;
    // conj o P o conj.
    GradedOperator conjugate(const GradedOperator& p) const;
    GradedOperator type_projector(int p, int q, Coframe frame) const;
    GradedOperator degree_projector(int k, Coframe frame) const;
    GradedOperator identity(Coframe frame) const { return GradedOperator::identity(basis_, frame); }
    GradedOperator zero(int degree, Coframe frame) const { return GradedOperator::zero(basis_, degree, frame); }

private:
    const SparseMatrix& to_real_matrix() const;
    const SparseMatrix& to_pq_matrix() const;
    const SparseMatrix& real_gram_matrix() const;
    const SparseMatrix& real_gram_inverse() const;

    LieAlgebraModel model_;
    std::shared_ptr<const ExteriorBasis> basis_;
    GramData real_gram_;
    GramData pq_gram_;
    DenseMatrix c1_, c1inv_;
    std::vector<Scalar> norms_;
    ConnectionTable conn_;
    Form omega_;

    mutable std::once_flag t_once_, tinv_once_, g_once_, ginv_once_;
    mutable SparseMatrix t_, tinv_, g_, ginv_;
};

struct DifferentialSplit {
    GradedOperator mu, del, delbar, mubar;
};

struct LefschetzTriple {
    GradedOperator L, Lambda, H;
};

struct MultOperators {
    GradedOperator L, Lambda;
};

GradedOperator pq_projector(const FormSpace& s, int p, int q, Coframe frame = Coframe::real);
GradedOperator j_action(const FormSpace& s, Coframe frame = Coframe::real);
GradedOperator j_inverse(const FormSpace& s, Coframe frame = Coframe::real);
GradedOperator exterior_d(const FormSpace& s, Coframe frame = Coframe::real);
DifferentialSplit split_d(const FormSpace& s, Coframe frame = Coframe::real);
GradedOperator d_c(const FormSpace& s, Coframe frame = Coframe::real);
LefschetzTriple lefschetz_triple(const FormSpace& s, Coframe frame = Coframe::real);
MultOperators mult_operator(const FormSpace& s, const Form& beta, Coframe frame = Coframe::real);
GradedOperator adjoint(const FormSpace& s, const GradedOperator& p);
GradedOperator laplacian(const FormSpace& s, const GradedOperator& p);
// Degree-1 derivation with u^k -> values[k] (real-coframe forms).
GradedOperator derivation_from_one_forms(const FormSpace& s, const std::vector<Form>& values,
                                         Coframe frame = Coframe::real);
GradedOperator nijenhuis_operator(const FormSpace& s, Coframe frame = Coframe::real);

// P in A^r, with A^0 the left multiplications and A^r those P whose graded
// commutators with L_beta lie in A^{r-1}.
bool algebraic_order_at_most(const FormSpace& s, const GradedOperator& p, int r);
// Same test iterating beta over every basis monomial instead of the
// degree-1 generators; used to cross-check the generator shortcut.
bool algebraic_order_at_most_full(const FormSpace& s, const GradedOperator& p, int r);

struct ResidualReport {
    bool exact_zero = true;
    double residual = 0.0;
    std::optional<std::string> witness;
    bool kahler = false;  // nearly Kahler with nabla omega = 0
    bool strict = false;
    bool mu_zero = false;
};
ResidualReport nearly_kahler_residual(const FormSpace& s);

struct SU3Data {
    // Normalized so that |Theta|=1 in mu omega = (3 lambda/2) Theta.
    Scalar lambda2;
    // kappa with d Im(mu omega) = -3 kappa omega^2.
    Scalar kappa;
    Form theta_s;  // mu omega, real coframe
    Form omega;
};
SU3Data su3_extract(const FormSpace& s);

}  // namespace nkh
