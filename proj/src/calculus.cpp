#include "nkhodge/calculus.hpp"

#include <functional>
#include <stdexcept>

namespace nkh {

namespace {

Scalar hermitian(const Vector& x, const Vector& y, const DenseMatrix& pair1) {
    Scalar s;
    for (int a = 0; a < x.size(); ++a) {
        if (x[a].is_zero()) continue;
        for (int b = 0; b < y.size(); ++b)
            if (!y[b].is_zero() && !pair1(a, b).is_zero()) s += x[a] * y[b].conj() * pair1(a, b);
    }
    return s;
}

int rank_of(std::vector<Vector> rows) {
    int rank = 0;
    const int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
        int piv = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (!rows[r][c].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[piv], rows[rank]);
        Scalar inv = rows[rank][c].inverse();
        for (int r = rank + 1; r < static_cast<int>(rows.size()); ++r) {
            if (rows[r][c].is_zero()) continue;
            Scalar f = rows[r][c] * inv;
            for (int k = c; k < cols; ++k)
                if (!rows[rank][k].is_zero()) rows[r][k] -= f * rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

// Images of generators for the algebra map A (u^i -> sum_j a(i,j) u^j), real coframe.
std::vector<Form> real_images_of(const DenseMatrix& a) {
    std::vector<Form> out;
    for (int i = 0; i < a.rows(); ++i) {
        Form f(static_cast<int>(a.cols()));
        for (int j = 0; j < a.cols(); ++j) f.add_term(Mask(1) << j, a(i, j));
        out.push_back(std::move(f));
    }
    return out;
}

// Compound of a: generator j maps to sum_i a(i,j) gen^i.
SparseMatrix compound(const std::shared_ptr<const ExteriorBasis>& basis, const DenseMatrix& a) {
    return multiplicative_operator(basis, real_images_of(a.transpose()), Coframe::real).matrix();
}

}  // namespace

FormSpace::FormSpace(LieAlgebraModel m) : model_(std::move(m)) {
    const int dim = model_.dimension;
    const int half = dim / 2;
    const int d = model_.extension_d;
    basis_ = make_basis(dim);
    real_gram_ = GramData::from_metric(model_.metric, d);
    conn_ = levi_civita(model_);
    omega_ = fundamental_form(model_);

    const DenseMatrix& M = model_.complex_structure;
    const DenseMatrix& pair1 = real_gram_.pairing_matrix();
    const Scalar i = Scalar::i();
    std::vector<Vector> thetas;
    for (int j = 0; j < dim && static_cast<int>(thetas.size()) < half; ++j) {
        Vector v = Vector::Constant(dim, Scalar(0));
        v[j] += Scalar::rational(1, 2);
        for (int l = 0; l < dim; ++l)
            if (!M(j, l).is_zero()) v[l] -= i * Scalar::rational(1, 2) * M(j, l);
        std::vector<Vector> trial = thetas;
        trial.push_back(v);
        if (rank_of(trial) == static_cast<int>(trial.size())) thetas.push_back(v);
    }
    if (static_cast<int>(thetas.size()) != half) throw std::logic_error("could not build a (1,0) coframe");
    for (int a = 0; a < half; ++a) {
        for (int b = 0; b < a; ++b) {
            Scalar coef = hermitian(thetas[a], thetas[b], pair1) / norms_[b];
            thetas[a] -= coef * thetas[b];
        }
        Scalar nrm = hermitian(thetas[a], thetas[a], pair1);
        if (!nrm.is_real() || nrm.real_sign() <= 0) throw std::logic_error("degenerate (1,0) coframe");
        norms_.push_back(nrm);
    }
    c1_ = DenseMatrix::Zero(dim, dim);
    for (int a = 0; a < half; ++a)
        for (int j = 0; j < dim; ++j) {
            c1_(j, a) = thetas[a][j];
            c1_(j, a + half) = thetas[a][j].conj();
        }
    for (int a = 0; a < half; ++a)
        for (int b = 0; b < half; ++b) {
            Vector conj_b = c1_.col(b + half);
            if (!hermitian(thetas[a], conj_b, pair1).is_zero())
                throw std::logic_error("(1,0) and (0,1) coframes are not orthogonal; is g J-invariant?");
        }
    c1inv_ = inverse(c1_);
    DenseMatrix diag = DenseMatrix::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) diag(a, a) = norms_[a % half];
    pq_gram_ = GramData::from_pairing(diag, Coframe::pq, d);
}

Form FormSpace::to_frame(const Form& f, Coframe target) const {
    if (f.coframe() == target) return f;
    const int dim = this->dim();
    std::vector<Form> images;
    if (target == Coframe::pq) {
        for (int j = 0; j < dim; ++j) {
            Form g(dim, Coframe::pq);
            for (int a = 0; a < dim; ++a) g.add_term(Mask(1) << a, c1inv_(a, j));
            images.push_back(std::move(g));
        }
    } else {
        for (int a = 0; a < dim; ++a) {
            Form g(dim, Coframe::real);
            for (int j = 0; j < dim; ++j) g.add_term(Mask(1) << j, c1_(j, a));
            images.push_back(std::move(g));
        }
    }
    return apply_multiplicative(images, f);
}

const SparseMatrix& FormSpace::to_real_matrix() const {
    std::call_once(t_once_, [&] { t_ = compound(basis_, c1_); });
    return t_;
}

const SparseMatrix& FormSpace::to_pq_matrix() const {
    std::call_once(tinv_once_, [&] { tinv_ = compound(basis_, c1inv_); });
    return tinv_;
}

const SparseMatrix& FormSpace::real_gram_matrix() const {
    std::call_once(g_once_, [&] { g_ = compound(basis_, real_gram_.pairing_matrix().transpose()); });
    return g_;
}

const SparseMatrix& FormSpace::real_gram_inverse() const {
    std::call_once(ginv_once_, [&] { ginv_ = compound(basis_, model_.metric.transpose()); });
    return ginv_;
}

GradedOperator FormSpace::to_frame(const GradedOperator& p, Coframe target) const {
    if (p.frame() == target) return p;
    SparseMatrix m;
    if (target == Coframe::pq) {
        m = to_pq_matrix() * p.matrix() * to_real_matrix();
    } else {
        m = to_real_matrix() * p.matrix() * to_pq_matrix();
    }
    prune(m);
    return GradedOperator(basis_, std::move(m), p.degree(), target, p.bidegree());
}

GradedOperator FormSpace::derivation(const std::vector<Form>& real_images, int degree, Coframe frame) const {
    if (frame == Coframe::real) return derivation_operator(basis_, real_images, degree, frame);
    const int dim = this->dim();
    std::vector<Form> images;
    for (int a = 0; a < dim; ++a) {
        Form img(dim);
        for (int j = 0; j < dim; ++j)
            if (!c1_(j, a).is_zero()) img += c1_(j, a) * real_images[j];
        images.push_back(to_frame(img, Coframe::pq));
    }
    return derivation_operator(basis_, images, degree, frame);
}

GradedOperator FormSpace::multiplicative(const DenseMatrix& a, Coframe frame) const {
    std::vector<Form> real = real_images_of(a);
    if (frame == Coframe::real) return multiplicative_operator(basis_, real, frame);
    const int dim = this->dim();
    std::vector<Form> images;
    for (int g = 0; g < dim; ++g) {
        Form img(dim);
        for (int j = 0; j < dim; ++j)
            if (!c1_(j, g).is_zero()) img += c1_(j, g) * real[j];
        images.push_back(to_frame(img, Coframe::pq));
    }
    return multiplicative_operator(basis_, images, frame);
}

GradedOperator FormSpace::left_mult(const Form& beta, Coframe frame) const {
    return left_multiplication(basis_, to_frame(beta, frame));
}

GradedOperator FormSpace::contraction(const Vector& x, Coframe frame) const {
    if (frame == Coframe::real) return contraction_operator(basis_, x, frame);
    Vector v = Vector::Constant(dim(), Scalar(0));
    for (int a = 0; a < dim(); ++a)
        for (int j = 0; j < dim(); ++j)
            if (!c1_(j, a).is_zero() && !x[j].is_zero()) v[a] += c1_(j, a) * x[j];
    return contraction_operator(basis_, v, frame);
}

GradedOperator FormSpace::covariant(int i, Coframe frame) const {
    return derivation(connection_images(conn_, i), 0, frame);
}

GradedOperator FormSpace::adjoint(const GradedOperator& p) const {
    std::optional<Bidegree> bd;
    if (p.bidegree()) bd = Bidegree{-p.bidegree()->p, -p.bidegree()->q};
    if (p.frame() == Coframe::real) {
        SparseMatrix ph = SparseMatrix(p.matrix().transpose());
        for (int k = 0; k < ph.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(ph, k); it; ++it) it.valueRef() = it.value().conj();
        SparseMatrix m = real_gram_inverse() * ph * real_gram_matrix();
        prune(m);
        return GradedOperator(basis_, std::move(m), -p.degree(), p.frame(), bd);
    }
    const ExteriorBasis& b = *basis_;
    auto norm = [&](Mask m) {
        Scalar s(1);
        for (int a = 0; m >> a; ++a)
            if (m >> a & 1) s *= pq_norm(a);
        return s;
    };
    std::vector<Triplet> trips;
    for (int c = 0; c < p.matrix().outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(p.matrix(), c); it; ++it) {
            int r = it.row();
            Scalar ratio = norm(b.mask(r)) / norm(b.mask(c));
            trips.emplace_back(c, r, it.value().conj() * ratio);
        }
    }
    SparseMatrix m(p.matrix().rows(), p.matrix().cols());
    m.setFromTriplets(trips.begin(), trips.end());
    return GradedOperator(basis_, std::move(m), -p.degree(), p.frame(), bd);
}

GradedOperator FormSpace::conjugate(const GradedOperator& p) const {
    std::optional<Bidegree> bd;
    if (p.bidegree()) bd = Bidegree{p.bidegree()->q, p.bidegree()->p};
    if (p.frame() == Coframe::real) {
        SparseMatrix m = p.matrix();
        for (int k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it) it.valueRef() = it.value().conj();
        return GradedOperator(basis_, std::move(m), p.degree(), p.frame(), bd);
    }
    const ExteriorBasis& b = *basis_;
    const int half = n();
    const Mask low = (Mask(1) << half) - 1;
    auto swap = [&](Mask m, bool& odd) {
        Mask hol = m & low, anti = m >> half;
        odd = (popcount(hol) * popcount(anti)) & 1;
        return anti | (hol << half);
    };
    std::vector<Triplet> trips;
    for (int c = 0; c < p.matrix().outerSize(); ++c) {
        bool oc;
        int c2 = b.position(swap(b.mask(c), oc));
        for (SparseMatrix::InnerIterator it(p.matrix(), c); it; ++it) {
            bool orr;
            int r2 = b.position(swap(b.mask(it.row()), orr));
            Scalar v = it.value().conj();
            trips.emplace_back(r2, c2, (oc != orr) ? -v : v);
        }
    }
    SparseMatrix m(p.matrix().rows(), p.matrix().cols());
    m.setFromTriplets(trips.begin(), trips.end());
    return GradedOperator(basis_, std::move(m), p.degree(), p.frame(), bd);
}

GradedOperator FormSpace::type_projector(int p, int q, Coframe frame) const {
    if (p < 0 || q < 0 || p > n() || q > n()) throw std::out_of_range("(p,q) out of range");
    const int half = n();
    GradedOperator proj = diagonal_operator(basis_, Coframe::pq, [&](Mask m) {
        Bidegree t = pq_type(m, half);
        return Scalar(t.p == p && t.q == q ? 1 : 0);
    });
    proj = proj.with_bidegree({0, 0});
    return to_frame(proj, frame);
}

GradedOperator FormSpace::degree_projector(int k, Coframe frame) const {
    return diagonal_operator(basis_, frame, [&](Mask m) { return Scalar(popcount(m) == k ? 1 : 0); })
        .with_bidegree({0, 0});
}

GradedOperator pq_projector(const FormSpace& s, int p, int q, Coframe frame) { return s.type_projector(p, q, frame); }

GradedOperator j_action(const FormSpace& s, Coframe frame) {
    GradedOperator j = s.multiplicative(s.model().complex_structure, frame);
    return frame == Coframe::pq ? j.with_bidegree({0, 0}) : j;
}

GradedOperator j_inverse(const FormSpace& s, Coframe frame) {
    GradedOperator j = s.multiplicative(-s.model().complex_structure, frame);
    return frame == Coframe::pq ? j.with_bidegree({0, 0}) : j;
}

GradedOperator exterior_d(const FormSpace& s, Coframe frame) {
    return s.derivation(coframe_differentials(s.model()), 1, frame);
}

DifferentialSplit split_d(const FormSpace& s, Coframe frame) {
    GradedOperator d = exterior_d(s, Coframe::pq);
    const ExteriorBasis& b = *s.basis();
    const int half = s.n();
    auto part = [&](int dp, int dq) {
        SparseMatrix m = d.matrix();
        m.prune([&](auto row, auto col, const auto&) {
            Bidegree tr = pq_type(b.mask(row), half), tc = pq_type(b.mask(col), half);
            return tr.p - tc.p == dp && tr.q - tc.q == dq;
        });
        GradedOperator op(s.basis(), std::move(m), 1, Coframe::pq, Bidegree{dp, dq});
        return s.to_frame(op, frame);
    };
    return {part(2, -1), part(1, 0), part(0, 1), part(-1, 2)};
}

GradedOperator d_c(const FormSpace& s, Coframe frame) {
    return j_inverse(s, frame) * exterior_d(s, frame) * j_action(s, frame);
}

LefschetzTriple lefschetz_triple(const FormSpace& s, Coframe frame) {
    GradedOperator L = s.left_mult(s.omega(), frame);
    if (frame == Coframe::pq) L = L.with_bidegree({1, 1});
    GradedOperator Lambda = s.adjoint(L);
    const int half = s.n();
    GradedOperator H =
        diagonal_operator(s.basis(), frame, [&](Mask m) { return Scalar(popcount(m) - half); }).with_bidegree({0, 0});
    return {std::move(L), std::move(Lambda), std::move(H)};
}

MultOperators mult_operator(const FormSpace& s, const Form& beta, Coframe frame) {
    GradedOperator L = s.left_mult(beta, frame);
    GradedOperator Lambda = s.adjoint(L);
    return {std::move(L), std::move(Lambda)};
}

GradedOperator adjoint(const FormSpace& s, const GradedOperator& p) { return s.adjoint(p); }

GradedOperator laplacian(const FormSpace& s, const GradedOperator& p) {
    return graded_commutator(s.adjoint(p), p);
}

GradedOperator derivation_from_one_forms(const FormSpace& s, const std::vector<Form>& values, Coframe frame) {
    if (static_cast<int>(values.size()) != s.dim()) throw std::invalid_argument("need one value per coframe element");
    return s.derivation(values, 1, frame);
}

GradedOperator nijenhuis_operator(const FormSpace& s, Coframe frame) {
    return s.derivation(nijenhuis_images(nijenhuis_tensor(s.model())), 1, frame);
}

namespace {

bool is_multiplication(const FormSpace& s, const GradedOperator& p) {
    if (p.is_zero()) return true;
    Form at_one = p.column(0);
    return left_multiplication(s.basis(), at_one) == p;
}

bool order_rec(const FormSpace& s, const std::vector<GradedOperator>& gens, const GradedOperator& p, int r,
               int start) {
    if (p.is_zero()) return true;
    if (is_multiplication(s, p)) return true;
    if (r == 0) return false;
    // ad_a ad_b = -(+-) ad_b ad_a and ad_a^2 = 0 for odd L_a, so strictly
    // increasing generator sequences cover every iterated commutator.
    for (int a = start; a < static_cast<int>(gens.size()); ++a)
        if (!order_rec(s, gens, graded_commutator(p, gens[a]), r - 1, a + 1)) return false;
    return true;
}

bool order_full_rec(const FormSpace& s, const std::vector<GradedOperator>& mults, const GradedOperator& p, int r) {
    if (p.is_zero()) return true;
    if (r == 0) return is_multiplication(s, p);
    for (const GradedOperator& l : mults)
        if (!order_full_rec(s, mults, graded_commutator(p, l), r - 1)) return false;
    return true;
}

}  // namespace

bool algebraic_order_at_most(const FormSpace& s, const GradedOperator& p, int r) {
    if (r < 0) throw std::invalid_argument("order must be non-negative");
    std::vector<GradedOperator> gens;
    for (int a = 0; a < s.dim(); ++a)
        gens.push_back(left_multiplication(s.basis(), Form::generator(s.dim(), a, p.frame())));
    return order_rec(s, gens, p, r, 0);
}

bool algebraic_order_at_most_full(const FormSpace& s, const GradedOperator& p, int r) {
    if (r < 0) throw std::invalid_argument("order must be non-negative");
    std::vector<GradedOperator> mults;
    const ExteriorBasis& b = *s.basis();
    for (std::size_t pos = 0; pos < b.size(); ++pos)
        mults.push_back(left_multiplication(s.basis(), Form::monomial(s.dim(), b.mask(pos), Scalar(1), p.frame())));
    return order_full_rec(s, mults, p, r);
}

ResidualReport nearly_kahler_residual(const FormSpace& s) {
    NKResidual t = nk_tensor_residual(s.model());
    ResidualReport out;
    out.exact_zero = t.exact_zero;
    out.residual = t.residual;
    out.witness = t.witness;
    out.kahler = t.kahler();
    out.strict = t.strict();
    out.mu_zero = split_d(s, Coframe::pq).mu.is_zero();
    return out;
}

SU3Data su3_extract(const FormSpace& s) {
    if (s.dim() != 6) throw std::invalid_argument("su3_extract needs a 6-dimensional model");
    DifferentialSplit sp = split_d(s, Coframe::pq);
    Form omega = s.to_frame(s.omega(), Coframe::pq);
    Form theta = sp.mu.apply(omega);
    if (theta.is_zero()) throw std::domain_error("not strict NK: mu omega = 0");
    for (const auto& [m, c] : theta.terms()) {
        Bidegree t = pq_type(m, s.n());
        if (t.p != 3 || t.q != 0) throw std::domain_error("mu omega is not of type (3,0)");
    }
    SU3Data out;
    out.lambda2 = Scalar::rational(4, 9) * inner_product(theta, theta, s.gram(Coframe::pq));
    Form im = (theta - conjugate(theta)) * (Scalar::i() * Scalar(2)).inverse();
    GradedOperator d = exterior_d(s, Coframe::pq);
    Form dim_theta = d.apply(im);
    Form w2 = wedge(omega, omega);
    const auto& [mask, coef] = *w2.terms().begin();
    Scalar kappa = -dim_theta.coeff(mask) / (Scalar(3) * coef);
    if (dim_theta != Scalar(-3) * kappa * w2 || kappa.is_zero() || !kappa.is_real())
        throw std::domain_error("eq (1.1) inconsistent: d Im(mu omega) is not a real multiple of omega^2");
    out.kappa = kappa;
    out.theta_s = s.to_frame(theta, Coframe::real);
    out.omega = s.omega();
    return out;
}

}  // namespace nkh
