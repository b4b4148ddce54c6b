#include "nkhodge/graded_operator.hpp"

#include <cstdio>
#include <stdexcept>

namespace nkh {

void prune(SparseMatrix& m) {
    m.prune([](const int&, const int&, const Scalar& v) { return !v.is_zero(); });
}

namespace {

void check_same_space(const GradedOperator& a, const GradedOperator& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("operators on different exterior algebras");
    if (a.frame() != b.frame()) throw std::invalid_argument("operators expressed in different coframes");
}

std::string frame_symbol(Coframe f) { return f == Coframe::real ? "u" : "t"; }

}  // namespace

GradedOperator::GradedOperator(std::shared_ptr<const ExteriorBasis> basis, SparseMatrix m, int degree,
                               Coframe frame, std::optional<Bidegree> bidegree)
    : basis_(std::move(basis)), m_(std::move(m)), degree_(degree), frame_(frame), bidegree_(bidegree) {
    const int size = static_cast<int>(basis_->size());
    if (m_.rows() != size || m_.cols() != size) throw std::invalid_argument("operator matrix has the wrong size");
    prune(m_);
    const int n = basis_->dim() / 2;
    for (int c = 0; c < m_.outerSize(); ++c) {
        Mask cm = basis_->mask(c);
        for (SparseMatrix::InnerIterator it(m_, c); it; ++it) {
            Mask rm = basis_->mask(it.row());
            if (popcount(rm) - popcount(cm) != degree_)
                throw std::logic_error("operator entry violates its declared degree");
            if (bidegree_ && frame_ == Coframe::pq) {
                Bidegree tr = pq_type(rm, n), tc = pq_type(cm, n);
                if (tr.p - tc.p != bidegree_->p || tr.q - tc.q != bidegree_->q)
                    throw std::logic_error("operator entry violates its declared bidegree");
            }
        }
    }
    if (bidegree_ && bidegree_->p + bidegree_->q != degree_) throw std::logic_error("bidegree inconsistent with degree");
}

GradedOperator GradedOperator::zero(std::shared_ptr<const ExteriorBasis> basis, int degree, Coframe frame) {
    const int size = static_cast<int>(basis->size());
    return GradedOperator(std::move(basis), SparseMatrix(size, size), degree, frame);
}

GradedOperator GradedOperator::identity(std::shared_ptr<const ExteriorBasis> basis, Coframe frame) {
    const int size = static_cast<int>(basis->size());
    SparseMatrix m(size, size);
    m.setIdentity();
    return GradedOperator(std::move(basis), std::move(m), 0, frame, Bidegree{0, 0});
}

Form GradedOperator::apply(const Form& a) const {
    if (a.dim() != dim()) throw std::invalid_argument("form dimension mismatch");
    if (a.coframe() != frame_) throw std::invalid_argument("form and operator in different coframes");
    Form out(a.dim(), frame_);
    for (const auto& [mask, c] : a.terms()) {
        int col = basis_->position(mask);
        for (SparseMatrix::InnerIterator it(m_, col); it; ++it) out.add_term(basis_->mask(it.row()), it.value() * c);
    }
    return out;
}

Form GradedOperator::column(Mask m) const { return apply(Form::monomial(dim(), m, Scalar(1), frame_)); }

GradedOperator GradedOperator::restrict_domain(const std::function<bool(Mask)>& keep) const {
    GradedOperator out = *this;
    const ExteriorBasis& b = *basis_;
    out.m_.prune([&](const int&, const int& col, const Scalar&) { return keep(b.mask(col)); });
    return out;
}

GradedOperator GradedOperator::with_bidegree(Bidegree bd) const {
    return GradedOperator(basis_, m_, degree_, frame_, bd);
}

GradedOperator GradedOperator::without_bidegree() const {
    GradedOperator out = *this;
    out.bidegree_.reset();
    return out;
}

GradedOperator GradedOperator::operator-() const {
    GradedOperator out = *this;
    out.m_ = -m_;
    return out;
}

GradedOperator& GradedOperator::operator+=(const GradedOperator& o) {
    check_same_space(*this, o);
    if (o.is_zero()) return *this;
    if (is_zero()) {
        degree_ = o.degree_;
        bidegree_ = o.bidegree_;
        m_ = o.m_;
        return *this;
    }
    if (degree_ != o.degree_) throw std::logic_error("sum of operators of different degree");
    if (bidegree_ != o.bidegree_) bidegree_.reset();
    m_ = m_ + o.m_;
    prune(m_);
    return *this;
}

GradedOperator& GradedOperator::operator-=(const GradedOperator& o) { return *this += -o; }

GradedOperator& GradedOperator::operator*=(const Scalar& s) {
    if (s.is_zero()) {
        m_.setZero();
        return *this;
    }
    for (int k = 0; k < m_.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m_, k); it; ++it) it.valueRef() *= s;
    return *this;
}

GradedOperator operator+(GradedOperator a, const GradedOperator& b) { return a += b; }
GradedOperator operator-(GradedOperator a, const GradedOperator& b) { return a -= b; }
GradedOperator operator*(const Scalar& s, GradedOperator a) { return a *= s; }

GradedOperator operator*(const GradedOperator& a, const GradedOperator& b) {
    check_same_space(a, b);
    std::optional<Bidegree> bd;
    if (a.bidegree() && b.bidegree()) bd = Bidegree{a.bidegree()->p + b.bidegree()->p, a.bidegree()->q + b.bidegree()->q};
    SparseMatrix m;
    if (!a.is_zero() && !b.is_zero()) {
        m = a.matrix() * b.matrix();
    } else {
        m.resize(a.matrix().rows(), a.matrix().cols());
    }
    return GradedOperator(a.basis_ptr(), std::move(m), a.degree() + b.degree(), a.frame(), bd);
}

bool operator==(const GradedOperator& a, const GradedOperator& b) {
    if (a.dim() != b.dim() || a.frame() != b.frame()) return false;
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    if (a.degree() != b.degree()) return false;
    SparseMatrix diff = a.matrix() - b.matrix();
    prune(diff);
    return diff.nonZeros() == 0;
}

GradedOperator graded_commutator(const GradedOperator& p, const GradedOperator& q) {
    GradedOperator pq = p * q;
    GradedOperator qp = q * p;
    if ((p.degree() * q.degree()) & 1) return pq + qp;
    return pq - qp;
}

Comparison compare(const GradedOperator& a, const GradedOperator& b) {
    check_same_space(a, b);
    Comparison out;
    SparseMatrix diff = a.matrix() - b.matrix();
    prune(diff);
    if (diff.nonZeros() == 0) return out;
    out.equal = false;
    const std::string sym = frame_symbol(a.frame());
    for (int c = 0; c < diff.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(diff, c); it; ++it) {
            out.residual = std::max(out.residual, it.value().abs_approx());
            if (!out.witness) {
                out.witness = "column " + sym + mask_str(a.basis().mask(c)) + ", row " + sym +
                              mask_str(a.basis().mask(it.row())) + ": difference " + it.value().str();
            }
        }
    }
    return out;
}

Comparison compare(const Form& a, const Form& b) {
    Comparison out;
    Form diff = a - b;
    if (diff.is_zero()) return out;
    out.equal = false;
    const std::string sym = frame_symbol(a.coframe());
    for (const auto& [m, c] : diff.terms()) {
        out.residual = std::max(out.residual, c.abs_approx());
        if (!out.witness) out.witness = "coefficient of " + sym + mask_str(m) + ": difference " + c.str();
    }
    return out;
}

Form apply_derivation(const std::vector<Form>& images, int degree, const Form& a) {
    Form out(a.dim(), images.empty() ? a.coframe() : images.front().coframe());
    for (const auto& [m, c] : a.terms()) {
        Mask rest = m;
        int rank = 0;
        while (rest) {
            int t = __builtin_ctz(rest);
            rest &= rest - 1;
            Mask bit = Mask(1) << t;
            Mask prefix = m & (bit - 1);
            Mask suffix = m & ~(bit | (bit - 1));
            Mask others = m & ~bit;
            bool flip = (degree & 1) && (rank & 1);
            for (const auto& [s, v] : images[t].terms()) {
                if (s & others) continue;
                int sign = wedge_sign(prefix, s) * wedge_sign(prefix | s, suffix);
                if (flip) sign = -sign;
                Scalar term = c * v;
                out.add_term(others | s, sign > 0 ? term : -term);
            }
            ++rank;
        }
    }
    return out;
}

namespace {

SparseMatrix from_columns(const ExteriorBasis& basis, const std::function<void(int, std::vector<Triplet>&)>& col) {
    const int size = static_cast<int>(basis.size());
    std::vector<Triplet> trips;
    for (int c = 0; c < size; ++c) col(c, trips);
    SparseMatrix m(size, size);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

void check_images(const std::shared_ptr<const ExteriorBasis>& basis, const std::vector<Form>& images, Coframe frame) {
    if (static_cast<int>(images.size()) != basis->dim()) throw std::invalid_argument("need one image per generator");
    for (const Form& f : images)
        if (f.coframe() != frame || f.dim() != basis->dim()) throw std::invalid_argument("generator image in the wrong space");
}

}  // namespace

GradedOperator derivation_operator(std::shared_ptr<const ExteriorBasis> basis, const std::vector<Form>& images,
                                   int degree, Coframe frame) {
    check_images(basis, images, frame);
    for (const Form& f : images)
        if (!f.is_zero() && f.degree() != degree + 1) throw std::invalid_argument("generator image has the wrong degree");
    const ExteriorBasis& b = *basis;
    SparseMatrix m = from_columns(b, [&](int c, std::vector<Triplet>& trips) {
        Form col = apply_derivation(images, degree, Form::monomial(b.dim(), b.mask(c), Scalar(1), frame));
        for (const auto& [mask, v] : col.terms()) trips.emplace_back(b.position(mask), c, v);
    });
    return GradedOperator(std::move(basis), std::move(m), degree, frame);
}

GradedOperator multiplicative_operator(std::shared_ptr<const ExteriorBasis> basis, const std::vector<Form>& images,
                                       Coframe frame) {
    check_images(basis, images, frame);
    for (const Form& f : images)
        if (!f.is_zero() && f.degree() != 1) throw std::invalid_argument("multiplicative map needs degree-1 images");
    const ExteriorBasis& b = *basis;
    // Column of m is the column of m minus its top generator, wedged with that generator's image.
    std::vector<Form> cols(b.size());
    SparseMatrix m = from_columns(b, [&](int c, std::vector<Triplet>& trips) {
        Mask mask = b.mask(c);
        if (mask == 0) {
            cols[c] = Form::constant(b.dim(), Scalar(1), frame);
        } else {
            int top = 31 - __builtin_clz(mask);
            cols[c] = wedge(cols[b.position(mask & ~(Mask(1) << top))], images[top]);
        }
        for (const auto& [r, v] : cols[c].terms()) trips.emplace_back(b.position(r), c, v);
    });
    return GradedOperator(std::move(basis), std::move(m), 0, frame);
}

GradedOperator left_multiplication(std::shared_ptr<const ExteriorBasis> basis, const Form& beta) {
    if (beta.dim() != basis->dim()) throw std::invalid_argument("form dimension mismatch");
    if (!beta.is_homogeneous()) throw std::invalid_argument("left multiplication needs a homogeneous form");
    const int deg = beta.is_zero() ? 0 : *beta.degree();
    const ExteriorBasis& b = *basis;
    SparseMatrix m = from_columns(b, [&](int c, std::vector<Triplet>& trips) {
        Mask mask = b.mask(c);
        for (const auto& [s, v] : beta.terms()) {
            int sign = wedge_sign(s, mask);
            if (sign == 0) continue;
            trips.emplace_back(b.position(s | mask), c, sign > 0 ? v : -v);
        }
    });
    return GradedOperator(std::move(basis), std::move(m), deg, beta.coframe());
}

GradedOperator contraction_operator(std::shared_ptr<const ExteriorBasis> basis, const Vector& v, Coframe frame) {
    if (v.size() != basis->dim()) throw std::invalid_argument("vector dimension mismatch");
    std::vector<Form> images;
    for (int a = 0; a < basis->dim(); ++a) images.push_back(Form::constant(basis->dim(), v[a], frame));
    return derivation_operator(std::move(basis), images, -1, frame);
}

GradedOperator diagonal_operator(std::shared_ptr<const ExteriorBasis> basis, Coframe frame,
                                 const std::function<Scalar(Mask)>& value) {
    const ExteriorBasis& b = *basis;
    SparseMatrix m = from_columns(b, [&](int c, std::vector<Triplet>& trips) {
        Scalar v = value(b.mask(c));
        if (!v.is_zero()) trips.emplace_back(c, c, v);
    });
    return GradedOperator(std::move(basis), std::move(m), 0, frame);
}

}  // namespace nkh
