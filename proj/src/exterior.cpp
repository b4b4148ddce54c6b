#include "nkhodge/exterior.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace nkh {

ExteriorBasis::ExteriorBasis(int dim) : dim_(dim) {
    if (dim < 0 || dim > 20) throw std::invalid_argument("exterior basis dimension out of range");
    const Mask full = Mask(1) << dim;
    masks_.reserve(full);
    pos_.assign(full, -1);
    offsets_.assign(dim + 2, 0);
    for (int k = 0; k <= dim; ++k) {
        offsets_[k] = static_cast<int>(masks_.size());
        std::vector<int> idx(k);
        for (int t = 0; t < k; ++t) idx[t] = t;
        while (true) {
            Mask m = 0;
            for (int t : idx) m |= Mask(1) << t;
            pos_[m] = static_cast<int>(masks_.size());
            masks_.push_back(m);
            int t = k - 1;
            while (t >= 0 && idx[t] == dim - k + t) --t;
            if (t < 0) break;
            ++idx[t];
            for (int s = t + 1; s < k; ++s) idx[s] = idx[s - 1] + 1;
        }
    }
    offsets_[dim + 1] = static_cast<int>(masks_.size());
}

std::shared_ptr<const ExteriorBasis> make_basis(int dim) { return std::make_shared<const ExteriorBasis>(dim); }

int wedge_sign(Mask a, Mask b) {
    if (a & b) return 0;
    int swaps = 0;
    while (b) {
        int j = __builtin_ctz(b);
        b &= b - 1;
        Mask above = j >= 31 ? 0 : ~((Mask(2) << j) - 1);
        swaps += popcount(a & above);
    }
    return (swaps & 1) ? -1 : 1;
}

int contraction_sign(Mask m, int i) {
    if (!(m >> i & 1)) return 0;
    return (popcount(m & ((Mask(1) << i) - 1)) & 1) ? -1 : 1;
}

std::string mask_str(Mask m) {
    std::string out = "{";
    bool first = true;
    for (int i = 0; m >> i; ++i) {
        if (!(m >> i & 1)) continue;
        if (!first) out += ",";
        out += std::to_string(i + 1);
        first = false;
    }
    return out + "}";
}

Form Form::monomial(int dim, Mask m, const Scalar& c, Coframe frame) {
    Form f(dim, frame);
    f.add_term(m, c);
    return f;
}

std::optional<int> Form::degree() const {
    if (terms_.empty()) return std::nullopt;
    int k = popcount(terms_.begin()->first);
    for (const auto& [m, c] : terms_)
        if (popcount(m) != k) return std::nullopt;
    return k;
}

bool Form::is_homogeneous() const { return terms_.empty() || degree().has_value(); }

Form Form::component(int k) const {
    Form out(dim_, frame_);
    for (const auto& [m, c] : terms_)
        if (popcount(m) == k) out.terms_.emplace(m, c);
    return out;
}

Scalar Form::coeff(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar() : it->second;
}

void Form::add_term(Mask m, const Scalar& c) {
    if (c.is_zero()) return;
    if (dim_ < 32 && (m >> dim_) != 0) throw std::out_of_range("monomial outside the exterior algebra");
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

static void check_compatible(const Form& a, const Form& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("form dimension mismatch");
    if (a.coframe() != b.coframe()) throw std::invalid_argument("forms expressed in different coframes");
}

Form& Form::operator+=(const Form& o) {
    check_compatible(*this, o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Form& Form::operator-=(const Form& o) {
    check_compatible(*this, o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Form& Form::operator*=(const Scalar& s) {
    if (s.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
}

Form Form::operator-() const {
    Form out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
}

bool operator==(const Form& a, const Form& b) {
    return a.dim_ == b.dim_ && a.frame_ == b.frame_ && a.terms_ == b.terms_;
}

std::string Form::str() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Mask, Scalar>> sorted(terms_.begin(), terms_.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
        int px = popcount(x.first), py = popcount(y.first);
        if (px != py) return px < py;
        // lexicographic on increasing index lists == reverse bit order on lowest differing bit
        Mask diff = x.first ^ y.first;
        int low = __builtin_ctz(diff);
        return (x.first >> low & 1) != 0;
    });
    std::ostringstream os;
    const char* sym = frame_ == Coframe::real ? "u" : "t";
    bool first = true;
    for (const auto& [m, c] : sorted) {
        if (!first) os << " + ";
        os << "(" << c.str() << ")" << sym << mask_str(m);
        first = false;
    }
    return os.str();
}

Form wedge(const Form& a, const Form& b) {
    check_compatible(a, b);
    Form out(a.dim(), a.coframe());
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            int s = wedge_sign(ma, mb);
            if (s == 0) continue;
            Scalar c = ca * cb;
            out.add_term(ma | mb, s > 0 ? c : -c);
        }
    }
    return out;
}

Form contract(const Vector& v, const Form& a) {
    if (v.size() != a.dim()) throw std::invalid_argument("vector dimension mismatch");
    Form out(a.dim(), a.coframe());
    for (int i = 0; i < a.dim(); ++i) {
        if (v[i].is_zero()) continue;
        for (const auto& [m, c] : a.terms()) {
            int s = contraction_sign(m, i);
            if (s == 0) continue;
            Scalar t = c * v[i];
            out.add_term(m & ~(Mask(1) << i), s > 0 ? t : -t);
        }
    }
    return out;
}

Form contract(int i, const Form& a) {
    if (i < 0 || i >= a.dim()) throw std::out_of_range("frame index out of range");
    Vector v = Vector::Constant(a.dim(), Scalar(0));
    v[i] = Scalar(1);
    return contract(v, a);
}

Form conjugate(const Form& a) {
    Form out(a.dim(), a.coframe());
    if (a.coframe() == Coframe::real) {
        for (const auto& [m, c] : a.terms()) out.add_term(m, c.conj());
        return out;
    }
    const int n = a.dim() / 2;
    const Mask low = (Mask(1) << n) - 1;
    for (const auto& [m, c] : a.terms()) {
        Mask hol = m & low, anti = m >> n;
        Mask swapped = anti | (hol << n);
        bool odd = (popcount(hol) * popcount(anti)) & 1;
        out.add_term(swapped, odd ? -c.conj() : c.conj());
    }
    return out;
}

Form apply_multiplicative(const std::vector<Form>& images, const Form& a) {
    if (static_cast<int>(images.size()) != a.dim()) throw std::invalid_argument("need one image per generator");
    const Coframe target = images.empty() ? a.coframe() : images.front().coframe();
    Form out(a.dim(), target);
    for (const auto& [m, c] : a.terms()) {
        Form prod = Form::constant(a.dim(), c, target);
        for (int i = 0; i < a.dim() && !prod.is_zero(); ++i)
            if (m >> i & 1) prod = wedge(prod, images[i]);
        out += prod;
    }
    return out;
}

Scalar determinant(DenseMatrix m) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw std::invalid_argument("determinant of a non-square matrix");
    Scalar det(1);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!m(r, col).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) return Scalar(0);
        if (piv != col) {
            m.row(piv).swap(m.row(col));
            det = -det;
        }
        det *= m(col, col);
        Scalar inv = m(col, col).inverse();
        for (int r = col + 1; r < n; ++r) {
            if (m(r, col).is_zero()) continue;
            Scalar f = m(r, col) * inv;
            for (int c = col; c < n; ++c)
                if (!m(col, c).is_zero()) m(r, c) -= f * m(col, c);
        }
    }
    return det;
}

DenseMatrix inverse(const DenseMatrix& m) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw std::invalid_argument("inverse of a non-square matrix");
    DenseMatrix a = m;
    DenseMatrix inv = DenseMatrix::Identity(n, n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!a(r, col).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("singular matrix");
        if (piv != col) {
            a.row(piv).swap(a.row(col));
            inv.row(piv).swap(inv.row(col));
        }
        Scalar p = a(col, col).inverse();
        for (int c = 0; c < n; ++c) {
            a(col, c) *= p;
            inv(col, c) *= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a(r, col).is_zero()) continue;
            Scalar f = a(r, col);
            for (int c = 0; c < n; ++c) {
                if (!a(col, c).is_zero()) a(r, c) -= f * a(col, c);
                if (!inv(col, c).is_zero()) inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

DenseMatrix conj_transpose(const DenseMatrix& m) {
    DenseMatrix out(m.cols(), m.rows());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out(c, r) = m(r, c).conj();
    return out;
}

bool is_positive_definite(const DenseMatrix& g) {
    for (int k = 1; k <= g.rows(); ++k) {
        Scalar minor = determinant(g.topLeftCorner(k, k));
        if (!minor.is_real() || minor.real_sign() <= 0) return false;
    }
    return true;
}

GramData GramData::from_metric(const DenseMatrix& g, int ext_d) {
    if (g.rows() != g.cols()) throw std::invalid_argument("metric must be square");
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            if (!g(i, j).is_real() || g(i, j) != g(j, i))
                throw std::invalid_argument("metric must be real symmetric");
    if (!is_positive_definite(g)) throw std::invalid_argument("metric is not positive-definite");
    GramData out = from_pairing(inverse(g), Coframe::real, ext_d);
    out.metric_ = g;
    Scalar root;
    if (real_sqrt(determinant(g), ext_d, root)) out.sqrt_det_ = root;
    return out;
}

GramData GramData::from_pairing(const DenseMatrix& pair1, Coframe frame, int ext_d) {
    GramData out;
    out.pair1_ = pair1;
    out.frame_ = frame;
    out.ext_ = ext_d;
    out.diagonal_ = true;
    for (int i = 0; i < pair1.rows(); ++i)
        for (int j = 0; j < pair1.cols(); ++j)
            if (i != j && !pair1(i, j).is_zero()) out.diagonal_ = false;
    return out;
}

Scalar GramData::pairing(Mask i, Mask j) const {
    if (popcount(i) != popcount(j)) return Scalar(0);
    if (diagonal_) {
        if (i != j) return Scalar(0);
        Scalar p(1);
        for (int t = 0; i >> t; ++t)
            if (i >> t & 1) p *= pair1_(t, t);
        return p;
    }
    const int k = popcount(i);
    std::vector<int> ri, cj;
    for (int t = 0; t < dim(); ++t) {
        if (i >> t & 1) ri.push_back(t);
        if (j >> t & 1) cj.push_back(t);
    }
    DenseMatrix minor(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) minor(r, c) = pair1_(ri[r], cj[c]);
    return determinant(minor);
}

Scalar inner_product(const Form& a, const Form& b, const GramData& gram) {
    if (a.dim() != b.dim() || a.dim() != gram.dim()) throw std::invalid_argument("form dimension mismatch");
    if (a.coframe() != b.coframe() || a.coframe() != gram.coframe())
        throw std::invalid_argument("pairing across coframes");
    Scalar s;
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            Scalar p = gram.pairing(ma, mb);
            if (!p.is_zero()) s += ca * cb.conj() * p;
        }
    }
    return s;
}

Vector sharp(const Form& alpha, const GramData& gram) {
    if (gram.coframe() != Coframe::real || alpha.coframe() != Coframe::real)
        throw std::invalid_argument("sharp is defined on the real coframe");
    auto deg = alpha.degree();
    if (!alpha.is_zero() && deg != 1) throw std::invalid_argument("sharp needs a 1-form");
    const int n = gram.dim();
    Vector v = Vector::Constant(n, Scalar(0));
    for (const auto& [m, c] : alpha.terms()) {
        int j = __builtin_ctz(m);
        for (int i = 0; i < n; ++i)
            if (!gram.pairing_matrix()(i, j).is_zero()) v[i] += gram.pairing_matrix()(i, j) * c;
    }
    return v;
}

Form contract_form(const Form& alpha, const Form& a, const GramData& gram) {
    return contract(sharp(alpha, gram), a);
}

Form volume_form(const GramData& gram) {
    if (!gram.sqrt_det()) throw std::domain_error("star unavailable: det g is not a square in the field");
    const int n = gram.dim();
    return Form::monomial(n, (Mask(1) << n) - 1, *gram.sqrt_det());
}

Form hodge_star(const Form& a, const GramData& gram) {
    if (gram.coframe() != Coframe::real) throw std::invalid_argument("hodge_star works in the real coframe");
    if (!gram.sqrt_det()) throw std::domain_error("star unavailable: det g is not a square in the field");
    if (a.dim() != gram.dim()) throw std::invalid_argument("form dimension mismatch");
    const int n = gram.dim();
    const Mask full = (Mask(1) << n) - 1;
    auto basis = make_basis(n);
    Form out(n);
    for (int k = 0; k <= n; ++k) {
        Form part = a.component(k);
        if (part.is_zero()) continue;
        for (int p = basis->offset(k); p < basis->offset(k + 1); ++p) {
            Mask i = basis->mask(p);
            Scalar c;
            for (const auto& [j, bj] : part.terms()) {
                Scalar g = gram.pairing(i, j);
                if (!g.is_zero()) c += g * bj;
            }
            if (c.is_zero()) continue;
            c *= *gram.sqrt_det();
            out.add_term(full & ~i, wedge_sign(i, full & ~i) > 0 ? c : -c);
        }
    }
    return out;
}

}  // namespace nkh
