#include "nkhodge/scalar.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nkh {

namespace {

// (p + q w)(r + s w) in Q(w), w^2 = d.
inline void qmul(const Rational& p, const Rational& q, const Rational& r, const Rational& s, int d,
                 Rational& out0, Rational& out1) {
    if (q.is_zero() && s.is_zero()) {
        out0 = p * r;
        out1 = Rational();
        return;
    }
    Rational qs = q * s;
    out0 = p * r + (d == 1 ? qs : qs * Rational(d));
    out1 = p * s + q * r;
}

int quad_sign(const Rational& a, const Rational& b, int d) {
    int sa = a.sign(), sb = b.sign();
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // Opposite signs: compare a^2 with d b^2.
    int c = compare(a * a, b * b * Rational(d));
    if (c == 0) return 0;  // only possible for non-squarefree d
    return c > 0 ? sa : sb;
}

bool rational_sqrt(const Rational& x, Rational& root) {
    if (x.sign() < 0) return false;
    if (x.is_zero()) {
        root = Rational();
        return true;
    }
    mpz_class n = x.numerator(), m = x.denominator();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(m.get_mpz_t())) return false;
    mpz_class rn, rm;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rm.get_mpz_t(), m.get_mpz_t());
    root = Rational(mpq_class(rn, rm));
    return true;
}

std::string quad_str(const Rational& p, const Rational& q) {
    if (q.is_zero()) return p.str();
    if (p.is_zero()) return q.str() + "*w";
    std::string out = p.str();
    out += q.sign() > 0 ? "+" : "-";
    out += (q.sign() > 0 ? q : -q).str();
    out += "*w";
    return out;
}

bool parse_quad(std::string_view s, Rational& p, Rational& q) {
    const std::string_view suffix = "*w";
    if (s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
        std::string_view body = s.substr(0, s.size() - suffix.size());
        auto pos = body.find_first_of("+-", 1);
        if (pos == std::string_view::npos) {
            p = Rational();
            return Rational::try_parse(body, q);
        }
        if (!Rational::try_parse(body.substr(0, pos), p)) return false;
        if (!Rational::try_parse(body.substr(pos + 1), q)) return false;
        if (body[pos] == '-') q = -q;
        return true;
    }
    q = Rational();
    return Rational::try_parse(s, p);
}

}  // namespace

Scalar::Scalar(Rational a, Rational b, Rational c, Rational e, int d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), e_(std::move(e)), d_(d) {
    if (d < 1) throw std::invalid_argument("extension parameter must be positive");
    if (d == 1) {  // w = 1
        a_ += b_;
        c_ += e_;
        b_ = Rational();
        e_ = Rational();
    }
    normalize_ext();
}

Scalar Scalar::sqrt_d(int d) {
    if (d <= 1) throw std::invalid_argument("sqrt_d needs d > 1");
    return Scalar(Rational(), Rational(1), Rational(), Rational(), d);
}

Scalar Scalar::i() { return Scalar(Rational(), Rational(), Rational(1), Rational(), 1); }

int Scalar::merge_ext(const Scalar& x, const Scalar& y) {
    if (x.d_ == y.d_) return x.d_;
    if (x.d_ == 1) return y.d_;
    if (y.d_ == 1) return x.d_;
    throw std::domain_error("scalars from different quadratic extensions");
}

Scalar Scalar::conj() const {
    Scalar r = *this;
    r.c_ = -c_;
    r.e_ = -e_;
    return r;
}

Scalar Scalar::galois() const {
    Scalar r = *this;
    r.b_ = -b_;
    r.e_ = -e_;
    return r;
}

Scalar Scalar::operator-() const {
    Scalar r;
    r.a_ = -a_;
    r.b_ = -b_;
    r.c_ = -c_;
    r.e_ = -e_;
    r.d_ = d_;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& y) {
    d_ = merge_ext(*this, y);
    a_ += y.a_;
    if (!y.b_.is_zero()) b_ += y.b_;
    if (!y.c_.is_zero()) c_ += y.c_;
    if (!y.e_.is_zero()) e_ += y.e_;
    normalize_ext();
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& y) {
    d_ = merge_ext(*this, y);
    a_ -= y.a_;
    if (!y.b_.is_zero()) b_ -= y.b_;
    if (!y.c_.is_zero()) c_ -= y.c_;
    if (!y.e_.is_zero()) e_ -= y.e_;
    normalize_ext();
    return *this;
}

Scalar operator+(const Scalar& x, const Scalar& y) {
    Scalar r = x;
    r += y;
    return r;
}

Scalar operator-(const Scalar& x, const Scalar& y) {
    Scalar r = x;
    r -= y;
    return r;
}

Scalar operator*(const Scalar& x, const Scalar& y) {
    Scalar r;
    if (x.is_zero() || y.is_zero()) return r;
    int d = Scalar::merge_ext(x, y);
    if (x.is_real() && y.is_real()) {
        qmul(x.a_, x.b_, y.a_, y.b_, d, r.a_, r.b_);
    } else {
        Rational p0, p1, q0, q1, s0, s1, t0, t1;
        qmul(x.a_, x.b_, y.a_, y.b_, d, p0, p1);  // xr*yr
        qmul(x.c_, x.e_, y.c_, y.e_, d, q0, q1);  // xi*yi
        qmul(x.a_, x.b_, y.c_, y.e_, d, s0, s1);  // xr*yi
        qmul(x.c_, x.e_, y.a_, y.b_, d, t0, t1);  // xi*yr
        r.a_ = p0 - q0;
        r.b_ = p1 - q1;
        r.c_ = s0 + t0;
        r.e_ = s1 + t1;
    }
    r.d_ = d;
    r.normalize_ext();
    return r;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero");
    if (is_rational()) return Scalar(a_.inverse());
    int d = d_;
    // |z|^2 = x^2 + t^2, a real element n0 + n1 w.
    Rational x0, x1, t0, t1;
    qmul(a_, b_, a_, b_, d, x0, x1);
    qmul(c_, e_, c_, e_, d, t0, t1);
    Rational n0 = x0 + t0, n1 = x1 + t1;
    Rational norm = n0 * n0 - n1 * n1 * Rational(d);
    Scalar inv_n(n0 / norm, -n1 / norm, Rational(), Rational(), d);
    return conj() * inv_n;
}

bool operator==(const Scalar& x, const Scalar& y) {
    if (!(x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.e_ == y.e_)) return false;
    return x.d_ == y.d_ || (x.b_.is_zero() && x.e_.is_zero());
}

int Scalar::real_sign() const {
    if (!is_real()) throw std::domain_error("sign of a non-real scalar");
    return quad_sign(a_, b_, d_);
}

double Scalar::real_approx() const {
    double w = std::sqrt(static_cast<double>(d_));
    return a_.to_double() + b_.to_double() * w;
}

double Scalar::imag_approx() const {
    double w = std::sqrt(static_cast<double>(d_));
    return c_.to_double() + e_.to_double() * w;
}

double Scalar::abs_approx() const { return std::hypot(real_approx(), imag_approx()); }

std::size_t Scalar::bit_size() const {
    std::size_t s = a_.bit_size();
    if (!b_.is_zero()) s += b_.bit_size();
    if (!c_.is_zero()) s += c_.bit_size();
    if (!e_.is_zero()) s += e_.bit_size();
    return s;
}

std::size_t Scalar::hash() const {
    std::size_t h = a_.hash();
    for (const Rational* r : {&b_, &c_, &e_}) h = h * 1000003u ^ r->hash();
    return h;
}

std::string Scalar::str() const {
    bool re0 = a_.is_zero() && b_.is_zero();
    if (is_real()) return quad_str(a_, b_);
    std::string im = "(" + quad_str(c_, e_) + ")*I";
    if (re0) return im;
    return quad_str(a_, b_) + "+" + im;
}

Scalar Scalar::parse(std::string_view s, int d) {
    auto fail = [&]() -> Scalar {
        throw std::invalid_argument("malformed or non-canonical scalar literal '" + std::string(s) + "'");
    };
    Rational a, b, c, e;
    const std::string_view isuf = ")*I";
    if (s.size() > isuf.size() && s.substr(s.size() - isuf.size()) == isuf) {
        auto open = s.find('(');
        if (open == std::string_view::npos) return fail();
        std::string_view im = s.substr(open + 1, s.size() - isuf.size() - open - 1);
        if (!parse_quad(im, c, e)) return fail();
        if (open > 0) {
            if (open < 2 || s[open - 1] != '+') return fail();
            if (!parse_quad(s.substr(0, open - 1), a, b)) return fail();
        }
    } else if (!parse_quad(s, a, b)) {
        return fail();
    }
    if (d == 1 && (!b.is_zero() || !e.is_zero())) return fail();
    Scalar out(a, b, c, e, d);
    if (out.str() != s) return fail();
    return out;
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

bool real_sqrt(const Scalar& x, int d, Scalar& root) {
    if (!x.is_real()) return false;
    if (x.is_zero()) {
        root = Scalar();
        return true;
    }
    if (x.real_sign() < 0) return false;
    Rational r;
    if (x.b().is_zero()) {
        if (rational_sqrt(x.a(), r)) {
            root = Scalar(r);
            return true;
        }
        if (d > 1 && rational_sqrt(x.a() / Rational(d), r)) {
            root = Scalar(Rational(), r, Rational(), Rational(), d);
            return true;
        }
        return false;
    }
    // (s + t w)^2 = a + b w: s^2 + d t^2 = a, 2 s t = b.
    Rational disc;
    if (!rational_sqrt(x.a() * x.a() - x.b() * x.b() * Rational(d), disc)) return false;
    for (const Rational& s2 : {(x.a() + disc) / Rational(2), (x.a() - disc) / Rational(2)}) {
        Rational s;
        if (s2.is_zero() || !rational_sqrt(s2, s)) continue;
        Rational t = x.b() / (Rational(2) * s);
        Scalar cand(s, t, Rational(), Rational(), d);
        if (cand.real_sign() < 0) cand = -cand;
        if (cand * cand == x) {
            root = cand;
            return true;
        }
    }
    return false;
}

}  // namespace nkh
