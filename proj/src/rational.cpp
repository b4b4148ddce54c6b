#include "nkhodge/rational.hpp"

#include <climits>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace nkh {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

u128 uabs(i128 v) { return v < 0 ? u128(0) - u128(v) : u128(v); }

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        if ((a >> 64) == 0 && (b >> 64) == 0) {
            return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
        }
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits_small(i128 v) { return v > i128(INT64_MIN) && v <= i128(INT64_MAX); }

mpz_class mpz_from_i128(i128 v) {
    bool neg = v < 0;
    u128 u = uabs(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(0), den_(1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    *this = from_i128(num, den);
}

Rational::Rational(const mpq_class& q) : num_(0), den_(1) { assign_mpq(q); }

Rational::Rational(const Rational& o) : num_(0), den_(1) {
    if (o.big()) {
        q_ = new mpq_class(*o.q_);
        den_ = 0;
    } else {
        num_ = o.num_;
        den_ = o.den_;
    }
}

Rational::Rational(Rational&& o) noexcept : num_(o.num_), den_(o.den_) {
    if (o.big()) {
        q_ = o.q_;
        o.num_ = 0;
        o.den_ = 1;
    }
}

Rational& Rational::operator=(const Rational& o) {
    if (this == &o) return *this;
    if (o.big()) {
        if (big()) {
            *q_ = *o.q_;
        } else {
            q_ = new mpq_class(*o.q_);
            den_ = 0;
        }
    } else {
        release();
        num_ = o.num_;
        den_ = o.den_;
    }
    return *this;
}

Rational& Rational::operator=(Rational&& o) noexcept {
    if (this == &o) return *this;
    release();
    if (o.big()) {
        q_ = o.q_;
        den_ = 0;
        o.num_ = 0;
        o.den_ = 1;
    } else {
        num_ = o.num_;
        den_ = o.den_;
    }
    return *this;
}

void Rational::release() noexcept {
    if (big()) {
        delete q_;
        num_ = 0;
        den_ = 1;
    }
}

void Rational::assign_mpq(const mpq_class& q) {
    const mpz_class& n = q.get_num();
    const mpz_class& d = q.get_den();
    if (n.fits_slong_p() && d.fits_slong_p() && n.get_si() != LONG_MIN) {
        release();
        num_ = n.get_si();
        den_ = d.get_si();
        return;
    }
    if (big()) {
        *q_ = q;
    } else {
        q_ = new mpq_class(q);
        den_ = 0;
    }
}

Rational Rational::from_i128(i128 num, i128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Rational r;
    if (num == 0) return r;
    u128 g = gcd128(uabs(num), u128(den));
    if (g != 1) {
        num /= i128(g);
        den /= i128(g);
    }
    if (fits_small(num) && fits_small(den)) {
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }
    mpq_class q(mpz_from_i128(num), mpz_from_i128(den));
    r.assign_mpq(q);
    return r;
}

bool Rational::is_integer() const { return big() ? q_->get_den() == 1 : den_ == 1; }

int Rational::sign() const {
    if (big()) return sgn(*q_);
    return (num_ > 0) - (num_ < 0);
}

mpq_class Rational::to_mpq() const {
    if (big()) return *q_;
    return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

mpz_class Rational::numerator() const {
    return big() ? mpz_class(q_->get_num()) : mpz_class(static_cast<long>(num_));
}

mpz_class Rational::denominator() const {
    return big() ? mpz_class(q_->get_den()) : mpz_class(static_cast<long>(den_));
}

double Rational::to_double() const {
    if (big()) return q_->get_d();
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::size_t Rational::bit_size() const {
    if (big()) {
        return mpz_sizeinbase(q_->get_num_mpz_t(), 2) + mpz_sizeinbase(q_->get_den_mpz_t(), 2);
    }
    auto bits = [](std::uint64_t v) -> std::size_t { return v == 0 ? 1 : 64 - __builtin_clzll(v); };
    std::uint64_t n = num_ < 0 ? std::uint64_t(0) - std::uint64_t(num_) : std::uint64_t(num_);
    return bits(n) + bits(std::uint64_t(den_));
}

std::size_t Rational::hash() const {
    if (!big()) {
        std::size_t h = std::hash<std::int64_t>{}(num_);
        return h ^ (std::hash<std::int64_t>{}(den_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
    return std::hash<std::string>{}(q_->get_str());
}

std::string Rational::str() const {
    if (big()) return q_->get_str();
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

bool Rational::try_parse(std::string_view s, Rational& out) {
    auto digits_ok = [](std::string_view t) {
        if (t.empty()) return false;
        if (t[0] == '0') return false;
        for (char ch : t)
            if (ch < '0' || ch > '9') return false;
        return true;
    };
    if (s == "0") {
        out = Rational();
        return true;
    }
    std::string_view body = s;
    bool neg = false;
    if (!body.empty() && body[0] == '-') {
        neg = true;
        body.remove_prefix(1);
    }
    auto slash = body.find('/');
    std::string_view num = body.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view() : body.substr(slash + 1);
    if (!digits_ok(num)) return false;
    if (slash != std::string_view::npos && !digits_ok(den)) return false;
    mpz_class n(std::string(num), 10);
    mpz_class d = slash == std::string_view::npos ? mpz_class(1) : mpz_class(std::string(den), 10);
    if (slash != std::string_view::npos) {
        if (d == 1) return false;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        if (g != 1) return false;
    }
    if (neg) n = -n;
    out = Rational(mpq_class(n, d));
    return true;
}

Rational Rational::parse(std::string_view s) {
    Rational r;
    if (!try_parse(s, r)) throw std::invalid_argument("non-canonical rational literal '" + std::string(s) + "'");
    return r;
}

Rational Rational::operator-() const {
    Rational r;
    if (big()) {
        r.assign_mpq(mpq_class(-*q_));
    } else {
        r.num_ = -num_;
        r.den_ = den_;
    }
    return r;
}

Rational Rational::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero");
    if (big()) return Rational(mpq_class(1 / *q_));
    return from_i128(den_, num_);
}

Rational operator+(const Rational& a, const Rational& b) {
    if (!a.big() && !b.big()) {
        if (a.num_ == 0) return b;
        if (b.num_ == 0) return a;
        if (a.den_ == 1 && b.den_ == 1) {
            i128 s = i128(a.num_) + i128(b.num_);
            if (fits_small(s)) {
                Rational r;
                r.num_ = static_cast<std::int64_t>(s);
                return r;
            }
            return Rational::from_i128(s, 1);
        }
        if (a.den_ == b.den_) return Rational::from_i128(i128(a.num_) + i128(b.num_), a.den_);
        return Rational::from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    if (!a.big() && !b.big()) {
        if (a.num_ == 0 || b.num_ == 0) return Rational();
        std::int64_t g1 = std::gcd(a.num_, b.den_);
        std::int64_t g2 = std::gcd(b.num_, a.den_);
        i128 n = i128(a.num_ / g1) * (b.num_ / g2);
        i128 d = i128(a.den_ / g2) * (b.den_ / g1);
        if (fits_small(n) && fits_small(d)) {
            Rational r;
            r.num_ = static_cast<std::int64_t>(n);
            r.den_ = static_cast<std::int64_t>(d);
            return r;
        }
        return Rational::from_i128(n, d);
    }
    if (a.is_zero() || b.is_zero()) return Rational();
    return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
}

Rational operator/(const Rational& a, const Rational& b) { return a * b.inverse(); }

bool operator==(const Rational& a, const Rational& b) {
    if (!a.big() && !b.big()) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big() && b.big()) return *a.q_ == *b.q_;
    return false;
}

int compare(const Rational& a, const Rational& b) {
    if (!a.big() && !b.big()) {
        i128 l = i128(a.num_) * b.den_;
        i128 r = i128(b.num_) * a.den_;
        return (l > r) - (l < r);
    }
    return cmp(a.to_mpq(), b.to_mpq());
}

}  // namespace nkh
