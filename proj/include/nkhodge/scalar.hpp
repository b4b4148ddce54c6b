#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "nkhodge/rational.hpp"

namespace nkh {

// (a + b w) + i (c + e w) with w = sqrt(d), d squarefree.  The extension
// tag is pinned only while a w-part is present; combining two scalars that
// both carry w-parts over different d throws.
class Scalar {
public:
    Scalar() = default;
    Scalar(int v) : a_(v) {}
    Scalar(long v) : a_(v) {}
    Scalar(long long v) : a_(v) {}
    Scalar(Rational v) : a_(std::move(v)) {}
    Scalar(Rational a, Rational b, Rational c, Rational e, int d);

    static Scalar sqrt_d(int d);  // w itself
    static Scalar i();
    static Scalar rational(std::int64_t num, std::int64_t den) { return Scalar(Rational(num, den)); }

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    const Rational& c() const { return c_; }
    const Rational& e() const { return e_; }
    int ext() const { return d_; }

    bool is_zero() const { return a_.is_zero() && b_.is_zero() && c_.is_zero() && e_.is_zero(); }
    bool is_one() const { return a_.is_one() && b_.is_zero() && c_.is_zero() && e_.is_zero(); }
    bool is_real() const { return c_.is_zero() && e_.is_zero(); }
    bool is_rational() const { return b_.is_zero() && c_.is_zero() && e_.is_zero(); }

    Scalar real() const { return Scalar(a_, b_, Rational(), Rational(), d_); }
    Scalar imag() const { return Scalar(c_, e_, Rational(), Rational(), d_); }
    Scalar conj() const;
    // Galois conjugate w -> -w.
    Scalar galois() const;
    Scalar inverse() const;

    // Sign of a real scalar; throws on non-real input.
    int real_sign() const;
    double real_approx() const;
    double imag_approx() const;
    double abs_approx() const;
    std::size_t bit_size() const;
    std::size_t hash() const;

    // Canonical literal; see parse().
    std::string str() const;
    // Grammar: rat := "0" | ["-"] nat ["/" nat] in lowest terms;
    // quad := rat | rat "*w" | rat ("+"|"-") |rat| "*w";
    // scalar := quad | "(" quad ")*I" | quad "+(" quad ")*I".
    // Any text that would not be printed back identically is rejected.
    static Scalar parse(std::string_view s, int d);

    Scalar operator-() const;
    friend Scalar operator+(const Scalar& x, const Scalar& y);
    friend Scalar operator-(const Scalar& x, const Scalar& y);
    friend Scalar operator*(const Scalar& x, const Scalar& y);
    friend Scalar operator/(const Scalar& x, const Scalar& y) { return x * y.inverse(); }
    Scalar& operator+=(const Scalar& y);
    Scalar& operator-=(const Scalar& y);
    Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
    Scalar& operator/=(const Scalar& y) { return *this = *this / y; }

    friend bool operator==(const Scalar& x, const Scalar& y);
    friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }

private:
    void normalize_ext() {
        if (b_.is_zero() && e_.is_zero()) d_ = 1;
    }
    static int merge_ext(const Scalar& x, const Scalar& y);

    Rational a_, b_, c_, e_;
    int d_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

// Exact square root inside Q(sqrt d) for a real element, if one exists.
bool real_sqrt(const Scalar& x, int d, Scalar& root);

inline Scalar conj(const Scalar& s) { return s.conj(); }

}  // namespace nkh

namespace Eigen {
template <>
struct NumTraits<nkh::Scalar> : GenericNumTraits<nkh::Scalar> {
    typedef nkh::Scalar Real;
    typedef nkh::Scalar NonInteger;
    typedef nkh::Scalar Literal;
    typedef nkh::Scalar Nested;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 4,
        AddCost = 16,
        MulCost = 32
    };
    static inline Real epsilon() { return nkh::Scalar(0); }
    static inline Real dummy_precision() { return nkh::Scalar(0); }
    static inline int digits10() { return 0; }
};
}  // namespace Eigen
