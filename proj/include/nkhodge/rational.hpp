#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace nkh {

// Exact rational. Stays in a pair of int64 words while everything fits and
// falls back to a heap mpq_class on overflow; results demote back when they
// fit again, so equal values always have equal representations.
class Rational {
public:
    Rational() noexcept : num_(0), den_(1) {}
    Rational(int v) : Rational(static_cast<std::int64_t>(v)) {}
    Rational(long v) : Rational(static_cast<std::int64_t>(v), 1) {}
    Rational(long long v) : Rational(static_cast<std::int64_t>(v), 1) {}
    Rational(std::int64_t num, std::int64_t den);
    explicit Rational(const mpq_class& q);

    Rational(const Rational& o);
    Rational(Rational&& o) noexcept;
    Rational& operator=(const Rational& o);
    Rational& operator=(Rational&& o) noexcept;
    ~Rational() { release(); }

    bool is_zero() const noexcept { return !big() && num_ == 0; }
    bool is_one() const noexcept { return !big() && num_ == 1 && den_ == 1; }
    bool is_integer() const;
    int sign() const;
    bool is_small() const noexcept { return !big(); }

    mpq_class to_mpq() const;
    mpz_class numerator() const;
    mpz_class denominator() const;
    double to_double() const;
    // Bits of |num| plus bits of den; the pivot heuristic's cost.
    std::size_t bit_size() const;
    std::size_t hash() const;

    // Canonical text: "0", "-3", "5/7". parse() accepts only that form.
    std::string str() const;
    static Rational parse(std::string_view s);
    static bool try_parse(std::string_view s, Rational& out);

    Rational operator-() const;
    Rational inverse() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b);
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend int compare(const Rational& a, const Rational& b);
    friend bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

private:
    // den_ == 0 marks the big representation.  Small invariant: den_ > 0,
    // gcd(|num_|, den_) == 1 and num_ != INT64_MIN.
    bool big() const noexcept { return den_ == 0; }
    void release() noexcept;
    void assign_mpq(const mpq_class& q);
    static Rational from_i128(__int128 num, __int128 den);

    union {
        std::int64_t num_;
        mpq_class* q_;
    };
    std::int64_t den_;
};

}  // namespace nkh
