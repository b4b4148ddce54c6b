#include <array>
#include <cstdint>
#include <random>

#include "doctest.h"
#include "nkhodge/scalar.hpp"

using nkh::Rational;
using nkh::Scalar;

namespace {

mpq_class mpq(std::int64_t n, std::int64_t d) {
    mpq_class q(mpz_class(std::to_string(n)), mpz_class(std::to_string(d)));
    q.canonicalize();
    return q;
}

std::int64_t pick(std::mt19937_64& rng) {
    // Mix of tiny, medium and near-overflow magnitudes.
    switch (rng() % 4) {
    case 0: return static_cast<std::int64_t>(rng() % 7) - 3;
    case 1: return static_cast<std::int64_t>(rng() % 2001) - 1000;
    case 2: return static_cast<std::int64_t>(rng() >> 2) * (rng() & 1 ? 1 : -1);
    default: return INT64_MAX - static_cast<std::int64_t>(rng() % 5);
    }
}

std::int64_t pick_den(std::mt19937_64& rng) {
    std::int64_t d = pick(rng);
    if (d == 0) d = 1;
    if (d == INT64_MIN) d = INT64_MAX;
    return d < 0 ? -d : d;
}

// Independent model of (a + b w) + i (c + e w) on mpq tuples.
using Quad = std::array<mpq_class, 4>;

Quad quad_mul(const Quad& x, const Quad& y, int d) {
    // (p + i q)(r + i s) with p = a+bw, q = c+ew.
    auto re = [&](const mpq_class& a1, const mpq_class& b1, const mpq_class& a2, const mpq_class& b2) {
        return std::array<mpq_class, 2>{a1 * a2 + d * b1 * b2, a1 * b2 + b1 * a2};
    };
    auto pr = re(x[0], x[1], y[0], y[1]);
    auto qs = re(x[2], x[3], y[2], y[3]);
    auto ps = re(x[0], x[1], y[2], y[3]);
    auto qr = re(x[2], x[3], y[0], y[1]);
    return {pr[0] - qs[0], pr[1] - qs[1], ps[0] + qr[0], ps[1] + qr[1]};
}

Quad to_quad(const Scalar& s) { return {s.a().to_mpq(), s.b().to_mpq(), s.c().to_mpq(), s.e().to_mpq()}; }

Scalar random_scalar(std::mt19937_64& rng, int d) {
    auto r = [&] {
        if (rng() % 3 == 0) return Rational();
        return Rational(static_cast<std::int64_t>(rng() % 41) - 20, static_cast<std::int64_t>(rng() % 9) + 1);
    };
    return Scalar(r(), r(), r(), r(), d);
}

}  // namespace

TEST_SUITE("scalar") {

TEST_CASE("rational arithmetic agrees with mpq, including overflow into the big representation") {
    std::mt19937_64 rng(12345);
    for (int t = 0; t < 4000; ++t) {
        std::int64_t an = pick(rng), ad = pick_den(rng), bn = pick(rng), bd = pick_den(rng);
        Rational a(an, ad), b(bn, bd);
        mpq_class qa = mpq(an, ad), qb = mpq(bn, bd);
        REQUIRE(a.to_mpq() == qa);
        CHECK((a + b).to_mpq() == qa + qb);
        CHECK((a - b).to_mpq() == qa - qb);
        CHECK((a * b).to_mpq() == qa * qb);
        if (!b.is_zero()) CHECK((a / b).to_mpq() == qa / qb);
        CHECK((a == b) == (qa == qb));
        CHECK((a < b) == (qa < qb));
        CHECK(a.sign() == sgn(qa));
    }
}

TEST_CASE("results that fit again demote to the small representation") {
    Rational big(INT64_MAX, 1);
    Rational sq = big * big;
    CHECK_FALSE(sq.is_small());
    Rational back = sq / big;
    CHECK(back.is_small());
    CHECK(back == big);
    CHECK((sq - sq).is_zero());
    CHECK((sq - sq).is_small());
}

TEST_CASE("rational literals are canonical") {
    CHECK(Rational::parse("0") == Rational());
    CHECK(Rational::parse("-3") == Rational(-3));
    CHECK(Rational::parse("5/7") == Rational(5, 7));
    CHECK(Rational(10, -4).str() == "-5/2");
    Rational out;
    for (const char* bad : {"", "-0", "+1", "01", "2/4", "1/1", "3/0", "1/-2", "-1/-2", " 1", "1 ", "1.5", "0/3", "1/01"})
        CHECK_MESSAGE(!Rational::try_parse(bad, out), bad);
    Rational huge = Rational::parse("123456789012345678901234567891/2");
    CHECK_FALSE(huge.is_small());
    CHECK(huge.str() == "123456789012345678901234567891/2");
}

TEST_CASE("scalar multiplication matches an independent tuple model") {
    std::mt19937_64 rng(7);
    for (int d : {1, 2, 3}) {
        for (int t = 0; t < 500; ++t) {
            Scalar x = random_scalar(rng, d), y = random_scalar(rng, d);
            Quad expect = quad_mul(to_quad(x), to_quad(y), d);
            CHECK(to_quad(x * y) == expect);
            Quad sum = to_quad(x);
            Quad qy = to_quad(y);
            for (int k = 0; k < 4; ++k) sum[k] += qy[k];
            CHECK(to_quad(x + y) == sum);
            if (!y.is_zero()) {
                CHECK((x / y) * y == x);
                CHECK((y * y.inverse()).is_one());
            }
        }
    }
}

TEST_CASE("field axioms and conjugations") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 300; ++t) {
        Scalar x = random_scalar(rng, 3), y = random_scalar(rng, 3), z = random_scalar(rng, 3);
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK((x * y).conj() == x.conj() * y.conj());
        CHECK((x * y).galois() == x.galois() * y.galois());
        CHECK((x * x.conj()).is_real());
        CHECK(x.conj().conj() == x);
    }
    Scalar w = Scalar::sqrt_d(3);
    CHECK(w * w == Scalar(3));
    CHECK(Scalar::i() * Scalar::i() == Scalar(-1));
    CHECK((Scalar::i() * w).conj() == -(Scalar::i() * w));
}

TEST_CASE("mixing different extensions is refused") {
    CHECK_THROWS(Scalar::sqrt_d(2) + Scalar::sqrt_d(3));
    CHECK(Scalar::sqrt_d(2) + Scalar(1) == Scalar(Rational(1), Rational(1), Rational(), Rational(), 2));
}

TEST_CASE("scalar literals round-trip and reject non-canonical text") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        Scalar x = random_scalar(rng, 3);
        std::string s = x.str();
        CHECK_MESSAGE(Scalar::parse(s, 3) == x, s);
        CHECK(Scalar::parse(s, 3).str() == s);
    }
    CHECK(Scalar::parse("1/2+1/3*w", 3) == Scalar(Rational(1, 2), Rational(1, 3), Rational(), Rational(), 3));
    CHECK(Scalar::parse("(1)*I", 3) == Scalar::i());
    CHECK(Scalar::parse("-1/2*w", 3) == Scalar::sqrt_d(3) * Scalar::rational(-1, 2));
    for (const char* bad : {"1/2 + 1/3*w", "0*w", "1+0*w", "(0)*I", "1+(0)*I", "2/4", "1*I", "w", "1*w+1", "1+-1*w",
                            "(1)*I+1", "1++1*w", ""})
        CHECK_THROWS_MESSAGE(Scalar::parse(bad, 3), bad);
}

TEST_CASE("exact square roots in the real extension") {
    Scalar root;
    CHECK(nkh::real_sqrt(Scalar(Rational(9, 4)), 3, root));
    CHECK(root * root == Scalar(Rational(9, 4)));
    CHECK(nkh::real_sqrt(Scalar(3), 3, root));
    CHECK(root * root == Scalar(3));
    CHECK_FALSE(nkh::real_sqrt(Scalar(2), 3, root));
}

}  // TEST_SUITE
