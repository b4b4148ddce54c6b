#include <random>

#include "doctest.h"
#include "nkhodge/exterior.hpp"

using namespace nkh;

namespace {

constexpr int kDim = 6;

Form e(int i) { return Form::generator(kDim, i - 1); }  // 1-based like the text

Form random_form(std::mt19937& rng, int degree, int terms = 3) {
    Form f(kDim);
    auto basis = make_basis(kDim);
    for (int t = 0; t < terms; ++t) {
        int pos = basis->offset(degree) + static_cast<int>(rng() % basis->count(degree));
        Scalar c(Rational(static_cast<int>(rng() % 11) - 5, static_cast<int>(rng() % 3) + 1), Rational(), Rational(static_cast<int>(rng() % 5) - 2), Rational(), 1);
        f.add_term(basis->mask(pos), c);
    }
    return f;
}

GramData identity_gram(int d = 1) { return GramData::from_metric(DenseMatrix::Identity(kDim, kDim), d); }

GramData skew_gram() {
    DenseMatrix g = DenseMatrix::Identity(kDim, kDim);
    g(0, 1) = g(1, 0) = Scalar(Rational(1, 3));
    g(2, 5) = g(5, 2) = Scalar(Rational(-1, 2));
    g(4, 4) = Scalar(2);
    return GramData::from_metric(g, 1);
}

}  // namespace

TEST_SUITE("exterior") {

TEST_CASE("basis is graded lexicographic") {
    auto b = make_basis(4);
    CHECK(b->size() == 16);
    CHECK(b->mask(0) == 0);
    CHECK(b->mask(1) == 0b0001);
    CHECK(b->mask(4) == 0b1000);
    CHECK(b->mask(5) == 0b0011);  // {1,2}
    CHECK(b->mask(6) == 0b0101);  // {1,3}
    CHECK(b->mask(10) == 0b1100);
    CHECK(b->count(2) == 6);
    for (std::size_t p = 0; p < b->size(); ++p) CHECK(b->position(b->mask(p)) == static_cast<int>(p));
}

TEST_CASE("wedge examples") {
    Form e12 = wedge(e(1), e(2));
    CHECK(e12 == Form::monomial(kDim, 0b11));
    CHECK(wedge(e(1), e(1)).is_zero());
    CHECK(wedge(e(1) + e(2), e(1) - e(2)) == Scalar(-2) * e12);
    CHECK(wedge(e(2), e(1)) == -e12);
    CHECK(e12.degree() == 2);
    CHECK_FALSE((e(1) + e12).degree().has_value());
    CHECK_THROWS(wedge(Form::generator(4, 0), e(1)));
}

TEST_CASE("wedge is associative and graded commutative") {
    std::mt19937 rng(1);
    for (int t = 0; t < 200; ++t) {
        int p = static_cast<int>(rng() % 3), q = static_cast<int>(rng() % 3), r = static_cast<int>(rng() % 3);
        Form a = random_form(rng, p), b = random_form(rng, q), c = random_form(rng, r);
        CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
        CHECK(wedge(a, b) == Scalar((p * q) % 2 ? -1 : 1) * wedge(b, a));
    }
}

TEST_CASE("contraction examples and anti-derivation rule") {
    Form e12 = wedge(e(1), e(2));
    CHECK(contract(0, e12) == e(2));
    CHECK(contract(1, e12) == -e(1));
    CHECK(contract_form(e(1), wedge(e(1), e(3)), identity_gram()) == e(3));
    std::mt19937 rng(2);
    for (int t = 0; t < 200; ++t) {
        int p = 1 + static_cast<int>(rng() % 3), q = static_cast<int>(rng() % 3);
        Form a = random_form(rng, p), b = random_form(rng, q);
        Vector x(kDim);
        for (int i = 0; i < kDim; ++i) x[i] = Scalar(static_cast<int>(rng() % 5) - 2);
        Form lhs = contract(x, wedge(a, b));
        Form rhs = wedge(contract(x, a), b) + Scalar(p % 2 ? -1 : 1) * wedge(a, contract(x, b));
        CHECK(lhs == rhs);
        CHECK(contract(x, contract(x, a)).is_zero());
    }
}

TEST_CASE("inner product examples") {
    GramData g = identity_gram();
    Form e12 = wedge(e(1), e(2));
    CHECK(inner_product(e12, e12, g) == Scalar(1));
    CHECK(inner_product(e(1), e(2), g) == Scalar(0));
    CHECK(inner_product(e(1), e12, g) == Scalar(0));
    // theta^1 = (e^1 + i e^2)/sqrt2 has unit length; needs sqrt2 in the field.
    GramData g2 = identity_gram(2);
    Scalar s = Scalar::sqrt_d(2) * Scalar::rational(1, 2);
    Form theta = s * e(1) + (s * Scalar::i()) * e(2);
    CHECK(inner_product(theta, theta, g2) == Scalar(1));
    CHECK(conjugate(theta) == s * e(1) - (s * Scalar::i()) * e(2));
    CHECK(inner_product(theta, conjugate(theta), g2) == Scalar(0));
}

TEST_CASE("inner product is Hermitian, linear in the first slot, positive on the basis") {
    std::mt19937 rng(3);
    for (const GramData& g : {identity_gram(), skew_gram()}) {
        for (int t = 0; t < 100; ++t) {
            int k = static_cast<int>(rng() % 4);
            Form a = random_form(rng, k), b = random_form(rng, k);
            CHECK(inner_product(a, b, g) == inner_product(b, a, g).conj());
            Scalar z = Scalar::i() + Scalar(2);
            CHECK(inner_product(z * a, b, g) == z * inner_product(a, b, g));
            CHECK(inner_product(a, z * b, g) == z.conj() * inner_product(a, b, g));
        }
        auto basis = make_basis(kDim);
        for (std::size_t p = 0; p < basis->size(); ++p) {
            Form u = Form::monomial(kDim, basis->mask(p));
            Scalar nn = inner_product(u, u, g);
            CHECK(nn.is_real());
            CHECK(nn.real_sign() > 0);
        }
    }
}

TEST_CASE("hodge star") {
    GramData g = identity_gram();
    Form e123 = wedge(wedge(e(1), e(2)), e(3));
    Form e456 = wedge(wedge(e(4), e(5)), e(6));
    CHECK(hodge_star(e123, g) == e456);
    CHECK(hodge_star(Form::constant(kDim, Scalar(1)), g) == volume_form(g));
    CHECK(volume_form(g) == Form::monomial(kDim, 0b111111));
    CHECK(hodge_star(hodge_star(e(1), g), g) == -e(1));
    std::mt19937 rng(4);
    for (const GramData& gg : {identity_gram(), skew_gram()}) {
        if (!gg.sqrt_det()) continue;
        for (int t = 0; t < 60; ++t) {
            int k = static_cast<int>(rng() % 7);
            Form a = random_form(rng, k), b = random_form(rng, k);
            CHECK(wedge(a, hodge_star(conjugate(b), gg)) == inner_product(a, b, gg) * volume_form(gg));
            CHECK(hodge_star(hodge_star(a, gg), gg) == Scalar(k % 2 ? -1 : 1) * a);
        }
    }
    DenseMatrix g2 = DenseMatrix::Identity(kDim, kDim);
    g2(0, 0) = Scalar(2);
    GramData no_root = GramData::from_metric(g2, 1);
    CHECK_FALSE(no_root.sqrt_det().has_value());
    CHECK_THROWS(hodge_star(e(1), no_root));
}

TEST_CASE("conjugation") {
    CHECK(conjugate(Scalar::i() * e(1)) == Scalar(-1) * Scalar::i() * e(1));
    Form real = wedge(e(1), e(3)) + Scalar(Rational(2, 3)) * e(2);
    CHECK(conjugate(real) == real);
    std::mt19937 rng(5);
    for (int t = 0; t < 50; ++t) {
        Form a = random_form(rng, 2);
        CHECK(conjugate(conjugate(a)) == a);
    }
}

TEST_CASE("metric must be symmetric positive definite") {
    DenseMatrix g = DenseMatrix::Identity(kDim, kDim);
    g(0, 0) = Scalar(-1);
    CHECK_THROWS(GramData::from_metric(g, 1));
    g = DenseMatrix::Identity(kDim, kDim);
    g(0, 1) = Scalar(1);
    CHECK_THROWS(GramData::from_metric(g, 1));
}

}  // TEST_SUITE
