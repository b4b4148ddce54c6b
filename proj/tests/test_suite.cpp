#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nkhodge/identity_suite.hpp"

using namespace nkh;

namespace {

ModelContext& context(const std::string& name) {
    static std::map<std::string, std::unique_ptr<ModelContext>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto& p = cache[name];
    if (!p) p = std::make_unique<ModelContext>(builtin_model(name));
    return *p;
}

long binom(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

const CheckInfo& info(const std::string& id) {
    for (const auto& c : check_catalogue())
        if (c.id == id) return c;
    throw std::logic_error(id);
}

}  // namespace

TEST_SUITE("suite") {

TEST_CASE("catalogue is sorted and complete") {
    const auto& cat = check_catalogue();
    CHECK(cat.size() == 30);
    for (std::size_t i = 1; i < cat.size(); ++i) CHECK(cat[i - 1].id < cat[i].id);
    CHECK(is_check_id("NK_MAIN"));
    CHECK_FALSE(is_check_id("NK_MAINS"));
    CHECK_THROWS_AS(run_check(context("torus6"), "NOPE"), UnknownCheck);
}

TEST_CASE("single checks") {
    CheckResult nk = run_check(context("s3xs3-nk"), "NK_MAIN");
    CHECK(nk.status == Status::pass);
    CHECK(nk.exact_zero);
    CHECK(nk.residual == 0.0);
    CheckResult ds = run_check(context("torus6"), "DELTA_SUM");
    CHECK(ds.status == Status::pass);
    CheckResult kt = run_check(context("kodaira-thurston"), "NK_MAIN");
    CHECK(kt.status == Status::fail);
    CHECK_FALSE(kt.exact_zero);
    CHECK(kt.residual > 0);
    REQUIRE(kt.witness.has_value());
    CHECK(kt.witness->find("[d*,L]") != std::string::npos);
    CheckResult skip = run_check(context("torus6"), "DIM6_EIGEN");
    CHECK(skip.status == Status::skip);
    CHECK_FALSE(skip.skip_reason.empty());
}

TEST_CASE("suite verdicts") {
    Report s = run_suite(context("s3xs3-nk"), {});
    CHECK(s.verdict());
    CHECK(s.checks.size() == check_catalogue().size());
    for (const auto& c : s.checks) {
        CHECK(c.expected == Expect::pass);
        if (info(c.id).guard == Guard::kahler) {
            CHECK_MESSAGE(c.status == Status::skip, c.id);
        } else {
            CHECK_MESSAGE(c.status == Status::pass, c.id);
        }
    }
    for (std::size_t i = 1; i < s.checks.size(); ++i) CHECK(s.checks[i - 1].id < s.checks[i].id);

    Report t = run_suite(context("torus6"), {});
    CHECK(t.verdict());
    for (const auto& c : t.checks) {
        if (info(c.id).guard == Guard::strict_nk6) {
            CHECK_MESSAGE(c.status == Status::skip, c.id);
        } else {
            CHECK_MESSAGE(c.status == Status::pass, c.id);
        }
    }

    // Negative control, explicitly declared.
    std::set<std::string> nk_only;
    for (const auto& c : check_catalogue())
        if (c.guard == Guard::nearly_kahler && c.id != "AUX_COM" && c.id != "BR67") nk_only.insert(c.id);
    SuiteOptions opts;
    opts.expected_failures = nk_only;
    Report k = run_suite(context("kodaira-thurston"), opts);
    CHECK(k.verdict());
    for (const auto& c : k.checks) {
        if (info(c.id).guard == Guard::universal) CHECK_MESSAGE(c.status == Status::pass, c.id);
        if (nk_only.count(c.id)) CHECK_MESSAGE(c.status == Status::fail, c.id);
    }
    CHECK(declared_failures(builtin_model("kodaira-thurston")) == nk_only);
    CHECK(run_suite(context("kodaira-thurston"), {}).verdict());

    // Declaring nothing makes every failure a mismatch.
    opts.expected_failures = std::set<std::string>{};
    CHECK_FALSE(run_suite(context("kodaira-thurston"), opts).verdict());
    // Declaring a passing check as failing is also a mismatch.
    opts.expected_failures = std::set<std::string>{"SL2"};
    opts.checks = std::vector<std::string>{"SL2"};
    CHECK_FALSE(run_suite(context("torus6"), opts).verdict());
}

TEST_CASE("selection and thread count do not change results") {
    SuiteOptions one;
    one.checks = std::vector<std::string>{"SL2", "DELTA_SUM"};
    one.threads = 1;
    Report a = run_suite(context("torus6"), one);
    REQUIRE(a.checks.size() == 2);
    CHECK(a.checks[0].id == "DELTA_SUM");
    CHECK(a.checks[1].id == "SL2");
    SuiteOptions many = one;
    many.threads = 4;
    many.checks = std::vector<std::string>{"SL2", "DELTA_SUM", "SL2"};
    Report b = run_suite(context("torus6"), many);
    REQUIRE(b.checks.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(a.checks[i].id == b.checks[i].id);
        CHECK(a.checks[i].status == b.checks[i].status);
    }
    SuiteOptions bad;
    bad.checks = std::vector<std::string>{"SL2", "XYZ"};
    CHECK_THROWS_AS(run_suite(context("torus6"), bad), UnknownCheck);
}

TEST_CASE("flags are recomputed, not trusted") {
    LieAlgebraModel m = builtin_model("s3xs3-nk");
    m.expected.kahler = true;
    ModelContext ctx(m);
    SuiteOptions o;
    o.checks = std::vector<std::string>{"SL2"};
    Report r = run_suite(ctx, o);
    CHECK_FALSE(r.flags_consistent());
    CHECK_FALSE(r.verdict());
}

TEST_CASE("the com-lw-4 statement holds with L_{mubar omega}, not as printed") {
    ModelContext& c = context("s3xs3-nk");
    GradedOperator rhs = Scalar::i() * Scalar(Rational(-1, 3)) *
                         graded_commutator(c.laplacian(ModelContext::Lap::L_mu) + c.laplacian(ModelContext::Lap::L_mubar), c.L);
    GradedOperator printed = graded_commutator(c.Lambda, graded_commutator(c.mu, c.L_mu));
    GradedOperator corrected = graded_commutator(c.Lambda, graded_commutator(c.mu, c.L_mubar));
    CHECK(printed.is_zero());  // [mu, L_{mu omega}] = 0
    CHECK_FALSE(rhs.is_zero());
    CHECK(printed != rhs);
    CHECK(corrected == rhs);
}

TEST_CASE("harmonic spaces") {
    ModelContext& t = context("torus6");
    for (int k = 0; k <= 6; ++k) CHECK(harmonic_space(t, k).size() == static_cast<std::size_t>(binom(6, k)));
    ModelContext& s = context("s3xs3-nk");
    CHECK(harmonic_space(s, 3).size() == 2);
    CHECK(harmonic_pq(s, 3, 0).empty());
    Form mubar_theta = s.mubar.apply(s.mu.apply(s.omega_pq));
    CHECK_FALSE(mubar_theta.is_zero());
    const GradedOperator& lap = s.laplacian(ModelContext::Lap::d);
    for (const Form& h : harmonic_space(s, 3)) CHECK(lap.apply(h).is_zero());
}

TEST_CASE("Hodge numbers") {
    HodgeReport t = hodge_numbers(context("torus6"));
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) CHECK(t.h[p][q] == binom(3, p) * binom(3, q));
    HodgeReport s = hodge_numbers(context("s3xs3-nk"));
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            bool one = (p == q && (p == 0 || p == 3)) || (p == 1 && q == 2) || (p == 2 && q == 1);
            CHECK_MESSAGE(s.h[p][q] == (one ? 1 : 0), p << "," << q);
        }
    CHECK(s.betti == std::vector<int>{1, 0, 0, 2, 0, 0, 1});
    CHECK(s.sum_rule);
    CHECK(s.conjugate_symmetric);
    CHECK(s.poincare);
    REQUIRE(s.nk6_pattern.has_value());
    CHECK(*s.nk6_pattern);
    CHECK_THROWS_AS(hodge_numbers(context("kodaira-thurston")), NotNearlyKahler);
}

TEST_CASE("sparse fraction-free kernel agrees with dense elimination") {
    std::mt19937 rng(21);
    for (int t = 0; t < 60; ++t) {
        int rows = 1 + static_cast<int>(rng() % 8), cols = 1 + static_cast<int>(rng() % 9);
        int d = (t % 3 == 0) ? 3 : 1;
        DenseMatrix a = DenseMatrix::Constant(rows, cols, Scalar(0));
        std::vector<Triplet> trips;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                if (rng() % 3) continue;
                Scalar v(Rational(static_cast<int>(rng() % 9) - 4, static_cast<int>(rng() % 3) + 1),
                         Rational(d == 3 ? static_cast<int>(rng() % 3) - 1 : 0), Rational(static_cast<int>(rng() % 3) - 1),
                         Rational(), d);
                if (v.is_zero()) continue;
                a(r, c) = v;
                trips.emplace_back(r, c, v);
            }
        // A dependent row exercises rank deficiency.
        if (rows > 1 && rng() % 2) {
            for (int c = 0; c < cols; ++c) {
                Scalar v = a(0, c) * Scalar(2) - a(1, c);
                a(rows - 1, c) = v;
            }
            trips.erase(std::remove_if(trips.begin(), trips.end(), [&](const Triplet& x) { return x.row() == rows - 1; }),
                        trips.end());
            for (int c = 0; c < cols; ++c)
                if (!a(rows - 1, c).is_zero()) trips.emplace_back(rows - 1, c, a(rows - 1, c));
        }
        SparseMatrix sm(rows, cols);
        sm.setFromTriplets(trips.begin(), trips.end());
        std::vector<int> domain(cols);
        std::iota(domain.begin(), domain.end(), 0);
        auto sk = sparse_kernel({&sm}, domain);
        auto dk = dense_kernel(a);
        CHECK(sk.size() == dk.size());
        CHECK(same_span(sk, dk, cols));
        CHECK(static_cast<int>(sk.size()) + dense_rank(a) == cols);
        for (const auto& v : sk) {
            Vector x = Vector::Constant(cols, Scalar(0));
            for (const auto& [i, s] : v) x[i] = s;
            Vector y = a * x;
            for (int r = 0; r < rows; ++r) CHECK(y[r].is_zero());
        }
    }
}

TEST_CASE("primitive scaling and span comparison") {
    SparseVector v = {{0, Scalar(Rational(2, 3))}, {2, Scalar(Rational(4, 9))}};
    make_primitive(v);
    CHECK(v[0].second == Scalar(3));
    CHECK(v[1].second == Scalar(2));
    std::vector<SparseVector> a = {{{0, Scalar(1)}}, {{1, Scalar(1)}}};
    std::vector<SparseVector> b = {{{0, Scalar(1)}, {1, Scalar(1)}}, {{0, Scalar(1)}, {1, Scalar(-1)}}};
    std::vector<SparseVector> c = {{{0, Scalar(1)}}, {{2, Scalar(1)}}};
    CHECK(same_span(a, b, 3));
    CHECK_FALSE(same_span(a, c, 3));
    CHECK_FALSE(same_span(a, {{{0, Scalar(1)}}}, 3));
}

}  // TEST_SUITE
