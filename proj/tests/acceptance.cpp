// One line per acceptance criterion: "criterion N PASS|FAIL (seconds) detail".
// With an argument, runs only that criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "nkhodge/identity_suite.hpp"

using namespace nkh;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail, failures;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            failures << (pass ? "; failed: " : ", ") << what;
            pass = false;
        }
    }
};

long binom(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

SparseVector to_vector(const Form& f, const ExteriorBasis& b) {
    SparseVector v;
    for (const auto& [m, c] : f.terms()) v.emplace_back(b.position(m), c);
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return v;
}

std::vector<SparseVector> to_vectors(const std::vector<Form>& fs, const ExteriorBasis& b) {
    std::vector<SparseVector> out;
    for (const auto& f : fs) out.push_back(to_vector(f, b));
    return out;
}

std::vector<int> positions(const ExteriorBasis& b, const std::function<bool(Mask)>& keep) {
    std::vector<int> out;
    for (std::size_t p = 0; p < b.size(); ++p)
        if (keep(b.mask(p))) out.push_back(static_cast<int>(p));
    return out;
}

// Kernel of stacked operators on the given domain, in full basis positions.
std::vector<SparseVector> joint_kernel(const std::vector<const GradedOperator*>& ops, const std::vector<int>& domain) {
    std::vector<const SparseMatrix*> blocks;
    for (const auto* p : ops) blocks.push_back(&p->matrix());
    std::vector<SparseVector> k = sparse_kernel(blocks, domain);
    for (auto& v : k)
        for (auto& [i, s] : v) i = domain[i];
    return k;
}

Report run(const ModelContext& ctx, std::vector<std::string> ids, bool deep = false) {
    SuiteOptions o;
    o.checks = std::move(ids);
    o.deep = deep;
    return run_suite(ctx, o);
}

bool all_pass(const Report& r, Outcome& out, const std::string& model) {
    bool ok = true;
    for (const auto& c : r.checks) {
        if (c.status != Status::pass || !c.exact_zero) {
            out.require(false, c.id + " on " + model + (c.witness ? " (" + *c.witness + ")" : ""));
            ok = false;
        }
    }
    return ok;
}

const std::vector<std::string> kUniversal = {"D2_SPLIT",   "SL2",      "J_PQ",         "NIJ_MU",        "BRACKET_PQ",
                                             "MU_ONEFORMS", "ORDER_LB", "ORDER_DSTAR", "ORDER_BRACKET", "ORDER_DET"};

void criterion1(Outcome& out) {
    double small = 0, s3 = 0, big = 0;
    for (const auto& name : builtin_names()) {
        auto t0 = Clock::now();
        ModelContext ctx(builtin_model(name));
        all_pass(run(ctx, kUniversal), out, name);
        double t = seconds_since(t0);
        if (name == "torus6" || name == "kodaira-thurston") small += t;
        else if (name == "s3xs3-nk") s3 = t;
        else big = t;
    }
    out.require(small < 5.0, "torus6 + kodaira-thurston took >= 5 s");
    out.require(s3 < 30.0, "s3xs3-nk took >= 30 s");
    out.detail << "10 universal checks exact on 4 built-ins; torus6+kodaira-thurston " << small << " s, s3xs3-nk " << s3
               << " s, su2-four " << big << " s";
}

void criterion2(Outcome& out) {
    const std::vector<std::string> ids = {"NK_MAIN", "NK_COR", "TORSION_OP", "DC_FRAME", "LEM_NK", "BR67"};
    for (const char* name : {"torus6", "s3xs3-nk", "su2-four"}) {
        ModelContext ctx(builtin_model(name));
        all_pass(run(ctx, ids), out, name);
    }
    ModelContext kt(builtin_model("kodaira-thurston"));
    CheckResult r = run_check(kt, "NK_MAIN");
    out.require(r.status == Status::fail && !r.exact_zero && r.witness, "NK_MAIN on kodaira-thurston did not fail with a witness");
    out.detail << "6 checks exact on torus6, s3xs3-nk, su2-four; kodaira-thurston NK_MAIN fails: "
               << r.witness.value_or("(no witness)");
}

void criterion3(Outcome& out) {
    auto t0 = Clock::now();
    const std::vector<std::string> ids = {"AUX_COM", "LAP_COM", "PROP_LAP", "L_DELTA", "DELTA_SUM"};
    int space_dim = 0;
    for (const char* name : {"torus6", "s3xs3-nk"}) {
        ModelContext ctx(builtin_model(name));
        space_dim = static_cast<int>(ctx.space().basis()->size());
        all_pass(run(ctx, ids), out, name);
    }
    double t = seconds_since(t0);
    out.require(t < 60.0, "took >= 60 s");
    out.detail << "5 checks exact on torus6 and s3xs3-nk (space dim " << space_dim << ") in " << t << " s";
}

void criterion4(Outcome& out) {
    ModelContext ctx(builtin_model("s3xs3-nk"));
    all_pass(run(ctx, {"DIM6_EIGEN"}), out, "s3xs3-nk");
    Scalar l2 = su3_extract(ctx.space()).lambda2;
    const GradedOperator& lmu = ctx.laplacian(ModelContext::Lap::L_mu);
    GradedOperator diff = ctx.laplacian(ModelContext::Lap::del) - ctx.laplacian(ModelContext::Lap::delbar);
    const auto& b = *ctx.space().basis();
    int blocks = 0;
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            Scalar e1 = Scalar(Rational(9, 4)) * l2 * Scalar(1 - p + p * (p - 1) / 2);
            Scalar e2 = Scalar(Rational(1, 4)) * l2 * Scalar((3 - p - q) * (p - q));
            bool ok = true;
            for (int pos : positions(b, [&](Mask m) { return pq_type(m, 3) == Bidegree{p, q}; })) {
                Form a = Form::monomial(6, b.mask(pos), Scalar(1), Coframe::pq);
                ok = ok && lmu.apply(a) == e1 * a && diff.apply(a) == e2 * a;
            }
            if (ok) ++blocks;
            else out.require(false, "block (" + std::to_string(p) + "," + std::to_string(q) + ")");
        }
    out.detail << "lambda^2 = " << l2.str() << "; both scalar formulas exact on " << blocks << "/16 blocks";
}

void criterion5(Outcome& out) {
    ModelContext ctx(builtin_model("s3xs3-nk"));
    all_pass(run(ctx, {"HODGE_ABCD"}), out, "s3xs3-nk");
    const auto& b = *ctx.space().basis();
    const std::vector<const GradedOperator*> pset = {&ctx.mu,   &ctx.del,   &ctx.delbar,   &ctx.mubar,
                                                     &ctx.mu_s, &ctx.del_s, &ctx.delbar_s, &ctx.mubar_s};
    const std::vector<const GradedOperator*> lset = {
        &ctx.laplacian(ModelContext::Lap::mu), &ctx.laplacian(ModelContext::Lap::del),
        &ctx.laplacian(ModelContext::Lap::delbar), &ctx.laplacian(ModelContext::Lap::mubar)};
    for (int k = 0; k <= 6; ++k) {
        auto dom = positions(b, [&](Mask m) { return popcount(m) == k; });
        auto h = to_vectors(harmonic_space(ctx, k), b);
        out.require(same_span(h, joint_kernel(pset, dom), static_cast<int>(b.size())), "ker D_d != cap ker P in degree " + std::to_string(k));
        out.require(same_span(h, joint_kernel(lset, dom), static_cast<int>(b.size())), "ker D_d != cap ker D_P in degree " + std::to_string(k));
    }
    HodgeReport r = hodge_numbers(ctx);
    std::vector<std::vector<int>> expect(4, std::vector<int>(4, 0));
    expect[0][0] = expect[3][3] = expect[2][1] = expect[1][2] = 1;
    out.require(r.h == expect, "h table");
    std::vector<int> sums(7, 0);
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) sums[p + q] += r.h[p][q];
    out.require(sums == std::vector<int>{1, 0, 0, 2, 0, 0, 1}, "sum over p+q=k");
    out.require(r.betti == sums, "betti numbers");
    Form mubar_theta = ctx.mubar.apply(ctx.mu.apply(ctx.omega_pq));
    out.require(r.h[3][0] == 0 && !mubar_theta.is_zero(), "h^{3,0} = 0 with mubar(mu omega) != 0");
    out.detail << "kernels (a),(b) equal in all degrees; h^{0,0}=h^{3,3}=h^{2,1}=h^{1,2}=1, others 0; sums (1,0,0,2,0,0,1); "
               << "mubar(mu omega) has " << mubar_theta.size() << " nonzero terms";
}

void criterion6(Outcome& out) {
    auto t0 = Clock::now();
    ModelContext ctx(builtin_model("torus6"));
    HodgeReport r = hodge_numbers(ctx);
    double t = seconds_since(t0);
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q)
            out.require(r.h[p][q] == binom(3, p) * binom(3, q), "h^{" + std::to_string(p) + "," + std::to_string(q) + "}");
    out.require(t < 1.0, "took >= 1 s");
    out.detail << "h^{p,q} = C(3,p)C(3,q) in " << t << " s";
}

void criterion7(Outcome& out) {
    ModelContext ctx(builtin_model("s3xs3-nk"));
    all_pass(run(ctx, {"VANISH_COR"}), out, "s3xs3-nk");
    GradedOperator dl = ctx.laplacian(ModelContext::Lap::L_mu) - ctx.laplacian(ModelContext::Lap::L_mubar);
    const auto& b = *ctx.space().basis();
    int invertible = 0, vanish = 0;
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            auto dom = positions(b, [&](Mask m) { return pq_type(m, 3) == Bidegree{p, q}; });
            bool inv = joint_kernel({&dl}, dom).empty();
            bool off = p != q && p + q != 3;
            out.require(inv == off, "invertibility pattern at (" + std::to_string(p) + "," + std::to_string(q) + ")");
            if (inv) {
                ++invertible;
                bool zero = harmonic_pq(ctx, p, q).empty();
                out.require(zero, "H^{" + std::to_string(p) + "," + std::to_string(q) + "} != 0");
                if (zero) ++vanish;
            }
        }
    out.detail << "difference invertible on exactly the " << invertible << " blocks off {p=q} u {p+q=3}; H^{p,q} = 0 on "
               << vanish << " of them";
}

void criterion8(Outcome& out) {
    auto t0 = Clock::now();
    ModelContext ctx(builtin_model("su2-four"));
    all_pass(run(ctx, {"NK_MAIN", "TORSION_OP", "DELTA_SUM"}, true), out, "su2-four");
    HodgeReport r = hodge_numbers(ctx);
    out.require(r.sum_rule, "sum rule");
    double t = seconds_since(t0);
    out.require(t < 1800.0, "took >= 30 min");
    out.detail << "space dim " << ctx.space().basis()->size() << "; NK_MAIN, TORSION_OP, DELTA_SUM exact; betti (";
    for (std::size_t k = 0; k < r.betti.size(); ++k) out.detail << (k ? "," : "") << r.betti[k];
    out.detail << ") = row sums of h; " << t << " s";
}

// Dense oracle: the real-coframe Hodge Laplacian, mapped to pq forms after
// a field elimination with first-nonzero pivots.
void criterion9(Outcome& out) {
    int compared = 0;
    for (const auto& name : builtin_names()) {
        ModelContext ctx(builtin_model(name));
        const FormSpace& s = ctx.space();
        const auto& b = *s.basis();
        GradedOperator d = chevalley_eilenberg_d(s.model());
        GradedOperator ds = s.adjoint(d);
        GradedOperator lap = ds * d + d * ds;
        for (int k = 0; k <= s.dim(); ++k) {
            const int off = b.offset(k), cnt = b.count(k);
            DenseMatrix block = DenseMatrix::Constant(cnt, cnt, Scalar(0));
            for (int c = 0; c < cnt; ++c)
                for (SparseMatrix::InnerIterator it(lap.matrix(), off + c); it; ++it) block(it.row() - off, c) = it.value();
            std::vector<Form> oracle;
            for (const auto& v : dense_kernel(block)) {
                Form f(s.dim());
                for (const auto& [i, x] : v) f.add_term(b.mask(off + i), x);
                oracle.push_back(s.to_frame(f, Coframe::pq));
            }
            auto h = harmonic_space(ctx, k);
            bool ok = h.size() == oracle.size() && same_span(to_vectors(h, b), to_vectors(oracle, b), static_cast<int>(b.size()));
            out.require(ok, name + " degree " + std::to_string(k));
            ++compared;
        }
    }
    out.detail << "sparse and dense kernels agree in dimension and span on " << compared << " (model, degree) pairs";
}

void criterion10(Outcome& out) {
    LieAlgebraModel base = builtin_model("s3xs3-nk");
    const int n = base.dimension;
    int tried = 0, broken = 0, witnessed = 0;
    std::string survivors;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                LieAlgebraModel m = base;
                m.set_bracket(i, j, k, m.c(k, i, j) + Scalar(1));
                ++tried;
                GradedOperator d = chevalley_eilenberg_d(m);
                Comparison c = compare(d * d, GradedOperator::zero(d.basis_ptr(), 2, Coframe::real));
                if (!c.equal) {
                    ++broken;
                    if (c.witness) ++witnessed;
                } else {
                    survivors += " c^" + std::to_string(k + 1) + "_" + std::to_string(i + 1) + std::to_string(j + 1);
                }
            }
    out.require(broken == tried && witnessed == broken,
                std::to_string(tried - broken) + " of " + std::to_string(tried) + " perturbations keep d^2 = 0:" +
                    survivors);

    ModelContext ref(base);
    LieAlgebraModel scaled = base;
    scaled.metric = scaled.metric * Scalar(4);
    scaled.name = "s3xs3-nk-g4";
    ModelContext sc(scaled);
    Scalar l2 = su3_extract(ref.space()).lambda2, l2s = su3_extract(sc.space()).lambda2;
    out.require(l2s == l2 * Scalar(Rational(1, 4)), "lambda^2 did not scale by 1/4");
    Report a = run_suite(ref, {}), b = run_suite(sc, {});
    int same = 0;
    for (std::size_t t = 0; t < a.checks.size(); ++t) {
        bool eq = a.checks[t].id == b.checks[t].id && a.checks[t].status == b.checks[t].status;
        out.require(eq, a.checks[t].id + " verdict changed under scaling");
        if (eq) ++same;
    }
    out.detail << broken << "/" << tried << " single-entry perturbations break d^2 = 0 (all witnessed); metric x4: lambda^2 "
               << l2.str() << " -> " << l2s.str() << ", " << same << "/" << a.checks.size() << " verdicts unchanged";
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<void(Outcome&)>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                                 criterion6, criterion7, criterion8, criterion9, criterion10};
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    if (argc > 1 && (only < 1 || only > static_cast<int>(criteria.size()))) {
        std::cerr << "usage: acceptance [criterion 1-" << criteria.size() << "]\n";
        return 2;
    }
    int failed = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        if (only && static_cast<int>(c) + 1 != only) continue;
        Outcome out;
        auto t0 = Clock::now();
        try {
            criteria[c](out);
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        char head[64];
        std::snprintf(head, sizeof head, "criterion %zu %s (%.2f s) ", c + 1, out.pass ? "PASS" : "FAIL", seconds_since(t0));
        std::cout << head << out.detail.str() << out.failures.str() << std::endl;
        if (!out.pass) ++failed;
    }
    return failed ? 1 : 0;
}
