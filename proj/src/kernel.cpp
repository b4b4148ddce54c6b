#include "nkhodge/kernel.hpp"

#include <algorithm>
#include <gmpxx.h>

namespace nkh {

namespace {

// a*x - b*y
SparseVector combine(const Scalar& a, const SparseVector& x, const Scalar& b, const SparseVector& y) {
    SparseVector out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.emplace_back(x[i].first, a * x[i].second);
            ++i;
        } else if (i == x.size() || y[j].first < x[i].first) {
            out.emplace_back(y[j].first, -(b * y[j].second));
            ++j;
        } else {
            Scalar v = a * x[i].second - b * y[j].second;
            if (!v.is_zero()) out.emplace_back(x[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

const Scalar* entry(const SparseVector& v, int col) {
    auto it = std::lower_bound(v.begin(), v.end(), col, [](const auto& p, int c) { return p.first < c; });
    return it != v.end() && it->first == col ? &it->second : nullptr;
}

struct Echelon {
    std::vector<SparseVector> rows;  // pivot rows, leading column increasing
    std::vector<int> pivots;
};

Echelon echelon(std::vector<SparseVector> work, int ncols) {
    Echelon e;
    for (auto& r : work) make_primitive(r);
    work.erase(std::remove_if(work.begin(), work.end(), [](const SparseVector& r) { return r.empty(); }), work.end());
    for (int c = 0; c < ncols && !work.empty(); ++c) {
        int best = -1;
        std::size_t best_size = 0;
        for (std::size_t r = 0; r < work.size(); ++r) {
            if (work[r].front().first != c) continue;
            std::size_t sz = work[r].front().second.bit_size();
            if (best < 0 || sz < best_size || (sz == best_size && work[r].size() < work[best].size())) {
                best = static_cast<int>(r);
                best_size = sz;
            }
        }
        if (best < 0) continue;
        SparseVector piv = std::move(work[best]);
        work.erase(work.begin() + best);
        const Scalar p = piv.front().second;
        for (auto& r : work) {
            if (r.front().first != c) continue;
            Scalar f = r.front().second;
            r = combine(p, r, f, piv);
            make_primitive(r);
        }
        work.erase(std::remove_if(work.begin(), work.end(), [](const SparseVector& r) { return r.empty(); }),
                   work.end());
        e.pivots.push_back(c);
        e.rows.push_back(std::move(piv));
    }
    return e;
}

}  // namespace

void make_primitive(SparseVector& v) {
    if (v.empty()) return;
    mpz_class den = 1, num = 0;
    auto visit = [&](const Rational& q) {
        if (q.is_zero()) return;
        mpz_class d = q.denominator();
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
        mpz_class n = q.numerator();
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), n.get_mpz_t());
    };
    for (const auto& [i, s] : v) {
        visit(s.a());
        visit(s.b());
        visit(s.c());
        visit(s.e());
    }
    if (den == 1 && num == 1) return;
    mpq_class q(den, num);
    q.canonicalize();
    Scalar f{Rational(q)};
    for (auto& [i, s] : v) s = s * f;
}

std::vector<SparseVector> sparse_kernel(const std::vector<const SparseMatrix*>& blocks, const std::vector<int>& domain) {
    std::vector<SparseVector> rows;
    for (const SparseMatrix* m : blocks) {
        std::vector<SparseVector> local(m->rows());
        for (std::size_t t = 0; t < domain.size(); ++t)
            for (SparseMatrix::InnerIterator it(*m, domain[t]); it; ++it)
                if (!it.value().is_zero()) local[it.row()].emplace_back(static_cast<int>(t), it.value());
        for (auto& r : local)
            if (!r.empty()) rows.push_back(std::move(r));
    }
    const int n = static_cast<int>(domain.size());
    Echelon e = echelon(std::move(rows), n);
    // Back substitution to reduced form.
    for (int k = static_cast<int>(e.rows.size()) - 1; k >= 0; --k) {
        const int c = e.pivots[k];
        const Scalar p = e.rows[k].front().second;
        for (int j = 0; j < k; ++j) {
            const Scalar* f = entry(e.rows[j], c);
            if (!f) continue;
            Scalar fv = *f;
            e.rows[j] = combine(p, e.rows[j], fv, e.rows[k]);
            make_primitive(e.rows[j]);
        }
    }
    std::vector<char> is_pivot(n, 0);
    for (int c : e.pivots) is_pivot[c] = 1;
    std::vector<SparseVector> out;
    for (int f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        SparseVector v;
        v.emplace_back(f, Scalar(1));
        for (const auto& r : e.rows) {
            const Scalar* a = entry(r, f);
            if (a) v.emplace_back(r.front().first, -(*a) / r.front().second);
        }
        std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        make_primitive(v);
        out.push_back(std::move(v));
    }
    return out;
}

int sparse_rank(std::vector<SparseVector> rows) {
    int ncols = 0;
    for (const auto& r : rows)
        if (!r.empty()) ncols = std::max(ncols, r.back().first + 1);
    return static_cast<int>(echelon(std::move(rows), ncols).rows.size());
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> dense_rref(DenseMatrix& a) {
    std::vector<int> pivots;
    int row = 0;
    for (int c = 0; c < a.cols() && row < a.rows(); ++c) {
        int piv = -1;
        for (int r = row; r < a.rows(); ++r)
            if (!a(r, c).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        if (piv != row) a.row(piv).swap(a.row(row));
        Scalar inv = a(row, c).inverse();
        for (int k = c; k < a.cols(); ++k)
            if (!a(row, k).is_zero()) a(row, k) = a(row, k) * inv;
        for (int r = 0; r < a.rows(); ++r) {
            if (r == row || a(r, c).is_zero()) continue;
            Scalar f = a(r, c);
            for (int k = c; k < a.cols(); ++k)
                if (!a(row, k).is_zero()) a(r, k) -= f * a(row, k);
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

}  // namespace

std::vector<SparseVector> dense_kernel(DenseMatrix a) {
    std::vector<int> pivots = dense_rref(a);
    std::vector<char> is_pivot(a.cols(), 0);
    for (int c : pivots) is_pivot[c] = 1;
    std::vector<SparseVector> out;
    for (int f = 0; f < a.cols(); ++f) {
        if (is_pivot[f]) continue;
        SparseVector v;
        v.emplace_back(f, Scalar(1));
        for (std::size_t r = 0; r < pivots.size(); ++r)
            if (!a(r, f).is_zero()) v.emplace_back(pivots[r], -a(r, f));
        std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        out.push_back(std::move(v));
    }
    return out;
}

int dense_rank(DenseMatrix a) { return static_cast<int>(dense_rref(a).size()); }

bool same_span(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b, int ambient) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    DenseMatrix m = DenseMatrix::Constant(static_cast<int>(a.size() + b.size()), ambient, Scalar(0));
    int r = 0;
    for (const auto* set : {&a, &b}) {
        for (const auto& v : *set) {
            for (const auto& [i, s] : v) m(r, i) = s;
            ++r;
        }
    }
    return dense_rank(m) == static_cast<int>(a.size());
}

}  // namespace nkh
