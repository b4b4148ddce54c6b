#include "nkhodge/lie_model.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace nkh {

namespace {

std::string tuple_str(std::initializer_list<int> idx) {
    std::string out = "(";
    bool first = true;
    for (int v : idx) {
        if (!first) out += ",";
        out += std::to_string(v + 1);
        first = false;
    }
    return out + ")";
}

bool squarefree(int d) {
    if (d < 1) return false;
    for (int p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

Vector zero_vector(int n) { return Vector::Constant(n, Scalar(0)); }

}  // namespace

LieAlgebraModel::LieAlgebraModel(std::string name_, int dimension_, int extension_d_)
    : name(std::move(name_)),
      dimension(dimension_),
      extension_d(extension_d_),
      structure(dimension_ * dimension_ * dimension_),
      metric(DenseMatrix::Identity(dimension_, dimension_)),
      complex_structure(DenseMatrix::Zero(dimension_, dimension_)) {}

void LieAlgebraModel::set_bracket(int i, int j, int k, const Scalar& v) {
    c(k, i, j) = v;
    c(k, j, i) = -v;
}

bool ValidationReport::all_passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const ValidationEntry& e) { return e.passed; });
}

const ValidationEntry* ValidationReport::first_failure() const {
    for (const auto& e : entries)
        if (!e.passed) return &e;
    return nullptr;
}

ValidationReport validate_model(const LieAlgebraModel& m) {
    ValidationReport rep;
    auto add = [&](std::string name, bool ok, std::string witness = {}) {
        rep.entries.push_back({std::move(name), ok, ok ? std::string() : std::move(witness)});
    };
    const int n = m.dimension;
    bool shape = n > 0 && n % 2 == 0 && n <= 16 && static_cast<int>(m.structure.size()) == n * n * n &&
                 m.metric.rows() == n && m.metric.cols() == n && m.complex_structure.rows() == n &&
                 m.complex_structure.cols() == n && squarefree(m.extension_d);
    add("shape", shape, "dimension must be even and positive, arrays sized 2n, extension_d squarefree");
    if (!shape) return rep;

    std::string bad;
    auto in_field = [&](const Scalar& s) { return s.is_real() && (s.ext() == 1 || s.ext() == m.extension_d); };
    for (int t = 0; t < n * n * n && bad.empty(); ++t)
        if (!in_field(m.structure[t])) bad = "structure constant " + m.structure[t].str();
    for (int i = 0; i < n && bad.empty(); ++i)
        for (int j = 0; j < n && bad.empty(); ++j) {
            if (!in_field(m.metric(i, j))) bad = "metric " + tuple_str({i, j});
            if (!in_field(m.complex_structure(i, j))) bad = "complex_structure " + tuple_str({i, j});
        }
    add("real_entries", bad.empty(), bad);
    if (!bad.empty()) return rep;

    std::string anti;
    for (int k = 0; k < n && anti.empty(); ++k)
        for (int i = 0; i < n && anti.empty(); ++i)
            for (int j = i; j < n && anti.empty(); ++j)
                if (m.c(k, i, j) != -m.c(k, j, i))
                    anti = "(i,j,k)=" + tuple_str({i, j, k}) + ": c^k_ij + c^k_ji = " + (m.c(k, i, j) + m.c(k, j, i)).str();
    add("antisymmetry", anti.empty(), anti);

    std::string jac;
    for (int i = 0; i < n && jac.empty(); ++i)
        for (int j = 0; j < n && jac.empty(); ++j)
            for (int k = 0; k < n && jac.empty(); ++k)
                for (int l = 0; l < n && jac.empty(); ++l) {
                    Scalar s;
                    for (int q = 0; q < n; ++q) {
                        s += m.c(q, i, j) * m.c(l, q, k);
                        s += m.c(q, j, k) * m.c(l, q, i);
                        s += m.c(q, k, i) * m.c(l, q, j);
                    }
                    if (!s.is_zero()) jac = "(i,j,k,l)=" + tuple_str({i, j, k, l}) + ": residual " + s.str();
                }
    add("jacobi", jac.empty(), jac);

    std::string uni;
    for (int j = 0; j < n && uni.empty(); ++j) {
        Scalar tr;
        for (int i = 0; i < n; ++i) tr += m.c(i, i, j);
        if (!tr.is_zero()) uni = "j=" + std::to_string(j + 1) + ": trace ad(e_j) = " + tr.str();
    }
    add("unimodular", uni.empty(), uni);

    std::string sym;
    for (int i = 0; i < n && sym.empty(); ++i)
        for (int j = i + 1; j < n && sym.empty(); ++j)
            if (m.metric(i, j) != m.metric(j, i)) sym = tuple_str({i, j});
    add("metric_symmetric", sym.empty(), sym);
    bool pd = sym.empty() && is_positive_definite(m.metric);
    add("metric_positive_definite", pd, "a leading principal minor is not positive");

    const DenseMatrix& J = m.complex_structure;
    DenseMatrix j2 = J * J;
    std::string jsq;
    for (int i = 0; i < n && jsq.empty(); ++i)
        for (int k = 0; k < n && jsq.empty(); ++k)
            if (j2(i, k) != Scalar(i == k ? -1 : 0)) jsq = tuple_str({i, k}) + ": (J^2)_ik = " + j2(i, k).str();
    add("j_squared", jsq.empty(), jsq);

    DenseMatrix inv = J.transpose() * m.metric * J;
    std::string comp;
    for (int i = 0; i < n && comp.empty(); ++i)
        for (int k = 0; k < n && comp.empty(); ++k)
            if (inv(i, k) != m.metric(i, k)) comp = tuple_str({i, k}) + ": g(Je_i,Je_k) - g_ik = " + (inv(i, k) - m.metric(i, k)).str();
    add("j_compatible", comp.empty(), comp);

    if (n <= 12) {
        GradedOperator d = chevalley_eilenberg_d(m);
        GradedOperator dd = d * d;
        Comparison c = compare(dd, GradedOperator::zero(d.basis_ptr(), 2, Coframe::real));
        add("d_squared", c.equal, c.witness.value_or(""));
    }
    return rep;
}

std::vector<Form> coframe_differentials(const LieAlgebraModel& m) {
    const int n = m.dimension;
    std::vector<Form> out;
    for (int k = 0; k < n; ++k) {
        Form f(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Scalar& c = m.c(k, i, j);
                if (c.is_zero() || i == j) continue;
                // -1/2 c u^i ^ u^j summed over ordered pairs
                Scalar v = c * Scalar::rational(-1, 2);
                Mask mask = (Mask(1) << i) | (Mask(1) << j);
                f.add_term(mask, i < j ? v : -v);
            }
        out.push_back(std::move(f));
    }
    return out;
}

GradedOperator chevalley_eilenberg_d(const LieAlgebraModel& m) {
    return derivation_operator(make_basis(m.dimension), coframe_differentials(m), 1, Coframe::real);
}

Form fundamental_form(const LieAlgebraModel& m) {
    const int n = m.dimension;
    DenseMatrix w = m.complex_structure.transpose() * m.metric;
    Form out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.add_term((Mask(1) << i) | (Mask(1) << j), w(i, j));
    return out;
}

Vector bracket(const LieAlgebraModel& m, const Vector& x, const Vector& y) {
    const int n = m.dimension;
    Vector out = zero_vector(n);
    for (int i = 0; i < n; ++i) {
        if (x[i].is_zero()) continue;
        for (int j = 0; j < n; ++j) {
            if (y[j].is_zero()) continue;
            Scalar xy = x[i] * y[j];
            for (int k = 0; k < n; ++k)
                if (!m.c(k, i, j).is_zero()) out[k] += m.c(k, i, j) * xy;
        }
    }
    return out;
}

Vector apply_j(const LieAlgebraModel& m, const Vector& x) {
    const int n = m.dimension;
    Vector out = zero_vector(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (!m.complex_structure(k, j).is_zero() && !x[j].is_zero()) out[k] += m.complex_structure(k, j) * x[j];
    return out;
}

Scalar evaluate2(const Form& beta, int i, int j) {
    if (i == j) return Scalar(0);
    Scalar v = beta.coeff((Mask(1) << i) | (Mask(1) << j));
    return i < j ? v : -v;
}

ConnectionTable levi_civita(const LieAlgebraModel& m) {
    const int n = m.dimension;
    DenseMatrix ginv = inverse(m.metric);
    // lowered[(a*n+b)*n+z] = g([e_a,e_b], e_z)
    std::vector<Scalar> lowered(n * n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int z = 0; z < n; ++z) {
                Scalar s;
                for (int q = 0; q < n; ++q)
                    if (!m.c(q, a, b).is_zero()) s += m.c(q, a, b) * m.metric(q, z);
                lowered[(a * n + b) * n + z] = s;
            }
    auto low = [&](int a, int b, int z) -> const Scalar& { return lowered[(a * n + b) * n + z]; };
    ConnectionTable conn(n);
    const Scalar half = Scalar::rational(1, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<Scalar> koszul(n);
            for (int l = 0; l < n; ++l) koszul[l] = half * (low(i, j, l) - low(j, l, i) + low(l, i, j));
            for (int k = 0; k < n; ++k) {
                Scalar s;
                for (int l = 0; l < n; ++l)
                    if (!ginv(k, l).is_zero() && !koszul[l].is_zero()) s += ginv(k, l) * koszul[l];
                conn(k, i, j) = s;
            }
        }
    return conn;
}

std::vector<Form> connection_images(const ConnectionTable& conn, int i) {
    const int n = conn.dim();
    if (i < 0 || i >= n) throw std::out_of_range("frame index out of range");
    std::vector<Form> out;
    for (int k = 0; k < n; ++k) {
        Form f(n);
        for (int j = 0; j < n; ++j) f.add_term(Mask(1) << j, -conn(k, i, j));
        out.push_back(std::move(f));
    }
    return out;
}

Form covariant_derivative(const ConnectionTable& conn, int i, const Form& a) {
    if (a.coframe() != Coframe::real) throw std::invalid_argument("covariant_derivative acts on real-coframe forms");
    return apply_derivation(connection_images(conn, i), 0, a);
}

Vector covariant_vector(const ConnectionTable& conn, int i, int j) {
    const int n = conn.dim();
    Vector v = zero_vector(n);
    for (int k = 0; k < n; ++k) v[k] = conn(k, i, j);
    return v;
}

bool VectorValued2Form::is_zero() const {
    return std::all_of(comp_.begin(), comp_.end(), [](const Scalar& s) { return s.is_zero(); });
}

Vector VectorValued2Form::value(int i, int j) const {
    Vector v = zero_vector(dim_);
    for (int k = 0; k < dim_; ++k) v[k] = (*this)(k, i, j);
    return v;
}

VectorValued2Form nijenhuis_tensor(const LieAlgebraModel& m) {
    const int n = m.dimension;
    VectorValued2Form out(n);
    for (int i = 0; i < n; ++i) {
        Vector x = zero_vector(n);
        x[i] = Scalar(1);
        Vector jx = apply_j(m, x);
        for (int j = 0; j < n; ++j) {
            Vector y = zero_vector(n);
            y[j] = Scalar(1);
            Vector jy = apply_j(m, y);
            Vector v = bracket(m, x, y) + apply_j(m, bracket(m, jx, y)) + apply_j(m, bracket(m, x, jy)) -
                       bracket(m, jx, jy);
            for (int k = 0; k < n; ++k) out(k, i, j) = v[k];
        }
    }
    return out;
}

std::vector<Form> nijenhuis_images(const VectorValued2Form& nt) {
    const int n = nt.dim();
    std::vector<Form> out;
    for (int k = 0; k < n; ++k) {
        Form f(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) f.add_term((Mask(1) << i) | (Mask(1) << j), nt(k, i, j));
        out.push_back(std::move(f));
    }
    return out;
}

GradedOperator nijenhuis_operator(const LieAlgebraModel& m) {
    return derivation_operator(make_basis(m.dimension), nijenhuis_images(nijenhuis_tensor(m)), 1, Coframe::real);
}

std::pair<VectorValued2Form, GradedOperator> nijenhuis(const LieAlgebraModel& m) {
    VectorValued2Form t = nijenhuis_tensor(m);
    GradedOperator op = derivation_operator(make_basis(m.dimension), nijenhuis_images(t), 1, Coframe::real);
    return {std::move(t), std::move(op)};
}

NKResidual nk_tensor_residual(const LieAlgebraModel& m) {
    const int n = m.dimension;
    ConnectionTable conn = levi_civita(m);
    Form omega = fundamental_form(m);
    std::vector<Form> nab;
    for (int i = 0; i < n; ++i) nab.push_back(covariant_derivative(conn, i, omega));
    NKResidual out;
    for (int i = 0; i < n; ++i) {
        if (!nab[i].is_zero()) out.nabla_omega_zero = false;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                Scalar s = evaluate2(nab[i], j, l) + evaluate2(nab[j], i, l);
                if (s.is_zero()) continue;
                out.exact_zero = false;
                out.residual = std::max(out.residual, s.abs_approx());
                if (!out.witness)
                    out.witness = "(X,Y,Z)=" + tuple_str({i, j, l}) + ": (nabla_X w)(Y,Z)+(nabla_Y w)(X,Z) = " + s.str();
            }
    }
    return out;
}

LieAlgebraModel product_model(const LieAlgebraModel& a, const LieAlgebraModel& b) {
    int d = a.extension_d;
    if (a.extension_d != b.extension_d) {
        if (a.extension_d == 1) d = b.extension_d;
        else if (b.extension_d != 1) throw std::invalid_argument("product of models over different extensions");
    }
    const int na = a.dimension, nb = b.dimension, n = na + nb;
    LieAlgebraModel m(a.name + "x" + b.name, n, d);
    for (int k = 0; k < na; ++k)
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j) m.c(k, i, j) = a.c(k, i, j);
    for (int k = 0; k < nb; ++k)
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) m.c(na + k, na + i, na + j) = b.c(k, i, j);
    m.metric = DenseMatrix::Zero(n, n);
    m.metric.topLeftCorner(na, na) = a.metric;
    m.metric.bottomRightCorner(nb, nb) = b.metric;
    m.complex_structure = DenseMatrix::Zero(n, n);
    m.complex_structure.topLeftCorner(na, na) = a.complex_structure;
    m.complex_structure.bottomRightCorner(nb, nb) = b.complex_structure;
    bool nk = a.expected.nearly_kahler && b.expected.nearly_kahler;
    m.expected.nearly_kahler = nk;
    m.expected.kahler = a.expected.kahler && b.expected.kahler;
    m.expected.strict = nk && (a.expected.strict || b.expected.strict);
    return m;
}

namespace {

void standard_j(LieAlgebraModel& m) {
    for (int k = 0; k < m.n(); ++k) {
        m.complex_structure(2 * k + 1, 2 * k) = Scalar(1);
        m.complex_structure(2 * k, 2 * k + 1) = Scalar(-1);
    }
}

LieAlgebraModel s3xs3() {
    LieAlgebraModel m("s3xs3-nk", 6, 3);
    for (int f = 0; f < 2; ++f) {
        int o = 3 * f;
        m.set_bracket(o + 0, o + 1, o + 2, Scalar(1));
        m.set_bracket(o + 1, o + 2, o + 0, Scalar(1));
        m.set_bracket(o + 2, o + 0, o + 1, Scalar(1));
    }
    const Scalar w = Scalar::sqrt_d(3);
    for (int i = 0; i < 3; ++i) {
        m.metric(i, i + 3) = Scalar::rational(-1, 2);
        m.metric(i + 3, i) = Scalar::rational(-1, 2);
        // J e_i = (e_i + 2 f_i)/sqrt3, J f_i = (-2 e_i - f_i)/sqrt3
        m.complex_structure(i, i) = w * Scalar::rational(1, 3);
        m.complex_structure(i + 3, i) = w * Scalar::rational(2, 3);
        m.complex_structure(i, i + 3) = w * Scalar::rational(-2, 3);
        m.complex_structure(i + 3, i + 3) = w * Scalar::rational(-1, 3);
    }
    m.expected = {true, true, false};
    return m;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"torus6", "s3xs3-nk", "su2-four", "kodaira-thurston"};
    return names;
}

LieAlgebraModel builtin_model(const std::string& name) {
    if (name == "torus6") {
        LieAlgebraModel m("torus6", 6, 1);
        standard_j(m);
        m.expected = {true, false, true};
        return m;
    }
    if (name == "s3xs3-nk") return s3xs3();
    if (name == "su2-four") {
        LieAlgebraModel m = product_model(s3xs3(), s3xs3());
        m.name = "su2-four";
        return m;
    }
    if (name == "kodaira-thurston") {
        LieAlgebraModel m("kodaira-thurston", 4, 1);
        m.set_bracket(0, 1, 3, Scalar(-1));  // du^4 = u^1 ^ u^2
        standard_j(m);
        m.expected = {false, false, false};
        return m;
    }
    throw std::invalid_argument("unknown built-in model '" + name + "'");
}

nlohmann::ordered_json model_to_json(const LieAlgebraModel& m) {
    using oj = nlohmann::ordered_json;
    const int n = m.dimension;
    oj j;
    j["name"] = m.name;
    j["dimension"] = n;
    j["extension_d"] = m.extension_d;
    oj sc = oj::array();
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
            for (int k = 0; k < n; ++k) {
                const Scalar& c = m.c(k, i, jj);
                if (c.is_zero()) continue;
                oj e;
                e["i"] = i + 1;
                e["j"] = jj + 1;
                e["k"] = k + 1;
                e["value"] = c.str();
                sc.push_back(e);
            }
    j["structure_constants"] = sc;
    auto matrix = [&](const DenseMatrix& a) {
        oj rows = oj::array();
        for (int r = 0; r < a.rows(); ++r) {
            oj row = oj::array();
            for (int c = 0; c < a.cols(); ++c) row.push_back(a(r, c).str());
            rows.push_back(row);
        }
        return rows;
    };
    j["metric"] = matrix(m.metric);
    j["complex_structure"] = matrix(m.complex_structure);
    j["expected"] = {{"nearly_kahler", m.expected.nearly_kahler},
                     {"strict", m.expected.strict},
                     {"kahler", m.expected.kahler}};
    return j;
}

std::string emit_model(const LieAlgebraModel& m) { return model_to_json(m).dump(2) + "\n"; }

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ModelParseError(where + ": " + what);
}

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

int int_field(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
    return v.get<int>();
}

Scalar literal(const nlohmann::json& v, int d, const std::string& where) {
    if (!v.is_string()) fail(where, "scalar literals must be strings");
    try {
        return Scalar::parse(v.get<std::string>(), d);
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

DenseMatrix matrix_field(const nlohmann::json& j, const char* key, int n, int d) {
    const auto& v = field(j, key, "model");
    std::string where = std::string("model.") + key;
    if (!v.is_array() || static_cast<int>(v.size()) != n) fail(where, "expected " + std::to_string(n) + " rows");
    DenseMatrix out(n, n);
    for (int r = 0; r < n; ++r) {
        const auto& row = v[r];
        std::string rw = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != n) fail(rw, "expected " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c) out(r, c) = literal(row[c], d, rw + "[" + std::to_string(c) + "]");
    }
    return out;
}

void only_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) fail(where, "unknown field '" + it.key() + "'");
    }
}

}  // namespace

LieAlgebraModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("model", "expected a JSON object");
    only_keys(j, {"name", "dimension", "extension_d", "structure_constants", "metric", "complex_structure", "expected"},
              "model");
    const auto& name = field(j, "name", "model");
    if (!name.is_string()) fail("model.name", "expected a string");
    int n = int_field(j, "dimension", "model");
    int d = int_field(j, "extension_d", "model");
    if (n <= 0 || n % 2 != 0 || n > 16) fail("model.dimension", "must be even, positive and at most 16");
    if (!squarefree(d)) fail("model.extension_d", "must be a squarefree positive integer");
    LieAlgebraModel m(name.get<std::string>(), n, d);
    const auto& sc = field(j, "structure_constants", "model");
    if (!sc.is_array()) fail("model.structure_constants", "expected an array");
    std::set<std::tuple<int, int, int>> seen;
    for (std::size_t t = 0; t < sc.size(); ++t) {
        std::string where = "model.structure_constants[" + std::to_string(t) + "]";
        const auto& e = sc[t];
        if (!e.is_object()) fail(where, "expected an object");
        only_keys(e, {"i", "j", "k", "value"}, where);
        int i = int_field(e, "i", where), jj = int_field(e, "j", where), k = int_field(e, "k", where);
        for (int v : {i, jj, k})
            if (v < 1 || v > n) fail(where, "index out of range 1.." + std::to_string(n));
        if (!seen.insert({i, jj, k}).second) fail(where, "duplicate entry");
        m.c(k - 1, i - 1, jj - 1) = literal(field(e, "value", where), d, where + ".value");
    }
    m.metric = matrix_field(j, "metric", n, d);
    m.complex_structure = matrix_field(j, "complex_structure", n, d);
    const auto& ex = field(j, "expected", "model");
    if (!ex.is_object()) fail("model.expected", "expected an object");
    only_keys(ex, {"nearly_kahler", "strict", "kahler"}, "model.expected");
    auto flag = [&](const char* key) {
        const auto& v = field(ex, key, "model.expected");
        if (!v.is_boolean()) fail(std::string("model.expected.") + key, "expected a boolean");
        return v.get<bool>();
    };
    m.expected = {flag("nearly_kahler"), flag("strict"), flag("kahler")};
    return m;
}

LieAlgebraModel parse_model(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t p = 0; p + 1 < e.byte && p < text.size(); ++p) {
            if (text[p] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ModelParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    return model_from_json(j);
}

std::string model_hash(const LieAlgebraModel& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : emit_model(m)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nkh
