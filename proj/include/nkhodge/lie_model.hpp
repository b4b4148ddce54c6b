#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "nkhodge/graded_operator.hpp"

namespace nkh {

struct ExpectedFlags {
    bool nearly_kahler = false;
    bool strict = false;
    bool kahler = false;
    friend bool operator==(const ExpectedFlags&, const ExpectedFlags&) = default;
};

// A Lie algebra with an invariant almost Hermitian structure.
// Conventions: [e_i,e_j] = c^k_ij e_k, du^k = -1/2 c^k_ij u^i ^ u^j.
// complex_structure M acts as J e_j = sum_k M(k,j) e_k on vectors and as
// J u^i = sum_j M(i,j) u^j on the coframe.  Indices are 0-based in memory.
struct LieAlgebraModel {
    std::string name;
    int dimension = 0;
    int extension_d = 1;
    std::vector<Scalar> structure;  // c^k_ij at (k*dim + i)*dim + j
    DenseMatrix metric;
    DenseMatrix complex_structure;
    ExpectedFlags expected;

    LieAlgebraModel() = default;
    LieAlgebraModel(std::string name, int dimension, int extension_d);

    int n() const { return dimension / 2; }
    const Scalar& c(int k, int i, int j) const { return structure[(k * dimension + i) * dimension + j]; }
    Scalar& c(int k, int i, int j) { return structure[(k * dimension + i) * dimension + j]; }
    // Sets c^k_ij = v and c^k_ji = -v.
    void set_bracket(int i, int j, int k, const Scalar& v);
};

struct ValidationEntry {
    std::string name;
    bool passed = true;
    std::string witness;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    bool all_passed() const;
    const ValidationEntry* first_failure() const;
};

ValidationReport validate_model(const LieAlgebraModel& m);

// Gamma(k,i,j) with nabla_{e_i} e_j = Gamma^k_ij e_k.
class ConnectionTable {
public:
    ConnectionTable() = default;
    explicit ConnectionTable(int dim) : dim_(dim), gamma_(dim * dim * dim) {}
    int dim() const { return dim_; }
    const Scalar& operator()(int k, int i, int j) const { return gamma_[(k * dim_ + i) * dim_ + j]; }
    Scalar& operator()(int k, int i, int j) { return gamma_[(k * dim_ + i) * dim_ + j]; }

private:
    int dim_ = 0;
    std::vector<Scalar> gamma_;
};

// N^k_ij, antisymmetric in i,j.
class VectorValued2Form {
public:
    VectorValued2Form() = default;
    explicit VectorValued2Form(int dim) : dim_(dim), comp_(dim * dim * dim) {}
    int dim() const { return dim_; }
    const Scalar& operator()(int k, int i, int j) const { return comp_[(k * dim_ + i) * dim_ + j]; }
    Scalar& operator()(int k, int i, int j) { return comp_[(k * dim_ + i) * dim_ + j]; }
    bool is_zero() const;
    // The vector N(e_i, e_j) as components.
    Vector value(int i, int j) const;

private:
    int dim_ = 0;
    std::vector<Scalar> comp_;
};

// Real-coframe geometric data.
std::vector<Form> coframe_differentials(const LieAlgebraModel& m);  // du^k
GradedOperator chevalley_eilenberg_d(const LieAlgebraModel& m);
Form fundamental_form(const LieAlgebraModel& m);  // omega = sum_{i<j} (M^T g)_ij u^ij
Vector bracket(const LieAlgebraModel& m, const Vector& x, const Vector& y);
Vector apply_j(const LieAlgebraModel& m, const Vector& x);
// 2-form coefficient beta(e_i, e_j).
Scalar evaluate2(const Form& beta, int i, int j);

ConnectionTable levi_civita(const LieAlgebraModel& m);
// nabla_{e_i} u^k as real 1-forms.
std::vector<Form> connection_images(const ConnectionTable& conn, int i);
Form covariant_derivative(const ConnectionTable& conn, int i, const Form& a);
// nabla_{e_i} e_j as components.
Vector covariant_vector(const ConnectionTable& conn, int i, int j);

VectorValued2Form nijenhuis_tensor(const LieAlgebraModel& m);
std::vector<Form> nijenhuis_images(const VectorValued2Form& n);  // N(u^k)
GradedOperator nijenhuis_operator(const LieAlgebraModel& m);
std::pair<VectorValued2Form, GradedOperator> nijenhuis(const LieAlgebraModel& m);

struct NKResidual {
    bool exact_zero = true;
    double residual = 0.0;
    std::optional<std::string> witness;
    bool nabla_omega_zero = true;  // Kahler
    bool nearly_kahler() const { return exact_zero; }
    bool kahler() const { return exact_zero && nabla_omega_zero; }
    bool strict() const { return exact_zero && !nabla_omega_zero; }
};
// Symmetrization (nabla_X omega)(Y,Z) + (nabla_Y omega)(X,Z) over frame triples.
NKResidual nk_tensor_residual(const LieAlgebraModel& m);

LieAlgebraModel product_model(const LieAlgebraModel& a, const LieAlgebraModel& b);
LieAlgebraModel builtin_model(const std::string& name);
const std::vector<std::string>& builtin_names();

class ModelParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::ordered_json model_to_json(const LieAlgebraModel& m);
std::string emit_model(const LieAlgebraModel& m);  // canonical text
LieAlgebraModel parse_model(const std::string& text);
LieAlgebraModel model_from_json(const nlohmann::json& j);
// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string model_hash(const LieAlgebraModel& m);

}  // namespace nkh
