#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nkhodge/types.hpp"

namespace nkh {

// Graded-lexicographic enumeration of subsets of {0..dim-1}: by degree,
// then lexicographically by the increasing index list.
class ExteriorBasis {
public:
    explicit ExteriorBasis(int dim);

    int dim() const { return dim_; }
    std::size_t size() const { return masks_.size(); }
    Mask mask(std::size_t pos) const { return masks_[pos]; }
    int position(Mask m) const { return pos_[m]; }
    int degree_at(int pos) const { return popcount(masks_[pos]); }
    int offset(int k) const { return offsets_[k]; }
    int count(int k) const { return offsets_[k + 1] - offsets_[k]; }

private:
    int dim_;
    std::vector<Mask> masks_;
    std::vector<int> pos_;
    std::vector<int> offsets_;
};

std::shared_ptr<const ExteriorBasis> make_basis(int dim);

// Sign of u^A ^ u^B relative to u^(A|B); zero if A and B intersect.
int wedge_sign(Mask a, Mask b);
// Sign of iota(e_i) u^M relative to u^(M\i); zero if i is not in M.
int contraction_sign(Mask m, int i);

std::string mask_str(Mask m);  // 1-based index list, "{1,2,4}"

class Form {
public:
    using Terms = std::map<Mask, Scalar>;

    Form() = default;
    explicit Form(int dim, Coframe frame = Coframe::real) : dim_(dim), frame_(frame) {}

    static Form monomial(int dim, Mask m, const Scalar& c = Scalar(1), Coframe frame = Coframe::real);
    static Form generator(int dim, int i, Coframe frame = Coframe::real) {
        return monomial(dim, Mask(1) << i, Scalar(1), frame);
    }
    static Form constant(int dim, const Scalar& c, Coframe frame = Coframe::real) {
        return monomial(dim, 0, c, frame);
    }

    int dim() const { return dim_; }
    Coframe coframe() const { return frame_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // Degree of a nonzero homogeneous form; nullopt for zero or mixed forms.
    std::optional<int> degree() const;
    bool is_homogeneous() const;
    Form component(int k) const;

    Scalar coeff(Mask m) const;
    void add_term(Mask m, const Scalar& c);

    Form& operator+=(const Form& o);
    Form& operator-=(const Form& o);
    Form& operator*=(const Scalar& s);
    Form operator-() const;

    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    friend Form operator*(const Scalar& s, Form a) { return a *= s; }
    friend Form operator*(Form a, const Scalar& s) { return a *= s; }
    friend bool operator==(const Form& a, const Form& b);
    friend bool operator!=(const Form& a, const Form& b) { return !(a == b); }

    std::string str() const;

private:
    int dim_ = 0;
    Coframe frame_ = Coframe::real;
    Terms terms_;
};

Form wedge(const Form& a, const Form& b);
// Interior product with the vector whose components v[i] are taken against
// the frame dual to the form's coframe.
Form contract(const Vector& v, const Form& a);
Form contract(int i, const Form& a);
// Complex conjugation.  In the pq coframe the generators theta^a and their
// conjugates swap, so conjugation permutes monomials with a sign.
Form conjugate(const Form& a);
// Extension of a linear map on degree-1 generators: images[i] is the image
// of generator i, a degree-1 form in the target coframe.
Form apply_multiplicative(const std::vector<Form>& images, const Form& a);

// Hermitian pairing induced from a pairing on degree-1 generators.
// pair1(a,b) = <gen^a, gen^b>, so <u^I,u^J> is the minor det pair1[I,J].
class GramData {
public:
    // Real coframe from the vector metric g_ij = g(e_i,e_j); the pairing on
    // 1-forms is g^{-1}.  Throws if g is not symmetric positive-definite.
    static GramData from_metric(const DenseMatrix& g, int ext_d);
    // Any coframe from an explicit Hermitian pairing on generators.
    static GramData from_pairing(const DenseMatrix& pair1, Coframe frame, int ext_d);

    int dim() const { return static_cast<int>(pair1_.rows()); }
    Coframe coframe() const { return frame_; }
    int ext() const { return ext_; }
    const DenseMatrix& pairing_matrix() const { return pair1_; }
    // Vector metric, only for the real coframe.
    const DenseMatrix& metric() const { return metric_; }
    bool is_diagonal() const { return diagonal_; }

    Scalar pairing(Mask i, Mask j) const;
    // Nullopt when det g is not a square in the field.
    const std::optional<Scalar>& sqrt_det() const { return sqrt_det_; }

private:
    DenseMatrix pair1_;
    DenseMatrix metric_;
    Coframe frame_ = Coframe::real;
    int ext_ = 1;
    bool diagonal_ = false;
    std::optional<Scalar> sqrt_det_;
};

Scalar inner_product(const Form& a, const Form& b, const GramData& gram);
// Metric dual of a real 1-form, as vector components.
Vector sharp(const Form& alpha, const GramData& gram);
Form contract_form(const Form& alpha, const Form& a, const GramData& gram);
// a ^ star(b) = <a, conj b> vol.  Throws when det g is not a field square.
Form hodge_star(const Form& a, const GramData& gram);
Form volume_form(const GramData& gram);

// Exact dense helpers over the scalar field.
Scalar determinant(DenseMatrix m);
DenseMatrix inverse(const DenseMatrix& m);
DenseMatrix conj_transpose(const DenseMatrix& m);
bool is_positive_definite(const DenseMatrix& g);

}  // namespace nkh
