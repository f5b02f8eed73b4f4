#pragma once

#include "extenso/field.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

/// Exterior calculus on a single chart of R^n.
///
/// Forms are fields (`KForm`, coefficients are `ScalarField`s) and are
/// evaluated pointwise into `FormValue`s. A strictly increasing multi-index
/// (i1 < ... < ik) is stored as the bitmask with bits i1..ik set.
/// Conventions: ι_X contracts the first slot and d(f dg) = df ∧ dg.
namespace extenso {

using MultiIndex = std::uint32_t;

inline int degree_of(MultiIndex I) { return __builtin_popcount(I); }
/// Increasing multi-indices of length k in {0..n-1}, lexicographic order.
const std::vector<MultiIndex>& multi_indices(int n, int k);
/// Sign of the permutation sorting the concatenation I·J; 0 when they share
/// an index.
int shuffle_sign(MultiIndex I, MultiIndex J);
/// "(1,3)" with 1-based positions.
std::string to_string(MultiIndex I);
MultiIndex make_index(std::initializer_list<int> slots);

/// Numeric k-form at one point: one coefficient per increasing multi-index.
class FormValue {
public:
    FormValue(int n, int k);

    int dim() const { return n_; }
    int degree() const { return k_; }
    const std::vector<MultiIndex>& indices() const { return *indices_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    std::vector<double>& coefficients() { return coeffs_; }

    double operator[](MultiIndex I) const;
    double& operator[](MultiIndex I);

    double max_abs() const;

    FormValue& operator+=(const FormValue& rhs);
    FormValue& operator-=(const FormValue& rhs);
    FormValue& operator*=(double s);
    friend FormValue operator+(FormValue a, const FormValue& b) { return a += b; }
    friend FormValue operator-(FormValue a, const FormValue& b) { return a -= b; }
    friend FormValue operator*(double s, FormValue a) { return a *= s; }

private:
    std::size_t position(MultiIndex I) const;
    void require_same_shape(const FormValue& other) const;

    int n_;
    int k_;
    const std::vector<MultiIndex>* indices_;
    std::vector<double> coeffs_;
};

/// Differential k-form on a chart of R^n; missing multi-indices are zero.
class KForm {
public:
    KForm(int n, int k);

    /// The 0-form f.
    static KForm function(const ScalarField& f);
    /// df.
    static KForm differential(const ScalarField& f);
    /// f dx^I.
    static KForm monomial(const ScalarField& f, MultiIndex I);

    int dim() const { return n_; }
    int degree() const { return k_; }
    const std::map<MultiIndex, ScalarField>& terms() const { return terms_; }
    /// Coefficient of dx^I (the zero field when absent).
    ScalarField coefficient(MultiIndex I) const;
    void set(MultiIndex I, ScalarField f);
    /// Adds f to the coefficient of dx^I.
    void accumulate(MultiIndex I, const ScalarField& f);

    FormValue operator()(std::span<const double> p) const;

    KForm& operator+=(const KForm& rhs);
    friend KForm operator+(KForm a, const KForm& b) { return a += b; }
    friend KForm operator-(KForm a, const KForm& b);
    friend KForm operator*(const ScalarField& f, const KForm& w);

private:
    int n_;
    int k_;
    std::map<MultiIndex, ScalarField> terms_;
};

/// Symmetric (0,2)-tensor field; only the upper triangle is stored.
class SymTensor2Field {
public:
    explicit SymTensor2Field(int n);

    int dim() const { return n_; }
    const ScalarField& operator()(int i, int j) const;
    void set(int i, int j, ScalarField f);
    Eigen::MatrixXd value(std::span<const double> p) const;

    friend SymTensor2Field operator*(const ScalarField& f, const SymTensor2Field& g);

private:
    int n_;
    std::vector<ScalarField> upper_;
};

/// Hess(Φ) as a tensor field; components are second partials of Φ.
SymTensor2Field hessian_tensor(const ScalarField& phi);

FormValue wedge(const FormValue& a, const FormValue& b);
KForm wedge(const KForm& a, const KForm& b);

KForm exterior_derivative(const KForm& w);
FormValue exterior_derivative(const KForm& w, std::span<const double> p);

KForm interior_product(const VectorField& x, const KForm& w);
FormValue interior_product(const VectorField& x, const KForm& w, std::span<const double> p);

/// L_X ω at p through Cartan's identity ι_X dω + d ι_X ω; df(X) for k = 0.
FormValue lie_derivative_form(const VectorField& x, const KForm& w, std::span<const double> p);
/// X(g_ij) + g_kj ∂_i X^k + g_ik ∂_j X^k at p.
Eigen::MatrixXd lie_derivative_sym2(const VectorField& x, const SymTensor2Field& g, std::span<const double> p);

/// F^*ω at p, on the source chart of F.
FormValue pullback(const SmoothMap& f, const KForm& w, std::span<const double> p);
/// F^*ω as a form field on the source chart.
KForm pullback(const SmoothMap& f, const KForm& w);
/// Pulls back a form value given the derivative of the map at the point.
FormValue pullback(const FormValue& w_at_image, const Eigen::MatrixXd& derivative);

} // namespace extenso
