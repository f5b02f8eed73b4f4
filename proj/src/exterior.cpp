#include "extenso/exterior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

namespace extenso {

namespace {

constexpr int kMaxDim = 16;

std::vector<MultiIndex> build_indices(int n, int k)
{
    std::vector<MultiIndex> out;
    if (k < 0 || k > n)
        return out;
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i)
        c[i] = i;
    while (true) {
        MultiIndex m = 0;
        for (int i : c)
            m |= MultiIndex(1) << i;
        out.push_back(m);
        int i = k - 1;
        while (i >= 0 && c[i] == n - k + i)
            --i;
        if (i < 0)
            break;
        ++c[i];
        for (int j = i + 1; j < k; ++j)
            c[j] = c[j - 1] + 1;
    }
    return out;
}

// Number of set bits of I strictly below `slot`.
int count_below(MultiIndex I, int slot) { return __builtin_popcount(I & ((MultiIndex(1) << slot) - 1)); }

std::vector<int> slots_of(MultiIndex I)
{
    std::vector<int> s;
    for (int i = 0; I >> i; ++i)
        if (I & (MultiIndex(1) << i))
            s.push_back(i);
    return s;
}

void require_same_dim(int a, int b)
{
    if (a != b)
        throw DimensionMismatch("forms live on charts of different dimension (" + std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
}

ScalarField zero_field(int n) { return ScalarField::constant(n, 0.0); }

// Determinant of a k×k matrix of fields, by cofactor expansion along the
// first row.
ScalarField field_determinant(const std::vector<std::vector<ScalarField>>& m)
{
    const std::size_t k = m.size();
    if (k == 1)
        return m[0][0];
    const int n = m[0][0].dim();
    ScalarField det = zero_field(n);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::vector<ScalarField>> minor;
        for (std::size_t r = 1; r < k; ++r) {
            std::vector<ScalarField> row;
            for (std::size_t cc = 0; cc < k; ++cc)
                if (cc != c)
                    row.push_back(m[r][cc]);
            minor.push_back(std::move(row));
        }
        ScalarField term = m[0][c] * field_determinant(minor);
        det = (c % 2 == 0) ? det + term : det - term;
    }
    return det;
}

} // namespace

const std::vector<MultiIndex>& multi_indices(int n, int k)
{
    if (n < 0 || n > kMaxDim)
        throw DimensionMismatch("chart dimension out of range");
    static std::array<std::array<std::vector<MultiIndex>, kMaxDim + 2>, kMaxDim + 1> table;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int nn = 0; nn <= kMaxDim; ++nn)
            for (int kk = 0; kk <= kMaxDim + 1; ++kk)
                table[nn][kk] = build_indices(nn, kk);
    });
    if (k < 0 || k > kMaxDim + 1)
        throw DimensionMismatch("form degree out of range");
    return table[n][k];
}

int shuffle_sign(MultiIndex I, MultiIndex J)
{
    if (I & J)
        return 0;
    int inversions = 0;
    for (int j : slots_of(J))
        inversions += degree_of(I) - count_below(I, j + 1);
    return (inversions % 2) ? -1 : 1;
}

std::string to_string(MultiIndex I)
{
    std::string s = "(";
    bool first = true;
    for (int i : slots_of(I)) {
        if (!first)
            s += ",";
        s += std::to_string(i + 1);
        first = false;
    }
    return s + ")";
}

MultiIndex make_index(std::initializer_list<int> slots)
{
    MultiIndex m = 0;
    for (int s : slots)
        m |= MultiIndex(1) << s;
    return m;
}

// ---------------------------------------------------------------------------
// FormValue

FormValue::FormValue(int n, int k) : n_(n), k_(k), indices_(&multi_indices(n, k)), coeffs_(indices_->size(), 0.0) {}

std::size_t FormValue::position(MultiIndex I) const
{
    auto it = std::find(indices_->begin(), indices_->end(), I);
    if (it == indices_->end())
        throw DimensionMismatch("multi-index " + to_string(I) + " is not a valid index of this form");
    return std::size_t(it - indices_->begin());
}

double FormValue::operator[](MultiIndex I) const { return coeffs_[position(I)]; }
double& FormValue::operator[](MultiIndex I) { return coeffs_[position(I)]; }

double FormValue::max_abs() const
{
    double m = 0.0;
    for (double c : coeffs_)
        m = std::max(m, std::abs(c));
    return m;
}

void FormValue::require_same_shape(const FormValue& other) const
{
    if (n_ != other.n_ || k_ != other.k_)
        throw DimensionMismatch("form values of different shape");
}

FormValue& FormValue::operator+=(const FormValue& rhs)
{
    require_same_shape(rhs);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

FormValue& FormValue::operator-=(const FormValue& rhs)
{
    require_same_shape(rhs);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] -= rhs.coeffs_[i];
    return *this;
}

FormValue& FormValue::operator*=(double s)
{
    for (double& c : coeffs_)
        c *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// KForm

KForm::KForm(int n, int k) : n_(n), k_(k)
{
    if (k < 0)
        throw DimensionMismatch("negative form degree");
}

KForm KForm::function(const ScalarField& f)
{
    KForm w(f.dim(), 0);
    w.set(0, f);
    return w;
}

KForm KForm::differential(const ScalarField& f) { return exterior_derivative(function(f)); }

KForm KForm::monomial(const ScalarField& f, MultiIndex I)
{
    KForm w(f.dim(), degree_of(I));
    w.set(I, f);
    return w;
}

ScalarField KForm::coefficient(MultiIndex I) const
{
    auto it = terms_.find(I);
    return it == terms_.end() ? zero_field(n_) : it->second;
}

void KForm::set(MultiIndex I, ScalarField f)
{
    if (degree_of(I) != k_ || (n_ < 32 && (I >> n_) != 0))
        throw DimensionMismatch("multi-index " + to_string(I) + " does not fit a " + std::to_string(k_) +
                                "-form on R^" + std::to_string(n_));
    if (f.dim() != n_)
        throw DimensionMismatch("coefficient field dimension mismatch");
    if (f.is_zero())
        terms_.erase(I);
    else
        terms_.insert_or_assign(I, std::move(f));
}

void KForm::accumulate(MultiIndex I, const ScalarField& f)
{
    if (f.is_zero())
        return;
    auto it = terms_.find(I);
    set(I, it == terms_.end() ? f : it->second + f);
}

FormValue KForm::operator()(std::span<const double> p) const
{
    FormValue v(n_, k_);
    for (const auto& [I, f] : terms_)
        v[I] = f(p);
    return v;
}

KForm& KForm::operator+=(const KForm& rhs)
{
    require_same_dim(n_, rhs.n_);
    if (k_ != rhs.k_)
        throw DimensionMismatch("cannot add forms of different degree");
    for (const auto& [I, f] : rhs.terms_)
        accumulate(I, f);
    return *this;
}

KForm operator-(KForm a, const KForm& b)
{
    require_same_dim(a.n_, b.n_);
    if (a.k_ != b.k_)
        throw DimensionMismatch("cannot subtract forms of different degree");
    for (const auto& [I, f] : b.terms_)
        a.accumulate(I, -f);
    return a;
}

KForm operator*(const ScalarField& f, const KForm& w)
{
    KForm r(w.n_, w.k_);
    for (const auto& [I, g] : w.terms_)
        r.set(I, f * g);
    return r;
}

// ---------------------------------------------------------------------------
// SymTensor2Field

SymTensor2Field::SymTensor2Field(int n) : n_(n), upper_(std::size_t(n * (n + 1) / 2), zero_field(n)) {}

namespace {
std::size_t upper_position(int n, int i, int j)
{
    if (i > j)
        std::swap(i, j);
    return std::size_t(i * n - i * (i - 1) / 2 + (j - i));
}
} // namespace

const ScalarField& SymTensor2Field::operator()(int i, int j) const { return upper_[upper_position(n_, i, j)]; }

void SymTensor2Field::set(int i, int j, ScalarField f)
{
    if (f.dim() != n_)
        throw DimensionMismatch("tensor component dimension mismatch");
    upper_[upper_position(n_, i, j)] = std::move(f);
}

Eigen::MatrixXd SymTensor2Field::value(std::span<const double> p) const
{
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            m(i, j) = m(j, i) = (*this)(i, j)(p);
    return m;
}

SymTensor2Field operator*(const ScalarField& f, const SymTensor2Field& g)
{
    SymTensor2Field r(g.n_);
    for (int i = 0; i < g.n_; ++i)
        for (int j = i; j < g.n_; ++j)
            r.set(i, j, f * g(i, j));
    return r;
}

SymTensor2Field hessian_tensor(const ScalarField& phi)
{
    const int n = phi.dim();
    SymTensor2Field g(n);
    for (int i = 0; i < n; ++i) {
        ScalarField di = phi.partial(i);
        for (int j = i; j < n; ++j)
            g.set(i, j, di.partial(j));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Operations

FormValue wedge(const FormValue& a, const FormValue& b)
{
    require_same_dim(a.dim(), b.dim());
    FormValue r(a.dim(), a.degree() + b.degree());
    if (a.degree() + b.degree() > a.dim())
        return r;
    for (std::size_t i = 0; i < a.indices().size(); ++i) {
        const double ca = a.coefficients()[i];
        if (ca == 0.0)
            continue;
        for (std::size_t j = 0; j < b.indices().size(); ++j) {
            const MultiIndex I = a.indices()[i], J = b.indices()[j];
            const int s = shuffle_sign(I, J);
            if (s != 0)
                r[I | J] += s * ca * b.coefficients()[j];
        }
    }
    return r;
}

KForm wedge(const KForm& a, const KForm& b)
{
    require_same_dim(a.dim(), b.dim());
    KForm r(a.dim(), a.degree() + b.degree());
    if (a.degree() + b.degree() > a.dim())
        return r;
    for (const auto& [I, f] : a.terms())
        for (const auto& [J, g] : b.terms()) {
            const int s = shuffle_sign(I, J);
            if (s != 0)
                r.accumulate(I | J, double(s) * (f * g));
        }
    return r;
}

KForm exterior_derivative(const KForm& w)
{
    const int n = w.dim();
    KForm r(n, w.degree() + 1);
    if (w.degree() >= n)
        return r;
    for (const auto& [I, f] : w.terms())
        for (int i = 0; i < n; ++i) {
            if (I & (MultiIndex(1) << i))
                continue;
            const double sign = (count_below(I, i) % 2) ? -1.0 : 1.0;
            r.accumulate(I | (MultiIndex(1) << i), sign * f.partial(i));
        }
    return r;
}

FormValue exterior_derivative(const KForm& w, std::span<const double> p)
{
    const int n = w.dim();
    FormValue r(n, w.degree() + 1);
    if (w.degree() >= n)
        return r;
    for (const auto& [I, f] : w.terms()) {
        const Jet j = f.jet(p, 1);
        for (int i = 0; i < n; ++i) {
            if (I & (MultiIndex(1) << i))
                continue;
            const double sign = (count_below(I, i) % 2) ? -1.0 : 1.0;
            r[I | (MultiIndex(1) << i)] += sign * j.grad(i);
        }
    }
    return r;
}

KForm interior_product(const VectorField& x, const KForm& w)
{
    require_same_dim(x.dim(), w.dim());
    if (w.degree() == 0)
        throw DimensionMismatch("interior product of a 0-form");
    KForm r(w.dim(), w.degree() - 1);
    for (const auto& [I, f] : w.terms()) {
        int position = 0;
        for (int i : slots_of(I)) {
            const double sign = (position % 2) ? -1.0 : 1.0;
            r.accumulate(I & ~(MultiIndex(1) << i), sign * (x[i] * f));
            ++position;
        }
    }
    return r;
}

FormValue interior_product(const VectorField& x, const KForm& w, std::span<const double> p)
{
    require_same_dim(x.dim(), w.dim());
    if (w.degree() == 0)
        throw DimensionMismatch("interior product of a 0-form");
    const std::vector<double> xv = x(p);
    FormValue r(w.dim(), w.degree() - 1);
    for (const auto& [I, f] : w.terms()) {
        const double c = f(p);
        int position = 0;
        for (int i : slots_of(I)) {
            const double sign = (position % 2) ? -1.0 : 1.0;
            r[I & ~(MultiIndex(1) << i)] += sign * xv[i] * c;
            ++position;
        }
    }
    return r;
}

FormValue lie_derivative_form(const VectorField& x, const KForm& w, std::span<const double> p)
{
    require_same_dim(x.dim(), w.dim());
    if (w.degree() == 0) {
        FormValue r(w.dim(), 0);
        const Jet j = w.coefficient(0).jet(p, 1);
        const std::vector<double> xv = x(p);
        double s = 0.0;
        for (int i = 0; i < w.dim(); ++i)
            s += j.grad(i) * xv[i];
        r[0] = s;
        return r;
    }
    FormValue r = interior_product(x, exterior_derivative(w))(p);
    r += exterior_derivative(interior_product(x, w), p);
    return r;
}

Eigen::MatrixXd lie_derivative_sym2(const VectorField& x, const SymTensor2Field& g, std::span<const double> p)
{
    const int n = g.dim();
    require_same_dim(x.dim(), n);
    const std::vector<double> xv = x(p);
    const Eigen::MatrixXd dx = x.jacobian(p); // dx(k, i) = ∂_i X^k
    Eigen::MatrixXd gv(n, n), transport(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Jet c = g(i, j).jet(p, 1);
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += xv[k] * c.grad(k);
            gv(i, j) = gv(j, i) = c.value();
            transport(i, j) = transport(j, i) = s;
        }
    return transport + dx.transpose() * gv + gv * dx;
}

FormValue pullback(const FormValue& w, const Eigen::MatrixXd& d)
{
    const int k = w.degree();
    const int m = int(d.cols());
    if (d.rows() != w.dim())
        throw DimensionMismatch("derivative rows must match the target chart dimension");
    FormValue r(m, k);
    if (k == 0) {
        r.coefficients()[0] = w.coefficients()[0];
        return r;
    }
    for (std::size_t a = 0; a < w.indices().size(); ++a) {
        const double c = w.coefficients()[a];
        if (c == 0.0)
            continue;
        const std::vector<int> rows = slots_of(w.indices()[a]);
        for (std::size_t b = 0; b < r.indices().size(); ++b) {
            const std::vector<int> cols = slots_of(r.indices()[b]);
            Eigen::MatrixXd minor(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    minor(i, j) = d(rows[i], cols[j]);
            r.coefficients()[b] += c * minor.determinant();
        }
    }
    return r;
}

FormValue pullback(const SmoothMap& f, const KForm& w, std::span<const double> p)
{
    if (f.target_dim() != w.dim())
        throw DimensionMismatch("map target dimension must match the form's chart");
    const std::vector<double> q = f(p);
    return pullback(w(q), jacobian(f, p));
}

KForm pullback(const SmoothMap& f, const KForm& w)
{
    if (f.target_dim() != w.dim())
        throw DimensionMismatch("map target dimension must match the form's chart");
    const int m = f.source_dim();
    const int k = w.degree();
    KForm r(m, k);
    std::vector<std::vector<ScalarField>> partials(f.target_dim());
    if (k > 0)
        for (int i = 0; i < f.target_dim(); ++i) {
            ScalarField fi = f.component(i);
            for (int j = 0; j < m; ++j)
                partials[i].push_back(fi.partial(j));
        }
    for (const auto& [I, c] : w.terms()) {
        ScalarField at_image = compose(c, f);
        if (k == 0) {
            r.accumulate(0, at_image);
            continue;
        }
        const std::vector<int> rows = slots_of(I);
        for (MultiIndex J : multi_indices(m, k)) {
            const std::vector<int> cols = slots_of(J);
            std::vector<std::vector<ScalarField>> minor(k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    minor[i].push_back(partials[rows[i]][cols[j]]);
            r.accumulate(J, at_image * field_determinant(minor));
        }
    }
    return r;
}

} // namespace extenso
