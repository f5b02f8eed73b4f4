#include "extenso/jet.hpp"

#include "extenso/error.hpp"

#include <cmath>
#include <string>

namespace extenso {

namespace {

std::size_t storage_size(int dim, int order)
{
    std::size_t n = std::size_t(dim);
    std::size_t size = 1;
    if (order >= 1)
        size += n;
    if (order >= 2)
        size += n * n;
    if (order >= 3)
        size += n * n * n;
    return size;
}

bool is_integral(double x) { return std::isfinite(x) && std::floor(x) == x; }

// r (r-1) ... (r-k+1) x^(r-k), with the zero coefficient short-circuiting so
// that 0^(negative) never appears for polynomial exponents.
double power_derivative(double x, double r, int k)
{
    double coef = 1.0;
    for (int i = 0; i < k; ++i)
        coef *= r - i;
    if (coef == 0.0)
        return 0.0;
    return coef * std::pow(x, r - k);
}

} // namespace

Jet::Jet(int dim, int order, double value) : dim_(dim), order_(order), data_(storage_size(dim, order), 0.0)
{
    if (order < 0 || order > kMaxJetOrder)
        throw JetMismatch("jet order must lie in 0.." + std::to_string(kMaxJetOrder));
    if (dim < 0)
        throw JetMismatch("jet dimension must be non-negative");
    data_[0] = value;
}

Jet Jet::variable(int dim, int order, int slot, double value)
{
    Jet j(dim, order, value);
    if (slot < 0 || slot >= dim)
        throw JetMismatch("variable slot out of range");
    if (order >= 1)
        j.grad(slot) = 1.0;
    return j;
}

bool Jet::is_constant() const
{
    for (std::size_t i = 1; i < data_.size(); ++i)
        if (data_[i] != 0.0)
            return false;
    return true;
}

void Jet::require_same_shape(const Jet& other) const
{
    if (dim_ != other.dim_ || order_ != other.order_)
        throw JetMismatch("jet shape mismatch: (" + std::to_string(dim_) + "," + std::to_string(order_) + ") vs (" +
                          std::to_string(other.dim_) + "," + std::to_string(other.order_) + ")");
}

Jet Jet::partial(int slot) const
{
    if (order_ < 1)
        throw JetMismatch("partial derivative of an order-0 jet");
    const int n = dim_;
    Jet r(n, order_ - 1, grad(slot));
    if (order_ >= 2)
        for (int j = 0; j < n; ++j)
            r.grad(j) = hess(slot, j);
    if (order_ >= 3)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                r.hess(j, k) = third(slot, j, k);
    return r;
}

Jet Jet::truncated(int order) const
{
    if (order > order_)
        throw JetMismatch("cannot raise the order of a jet");
    Jet r(dim_, order);
    std::copy_n(data_.begin(), r.data_.size(), r.data_.begin());
    return r;
}

Jet Jet::operator-() const
{
    Jet r = *this;
    for (double& x : r.data_)
        x = -x;
    return r;
}

Jet& Jet::operator+=(const Jet& rhs)
{
    require_same_shape(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += rhs.data_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs)
{
    require_same_shape(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= rhs.data_[i];
    return *this;
}

Jet& Jet::operator*=(double s)
{
    for (double& x : data_)
        x *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b)
{
    a.require_same_shape(b);
    const int n = a.dim_;
    const double a0 = a.value(), b0 = b.value();
    Jet c(n, a.order_, a0 * b0);
    if (a.order_ >= 1)
        for (int i = 0; i < n; ++i)
            c.grad(i) = a.grad(i) * b0 + a0 * b.grad(i);
    if (a.order_ >= 2)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                c.hess(i, j) = a.hess(i, j) * b0 + a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i) + a0 * b.hess(i, j);
    if (a.order_ >= 3)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    c.third(i, j, k) = a.third(i, j, k) * b0 + a.hess(i, j) * b.grad(k) + a.hess(i, k) * b.grad(j) +
                                       a.hess(j, k) * b.grad(i) + a.grad(i) * b.hess(j, k) +
                                       a.grad(j) * b.hess(i, k) + a.grad(k) * b.hess(i, j) + a0 * b.third(i, j, k);
    return c;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet compose_univariate(const std::array<double, 4>& d, const Jet& u)
{
    const int n = u.dim();
    const int order = u.order();
    Jet r(n, order, d[0]);
    if (order >= 1)
        for (int i = 0; i < n; ++i)
            r.grad(i) = d[1] * u.grad(i);
    if (order >= 2)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r.hess(i, j) = d[2] * u.grad(i) * u.grad(j) + d[1] * u.hess(i, j);
    if (order >= 3)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    r.third(i, j, k) =
                        d[3] * u.grad(i) * u.grad(j) * u.grad(k) +
                        d[2] * (u.hess(i, j) * u.grad(k) + u.hess(i, k) * u.grad(j) + u.hess(j, k) * u.grad(i)) +
                        d[1] * u.third(i, j, k);
    return r;
}

Jet compose(const Jet& outer, std::span<const Jet> inner)
{
    const int m = outer.dim();
    if (std::size_t(m) != inner.size())
        throw JetMismatch("outer jet dimension does not match the number of inner jets");
    if (inner.empty())
        throw JetMismatch("composition with an empty map");
    const int n = inner[0].dim();
    const int order = inner[0].order();
    for (const Jet& u : inner)
        if (u.dim() != n || u.order() != order)
            throw JetMismatch("inner jets of a composition must share their shape");
    if (outer.order() < order)
        throw JetMismatch("outer jet order too low for composition");

    Jet r(n, order, outer.value());
    if (order >= 1)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int a = 0; a < m; ++a)
                s += outer.grad(a) * inner[a].grad(i);
            r.grad(i) = s;
        }
    if (order >= 2)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int a = 0; a < m; ++a) {
                    s += outer.grad(a) * inner[a].hess(i, j);
                    for (int b = 0; b < m; ++b)
                        s += outer.hess(a, b) * inner[a].grad(i) * inner[b].grad(j);
                }
                r.hess(i, j) = s;
            }
    if (order >= 3)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (int a = 0; a < m; ++a) {
                        const Jet& ua = inner[a];
                        s += outer.grad(a) * ua.third(i, j, k);
                        for (int b = 0; b < m; ++b) {
                            const Jet& ub = inner[b];
                            s += outer.hess(a, b) *
                                 (ua.hess(i, j) * ub.grad(k) + ua.hess(i, k) * ub.grad(j) + ua.hess(j, k) * ub.grad(i));
                            for (int c = 0; c < m; ++c)
                                s += outer.third(a, b, c) * ua.grad(i) * ub.grad(j) * inner[c].grad(k);
                        }
                    }
                    r.third(i, j, k) = s;
                }
    return r;
}

Jet reciprocal(const Jet& x)
{
    const double v = x.value();
    if (v == 0.0)
        throw DomainError("division by zero");
    const double inv = 1.0 / v;
    return compose_univariate({inv, -inv * inv, 2.0 * inv * inv * inv, -6.0 * inv * inv * inv * inv}, x);
}

Jet exp(const Jet& x)
{
    const double e = std::exp(x.value());
    return compose_univariate({e, e, e, e}, x);
}

Jet log(const Jet& x)
{
    const double v = x.value();
    if (!(v > 0.0))
        throw DomainError("ln of non-positive argument " + std::to_string(v));
    const double inv = 1.0 / v;
    return compose_univariate({std::log(v), inv, -inv * inv, 2.0 * inv * inv * inv}, x);
}

double checked_pow(double base, double exponent)
{
    if (is_integral(exponent)) {
        if (base == 0.0 && exponent < 0.0)
            throw DomainError("0 raised to a negative power");
    } else if (!(base > 0.0)) {
        throw DomainError("non-integer power of non-positive base " + std::to_string(base));
    }
    return std::pow(base, exponent);
}

Jet pow(const Jet& base, double r)
{
    const double x = base.value();
    const double v = checked_pow(x, r);
    return compose_univariate({v, power_derivative(x, r, 1), power_derivative(x, r, 2), power_derivative(x, r, 3)},
                              base);
}

Jet pow(const Jet& base, const Jet& exponent)
{
    if (exponent.is_constant())
        return pow(base, exponent.value());
    if (!(base.value() > 0.0))
        throw DomainError("variable exponent requires a positive base");
    return exp(exponent * log(base));
}

Jet atan(const Jet& x)
{
    const double v = x.value();
    const double q = 1.0 / (1.0 + v * v);
    return compose_univariate({std::atan(v), q, -2.0 * v * q * q, (6.0 * v * v - 2.0) * q * q * q}, x);
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

} // namespace extenso
