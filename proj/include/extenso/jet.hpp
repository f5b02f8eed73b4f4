#pragma once

#include <array>
#include <span>
#include <vector>

namespace extenso {

inline constexpr int kMaxJetOrder = 3;

/// Truncated Taylor expansion of a scalar function of `dim` variables at a
/// point: value, gradient, Hessian and third-derivative tensor, each present
/// only up to `order`. Higher blocks are stored densely and are symmetric by
/// construction of every operation below.
class Jet {
public:
    Jet() = default;
    Jet(int dim, int order, double value = 0.0);

    static Jet constant(int dim, int order, double value) { return Jet(dim, order, value); }
    /// Seed for the coordinate in `slot`.
    static Jet variable(int dim, int order, int slot, double value);

    int dim() const { return dim_; }
    int order() const { return order_; }

    double value() const { return data_[0]; }
    double grad(int i) const { return data_[1 + i]; }
    double hess(int i, int j) const { return data_[hess_offset() + i * dim_ + j]; }
    double third(int i, int j, int k) const { return data_[third_offset() + (i * dim_ + j) * dim_ + k]; }

    double& value() { return data_[0]; }
    double& grad(int i) { return data_[1 + i]; }
    double& hess(int i, int j) { return data_[hess_offset() + i * dim_ + j]; }
    double& third(int i, int j, int k) { return data_[third_offset() + (i * dim_ + j) * dim_ + k]; }

    std::span<const double> gradient() const { return {data_.data() + 1, order_ >= 1 ? std::size_t(dim_) : 0}; }
    std::span<const double> raw() const { return data_; }

    /// True when every derivative entry is exactly zero.
    bool is_constant() const;

    /// Jet of the partial derivative along `slot`; the order drops by one.
    Jet partial(int slot) const;
    /// Same expansion with blocks above `order` dropped.
    Jet truncated(int order) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(double s);
    Jet& operator+=(double s)
    {
        data_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

private:
    std::size_t hess_offset() const { return 1 + std::size_t(dim_); }
    std::size_t third_offset() const { return 1 + std::size_t(dim_) + std::size_t(dim_) * dim_; }
    void require_same_shape(const Jet& other) const;

    int dim_ = 0;
    int order_ = 0;
    std::vector<double> data_{0.0};
};

/// Composition g∘u for a univariate g given its derivatives g, g', g'', g'''
/// at u.value().
Jet compose_univariate(const std::array<double, 4>& derivs, const Jet& u);

/// Multivariate chain rule: `outer` is the jet of g (in inner.size()
/// variables) at the point (inner[a].value()), `inner` are jets of the map
/// components in a common set of variables.
Jet compose(const Jet& outer, std::span<const Jet> inner);

Jet reciprocal(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet pow(const Jet& base, double exponent);
/// Real power whose exponent may itself vary; a constant exponent falls back
/// to pow(base, double) and keeps its domain rules.
Jet pow(const Jet& base, const Jet& exponent);
Jet atan(const Jet& x);
Jet sqrt(const Jet& x);

/// Scalar power with the domain rules shared by jets and plain evaluation:
/// integral exponents accept any base except 0^negative, other exponents need
/// a positive base.
double checked_pow(double base, double exponent);

} // namespace extenso
