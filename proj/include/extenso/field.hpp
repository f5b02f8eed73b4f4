#pragma once

#include "extenso/error.hpp"
#include "extenso/expr.hpp"
#include "extenso/jet.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace extenso {

using Point = std::vector<double>;

/// Open interval; either end may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

/// Axis-aligned open box.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> sides) : sides_(std::move(sides)) {}

    static Box unbounded(int dim) { return Box(std::vector<Interval>(dim)); }
    static Box positive_orthant(int dim) { return Box(std::vector<Interval>(dim, Interval{0.0})); }
    /// Cube of half-width `radius` around `center`.
    static Box around(std::span<const double> center, double radius);

    int dim() const { return int(sides_.size()); }
    const Interval& operator[](int i) const { return sides_[i]; }
    const std::vector<Interval>& sides() const { return sides_; }

    bool contains(std::span<const double> p) const;
    bool is_finite() const;
    bool is_empty() const;
    Box intersect(const Box& other) const;

private:
    std::vector<Interval> sides_;
};

/// Smooth real function on an open box of R^n. Evaluation is pure; the value
/// is shared and immutable, so copies are cheap and thread-safe.
class ScalarField {
public:
    class Node {
    public:
        virtual ~Node() = default;
        virtual double value(std::span<const double> p) const = 0;
        virtual Jet jet(std::span<const double> p, int order) const = 0;
        /// Highest jet order this node can deliver.
        virtual int max_order() const { return kMaxJetOrder; }
    };

    ScalarField() = default;
    ScalarField(int dim, Box domain, std::shared_ptr<const Node> node, double constant_value = nan_marker());

    static ScalarField constant(int dim, double c);
    static ScalarField coordinate(int dim, int slot);
    static ScalarField from_expression(const expr::Expression& e, std::vector<std::string> variables,
                                       const std::map<std::string, double>& constants, Box domain = {});
    static ScalarField parse(std::string_view source, std::vector<std::string> variables,
                             const std::map<std::string, double>& constants, Box domain = {});
    /// Hand-coded rule; `rule(p, order)` must return a jet of dimension `dim`.
    static ScalarField native(int dim, Box domain, std::function<Jet(std::span<const double>, int)> rule,
                              int max_order = kMaxJetOrder);

    int dim() const { return dim_; }
    const Box& domain() const { return domain_; }
    bool valid() const { return node_ != nullptr; }

    /// Value at p; DomainError outside the domain box.
    double operator()(std::span<const double> p) const;
    Jet jet(std::span<const double> p, int order) const;
    int max_order() const { return node_->max_order(); }

    /// True for a field built as a constant; used to skip structural zeros.
    bool is_constant() const { return !std::isnan(constant_); }
    bool is_zero() const { return is_constant() && constant_ == 0.0; }

    ScalarField with_domain(const Box& domain) const;
    /// Partial derivative along `slot`, as a field.
    ScalarField partial(int slot) const;

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator/(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(double s, const ScalarField& a);
    friend ScalarField operator-(const ScalarField& a) { return -1.0 * a; }

private:
    static double nan_marker() { return std::numeric_limits<double>::quiet_NaN(); }
    void check_domain(std::span<const double> p) const;

    int dim_ = 0;
    Box domain_;
    std::shared_ptr<const Node> node_;
    double constant_ = nan_marker();
};

ScalarField exp(const ScalarField& f);
ScalarField log(const ScalarField& f);

/// Smooth map from an open box of R^m to R^n.
class SmoothMap {
public:
    class Impl {
    public:
        virtual ~Impl() = default;
        virtual std::vector<double> value(std::span<const double> p) const = 0;
        virtual std::vector<Jet> jets(std::span<const double> p, int order) const = 0;
        virtual int max_order() const { return kMaxJetOrder; }
    };

    SmoothMap() = default;
    SmoothMap(int source_dim, int target_dim, Box domain, std::shared_ptr<const Impl> impl);

    static SmoothMap from_components(std::vector<ScalarField> components);
    static SmoothMap identity(int dim);
    static SmoothMap linear(const Eigen::MatrixXd& a);
    /// Hand-coded rule returning all component jets at once.
    static SmoothMap native(int source_dim, int target_dim, Box domain,
                            std::function<std::vector<Jet>(std::span<const double>, int)> rule,
                            int max_order = kMaxJetOrder);

    int source_dim() const { return m_; }
    int target_dim() const { return n_; }
    const Box& domain() const { return domain_; }
    int max_order() const { return impl_->max_order(); }

    std::vector<double> operator()(std::span<const double> p) const;
    std::vector<Jet> jets(std::span<const double> p, int order) const;
    ScalarField component(int i) const;

private:
    void check_domain(std::span<const double> p) const;

    int m_ = 0;
    int n_ = 0;
    Box domain_;
    std::shared_ptr<const Impl> impl_;
};

/// outer ∘ inner.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);
/// f ∘ g.
ScalarField compose(const ScalarField& f, const SmoothMap& g);

/// Jet of f at p up to `order` (0..3).
Jet jet_of(const ScalarField& f, std::span<const double> p, int order);
/// n×m matrix whose row i is the gradient of component i.
Eigen::MatrixXd jacobian(const SmoothMap& f, std::span<const double> p);
Eigen::MatrixXd hessian(const ScalarField& f, std::span<const double> p);

/// n component fields on a common box.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(std::vector<ScalarField> components);

    /// x^i ∂_i.
    static VectorField radial(int dim, Box domain = {});
    static VectorField parse(std::span<const std::string> components, std::vector<std::string> variables,
                             const std::map<std::string, double>& constants, Box domain = {});

    int dim() const { return int(components_.size()); }
    const Box& domain() const { return domain_; }
    const ScalarField& operator[](int i) const { return components_[i]; }
    const std::vector<ScalarField>& components() const { return components_; }

    std::vector<double> operator()(std::span<const double> p) const;
    Eigen::MatrixXd jacobian(std::span<const double> p) const;
    SmoothMap as_map() const { return SmoothMap::from_components(components_); }

private:
    std::vector<ScalarField> components_;
    Box domain_;
};

inline Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> p)
{
    return {p.data(), Eigen::Index(p.size())};
}

inline Point to_point(const Eigen::VectorXd& v) { return Point(v.data(), v.data() + v.size()); }

} // namespace extenso
