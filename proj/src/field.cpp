#include "extenso/field.hpp"

#include <algorithm>
#include <cmath>

namespace extenso {

// ---------------------------------------------------------------------------
// Box

Box Box::around(std::span<const double> center, double radius)
{
    std::vector<Interval> sides;
    sides.reserve(center.size());
    for (double c : center)
        sides.push_back({c - radius, c + radius});
    return Box(std::move(sides));
}

bool Box::contains(std::span<const double> p) const
{
    if (p.size() != sides_.size())
        return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p[i] > sides_[i].lo && p[i] < sides_[i].hi))
            return false;
    return true;
}

bool Box::is_finite() const
{
    return std::all_of(sides_.begin(), sides_.end(),
                       [](const Interval& s) { return std::isfinite(s.lo) && std::isfinite(s.hi); });
}

bool Box::is_empty() const
{
    return std::any_of(sides_.begin(), sides_.end(), [](const Interval& s) { return !(s.lo < s.hi); });
}

Box Box::intersect(const Box& other) const
{
    if (other.dim() != dim())
        throw DimensionMismatch("box dimensions differ");
    std::vector<Interval> sides(sides_.size());
    for (std::size_t i = 0; i < sides.size(); ++i)
        sides[i] = {std::max(sides_[i].lo, other.sides_[i].lo), std::min(sides_[i].hi, other.sides_[i].hi)};
    return Box(std::move(sides));
}

// ---------------------------------------------------------------------------
// ScalarField nodes

namespace {

using Node = ScalarField::Node;

class ConstantNode final : public Node {
public:
    ConstantNode(int dim, double c) : dim_(dim), c_(c) {}
    double value(std::span<const double>) const override { return c_; }
    Jet jet(std::span<const double>, int order) const override { return Jet::constant(dim_, order, c_); }

private:
    int dim_;
    double c_;
};

class CoordinateNode final : public Node {
public:
    CoordinateNode(int dim, int slot) : dim_(dim), slot_(slot) {}
    double value(std::span<const double> p) const override { return p[slot_]; }
    Jet jet(std::span<const double> p, int order) const override
    {
        return Jet::variable(dim_, order, slot_, p[slot_]);
    }

private:
    int dim_;
    int slot_;
};

class ExpressionNode final : public Node {
public:
    explicit ExpressionNode(expr::CompiledExpression e) : e_(std::move(e)) {}
    double value(std::span<const double> p) const override { return e_.value(p); }
    Jet jet(std::span<const double> p, int order) const override { return e_.jet(p, order); }

private:
    expr::CompiledExpression e_;
};

class NativeNode final : public Node {
public:
    NativeNode(std::function<Jet(std::span<const double>, int)> rule, int max_order)
        : rule_(std::move(rule)), max_order_(max_order)
    {
    }
    double value(std::span<const double> p) const override { return rule_(p, 0).value(); }
    Jet jet(std::span<const double> p, int order) const override
    {
        if (order > max_order_)
            throw JetMismatch("native field supports jets up to order " + std::to_string(max_order_));
        return rule_(p, order);
    }
    int max_order() const override { return max_order_; }

private:
    std::function<Jet(std::span<const double>, int)> rule_;
    int max_order_;
};

class SumNode final : public Node {
public:
    SumNode(ScalarField a, ScalarField b, double sign) : a_(std::move(a)), b_(std::move(b)), sign_(sign) {}
    double value(std::span<const double> p) const override { return a_(p) + sign_ * b_(p); }
    Jet jet(std::span<const double> p, int order) const override
    {
        Jet r = a_.jet(p, order);
        if (sign_ > 0)
            r += b_.jet(p, order);
        else
            r -= b_.jet(p, order);
        return r;
    }
    int max_order() const override { return std::min(a_.max_order(), b_.max_order()); }

private:
    ScalarField a_, b_;
    double sign_;
};

class ProductNode final : public Node {
public:
    ProductNode(ScalarField a, ScalarField b) : a_(std::move(a)), b_(std::move(b)) {}
    double value(std::span<const double> p) const override { return a_(p) * b_(p); }
    Jet jet(std::span<const double> p, int order) const override { return a_.jet(p, order) * b_.jet(p, order); }
    int max_order() const override { return std::min(a_.max_order(), b_.max_order()); }

private:
    ScalarField a_, b_;
};

class QuotientNode final : public Node {
public:
    QuotientNode(ScalarField a, ScalarField b) : a_(std::move(a)), b_(std::move(b)) {}
    double value(std::span<const double> p) const override
    {
        const double d = b_(p);
        if (d == 0.0)
            throw DomainError("division by zero");
        return a_(p) / d;
    }
    Jet jet(std::span<const double> p, int order) const override { return a_.jet(p, order) / b_.jet(p, order); }
    int max_order() const override { return std::min(a_.max_order(), b_.max_order()); }

private:
    ScalarField a_, b_;
};

class ScaleNode final : public Node {
public:
    ScaleNode(double s, ScalarField a) : s_(s), a_(std::move(a)) {}
    double value(std::span<const double> p) const override { return s_ * a_(p); }
    Jet jet(std::span<const double> p, int order) const override { return s_ * a_.jet(p, order); }
    int max_order() const override { return a_.max_order(); }

private:
    double s_;
    ScalarField a_;
};

class UnaryNode final : public Node {
public:
    enum class Kind { exp, log };
    UnaryNode(Kind k, ScalarField a) : k_(k), a_(std::move(a)) {}
    double value(std::span<const double> p) const override
    {
        const double v = a_(p);
        if (k_ == Kind::exp)
            return std::exp(v);
        if (!(v > 0.0))
            throw DomainError("ln of non-positive argument");
        return std::log(v);
    }
    Jet jet(std::span<const double> p, int order) const override
    {
        return k_ == Kind::exp ? exp(a_.jet(p, order)) : log(a_.jet(p, order));
    }
    int max_order() const override { return a_.max_order(); }

private:
    Kind k_;
    ScalarField a_;
};

class PartialNode final : public Node {
public:
    PartialNode(ScalarField f, int slot) : f_(std::move(f)), slot_(slot) {}
    double value(std::span<const double> p) const override { return f_.jet(p, 1).grad(slot_); }
    Jet jet(std::span<const double> p, int order) const override
    {
        if (order + 1 > f_.max_order())
            throw JetMismatch("partial derivative field needs a jet of order " + std::to_string(order + 1));
        return f_.jet(p, order + 1).partial(slot_);
    }
    int max_order() const override { return f_.max_order() - 1; }

private:
    ScalarField f_;
    int slot_;
};

class ComposeNode final : public Node {
public:
    ComposeNode(ScalarField f, SmoothMap g) : f_(std::move(f)), g_(std::move(g)) {}
    double value(std::span<const double> p) const override { return f_(g_(p)); }
    Jet jet(std::span<const double> p, int order) const override
    {
        const std::vector<Jet> inner = g_.jets(p, order);
        std::vector<double> at(inner.size());
        for (std::size_t i = 0; i < inner.size(); ++i)
            at[i] = inner[i].value();
        return compose(f_.jet(at, order), inner);
    }
    int max_order() const override { return std::min(f_.max_order(), g_.max_order()); }

private:
    ScalarField f_;
    SmoothMap g_;
};

class MapComponentNode final : public Node {
public:
    MapComponentNode(SmoothMap g, int i) : g_(std::move(g)), i_(i) {}
    double value(std::span<const double> p) const override { return g_(p)[i_]; }
    Jet jet(std::span<const double> p, int order) const override { return g_.jets(p, order)[i_]; }
    int max_order() const override { return g_.max_order(); }

private:
    SmoothMap g_;
    int i_;
};

Box merged_domain(const ScalarField& a, const ScalarField& b)
{
    if (a.dim() != b.dim())
        throw DimensionMismatch("field dimensions differ: " + std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
    return a.domain().intersect(b.domain());
}

} // namespace

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(int dim, Box domain, std::shared_ptr<const Node> node, double constant_value)
    : dim_(dim), domain_(domain.dim() == 0 ? Box::unbounded(dim) : std::move(domain)), node_(std::move(node)),
      constant_(constant_value)
{
    if (domain_.dim() != dim_)
        throw DimensionMismatch("domain box dimension does not match field dimension");
}

ScalarField ScalarField::constant(int dim, double c)
{
    return ScalarField(dim, {}, std::make_shared<ConstantNode>(dim, c), c);
}

ScalarField ScalarField::coordinate(int dim, int slot)
{
    if (slot < 0 || slot >= dim)
        throw DimensionMismatch("coordinate slot out of range");
    return ScalarField(dim, {}, std::make_shared<CoordinateNode>(dim, slot));
}

ScalarField ScalarField::from_expression(const expr::Expression& e, std::vector<std::string> variables,
                                         const std::map<std::string, double>& constants, Box domain)
{
    const int dim = int(variables.size());
    return ScalarField(dim, std::move(domain),
                       std::make_shared<ExpressionNode>(expr::CompiledExpression(e, variables, constants)));
}

ScalarField ScalarField::parse(std::string_view source, std::vector<std::string> variables,
                               const std::map<std::string, double>& constants, Box domain)
{
    return from_expression(expr::parse(source), std::move(variables), constants, std::move(domain));
}

ScalarField ScalarField::native(int dim, Box domain, std::function<Jet(std::span<const double>, int)> rule,
                                int max_order)
{
    return ScalarField(dim, std::move(domain), std::make_shared<NativeNode>(std::move(rule), max_order));
}

void ScalarField::check_domain(std::span<const double> p) const
{
    if (int(p.size()) != dim_)
        throw DimensionMismatch("point dimension " + std::to_string(p.size()) + " does not match field dimension " +
                                std::to_string(dim_));
    if (!domain_.contains(p))
        throw DomainError("point outside the field's domain box");
}

double ScalarField::operator()(std::span<const double> p) const
{
    check_domain(p);
    return node_->value(p);
}

Jet ScalarField::jet(std::span<const double> p, int order) const
{
    check_domain(p);
    return node_->jet(p, order);
}

ScalarField ScalarField::with_domain(const Box& domain) const
{
    ScalarField f = *this;
    f.domain_ = domain;
    if (domain.dim() != dim_)
        throw DimensionMismatch("domain box dimension does not match field dimension");
    return f;
}

ScalarField ScalarField::partial(int slot) const
{
    if (is_constant())
        return constant(dim_, 0.0).with_domain(domain_);
    return ScalarField(dim_, domain_, std::make_shared<PartialNode>(*this, slot));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b)
{
    Box d = merged_domain(a, b);
    if (a.is_constant() && b.is_constant())
        return ScalarField::constant(a.dim(), a.constant_ + b.constant_).with_domain(d);
    if (a.is_zero())
        return b.with_domain(d);
    if (b.is_zero())
        return a.with_domain(d);
    return ScalarField(a.dim(), d, std::make_shared<SumNode>(a, b, 1.0));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b)
{
    Box d = merged_domain(a, b);
    if (a.is_constant() && b.is_constant())
        return ScalarField::constant(a.dim(), a.constant_ - b.constant_).with_domain(d);
    if (b.is_zero())
        return a.with_domain(d);
    return ScalarField(a.dim(), d, std::make_shared<SumNode>(a, b, -1.0));
}

ScalarField operator*(const ScalarField& a, const ScalarField& b)
{
    Box d = merged_domain(a, b);
    if (a.is_constant() && b.is_constant())
        return ScalarField::constant(a.dim(), a.constant_ * b.constant_).with_domain(d);
    if (a.is_zero() || b.is_zero())
        return ScalarField::constant(a.dim(), 0.0).with_domain(d);
    if (a.is_constant())
        return (a.constant_ * b).with_domain(d);
    if (b.is_constant())
        return (b.constant_ * a).with_domain(d);
    return ScalarField(a.dim(), d, std::make_shared<ProductNode>(a, b));
}

ScalarField operator/(const ScalarField& a, const ScalarField& b)
{
    Box d = merged_domain(a, b);
    if (b.is_constant() && b.constant_ != 0.0)
        return ((1.0 / b.constant_) * a).with_domain(d);
    return ScalarField(a.dim(), d, std::make_shared<QuotientNode>(a, b));
}

ScalarField operator*(double s, const ScalarField& a)
{
    if (a.is_constant())
        return ScalarField::constant(a.dim(), s * a.constant_).with_domain(a.domain());
    if (s == 0.0)
        return ScalarField::constant(a.dim(), 0.0).with_domain(a.domain());
    if (s == 1.0)
        return a;
    return ScalarField(a.dim(), a.domain(), std::make_shared<ScaleNode>(s, a));
}

ScalarField exp(const ScalarField& f)
{
    return ScalarField(f.dim(), f.domain(), std::make_shared<UnaryNode>(UnaryNode::Kind::exp, f));
}

ScalarField log(const ScalarField& f)
{
    return ScalarField(f.dim(), f.domain(), std::make_shared<UnaryNode>(UnaryNode::Kind::log, f));
}

// ---------------------------------------------------------------------------
// SmoothMap

namespace {

class ComponentsImpl final : public SmoothMap::Impl {
public:
    explicit ComponentsImpl(std::vector<ScalarField> c) : c_(std::move(c)) {}
    std::vector<double> value(std::span<const double> p) const override
    {
        std::vector<double> v(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i)
            v[i] = c_[i](p);
        return v;
    }
    std::vector<Jet> jets(std::span<const double> p, int order) const override
    {
        std::vector<Jet> v;
        v.reserve(c_.size());
        for (const auto& f : c_)
            v.push_back(f.jet(p, order));
        return v;
    }
    int max_order() const override
    {
        int m = kMaxJetOrder;
        for (const auto& f : c_)
            m = std::min(m, f.max_order());
        return m;
    }

private:
    std::vector<ScalarField> c_;
};

class NativeMapImpl final : public SmoothMap::Impl {
public:
    NativeMapImpl(std::function<std::vector<Jet>(std::span<const double>, int)> rule, int max_order)
        : rule_(std::move(rule)), max_order_(max_order)
    {
    }
    std::vector<double> value(std::span<const double> p) const override
    {
        std::vector<Jet> j = rule_(p, 0);
        std::vector<double> v(j.size());
        for (std::size_t i = 0; i < j.size(); ++i)
            v[i] = j[i].value();
        return v;
    }
    std::vector<Jet> jets(std::span<const double> p, int order) const override
    {
        if (order > max_order_)
            throw JetMismatch("native map supports jets up to order " + std::to_string(max_order_));
        return rule_(p, order);
    }
    int max_order() const override { return max_order_; }

private:
    std::function<std::vector<Jet>(std::span<const double>, int)> rule_;
    int max_order_;
};

class ComposeMapImpl final : public SmoothMap::Impl {
public:
    ComposeMapImpl(SmoothMap outer, SmoothMap inner) : outer_(std::move(outer)), inner_(std::move(inner)) {}
    std::vector<double> value(std::span<const double> p) const override { return outer_(inner_(p)); }
    std::vector<Jet> jets(std::span<const double> p, int order) const override
    {
        const std::vector<Jet> in = inner_.jets(p, order);
        std::vector<double> at(in.size());
        for (std::size_t i = 0; i < in.size(); ++i)
            at[i] = in[i].value();
        const std::vector<Jet> out = outer_.jets(at, order);
        std::vector<Jet> r;
        r.reserve(out.size());
        for (const Jet& o : out)
            r.push_back(compose(o, in));
        return r;
    }
    int max_order() const override { return std::min(outer_.max_order(), inner_.max_order()); }

private:
    SmoothMap outer_;
    SmoothMap inner_;
};

} // namespace

SmoothMap::SmoothMap(int source_dim, int target_dim, Box domain, std::shared_ptr<const Impl> impl)
    : m_(source_dim), n_(target_dim), domain_(domain.dim() == 0 ? Box::unbounded(source_dim) : std::move(domain)),
      impl_(std::move(impl))
{
}

SmoothMap SmoothMap::from_components(std::vector<ScalarField> components)
{
    if (components.empty())
        throw DimensionMismatch("a smooth map needs at least one component");
    const int m = components[0].dim();
    Box d = components[0].domain();
    for (const auto& c : components)
        d = merged_domain(components[0], c).intersect(d);
    const int n = int(components.size());
    return SmoothMap(m, n, d, std::make_shared<ComponentsImpl>(std::move(components)));
}

SmoothMap SmoothMap::identity(int dim)
{
    std::vector<ScalarField> c;
    for (int i = 0; i < dim; ++i)
        c.push_back(ScalarField::coordinate(dim, i));
    return from_components(std::move(c));
}

SmoothMap SmoothMap::linear(const Eigen::MatrixXd& a)
{
    const int n = int(a.rows()), m = int(a.cols());
    return native(m, n, {}, [a, n, m](std::span<const double> p, int order) {
        std::vector<Jet> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) {
            Jet j(m, order, (a.row(i) * as_eigen(p)).value());
            if (order >= 1)
                for (int k = 0; k < m; ++k)
                    j.grad(k) = a(i, k);
            out.push_back(std::move(j));
        }
        return out;
    });
}

SmoothMap SmoothMap::native(int source_dim, int target_dim, Box domain,
                            std::function<std::vector<Jet>(std::span<const double>, int)> rule, int max_order)
{
    return SmoothMap(source_dim, target_dim, std::move(domain),
                     std::make_shared<NativeMapImpl>(std::move(rule), max_order));
}

void SmoothMap::check_domain(std::span<const double> p) const
{
    if (int(p.size()) != m_)
        throw DimensionMismatch("point dimension does not match map source dimension");
    if (!domain_.contains(p))
        throw DomainError("point outside the map's domain box");
}

std::vector<double> SmoothMap::operator()(std::span<const double> p) const
{
    check_domain(p);
    return impl_->value(p);
}

std::vector<Jet> SmoothMap::jets(std::span<const double> p, int order) const
{
    check_domain(p);
    return impl_->jets(p, order);
}

ScalarField SmoothMap::component(int i) const
{
    return ScalarField(m_, domain_, std::make_shared<MapComponentNode>(*this, i));
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner)
{
    if (outer.source_dim() != inner.target_dim())
        throw DimensionMismatch("composition dimensions do not chain");
    return SmoothMap(inner.source_dim(), outer.target_dim(), inner.domain(),
                     std::make_shared<ComposeMapImpl>(outer, inner));
}

ScalarField compose(const ScalarField& f, const SmoothMap& g)
{
    if (f.dim() != g.target_dim())
        throw DimensionMismatch("composition dimensions do not chain");
    return ScalarField(g.source_dim(), g.domain(), std::make_shared<ComposeNode>(f, g));
}

// ---------------------------------------------------------------------------

Jet jet_of(const ScalarField& f, std::span<const double> p, int order)
{
    if (order < 0 || order > kMaxJetOrder)
        throw JetMismatch("jet order must lie in 0..3");
    return f.jet(p, order);
}

Eigen::MatrixXd jacobian(const SmoothMap& f, std::span<const double> p)
{
    const std::vector<Jet> j = f.jets(p, 1);
    Eigen::MatrixXd out(f.target_dim(), f.source_dim());
    for (int i = 0; i < f.target_dim(); ++i)
        for (int k = 0; k < f.source_dim(); ++k)
            out(i, k) = j[i].grad(k);
    return out;
}

Eigen::MatrixXd hessian(const ScalarField& f, std::span<const double> p)
{
    const Jet j = f.jet(p, 2);
    Eigen::MatrixXd h(f.dim(), f.dim());
    for (int i = 0; i < f.dim(); ++i)
        for (int k = 0; k < f.dim(); ++k)
            h(i, k) = j.hess(i, k);
    return h;
}

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(std::vector<ScalarField> components) : components_(std::move(components))
{
    const int n = int(components_.size());
    domain_ = Box::unbounded(n);
    for (const auto& c : components_) {
        if (c.dim() != n)
            throw DimensionMismatch("vector field components must be fields on R^n with n = component count");
        domain_ = domain_.intersect(c.domain());
    }
}

VectorField VectorField::radial(int dim, Box domain)
{
    if (domain.dim() == 0)
        domain = Box::unbounded(dim);
    std::vector<ScalarField> c;
    for (int i = 0; i < dim; ++i)
        c.push_back(ScalarField::coordinate(dim, i).with_domain(domain));
    return VectorField(std::move(c));
}

VectorField VectorField::parse(std::span<const std::string> components, std::vector<std::string> variables,
                               const std::map<std::string, double>& constants, Box domain)
{
    std::vector<ScalarField> c;
    for (const auto& src : components)
        c.push_back(ScalarField::parse(src, variables, constants, domain));
    return VectorField(std::move(c));
}

std::vector<double> VectorField::operator()(std::span<const double> p) const
{
    std::vector<double> v(components_.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = components_[i](p);
    return v;
}

Eigen::MatrixXd VectorField::jacobian(std::span<const double> p) const
{
    const int n = dim();
    Eigen::MatrixXd j(n, n);
    for (int i = 0; i < n; ++i) {
        const Jet g = components_[i].jet(p, 1);
        for (int k = 0; k < n; ++k)
            j(i, k) = g.grad(k);
    }
    return j;
}

} // namespace extenso
