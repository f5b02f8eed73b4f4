#include "extenso/extensivity.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace extenso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string point_text(std::span<const double> p)
{
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i)
        s += fmt::format("{}{:.6g}", i ? ", " : "", p[i]);
    return s + ")";
}

struct Part {
    std::string label;
    SampleResidual residual;
};

// Runs every part over the same samples. A sample's residual is the largest
// part residual; it is skipped when any part skips it.
CheckReport fold(std::string name, const std::vector<Point>& points, const std::vector<Part>& parts, double tol,
                 Execution ex)
{
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::string>> reasons(parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k)
        values.push_back(map_samples(points, parts[k].residual, ex, &reasons[k]));

    ReportBuilder b(std::move(name), tol);
    std::vector<double> part_max(parts.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::string why;
        double r = 0.0;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            if (!reasons[k][i].empty()) {
                why = reasons[k][i];
                break;
            }
            const double v = std::isnan(values[k][i]) ? kInf : values[k][i];
            part_max[k] = std::max(part_max[k], v);
            r = std::max(r, v);
        }
        if (!why.empty())
            b.skip(why);
        else
            b.add(i, points[i], r);
    }
    if (parts.size() > 1)
        for (std::size_t k = 0; k < parts.size(); ++k)
            b.note(fmt::format("{} max={:.3e}", parts[k].label, part_max[k]));
    return b.finish();
}

bool leaves_domain(const std::exception_ptr& e)
{
    try {
        std::rethrow_exception(e);
    } catch (const DomainError&) {
        return true;
    } catch (const FlowError& f) {
        return f.kind() == FlowError::Kind::domain_exit;
    } catch (...) {
        return false;
    }
}

double directional(const Jet& j, std::span<const double> v)
{
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += j.grad(int(i)) * v[i];
    return s;
}

ScalarField contraction(const KForm& theta, const VectorField& rho)
{
    if (theta.degree() != 1)
        throw DimensionMismatch("expected a 1-form");
    if (theta.dim() != rho.dim())
        throw DimensionMismatch("form and field live on charts of different dimension");
    ScalarField tau = ScalarField::constant(theta.dim(), 0.0);
    for (const auto& [I, c] : theta.terms())
        tau = tau + c * rho[std::countr_zero(I)];
    return tau;
}

} // namespace

VanishingTransversalityError::VanishingTransversalityError(Point where, double value)
    : Error(fmt::format("theta(rho) = {:.3e} vanishes at {}", value, point_text(where))), where_(std::move(where)),
      value_(value)
{
}

ClosednessError::ClosednessError(Point where, double residual)
    : Error(fmt::format("theta/theta(rho) is not closed at {}: |d(...)| = {:.3e}", point_text(where), residual)),
      where_(std::move(where)), residual_(residual)
{
}

// ---------------------------------------------------------------------------
// Functions

double euler_residual(const ScalarField& f, const VectorField& rho, std::span<const double> p)
{
    const Jet j = f.jet(p, 1);
    const std::vector<double> v = rho(p);
    return directional(j, v) - j.value();
}

double scaling_defect(const ScalarField& f, const VectorField& rho, std::span<const double> p, double lambda)
{
    const Point q = scale_state(rho, p, lambda, kOracleFlowTol);
    return std::abs(f(q) - lambda * f(p));
}

CheckReport check_extensive_function(const ScalarField& f, const VectorField& rho, const SampleSpec& s, double tol,
                                     std::string name, Execution ex)
{
    const std::vector<Point> points = draw_samples(s);
    auto euler = [&](const Point& p) { return std::abs(euler_residual(f, rho, p)); };
    auto scaling = [&](const Point& p) {
        const double fp = f(p);
        double worst = 0.0;
        for (double lambda : kScalingFactors) {
            // λp may leave the domain for some λ; the others still count.
            try {
                const Point q = scale_state(rho, p, lambda, kOracleFlowTol);
                worst = std::max(worst, std::abs(f(q) - lambda * fp));
            } catch (...) {
                if (!leaves_domain(std::current_exception()))
                    throw;
            }
        }
        return worst;
    };
    return fold(std::move(name), points, {{"euler", euler}, {"scaling", scaling}}, tol, ex);
}

CheckReport check_degree(const ScalarField& phi, const VectorField& rho, double beta, const SampleSpec& s, double tol,
                         std::string name, Execution ex)
{
    auto r = [&](const Point& p) {
        const Jet j = phi.jet(p, 1);
        const std::vector<double> v = rho(p);
        return std::abs(directional(j, v) - beta * j.value());
    };
    return evaluate_check(std::move(name), draw_samples(s), r, tol, ex);
}

// ---------------------------------------------------------------------------
// Maps

Eigen::VectorXd homogeneity_defect_map(const SmoothMap& f, std::span<const double> p, double lambda)
{
    const Eigen::VectorXd scaled = lambda * as_eigen(p);
    const std::vector<double> a = f(std::span<const double>(scaled.data(), std::size_t(scaled.size())));
    const std::vector<double> b = f(p);
    return as_eigen(a) - lambda * as_eigen(b);
}

namespace {

SampleResidual radial_pushforward_residual(const SmoothMap& f)
{
    return [f](const Point& p) {
        const std::vector<double> v = f(p);
        return (jacobian(f, p) * as_eigen(p) - as_eigen(v)).norm();
    };
}

SampleResidual map_scaling_residual(const SmoothMap& f)
{
    return [f](const Point& p) {
        return std::max(homogeneity_defect_map(f, p, 0.5).norm(), homogeneity_defect_map(f, p, 2.0).norm());
    };
}

} // namespace

CheckReport check_radial_pushforward(const SmoothMap& f, const SampleSpec& s, double tol, Execution ex)
{
    return fold("radial_pushforward", draw_samples(s), {{"pushforward", radial_pushforward_residual(f)}}, tol, ex);
}

CheckReport check_map_scaling(const SmoothMap& f, const SampleSpec& s, double tol, Execution ex)
{
    return fold("map_scaling", draw_samples(s), {{"scaling", map_scaling_residual(f)}}, tol, ex);
}

CheckReport check_homogeneous_diffeo(const SmoothMap& f, const SampleSpec& s, double tol, Execution ex)
{
    return fold("homogeneous_diffeo", draw_samples(s),
                {{"pushforward", radial_pushforward_residual(f)}, {"scaling", map_scaling_residual(f)}}, tol, ex);
}

CheckReport check_transition_compatibility(const Chart& a, const Chart& b, const SampleSpec& s, double tol,
                                           Execution ex)
{
    const SmoothMap psi = compose(b.forward, a.inverse);
    CheckReport r = check_homogeneous_diffeo(psi, s, tol, ex);
    if (r.samples == 0)
        throw EmptyOverlapError("the charts share no sampled point");
    r.name = "transition_compatibility";
    return r;
}

// ---------------------------------------------------------------------------
// Forms

FormValue form_extensivity_residual(const KForm& w, const VectorField& rho, std::span<const double> p)
{
    return lie_derivative_form(rho, w, p) - w(p);
}

CheckReport check_extensive_form(const KForm& w, const VectorField& rho, const SampleSpec& s, double tol,
                                 std::string name, Execution ex)
{
    auto r = [&](const Point& p) { return form_extensivity_residual(w, rho, p).max_abs(); };
    return evaluate_check(std::move(name), draw_samples(s), r, tol, ex);
}

CheckReport check_scaling_law(const KForm& w, const VectorField& rho, std::span<const double> p, double t,
                              double tol, double flow_tol)
{
    const FlowResult r = flow(rho, p, t, flow_tol, true);
    const FormValue pulled = pullback(w(r.endpoint), r.fundamental_matrix);
    const FormValue expected = std::exp(t) * w(p);
    ReportBuilder b(fmt::format("scaling_law(t={:g})", t), tol);
    b.add(0, p, (pulled - expected).max_abs());
    return b.finish();
}

FormValue integrability_defect(const KForm& theta, std::span<const double> p)
{
    if (theta.degree() != 1)
        throw DimensionMismatch("integrability defect needs a 1-form");
    if (theta.dim() < 3)
        return FormValue(theta.dim(), 3);
    return wedge(theta(p), exterior_derivative(theta, p));
}

CheckReport check_integrable(const KForm& theta, const SampleSpec& s, double tol, std::string name, Execution ex)
{
    auto r = [&](const Point& p) { return integrability_defect(theta, p).max_abs(); };
    return evaluate_check(std::move(name), draw_samples(s), r, tol, ex);
}

double transversality_value(const KForm& theta, const VectorField& rho, std::span<const double> p)
{
    return interior_product(rho, theta, p).coefficients()[0];
}

CheckReport check_transversal(const KForm& theta, const VectorField& rho, const SampleSpec& s, double floor,
                              std::string name, Execution ex)
{
    auto r = [&](const Point& p) { return std::max(0.0, floor - std::abs(transversality_value(theta, rho, p))); };
    CheckReport rep = evaluate_check(std::move(name), draw_samples(s), r, 0.0, ex);
    rep.tol = floor;
    return rep;
}

// ---------------------------------------------------------------------------
// Entropy

namespace {

// Hypotheses are checked relative to the size of θ at the point.
constexpr double kHypothesisTol = 1e-8;
// Bound on |d(θ/θ(ρ))| relative to (1 + |θ/θ(ρ)|)².
constexpr double kClosednessTol = 1e-8;

struct BelgiornoIntegrand {
    KForm theta;
    VectorField rho;
    ScalarField tau;
    KForm eta; // θ/θ(ρ)
    double tol;
    EntropyRecovery stats;

    BelgiornoIntegrand(const KForm& th, const VectorField& r, double t)
        : theta(th), rho(r), tau(contraction(th, r)), eta(th.dim(), 1), tol(t)
    {
        for (const auto& [I, c] : theta.terms())
            eta.set(I, c / tau);
    }

    void check_hypotheses(std::span<const double> p) const
    {
        const double scale = 1.0 + theta(p).max_abs();
        const double ext = form_extensivity_residual(theta, rho, p).max_abs();
        if (ext > kHypothesisTol * scale)
            throw PreconditionError(fmt::format("theta is not extensive at {} (|L_rho theta - theta| = {:.3e})",
                                                point_text(p), ext));
        const double integ = integrability_defect(theta, p).max_abs();
        if (integ > kHypothesisTol * scale * scale)
            throw PreconditionError(
                fmt::format("theta is not integrable at {} (|theta ^ d theta| = {:.3e})", point_text(p), integ));
    }

    double segment(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
    {
        const Eigen::VectorXd delta = b - a;
        auto g = [&](double s) {
            const Eigen::VectorXd x = a + s * delta;
            const std::span<const double> p(x.data(), std::size_t(x.size()));
            const double t = tau(p);
            if (std::abs(t) <= 10.0 * tol)
                throw VanishingTransversalityError(to_point(x), t);
            const FormValue e = eta(p);
            double v = 0.0;
            for (const auto& [I, c] : eta.terms())
                v += e[I] * delta[std::countr_zero(I)];
            const double closed = exterior_derivative(eta, p).max_abs();
            const double bound = kClosednessTol * (1.0 + e.max_abs()) * (1.0 + e.max_abs());
            stats.closedness = std::max(stats.closedness, closed);
            if (closed > bound)
                throw ClosednessError(to_point(x), closed);
            ++stats.evaluations;
            return v;
        };
        double error = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, 0.0, 1.0, 15, tol, &error);
    }
};

} // namespace

EntropyRecovery recover_entropy_along(const KForm& theta, const VectorField& rho, const std::vector<Point>& path,
                                      double s0, double tol)
{
    if (path.size() < 2)
        throw Error("an entropy path needs at least two points");
    if (!(s0 > 0.0))
        throw PreconditionError("the reference entropy must be positive");
    BelgiornoIntegrand in(theta, rho, tol);
    for (const Point& v : path) {
        if (int(v.size()) != theta.dim())
            throw DimensionMismatch("path point dimension does not match the form");
        const double t = in.tau(v);
        if (std::abs(t) <= 10.0 * tol)
            throw VanishingTransversalityError(v, t);
        in.check_hypotheses(v);
    }
    double log_ratio = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i)
        log_ratio += in.segment(as_eigen(path[i - 1]), as_eigen(path[i]));
    in.stats.entropy = s0 * std::exp(log_ratio);
    return in.stats;
}

EntropyRecovery recover_entropy(const KForm& theta, const VectorField& rho, std::span<const double> base, double s0,
                                std::span<const double> target, double tol)
{
    return recover_entropy_along(theta, rho, {Point(base.begin(), base.end()), Point(target.begin(), target.end())},
                                 s0, tol);
}

// ---------------------------------------------------------------------------
// Transversal submanifolds

CheckReport check_transversal_level_set(const ScalarField& f, const VectorField& rho, double c, const SampleSpec& s,
                                        double tol, std::string name, Execution ex)
{
    if (c == 0.0)
        throw PreconditionError("the level must be nonzero");
    const CheckReport ext = check_extensive_function(f, rho, s, tol, "extensive", ex);
    if (!ext.passed)
        throw PreconditionError(
            fmt::format("the defining function is not extensive (max residual {:.3e})", ext.max_residual));

    auto r = [&](const Point& start) {
        Eigen::VectorXd x = as_eigen(start);
        const int n = int(x.size());
        for (int iter = 0;; ++iter) {
            const std::span<const double> p(x.data(), std::size_t(n));
            const Jet j = f.jet(p, 1);
            Eigen::VectorXd g(n);
            for (int i = 0; i < n; ++i)
                g[i] = j.grad(i);
            if (g.squaredNorm() == 0.0)
                return kInf;
            const double gap = j.value() - c;
            if (std::abs(gap) <= 1e-12 * (1.0 + std::abs(c))) {
                const std::vector<double> v = rho(p);
                return std::abs(directional(j, v) - c);
            }
            if (iter == 50)
                throw DomainError("projection onto the level set did not converge");
            x -= gap / g.squaredNorm() * g;
        }
    };
    return evaluate_check(std::move(name), draw_samples(s), r, tol, ex);
}

double defining_function_scale(const ScalarField& f, const ScalarField& g, const VectorField& rho,
                               const SampleSpec& s, double tol, double extensivity_tol)
{
    for (const auto* h : {&f, &g}) {
        const CheckReport r = check_extensive_function(*h, rho, s, extensivity_tol, "extensive");
        if (!r.passed)
            throw PreconditionError(
                fmt::format("a defining function is not extensive (max residual {:.3e})", r.max_residual));
    }
    const std::vector<Point> points = draw_samples(s);
    if (points.size() < 2)
        throw Error("at least two samples are needed");
    std::vector<double> ratio;
    for (const Point& p : points) {
        const double fp = f(p);
        if (fp == 0.0)
            throw PreconditionError("the defining function vanishes at " + point_text(p));
        ratio.push_back(g(p) / fp);
    }
    const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / double(ratio.size());
    double var = 0.0;
    for (double k : ratio)
        var += (k - mean) * (k - mean);
    const double sd = std::sqrt(var / double(ratio.size() - 1));
    if (sd <= tol * std::abs(mean))
        return mean;

    ReportBuilder b("ratio", 0.0);
    for (std::size_t i = 0; i < points.size(); ++i)
        b.add(i, points[i], std::abs(ratio[i] - mean));
    throw NonConstantRatioError(
        fmt::format("g/f is not constant: mean {:.6g}, standard deviation {:.3e}", mean, sd), b.finish().witnesses);
}

} // namespace extenso
