#include "extenso/flows.hpp"

#include <algorithm>
#include <cmath>

namespace extenso {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr int kMaxSteps = 1'000'000;

// Right-hand side of the augmented system z = (y, vec Φ): y' = X(y),
// Φ' = DX(y)·Φ. Throws DomainError outside the field's box.
struct Rhs {
    const VectorField& x;
    int n;
    bool variational;

    Eigen::VectorXd operator()(const Eigen::VectorXd& z) const
    {
        for (Eigen::Index i = 0; i < z.size(); ++i)
            if (!std::isfinite(z[i]))
                throw DomainError("non-finite state");
        const std::span<const double> y(z.data(), std::size_t(n));
        Eigen::VectorXd dz(z.size());
        if (!variational) {
            for (int i = 0; i < n; ++i)
                dz[i] = x[i](y);
            return dz;
        }
        Eigen::MatrixXd dx(n, n);
        for (int i = 0; i < n; ++i) {
            const Jet j = x[i].jet(y, 1);
            dz[i] = j.value();
            for (int k = 0; k < n; ++k)
                dx(i, k) = j.grad(k);
        }
        Eigen::Map<const Eigen::MatrixXd> phi(z.data() + n, n, n);
        Eigen::Map<Eigen::MatrixXd>(dz.data() + n, n, n) = dx * phi;
        for (Eigen::Index i = 0; i < dz.size(); ++i)
            if (!std::isfinite(dz[i]))
                throw DomainError("non-finite field value");
        return dz;
    }
};

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& z0, const Eigen::VectorXd& z1, double tol)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = tol + tol * std::max(std::abs(z0[i]), std::abs(z1[i]));
        s += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(s / double(err.size()));
}

} // namespace

FlowResult flow(const VectorField& x, std::span<const double> p, double t, double tol, bool variational)
{
    const int n = x.dim();
    if (int(p.size()) != n)
        throw DimensionMismatch("start point dimension does not match the field");
    if (!(tol > 0.0))
        throw Error("flow tolerance must be positive");
    if (!x.domain().contains(p))
        throw FlowError(FlowError::Kind::domain_exit, 0.0, "start point lies outside the field's domain");

    FlowResult result;
    result.endpoint.assign(p.begin(), p.end());
    result.fundamental_matrix = Eigen::MatrixXd::Identity(n, n);
    if (t == 0.0)
        return result;

    const Rhs f{x, n, variational};
    const Eigen::Index size = variational ? n + n * n : n;
    Eigen::VectorXd z(size);
    for (int i = 0; i < n; ++i)
        z[i] = p[i];
    if (variational)
        Eigen::Map<Eigen::MatrixXd>(z.data() + n, n, n).setIdentity();

    const double dir = t > 0 ? 1.0 : -1.0;
    const double span_t = std::abs(t);
    Eigen::VectorXd k1 = f(z);

    // Initial step from the scale of the state and its derivative.
    const double d0 = z.head(n).norm(), d1 = k1.head(n).norm();
    double h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-3;
    h = std::min({h, span_t, 0.1 * std::max(1.0, span_t)});

    double elapsed = 0.0;
    double err_prev = 1e-4;
    bool blocked = false; // the last rejection came from leaving the domain
    int steps = 0;
    while (elapsed < span_t) {
        if (steps++ > kMaxSteps)
            throw FlowError(FlowError::Kind::step_underflow, dir * elapsed, "flow exceeded the step budget");
        const bool last = h >= span_t - elapsed;
        if (last)
            h = span_t - elapsed;
        const double hs = dir * h;
        const double hmin = 1e-14 * std::max(1.0, elapsed);
        if (h < hmin) {
            if (blocked)
                throw FlowError(FlowError::Kind::domain_exit, dir * elapsed,
                                "trajectory leaves the field's domain near t = " + std::to_string(dir * elapsed));
            throw FlowError(FlowError::Kind::step_underflow, dir * elapsed,
                            "step size underflow near t = " + std::to_string(dir * elapsed));
        }

        Eigen::VectorXd z1, k7;
        Eigen::VectorXd err;
        try {
            const Eigen::VectorXd k2 = f(z + hs * (a21 * k1));
            const Eigen::VectorXd k3 = f(z + hs * (a31 * k1 + a32 * k2));
            const Eigen::VectorXd k4 = f(z + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            const Eigen::VectorXd k5 = f(z + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Eigen::VectorXd k6 = f(z + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            z1 = z + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            k7 = f(z1);
            err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        } catch (const DomainError&) {
            blocked = true;
            h *= 0.25;
            continue;
        }
        blocked = false;
        const double e = error_norm(err, z, z1, tol);
        if (!std::isfinite(e) || e > 1.0) {
            const double fac = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.1;
            h *= fac;
            continue;
        }
        // Accepted step; PI controller for the next one.
        elapsed = last ? span_t : elapsed + h;
        z = std::move(z1);
        k1 = std::move(k7);
        ++result.steps;
        result.est_error = std::max(result.est_error, e * tol);
        const double fac = 0.9 * std::pow(std::max(e, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
        err_prev = std::max(e, 1e-4);
        h *= std::clamp(fac, 0.2, 5.0);
    }

    result.endpoint.assign(z.data(), z.data() + n);
    if (variational)
        result.fundamental_matrix = Eigen::Map<const Eigen::MatrixXd>(z.data() + n, n, n);
    return result;
}

Point scale_state(const VectorField& rho, std::span<const double> p, double lambda, double tol)
{
    if (!(lambda > 0.0))
        throw DomainError("scaling factor must be positive");
    if (lambda == 1.0)
        return Point(p.begin(), p.end());
    return flow(rho, p, std::log(lambda), tol, false).endpoint;
}

// ---------------------------------------------------------------------------
// Charts

namespace {

std::vector<Jet> first_order_jets(int m, const Eigen::VectorXd& value, const Eigen::MatrixXd& derivative, int order)
{
    std::vector<Jet> out;
    out.reserve(std::size_t(value.size()));
    for (Eigen::Index i = 0; i < value.size(); ++i) {
        Jet j(m, order, value[i]);
        if (order >= 1)
            for (int k = 0; k < m; ++k)
                j.grad(k) = derivative(i, k);
        out.push_back(std::move(j));
    }
    return out;
}

// Shared data of a flow-box chart.
struct FlowBox {
    VectorField x;
    Eigen::VectorXd base;
    Eigen::VectorXd direction; // X(p)
    Eigen::MatrixXd slice;     // n×(n−1), orthonormal, ⟂ X(p)
    double tol;

    // inverse(y) and its derivative.
    std::pair<Eigen::VectorXd, Eigen::MatrixXd> inverse(std::span<const double> y, bool with_derivative) const
    {
        const int n = int(base.size());
        const Eigen::VectorXd start = base + slice * as_eigen(y).tail(n - 1);
        const FlowResult r = flow(x, to_point(start), y[0], tol, with_derivative);
        Eigen::VectorXd value = as_eigen(r.endpoint);
        Eigen::MatrixXd d;
        if (with_derivative) {
            d.resize(n, n);
            const std::vector<double> v = x(r.endpoint);
            d.col(0) = as_eigen(v);
            d.rightCols(n - 1) = r.fundamental_matrix * slice;
        }
        return {std::move(value), std::move(d)};
    }

    // Damped Newton on inverse(y) = target.
    Eigen::VectorXd solve(std::span<const double> target) const
    {
        const int n = int(base.size());
        const Eigen::VectorXd q = as_eigen(target);
        const Eigen::VectorXd d = q - base;
        Eigen::VectorXd y(n);
        y[0] = direction.dot(d) / direction.squaredNorm();
        y.tail(n - 1) = slice.transpose() * d;

        const double converged = tol * std::max(1.0, q.norm());
        auto [value, jac] = inverse(std::span<const double>(y.data(), std::size_t(n)), true);
        double residual = (value - q).norm();
        for (int iter = 0; iter < 50; ++iter) {
            if (residual <= converged)
                return y;
            const Eigen::VectorXd step = jac.partialPivLu().solve(value - q);
            double alpha = 1.0;
            bool improved = false;
            for (int halving = 0; halving < 30 && !improved; ++halving, alpha *= 0.5) {
                const Eigen::VectorXd trial = y - alpha * step;
                try {
                    auto [tv, tj] = inverse(std::span<const double>(trial.data(), std::size_t(n)), true);
                    const double tr = (tv - q).norm();
                    if (tr < residual) {
                        y = trial;
                        value = std::move(tv);
                        jac = std::move(tj);
                        residual = tr;
                        improved = true;
                    }
                } catch (const FlowError&) {
                }
            }
            if (!improved) {
                // Stalled at the resolution of the discrete flow map.
                if (residual <= 1e3 * converged)
                    return y;
                break;
            }
        }
        if (residual <= converged)
            return y;
        throw ChartError(ChartError::Kind::newton_divergence,
                         "shooting did not converge (residual " + std::to_string(residual) +
                             "); the chart radius is too large");
    }
};

} // namespace

Chart flow_box_chart(const VectorField& x, std::span<const double> p, double radius, double tol)
{
    const int n = x.dim();
    if (int(p.size()) != n)
        throw DimensionMismatch("base point dimension does not match the field");
    if (!(radius > 0.0))
        throw Error("chart radius must be positive");
    const std::vector<double> v = x(p);
    const Eigen::VectorXd dir = as_eigen(v);
    const double scale = std::max(1.0, as_eigen(p).norm());
    if (dir.norm() <= 1e-8 * scale)
        throw ChartError(ChartError::Kind::singular_point, "the field vanishes at the base point");

    auto box = std::make_shared<FlowBox>();
    box->x = x;
    box->base = as_eigen(p);
    box->direction = dir;
    box->tol = tol;
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(dir).householderQ() * Eigen::MatrixXd::Identity(n, n);
    box->slice = q.rightCols(n - 1);

    Chart c;
    c.domain = Box::around(p, radius).intersect(x.domain());
    c.inverse = SmoothMap::native(
        n, n, {},
        [box, n](std::span<const double> y, int order) {
            auto [value, d] = box->inverse(y, order >= 1);
            return first_order_jets(n, value, d, order);
        },
        1);
    c.forward = SmoothMap::native(
        n, n, c.domain,
        [box, n](std::span<const double> pt, int order) {
            const Eigen::VectorXd y = box->solve(pt);
            Eigen::MatrixXd d;
            if (order >= 1)
                d = box->inverse(std::span<const double>(y.data(), std::size_t(n)), true).second.inverse();
            return first_order_jets(n, y, d, order);
        },
        1);
    return c;
}

Chart extensive_chart_from_field(const VectorField& x, std::span<const double> p, double radius, double tol)
{
    const int n = x.dim();
    const Chart straight = flow_box_chart(x, p, radius, tol);

    // (y¹..yⁿ) ↦ (e^{y¹}, y²e^{y¹}, ..., yⁿe^{y¹}) and its inverse.
    const SmoothMap radialize = SmoothMap::native(n, n, {}, [n](std::span<const double> y, int order) {
        const Jet e = exp(Jet::variable(n, order, 0, y[0]));
        std::vector<Jet> out{e};
        for (int i = 1; i < n; ++i)
            out.push_back(Jet::variable(n, order, i, y[i]) * e);
        return out;
    });
    auto half = std::vector<Interval>(std::size_t(n));
    half[0].lo = 0.0;
    const SmoothMap straighten = SmoothMap::native(n, n, Box(half), [n](std::span<const double> q, int order) {
        const Jet x1 = Jet::variable(n, order, 0, q[0]);
        std::vector<Jet> out{log(x1)};
        const Jet inv = reciprocal(x1);
        for (int i = 1; i < n; ++i)
            out.push_back(Jet::variable(n, order, i, q[i]) * inv);
        return out;
    });

    Chart c;
    c.domain = straight.domain;
    c.forward = compose(radialize, straight.forward);
    c.inverse = compose(straight.inverse, straighten);
    return c;
}

Eigen::VectorXd pushforward(const Chart& chart, const VectorField& x, std::span<const double> q)
{
    const std::vector<double> v = x(q);
    return jacobian(chart.forward, q) * as_eigen(v);
}

std::string to_string(Singularity s)
{
    switch (s) {
    case Singularity::regular:
        return "regular";
    case Singularity::radial_compatible:
        return "radial-compatible";
    case Singularity::radial_incompatible:
        return "radial-incompatible";
    }
    return "unknown";
}

SingularityReport classify_singularity(const VectorField& x, std::span<const double> p, double tol)
{
    SingularityReport r;
    const std::vector<double> v = x(p);
    r.field_norm = as_eigen(v).norm();
    if (r.field_norm > tol)
        return r;
    r.jacobian = x.jacobian(p);
    const double gap = (r.jacobian - Eigen::MatrixXd::Identity(x.dim(), x.dim())).norm();
    r.kind = gap < tol ? Singularity::radial_compatible : Singularity::radial_incompatible;
    return r;
}

} // namespace extenso
