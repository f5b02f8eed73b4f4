#include "extenso/models.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace extenso {

namespace {

constexpr MultiIndex kU = 1u << 0, kV = 1u << 1, kN = 1u << 2;

void require_uvn(const ThermoSystem& s)
{
    if (s.dim() != 3)
        throw DimensionMismatch("expected a system on (U, V, N)");
}

} // namespace

KForm ThermoSystem::energy_differential() const
{
    return KForm::monomial(ScalarField::constant(dim(), 1.0), MultiIndex(1) << energy_slot);
}

ThermoSystem make_system(std::string name, std::vector<std::string> names, std::map<std::string, double> constants,
                         const std::string& entropy_source, Box domain, int energy_slot)
{
    const int n = int(names.size());
    if (domain.dim() == 0)
        domain = Box::unbounded(n);
    if (energy_slot < 0 || energy_slot >= n)
        throw DimensionMismatch("energy slot out of range");

    ThermoSystem s;
    s.name = std::move(name);
    s.names = names;
    s.constants = constants;
    s.domain = domain;
    s.energy_slot = energy_slot;
    s.entropy = ScalarField::parse(entropy_source, names, constants, domain);
    const ScalarField s_u = s.entropy.partial(energy_slot);
    s.temperature = ScalarField::constant(n, 1.0).with_domain(domain) / s_u;
    s.rho = VectorField::radial(n, domain);
    s.heat = KForm(n, 1);
    s.work = KForm(n, 1);
    for (int i = 0; i < n; ++i) {
        const MultiIndex I = MultiIndex(1) << i;
        if (i == energy_slot) {
            s.heat.set(I, ScalarField::constant(n, 1.0).with_domain(domain));
            continue;
        }
        const ScalarField coefficient = s.entropy.partial(i) / s_u;
        s.heat.set(I, coefficient);
        s.work.set(I, -coefficient);
    }
    return s;
}

ThermoSystem ideal_gas(double c, double k1, double r)
{
    if (!(c > 0 && k1 > 0 && r > 0))
        throw PreconditionError("ideal gas constants must be positive");
    return make_system("ideal_gas", {"U", "V", "N"}, {{"c", c}, {"K1", k1}, {"R", r}}, kIdealGasEntropy,
                       Box::positive_orthant(3));
}

ThermoSystem van_der_waals(double a, double b, double c, double k2, double r, Box domain)
{
    if (!(a >= 0 && b >= 0 && c > 0 && k2 > 0 && r > 0))
        throw PreconditionError("van der Waals constants must be positive");
    if (domain.dim() == 0)
        domain = Box::positive_orthant(3);
    return make_system("van_der_waals", {"U", "V", "N"}, {{"a", a}, {"b", b}, {"c", c}, {"K2", k2}, {"R", r}},
                       kVanDerWaalsEntropy, domain);
}

FormValue work_wedge(const ThermoSystem& s, std::span<const double> p)
{
    return wedge(s.work(p), exterior_derivative(s.work, p));
}

// ---------------------------------------------------------------------------
// Quoted formulas

double quoted_ideal_gas_pressure(double c, std::span<const double> uvn) { return c * uvn[0] / uvn[1]; }

double quoted_ideal_gas_potential(double c, double k, std::span<const double> uvn)
{
    const double u = uvn[0], v = uvn[1], n = uvn[2];
    return -u / (c * n) * (std::log(k * std::pow(u, c) * v * std::pow(n, -(c + 1))) + c + 1);
}

double derived_pressure(const ThermoSystem& s, std::span<const double> uvn)
{
    require_uvn(s);
    return s.heat.coefficient(kV)(uvn);
}

double derived_potential(const ThermoSystem& s, std::span<const double> uvn)
{
    require_uvn(s);
    return -s.heat.coefficient(kN)(uvn);
}

CheckReport compare_quoted_ideal_gas(const ThermoSystem& s, double k, const SampleSpec& spec, double tol)
{
    require_uvn(s);
    const double c = s.constants.at("c");
    double gap_p = 0.0, gap_mu = 0.0;
    ReportBuilder b("quoted_ideal_gas_formulas", tol);
    const std::vector<Point> points = draw_samples(spec);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point& p = points[i];
        const double dp = std::abs(quoted_ideal_gas_pressure(c, p) - derived_pressure(s, p));
        const double dmu = std::abs(quoted_ideal_gas_potential(c, k, p) - derived_potential(s, p));
        gap_p = std::max(gap_p, dp);
        gap_mu = std::max(gap_mu, dmu);
        b.add(i, p, std::max(dp, dmu));
    }
    b.note(fmt::format("pressure gap max={:.3e}, chemical potential gap max={:.3e}", gap_p, gap_mu));
    return b.finish();
}

double quoted_vdw_work_wedge(double a, double b, double c, double r, double entropy, std::span<const double> uvn)
{
    const double u = uvn[0], v = uvn[1], n = uvn[2];
    return a * entropy / (c * r * v * v) + 1.0 / (c * n * (b - v / n)) * u / n;
}

CheckReport compare_quoted_vdw(const ThermoSystem& s, double a, double b, double c, double r, const SampleSpec& spec,
                               double tol)
{
    require_uvn(s);
    auto residual = [&](const Point& p) {
        const double jet = work_wedge(s, p)[kU | kV | kN];
        return std::abs(jet - quoted_vdw_work_wedge(a, b, c, r, s.entropy(p), p));
    };
    return evaluate_check("quoted_vdw_work_wedge", draw_samples(spec), residual, tol);
}

// ---------------------------------------------------------------------------
// Metrics

MetricField ruppeiner_metric(const ScalarField& phi, double beta)
{
    return MetricField{MetricKind::ruppeiner, phi, beta, hessian_tensor(phi)};
}

MetricField quevedo_metric(const ScalarField& phi, double beta)
{
    return MetricField{MetricKind::quevedo, phi, beta, phi * hessian_tensor(phi)};
}

CheckReport check_metric_scaling(const MetricField& m, const VectorField& rho, const SampleSpec& s, double tol,
                                 Execution ex)
{
    auto residual = [&](const Point& p) {
        return (lie_derivative_sym2(rho, m.g, p) - m.lie_factor() * m.g.value(p)).cwiseAbs().maxCoeff();
    };
    const char* kind = m.kind == MetricKind::ruppeiner ? "ruppeiner" : "quevedo";
    return evaluate_check(fmt::format("{}_lie_scaling", kind), draw_samples(s), residual, tol, ex);
}

CheckReport check_null_direction(const MetricField& m, const VectorField& rho, const SampleSpec& s, double tol,
                                 Execution ex)
{
    auto residual = [&](const Point& p) {
        const std::vector<double> v = rho(p);
        return (m.g.value(p) * as_eigen(v)).norm();
    };
    return evaluate_check("null_direction", draw_samples(s), residual, tol, ex);
}

CheckReport conformal_factor_check(const ScalarField& lambda, const VectorField& rho, double beta,
                                   const SampleSpec& s, double tol, Execution ex)
{
    return check_degree(lambda, rho, beta, s, tol, "conformal_factor", ex);
}

// ---------------------------------------------------------------------------
// Rotation field

VectorField rotation_field()
{
    return VectorField({ScalarField::coordinate(2, 1), -ScalarField::coordinate(2, 0)});
}

Chart rotation_chart()
{
    std::vector<Interval> right{{0.0, std::numeric_limits<double>::infinity()}, {}};
    const Box half_plane(right);
    Chart c;
    c.domain = half_plane;
    c.forward = SmoothMap::native(2, 2, half_plane, [](std::span<const double> p, int order) {
        const Jet x = Jet::variable(2, order, 0, p[0]);
        const Jet y = Jet::variable(2, order, 1, p[1]);
        const Jet w = exp(-atan(y / x));
        return std::vector<Jet>{w, sqrt(x * x + y * y) * w};
    });
    const double e = std::exp(M_PI / 2);
    const Box image(std::vector<Interval>{{1.0 / e, e}, {0.0, std::numeric_limits<double>::infinity()}});
    c.inverse = SmoothMap::native(2, 2, image, [](std::span<const double> q, int order) {
        const Jet w = Jet::variable(2, order, 0, q[0]);
        const Jet z = Jet::variable(2, order, 1, q[1]);
        const Jet theta = -log(w);
        const double t = theta.value();
        const Jet cs = compose_univariate({std::cos(t), -std::sin(t), -std::cos(t), std::sin(t)}, theta);
        const Jet sn = compose_univariate({std::sin(t), std::cos(t), -std::sin(t), -std::cos(t)}, theta);
        const Jet r = z / w;
        return std::vector<Jet>{r * cs, r * sn};
    });
    return c;
}

RotationCounterexample rotation_counterexample(std::uint64_t seed, int samples)
{
    RotationCounterexample out{rotation_field(), rotation_chart(), {}, {}, {}};
    const SampleSpec spec{Box({{0.2, 2.0}, {-2.0, 2.0}}), samples, seed, {}};
    auto residual = [&](const Point& q) {
        const std::vector<double> image = out.chart.forward(q);
        return (pushforward(out.chart, out.field, q) - as_eigen(image)).norm();
    };
    out.pushforward = evaluate_check("rotation_chart_radializes", draw_samples(spec), residual, 1e-8);

    const Point origin{0.0, 0.0};
    out.origin = classify_singularity(out.field, origin, 1e-10);
    Eigen::Matrix2d expected;
    expected << 0, 1, -1, 0;
    ReportBuilder b("rotation_origin_incompatible", 1e-10);
    const double gap = out.origin.kind == Singularity::radial_incompatible
                           ? (out.origin.jacobian - expected).cwiseAbs().maxCoeff()
                           : std::numeric_limits<double>::infinity();
    b.add(0, origin, gap);
    b.note("classified " + to_string(out.origin.kind));
    out.classification = b.finish();
    return out;
}

// ---------------------------------------------------------------------------
// α

KForm alpha_form()
{
    const ScalarField x = ScalarField::coordinate(2, 0), y = ScalarField::coordinate(2, 1);
    const ScalarField one = ScalarField::constant(2, 1.0);
    const Box quadrant = Box::positive_orthant(2);
    KForm a(2, 1);
    a.set(1u << 0, (one + y / x).with_domain(quadrant));
    a.set(1u << 1, (-(one + x / y)).with_domain(quadrant));
    return a;
}

AlphaCounterexample alpha_counterexample(std::uint64_t seed, int samples)
{
    AlphaCounterexample out;
    out.alpha = alpha_form();
    const VectorField rho = VectorField::radial(2, Box::positive_orthant(2));
    const SampleSpec spec{Box({{0.1, 5.0}, {0.1, 5.0}}), samples, seed, {}};
    out.extensive = check_extensive_form(out.alpha, rho, spec, 1e-12, "alpha_extensive");
    auto value = [&](const Point& p) { return std::abs(transversality_value(out.alpha, rho, p)); };
    out.not_transversal = evaluate_check("alpha_not_transversal", draw_samples(spec), value, 1e-12);
    out.integrable = check_integrable(out.alpha, spec, 1e-12, "alpha_integrable");
    return out;
}

// ---------------------------------------------------------------------------
// Phase space

KForm phase_space_form(int n)
{
    const int dim = 2 * n + 1;
    KForm theta(dim, 1);
    theta.set(1u << 0, ScalarField::constant(dim, 1.0));
    for (int i = 1; i <= n; ++i)
        theta.set(MultiIndex(1) << i, -ScalarField::coordinate(dim, n + i));
    return theta;
}

VectorField phase_space_field(int n, double beta)
{
    const int dim = 2 * n + 1;
    std::vector<ScalarField> c;
    c.push_back(beta * ScalarField::coordinate(dim, 0));
    for (int i = 1; i <= n; ++i)
        c.push_back(ScalarField::coordinate(dim, i));
    for (int i = 1; i <= n; ++i)
        c.push_back((beta - 1.0) * ScalarField::coordinate(dim, n + i));
    return VectorField(std::move(c));
}

CheckReport phase_space_sigma_check(int n, double beta, double tol, std::uint64_t seed, int samples)
{
    if (n < 1)
        throw PreconditionError("phase space needs n >= 1");
    const KForm theta = phase_space_form(n);
    const VectorField sigma = phase_space_field(n, beta);
    const int dim = 2 * n + 1;
    const SampleSpec spec{Box(std::vector<Interval>(std::size_t(dim), Interval{-3.0, 3.0})), samples, seed, {}};
    auto residual = [&](const Point& p) { return (lie_derivative_form(sigma, theta, p) - beta * theta(p)).max_abs(); };
    return evaluate_check(fmt::format("phase_space_sigma(n={},beta={:g})", n, beta), draw_samples(spec), residual,
                          tol);
}

} // namespace extenso
