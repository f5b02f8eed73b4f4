#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace extenso;
using namespace extenso::test;
using doctest::Approx;

namespace {

const SampleSpec kGasSpec{Box({{1, 4}, {1, 4}, {0.5, 1.2}}), 30, 6, {}};

} // namespace

TEST_CASE("ideal gas basics")
{
    const ThermoSystem s = ideal_gas(1.5, std::exp(1.0), 1.0);
    CHECK(s.dim() == 3);
    CHECK(s.entropy(Point{1, 1, 1}) == Approx(1));
    CHECK(derived_pressure(s, Point{1, 1, 1}) == Approx(2.0 / 3.0));
    CHECK(s.rho(Point{2, 3, 4}) == std::vector<double>{2, 3, 4});
    CHECK(s.temperature(Point{1, 1, 1}) == Approx(2.0 / 3.0));
}

TEST_CASE("first law and theta = T dS at samples")
{
    for (const ThermoSystem& s : {ideal_gas(1.5, std::exp(1.0), 1.0), van_der_waals(1, 0.1, 1.5, 1, 1)}) {
        const KForm ds = KForm::differential(s.entropy);
        for (const Point& p : draw_samples(kGasSpec)) {
            CHECK((s.heat(p) + s.work(p) - s.energy_differential()(p)).max_abs() < 1e-12);
            CHECK((s.heat(p) - s.temperature(p) * ds(p)).max_abs() < 1e-10);
        }
    }
}

TEST_CASE("work wedge")
{
    const ThermoSystem gas = ideal_gas(1.5, std::exp(1.0), 1.0);
    const SampleSpec twenty{kGasSpec.box, 20, 2, {}};
    // The ideal gas has a nonzero work wedge, -U/(cVN).
    for (const Point& p : draw_samples(twenty))
        CHECK(work_wedge(gas, p).coefficients()[0] == Approx(-p[0] / (1.5 * p[1] * p[2])).epsilon(1e-10));
    const ThermoSystem vdw = van_der_waals(1, 0.1, 1.5, 1, 1);
    const double w = work_wedge(vdw, Point{1, 1, 1}).coefficients()[0];
    CHECK(w == Approx(-0.11783390395267963).epsilon(1e-12));
    CHECK(std::abs(w) > 1e-6);
    // a = b = 0 reduces to the ideal gas
    const ThermoSystem limit = van_der_waals(0, 0, 1.5, 1, 1);
    const ThermoSystem gas1 = ideal_gas(1.5, 1, 1);
    for (const Point& p : draw_samples(twenty)) {
        CHECK(limit.entropy(p) == Approx(gas1.entropy(p)).epsilon(1e-12));
        CHECK(work_wedge(limit, p).coefficients()[0] == Approx(work_wedge(gas1, p).coefficients()[0]).epsilon(1e-10));
    }
}

TEST_CASE("quoted closed forms")
{
    const ThermoSystem vdw = van_der_waals(1, 0.1, 1.5, 1, 1);
    const Point p{1, 1, 1};
    CHECK(quoted_vdw_work_wedge(1, 0.1, 1.5, 1, vdw.entropy(p), p) == Approx(-0.11783390395267963).epsilon(1e-12));
    CHECK(compare_quoted_vdw(vdw, 1, 0.1, 1.5, 1, kGasSpec, 1e-9).passed);

    const ThermoSystem gas = ideal_gas(1.5, std::exp(1.0), 1.0);
    CHECK(quoted_ideal_gas_pressure(1.5, p) == Approx(1.5));
    CHECK(derived_pressure(gas, p) == Approx(2.0 / 3.0));
    const CheckReport r = compare_quoted_ideal_gas(gas, std::exp(1.0), kGasSpec, 1e-9);
    CHECK_FALSE(r.passed);
    CHECK_FALSE(r.detail.empty());
}

TEST_CASE("vdW samples outside the physical region are skipped")
{
    const ThermoSystem vdw = van_der_waals(1, 0.5, 1.5, 1, 1);
    // V/N <= b for part of this box.
    const SampleSpec s{Box({{1, 2}, {0.2, 1}, {0.5, 1}}), 40, 3, {}};
    const CheckReport r = check_extensive_function(vdw.entropy, vdw.rho, s, 1e-9);
    CHECK(r.skipped > 0);
    CHECK(r.samples > 0);
}

TEST_CASE("ruppeiner null direction and metric scaling")
{
    const ThermoSystem gas = ideal_gas(1.5, std::exp(1.0), 1.0);
    const MetricField g = ruppeiner_metric(gas);
    CHECK(check_null_direction(g, gas.rho, kGasSpec, 1e-9).passed);
    CHECK(check_metric_scaling(g, gas.rho, kGasSpec, 1e-8).passed);
    // g(rho, e_i) = 0 for every frame vector
    for (const Point& p : draw_samples(kGasSpec)) {
        const Eigen::VectorXd v = g.g.value(p) * as_eigen(gas.rho(p));
        CHECK(v.norm() < 1e-9);
    }

    const Box q = Box::positive_orthant(2);
    const SampleSpec s{Box({{0.5, 3}, {0.5, 3}}), 30, 2, {}};
    const ScalarField phi = field("x^2*y/(x+y)", xy(), {}, q);
    for (double beta : {1.0, 2.0}) {
        const ScalarField pot = beta == 2.0 ? phi : field("x*y/(x+y)", xy(), {}, q);
        const MetricField r = ruppeiner_metric(pot, beta);
        const MetricField v = quevedo_metric(pot, beta);
        CHECK(r.lie_factor() == beta);
        CHECK(v.lie_factor() == 2 * beta);
        CHECK(check_metric_scaling(r, VectorField::radial(2, q), s, 1e-8).passed);
        CHECK(check_metric_scaling(v, VectorField::radial(2, q), s, 1e-8).passed);
    }
    // the wrong beta fails
    CHECK_FALSE(check_metric_scaling(ruppeiner_metric(phi, 1.0), VectorField::radial(2, q), s, 1e-8).passed);
}

TEST_CASE("conformal factors")
{
    const Box q = Box::positive_orthant(2);
    const VectorField rho = VectorField::radial(2, q);
    const SampleSpec s{Box({{0.5, 3}, {0.5, 3}}), 30, 2, {}};
    const ScalarField phi = field("x^2*y/(x+y)", xy(), {}, q);
    CHECK(conformal_factor_check(phi, rho, 2.0, s, 1e-10).passed);
    CHECK(conformal_factor_check(field("x/y", xy(), {}, q) * phi, rho, 2.0, s, 1e-10).passed);
    CHECK_FALSE(conformal_factor_check(phi * phi, rho, 2.0, s, 1e-10).passed);
}

TEST_CASE("rotation counterexample")
{
    const RotationCounterexample r = rotation_counterexample();
    CHECK(r.field(Point{0, 1}) == std::vector<double>{1, 0});
    CHECK(r.pushforward.passed);
    CHECK(r.origin.kind == Singularity::radial_incompatible);
    CHECK(r.classification.passed);
    // The chart inverts.
    for (const Point& p : draw_samples(SampleSpec{Box({{0.3, 2}, {-1, 1}}), 10, 1, {}})) {
        const Point back = r.chart.inverse(r.chart.forward(p));
        CHECK(std::hypot(back[0] - p[0], back[1] - p[1]) < 1e-12);
    }
}

TEST_CASE("alpha counterexample")
{
    const AlphaCounterexample a = alpha_counterexample();
    const FormValue v = a.alpha(Point{1, 1});
    CHECK(v[bit(0)] == Approx(2));
    CHECK(v[bit(1)] == Approx(-2));
    CHECK(form_extensivity_residual(a.alpha, VectorField::radial(2), Point{1, 2}).max_abs() < 1e-12);
    CHECK(a.extensive.passed);
    CHECK(a.not_transversal.passed);
    CHECK(a.integrable.passed);
}

TEST_CASE("phase space")
{
    const KForm theta = phase_space_form(1);
    const VectorField sigma = phase_space_field(1, 1.0);
    const Point p{2, 3, 5};
    const FormValue l = lie_derivative_form(sigma, theta, p);
    CHECK((l - theta(p)).max_abs() < 1e-12);
    CHECK(sigma(p)[2] == 0.0);
    CHECK(phase_space_sigma_check(2, 2.0, 1e-10).passed);
    CHECK_FALSE(phase_space_sigma_check(2, 2.0, 1e-10).samples == 0);
}
