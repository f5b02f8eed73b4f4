#include "extenso/flows.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace extenso;
using namespace extenso::test;
using doctest::Approx;

TEST_CASE("radial flow is uniform scaling")
{
    const FlowResult r = flow(VectorField::radial(2), Point{1, 2}, std::log(3.0));
    CHECK(r.endpoint[0] == Approx(3).epsilon(1e-9));
    CHECK(r.endpoint[1] == Approx(6).epsilon(1e-9));
    CHECK((r.fundamental_matrix - 3 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-8);
    CHECK(r.steps > 0);
}

TEST_CASE("translation flow")
{
    const FlowResult r = flow(vfield({"1", "0"}, xy()), Point{0, 0}, 5.0);
    CHECK(r.endpoint[0] == Approx(5).epsilon(1e-12));
    CHECK(std::abs(r.endpoint[1]) < 1e-12);
}

TEST_CASE("rotation flow turns clockwise")
{
    const FlowResult r = flow(rotation_field(), Point{1, 0}, M_PI / 2);
    CHECK(std::abs(r.endpoint[0]) < 1e-8);
    CHECK(std::abs(r.endpoint[1] + 1) < 1e-8);
}

TEST_CASE("zero time and negative time")
{
    const Point p{1, 2};
    const FlowResult z = flow(VectorField::radial(2), p, 0.0);
    CHECK(z.endpoint == p);
    CHECK(z.fundamental_matrix.isIdentity());
    const FlowResult back = flow(VectorField::radial(2), p, -std::log(2.0));
    CHECK(back.endpoint[0] == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("scale_state")
{
    const VectorField rho = VectorField::radial(3);
    const Point p{1, 2, 3};
    const Point q = scale_state(rho, p, 2.0);
    CHECK(q[0] == Approx(2).epsilon(1e-9));
    CHECK(q[1] == Approx(4).epsilon(1e-9));
    CHECK(q[2] == Approx(6).epsilon(1e-9));
    CHECK(scale_state(rho, p, 1.0) == p);
    CHECK_THROWS_AS(scale_state(rho, p, 0.0), DomainError);
    CHECK_THROWS_AS(scale_state(rho, p, -1.0), DomainError);

    const ThermoSystem s = ideal_gas(1.5, std::exp(1.0), 1.0);
    const Point u{1, 1, 1};
    const Point u2 = scale_state(s.rho, u, 2.0);
    CHECK(u2[0] == Approx(2).epsilon(1e-9));
    CHECK(s.entropy(u2) == Approx(2 * s.entropy(u)).epsilon(1e-9));
}

TEST_CASE("flow group law and scaling pseudo-action")
{
    const VectorField x = vfield({"-y + 0.1*x", "x - 0.2*y"}, xy());
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10; ++i) {
        const Point p = random_point(rng, 2, -1, 1);
        const double s = 0.3, t = 0.45;
        const Point a = flow(x, flow(x, p, s).endpoint, t).endpoint;
        const Point b = flow(x, p, s + t).endpoint;
        CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) < 1e-7);
    }
    const VectorField rho = VectorField::radial(2, Box::positive_orthant(2));
    const Point p{0.7, 1.3};
    const Point a = scale_state(rho, scale_state(rho, p, 1.7), 0.6);
    const Point b = scale_state(rho, p, 1.7 * 0.6);
    CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) < 1e-7);
}

TEST_CASE("fundamental matrix against finite differences")
{
    const VectorField x = vfield({"y", "-x - 0.3*y + x^3/6"}, xy());
    const Point p{0.4, -0.2};
    const double t = 1.3, eps = 1e-6;
    const FlowResult base = flow(x, p, t, 1e-12);
    for (int i = 0; i < 2; ++i) {
        Point q = p;
        q[std::size_t(i)] += eps;
        const Point e = flow(x, q, t, 1e-12, false).endpoint;
        for (int r = 0; r < 2; ++r)
            CHECK((e[std::size_t(r)] - base.endpoint[std::size_t(r)]) / eps ==
                  Approx(base.fundamental_matrix(r, i)).epsilon(1e-4));
    }
}

TEST_CASE("leaving the domain raises a flow error")
{
    const VectorField x = vfield({"-1", "0"}, xy(), Box::positive_orthant(2));
    try {
        flow(x, Point{1, 1}, 3.0);
        FAIL("expected a flow error");
    } catch (const FlowError& e) {
        CHECK(e.kind() == FlowError::Kind::domain_exit);
        CHECK(e.time() == Approx(1.0).epsilon(1e-3));
    }
    CHECK_THROWS_AS(flow(x, Point{-1, 1}, 1.0), FlowError);
}

TEST_CASE("blow-up is reported")
{
    // x' = x^2 from 1 blows up at t = 1.
    const VectorField x = vfield({"x^2"}, {"x"});
    CHECK_THROWS_AS(flow(x, Point{1}, 2.0), FlowError);
}

TEST_CASE("flow-box chart straightens a translation")
{
    const VectorField ex = vfield({"1", "0"}, xy());
    const Chart c = flow_box_chart(ex, Point{0.5, 0.5}, 0.5);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
        const Point q = random_point(rng, 2, 0.2, 0.8);
        const Eigen::VectorXd v = pushforward(c, ex, q);
        CHECK(v[0] == Approx(1).epsilon(1e-9));
        CHECK(std::abs(v[1]) < 1e-9);
    }
}

TEST_CASE("flow-box chart of a curved field")
{
    const VectorField x = vfield({"1 + y^2", "x"}, xy());
    const Point p{0.3, 0.4};
    const Chart c = flow_box_chart(x, p, 0.2);
    const auto points = draw_samples(SampleSpec{c.domain, 30, 4, {}});
    for (const Point& q : points) {
        const Eigen::VectorXd v = pushforward(c, x, q);
        CHECK(std::abs(v[0] - 1) < 1e-8);
        CHECK(std::abs(v[1]) < 1e-8);
        // inverse o forward = id
        const Point back = c.inverse(c.forward(q));
        CHECK(std::hypot(back[0] - q[0], back[1] - q[1]) < 1e-9);
    }
}

TEST_CASE("flow-box chart needs a regular point")
{
    CHECK_THROWS_AS(flow_box_chart(VectorField::radial(2), Point{0, 0}, 0.5), ChartError);
}

TEST_CASE("extensive charts radialize the field")
{
    const VectorField radial = VectorField::radial(2);
    const Chart c = extensive_chart_from_field(radial, Point{1, 0.5}, 0.3);
    for (const Point& q : draw_samples(SampleSpec{c.domain, 20, 9, {}})) {
        const Eigen::VectorXd push = pushforward(c, radial, q);
        const Point y = c.forward(q);
        CHECK((push - as_eigen(y)).norm() < 1e-6);
    }
    const VectorField dx1 = vfield({"1"}, {"x"});
    const Chart one = extensive_chart_from_field(dx1, Point{0}, 0.5);
    for (double x : {-0.3, 0.0, 0.2}) {
        const Point q{x};
        CHECK(one.forward(q)[0] == Approx(std::exp(x)).epsilon(1e-9));
        CHECK(pushforward(one, dx1, q)[0] == Approx(std::exp(x)).epsilon(1e-9));
    }
    const Chart rot = extensive_chart_from_field(rotation_field(), Point{1, 0}, 0.3);
    for (const Point& q : draw_samples(SampleSpec{rot.domain, 20, 9, {}})) {
        const Eigen::VectorXd push = pushforward(rot, rotation_field(), q);
        CHECK((push - as_eigen(rot.forward(q))).norm() < 1e-6);
    }
}

TEST_CASE("singularity classification")
{
    const Point o{0, 0};
    const SingularityReport r = classify_singularity(VectorField::radial(2), o, 1e-10);
    CHECK(r.kind == Singularity::radial_compatible);
    CHECK(r.jacobian.isIdentity());
    const SingularityReport rot = classify_singularity(rotation_field(), o, 1e-10);
    CHECK(rot.kind == Singularity::radial_incompatible);
    CHECK(std::abs(rot.jacobian(0, 1) - 1) < 1e-10);
    CHECK(std::abs(rot.jacobian(1, 0) + 1) < 1e-10);
    CHECK(std::abs(rot.jacobian(0, 0)) < 1e-10);
    const SingularityReport reg = classify_singularity(vfield({"1", "0"}, xy()), Point{3, 4}, 1e-10);
    CHECK(reg.kind == Singularity::regular);
    CHECK(reg.field_norm == Approx(1));
    CHECK(to_string(Singularity::radial_incompatible) == "radial-incompatible");
}

TEST_CASE("coordinates of an extensive chart are extensive functions")
{
    const Box q = Box::positive_orthant(2);
    const VectorField x = vfield({"x+y", "y"}, xy(), q);
    const Chart c = extensive_chart_from_field(x, Point{1, 1}, 0.2);
    const SampleSpec s{c.domain, 20, 3, {}};
    for (int i = 0; i < 2; ++i) {
        const CheckReport r = check_extensive_function(c.forward.component(i), x, s, 1e-7);
        CHECK_MESSAGE(r.passed, format_text(r));
        CHECK(r.samples > 0);
    }
}
