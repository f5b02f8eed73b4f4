#include "support.hpp"

#include <doctest.h>

using namespace extenso;
using namespace extenso::test;
using doctest::Approx;

TEST_CASE("jet of a product")
{
    const ScalarField f = field("x*y", xy());
    const Point p{2, 3};
    const Jet j = jet_of(f, p, 2);
    CHECK(j.value() == Approx(6));
    CHECK(j.grad(0) == Approx(3));
    CHECK(j.grad(1) == Approx(2));
    CHECK(j.hess(0, 0) == Approx(0));
    CHECK(j.hess(0, 1) == Approx(1));
    CHECK(j.hess(1, 1) == Approx(0));
}

TEST_CASE("jet of exp at 0")
{
    const ScalarField f = field("exp(x)", {"x"});
    const Point p{0};
    const Jet j = jet_of(f, p, 3);
    CHECK(j.value() == Approx(1));
    CHECK(j.grad(0) == Approx(1));
    CHECK(j.hess(0, 0) == Approx(1));
    CHECK(j.third(0, 0, 0) == Approx(1));
}

TEST_CASE("ideal gas entropy and gradient at the unit point")
{
    const ThermoSystem s = ideal_gas(1.5, 1.0, 1.0);
    const Point p{1, 1, 1};
    const Jet j = jet_of(s.entropy, p, 1);
    CHECK(j.value() == Approx(0).epsilon(1e-15));
    CHECK(j.grad(0) == Approx(1.5));
    CHECK(j.grad(1) == Approx(1.0));
    CHECK(j.grad(2) == Approx(-2.5));
}

TEST_CASE("jacobians")
{
    const Point p{0.3, -1.2};
    const SmoothMap lin = SmoothMap::from_components({field("2*x", xy()), field("x+y", xy())});
    const Eigen::MatrixXd j = jacobian(lin, p);
    CHECK(j(0, 0) == Approx(2));
    CHECK(j(0, 1) == Approx(0));
    CHECK(j(1, 0) == Approx(1));
    CHECK(j(1, 1) == Approx(1));
    CHECK(jacobian(SmoothMap::identity(3), Point{1, 2, 3}).isIdentity());
    const SmoothMap sq = SmoothMap::from_components({field("x^2", xy()), field("y", xy())});
    const Eigen::MatrixXd js = jacobian(sq, Point{1, 1});
    CHECK(js(0, 0) == Approx(2));
    CHECK(js(1, 1) == Approx(1));
    CHECK(js(0, 1) == Approx(0));
    CHECK(js(1, 0) == Approx(0));
}

TEST_CASE("hessians")
{
    const Eigen::MatrixXd h = hessian(field("x^2+y^2", xy()), Point{0.4, 7});
    CHECK((h - 2 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
    const Eigen::MatrixXd g = hessian(field("x*y", xy()), Point{-3, 2});
    CHECK(g(0, 1) == Approx(1));
    CHECK(g(0, 0) == Approx(0));
}

TEST_CASE("the entropy hessian annihilates the radial direction")
{
    const ThermoSystem s = ideal_gas(1.5, 1.0, 1.0);
    const Point p{1, 1, 1};
    const Eigen::VectorXd v = hessian(s.entropy, p) * Eigen::Vector3d(1, 1, 1);
    CHECK(v.norm() < 1e-12);
}

TEST_CASE("arithmetic on fields")
{
    const ScalarField x = ScalarField::coordinate(2, 0);
    const ScalarField y = ScalarField::coordinate(2, 1);
    const ScalarField f = (x * y + 2.0 * x) / y - x;
    const Point p{1.5, 0.5};
    CHECK(f(p) == Approx(1.5 * 0.5 / 0.5 + 3.0 / 0.5 - 1.5));
    CHECK(exp(log(x))(p) == Approx(1.5));
    CHECK(ScalarField::constant(2, 0.0).is_zero());
    CHECK((x * ScalarField::constant(2, 0.0)).is_zero());
}

TEST_CASE("partials of expression fields")
{
    const ScalarField f = field("x^3*y", xy());
    const ScalarField fx = f.partial(0);
    const Point p{2, 5};
    CHECK(fx(p) == Approx(3 * 4 * 5));
    CHECK(fx.partial(0)(p) == Approx(6 * 2 * 5));
    CHECK(fx.partial(0).partial(1)(p) == Approx(12));
}

TEST_CASE("composition")
{
    const ScalarField f = field("x*y", xy());
    const SmoothMap g = SmoothMap::from_components({field("x+y", xy()), field("x-y", xy())});
    const ScalarField h = compose(f, g); // x^2 - y^2
    const Point p{3, 1};
    CHECK(h(p) == Approx(8));
    const Jet j = jet_of(h, p, 2);
    CHECK(j.grad(0) == Approx(6));
    CHECK(j.grad(1) == Approx(-2));
    CHECK(j.hess(1, 1) == Approx(-2));
    const SmoothMap gg = compose(g, g); // (2x, 2y)
    CHECK((jacobian(gg, p) - 2 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("domains are enforced")
{
    const ScalarField f = field("ln(x)", {"x"}, {}, Box::positive_orthant(1));
    CHECK_THROWS_AS(f(Point{-1}), DomainError);
    CHECK_THROWS_AS(f(Point{0}), DomainError);
    CHECK(f(Point{1}) == Approx(0));
    CHECK_THROWS_AS(f(Point{1, 2}), DimensionMismatch);
}

TEST_CASE("box helpers")
{
    const Box b({{0, 1}, {-1, 1}});
    CHECK(b.contains(Point{0.5, 0}));
    CHECK_FALSE(b.contains(Point{1, 0}));
    CHECK(b.is_finite());
    CHECK_FALSE(Box::unbounded(2).is_finite());
    CHECK(b.intersect(Box({{0.5, 2}, {0, 3}})).contains(Point{0.7, 0.5}));
    CHECK_FALSE(b.intersect(Box({{0.5, 2}, {0, 3}})).contains(Point{0.2, 0.5}));
    CHECK(Box::around(Point{1, 1}, 0.5).contains(Point{1.4, 0.6}));
}

TEST_CASE("vector fields")
{
    const VectorField r = VectorField::radial(3);
    const Point p{2, 3, 4};
    CHECK(r(p) == std::vector<double>{2, 3, 4});
    CHECK(r.jacobian(p).isIdentity());
    const VectorField rot = vfield({"y", "-x"}, xy());
    CHECK(rot(Point{0, 1}) == std::vector<double>{1, 0});
}

TEST_CASE("native fields carry hand-written jets")
{
    const ScalarField f = ScalarField::native(1, Box::unbounded(1), [](std::span<const double> p, int order) {
        return exp(Jet::variable(1, order, 0, p[0]));
    });
    CHECK(jet_of(f, Point{0}, 3).third(0, 0, 0) == Approx(1));
    CHECK(f.partial(0)(Point{1}) == Approx(std::exp(1.0)));
}
