#include "extenso/jet.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace extenso;
using doctest::Approx;

TEST_CASE("product rule through third order")
{
    // f = x^2 y at (2, 3)
    const Jet x = Jet::variable(2, 3, 0, 2.0);
    const Jet y = Jet::variable(2, 3, 1, 3.0);
    const Jet f = x * x * y;
    CHECK(f.value() == Approx(12));
    CHECK(f.grad(0) == Approx(12));
    CHECK(f.grad(1) == Approx(4));
    CHECK(f.hess(0, 0) == Approx(6));
    CHECK(f.hess(0, 1) == Approx(4));
    CHECK(f.hess(1, 0) == Approx(4));
    CHECK(f.hess(1, 1) == Approx(0));
    CHECK(f.third(0, 0, 1) == Approx(2));
    CHECK(f.third(1, 0, 0) == Approx(2));
    CHECK(f.third(0, 0, 0) == Approx(0));
}

TEST_CASE("exp derivatives at 0 are all 1")
{
    const Jet e = exp(Jet::variable(1, 3, 0, 0.0));
    CHECK(e.value() == Approx(1));
    CHECK(e.grad(0) == Approx(1));
    CHECK(e.hess(0, 0) == Approx(1));
    CHECK(e.third(0, 0, 0) == Approx(1));
}

TEST_CASE("log inverts exp")
{
    const Jet x = Jet::variable(2, 3, 0, 0.7);
    const Jet y = Jet::variable(2, 3, 1, -0.2);
    const Jet u = x * y + x;
    const Jet back = log(exp(u));
    for (std::size_t i = 0; i < u.raw().size(); ++i)
        CHECK(back.raw()[i] == Approx(u.raw()[i]).epsilon(1e-12));
}

TEST_CASE("division matches reciprocal product")
{
    const Jet x = Jet::variable(2, 3, 0, 1.5);
    const Jet y = Jet::variable(2, 3, 1, 0.5);
    const Jet a = (x + y) / (x * y);
    const Jet b = (x + y) * reciprocal(x * y);
    for (std::size_t i = 0; i < a.raw().size(); ++i)
        CHECK(a.raw()[i] == Approx(b.raw()[i]).epsilon(1e-12));
    // d/dx of 1/y + 1/x = -1/x^2
    CHECK(a.grad(0) == Approx(-1.0 / (1.5 * 1.5)));
}

TEST_CASE("real powers")
{
    const Jet x = Jet::variable(1, 3, 0, 4.0);
    const Jet r = pow(x, 1.5);
    CHECK(r.value() == Approx(8));
    CHECK(r.grad(0) == Approx(1.5 * 2));
    CHECK(r.hess(0, 0) == Approx(0.75 / 2));
    CHECK(r.third(0, 0, 0) == Approx(-0.375 / 8));
    CHECK(sqrt(x).grad(0) == Approx(0.25));
}

TEST_CASE("atan derivative")
{
    const Jet t = atan(Jet::variable(1, 2, 0, 1.0));
    CHECK(t.value() == Approx(M_PI / 4));
    CHECK(t.grad(0) == Approx(0.5));
    CHECK(t.hess(0, 0) == Approx(-0.5));
}

TEST_CASE("multivariate chain rule")
{
    // outer g(u, v) = u v evaluated at u = x + y, v = x - y
    const Jet x = Jet::variable(2, 2, 0, 2.0);
    const Jet y = Jet::variable(2, 2, 1, 1.0);
    const Jet u = x + y;
    const Jet v = x - y;
    const Jet outer = Jet::variable(2, 2, 0, u.value()) * Jet::variable(2, 2, 1, v.value());
    const std::vector<Jet> inner{u, v};
    const Jet h = compose(outer, inner);
    const Jet direct = u * v; // x^2 - y^2
    CHECK(h.value() == Approx(direct.value()));
    CHECK(h.grad(0) == Approx(4));
    CHECK(h.grad(1) == Approx(-2));
    CHECK(h.hess(0, 0) == Approx(2));
    CHECK(h.hess(1, 1) == Approx(-2));
    CHECK(h.hess(0, 1) == Approx(0));
}

TEST_CASE("shape mismatch is rejected")
{
    CHECK_THROWS_AS(Jet::variable(2, 1, 0, 1.0) + Jet::variable(3, 1, 0, 1.0), JetMismatch);
}

TEST_CASE("domain violations raise DomainError")
{
    CHECK_THROWS_AS(log(Jet(1, 1, -1.0)), DomainError);
    CHECK_THROWS_AS(reciprocal(Jet(1, 1, 0.0)), DomainError);
    CHECK_THROWS_AS(checked_pow(-2.0, 0.5), DomainError);
}

TEST_CASE("partial and truncation")
{
    const Jet x = Jet::variable(2, 3, 0, 2.0);
    const Jet y = Jet::variable(2, 3, 1, 3.0);
    const Jet f = x * x * y; // f_x = 2xy
    const Jet fx = f.partial(0);
    CHECK(fx.order() == 2);
    CHECK(fx.value() == Approx(12));
    CHECK(fx.grad(0) == Approx(6));
    CHECK(fx.grad(1) == Approx(4));
    CHECK(f.truncated(1).order() == 1);
}
