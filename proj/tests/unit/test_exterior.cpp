#include "extenso/flows.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace extenso;
using namespace extenso::test;
using doctest::Approx;

namespace {

const MultiIndex dx = bit(0), dy = bit(1), dz = bit(2);

KForm d(const ScalarField& f) { return KForm::differential(f); }

// A 2-form on R^3 with polynomial/exponential coefficients.
KForm sample_two_form()
{
    KForm w(3, 2);
    w.set(dx | dy, field("x*y*z + 1", xyz()));
    w.set(dx | dz, field("exp(y)*x", xyz()));
    w.set(dy | dz, field("z^2 - x", xyz()));
    return w;
}

KForm sample_one_form()
{
    KForm w(3, 1);
    w.set(dx, field("y*z", xyz()));
    w.set(dy, field("x^2", xyz()));
    w.set(dz, field("exp(x*y)", xyz()));
    return w;
}

} // namespace

TEST_CASE("multi-index tables are lexicographic")
{
    const auto& two = multi_indices(3, 2);
    REQUIRE(two.size() == 3);
    CHECK(two[0] == (dx | dy));
    CHECK(two[1] == (dx | dz));
    CHECK(two[2] == (dy | dz));
    CHECK(multi_indices(2, 3).empty());
    CHECK(to_string(dx | dz) == "(1,3)");
    CHECK(shuffle_sign(dy, dx) == -1);
    CHECK(shuffle_sign(dx, dy) == 1);
}

TEST_CASE("wedge products")
{
    const Point p{0.3, 0.8};
    const KForm a = d(ScalarField::coordinate(2, 0));
    const KForm b = d(ScalarField::coordinate(2, 1));
    CHECK(wedge(a, b)(p)[dx | dy] == Approx(1));
    CHECK(wedge(a, a)(p).max_abs() == 0.0);
    // (x dy) ^ (y dx) = -xy dx^dy
    const KForm xdy = ScalarField::coordinate(2, 0) * b;
    const KForm ydx = ScalarField::coordinate(2, 1) * a;
    CHECK(wedge(xdy, ydx)(p)[dx | dy] == Approx(-0.3 * 0.8));
    CHECK(wedge(FormValue(xdy(p)), ydx(p))[dx | dy] == Approx(-0.24));
}

TEST_CASE("graded commutativity")
{
    const Point p{0.2, 0.9, 1.4};
    const KForm a = sample_one_form();
    const KForm b = d(field("x*z", xyz()));
    CHECK((wedge(a, b)(p) + wedge(b, a)(p)).max_abs() < 1e-14);
    const KForm c = sample_two_form();
    CHECK((wedge(a, c)(p) - wedge(c, a)(p)).max_abs() < 1e-14);
}

TEST_CASE("exterior derivative")
{
    const Point p{1.7, -0.4};
    const KForm xdy = ScalarField::coordinate(2, 0) * d(ScalarField::coordinate(2, 1));
    CHECK(exterior_derivative(xdy, p)[dx | dy] == Approx(1));
    const KForm df = d(field("x^2*y", xy()));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const Point q = random_point(rng, 2, -2, 2);
        CHECK(exterior_derivative(df, q).max_abs() < 1e-12);
    }
    // d of a top form vanishes
    CHECK(exterior_derivative(exterior_derivative(xdy), p).max_abs() == 0.0);
}

TEST_CASE("field-level d agrees with pointwise d")
{
    const Point p{0.5, 1.1, -0.3};
    for (const KForm& w : {sample_one_form(), sample_two_form()})
        CHECK((exterior_derivative(w)(p) - exterior_derivative(w, p)).max_abs() < 1e-13);
}

TEST_CASE("leibniz rule")
{
    std::mt19937_64 rng(11);
    const KForm a = sample_one_form();
    const KForm b = d(field("x*y - z^3", xyz())) + field("z", xyz()) * d(field("y", xyz()));
    for (int i = 0; i < 10; ++i) {
        const Point p = random_point(rng, 3, -1, 1);
        const FormValue lhs = exterior_derivative(wedge(a, b), p);
        const FormValue rhs =
            wedge(exterior_derivative(a, p), b(p)) - wedge(a(p), exterior_derivative(b, p));
        CHECK((lhs - rhs).max_abs() < 1e-12);
    }
}

TEST_CASE("interior products")
{
    const VectorField rho = VectorField::radial(2);
    CHECK(interior_product(rho, d(ScalarField::coordinate(2, 0)), Point{2, 5})[0] == Approx(2));
    const VectorField ex = vfield({"1", "0"}, xy());
    KForm area(2, 2);
    area.set(dx | dy, ScalarField::constant(2, 1.0));
    const FormValue v = interior_product(ex, area, Point{0.1, 0.2});
    CHECK(v[dx] == Approx(0));
    CHECK(v[dy] == Approx(1));
    CHECK_THROWS_AS(interior_product(ex, KForm::function(ScalarField::coordinate(2, 0)), Point{0.1, 0.2}),
                    DimensionMismatch);
}

TEST_CASE("contraction of the ideal gas heat form with rho")
{
    // theta(rho) = T S; at (1,1,1) with K1 = e: T = 2/3, S = 1.
    const ThermoSystem s = ideal_gas(1.5, std::exp(1.0), 1.0);
    const Point p{1, 1, 1};
    CHECK(interior_product(s.rho, s.heat, p)[0] == Approx(2.0 / 3.0));
}

TEST_CASE("heat form differential at the unit point")
{
    // theta = dU + (U/(cV)) dV - mu dN; d theta has (UV, UN, VN) = (2/3, 0, 2/3)
    const ThermoSystem s = ideal_gas(1.5, std::exp(1.0), 1.0);
    const FormValue dt = exterior_derivative(s.heat, Point{1, 1, 1});
    CHECK(dt[dx | dy] == Approx(2.0 / 3.0));
    CHECK(dt[dx | dz] == Approx(0.0).epsilon(1e-14));
    CHECK(dt[dy | dz] == Approx(2.0 / 3.0));
}

TEST_CASE("lie derivatives of forms")
{
    const VectorField rho = VectorField::radial(2);
    const Point p{0.7, 1.9};
    CHECK(lie_derivative_form(rho, d(ScalarField::coordinate(2, 0)), p)[dx] == Approx(1));
    const KForm xdy = ScalarField::coordinate(2, 0) * d(ScalarField::coordinate(2, 1));
    const FormValue l = lie_derivative_form(rho, xdy, p);
    CHECK(l[dx] == Approx(0));
    CHECK(l[dy] == Approx(2 * 0.7));
    const KForm alpha = alpha_form();
    const FormValue la = lie_derivative_form(VectorField::radial(2), alpha, Point{1, 2});
    CHECK(la[dx] == Approx(3));
    CHECK(la[dy] == Approx(-1.5));
    // 0-forms: L_X f = df(X)
    const FormValue lf = lie_derivative_form(rho, KForm::function(field("x^2*y", xy())), p);
    CHECK(lf[0] == Approx(3 * 0.7 * 0.7 * 1.9));
}

TEST_CASE("cartan formula on random inputs")
{
    std::mt19937_64 rng(5);
    const VectorField x = vfield({"y*z", "x - z", "exp(x)*y"}, xyz());
    const KForm one = sample_one_form();
    const KForm two = sample_two_form();
    for (int i = 0; i < 10; ++i) {
        const Point p = random_point(rng, 3, -1, 1);
        for (const KForm* w : {&one, &two}) {
            const FormValue cartan = exterior_derivative(interior_product(x, *w), p) +
                                     interior_product(x, exterior_derivative(*w), p);
            CHECK((cartan - lie_derivative_coordinates(x, *w, p)).max_abs() < 1e-12);
            CHECK((lie_derivative_form(x, *w, p) - cartan).max_abs() < 1e-12);
        }
    }
}

TEST_CASE("lie derivatives of symmetric tensors")
{
    SymTensor2Field delta(2);
    delta.set(0, 0, ScalarField::constant(2, 1.0));
    delta.set(1, 1, ScalarField::constant(2, 1.0));
    const Eigen::MatrixXd l = lie_derivative_sym2(VectorField::radial(2), delta, Point{0.3, 2});
    CHECK((l - 2 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);

    const ScalarField phi = field("x^2*y/(x+y)", xy(), {}, Box::positive_orthant(2));
    const Point p{1, 1};
    const SymTensor2Field h = hessian_tensor(phi);
    const Eigen::MatrixXd hv = h.value(p);
    CHECK(hv(0, 0) == Approx(0.25));
    CHECK(hv(0, 1) == Approx(0.5));
    CHECK(hv(1, 1) == Approx(-0.25));
    CHECK((lie_derivative_sym2(VectorField::radial(2), h, p) - 2 * hv).norm() < 1e-12);
    const SymTensor2Field q = phi * h;
    const Eigen::MatrixXd qv = q.value(p);
    CHECK(qv(0, 0) == Approx(0.125));
    CHECK(qv(0, 1) == Approx(0.25));
    CHECK((lie_derivative_sym2(VectorField::radial(2), q, p) - 4 * qv).norm() < 1e-12);
}

TEST_CASE("pullbacks")
{
    KForm area(2, 2);
    area.set(dx | dy, ScalarField::constant(2, 1.0));
    const SmoothMap twice = SmoothMap::linear(2 * Eigen::MatrixXd::Identity(2, 2));
    const Point p{0.4, -0.6};
    CHECK(pullback(twice, area, p)[dx | dy] == Approx(4));
    const KForm w = sample_one_form();
    const Point q{0.4, -0.6, 1.2};
    CHECK((pullback(SmoothMap::identity(3), w, q) - w(q)).max_abs() == 0.0);

    // Radial flow for t = ln 3 pulls dx back to 3 dx.
    const FlowResult f = flow(VectorField::radial(2), p, std::log(3.0));
    const FormValue pulled = pullback(d(ScalarField::coordinate(2, 0))(f.endpoint), f.fundamental_matrix);
    CHECK(pulled[dx] == Approx(3).epsilon(1e-9));
    CHECK(pulled[dy] == Approx(0).epsilon(1e-9));
}

TEST_CASE("pullback is functorial and commutes with d")
{
    std::mt19937_64 rng(17);
    const SmoothMap f = SmoothMap::from_components({field("x + y^2", xyz()), field("x*z", xyz()), field("exp(y)", xyz())});
    const SmoothMap g = SmoothMap::from_components({field("y*z", xyz()), field("x - z", xyz()), field("x^2 + y", xyz())});
    const KForm one = sample_one_form();
    const KForm two = sample_two_form();
    for (int i = 0; i < 10; ++i) {
        const Point p = random_point(rng, 3, -1, 1);
        for (const KForm* w : {&one, &two}) {
            // (g o f)^* w = f^* g^* w
            const FormValue lhs = pullback(compose(g, f), *w, p);
            const FormValue rhs = pullback(f, pullback(g, *w), p);
            CHECK((lhs - rhs).max_abs() < 1e-10);
            // F^* d w = d F^* w
            const FormValue a = pullback(f, exterior_derivative(*w), p);
            const FormValue b = exterior_derivative(pullback(f, *w), p);
            CHECK((a - b).max_abs() < 1e-10);
        }
    }
}
