#include "extenso/expr.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace extenso;
using namespace extenso::expr;
using doctest::Approx;

namespace {

Jet eval_at(std::string_view src, const std::vector<std::pair<std::string, double>>& point,
            std::map<std::string, double> constants, int order)
{
    Binding b;
    int slot = 0;
    for (const auto& [name, value] : point)
        b.variables[name] = Binding::Slot{slot++, value};
    b.constants = std::move(constants);
    return eval(parse(src), b, order);
}

} // namespace

TEST_CASE("multiplication and division associate as written")
{
    const Expression e = parse("c*U/V");
    const Expression want =
        Expression::binary(BinaryOp::mul, Expression::identifier("c"),
                           Expression::binary(BinaryOp::div, Expression::identifier("U"), Expression::identifier("V")));
    const Expression left =
        Expression::binary(BinaryOp::div,
                           Expression::binary(BinaryOp::mul, Expression::identifier("c"), Expression::identifier("U")),
                           Expression::identifier("V"));
    // Either tree evaluates identically; the parser's tree is fixed here.
    CHECK((e == want || e == left));
    CHECK(eval_at("c*U/V", {{"U", 2.0}, {"V", 3.0}}, {{"c", 1.5}}, 0).value() == Approx(1.0));
}

TEST_CASE("ideal gas fundamental equation parses")
{
    const Expression e = parse("N*R*ln(K1*U^c*V/N^(c+1))");
    CHECK(e.free_vars() == std::set<std::string>{"K1", "N", "R", "U", "V", "c"});
}

TEST_CASE("incomplete input reports its offset")
{
    try {
        parse("x +");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 3);
        CHECK(!e.expected().empty());
    }
}

TEST_CASE("other syntax errors")
{
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("(x"), ParseError);
    CHECK_THROWS_AS(parse("x y"), ParseError);
    CHECK_THROWS_AS(parse("2**3"), ParseError);
    try {
        parse("sin(x)");
        FAIL("expected an unknown-function error");
    } catch (const UnknownFunctionError& e) {
        CHECK(e.name() == "sin");
        CHECK(e.offset() == 0);
    }
}

TEST_CASE("free variables")
{
    CHECK(parse("x+y").free_vars() == std::set<std::string>{"x", "y"});
    CHECK(parse("2+2").free_vars().empty());
    CHECK(parse("N*R*ln(V/N)").free_vars() == std::set<std::string>{"N", "R", "V"});
}

TEST_CASE("square has the expected jet")
{
    const Jet j = eval_at("x^2", {{"x", 3.0}}, {}, 2);
    CHECK(j.value() == Approx(9));
    CHECK(j.grad(0) == Approx(6));
    CHECK(j.hess(0, 0) == Approx(2));
}

TEST_CASE("log of a product")
{
    const Jet j = eval_at("ln(x*y)", {{"x", 1.0}, {"y", 1.0}}, {}, 1);
    CHECK(j.value() == Approx(0));
    CHECK(j.grad(0) == Approx(1));
    CHECK(j.grad(1) == Approx(1));
}

TEST_CASE("precedence and unary minus")
{
    CHECK(eval_at("-x^2", {{"x", 3.0}}, {}, 0).value() == Approx(-9));
    CHECK(eval_at("2^3^2", {}, {}, 0).value() == Approx(512));
    CHECK(eval_at("1-2-3", {}, {}, 0).value() == Approx(-4));
    CHECK(eval_at("8/4/2", {}, {}, 0).value() == Approx(1));
    CHECK(eval_at("2*-3", {}, {}, 0).value() == Approx(-6));
    CHECK(eval_at("1.5e2 + .5", {}, {}, 0).value() == Approx(150.5));
}

TEST_CASE("unbound identifiers are named")
{
    try {
        eval_at("x*Q", {{"x", 1.0}}, {}, 0);
        FAIL("expected an unbound identifier error");
    } catch (const UnboundIdentifierError& e) {
        CHECK(e.name() == "Q");
    }
}

TEST_CASE("domain errors during evaluation")
{
    CHECK_THROWS_AS(eval_at("ln(x)", {{"x", -1.0}}, {}, 0), DomainError);
    CHECK_THROWS_AS(eval_at("1/x", {{"x", 0.0}}, {}, 1), DomainError);
}

TEST_CASE("printing round-trips")
{
    for (const char* src : {"N*R*ln(K1*U^c*V/N^(c+1))", "-(x+y)^2", "a-(b-c)", "exp(-x)/2", "2^3^2"}) {
        const Expression e = parse(src);
        CHECK(parse(e.to_string()) == e);
    }
}

TEST_CASE("compiled evaluation matches the tree walker")
{
    const Expression e = parse("N*R*ln(K1*U^c*V/N^(c+1))");
    const std::vector<std::string> vars{"U", "V", "N"};
    const std::map<std::string, double> constants{{"R", 1.0}, {"K1", 2.0}, {"c", 1.5}};
    const CompiledExpression ce(e, vars, constants);
    const Point p{1.3, 2.2, 0.7};
    Binding b;
    for (int i = 0; i < 3; ++i)
        b.variables[vars[std::size_t(i)]] = Binding::Slot{i, p[std::size_t(i)]};
    b.constants = constants;
    const Jet tree = eval(e, b, 3);
    const Jet compiled = ce.jet(p, 3);
    CHECK(ce.value(p) == Approx(tree.value()).epsilon(1e-14));
    for (std::size_t i = 0; i < tree.raw().size(); ++i)
        CHECK(compiled.raw()[i] == Approx(tree.raw()[i]).epsilon(1e-12));
}
