#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace extenso;
using namespace extenso::test;
using doctest::Approx;

TEST_CASE("samples are deterministic and strictly inside the box")
{
    const SampleSpec s{Box({{0, 1}, {2, 3}}), 100, 42, {}};
    const std::vector<Point> a = draw_samples(s);
    const std::vector<Point> b = draw_samples(s);
    CHECK(a == b);
    REQUIRE(a.size() == 100);
    for (const Point& p : a)
        CHECK(s.box.contains(p));
    SampleSpec other = s;
    other.seed = 43;
    CHECK(draw_samples(other) != a);
}

TEST_CASE("explicit points win; unbounded boxes cannot be sampled")
{
    const SampleSpec s{Box::unbounded(2), 10, 1, {{1, 2}, {3, 4}}};
    CHECK(draw_samples(s) == s.points);
    CHECK_THROWS(draw_samples(SampleSpec{Box::unbounded(2), 10, 1, {}}));
}

TEST_CASE("reports keep the worst witnesses in a stable order")
{
    std::vector<Point> points;
    for (int i = 0; i < 12; ++i)
        points.push_back({double(i)});
    // residual = i mod 4: ties broken by sample index
    const CheckReport r =
        evaluate_check("mod", points, [](const Point& p) { return std::fmod(p[0], 4.0); }, 2.5, Execution::serial);
    CHECK_FALSE(r.passed);
    CHECK(r.samples == 12);
    CHECK(r.max_residual == 3.0);
    REQUIRE(r.witnesses.size() == kMaxWitnesses);
    CHECK(r.witnesses[0].sample == 3);
    CHECK(r.witnesses[1].sample == 7);
    CHECK(r.witnesses[2].sample == 11);
    CHECK(r.witnesses[3].sample == 2);
    CHECK(r.witnesses[3].residual == 2.0);
}

TEST_CASE("serial and parallel evaluation agree")
{
    const std::vector<Point> points = draw_samples(SampleSpec{cube(3, -1, 1), 200, 5, {}});
    auto f = [](const Point& p) {
        if (p[0] > 0.8)
            throw DomainError("outside");
        return std::sin(p[0]) * p[1] + p[2];
    };
    const CheckReport s = evaluate_check("c", points, f, 0.5, Execution::serial);
    const CheckReport p = evaluate_check("c", points, f, 0.5, Execution::parallel);
    CHECK(format_record(s) == format_record(p));
    CHECK(s.skipped > 0);
    CHECK(s.samples + s.skipped == 200);
}

TEST_CASE("non-domain errors abort the evaluation")
{
    const std::vector<Point> points{{1}, {2}};
    auto f = [](const Point& p) -> double {
        if (p[0] > 1.5)
            throw std::logic_error("boom");
        return 0.0;
    };
    CHECK_THROWS_AS(evaluate_check("x", points, f, 1.0, Execution::parallel), std::logic_error);
}

TEST_CASE("NaN residuals fail and empty reports fail")
{
    const CheckReport r = evaluate_check("nan", {{1.0}}, [](const Point&) { return std::nan(""); }, 1.0);
    CHECK_FALSE(r.passed);
    CHECK(std::isinf(r.max_residual));
    const CheckReport e = evaluate_check("empty", {{1.0}}, [](const Point&) -> double { throw DomainError("x"); }, 1.0);
    CHECK_FALSE(e.passed);
    CHECK(e.samples == 0);
    CHECK(e.skipped == 1);
    CHECK(e.detail.find("skipped") != std::string::npos);
}

TEST_CASE("absorbing sub-reports")
{
    ReportBuilder b("both", 1.0);
    b.absorb(evaluate_check("a", {{1.0}}, [](const Point&) { return 0.5; }, 1.0));
    b.absorb(failed_report("b", 1.0, "could not run"));
    const CheckReport r = b.finish();
    CHECK_FALSE(r.passed);
    CHECK(r.name == "both");
}

TEST_CASE("formats")
{
    CheckReport r = evaluate_check("fmt", {{1.0, 2.0}}, [](const Point&) { return 0.25; }, 1.0);
    r.detail = "a note";
    const std::string rec = format_record(r);
    CHECK(rec.rfind("check=fmt verdict=pass samples=1 skipped=0 max_residual=0.25 tol=1 ", 0) == 0);
    CHECK(rec.find("witness1=1;2@0.25") != std::string::npos);
    CHECK(rec.find("detail=\"a note\"") != std::string::npos);
    CHECK(rec.find('\n') == std::string::npos);
    const std::string txt = format_text(r);
    CHECK(txt.rfind("PASS fmt:", 0) == 0);
}
