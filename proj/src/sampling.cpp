#include "extenso/sampling.hpp"

#include "extenso/flows.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

namespace extenso {

std::vector<Point> draw_samples(const SampleSpec& spec)
{
    if (!spec.points.empty())
        return spec.points;
    if (spec.count < 0)
        throw Error("sample count must be non-negative");
    if (!spec.box.is_finite() || spec.box.is_empty())
        throw Error("random sampling needs a finite, non-empty box");
    std::mt19937_64 rng(spec.seed);
    std::vector<std::uniform_real_distribution<double>> axes;
    for (const Interval& s : spec.box.sides())
        axes.emplace_back(s.lo, s.hi);
    std::vector<Point> out;
    out.reserve(std::size_t(spec.count));
    while (int(out.size()) < spec.count) {
        Point p(axes.size());
        for (std::size_t i = 0; i < axes.size(); ++i)
            p[i] = axes[i](rng);
        if (spec.box.contains(p))
            out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------

void ReportBuilder::keep_worst(Witness w)
{
    auto worse = [](const Witness& a, const Witness& b) {
        return a.residual != b.residual ? a.residual > b.residual : a.sample < b.sample;
    };
    worst_.insert(std::upper_bound(worst_.begin(), worst_.end(), w, worse), std::move(w));
    if (worst_.size() > kMaxWitnesses)
        worst_.pop_back();
}

void ReportBuilder::add(std::size_t sample, std::span<const double> point, double residual)
{
    if (std::isnan(residual))
        residual = std::numeric_limits<double>::infinity();
    ++samples_;
    max_ = std::max(max_, residual);
    keep_worst(Witness{Point(point.begin(), point.end()), residual, sample});
}

void ReportBuilder::skip(const std::string& why)
{
    if (skipped_++ == 0)
        first_skip_ = why;
}

void ReportBuilder::absorb(const CheckReport& part)
{
    samples_ += part.samples;
    skipped_ += part.skipped;
    if (part.samples > 0)
        max_ = std::max(max_, part.max_residual);
    if (!part.passed && part.samples == 0)
        forced_fail_ = true;
    for (const Witness& w : part.witnesses)
        keep_worst(w);
    if (!part.detail.empty())
        note(part.name + ": " + part.detail);
}

void ReportBuilder::note(const std::string& text)
{
    if (!detail_.empty())
        detail_ += "; ";
    detail_ += text;
}

CheckReport ReportBuilder::finish() const
{
    CheckReport r;
    r.name = name_;
    r.samples = samples_;
    r.skipped = skipped_;
    r.tol = tol_;
    r.max_residual = samples_ > 0 ? max_ : std::numeric_limits<double>::infinity();
    r.passed = !forced_fail_ && r.max_residual <= tol_;
    r.witnesses = worst_;
    r.detail = detail_;
    if (skipped_ > 0) {
        const std::string s = fmt::format("{} sample(s) skipped, first: {}", skipped_, first_skip_);
        r.detail = r.detail.empty() ? s : r.detail + "; " + s;
    }
    return r;
}

CheckReport failed_report(std::string name, double tol, std::string why)
{
    CheckReport r;
    r.name = std::move(name);
    r.tol = tol;
    r.max_residual = std::numeric_limits<double>::infinity();
    r.passed = false;
    r.detail = std::move(why);
    return r;
}

// ---------------------------------------------------------------------------

void set_worker_threads(int n)
{
    if (n > 0)
        omp_set_num_threads(n);
}

namespace {

// Runs f on sample i; returns NaN and records the reason when skipped.
double run_one(const SampleResidual& f, const Point& p, std::string& reason)
{
    try {
        return f(p);
    } catch (const DomainError& e) {
        reason = e.what();
    } catch (const FlowError& e) {
        if (e.kind() != FlowError::Kind::domain_exit)
            throw;
        reason = e.what();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

std::vector<double> map_samples(const std::vector<Point>& points, const SampleResidual& f, Execution ex,
                                std::vector<std::string>* skip_reasons)
{
    const std::size_t n = points.size();
    std::vector<double> out(n);
    std::vector<std::string> reasons(n);
    if (ex == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = run_one(f, points[i], reasons[i]);
    } else {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) {
            try {
                out[i] = run_one(f, points[i], reasons[i]);
            } catch (...) {
#pragma omp critical(extenso_map_failure)
                if (!failure)
                    failure = std::current_exception();
            }
        }
        if (failure)
            std::rethrow_exception(failure);
    }
    if (skip_reasons)
        *skip_reasons = std::move(reasons);
    return out;
}

CheckReport evaluate_check(std::string name, const std::vector<Point>& points, const SampleResidual& f, double tol,
                           Execution ex)
{
    std::vector<std::string> reasons;
    const std::vector<double> res = map_samples(points, f, ex, &reasons);
    ReportBuilder b(std::move(name), tol);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!reasons[i].empty())
            b.skip(reasons[i]);
        else
            b.add(i, points[i], res[i]);
    }
    return b.finish();
}

// ---------------------------------------------------------------------------

namespace {

std::string join_point(const Point& p, const char* sep)
{
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            s += sep;
        s += fmt::format("{:.17g}", p[i]);
    }
    return s;
}

std::string quoted(const std::string& s)
{
    std::string q = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            q += '\\';
        q += (c == '\n') ? ' ' : c;
    }
    return q + "\"";
}

} // namespace

std::string format_text(const CheckReport& r)
{
    std::string s = fmt::format("{} {}: max_residual={:.3e} tol={:.1e} samples={} skipped={}",
                                r.passed ? "PASS" : "FAIL", r.name, r.max_residual, r.tol, r.samples, r.skipped);
    if (!r.detail.empty())
        s += "\n    note: " + r.detail;
    for (const Witness& w : r.witnesses)
        s += fmt::format("\n    witness ({}) residual={:.3e}", join_point(w.point, ", "), w.residual);
    return s;
}

std::string format_record(const CheckReport& r)
{
    std::string s = fmt::format("check={} verdict={} samples={} skipped={} max_residual={:.17g} tol={:.17g}", r.name,
                                r.passed ? "pass" : "fail", r.samples, r.skipped, r.max_residual, r.tol);
    for (std::size_t i = 0; i < r.witnesses.size(); ++i)
        s += fmt::format(" witness{}={}@{:.17g}", i + 1, join_point(r.witnesses[i].point, ";"),
                         r.witnesses[i].residual);
    if (!r.detail.empty())
        s += " detail=" + quoted(r.detail);
    return s;
}

} // namespace extenso
