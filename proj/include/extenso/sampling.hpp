#pragma once

#include "extenso/field.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace extenso {

/// Points to check at: the explicit ones if given, otherwise `count`
/// pseudo-random points drawn uniformly from the interior of `box`.
struct SampleSpec {
    Box box;
    int count = 50;
    std::uint64_t seed = 1;
    std::vector<Point> points;
};

std::vector<Point> draw_samples(const SampleSpec& spec);

struct Witness {
    Point point;
    double residual = 0.0;
    std::size_t sample = 0;
};

struct CheckReport {
    std::string name;
    int samples = 0;
    int skipped = 0;
    /// Infinite when nothing could be evaluated.
    double max_residual = 0.0;
    double tol = 0.0;
    bool passed = false;
    /// Worst offenders, largest residual first, at most five.
    std::vector<Witness> witnesses;
    /// Free-form note: measured values, or the error that aborted the check.
    std::string detail;
};

inline constexpr std::size_t kMaxWitnesses = 5;

/// Folds per-sample residuals into a report. Samples must be fed in index
/// order for byte-identical output.
class ReportBuilder {
public:
    ReportBuilder(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

    void add(std::size_t sample, std::span<const double> point, double residual);
    void skip(const std::string& why);
    /// Merges a sub-report (its witnesses included).
    void absorb(const CheckReport& part);
    void note(const std::string& text);

    CheckReport finish() const;

private:
    void keep_worst(Witness w);

    std::string name_;
    double tol_;
    int samples_ = 0;
    int skipped_ = 0;
    double max_ = 0.0;
    std::vector<Witness> worst_;
    std::string detail_;
    std::string first_skip_;
    bool forced_fail_ = false;
};

/// Report for a check that could not run at all.
CheckReport failed_report(std::string name, double tol, std::string why);

enum class Execution { serial, parallel };

/// Residual of one sample. DomainError and domain-exit FlowError mark the
/// sample as skipped; any other exception aborts the whole evaluation.
using SampleResidual = std::function<double(const Point&)>;

/// Per-sample residuals, NaN for skipped samples. `parallel` fans out with
/// OpenMP; results are identical to `serial`.
std::vector<double> map_samples(const std::vector<Point>& points, const SampleResidual& f, Execution ex,
                                std::vector<std::string>* skip_reasons = nullptr);

CheckReport evaluate_check(std::string name, const std::vector<Point>& points, const SampleResidual& f, double tol,
                           Execution ex = Execution::parallel);

/// Upper bound on worker threads for parallel sample maps (0: runtime default).
void set_worker_threads(int n);

std::string format_text(const CheckReport& r);
/// One line of space-separated key=value pairs.
std::string format_record(const CheckReport& r);

} // namespace extenso
