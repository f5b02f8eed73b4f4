#include "extenso/config.hpp"

#include <fnmatch.h>

#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace extenso {

std::optional<std::uint64_t> seed_from_environment()
{
    const char* raw = std::getenv("EXTENSO_SEED");
    if (!raw || !*raw)
        return std::nullopt;
    const std::string_view s(raw);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        return std::nullopt;
    return v;
}

RunResult run(const SystemConfig& config, const RunOptions& options,
              const std::function<void(const CheckReport&)>& sink)
{
    std::vector<const CheckSpec*> selected;
    for (const CheckSpec& c : config.checks)
        if (fnmatch(options.filter.c_str(), c.name.c_str(), 0) == 0)
            selected.push_back(&c);

    RunContext ctx;
    ctx.seed = options.seed ? *options.seed : seed_from_environment().value_or(1);
    ctx.tol_scale = options.tol_scale;

    const int n = int(selected.size());
    RunResult result;
    result.reports.resize(std::size_t(n));
    std::vector<char> done(std::size_t(n), 0);
    int next_to_emit = 0;
    std::mutex emit;

    // Reports go out in declaration order: each finished check flushes the
    // longest finished prefix.
    auto finish = [&](int i, CheckReport r) {
        std::lock_guard lock(emit);
        result.reports[std::size_t(i)] = std::move(r);
        done[std::size_t(i)] = 1;
        while (next_to_emit < n && done[std::size_t(next_to_emit)]) {
            if (sink)
                sink(result.reports[std::size_t(next_to_emit)]);
            ++next_to_emit;
        }
    };

    if (options.jobs > 1) {
        // One check per thread; sampling inside a check stays serial.
        ctx.execution = Execution::serial;
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(options.jobs)
        for (int i = 0; i < n; ++i) {
            try {
                finish(i, selected[std::size_t(i)]->run(ctx));
            } catch (...) {
#pragma omp critical(extenso_runner_failure)
                if (!failure)
                    failure = std::current_exception();
            }
        }
        if (failure)
            std::rethrow_exception(failure);
    } else {
        if (options.jobs == 1)
            ctx.execution = Execution::serial;
        for (int i = 0; i < n; ++i)
            finish(i, selected[std::size_t(i)]->run(ctx));
    }

    for (const CheckReport& r : result.reports)
        if (!r.passed)
            result.exit_code = 1;
    return result;
}

} // namespace extenso
