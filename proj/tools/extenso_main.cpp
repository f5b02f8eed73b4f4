#include "extenso/config.hpp"
#include "extenso/flows.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdio>
#include <iostream>

using namespace extenso;

namespace {

struct Shared {
    std::string config;
    std::string filter = "*";
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    std::string format = "text";
    double tol_scale = 1.0;
};

class UsageError : public Error {
public:
    using Error::Error;
};

Point parse_point(const std::string& text, int dim, const char* what)
{
    Point p;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        double v = 0.0;
        const char* first = text.data() + pos;
        while (first < text.data() + end && *first == ' ')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, text.data() + end, v);
        if (ec != std::errc{} || ptr != text.data() + end)
            throw UsageError(fmt::format("{}: '{}' is not a comma-separated list of numbers", what, text));
        p.push_back(v);
        pos = end + 1;
    }
    if (int(p.size()) != dim)
        throw UsageError(fmt::format("{}: expected {} coordinates, got {}", what, dim, p.size()));
    return p;
}

std::uint64_t effective_seed(const Shared& o) { return o.seed ? *o.seed : seed_from_environment().value_or(1); }

const VectorField& field_named(const SystemConfig& cfg, const std::string& name)
{
    const auto it = cfg.fields.find(name);
    if (it == cfg.fields.end())
        throw UsageError(fmt::format("no field named '{}' in {}", name, cfg.name));
    return it->second;
}

const KForm& form_named(const SystemConfig& cfg, const std::string& name)
{
    const auto it = cfg.forms.find(name);
    if (it == cfg.forms.end())
        throw UsageError(fmt::format("no form named '{}' in {}", name, cfg.name));
    return it->second;
}

void emit(const CheckReport& r, const Shared& o)
{
    std::cout << (o.format == "records" ? format_record(r) : format_text(r)) << '\n' << std::flush;
}

int run_check(const Shared& o)
{
    const SystemConfig cfg = load_config(o.config);
    RunOptions opts;
    opts.filter = o.filter;
    opts.seed = o.seed;
    opts.jobs = o.jobs;
    opts.format = o.format == "records" ? ReportFormat::records : ReportFormat::text;
    opts.tol_scale = o.tol_scale;
    const RunResult r = run(cfg, opts, [&](const CheckReport& rep) { emit(rep, o); });
    if (r.reports.empty())
        std::cerr << fmt::format("warning: no check matches '{}'\n", o.filter);
    return r.exit_code;
}

struct EntropyArgs {
    std::string from, to, form = "heat", field = "rho";
    std::vector<std::string> via;
    double tol = 1e-10;
};

int run_entropy(const Shared& o, const EntropyArgs& a)
{
    const SystemConfig cfg = load_config(o.config);
    const int n = cfg.system.dim();
    std::vector<Point> path{parse_point(a.from, n, "--from")};
    for (const std::string& v : a.via)
        path.push_back(parse_point(v, n, "--via"));
    path.push_back(parse_point(a.to, n, "--to"));
    const double s0 = cfg.system.entropy(path.front());
    const EntropyRecovery rec =
        recover_entropy_along(form_named(cfg, a.form), field_named(cfg, a.field), path, s0, a.tol * o.tol_scale);
    const double direct = cfg.system.entropy(path.back());
    const double rel = std::abs(rec.entropy - direct) / std::max(std::abs(direct), 1e-300);
    if (o.format == "records")
        std::cout << fmt::format("entropy={:.17g} direct={:.17g} relative_error={:.3g} closedness={:.3g} "
                                 "evaluations={}\n",
                                 rec.entropy, direct, rel, rec.closedness, rec.evaluations);
    else
        std::cout << fmt::format("S(target) = {:.15g}\nS direct  = {:.15g}\nrelative error {:.3g}, closedness "
                                 "residual {:.3g}, {} integrand evaluations\n",
                                 rec.entropy, direct, rel, rec.closedness, rec.evaluations);
    return 0;
}

struct FlowArgs {
    std::string from, field = "rho";
    double time = 1.0;
    int points = 10;
    double tol = kDefaultFlowTol;
};

int run_flow(const Shared& o, const FlowArgs& a)
{
    const SystemConfig cfg = load_config(o.config);
    const VectorField& x = field_named(cfg, a.field);
    const Point p = parse_point(a.from, x.dim(), "--from");
    if (a.points < 1)
        throw UsageError("--points must be at least 1");
    const std::vector<std::string>& names = cfg.system.names;
    for (int i = 0; i <= a.points; ++i) {
        const double t = a.time * double(i) / double(a.points);
        const Point q = flow(x, p, t, a.tol * o.tol_scale, false).endpoint;
        std::string line = o.format == "records" ? fmt::format("t={:.17g}", t) : fmt::format("t={:<12.6g}", t);
        for (std::size_t k = 0; k < q.size(); ++k)
            line += o.format == "records" ? fmt::format(" {}={:.17g}", names[k], q[k])
                                          : fmt::format(" {}={:<14.9g}", names[k], q[k]);
        std::cout << line << '\n';
    }
    return 0;
}

struct ChartArgs {
    std::string at, field = "rho";
    double radius = 0.25;
    int samples = 20;
    double tol = 1e-6;
};

int run_chart(const Shared& o, const ChartArgs& a)
{
    const SystemConfig cfg = load_config(o.config);
    const VectorField& x = field_named(cfg, a.field);
    const Point p = parse_point(a.at, x.dim(), "--at");
    if (a.samples < 1)
        throw UsageError("--samples must be at least 1");
    const Chart chart = extensive_chart_from_field(x, p, a.radius);
    // In an extensive chart the pushed-forward field is y ↦ y.
    auto residual = [&](const Point& q) {
        const Eigen::VectorXd push = pushforward(chart, x, q);
        const Point y = chart.forward(q);
        return (push - as_eigen(y)).norm();
    };
    const SampleSpec spec{chart.domain, a.samples, effective_seed(o), {}};
    const CheckReport r =
        evaluate_check("chart_pushforward_radial", draw_samples(spec), residual, a.tol * o.tol_scale);
    emit(r, o);
    return r.passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical checks of extensive thermodynamic structures."};
    app.require_subcommand(1);
    Shared o;

    auto add_shared = [&](CLI::App* sub, bool suite) {
        sub->add_option("config", o.config, "System file")->required()->check(CLI::ExistingFile);
        if (suite)
            sub->add_option("--filter", o.filter, "Run only checks whose name matches this glob");
        sub->add_option("--seed", o.seed, "Sampling seed (default: EXTENSO_SEED, then 1)");
        sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::NonNegativeNumber);
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "records"}));
        sub->add_option("--tol-scale", o.tol_scale, "Multiply every tolerance by X")->check(CLI::PositiveNumber);
    };

    CLI::App* check = app.add_subcommand("check", "Run the checks declared in a system file");
    add_shared(check, true);

    EntropyArgs ea;
    CLI::App* entropy = app.add_subcommand("entropy", "Recover S at a point by integrating the heat form");
    add_shared(entropy, false);
    entropy->add_option("--from", ea.from, "Base point, comma-separated")->required();
    entropy->add_option("--to", ea.to, "Target point, comma-separated")->required();
    entropy->add_option("--via", ea.via, "Intermediate path vertices");
    entropy->add_option("--form", ea.form, "1-form to integrate");
    entropy->add_option("--field", ea.field, "Scaling field");
    entropy->add_option("--tol", ea.tol, "Quadrature tolerance")->check(CLI::PositiveNumber);

    FlowArgs fa;
    CLI::App* flow_cmd = app.add_subcommand("flow", "Print samples along a trajectory of a field");
    add_shared(flow_cmd, false);
    flow_cmd->add_option("--from", fa.from, "Start point, comma-separated")->required();
    flow_cmd->add_option("--field", fa.field, "Field to follow");
    flow_cmd->add_option("--time", fa.time, "Final time (may be negative)");
    flow_cmd->add_option("--points", fa.points, "Number of intervals");
    flow_cmd->add_option("--tol", fa.tol, "Integrator tolerance")->check(CLI::PositiveNumber);

    ChartArgs ca;
    CLI::App* chart = app.add_subcommand("chart", "Build an extensive chart and report its pushforward residual");
    add_shared(chart, false);
    chart->add_option("--at", ca.at, "Chart base point, comma-separated")->required();
    chart->add_option("--field", ca.field, "Field to radialize");
    chart->add_option("--radius", ca.radius, "Half-width of the chart box")->check(CLI::PositiveNumber);
    chart->add_option("--samples", ca.samples, "Number of sample points");
    chart->add_option("--tol", ca.tol, "Residual tolerance")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (o.jobs > 0)
            set_worker_threads(o.jobs);
        if (check->parsed())
            return run_check(o);
        if (entropy->parsed())
            return run_entropy(o, ea);
        if (flow_cmd->parsed())
            return run_flow(o, fa);
        return run_chart(o, ca);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
