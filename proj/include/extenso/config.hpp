#pragma once

#include "extenso/models.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

/// Declarative system files and the suite runner. The file grammar is
/// described in docs/config-format.md.
namespace extenso {

/// Any problem with a configuration file; the CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line, int column, std::string key = {})
        : Error(what), line_(line), column_(column), key_(std::move(key))
    {
    }
    int line() const { return line_; }
    int column() const { return column_; }
    /// Offending key, when there is one.
    const std::string& key() const { return key_; }

private:
    int line_;
    int column_;
    std::string key_;
};

/// Malformed line.
class ConfigSyntaxError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Well-formed but refers to something undeclared or unknown.
class ConfigSemanticError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A value outside its allowed range (tol <= 0, samples < 1, ...).
class ConfigValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Knobs that apply to a whole run.
struct RunContext {
    std::uint64_t seed = 1;
    double tol_scale = 1.0;
    Execution execution = Execution::parallel;
};

struct CheckSpec {
    std::string name;
    std::string kind;
    double tol = 0.0;
    int line = 0;
    /// Builds and evaluates the report; never throws for check-level errors.
    std::function<CheckReport(const RunContext&)> run;
};

struct SystemConfig {
    std::string name;
    std::string model;
    ThermoSystem system;
    Box sample_box;
    std::map<std::string, KForm> forms;
    std::map<std::string, VectorField> fields;
    std::vector<CheckSpec> checks;
};

SystemConfig parse_config(std::string_view text, const std::string& origin = "<config>");
SystemConfig load_config(const std::string& path);

enum class ReportFormat { text, records };

struct RunOptions {
    std::string filter = "*";
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    ReportFormat format = ReportFormat::text;
    double tol_scale = 1.0;
};

struct RunResult {
    std::vector<CheckReport> reports;
    /// 0 when every selected report passed, 1 otherwise.
    int exit_code = 0;
};

/// Runs the checks whose names match `filter` (shell glob). Reports are
/// handed to `sink` in declaration order as soon as they and their
/// predecessors are done.
RunResult run(const SystemConfig& config, const RunOptions& options,
              const std::function<void(const CheckReport&)>& sink = {});

/// The seed from EXTENSO_SEED, if set and valid.
std::optional<std::uint64_t> seed_from_environment();

} // namespace extenso
