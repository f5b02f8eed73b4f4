#pragma once

#include "extenso/extensivity.hpp"

#include <map>
#include <string>
#include <vector>

/// Built-in thermodynamic systems, metric constructions and the two
/// counterexamples, wired to the checks.
namespace extenso {

/// A fundamental equation S(x) on an extensive chart with the heat and work
/// forms derived from it: θ = T dS with T = (∂S/∂U)⁻¹, ε = dU − θ.
struct ThermoSystem {
    std::string name;
    std::vector<std::string> names;
    std::map<std::string, double> constants;
    Box domain;
    int energy_slot = 0;
    ScalarField entropy;
    ScalarField temperature;
    VectorField rho;
    KForm heat{0, 1};
    KForm work{0, 1};
    /// Degree of the entropy as a potential.
    double beta = 1.0;

    int dim() const { return int(names.size()); }
    /// dU.
    KForm energy_differential() const;
};

/// System from a fundamental-equation expression over `names`; names[energy_slot]
/// plays the role of U.
ThermoSystem make_system(std::string name, std::vector<std::string> names, std::map<std::string, double> constants,
                         const std::string& entropy_source, Box domain, int energy_slot = 0);

inline constexpr const char* kIdealGasEntropy = "N*R*ln(K1*U^c*V/N^(c+1))";
inline constexpr const char* kVanDerWaalsEntropy = "N*R*ln(K2*(V/N-b)*(U/N+N*a/V)^c)";

/// S = N R ln(K1 U^c V / N^(c+1)) on U, V, N > 0.
ThermoSystem ideal_gas(double c, double k1, double r);
/// S = N R ln(K2 (V/N − b)(U/N + N a/V)^c). Points where V/N ≤ b or
/// U/N + Na/V ≤ 0 raise DomainError, so samples there are skipped.
ThermoSystem van_der_waals(double a, double b, double c, double k2, double r, Box domain = {});

/// ε∧dε at p.
FormValue work_wedge(const ThermoSystem& s, std::span<const double> p);

/// Textbook ideal-gas pressure and chemical potential as usually quoted:
/// p = cU/V, μ = −U(cN)⁻¹[ln(K U^c V N^−(c+1)) + c + 1].
double quoted_ideal_gas_pressure(double c, std::span<const double> uvn);
double quoted_ideal_gas_potential(double c, double k, std::span<const double> uvn);
/// p = T ∂S/∂V and μ = −T ∂S/∂N of a system on (U, V, N).
double derived_pressure(const ThermoSystem& s, std::span<const double> uvn);
double derived_potential(const ThermoSystem& s, std::span<const double> uvn);

/// Compares the quoted ideal-gas p and μ against the ones derived from S.
/// Passing means agreement; the detail carries the measured gap either way.
CheckReport compare_quoted_ideal_gas(const ThermoSystem& s, double k, const SampleSpec& spec, double tol);

/// aS/(cRV²) + [cN(b − V/N)]⁻¹ U/N, read with the grouping as printed.
double quoted_vdw_work_wedge(double a, double b, double c, double r, double entropy, std::span<const double> uvn);
/// Jet-computed ε∧dε coefficient against the quoted closed form.
CheckReport compare_quoted_vdw(const ThermoSystem& s, double a, double b, double c, double r, const SampleSpec& spec,
                               double tol);

// Metrics -----------------------------------------------------------------

enum class MetricKind { ruppeiner, quevedo };

struct MetricField {
    MetricKind kind;
    ScalarField potential;
    double beta;
    SymTensor2Field g;

    /// Factor c in L_ρ g = c·g: β for Hess Φ, 2β for Φ·Hess Φ.
    double lie_factor() const { return kind == MetricKind::ruppeiner ? beta : 2.0 * beta; }
};

MetricField ruppeiner_metric(const ScalarField& phi, double beta);
MetricField quevedo_metric(const ScalarField& phi, double beta);
inline MetricField ruppeiner_metric(const ThermoSystem& s) { return ruppeiner_metric(s.entropy, s.beta); }
inline MetricField quevedo_metric(const ThermoSystem& s) { return quevedo_metric(s.entropy, s.beta); }

/// max |L_ρ g − c·g| over the samples.
CheckReport check_metric_scaling(const MetricField& m, const VectorField& rho, const SampleSpec& s, double tol,
                                 Execution ex = Execution::parallel);
/// ‖g·ρ‖ over the samples.
CheckReport check_null_direction(const MetricField& m, const VectorField& rho, const SampleSpec& s, double tol,
                                 Execution ex = Execution::parallel);
/// |dλ(ρ) − βλ| over the samples.
CheckReport conformal_factor_check(const ScalarField& lambda, const VectorField& rho, double beta,
                                   const SampleSpec& s, double tol, Execution ex = Execution::parallel);

// Counterexamples ---------------------------------------------------------

/// X = y∂_x − x∂_y on the plane.
VectorField rotation_field();
/// (w, z) = (e^{−θ}, r e^{−θ}) on x > 0, with θ the counterclockwise angle.
Chart rotation_chart();

struct RotationCounterexample {
    VectorField field;
    Chart chart;
    /// Pushforward of X in (w, z) against the radial field.
    CheckReport pushforward;
    SingularityReport origin;
    /// Passes when the origin is radial-incompatible with the expected
    /// linearization.
    CheckReport classification;
};

RotationCounterexample rotation_counterexample(std::uint64_t seed = 1, int samples = 50);

struct AlphaCounterexample {
    KForm alpha{2, 1};
    CheckReport extensive;
    /// Residual |α(ρ)|; passing means α is not transversal.
    CheckReport not_transversal;
    CheckReport integrable;
};

/// α = (1 + y/x)dx − (1 + x/y)dy on x, y > 0.
KForm alpha_form();
AlphaCounterexample alpha_counterexample(std::uint64_t seed = 1, int samples = 50);

/// On R^{2n+1} with coordinates (w, q¹..qⁿ, p₁..pₙ): Θ = dw − p_i dqⁱ,
/// σ = βw∂_w + qⁱ∂_{qⁱ} + (β − 1)p_j∂_{p_j}; checks L_σΘ = βΘ.
KForm phase_space_form(int n);
VectorField phase_space_field(int n, double beta);
CheckReport phase_space_sigma_check(int n, double beta, double tol, std::uint64_t seed = 1, int samples = 20);

} // namespace extenso
