#pragma once

#include "extenso/exterior.hpp"
#include "extenso/flows.hpp"
#include "extenso/sampling.hpp"

#include <array>

/// Executable checks for extensive functions, maps, forms and the entropy
/// recovered from a heat form. Residuals are absolute.
namespace extenso {

/// A check's hypotheses do not hold (f not extensive, c = 0, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// θ(ρ) vanished on the integration path.
class VanishingTransversalityError : public Error {
public:
    VanishingTransversalityError(Point where, double value);
    const Point& where() const { return where_; }
    double value() const { return value_; }

private:
    Point where_;
    double value_;
};

/// θ/θ(ρ) is not closed at some quadrature node.
class ClosednessError : public Error {
public:
    ClosednessError(Point where, double residual);
    const Point& where() const { return where_; }
    double residual() const { return residual_; }

private:
    Point where_;
    double residual_;
};

class NonConstantRatioError : public Error {
public:
    NonConstantRatioError(const std::string& what, std::vector<Witness> witnesses)
        : Error(what), witnesses_(std::move(witnesses))
    {
    }
    const std::vector<Witness>& witnesses() const { return witnesses_; }

private:
    std::vector<Witness> witnesses_;
};

class EmptyOverlapError : public Error {
public:
    using Error::Error;
};

inline constexpr std::array<double, 4> kScalingFactors{0.5, 0.9, 1.1, 2.0};
/// Flow tolerance for scaling oracles; tighter than the residual bounds
/// checked against it.
inline constexpr double kOracleFlowTol = 1e-13;

// Functions ---------------------------------------------------------------

/// df_p(ρ_p) − f(p).
double euler_residual(const ScalarField& f, const VectorField& rho, std::span<const double> p);
/// |f(λp) − λf(p)| with λp taken along the flow of ρ.
double scaling_defect(const ScalarField& f, const VectorField& rho, std::span<const double> p, double lambda);

/// Euler residual and the scaling oracle over kScalingFactors; the residual
/// of a sample is the larger of the two.
CheckReport check_extensive_function(const ScalarField& f, const VectorField& rho, const SampleSpec& s, double tol,
                                     std::string name = "extensive_function", Execution ex = Execution::parallel);

/// |dΦ(ρ) − βΦ| over the samples.
CheckReport check_degree(const ScalarField& phi, const VectorField& rho, double beta, const SampleSpec& s, double tol,
                         std::string name = "degree", Execution ex = Execution::parallel);

// Maps --------------------------------------------------------------------

/// F(λp) − λF(p), with λp the linear scaling.
Eigen::VectorXd homogeneity_defect_map(const SmoothMap& f, std::span<const double> p, double lambda);

/// ‖DF(p)·p − F(p)‖.
CheckReport check_radial_pushforward(const SmoothMap& f, const SampleSpec& s, double tol,
                                     Execution ex = Execution::parallel);
/// ‖F(λp) − λF(p)‖ for λ ∈ {0.5, 2}.
CheckReport check_map_scaling(const SmoothMap& f, const SampleSpec& s, double tol,
                              Execution ex = Execution::parallel);
/// Both of the above; passes iff both pass.
CheckReport check_homogeneous_diffeo(const SmoothMap& f, const SampleSpec& s, double tol,
                                     Execution ex = Execution::parallel);

/// check_homogeneous_diffeo on B.forward ∘ A.inverse; samples are points in
/// A's chart coordinates.
CheckReport check_transition_compatibility(const Chart& a, const Chart& b, const SampleSpec& s, double tol,
                                           Execution ex = Execution::parallel);

// Forms -------------------------------------------------------------------

/// L_ρω − ω at p.
FormValue form_extensivity_residual(const KForm& w, const VectorField& rho, std::span<const double> p);
CheckReport check_extensive_form(const KForm& w, const VectorField& rho, const SampleSpec& s, double tol,
                                 std::string name = "extensive_form", Execution ex = Execution::parallel);

/// φ_t^*ω at p (through the fundamental matrix) against eᵗω(p).
CheckReport check_scaling_law(const KForm& w, const VectorField& rho, std::span<const double> p, double t,
                              double tol, double flow_tol = 1e-12);

/// θ∧dθ at p; a 3-form with no components when n ≤ 2.
FormValue integrability_defect(const KForm& theta, std::span<const double> p);
CheckReport check_integrable(const KForm& theta, const SampleSpec& s, double tol, std::string name = "integrable",
                             Execution ex = Execution::parallel);

/// θ(ρ) at p.
double transversality_value(const KForm& theta, const VectorField& rho, std::span<const double> p);
/// Passes when |θ(ρ)| ≥ floor at every sample; the residual is
/// max(0, floor − |θ(ρ)|).
CheckReport check_transversal(const KForm& theta, const VectorField& rho, const SampleSpec& s, double floor,
                              std::string name = "transversal", Execution ex = Execution::parallel);

// Entropy -----------------------------------------------------------------

struct EntropyRecovery {
    double entropy = 0.0;
    /// Largest |d(θ/θ(ρ))| seen at quadrature nodes.
    double closedness = 0.0;
    int evaluations = 0;
};

/// S(target) = S0·exp(∫ θ/θ(ρ)) along the straight segment base→target.
EntropyRecovery recover_entropy(const KForm& theta, const VectorField& rho, std::span<const double> base, double s0,
                                std::span<const double> target, double tol = 1e-10);
/// Same along a polygonal path (first vertex is the base).
EntropyRecovery recover_entropy_along(const KForm& theta, const VectorField& rho, const std::vector<Point>& path,
                                      double s0, double tol = 1e-10);

// Transversal submanifolds ------------------------------------------------

/// Samples are projected onto {f = c} by Newton along ∇f; the residual is
/// |df(ρ) − c|, infinite where df vanishes.
CheckReport check_transversal_level_set(const ScalarField& f, const VectorField& rho, double c, const SampleSpec& s,
                                        double tol, std::string name = "transversal_level_set",
                                        Execution ex = Execution::parallel);

/// k with g = k·f on the samples; NonConstantRatioError when the ratio
/// varies by more than tol·|k| (sample standard deviation).
double defining_function_scale(const ScalarField& f, const ScalarField& g, const VectorField& rho,
                               const SampleSpec& s, double tol, double extensivity_tol = 1e-8);

} // namespace extenso
