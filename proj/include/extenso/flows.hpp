#pragma once

#include "extenso/field.hpp"

#include <Eigen/Dense>

#include <string>

namespace extenso {

inline constexpr double kDefaultFlowTol = 1e-10;

/// Integration failed: the trajectory left the field's domain box, or the
/// step size collapsed.
class FlowError : public Error {
public:
    enum class Kind { domain_exit, step_underflow };
    FlowError(Kind kind, double time, const std::string& what) : Error(what), kind_(kind), time_(time) {}
    Kind kind() const { return kind_; }
    /// Flow time reached when integration stopped (the exit estimate for
    /// domain_exit).
    double time() const { return time_; }

private:
    Kind kind_;
    double time_;
};

class ChartError : public Error {
public:
    enum class Kind { singular_point, newton_divergence };
    ChartError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct FlowResult {
    Point endpoint;
    /// Derivative of φ_t at the start point, from the variational equation.
    Eigen::MatrixXd fundamental_matrix;
    int steps = 0;
    /// Largest accepted local error estimate, in the units of `tol`.
    double est_error = 0.0;
};

/// φ_t(p) by Dormand–Prince 5(4) with PI step control; t may be negative.
/// The variational equation is carried along unless `variational` is false.
FlowResult flow(const VectorField& x, std::span<const double> p, double t, double tol = kDefaultFlowTol,
                bool variational = true);

/// λp := φ_{ln λ}(p).
Point scale_state(const VectorField& rho, std::span<const double> p, double lambda, double tol = kDefaultFlowTol);

/// A coordinate patch: `forward` sends points of `domain` to chart
/// coordinates and `inverse` sends them back.
struct Chart {
    SmoothMap forward;
    SmoothMap inverse;
    Box domain;
};

/// Coordinates (y¹..yⁿ) near p in which X = ∂_1. The slice through p is the
/// hyperplane orthogonal to X(p).
Chart flow_box_chart(const VectorField& x, std::span<const double> p, double radius, double tol = kDefaultFlowTol);

/// Flow-box chart followed by x¹ = e^{y¹}, xⁱ = yⁱe^{y¹}; X becomes radial.
Chart extensive_chart_from_field(const VectorField& x, std::span<const double> p, double radius,
                                 double tol = kDefaultFlowTol);

/// φ_*X at q in chart coordinates: J_forward(q)·X(q).
Eigen::VectorXd pushforward(const Chart& chart, const VectorField& x, std::span<const double> q);

enum class Singularity { regular, radial_compatible, radial_incompatible };
std::string to_string(Singularity s);

struct SingularityReport {
    Singularity kind = Singularity::regular;
    double field_norm = 0.0;
    /// Linearization at p; filled for singular points only.
    Eigen::MatrixXd jacobian;
};

/// Necessary-condition test only: a locally radial field has identity
/// linearization at its zeros.
SingularityReport classify_singularity(const VectorField& x, std::span<const double> p, double tol);

} // namespace extenso
