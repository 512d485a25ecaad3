#pragma once

#include "hkflow/density.hpp"
#include "hkflow/diagnostics.hpp"
#include "hkflow/entropy_model.hpp"
#include "hkflow/error.hpp"
#include "hkflow/flow_kind.hpp"
#include "hkflow/grid.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hkflow {

struct SolverConfig {
    double dt_init = 1e-4;
    double t_end = 1.0;
    double cfl_safety = 0.45;
    double snapshot_every = 0.01;
    double positivity_floor = 0.0;
    // When set, every step uses this dt (cut only to land on snapshot times).
    // Paired runs use it to share a step schedule.
    std::optional<double> fixed_dt;
};

struct Trajectory {
    FlowKind kind = FlowKind::Spherical;
    std::vector<double> times;
    std::vector<DensityField> snapshots;
    std::vector<DiagnosticRecord> diagnostics;
    double clipped_mass = 0.0; // cumulative mass removed by clipping roundoff negatives
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

// Mean-value face density (P(u_R) - P(u_L)) / (f(u_L) - f(u_R)) with the model frozen
// at the face, P_u = -u f_u. It lies between u_L and u_R and tends to u as u_R -> u_L.
double face_density(const EntropyModel& model, double xf, double uL, double uR);

// Mass flux across each face, a discretization of -u grad f, so that the flow
// reads du/dt = div F + R. Between positive cells F = u_face (f_L - f_R) / h with
// the mean-value u_face, which vanishes exactly where f is flat. Next to vacuum the
// flux falls back to grad Phi - avg(Phi_x) - u_face f_x with a Peclet-switched
// drift density. Faces between two empty cells and interval boundary faces carry 0.
std::vector<double> flux_faces(const EntropyModel& model, const Grid& grid, std::span<const double> u);

// Reaction term R(u) of the flow kind (0 for Wasserstein).
std::vector<double> reaction_cells(const EntropyModel& model, const Grid& grid,
                                   std::span<const double> u, FlowKind kind);

// Right-hand side div F + R.
std::vector<double> flow_rate(const EntropyModel& model, const Grid& grid, std::span<const double> u,
                              FlowKind kind);

// A forward-Euler update produced a value below -1e-13; the caller halves dt.
class StepRejected : public NumericError {
public:
    StepRejected(const std::string& what, std::size_t cell, double value)
        : NumericError(what), cell_(cell), value_(value) {}
    std::size_t cell() const noexcept { return cell_; }
    double value() const noexcept { return value_; }

private:
    std::size_t cell_;
    double value_;
};

struct StepResult {
    DensityField u;
    double clipped_mass = 0.0;
};

StepResult step(const EntropyModel& model, const Grid& grid, const DensityField& u, double dt,
                FlowKind kind, double positivity_floor = 0.0);

// dt underflowed below 1e-14 t_end; carries everything computed so far.
class StiffnessError : public NumericError {
public:
    StiffnessError(const std::string& what, Trajectory partial, DensityField last)
        : NumericError(what), partial_(std::move(partial)), last_(std::move(last)) {}
    const Trajectory& partial() const noexcept { return partial_; }
    const DensityField& last_state() const noexcept { return last_; }

private:
    Trajectory partial_;
    DensityField last_;
};

// Largest stable explicit step: cfl_safety * min(h^2 / max Phi_u, h / max |f_x|, 1 / max |reaction rate|).
double stable_dt(const EntropyModel& model, const Grid& grid, std::span<const double> u, FlowKind kind,
                 double cfl_safety);

Trajectory run(const EntropyModel& model, const Grid& grid, const DensityField& u0,
               const SolverConfig& config, FlowKind kind);

struct MassRecovery {
    std::vector<double> times;
    std::vector<double> mass;            // M(t) = M0 exp(int_0^t fbar)
    std::vector<DensityField> populations; // U(t) = M(t) u(t)
};

// Rebuild the population U of the fitness model from a spherical trajectory.
MassRecovery mass_recovery(const EntropyModel& model, const Grid& grid, const Trajectory& traj,
                           double M0);

} // namespace hkflow
