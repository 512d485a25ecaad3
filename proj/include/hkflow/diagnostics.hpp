#pragma once

#include "hkflow/density.hpp"
#include "hkflow/entropy_model.hpp"
#include "hkflow/flow_kind.hpp"
#include "hkflow/grid.hpp"

#include <span>
#include <string>
#include <vector>

namespace hkflow {

struct Trajectory;

struct DiagnosticRecord {
    double t = 0.0;
    double entropy = 0.0;    // int E(x, u)
    double energy = 0.0;     // int Psi(x, u); NaN when Phi is infinite
    double production = 0.0; // D E(u) for the flow kind
    double fbar = 0.0;       // int u f / int u
    double mass = 0.0;
    double min_f = 0.0;
    double max_f = 0.0;
};

double entropy_total(const EntropyModel& model, const Grid& grid, std::span<const double> u);
double energy_total(const EntropyModel& model, const Grid& grid, std::span<const double> u);

// Mean fitness int u f / int u (equal to int u f for a probability density).
double mean_fitness(const EntropyModel& model, const Grid& grid, std::span<const double> u);
// int u (f - a)^2.
double fitness_spread(const EntropyModel& model, const Grid& grid, std::span<const double> u, double a);

// Discrete int u |grad f|^2, assembled from the solver flux as sum h F^2 / u_face.
double gradient_production(const EntropyModel& model, const Grid& grid, std::span<const double> u);

// Spherical: int u ((f - fbar)^2 + |grad f|^2); Conic: int u (f^2 + |grad f|^2);
// Wasserstein: int u |grad f|^2. Fitness is evaluated on the normalized profile
// with the spherical formula.
double entropy_production(const EntropyModel& model, const Grid& grid, std::span<const double> u,
                          FlowKind kind);

DiagnosticRecord make_record(const EntropyModel& model, const Grid& grid, std::span<const double> u,
                             FlowKind kind, double t);

struct DecayFit {
    double gamma = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

// Least-squares slope of log(entropy) against t over the last tail_fraction of
// snapshots whose entropy exceeds 1e-14. Throws UsageError with fewer than 10 points.
DecayFit fit_decay_rate(const Trajectory& traj, double tail_fraction);

struct InequalityReport {
    std::vector<double> ratios;      // entropy / production per non-equilibrium member
    std::vector<std::size_t> member; // family index of each ratio
    double sup_ratio = 0.0;
    std::size_t argmax_case = 0;
    std::size_t skipped = 0;
    std::string tolerance_notes;
};

// Empirical constant of E(u) <= C D E(u) over a family. Members with both sides
// below 1e-14 are skipped; D < 1e-14 with E > 1e-10 raises CounterexampleError.
InequalityReport eep_ratio_sweep(const EntropyModel& model, const Grid& grid,
                                 std::span<const DensityField> family, FlowKind kind);

struct MaxPrincipleReport {
    bool pass = true;
    double band_lo = 0.0;
    double band_hi = 0.0;
    double tolerance = 0.0;
    double worst_violation = 0.0; // largest excess outside the band, 0 if none
    double worst_time = 0.0;
};

// f(x, u(t)) must stay in [min f(., u0), max f(., u0)] up to 10 h^2 Lip(f).
MaxPrincipleReport check_max_principle(const Trajectory& traj, const EntropyModel& model,
                                       const Grid& grid);

struct IdentityResidual {
    double lhs = 0.0; // (W(u') - W(u)) / dt or (E(u') - E(u)) / dt
    double rhs = 0.0;
    double relative = 0.0;
};

// One explicit step of size dt, compared against -D E(u).
IdentityResidual dissipation_residual(const EntropyModel& model, const Grid& grid,
                                      const DensityField& u, double dt, FlowKind kind);

// One explicit step of size dt, compared against
// -int |grad Phi|^2 + int (Phi_x + u f_x) grad Phi + int R Phi.
IdentityResidual energy_residual(const EntropyModel& model, const Grid& grid, const DensityField& u,
                                 double dt, FlowKind kind);

} // namespace hkflow
