#pragma once

#include "hkflow/density.hpp"
#include "hkflow/entropy_model.hpp"
#include "hkflow/error.hpp"
#include "hkflow/grid.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace hkflow {

// W2: transport only. HK: transport + reaction. HKS: HK restricted to unit-mass paths.
enum class TransportKind { W2, HK, HKS };

std::string_view to_string(TransportKind kind);
TransportKind parse_transport_kind(std::string_view name);

struct SolverOpts {
    int max_iters = 20000;
    double tol = 1e-6;
    // Primal step tau = step_ratio / L and dual step sigma = 1 / (step_ratio L),
    // L the interpolation operator norm from power iteration, so tau sigma L^2 = 1.
    double step_ratio = 1.0;
    // Residual is evaluated every check_every iterations.
    int check_every = 10;
    std::uint64_t seed = 0x5eed;
    bool keep_interpolation = false;
};

struct TransportProblem {
    Grid grid;
    DensityField rho0;
    DensityField rho1;
    TransportKind kind = TransportKind::W2;
    int n_time = 32;
    SolverOpts opts;
};

// Space-time fields at (time slice, cell) centers, row-major in time.
struct SpaceTimeFields {
    int n_time = 0;
    std::size_t n_cells = 0;
    std::vector<double> rho;
    std::vector<double> momentum;
    std::vector<double> source;
};

struct TransportResult {
    double distance_sq = 0.0;
    double distance = 0.0;
    double residual = 0.0;
    int iters = 0;
    bool converged = false;
    std::optional<SpaceTimeFields> interpolation;
};

class TransportNonConvergence : public Error {
public:
    TransportNonConvergence(const std::string& what, TransportResult best)
        : Error(what), best_(std::move(best)) {}
    const TransportResult& best() const noexcept { return best_; }

private:
    TransportResult best_;
};

// Proximal map of gamma * (|w|^2 / rho) at one node, w = (m, zeta).
struct ActionPoint {
    double rho = 0.0;
    double m = 0.0;
    double zeta = 0.0;
};

// Largest real root of (r - rho)(r + 2 gamma)^2 = gamma (m^2 + zeta^2), in closed form
// (Cardano / trigonometric) with one Newton polish.
double action_prox_root(double rho, double s_sq, double gamma);

// argmin over (r, a, b) of 1/2 |(r, a, b) - (rho, m, zeta)|^2 + gamma (a^2 + b^2) / r.
ActionPoint prox_action(double rho, double m, double zeta, double gamma);

// Benamou-Brenier action (m^2 + zeta^2) / rho with the convex extension at rho <= 0.
double action_density(double rho, double m, double zeta);

// Minimize the discrete action over staggered space-time paths. Throws
// TransportNonConvergence when the residual is above tol after max_iters.
TransportResult solve_dynamic(const TransportProblem& problem);

// W2^2 on an interval via inverse CDFs of the piecewise-constant densities,
// evaluated on a midpoint s-grid of `samples` points.
double w2_quantile_oracle(const Grid& grid, const DensityField& rho0, const DensityField& rho1,
                          std::size_t samples = 20000);

struct OrderingReport {
    double d_hk = 0.0;
    double d_hks = 0.0;
    double w2 = 0.0;
    double slack = 0.0; // epsilon on the distance scale
    bool hk_le_hks = true;
    bool hks_le_w2 = true;
    bool pass() const noexcept { return hk_le_hks && hks_le_w2; }
};

// d_HK <= d_HKS <= W2 within eps = 3 * (sum of the solver tolerances, mapped to distance scale).
OrderingReport check_ordering(const Grid& grid, const DensityField& rho0, const DensityField& rho1,
                              int n_time = 32, const SolverOpts& opts = {});

struct TalagrandResult {
    double lhs = 0.0; // d^2(u0, m)
    double rhs = 0.0; // E(u0)
    double ratio = 0.0;
    bool skipped = false; // u0 == m
    int iters = 0;
};

// d_HKS^2(u0, m) / E(u0) (kind HKS) or d_HK^2(u0, m) / E(u0) (kind HK) on the circle.
// model must be normalized so that f(x, m(x)) = 0.
TalagrandResult talagrand_check(const EntropyModel& model, const Grid& grid, const DensityField& u0,
                                TransportKind kind, int n_time = 32, const SolverOpts& opts = {});

} // namespace hkflow
