#include "hkflow/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hkflow {

std::string_view to_string(FlowKind kind)
{
    switch (kind) {
    case FlowKind::Spherical: return "spherical";
    case FlowKind::Conic: return "conic";
    case FlowKind::Wasserstein: return "wasserstein";
    case FlowKind::Fitness: return "fitness";
    }
    return "unknown";
}

FlowKind parse_flow_kind(std::string_view name)
{
    if (name == "spherical")
        return FlowKind::Spherical;
    if (name == "conic")
        return FlowKind::Conic;
    if (name == "wasserstein")
        return FlowKind::Wasserstein;
    if (name == "fitness")
        return FlowKind::Fitness;
    throw UsageError("unknown flow kind '" + std::string(name) + "'");
}

double face_density(const EntropyModel& model, double xf, double uL, double uR)
{
    const double avg = 0.5 * (uL + uR);
    if (uL <= 0.0 || uR <= 0.0)
        return avg;
    if (std::abs(uR - uL) <= 1e-9 * std::max(uL, uR))
        return avg;
    const double dP = model.flux_potential(xf, uR) - model.flux_potential(xf, uL);
    const double df = model.f(xf, uL) - model.f(xf, uR);
    const double mean = dP / df;
    if (!std::isfinite(mean) || mean <= 0.0)
        return avg;
    return mean;
}

namespace {

// Phi-form flux, used next to vacuum where f may be infinite.
double vacuum_flux(const EntropyModel& model, const Grid& grid, std::size_t j, double uL, double uR)
{
    const double h = grid.h();
    const double xL = grid.center(grid.left_cell(j)), xR = grid.center(grid.right_cell(j));
    const double xf = grid.face(j);
    double F = (model.flux_potential(xR, uR) - model.flux_potential(xL, uL)) / h;
    F -= 0.5 * (model.phi_x(xL, uL) + model.phi_x(xR, uR));
    const double u_avg = 0.5 * (uL + uR);
    const double fx = model.f_x(xf, u_avg);
    if (fx != 0.0) {
        const double diffusion = 0.5 * (model.phi_u(xL, uL) + model.phi_u(xR, uR));
        double u_face;
        if (diffusion > 0.0 && std::abs(fx) * h <= 2.0 * diffusion)
            u_face = u_avg;
        else
            u_face = fx > 0.0 ? uL : uR;
        F -= u_face * model.f_x(xf, u_face);
    }
    return F;
}

} // namespace

std::vector<double> flux_faces(const EntropyModel& model, const Grid& grid, std::span<const double> u)
{
    if (u.size() != grid.n_cells())
        throw UsageError("flux_faces: density size does not match the grid");
    const double h = grid.h();
    std::vector<double> flux(grid.n_faces(), 0.0);
    for (std::size_t j = 0; j < flux.size(); ++j) {
        if (grid.is_boundary_face(j))
            continue;
        const std::size_t L = grid.left_cell(j), R = grid.right_cell(j);
        const double uL = u[L], uR = u[R];
        if (uL == 0.0 && uR == 0.0)
            continue;
        double F;
        if (uL > 0.0 && uR > 0.0) {
            const double fL = model.f(grid.center(L), uL), fR = model.f(grid.center(R), uR);
            F = face_density(model, grid.face(j), uL, uR) * (fL - fR) / h;
            if (!std::isfinite(F))
                F = vacuum_flux(model, grid, j, uL, uR);
        } else {
            F = vacuum_flux(model, grid, j, uL, uR);
        }
        if (!std::isfinite(F)) {
            std::ostringstream os;
            os << "flux_faces: non-finite flux at face " << j << " (u_left=" << uL
               << ", u_right=" << uR << ")";
            throw NumericError(os.str());
        }
        flux[j] = F;
    }
    return flux;
}

namespace {

std::vector<double> normalized(std::span<const double> u, double mass)
{
    std::vector<double> out(u.begin(), u.end());
    for (double& v : out)
        v /= mass;
    return out;
}

} // namespace

std::vector<double> reaction_cells(const EntropyModel& model, const Grid& grid,
                                   std::span<const double> u, FlowKind kind)
{
    const std::size_t n = grid.n_cells();
    std::vector<double> r(n, 0.0);
    switch (kind) {
    case FlowKind::Wasserstein:
        break;
    case FlowKind::Conic:
        for (std::size_t i = 0; i < n; ++i)
            r[i] = model.u_times_f(grid.center(i), u[i]);
        break;
    case FlowKind::Spherical: {
        // fbar shares the midpoint rule with the mass, so h sum r = 0 up to roundoff.
        const double fbar = mean_fitness(model, grid, u);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = model.u_times_f(grid.center(i), u[i]) - u[i] * fbar;
        break;
    }
    case FlowKind::Fitness: {
        const double mass = integrate(grid, u);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = mass * model.u_times_f(grid.center(i), u[i] / mass);
        break;
    }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(r[i]))
            throw NumericError("reaction term not finite at cell " + std::to_string(i));
    return r;
}

std::vector<double> flow_rate(const EntropyModel& model, const Grid& grid, std::span<const double> u,
                              FlowKind kind)
{
    std::vector<double> flux;
    if (kind == FlowKind::Fitness) {
        const double mass = integrate(grid, u);
        if (!(mass > 0.0))
            throw UsageError("fitness flow needs a positive population");
        flux = flux_faces(model, grid, normalized(u, mass));
        for (double& F : flux)
            F *= mass;
    } else {
        flux = flux_faces(model, grid, u);
    }
    std::vector<double> rate = divergence_cells(grid, flux);
    const std::vector<double> r = reaction_cells(model, grid, u, kind);
    for (std::size_t i = 0; i < rate.size(); ++i)
        rate[i] += r[i];
    return rate;
}

StepResult step(const EntropyModel& model, const Grid& grid, const DensityField& u, double dt,
                FlowKind kind, double positivity_floor)
{
    if (!(dt > 0.0))
        throw UsageError("step: dt must be positive");
    const std::vector<double> rate = flow_rate(model, grid, u.values(), kind);
    std::vector<double> next(u.size());
    double clipped = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
        double v = u[i] + dt * rate[i];
        if (v < -1e-13) {
            std::ostringstream os;
            os << "step produced u=" << v << " at cell " << i;
            throw StepRejected(os.str(), i, v);
        }
        if (v < positivity_floor) {
            clipped += positivity_floor - v;
            v = positivity_floor;
        }
        next[i] = v;
    }
    return {DensityField(grid, std::move(next)), clipped * grid.h()};
}

double stable_dt(const EntropyModel& model, const Grid& grid, std::span<const double> u, FlowKind kind,
                 double cfl_safety)
{
    double mass = 1.0;
    if (kind == FlowKind::Fitness)
        mass = integrate(grid, u);
    double max_diff = 0.0, max_drift = 0.0, max_rate = 0.0;
    const double fbar = (kind == FlowKind::Spherical) ? mean_fitness(model, grid, u) : 0.0;
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const double x = grid.center(i);
        const double v = u[i] / mass;
        if (v <= 0.0)
            continue;
        max_diff = std::max(max_diff, model.phi_u(x, v));
        max_drift = std::max(max_drift, std::abs(model.f_x(x, v)));
        if (kind != FlowKind::Wasserstein)
            max_rate = std::max(max_rate, std::abs(model.f(x, v) - fbar));
    }
    const double h = grid.h();
    double dt = std::numeric_limits<double>::infinity();
    if (max_diff > 0.0)
        dt = std::min(dt, h * h / max_diff);
    if (max_drift > 0.0)
        dt = std::min(dt, h / max_drift);
    if (max_rate > 0.0)
        dt = std::min(dt, 1.0 / max_rate);
    return cfl_safety * dt;
}

Trajectory run(const EntropyModel& model, const Grid& grid, const DensityField& u0,
               const SolverConfig& config, FlowKind kind)
{
    if (!(config.t_end > 0.0) || !(config.dt_init > 0.0) || !(config.snapshot_every > 0.0))
        throw UsageError("run: t_end, dt_init and snapshot_every must be positive");
    if (!(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0))
        throw UsageError("run: cfl_safety must lie in (0, 1]");
    if (u0.size() != grid.n_cells())
        throw UsageError("run: initial density does not match the grid");
    if (requires_unit_mass(kind) && std::abs(u0.mass() - 1.0) > 1e-10)
        throw UsageError("run: " + std::string(to_string(kind)) + " flow needs a unit-mass initial density");
    if (!(u0.mass() > 0.0))
        throw UsageError("run: initial density has zero mass");

    Trajectory traj;
    traj.kind = kind;
    auto record = [&](double t, const DensityField& u) {
        traj.times.push_back(t);
        traj.snapshots.push_back(u);
        traj.diagnostics.push_back(make_record(model, grid, u.values(), kind, t));
    };

    DensityField u = u0;
    double t = 0.0;
    record(t, u);

    const double t_end = config.t_end;
    const double min_dt = 1e-14 * t_end;
    double dt_cur = config.fixed_dt ? *config.fixed_dt : config.dt_init;
    std::size_t streak = 0;
    std::size_t snap_index = 1;
    auto next_snapshot = [&] {
        return std::min(static_cast<double>(snap_index) * config.snapshot_every, t_end);
    };

    while (t < t_end) {
        const double target = next_snapshot();
        double dt = dt_cur;
        if (!config.fixed_dt)
            dt = std::min(dt, stable_dt(model, grid, u.values(), kind, config.cfl_safety));
        bool lands = false;
        if (t + dt >= target - 1e-12 * t_end) {
            dt = target - t;
            lands = true;
        }
        if (dt < min_dt && !lands) {
            throw StiffnessError("run: dt underflow at t=" + std::to_string(t), traj, u);
        }
        try {
            StepResult r = step(model, grid, u, dt, kind, config.positivity_floor);
            u = std::move(r.u);
            traj.clipped_mass += r.clipped_mass;
        } catch (const StepRejected&) {
            ++traj.rejected_steps;
            dt_cur = 0.5 * dt;
            streak = 0;
            if (dt_cur < min_dt)
                throw StiffnessError("run: dt underflow at t=" + std::to_string(t), traj, u);
            continue;
        }
        ++traj.accepted_steps;
        t = lands ? target : t + dt;
        if (!config.fixed_dt && ++streak >= 20) {
            dt_cur = std::min(2.0 * dt_cur, config.dt_init);
            streak = 0;
        }
        if (lands) {
            record(t, u);
            ++snap_index;
        }
    }
    return traj;
}

MassRecovery mass_recovery(const EntropyModel& model, const Grid& grid, const Trajectory& traj,
                           double M0)
{
    (void)model;
    if (!(M0 > 0.0))
        throw UsageError("mass_recovery: M0 must be positive");
    if (traj.kind != FlowKind::Spherical)
        throw UsageError("mass_recovery needs a spherical trajectory");
    if (traj.diagnostics.size() != traj.times.size() || traj.times.empty())
        throw UsageError("mass_recovery: trajectory has no fbar records");

    MassRecovery out;
    double log_mass = std::log(M0);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (k > 0) {
            const double dt = traj.times[k] - traj.times[k - 1];
            log_mass += 0.5 * dt * (traj.diagnostics[k - 1].fbar + traj.diagnostics[k].fbar);
        }
        const double M = std::exp(log_mass);
        out.times.push_back(traj.times[k]);
        out.mass.push_back(M);
        out.populations.push_back(traj.snapshots[k].scaled(grid, M));
    }
    return out;
}

} // namespace hkflow
