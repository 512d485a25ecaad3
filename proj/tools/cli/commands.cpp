#include "commands.hpp"

#include "io.hpp"

#include "hkflow/diagnostics.hpp"
#include "hkflow/flow_solver.hpp"
#include "hkflow/transport.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>

namespace hkcli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const hkflow::TransportNonConvergence*>(&e))
        return kTransportNonConvergence;
    if (dynamic_cast<const hkflow::UsageError*>(&e))
        return kConfigError;
    if (dynamic_cast<const hkflow::ModelError*>(&e) || dynamic_cast<const hkflow::RangeError*>(&e))
        return kEquilibriumFailure;
    if (dynamic_cast<const hkflow::CounterexampleError*>(&e))
        return kPropertyFailure;
    return kSolverFailure;
}

namespace {

hkflow::EquilibriumResult equilibrium_for(const RunConfig& cfg, const hkflow::Grid& grid)
{
    return hkflow::normalize_equilibrium(make_model(cfg.model), grid, 1.0);
}

void write_density(const fs::path& path, const hkflow::Grid& grid, std::span<const double> u)
{
    CsvWriter w(path, {"x", "u"});
    for (std::size_t i = 0; i < u.size(); ++i)
        w.row({grid.center(i), u[i]});
}

void write_trajectory(const fs::path& dir, const hkflow::Grid& grid, const hkflow::Trajectory& traj)
{
    {
        CsvWriter w(dir / "trajectory.csv",
                    {"t", "entropy", "energy", "production", "mass", "fbar", "min_f", "max_f"});
        for (const auto& r : traj.diagnostics)
            w.row({r.t, r.entropy, r.energy, r.production, r.mass, r.fbar, r.min_f, r.max_f});
    }
    const fs::path snaps = dir / "snapshots";
    ensure_directory(snaps);
    CsvWriter index(snaps / "index.csv", {"index", "t", "file"});
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
        write_density(snaps / name, grid, traj.snapshots[k].values());
        index.row({static_cast<long long>(k), traj.times[k], std::string(name)});
    }
}

json residual_json(const hkflow::IdentityResidual& r)
{
    return {{"lhs", number(r.lhs)}, {"rhs", number(r.rhs)}, {"relative", number(r.relative)}};
}

} // namespace

int cmd_equilibrium(const RunConfig& cfg, const CommandOptions& opts)
{
    const hkflow::Grid grid = make_grid(cfg.domain);
    const hkflow::EquilibriumResult eq = equilibrium_for(cfg, grid);
    const fs::path dir = opts.out_dir;
    ensure_directory(dir);
    if (cfg.output.wants("csv")) {
        CsvWriter w(dir / "equilibrium.csv", {"x", "m", "f_at_m"});
        for (std::size_t i = 0; i < grid.n_cells(); ++i) {
            const double x = grid.center(i);
            w.row({x, eq.m[i], eq.model.f(x, eq.m[i])});
        }
    }
    const json summary = {{"command", "equilibrium"},
                          {"model", eq.model.description()},
                          {"c_star", number(eq.c_star)},
                          {"residual", number(eq.residual)},
                          {"mass", number(eq.m.mass())}};
    if (cfg.output.wants("json"))
        write_json(dir / "summary.json", summary);
    if (!opts.quiet)
        std::cout << "equilibrium: c_star=" << CsvWriter::format(eq.c_star)
                  << " residual=" << CsvWriter::format(eq.residual) << '\n';
    return kPass;
}

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts)
{
    if (!cfg.initial)
        throw ConfigError("$.initial", "simulate needs an initial density");
    const hkflow::Grid grid = make_grid(cfg.domain);
    hkflow::DensityField u0 = load_density(*cfg.initial, grid, "$.initial");
    if (hkflow::requires_unit_mass(cfg.flow.kind) && std::abs(u0.mass() - 1.0) > 1e-10)
        throw ConfigError("$.initial", "a " + std::string(hkflow::to_string(cfg.flow.kind)) +
                                           " flow needs unit mass; set \"mass\": 1 to rescale");
    if (cfg.flow.t_end < cfg.flow.snapshot_every)
        throw ConfigError("$.flow.snapshot_every", "must not exceed t_end");
    const hkflow::EquilibriumResult eq = equilibrium_for(cfg, grid);
    const hkflow::EntropyModel& model = eq.model;

    hkflow::SolverConfig sc;
    sc.t_end = cfg.flow.t_end;
    sc.dt_init = cfg.flow.dt_init;
    sc.snapshot_every = cfg.flow.snapshot_every;
    sc.cfl_safety = cfg.flow.cfl_safety;

    const fs::path dir = opts.out_dir;
    ensure_directory(dir);
    json summary = {{"command", "simulate"},
                    {"model", model.description()},
                    {"kind", std::string(hkflow::to_string(cfg.flow.kind))},
                    {"c_star", number(eq.c_star)}};

    hkflow::Trajectory traj;
    try {
        traj = hkflow::run(model, grid, u0, sc, cfg.flow.kind);
    } catch (const hkflow::StiffnessError& e) {
        write_trajectory(dir, grid, e.partial());
        write_density(dir / "last_state.csv", grid, e.last_state().values());
        summary["error"] = e.what();
        summary["completed"] = false;
        write_json(dir / "summary.json", summary);
        throw;
    }
    if (cfg.output.wants("csv"))
        write_trajectory(dir, grid, traj);

    summary["completed"] = true;
    summary["accepted_steps"] = traj.accepted_steps;
    summary["rejected_steps"] = traj.rejected_steps;
    summary["clipped_mass"] = number(traj.clipped_mass);
    double mass_dev = 0.0;
    for (const auto& r : traj.diagnostics)
        mass_dev = std::max(mass_dev, std::abs(r.mass - traj.diagnostics.front().mass));
    summary["max_mass_drift"] = number(mass_dev);
    try {
        const hkflow::DecayFit fit = hkflow::fit_decay_rate(traj, 0.5);
        summary["decay_fit"] = {{"gamma", number(fit.gamma)}, {"r_squared", number(fit.r_squared)},
                                {"points", fit.points}};
    } catch (const hkflow::UsageError& e) {
        summary["decay_fit"] = {{"skipped", e.what()}};
    }
    const double dt = hkflow::stable_dt(model, grid, u0.values(), cfg.flow.kind, sc.cfl_safety);
    summary["dissipation_residual"] = residual_json(hkflow::dissipation_residual(model, grid, u0, dt, cfg.flow.kind));
    if (model.traits().phi_finite)
        summary["energy_residual"] = residual_json(hkflow::energy_residual(model, grid, u0, dt, cfg.flow.kind));
    if (cfg.flow.kind == hkflow::FlowKind::Spherical) {
        const hkflow::MaxPrincipleReport mp = hkflow::check_max_principle(traj, model, grid);
        summary["max_principle"] = {{"pass", mp.pass},
                                    {"band_lo", number(mp.band_lo)},
                                    {"band_hi", number(mp.band_hi)},
                                    {"tolerance", number(mp.tolerance)},
                                    {"worst_violation", number(mp.worst_violation)},
                                    {"worst_time", number(mp.worst_time)}};
    }

    if (cfg.flow.mass_recovery) {
        const double M0 = cfg.flow.initial_mass;
        const hkflow::MassRecovery rec = hkflow::mass_recovery(model, grid, traj, M0);
        if (cfg.output.wants("csv")) {
            CsvWriter w(dir / "mass.csv", {"t", "M"});
            for (std::size_t k = 0; k < rec.times.size(); ++k)
                w.row({rec.times[k], rec.mass[k]});
        }
        // Direct population run from U0 = M0 u0 for comparison at t_end.
        const hkflow::DensityField U0 = u0.scaled(grid, M0);
        const hkflow::Trajectory direct = hkflow::run(model, grid, U0, sc, hkflow::FlowKind::Fitness);
        const auto& a = rec.populations.back().values();
        const auto& b = direct.snapshots.back().values();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            num += std::abs(a[i] - b[i]);
            den += std::abs(b[i]);
        }
        summary["mass_recovery"] = {{"M0", M0},
                                    {"M_end_recovered", number(rec.mass.back())},
                                    {"M_end_direct", number(direct.diagnostics.back().mass)},
                                    {"l1_relative_difference", number(num / den)}};
    }
    if (cfg.output.wants("json"))
        write_json(dir / "summary.json", summary);
    if (!opts.quiet)
        std::cout << "simulate: " << traj.accepted_steps << " steps, final entropy "
                  << CsvWriter::format(traj.diagnostics.back().entropy) << '\n';
    return kPass;
}

int cmd_distance(const RunConfig& cfg, const CommandOptions& opts)
{
    if (!cfg.rho0 || !cfg.rho1)
        throw ConfigError("$.endpoints", "distance needs endpoints rho0 and rho1");
    const hkflow::Grid grid = make_grid(cfg.domain);
    const hkflow::DensityField rho0 = load_density(*cfg.rho0, grid, "$.endpoints.rho0");
    const hkflow::DensityField rho1 = load_density(*cfg.rho1, grid, "$.endpoints.rho1");
    for (auto kind : cfg.transport.kinds) {
        if (kind == hkflow::TransportKind::HK)
            continue;
        if (std::abs(rho0.mass() - 1.0) > 1e-10 || std::abs(rho1.mass() - 1.0) > 1e-10)
            throw ConfigError("$.endpoints", std::string(hkflow::to_string(kind)) +
                                                 " needs unit-mass endpoints (masses " +
                                                 CsvWriter::format(rho0.mass()) + ", " +
                                                 CsvWriter::format(rho1.mass()) + ")");
    }

    hkflow::SolverOpts so;
    so.tol = cfg.transport.tol;
    so.max_iters = cfg.transport.max_iters;
    so.step_ratio = cfg.transport.step_ratio;
    so.keep_interpolation = cfg.transport.interpolation;
    so.seed = cfg.seed;

    const std::size_t nk = cfg.transport.kinds.size();
    std::vector<hkflow::TransportResult> results(nk);
    std::vector<bool> converged(nk, false);
    std::vector<std::string> messages(nk);
    parallel_for(nk, opts.jobs, [&](std::size_t k) {
        hkflow::TransportProblem p{grid, rho0, rho1, cfg.transport.kinds[k], cfg.transport.n_time, so};
        try {
            results[k] = hkflow::solve_dynamic(p);
            converged[k] = true;
        } catch (const hkflow::TransportNonConvergence& e) {
            results[k] = e.best();
            messages[k] = e.what();
        }
    });

    const fs::path dir = opts.out_dir;
    ensure_directory(dir);
    if (cfg.output.wants("csv")) {
        CsvWriter w(dir / "distance.csv", {"kind", "distance", "distance_sq", "residual", "iters", "converged"});
        for (std::size_t k = 0; k < nk; ++k)
            w.row({std::string(hkflow::to_string(cfg.transport.kinds[k])), results[k].distance,
                   results[k].distance_sq, results[k].residual, static_cast<long long>(results[k].iters),
                   std::string(converged[k] ? "true" : "false")});
        for (std::size_t k = 0; k < nk; ++k) {
            if (!results[k].interpolation)
                continue;
            const auto& st = *results[k].interpolation;
            CsvWriter w(dir / ("interpolation_" + std::string(hkflow::to_string(cfg.transport.kinds[k])) + ".csv"),
                        {"t", "x", "rho", "m", "zeta"});
            for (int s = 0; s < st.n_time; ++s)
                for (std::size_t i = 0; i < st.n_cells; ++i) {
                    const std::size_t c = static_cast<std::size_t>(s) * st.n_cells + i;
                    w.row({(s + 0.5) / st.n_time, grid.center(i), st.rho[c], st.momentum[c], st.source[c]});
                }
        }
    }

    json summary = {{"command", "distance"}, {"n_time", cfg.transport.n_time}, {"tol", cfg.transport.tol}};
    json rows = json::array();
    int code = kPass;
    std::map<hkflow::TransportKind, double> by_kind;
    for (std::size_t k = 0; k < nk; ++k) {
        json r = {{"kind", std::string(hkflow::to_string(cfg.transport.kinds[k]))},
                  {"distance", number(results[k].distance)},
                  {"distance_sq", number(results[k].distance_sq)},
                  {"residual", number(results[k].residual)},
                  {"iters", results[k].iters},
                  {"converged", static_cast<bool>(converged[k])}};
        if (!converged[k]) {
            r["error"] = messages[k];
            code = kTransportNonConvergence;
        } else {
            by_kind[cfg.transport.kinds[k]] = results[k].distance;
        }
        rows.push_back(r);
    }
    summary["results"] = rows;
    using hkflow::TransportKind;
    if (by_kind.size() == 3) {
        const double slack = 3.0 * std::sqrt(3.0 * cfg.transport.tol);
        const bool a = by_kind[TransportKind::HK] <= by_kind[TransportKind::HKS] + slack;
        const bool b = by_kind[TransportKind::HKS] <= by_kind[TransportKind::W2] + slack;
        summary["ordering"] = {{"slack", slack}, {"hk_le_hks", a}, {"hks_le_w2", b}};
        if (!(a && b) && code == kPass)
            code = kPropertyFailure;
    }
    if (cfg.output.wants("json"))
        write_json(dir / "summary.json", summary);
    if (!opts.quiet)
        for (std::size_t k = 0; k < nk; ++k)
            std::cout << hkflow::to_string(cfg.transport.kinds[k]) << ": d=" << CsvWriter::format(results[k].distance)
                      << (converged[k] ? "" : " (not converged)") << '\n';
    return code;
}

} // namespace hkcli
