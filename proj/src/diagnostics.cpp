#include "hkflow/diagnostics.hpp"

#include "hkflow/error.hpp"
#include "hkflow/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hkflow {

namespace {

void require_size(const Grid& grid, std::span<const double> u, const char* what)
{
    if (u.size() != grid.n_cells())
        throw UsageError(std::string(what) + ": density size does not match the grid");
}

} // namespace

double entropy_total(const EntropyModel& model, const Grid& grid, std::span<const double> u)
{
    require_size(grid, u, "entropy_total");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        sum += entropy_density(model, grid.center(i), u[i]);
    return grid.h() * sum;
}

double energy_total(const EntropyModel& model, const Grid& grid, std::span<const double> u)
{
    require_size(grid, u, "energy_total");
    if (!model.traits().phi_finite)
        return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        sum += psi(model, grid.center(i), u[i]);
    return grid.h() * sum;
}

double mean_fitness(const EntropyModel& model, const Grid& grid, std::span<const double> u)
{
    require_size(grid, u, "mean_fitness");
    double uf = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uf += model.u_times_f(grid.center(i), u[i]);
        mass += u[i];
    }
    if (!(mass > 0.0))
        throw UsageError("mean_fitness: zero mass");
    return uf / mass;
}

double fitness_spread(const EntropyModel& model, const Grid& grid, std::span<const double> u, double a)
{
    require_size(grid, u, "fitness_spread");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] <= 0.0)
            continue;
        const double d = model.f(grid.center(i), u[i]) - a;
        sum += u[i] * d * d;
    }
    return grid.h() * sum;
}

double gradient_production(const EntropyModel& model, const Grid& grid, std::span<const double> u)
{
    const std::vector<double> flux = flux_faces(model, grid, u);
    double sum = 0.0;
    for (std::size_t j = 0; j < flux.size(); ++j) {
        if (flux[j] == 0.0 || grid.is_boundary_face(j))
            continue;
        const double uf = face_density(model, grid.face(j), u[grid.left_cell(j)], u[grid.right_cell(j)]);
        if (uf > 0.0)
            sum += flux[j] * flux[j] / uf;
    }
    return grid.h() * sum;
}

double entropy_production(const EntropyModel& model, const Grid& grid, std::span<const double> u,
                          FlowKind kind)
{
    require_size(grid, u, "entropy_production");
    if (kind == FlowKind::Fitness) {
        const double mass = integrate(grid, u);
        std::vector<double> profile(u.begin(), u.end());
        for (double& v : profile)
            v /= mass;
        return entropy_production(model, grid, profile, FlowKind::Spherical);
    }
    double total = gradient_production(model, grid, u);
    if (kind == FlowKind::Spherical)
        total += fitness_spread(model, grid, u, mean_fitness(model, grid, u));
    else if (kind == FlowKind::Conic)
        total += fitness_spread(model, grid, u, 0.0);
    return total;
}

DiagnosticRecord make_record(const EntropyModel& model, const Grid& grid, std::span<const double> u,
                             FlowKind kind, double t)
{
    std::vector<double> profile(u.begin(), u.end());
    const double mass = integrate(grid, u);
    if (kind == FlowKind::Fitness)
        for (double& v : profile)
            v /= mass;

    DiagnosticRecord r;
    r.t = t;
    r.entropy = entropy_total(model, grid, profile);
    r.energy = energy_total(model, grid, profile);
    r.production = entropy_production(model, grid, profile,
                                      kind == FlowKind::Fitness ? FlowKind::Spherical : kind);
    r.fbar = mean_fitness(model, grid, profile);
    r.mass = mass;
    r.min_f = std::numeric_limits<double>::infinity();
    r.max_f = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double f = model.f(grid.center(i), profile[i]);
        r.min_f = std::min(r.min_f, f);
        r.max_f = std::max(r.max_f, f);
    }
    return r;
}

DecayFit fit_decay_rate(const Trajectory& traj, double tail_fraction)
{
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw UsageError("fit_decay_rate: tail_fraction must lie in (0, 1]");
    std::vector<std::size_t> usable;
    for (std::size_t k = 0; k < traj.diagnostics.size(); ++k)
        if (traj.diagnostics[k].entropy > 1e-14)
            usable.push_back(k);
    const auto take = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(usable.size())));
    if (take < 10)
        throw UsageError("fit_decay_rate: fewer than 10 snapshots with entropy above 1e-14");

    const std::size_t first = usable.size() - take;
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (std::size_t k = first; k < usable.size(); ++k) {
        const double t = traj.diagnostics[usable[k]].t;
        const double y = std::log(traj.diagnostics[usable[k]].entropy);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    const double n = static_cast<double>(take);
    const double ctt = stt - st * st / n, cty = sty - st * sy / n, cyy = syy - sy * sy / n;
    if (!(ctt > 0.0))
        throw UsageError("fit_decay_rate: snapshot times are degenerate");
    DecayFit fit;
    fit.gamma = -cty / ctt;
    fit.r_squared = cyy > 0.0 ? (cty * cty) / (ctt * cyy) : 1.0;
    fit.points = take;
    return fit;
}

InequalityReport eep_ratio_sweep(const EntropyModel& model, const Grid& grid,
                                 std::span<const DensityField> family, FlowKind kind)
{
    InequalityReport report;
    for (std::size_t k = 0; k < family.size(); ++k) {
        const DensityField& u = family[k];
        if (requires_unit_mass(kind) && std::abs(u.mass() - 1.0) > 1e-10)
            throw UsageError("eep_ratio_sweep: member " + std::to_string(k) + " is not a probability density");
        const double e = entropy_total(model, grid, u.values());
        const double d = entropy_production(model, grid, u.values(), kind);
        if (d < 1e-14) {
            if (e > 1e-10) {
                std::ostringstream os;
                os << "member " << k << " has production " << d << " but entropy " << e;
                throw CounterexampleError(os.str());
            }
            ++report.skipped;
            continue;
        }
        if (e < 1e-14) {
            ++report.skipped;
            continue;
        }
        const double ratio = e / d;
        report.ratios.push_back(ratio);
        report.member.push_back(k);
        if (report.ratios.size() == 1 || ratio > report.sup_ratio) {
            report.sup_ratio = ratio;
            report.argmax_case = k;
        }
    }
    std::ostringstream notes;
    notes << "equilibrium skip threshold 1e-14; " << report.skipped << " member(s) skipped";
    report.tolerance_notes = notes.str();
    return report;
}

MaxPrincipleReport check_max_principle(const Trajectory& traj, const EntropyModel& model,
                                       const Grid& grid)
{
    MaxPrincipleReport rep;
    if (traj.snapshots.empty())
        return rep;
    const DensityField& u0 = traj.snapshots.front();
    rep.band_lo = std::numeric_limits<double>::infinity();
    rep.band_hi = -std::numeric_limits<double>::infinity();
    double lip = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        const double x = grid.center(i);
        const double f = model.f(x, u0[i]);
        rep.band_lo = std::min(rep.band_lo, f);
        rep.band_hi = std::max(rep.band_hi, f);
        if (u0[i] > 0.0)
            lip = std::max(lip, std::abs(model.f_u(x, u0[i])));
    }
    rep.tolerance = 10.0 * grid.h() * grid.h() * lip;
    for (const DiagnosticRecord& r : traj.diagnostics) {
        const double excess = std::max(rep.band_lo - r.min_f, r.max_f - rep.band_hi);
        if (excess > rep.worst_violation) {
            rep.worst_violation = excess;
            rep.worst_time = r.t;
        }
    }
    rep.pass = rep.worst_violation <= rep.tolerance;
    return rep;
}

IdentityResidual dissipation_residual(const EntropyModel& model, const Grid& grid,
                                      const DensityField& u, double dt, FlowKind kind)
{
    const StepResult next = step(model, grid, u, dt, kind);
    IdentityResidual r;
    r.lhs = (entropy_total(model, grid, next.u.values()) - entropy_total(model, grid, u.values())) / dt;
    r.rhs = -entropy_production(model, grid, u.values(), kind);
    r.relative = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-8);
    return r;
}

IdentityResidual energy_residual(const EntropyModel& model, const Grid& grid, const DensityField& u,
                                 double dt, FlowKind kind)
{
    const StepResult next = step(model, grid, u, dt, kind);
    IdentityResidual r;
    r.lhs = (energy_total(model, grid, next.u.values()) - energy_total(model, grid, u.values())) / dt;

    // -F . grad Phi = -|grad Phi|^2 + (Phi_x + u f_x) . grad Phi on every face.
    const std::size_t n = grid.n_cells();
    std::vector<double> phis(n);
    for (std::size_t i = 0; i < n; ++i)
        phis[i] = phi(model, grid.center(i), u[i]);
    const std::vector<double> flux = flux_faces(model, grid, u.values());
    const std::vector<double> grad_phi = gradient_faces(grid, phis);
    double transport = 0.0;
    for (std::size_t j = 0; j < flux.size(); ++j)
        transport -= flux[j] * grad_phi[j];
    const std::vector<double> reaction = reaction_cells(model, grid, u.values(), kind);
    double react = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        react += reaction[i] * phis[i];
    r.rhs = grid.h() * (transport + react);
    r.relative = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), 1e-8);
    return r;
}

} // namespace hkflow
