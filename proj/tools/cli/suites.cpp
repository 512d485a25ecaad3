#include "commands.hpp"
#include "io.hpp"

#include "hkflow/diagnostics.hpp"
#include "hkflow/families.hpp"
#include "hkflow/flow_solver.hpp"
#include "hkflow/rng.hpp"
#include "hkflow/transport.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace hkcli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    std::string name;
    std::string case_id;
    double value = 0.0;
    double bound = 0.0;
    bool pass = true;
    std::string detail;
    json replay = json::object();
};

class Suite {
public:
    Suite(std::string name, const fs::path& root) : name_(std::move(name)), dir_(root / name_)
    {
        ensure_directory(dir_);
    }

    void check(std::string name, std::string case_id, double value, double bound, bool pass,
               std::string detail = {}, json replay = json::object())
    {
        checks_.push_back({std::move(name), std::move(case_id), value, bound, pass, std::move(detail),
                           std::move(replay)});
    }

    const fs::path& dir() const { return dir_; }
    const std::string& name() const { return name_; }
    const std::vector<Check>& checks() const { return checks_; }
    bool passed() const
    {
        for (const auto& c : checks_)
            if (!c.pass)
                return false;
        return true;
    }

    void finish() const
    {
        CsvWriter w(dir_ / "checks.csv", {"check", "case", "value", "bound", "pass", "detail"});
        for (const auto& c : checks_)
            w.row({c.name, c.case_id, c.value, c.bound, std::string(c.pass ? "true" : "false"), c.detail});
    }

private:
    std::string name_;
    fs::path dir_;
    std::vector<Check> checks_;
};

struct NamedModel {
    std::string id;
    ModelConfig config;
};

std::vector<NamedModel> default_models()
{
    ModelConfig f1;
    f1.name = "power_law";
    f1.alpha = 1.0;
    ModelConfig f2;
    f2.name = "log";
    f2.potential = "cos(2*pi*x)";
    return {{"power_law_alpha1", f1}, {"log_cos", f2}};
}

hkflow::EntropyModel normalized_model(const ModelConfig& mc, const hkflow::Grid& grid)
{
    return hkflow::normalize_equilibrium(make_model(mc), grid, 1.0).model;
}

hkflow::DensityField cosine_initial(const hkflow::Grid& grid, double a)
{
    return hkflow::cosine_family(grid, {a}).front();
}

hkflow::Trajectory spherical_run(const hkflow::EntropyModel& model, const hkflow::Grid& grid)
{
    hkflow::SolverConfig sc;
    sc.t_end = 2.0;
    sc.snapshot_every = 0.01;
    return hkflow::run(model, grid, cosine_initial(grid, 0.5), sc, hkflow::FlowKind::Spherical);
}

json model_replay(const ModelConfig& m)
{
    RunConfig c;
    c.model = m;
    return to_json(c)["model"];
}

// ---------------------------------------------------------------------------

void suite_dissipation(const RunConfig& cfg, Suite& s)
{
    const std::size_t n = cfg.verify.dissipation_cells;
    for (const auto& nm : default_models()) {
        const hkflow::Grid coarse(hkflow::DomainKind::Circle, n), fine(hkflow::DomainKind::Circle, 2 * n);
        const hkflow::EntropyModel mc = normalized_model(nm.config, coarse);
        const hkflow::EntropyModel mf = normalized_model(nm.config, fine);
        const auto u_c = cosine_initial(coarse, 0.5);
        const auto u_f = cosine_initial(fine, 0.5);
        const double dt = hkflow::stable_dt(mc, coarse, u_c.values(), hkflow::FlowKind::Spherical, 0.45);
        const json replay = {{"model", model_replay(nm.config)}, {"n_cells", n}, {"dt", dt}};

        const auto d1 = hkflow::dissipation_residual(mc, coarse, u_c, dt, hkflow::FlowKind::Spherical);
        const auto d2 = hkflow::dissipation_residual(mf, fine, u_f, dt / 4.0, hkflow::FlowKind::Spherical);
        s.check("dissipation_identity", nm.id, d1.relative, 0.05, d1.relative <= 0.05, "", replay);
        s.check("dissipation_refinement", nm.id, d2.relative, d1.relative, d2.relative < d1.relative,
                "residual at 2n, dt/4", replay);
        const auto e1 = hkflow::energy_residual(mc, coarse, u_c, dt, hkflow::FlowKind::Spherical);
        const auto e2 = hkflow::energy_residual(mf, fine, u_f, dt / 4.0, hkflow::FlowKind::Spherical);
        s.check("energy_identity", nm.id, e1.relative, 0.05, e1.relative <= 0.05, "", replay);
        s.check("energy_refinement", nm.id, e2.relative, e1.relative, e2.relative < e1.relative,
                "residual at 2n, dt/4", replay);

        const hkflow::Grid rg(hkflow::DomainKind::Circle, cfg.verify.run_cells);
        const hkflow::EntropyModel rm = normalized_model(nm.config, rg);
        const hkflow::Trajectory traj = spherical_run(rm, rg);
        double mass_err = 0.0, worst_rise = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
            mass_err = std::max(mass_err, std::abs(traj.diagnostics[k].mass - 1.0));
            if (k > 0)
                worst_rise = std::max(worst_rise, traj.diagnostics[k].entropy - traj.diagnostics[k - 1].entropy);
        }
        const json rreplay = {{"model", model_replay(nm.config)}, {"n_cells", cfg.verify.run_cells}, {"t_end", 2.0}};
        s.check("mass_conservation", nm.id, mass_err, 1e-12, mass_err <= 1e-12, "", rreplay);
        s.check("entropy_monotone", nm.id, worst_rise, 1e-10, worst_rise <= 1e-10, "largest increase", rreplay);
        if (nm.config.name == "power_law") {
            const hkflow::DecayFit fit = hkflow::fit_decay_rate(traj, 0.5);
            s.check("decay_r_squared", nm.id, fit.r_squared, 0.99, fit.r_squared >= 0.99, "", rreplay);
            s.check("decay_rate_positive", nm.id, fit.gamma, 0.0, fit.gamma > 0.0, "", rreplay);
        }
    }
}

void suite_maxprinciple(const RunConfig& cfg, Suite& s)
{
    const hkflow::Grid grid(hkflow::DomainKind::Circle, cfg.verify.run_cells);
    CsvWriter w(s.dir() / "bands.csv", {"model", "band_lo", "band_hi", "tolerance", "worst_violation", "worst_time"});
    for (const auto& nm : default_models()) {
        const hkflow::EntropyModel model = normalized_model(nm.config, grid);
        const hkflow::Trajectory traj = spherical_run(model, grid);
        const hkflow::MaxPrincipleReport mp = hkflow::check_max_principle(traj, model, grid);
        w.row({nm.id, mp.band_lo, mp.band_hi, mp.tolerance, mp.worst_violation, mp.worst_time});
        s.check("f_band", nm.id, mp.worst_violation, mp.tolerance, mp.pass, "",
                {{"model", model_replay(nm.config)}, {"n_cells", cfg.verify.run_cells}});
    }
}

void write_ratios(const fs::path& path, const std::vector<double>& amps, const hkflow::InequalityReport& r)
{
    CsvWriter w(path, {"member", "amplitude", "ratio"});
    for (std::size_t k = 0; k < r.ratios.size(); ++k)
        w.row({static_cast<long long>(r.member[k]), amps[r.member[k]], r.ratios[k]});
}

void suite_eep(const RunConfig& cfg, Suite& s)
{
    const std::size_t base = cfg.verify.eep_members;
    const std::vector<double> a1 = hkflow::amplitude_ladder(base, 0.9 / static_cast<double>(base));
    const std::vector<double> a2 = hkflow::amplitude_ladder(2 * base, 0.45 / static_cast<double>(base));
    const hkflow::Grid grid(hkflow::DomainKind::Circle, cfg.verify.dissipation_cells);
    for (const auto& nm : default_models()) {
        const hkflow::EntropyModel model = normalized_model(nm.config, grid);
        const json replay = {{"model", model_replay(nm.config)}, {"members", base}};
        try {
            const auto f1 = hkflow::cosine_family(grid, a1);
            const auto f2 = hkflow::cosine_family(grid, a2);
            const auto r1 = hkflow::eep_ratio_sweep(model, grid, f1, hkflow::FlowKind::Spherical);
            const auto r2 = hkflow::eep_ratio_sweep(model, grid, f2, hkflow::FlowKind::Spherical);
            write_ratios(s.dir() / (nm.id + "_base.csv"), a1, r1);
            write_ratios(s.dir() / (nm.id + "_extended.csv"), a2, r2);
            bool finite = !r1.ratios.empty();
            for (double r : r1.ratios)
                finite = finite && std::isfinite(r);
            for (double r : r2.ratios)
                finite = finite && std::isfinite(r);
            s.check("ratios_finite", nm.id, r1.sup_ratio, 0.0, finite, "", replay);
            const double change = std::abs(r2.sup_ratio - r1.sup_ratio) / r1.sup_ratio;
            s.check("sup_stable", nm.id, change, 0.05, change < 0.05,
                    "sup " + CsvWriter::format(r1.sup_ratio) + " -> " + CsvWriter::format(r2.sup_ratio), replay);
        } catch (const hkflow::CounterexampleError& e) {
            s.check("no_counterexample", nm.id, 0.0, 0.0, false, e.what(), replay);
        }
    }
}

void suite_logsobolev(const RunConfig& cfg, Suite& s)
{
    ModelConfig heat;
    heat.name = "log";
    heat.potential = "0";
    const hkflow::Grid grid(hkflow::DomainKind::Circle, cfg.verify.dissipation_cells);
    const hkflow::EntropyModel model = normalized_model(heat, grid);
    const std::vector<double> amps =
        hkflow::amplitude_ladder(cfg.verify.eep_members, 0.9 / static_cast<double>(cfg.verify.eep_members));
    const json replay = {{"model", model_replay(heat)}, {"members", cfg.verify.eep_members}};
    try {
        const auto r = hkflow::eep_ratio_sweep(model, grid, hkflow::cosine_family(grid, amps),
                                               hkflow::FlowKind::Wasserstein);
        write_ratios(s.dir() / "ratios.csv", amps, r);
        double small = 0.0;
        for (std::size_t k = 0; k < r.ratios.size(); ++k)
            if (r.member[k] == 0)
                small = r.ratios[k];
        s.check("ratio_bounded_by_small_amplitude", "cosine", r.sup_ratio, 2.0 * small,
                small > 0.0 && r.sup_ratio <= 2.0 * small, "", replay);
        const double linear = 1.0 / (8.0 * kPi * kPi);
        s.check("small_amplitude_vs_linear", "cosine", small, linear, small <= 1.1 * linear,
                "ratio at the smallest amplitude against 1/(8 pi^2)", replay);
    } catch (const hkflow::CounterexampleError& e) {
        s.check("no_counterexample", "cosine", 0.0, 0.0, false, e.what(), replay);
    }

    // Heat flow decay rate on the circle.
    const hkflow::Grid rg(hkflow::DomainKind::Circle, cfg.verify.run_cells);
    const hkflow::EntropyModel rm = normalized_model(heat, rg);
    hkflow::SolverConfig sc;
    sc.t_end = 0.25;
    sc.snapshot_every = 0.005;
    const hkflow::Trajectory traj =
        hkflow::run(rm, rg, cosine_initial(rg, 0.1), sc, hkflow::FlowKind::Wasserstein);
    const hkflow::DecayFit fit = hkflow::fit_decay_rate(traj, 0.5);
    const double target = 8.0 * kPi * kPi;
    const double rel = std::abs(fit.gamma - target) / target;
    s.check("heat_decay_rate", "amplitude_0.1", fit.gamma, target, rel <= 0.1,
            "r^2 " + CsvWriter::format(fit.r_squared), {{"model", model_replay(heat)}, {"n_cells", cfg.verify.run_cells}});
}

hkflow::SolverOpts transport_opts(const RunConfig& cfg)
{
    hkflow::SolverOpts so;
    so.tol = cfg.transport.tol;
    so.max_iters = cfg.transport.max_iters;
    so.step_ratio = cfg.transport.step_ratio;
    so.seed = cfg.seed;
    return so;
}

void suite_talagrand(const RunConfig& cfg, const CommandOptions& opts, Suite& s)
{
    const hkflow::Grid grid(hkflow::DomainKind::Circle, cfg.verify.transport_cells);
    ModelConfig mc;
    mc.name = "power_law";
    mc.alpha = 1.0;
    const hkflow::EntropyModel model = normalized_model(mc, grid);
    const std::size_t n = cfg.verify.talagrand_members;
    const hkflow::SolverOpts so = transport_opts(cfg);

    struct Case {
        double mass = 1.0;
        hkflow::TalagrandResult hks, hk;
        std::string error;
        int code = 0;
    };
    std::vector<Case> cases(n);
    parallel_for(n, opts.jobs, [&](std::size_t i) {
        Case& c = cases[i];
        const hkflow::DensityField u0 = hkflow::random_trig_density(grid, cfg.seed, i);
        hkflow::SplitMix64 rng(cfg.seed + 0x9E3779B97F4A7C15ULL * (i + 1));
        c.mass = rng.uniform(0.5, 2.0);
        try {
            c.hks = hkflow::talagrand_check(model, grid, u0, hkflow::TransportKind::HKS, cfg.transport.n_time, so);
            c.hk = hkflow::talagrand_check(model, grid, u0.scaled(grid, c.mass), hkflow::TransportKind::HK,
                                           cfg.transport.n_time, so);
        } catch (const std::exception& e) {
            c.error = e.what();
            c.code = exit_code_for(e);
        }
        const fs::path cdir = s.dir() / ("case_" + std::to_string(i));
        ensure_directory(cdir);
        write_json(cdir / "result.json",
                   {{"index", i},
                    {"seed", cfg.seed},
                    {"hk_mass", c.mass},
                    {"hks", {{"lhs", number(c.hks.lhs)}, {"rhs", number(c.hks.rhs)}, {"ratio", number(c.hks.ratio)}}},
                    {"hk", {{"lhs", number(c.hk.lhs)}, {"rhs", number(c.hk.rhs)}, {"ratio", number(c.hk.ratio)}}},
                    {"error", c.error}});
    });

    CsvWriter w(s.dir() / "cases.csv", {"index", "hks_lhs", "entropy", "hks_ratio", "hk_mass", "hk_lhs",
                                        "hk_entropy", "hk_ratio"});
    double sup_hks = 0.0, sup_hk = 0.0, half_hks = 0.0, half_hk = 0.0;
    const double pi_bound = kPi * kPi;
    for (std::size_t i = 0; i < n; ++i) {
        const Case& c = cases[i];
        const std::string id = "member_" + std::to_string(i);
        const json replay = {{"seed", cfg.seed}, {"index", i}, {"n_cells", cfg.verify.transport_cells},
                             {"n_time", cfg.transport.n_time}};
        if (!c.error.empty()) {
            s.check("solve", id, 0.0, 0.0, false, c.error, replay);
            continue;
        }
        w.row({static_cast<long long>(i), c.hks.lhs, c.hks.rhs, c.hks.ratio, c.mass, c.hk.lhs, c.hk.rhs, c.hk.ratio});
        // Excess below 1% over pi^2 is reported but tolerated.
        const bool hks_ok = c.hks.lhs <= pi_bound * 1.01;
        s.check("hks_pi_squared_bound", id, c.hks.lhs, pi_bound, hks_ok,
                c.hks.lhs > pi_bound && hks_ok ? "marginal excess" : "", replay);
        const double mass_bound = 4.0 * (c.mass + 1.0);
        s.check("hk_mass_bound", id, c.hk.lhs, mass_bound, c.hk.lhs <= mass_bound * 1.01, "", replay);
        const bool finite = std::isfinite(c.hks.ratio) && std::isfinite(c.hk.ratio);
        s.check("ratio_finite", id, c.hks.ratio, 0.0, finite, "", replay);
        sup_hks = std::max(sup_hks, c.hks.ratio);
        sup_hk = std::max(sup_hk, c.hk.ratio);
        if (i < (n + 1) / 2) {
            half_hks = sup_hks;
            half_hk = sup_hk;
        }
    }
    // Stable sup: the full family may not more than double the sup of its first half.
    s.check("hks_sup_stable", "family", sup_hks, 2.0 * half_hks, sup_hks <= 2.0 * half_hks);
    s.check("hk_sup_stable", "family", sup_hk, 2.0 * half_hk, sup_hk <= 2.0 * half_hk);
}

hkflow::DensityField bump(const hkflow::Grid& g, double center, double width)
{
    return hkflow::normalized(g, g.sample([&](double x) {
        double d = x - center;
        if (g.periodic())
            d -= g.length() * std::round(d / g.length());
        return std::exp(-d * d / (2.0 * width * width)) + 1e-3;
    }));
}

void suite_ordering(const RunConfig& cfg, const CommandOptions& opts, Suite& s)
{
    const hkflow::Grid grid(hkflow::DomainKind::Circle, cfg.verify.transport_cells);
    const hkflow::SolverOpts so = transport_opts(cfg);
    const std::size_t n = cfg.verify.ordering_pairs;
    std::vector<hkflow::OrderingReport> reps(n);
    std::vector<std::string> errors(n);
    parallel_for(n, opts.jobs, [&](std::size_t i) {
        const auto a = hkflow::random_trig_density(grid, cfg.seed, 2 * i);
        const auto b = hkflow::random_trig_density(grid, cfg.seed, 2 * i + 1);
        try {
            reps[i] = hkflow::check_ordering(grid, a, b, cfg.transport.n_time, so);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
        const fs::path cdir = s.dir() / ("pair_" + std::to_string(i));
        ensure_directory(cdir);
        write_json(cdir / "result.json", {{"index", i},
                                          {"d_hk", number(reps[i].d_hk)},
                                          {"d_hks", number(reps[i].d_hks)},
                                          {"w2", number(reps[i].w2)},
                                          {"slack", number(reps[i].slack)},
                                          {"error", errors[i]}});
    });
    CsvWriter w(s.dir() / "pairs.csv", {"index", "d_hk", "d_hks", "w2", "slack"});
    for (std::size_t i = 0; i < n; ++i) {
        const std::string id = "pair_" + std::to_string(i);
        const json replay = {{"seed", cfg.seed}, {"indices", {2 * i, 2 * i + 1}},
                             {"n_cells", cfg.verify.transport_cells}, {"n_time", cfg.transport.n_time}};
        if (!errors[i].empty()) {
            s.check("solve", id, 0.0, 0.0, false, errors[i], replay);
            continue;
        }
        const auto& r = reps[i];
        w.row({static_cast<long long>(i), r.d_hk, r.d_hks, r.w2, r.slack});
        s.check("hk_le_hks", id, r.d_hk - r.d_hks, r.slack, r.hk_le_hks, "", replay);
        s.check("hks_le_w2", id, r.d_hks - r.w2, r.slack, r.hks_le_w2, "", replay);
        s.check("hks_pi_squared_bound", id, r.d_hks * r.d_hks, kPi * kPi, r.d_hks * r.d_hks <= kPi * kPi * 1.01, "", replay);
        s.check("hk_mass_bound", id, r.d_hk * r.d_hk, 8.0, r.d_hk * r.d_hk <= 8.0 * 1.01, "", replay);
    }

    // Benchmarks with independent references.
    const hkflow::Grid line(hkflow::DomainKind::Interval, 128);
    const std::pair<double, double> centers[] = {{0.3, 0.7}, {0.25, 0.55}};
    const double widths[] = {0.07, 0.05};
    CsvWriter bw(s.dir() / "benchmarks.csv", {"case", "computed", "reference", "relative_error"});
    for (int k = 0; k < 2; ++k) {
        const auto a = bump(line, centers[k].first, widths[k]);
        const auto b = bump(line, centers[k].second, widths[k]);
        const double ref = hkflow::w2_quantile_oracle(line, a, b);
        const auto r = hkflow::solve_dynamic({line, a, b, hkflow::TransportKind::W2, 32, so});
        const double rel = std::abs(r.distance_sq - ref) / ref;
        const std::string id = "w2_interval_" + std::to_string(k);
        bw.row({id, r.distance_sq, ref, rel});
        s.check("w2_quantile_oracle", id, rel, 0.02, rel <= 0.02);
    }
    const hkflow::Grid ring(hkflow::DomainKind::Circle, 32);
    const std::pair<double, double> levels[] = {{1.0, 4.0}, {1.0, 2.0}};
    for (const auto& [lo, hi] : levels) {
        const hkflow::DensityField a(ring, std::vector<double>(ring.n_cells(), lo));
        const hkflow::DensityField b(ring, std::vector<double>(ring.n_cells(), hi));
        const double ref = 4.0 * std::pow(std::sqrt(hi) - std::sqrt(lo), 2) * ring.length();
        const auto r = hkflow::solve_dynamic({ring, a, b, hkflow::TransportKind::HK, 32, so});
        const double rel = std::abs(r.distance_sq - ref) / ref;
        const std::string id = "hk_uniform_" + CsvWriter::format(lo) + "_" + CsvWriter::format(hi);
        bw.row({id, r.distance_sq, ref, rel});
        s.check("hk_pure_reaction", id, rel, 0.02, rel <= 0.02);
    }
}

// Pointwise ordering along paired runs that share one step schedule.
void paired(const hkflow::EntropyModel& model, const hkflow::Grid& grid, hkflow::FlowKind kind,
            hkflow::DensityField lo, hkflow::DensityField hi, double t_end, Suite& s, const std::string& id)
{
    const double dt = 0.5 * std::min(hkflow::stable_dt(model, grid, lo.values(), kind, 0.45),
                                     hkflow::stable_dt(model, grid, hi.values(), kind, 0.45));
    double worst = -std::numeric_limits<double>::infinity();
    for (double t = 0.0; t < t_end; t += dt) {
        lo = hkflow::step(model, grid, lo, dt, kind).u;
        hi = hkflow::step(model, grid, hi, dt, kind).u;
        for (std::size_t i = 0; i < lo.size(); ++i)
            worst = std::max(worst, lo[i] - hi[i]);
    }
    s.check("comparison_principle", id, worst, 1e-10, worst <= 1e-10, "max of u1 - u2 over the run",
            {{"kind", std::string(hkflow::to_string(kind))}, {"dt", dt}, {"t_end", t_end}});
}

void suite_comparison(const RunConfig& cfg, Suite& s)
{
    const hkflow::Grid grid(hkflow::DomainKind::Circle, cfg.verify.run_cells);
    ModelConfig f1;
    f1.name = "power_law";
    const hkflow::EntropyModel model = normalized_model(f1, grid);
    auto field = [&](double base, double amp, double shift) {
        return hkflow::DensityField(grid, grid.sample([&](double x) { return base + amp * std::cos(2.0 * kPi * (x - shift)); }));
    };
    paired(model, grid, hkflow::FlowKind::Wasserstein, field(0.8, 0.3, 0.0), field(1.2, 0.1, 0.0), 0.05, s,
           "wasserstein_power_law");
    paired(model, grid, hkflow::FlowKind::Conic, field(0.5, 0.3, 0.1), field(1.0, 0.2, 0.1), 0.5, s,
           "conic_power_law");

    // Population mass recovered from the normalized flow against a direct run.
    const double M0 = 2.0;
    const hkflow::DensityField u0 = cosine_initial(grid, 0.5);
    hkflow::SolverConfig sc;
    sc.t_end = 1.0;
    sc.snapshot_every = 0.01;
    const hkflow::Trajectory sph = hkflow::run(model, grid, u0, sc, hkflow::FlowKind::Spherical);
    const hkflow::MassRecovery rec = hkflow::mass_recovery(model, grid, sph, M0);
    const hkflow::Trajectory direct = hkflow::run(model, grid, u0.scaled(grid, M0), sc, hkflow::FlowKind::Fitness);
    double num = 0.0, den = 0.0;
    const auto& a = rec.populations.back();
    const auto& b = direct.snapshots.back();
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::abs(a[i] - b[i]);
        den += std::abs(b[i]);
    }
    CsvWriter w(s.dir() / "mass.csv", {"t", "M_recovered", "M_direct"});
    for (std::size_t k = 0; k < rec.times.size() && k < direct.diagnostics.size(); ++k)
        w.row({rec.times[k], rec.mass[k], direct.diagnostics[k].mass});
    s.check("mass_recovery_l1", "power_law_M0_2", num / den, 0.02, num / den <= 0.02);
}

} // namespace

int cmd_verify(const RunConfig& cfg, const CommandOptions& opts)
{
    const fs::path root = opts.out_dir;
    ensure_directory(root);
    const std::vector<std::string> all{"dissipation", "maxprinciple", "eep", "logsobolev",
                                       "comparison",  "ordering",     "talagrand"};
    std::vector<std::string> selected;
    if (cfg.verify.suite == "all")
        selected = all;
    else
        selected = {cfg.verify.suite};

    json verdict = {{"command", "verify"}, {"seed", cfg.seed}, {"suites", json::object()}};
    json failures = json::array();
    bool ok = true;
    for (const auto& name : selected) {
        Suite s(name, root);
        if (!opts.quiet)
            std::cout << "suite " << name << " ..." << std::flush;
        try {
            if (name == "dissipation")
                suite_dissipation(cfg, s);
            else if (name == "maxprinciple")
                suite_maxprinciple(cfg, s);
            else if (name == "eep")
                suite_eep(cfg, s);
            else if (name == "logsobolev")
                suite_logsobolev(cfg, s);
            else if (name == "comparison")
                suite_comparison(cfg, s);
            else if (name == "ordering")
                suite_ordering(cfg, opts, s);
            else if (name == "talagrand")
                suite_talagrand(cfg, opts, s);
        } catch (const std::exception& e) {
            s.check("suite_error", name, 0.0, 0.0, false, e.what());
        }
        s.finish();
        std::size_t failed = 0;
        for (const auto& c : s.checks())
            if (!c.pass) {
                ++failed;
                failures.push_back({{"suite", name}, {"check", c.name}, {"case", c.case_id},
                                    {"value", number(c.value)}, {"bound", number(c.bound)},
                                    {"detail", c.detail}, {"replay", c.replay}});
            }
        verdict["suites"][name] = {{"pass", failed == 0}, {"checks", s.checks().size()}, {"failed", failed}};
        ok = ok && failed == 0;
        if (!opts.quiet)
            std::cout << (failed == 0 ? " pass" : " FAIL") << " (" << s.checks().size() - failed << "/"
                      << s.checks().size() << ")\n";
    }
    verdict["pass"] = ok;
    write_json(root / "verdict.json", verdict);
    write_json(root / "failures.json", failures);
    return ok ? kPass : kPropertyFailure;
}

} // namespace hkcli
