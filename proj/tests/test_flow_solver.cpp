#include "doctest.h"
#include "support.hpp"

#include "hkflow/diagnostics.hpp"
#include "hkflow/flow_solver.hpp"

using namespace hkflow;

namespace {

EntropyModel log_cos(const Grid& g)
{
    return normalize_equilibrium(
               make_log_potential({[](double x) { return std::cos(2 * testing::kPi * x); },
                                   [](double x) { return -2 * testing::kPi * std::sin(2 * testing::kPi * x); }}),
               g, 1.0)
        .model;
}

} // namespace

TEST_CASE("flux of the alpha = 1 power law is the gradient of u^2/2")
{
    const Grid g(DomainKind::Circle, 32);
    SplitMix64 rng(5);
    const auto u = testing::random_positive(g, rng);
    std::vector<double> half_sq(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        half_sq[i] = 0.5 * u[i] * u[i];
    const auto F = flux_faces(make_power_law(1.0), g, u);
    const auto G = gradient_faces(g, half_sq);
    for (std::size_t j = 0; j < F.size(); ++j)
        CHECK(F[j] == doctest::Approx(G[j]).epsilon(1e-12));
}

TEST_CASE("zero density carries zero flux")
{
    const Grid g(DomainKind::Interval, 16);
    const std::vector<double> zero(16, 0.0);
    for (double F : flux_faces(make_power_law(2.0), g, zero))
        CHECK(F == 0.0);
    for (double F : flux_faces(log_cos(Grid(DomainKind::Circle, 16)), Grid(DomainKind::Circle, 16), zero))
        CHECK(F == 0.0);
}

TEST_CASE("conic homogeneous step: u = 2 with f = 1 - u")
{
    const Grid g(DomainKind::Circle, 16);
    const DensityField u(g, std::vector<double>(16, 2.0));
    const double dt = 1e-3;
    const auto r = step(make_power_law(1.0), g, u, dt, FlowKind::Conic);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(r.u[i] == doctest::Approx(2.0 - 2.0 * dt).epsilon(1e-15));
}

TEST_CASE("property: spherical steps conserve unit mass")
{
    SplitMix64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const Grid g(trial % 2 ? DomainKind::Circle : DomainKind::Interval, 16 + trial);
        const auto model = trial % 3 ? normalize_equilibrium(make_power_law(1.5), g, 1.0).model : log_cos(g);
        const auto u = normalized(g, testing::random_positive(g, rng));
        const double dt = stable_dt(model, g, u.values(), FlowKind::Spherical, 0.45);
        const auto r = step(model, g, u, dt, FlowKind::Spherical);
        CHECK(std::abs(r.u.mass() - 1.0) <= 1e-12);
    }
}

TEST_CASE("property: the equilibrium is a discrete steady state for every flow kind")
{
    for (auto kind : {FlowKind::Spherical, FlowKind::Conic, FlowKind::Wasserstein, FlowKind::Fitness}) {
        const Grid g(DomainKind::Circle, 64);
        for (const auto& model : {normalize_equilibrium(make_arctangential(), g, 1.0).model, log_cos(g)}) {
            const auto eq = normalize_equilibrium(model, g, 1.0);
            const double dt = stable_dt(eq.model, g, eq.m.values(), kind, 0.45);
            const auto r = step(eq.model, g, eq.m, dt, kind);
            for (std::size_t i = 0; i < g.n_cells(); ++i)
                CHECK(std::abs(r.u[i] - eq.m[i]) <= 1e-12);
        }
    }
}

TEST_CASE("spherical run: mass, monotone entropy and exponential decay")
{
    const Grid g(DomainKind::Circle, 64);
    const auto model = normalize_equilibrium(make_power_law(1.0), g, 1.0).model;
    SolverConfig sc;
    sc.t_end = 1.0;
    sc.snapshot_every = 0.01;
    const auto traj = run(model, g, testing::cosine(g, 0.5), sc, FlowKind::Spherical);
    REQUIRE(traj.diagnostics.size() == 101);
    for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
        CHECK(std::abs(traj.diagnostics[k].mass - 1.0) <= 1e-12);
        if (k > 0)
            CHECK(traj.diagnostics[k].entropy <= traj.diagnostics[k - 1].entropy + 1e-10);
    }
    const auto fit = fit_decay_rate(traj, 0.5);
    CHECK(fit.gamma > 0.0);
    CHECK(fit.r_squared >= 0.99);
    const auto mp = check_max_principle(traj, model, g);
    CHECK(mp.pass);
}

TEST_CASE("run from the equilibrium stays there")
{
    const Grid g(DomainKind::Circle, 32);
    const auto eq = normalize_equilibrium(log_cos(g), g, 1.0);
    SolverConfig sc;
    sc.t_end = 0.05;
    const auto traj = run(eq.model, g, eq.m, sc, FlowKind::Spherical);
    for (const auto& r : traj.diagnostics)
        CHECK(r.entropy <= 1e-6);
}

TEST_CASE("run rejects inputs that break the mass rule")
{
    const Grid g(DomainKind::Circle, 16);
    const DensityField u(g, std::vector<double>(16, 2.0));
    CHECK_THROWS_AS(run(make_power_law(1.0), g, u, {}, FlowKind::Spherical), UsageError);
    CHECK_NOTHROW(run(make_power_law(1.0), g, u, SolverConfig{.t_end = 0.01}, FlowKind::Conic));
}

TEST_CASE("comparison principle along paired conic runs")
{
    const Grid g(DomainKind::Circle, 32);
    const auto model = make_power_law(1.0);
    SplitMix64 rng(23);
    std::vector<double> lo = testing::random_positive(g, rng, 0.1, 0.8), hi(lo);
    for (double& v : hi)
        v += rng.uniform(0.0, 0.5);
    DensityField a(g, lo), b(g, hi);
    const double dt = 0.5 * std::min(stable_dt(model, g, a.values(), FlowKind::Conic, 0.45),
                                     stable_dt(model, g, b.values(), FlowKind::Conic, 0.45));
    for (int k = 0; k < 500; ++k) {
        a = step(model, g, a, dt, FlowKind::Conic).u;
        b = step(model, g, b, dt, FlowKind::Conic).u;
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] <= b[i] + 1e-12);
    }
}

TEST_CASE("mass recovery")
{
    const Grid g(DomainKind::Circle, 64);
    const auto model = normalize_equilibrium(make_power_law(1.0), g, 1.0).model;
    SolverConfig sc;
    sc.t_end = 0.5;
    SUBCASE("equilibrium keeps its mass")
    {
        const DensityField one(g, std::vector<double>(64, 1.0));
        const auto traj = run(model, g, one, sc, FlowKind::Spherical);
        const auto rec = mass_recovery(model, g, traj, 3.0);
        for (double M : rec.mass)
            CHECK(M == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("recovered population matches a direct run")
    {
        const auto u0 = testing::cosine(g, 0.5);
        const auto traj = run(model, g, u0, sc, FlowKind::Spherical);
        const auto rec = mass_recovery(model, g, traj, 2.0);
        const auto direct = run(model, g, u0.scaled(g, 2.0), sc, FlowKind::Fitness);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < 64; ++i) {
            num += std::abs(rec.populations.back()[i] - direct.snapshots.back()[i]);
            den += direct.snapshots.back()[i];
        }
        CHECK(num / den <= 0.02);
    }
    CHECK_THROWS_AS(mass_recovery(model, g, Trajectory{}, -1.0), UsageError);
}

TEST_CASE("vacuum data keeps positivity and conservation")
{
    const Grid g(DomainKind::Interval, 64);
    const auto model = normalize_equilibrium(make_power_law(2.0), g, 1.0).model;
    const auto u0 = normalized(g, g.sample([](double x) { return x > 0.3 && x < 0.6 ? 1.0 : 0.0; }));
    SolverConfig sc;
    sc.t_end = 0.05;
    const auto traj = run(model, g, u0, sc, FlowKind::Spherical);
    for (const auto& s : traj.snapshots) {
        CHECK(std::abs(s.mass() - 1.0) <= 1e-12);
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(s[i] >= 0.0);
    }
}
