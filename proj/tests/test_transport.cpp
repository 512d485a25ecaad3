#include "doctest.h"
#include "support.hpp"

#include "hkflow/diagnostics.hpp"
#include "hkflow/entropy_model.hpp"
#include "hkflow/error.hpp"
#include "hkflow/transport.hpp"

using namespace hkflow;

namespace {

// Independent prox oracle: minimize 1/2 (r - rho)^2 + 1/2 (t - s)^2 + gamma t^2 / r
// over r >= 0, t >= 0 by nested bisection on the partial derivatives. Returns (r, t).
std::pair<double, double> prox_oracle(double rho, double s, double gamma)
{
    auto inner = [&](double r) {
        // d/dt = (t - s) + 2 gamma t / r, increasing in t on [0, s].
        double lo = 0.0, hi = s;
        for (int k = 0; k < 200; ++k) {
            const double t = 0.5 * (lo + hi);
            ((t - s) + 2 * gamma * t / r > 0 ? hi : lo) = t;
        }
        return 0.5 * (lo + hi);
    };
    auto outer_derivative = [&](double r) {
        const double t = inner(r);
        return (r - rho) - gamma * t * t / (r * r);
    };
    if (-rho - s * s / (4 * gamma) >= 0.0)
        return {0.0, 0.0};
    double lo = 0.0, hi = std::max(rho, 0.0) + s + 1.0;
    while (outer_derivative(hi) < 0.0)
        hi *= 2.0;
    for (int k = 0; k < 200; ++k) {
        const double r = 0.5 * (lo + hi);
        (outer_derivative(r) > 0 ? hi : lo) = r;
    }
    const double r = 0.5 * (lo + hi);
    return {r, inner(r)};
}

// Coarse test grids converge slowly in the last digits; 1e-5 keeps distances well inside 1e-3.
SolverOpts coarse()
{
    SolverOpts o;
    o.tol = 1e-5;
    o.max_iters = 40000;
    return o;
}

TransportResult solve(const Grid& g, const DensityField& a, const DensityField& b, TransportKind k, int nt = 16)
{
    return solve_dynamic({g, a, b, k, nt, coarse()});
}

} // namespace

TEST_CASE("prox of the action matches a brute-force minimization at 1000 random nodes")
{
    SplitMix64 rng(2024);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double rho = rng.uniform(-2.0, 5.0);
        const double m = rng.uniform(-3.0, 3.0), z = rng.uniform(-3.0, 3.0);
        const double gamma = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
        const double s = std::hypot(m, z);
        const auto [r, t] = prox_oracle(rho, s, gamma);
        const ActionPoint p = prox_action(rho, m, z, gamma);
        const double scale = s > 0 ? t / s : 0.0;
        worst = std::max(worst, std::abs(p.rho - r));
        worst = std::max(worst, std::abs(p.m - scale * m));
        worst = std::max(worst, std::abs(p.zeta - scale * z));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("property: prox satisfies the cubic and its limits")
{
    SplitMix64 rng(9);
    for (int k = 0; k < 500; ++k) {
        const double rho = rng.uniform(-1, 3), s2 = rng.uniform(0, 4), g = rng.uniform(0.01, 3);
        const double r = action_prox_root(rho, s2, g);
        CHECK((r - rho) * (r + 2 * g) * (r + 2 * g) == doctest::Approx(g * s2).epsilon(1e-10).scale(1.0));
    }
    // No momentum: prox is the projection of rho onto [0, inf).
    CHECK(prox_action(0.7, 0, 0, 1.0).rho == doctest::Approx(0.7));
    CHECK(prox_action(-0.7, 0, 0, 1.0).rho == 0.0);
    // Vanishing gamma: identity.
    const auto p = prox_action(1.3, 0.4, -0.2, 1e-12);
    CHECK(p.rho == doctest::Approx(1.3));
    CHECK(p.m == doctest::Approx(0.4));
}

TEST_CASE("action density")
{
    CHECK(action_density(2.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(action_density(0.0, 0.0, 0.0) == 0.0);
    CHECK(std::isinf(action_density(0.0, 1.0, 0.0)));
}

TEST_CASE("identical endpoints are at distance zero for every kind")
{
    const Grid g(DomainKind::Circle, 16);
    const auto a = testing::cosine(g, 0.4);
    for (auto k : {TransportKind::W2, TransportKind::HK, TransportKind::HKS}) {
        const auto r = solve(g, a, a, k);
        CHECK(r.distance_sq <= 1e-6);
        CHECK(r.distance == doctest::Approx(std::sqrt(r.distance_sq)));
        CHECK(r.residual <= 1e-6);
    }
}

TEST_CASE("HK between uniform densities is pure reaction: 4 (sqrt b - sqrt a)^2")
{
    const Grid g(DomainKind::Circle, 8);
    for (auto [a, b] : {std::pair{1.0, 4.0}, std::pair{1.0, 2.0}, std::pair{3.0, 0.5}}) {
        const DensityField ra(g, std::vector<double>(8, a)), rb(g, std::vector<double>(8, b));
        const auto r = solve(g, ra, rb, TransportKind::HK, 32);
        const double ref = 4 * std::pow(std::sqrt(b) - std::sqrt(a), 2);
        CHECK(r.distance_sq == doctest::Approx(ref).epsilon(0.02));
    }
}

TEST_CASE("quantile oracle")
{
    const Grid g(DomainKind::Interval, 100);
    const auto left = normalized(g, g.sample([](double x) { return x < 0.5 ? 1.0 : 0.0; }));
    const auto right = normalized(g, g.sample([](double x) { return x >= 0.5 ? 1.0 : 0.0; }));
    CHECK(w2_quantile_oracle(g, left, right) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(w2_quantile_oracle(g, left, left) == doctest::Approx(0.0));
    const auto b1 = testing::bump(g, 0.3, 0.05, 0.0), b2 = testing::bump(g, 0.7, 0.05, 0.0);
    CHECK(w2_quantile_oracle(g, b1, b2) == doctest::Approx(0.16).epsilon(1e-3));
    CHECK_THROWS_AS(w2_quantile_oracle(g, left, left.scaled(g, 2.0)), UsageError);
    CHECK_THROWS_AS(w2_quantile_oracle(Grid(DomainKind::Circle, 100), left, right), UsageError);
}

TEST_CASE("W2 solver agrees with the quantile oracle")
{
    const Grid g(DomainKind::Interval, 48);
    const auto a = testing::bump(g, 0.35, 0.08), b = testing::bump(g, 0.65, 0.08);
    const auto r = solve(g, a, b, TransportKind::W2, 16);
    CHECK(r.distance_sq == doctest::Approx(w2_quantile_oracle(g, a, b)).epsilon(0.02));
}

TEST_CASE("property: symmetry, nonnegativity and ordering on random pairs")
{
    const Grid g(DomainKind::Circle, 24);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto a = random_trig_density(g, 5, 2 * i), b = random_trig_density(g, 5, 2 * i + 1);
        for (auto k : {TransportKind::W2, TransportKind::HK, TransportKind::HKS}) {
            const auto ab = solve(g, a, b, k), ba = solve(g, b, a, k);
            CHECK(ab.distance_sq >= 0.0);
            CHECK(ab.distance_sq == doctest::Approx(ba.distance_sq).epsilon(1e-3));
        }
        const auto rep = check_ordering(g, a, b, 16, coarse());
        CHECK(rep.pass());
        CHECK(rep.d_hks * rep.d_hks <= testing::kPi * testing::kPi);
        CHECK(rep.d_hk * rep.d_hk <= 8.0);
    }
}

TEST_CASE("distant narrow bumps: reaction undercuts transport")
{
    // Reaction costs 4 per unit mass here, so transport must exceed distance 2 to lose.
    const Grid g(DomainKind::Circle, 64, 8.0);
    const auto a = testing::bump(g, 2.0, 0.5, 3e-2), b = testing::bump(g, 6.0, 0.5, 3e-2);
    const auto rep = check_ordering(g, a, b, 16, coarse());
    CHECK(rep.pass());
    CHECK(rep.d_hk < 0.8 * rep.w2);
}

TEST_CASE("kind-specific mass rules")
{
    const Grid g(DomainKind::Circle, 8);
    const DensityField one(g, std::vector<double>(8, 1.0)), two(g, std::vector<double>(8, 2.0));
    CHECK_THROWS_AS(solve(g, one, two, TransportKind::W2), UsageError);
    CHECK_THROWS_AS(solve(g, one, two, TransportKind::HKS), UsageError);
    CHECK_NOTHROW(solve(g, one, two, TransportKind::HK));
}

TEST_CASE("non-convergence carries the best iterate")
{
    const Grid g(DomainKind::Circle, 16);
    SolverOpts o;
    o.max_iters = 20;
    try {
        solve_dynamic({g, testing::cosine(g, 0.5), testing::cosine(g, -0.5), TransportKind::W2, 16, o});
        FAIL("expected non-convergence");
    } catch (const TransportNonConvergence& e) {
        CHECK(e.best().iters == 20);
        CHECK_FALSE(e.best().converged);
        CHECK(e.best().residual > o.tol);
    }
}

TEST_CASE("Talagrand check: equilibrium skipped and bounds hold")
{
    const Grid g(DomainKind::Circle, 16);
    const auto model = normalize_equilibrium(make_power_law(1.0), g, 1.0).model;
    const DensityField m(g, std::vector<double>(16, 1.0));
    CHECK(talagrand_check(model, g, m, TransportKind::HKS, 16, coarse()).skipped);
    const auto u0 = random_trig_density(g, 1, 0);
    const auto r = talagrand_check(model, g, u0, TransportKind::HKS, 16, coarse());
    CHECK_FALSE(r.skipped);
    CHECK(r.lhs <= testing::kPi * testing::kPi);
    CHECK(r.ratio == doctest::Approx(r.lhs / r.rhs));
    CHECK(r.rhs == doctest::Approx(entropy_total(model, g, u0.values())));
    CHECK_THROWS_AS(talagrand_check(model, Grid(DomainKind::Interval, 16), DensityField(Grid(DomainKind::Interval, 16), std::vector<double>(16, 1.0)), TransportKind::HK), UsageError);
}
