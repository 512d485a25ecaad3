#include "doctest.h"
#include "support.hpp"

#include "hkflow/entropy_model.hpp"
#include "hkflow/error.hpp"

#include <functional>

using namespace hkflow;

namespace {

EntropyModel log_cos()
{
    return make_log_potential({[](double x) { return std::cos(2 * testing::kPi * x); },
                               [](double x) { return -2 * testing::kPi * std::sin(2 * testing::kPi * x); }},
                              "cos(2 pi x)");
}

// Reference primitives written out by hand for the three built-in models.
double arctan_G(double u)
{
    return u * std::log(u) - 0.5 * u * std::log(1 + u * u) - std::atan(u) + 0.5 * std::log(2.0) * u;
}

} // namespace

TEST_CASE("equilibrium normalization on the unit circle")
{
    const Grid g(DomainKind::Circle, 256);
    SUBCASE("power law alpha = 1 gives m = 1 exactly")
    {
        const auto eq = normalize_equilibrium(make_power_law(1.0), g, 1.0);
        for (std::size_t i = 0; i < g.n_cells(); ++i)
            CHECK(eq.m[i] == 1.0);
        CHECK(eq.c_star == 0.0);
    }
    SUBCASE("log model with V = cos: c* = log I0(1) and m = exp(-V)/Z")
    {
        const auto eq = normalize_equilibrium(log_cos(), g, 1.0);
        CHECK(eq.c_star == doctest::Approx(0.23591435850717854).epsilon(1e-12));
        double Z = 0.0;
        for (std::size_t i = 0; i < g.n_cells(); ++i)
            Z += g.h() * std::exp(-std::cos(2 * testing::kPi * g.center(i)));
        for (std::size_t i = 0; i < g.n_cells(); ++i)
            CHECK(std::abs(eq.m[i] - std::exp(-std::cos(2 * testing::kPi * g.center(i))) / Z) < 1e-12);
    }
    for (const auto& model : {make_power_law(1.0), make_power_law(0.5), make_power_law(-2.0), log_cos(),
                              make_arctangential()}) {
        const auto eq = normalize_equilibrium(model, g, 1.0);
        CHECK(std::abs(eq.m.mass() - 1.0) <= 1e-10);
        CHECK(eq.residual <= 1e-10);
        for (std::size_t i = 0; i < g.n_cells(); ++i)
            CHECK(std::abs(eq.model.f(g.center(i), eq.m[i])) <= 1e-10);
    }
}

TEST_CASE("invalid models are rejected")
{
    CHECK_THROWS_AS(make_power_law(0.0), UsageError);
    CHECK_THROWS_AS(make_power_law(NAN), UsageError);
    const Grid g(DomainKind::Circle, 16);
    CHECK_THROWS_AS(normalize_equilibrium(make_power_law(1.0), g, -1.0), UsageError);
}

TEST_CASE("closed forms agree with quadrature on u in [0.05, 20] at 32 nodes")
{
    const Grid g(DomainKind::Circle, 32);
    const std::vector<EntropyModel> models{
        normalize_equilibrium(make_power_law(1.0), g, 1.0).model,
        normalize_equilibrium(make_power_law(2.5), g, 1.0).model,
        normalize_equilibrium(log_cos(), g, 1.0).model,
        normalize_equilibrium(make_arctangential(), g, 1.0).model,
    };
    for (const auto& model : models) {
        const EntropyModel quad = model.without_closed_forms();
        double worst = 0.0;
        for (std::size_t i = 0; i < g.n_cells(); ++i) {
            const double x = g.center(i);
            for (int k = 0; k <= 40; ++k) {
                const double u = 0.05 * std::pow(400.0, k / 40.0);
                worst = std::max(worst, std::abs(entropy_density(model, x, u) - entropy_density(quad, x, u)));
                worst = std::max(worst, std::abs(phi(model, x, u) - phi(quad, x, u)));
                worst = std::max(worst, std::abs(psi(model, x, u) - psi(quad, x, u)));
            }
        }
        INFO(model.description());
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("closed forms match hand-written primitives")
{
    const double x = 0.3;
    SUBCASE("power law alpha = 1")
    {
        const auto m = make_power_law(1.0);
        for (double u : {0.1, 1.0, 3.0}) {
            CHECK(entropy_density(m, x, u) == doctest::Approx((u - 1) * (u - 1) / 2));
            CHECK(phi(m, x, u) == doctest::Approx(u * u / 2));
            CHECK(psi(m, x, u) == doctest::Approx(u * u * u / 6));
        }
    }
    SUBCASE("log model")
    {
        const auto eq = normalize_equilibrium(log_cos(), Grid(DomainKind::Circle, 64), 1.0);
        const double mx = eq.model.equilibrium_value(x);
        for (double u : {0.1, 1.0, 3.0}) {
            CHECK(entropy_density(eq.model, x, u) == doctest::Approx(u * std::log(u / mx) - u + mx).epsilon(1e-12));
            CHECK(phi(eq.model, x, u) == doctest::Approx(u));
            CHECK(psi(eq.model, x, u) == doctest::Approx(u * u / 2));
        }
    }
    SUBCASE("arctangential")
    {
        const auto m = make_arctangential();
        for (double u : {0.1, 1.0, 3.0}) {
            CHECK(entropy_density(m, x, u) == doctest::Approx(arctan_G(u) - arctan_G(1.0)).epsilon(1e-12));
            CHECK(phi(m, x, u) == doctest::Approx(std::atan(u)));
            CHECK(psi(m, x, u) == doctest::Approx(u * std::atan(u) - 0.5 * std::log(1 + u * u)));
        }
    }
}

TEST_CASE("property: entropy density is nonnegative, convex and zero at equilibrium")
{
    const Grid g(DomainKind::Circle, 16);
    SplitMix64 rng(11);
    for (const auto& base : {make_power_law(1.0), make_power_law(0.3), make_power_law(-0.5), log_cos(),
                             make_arctangential()}) {
        const auto model = normalize_equilibrium(base, g, 1.0).model;
        for (int trial = 0; trial < 200; ++trial) {
            const double x = rng.uniform();
            const double mx = model.equilibrium_value(x);
            CHECK(std::abs(entropy_density(model, x, mx)) < 1e-12);
            const double u = rng.uniform(0.01, 10.0);
            const double e = entropy_density(model, x, u);
            CHECK(e >= -1e-14);
            // Convexity along a random chord.
            const double v = rng.uniform(0.01, 10.0), t = rng.uniform();
            CHECK(entropy_density(model, x, t * u + (1 - t) * v) <= t * e + (1 - t) * entropy_density(model, x, v) + 1e-12);
        }
    }
}

TEST_CASE("fast-diffusion power laws with alpha <= -1 have infinite Phi")
{
    const auto m = make_power_law(-1.0);
    CHECK_FALSE(m.traits().phi_finite);
    CHECK_THROWS_AS(phi(m, 0.2, 1.0), DomainError);
    CHECK_THROWS_AS(entropy_density(m, 0.2, 0.0), DomainError);
    // The flux potential is still finite: log u for alpha = -1.
    CHECK(m.flux_potential(0.2, 2.0) - m.flux_potential(0.2, 1.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("implicit levels and range errors")
{
    const Grid g(DomainKind::Circle, 8);
    const auto m = make_power_law(1.0); // f = 1 - u takes values in (-inf, 1)
    CHECK(level_value(m, 0.1, 0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(level_value(m, 0.1, 1.5), RangeError);
    const auto lvl = implicit_level(m, g, -1.0);
    for (std::size_t i = 0; i < g.n_cells(); ++i)
        CHECK(lvl[i] == doctest::Approx(2.0));
    try {
        implicit_level(m, g, 2.0);
        FAIL("expected a range error");
    } catch (const RangeError& e) {
        CHECK(e.node() == 0);
    }
}

TEST_CASE("property: level values invert f")
{
    SplitMix64 rng(3);
    const auto model = normalize_equilibrium(log_cos(), Grid(DomainKind::Circle, 32), 1.0).model;
    for (int k = 0; k < 300; ++k) {
        const double x = rng.uniform(), c = rng.uniform(-3, 3);
        const double u = level_value(model, x, c);
        CHECK(model.f(x, u) == doctest::Approx(c).epsilon(1e-12));
    }
}
