#include "doctest.h"
#include "support.hpp"

#include "hkflow/density.hpp"
#include "hkflow/error.hpp"
#include "hkflow/expression.hpp"
#include "hkflow/quadrature.hpp"

using namespace hkflow;

TEST_CASE("grid geometry")
{
    const Grid c(DomainKind::Circle, 8), i(DomainKind::Interval, 8, 2.0);
    CHECK(c.n_faces() == 8);
    CHECK(i.n_faces() == 9);
    CHECK(i.h() == doctest::Approx(0.25));
    CHECK(c.center(0) == doctest::Approx(1.0 / 16));
    CHECK(c.left_cell(0) == 7);
    CHECK(c.right_cell(0) == 0);
    CHECK(i.is_boundary_face(0));
    CHECK(i.is_boundary_face(8));
    CHECK_FALSE(c.is_boundary_face(0));
}

TEST_CASE("midpoint integration of a constant and of a cosine")
{
    const Grid g(DomainKind::Circle, 64);
    const std::vector<double> one(64, 3.0);
    CHECK(integrate(g, one) == doctest::Approx(3.0).epsilon(1e-15));
    const auto c = g.sample([](double x) { return std::cos(2 * testing::kPi * x); });
    CHECK(std::abs(integrate(g, c)) < 1e-15);
}

TEST_CASE("property: discrete divergence has zero integral and is minus the adjoint of the gradient")
{
    SplitMix64 rng(7);
    for (auto kind : {DomainKind::Circle, DomainKind::Interval}) {
        for (int trial = 0; trial < 50; ++trial) {
            const Grid g(kind, 5 + trial % 40);
            std::vector<double> F(g.n_faces()), phi(g.n_cells());
            for (std::size_t j = 0; j < F.size(); ++j)
                F[j] = g.is_boundary_face(j) ? 0.0 : rng.uniform(-1, 1);
            for (double& p : phi)
                p = rng.uniform(-1, 1);
            const auto div = divergence_cells(g, F);
            CHECK(std::abs(integrate(g, div)) < 1e-12);
            const auto grad = gradient_faces(g, phi);
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t i = 0; i < phi.size(); ++i)
                lhs += g.h() * phi[i] * div[i];
            for (std::size_t j = 0; j < F.size(); ++j)
                rhs -= g.h() * grad[j] * F[j];
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("density field validation")
{
    const Grid g(DomainKind::Circle, 4);
    CHECK_THROWS_AS(DensityField(g, {1, 2, 3}), UsageError);
    CHECK_THROWS_AS(DensityField(g, {1, -1, 3, 4}), DomainError);
    CHECK_THROWS_AS(DensityField(g, {1, NAN, 3, 4}), DomainError);
    const DensityField d(g, {1, 1, 2, 0});
    CHECK(d.mass() == doctest::Approx(1.0));
    CHECK(d.scaled(g, 3).mass() == doctest::Approx(3.0));
}

TEST_CASE("expressions evaluate with exact derivatives")
{
    const Expression e = Expression::parse("1 + 0.5*cos(2*pi*x) - exp(-x)/2");
    for (double x : {0.0, 0.1, 0.77}) {
        CHECK(e(x) == doctest::Approx(1 + 0.5 * std::cos(2 * testing::kPi * x) - std::exp(-x) / 2));
        CHECK(e.derivative(x) ==
              doctest::Approx(-testing::kPi * std::sin(2 * testing::kPi * x) + std::exp(-x) / 2));
    }
    CHECK(Expression::parse("-(x)*-2")(3.0) == doctest::Approx(6.0));
    CHECK_THROWS_AS(Expression::parse("1 + "), UsageError);
    CHECK_THROWS_AS(Expression::parse("tan(x)"), UsageError);
    CHECK_THROWS_AS(Expression::parse("(x"), UsageError);
}

TEST_CASE("adaptive quadrature")
{
    CHECK(adaptive_simpson([](double x) { return x * x; }, 0, 3) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0, testing::kPi) ==
          doctest::Approx(2.0).epsilon(1e-10));
    // Integrable endpoint singularity.
    const double v = integrate_from_zero([](double x) { return 1.0 / std::sqrt(x); }, 4.0);
    CHECK(v == doctest::Approx(4.0).epsilon(1e-9));
    const double l = integrate_from_zero([](double x) { return std::log(x); }, 1.0);
    CHECK(l == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("SplitMix64 reproduces the reference stream")
{
    SplitMix64 r(1234567);
    CHECK(r.next() == 6457827717110365317ULL);
    CHECK(r.next() == 3203168211198807973ULL);
    CHECK(r.next() == 9817491932198370423ULL);
    SplitMix64 u(42);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("random trigonometric densities are seeded, positive and of unit mass")
{
    const Grid g(DomainKind::Circle, 64);
    for (std::size_t i = 0; i < 30; ++i) {
        const auto a = random_trig_density(g, 99, i);
        const auto b = random_trig_density(g, 99, i);
        CHECK(a.mass() == doctest::Approx(1.0).epsilon(1e-14));
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k] == b[k]);
            CHECK(a[k] > 0.0);
        }
    }
    CHECK(random_trig_density(g, 99, 0)[3] != random_trig_density(g, 100, 0)[3]);
}
