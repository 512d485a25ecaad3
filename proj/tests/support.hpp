#pragma once

#include "hkflow/density.hpp"
#include "hkflow/families.hpp"
#include "hkflow/grid.hpp"
#include "hkflow/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> random_positive(const hkflow::Grid& g, hkflow::SplitMix64& rng, double lo = 0.2,
                                           double hi = 2.0)
{
    std::vector<double> v(g.n_cells());
    for (double& x : v)
        x = rng.uniform(lo, hi);
    return v;
}

inline hkflow::DensityField cosine(const hkflow::Grid& g, double a)
{
    return hkflow::cosine_family(g, {a}).front();
}

inline hkflow::DensityField bump(const hkflow::Grid& g, double c, double w, double floor = 1e-3)
{
    return hkflow::normalized(g, g.sample([&](double x) {
        double d = x - c;
        if (g.periodic())
            d -= g.length() * std::round(d / g.length());
        return std::exp(-d * d / (2 * w * w)) + floor;
    }));
}

} // namespace testing
