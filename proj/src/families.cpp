#include "hkflow/families.hpp"

#include "hkflow/error.hpp"
#include "hkflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hkflow {

std::vector<double> amplitude_ladder(std::size_t count, double step)
{
    std::vector<double> a(count);
    for (std::size_t k = 0; k < count; ++k)
        a[k] = step * static_cast<double>(k + 1);
    return a;
}

DensityField normalized(const Grid& grid, std::vector<double> values, double mass)
{
    const double total = integrate(grid, values);
    if (!(total > 0.0))
        throw UsageError("cannot normalize a density with zero mass");
    for (double& v : values)
        v *= mass / total;
    return DensityField(grid, std::move(values));
}

std::vector<DensityField> cosine_family(const Grid& grid, const std::vector<double>& amplitudes)
{
    std::vector<DensityField> out;
    out.reserve(amplitudes.size());
    const double w = 2.0 * std::numbers::pi / grid.length();
    for (double a : amplitudes) {
        if (!(std::abs(a) < 1.0))
            throw UsageError("cosine family amplitude must lie in (-1, 1)");
        out.push_back(normalized(grid, grid.sample([&](double x) { return 1.0 + a * std::cos(w * x); })));
    }
    return out;
}

DensityField random_trig_density(const Grid& grid, std::uint64_t seed, std::size_t index)
{
    // Independent stream per member: hash (seed, index) through one SplitMix step.
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    SplitMix64 rng(mix.next());
    constexpr int modes = 3;
    double amp[modes], phase[modes];
    for (int k = 0; k < modes; ++k) {
        amp[k] = rng.uniform(0.0, 0.6) / (k + 1);
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    const double w = 2.0 * std::numbers::pi / grid.length();
    std::vector<double> v = grid.sample([&](double x) {
        double s = 1.0;
        for (int k = 0; k < modes; ++k)
            s += amp[k] * std::cos(w * (k + 1) * x + phase[k]);
        return s;
    });
    const double lo = *std::min_element(v.begin(), v.end());
    constexpr double floor = 0.1;
    if (lo < floor)
        for (double& x : v)
            x += floor - lo;
    return normalized(grid, std::move(v));
}

} // namespace hkflow
