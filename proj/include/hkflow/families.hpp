#pragma once

#include "hkflow/density.hpp"
#include "hkflow/grid.hpp"

#include <cstdint>
#include <vector>

namespace hkflow {

// Amplitudes {step, 2 step, ..., count step}.
std::vector<double> amplitude_ladder(std::size_t count, double step);

// Members 1 + a cos(2 pi x / L), rescaled to unit mass.
std::vector<DensityField> cosine_family(const Grid& grid, const std::vector<double>& amplitudes);

// Unit-mass trigonometric polynomial with three random modes, bounded below by a
// positive floor. The same seed and index always give the same density.
DensityField random_trig_density(const Grid& grid, std::uint64_t seed, std::size_t index);

DensityField normalized(const Grid& grid, std::vector<double> values, double mass = 1.0);

} // namespace hkflow
