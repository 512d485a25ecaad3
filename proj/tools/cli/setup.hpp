#pragma once

#include "config.hpp"

#include "hkflow/density.hpp"
#include "hkflow/entropy_model.hpp"
#include "hkflow/grid.hpp"

#include <cstddef>
#include <functional>

namespace hkcli {

hkflow::Grid make_grid(const DomainConfig& d);
hkflow::EntropyModel make_model(const ModelConfig& m);
hkflow::DensityField load_density(const DensitySpec& spec, const hkflow::Grid& grid,
                                  const std::string& path);

// Runs fn(0..n-1) on up to `jobs` threads. Results must be written to per-index
// slots; the first exception (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct CommandOptions {
    std::string out_dir;
    std::size_t jobs = 1;
    bool quiet = false;
};

} // namespace hkcli
