#include "hkflow/density.hpp"

#include "hkflow/error.hpp"

#include <cmath>
#include <string>

namespace hkflow {

DensityField::DensityField(const Grid& grid, std::vector<double> values)
    : values_(std::move(values))
{
    if (values_.size() != grid.n_cells())
        throw UsageError("density has " + std::to_string(values_.size()) + " values for a grid of " +
                         std::to_string(grid.n_cells()) + " cells");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0)
            throw DomainError("density value at cell " + std::to_string(i) +
                              " is negative or not finite");
    }
    mass_ = integrate(grid, values_);
}

DensityField DensityField::scaled(const Grid& grid, double factor) const
{
    std::vector<double> v = values_;
    for (double& x : v)
        x *= factor;
    return DensityField(grid, std::move(v));
}

} // namespace hkflow
