#pragma once

#include "hkflow/grid.hpp"

#include <span>
#include <vector>

namespace hkflow {

/// Nonnegative cell-averaged density on a grid, with its midpoint-rule mass.
class DensityField {
public:
    DensityField() = default;
    // Throws DomainError on negative or non-finite entries, UsageError on a size mismatch.
    DensityField(const Grid& grid, std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    double mass() const noexcept { return mass_; }

    // Same shape, every value multiplied by factor >= 0.
    DensityField scaled(const Grid& grid, double factor) const;

private:
    std::vector<double> values_;
    double mass_ = 0.0;
};

} // namespace hkflow
