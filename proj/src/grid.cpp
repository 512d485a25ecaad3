#include "hkflow/grid.hpp"

#include "hkflow/error.hpp"

#include <numeric>
#include <string>

namespace hkflow {

namespace {

void require_length(std::span<const double> v, std::size_t expected, const char* what)
{
    if (v.size() != expected)
        throw UsageError(std::string(what) + ": expected " + std::to_string(expected) +
                         " values, got " + std::to_string(v.size()));
}

} // namespace

Grid::Grid(DomainKind kind, std::size_t n_cells, double length)
    : kind_(kind), n_(n_cells), length_(length), h_(0.0)
{
    if (n_cells < 2)
        throw UsageError("grid needs at least 2 cells");
    if (!(length > 0.0))
        throw UsageError("grid length must be positive");
    h_ = length / static_cast<double>(n_cells);
}

std::vector<double> Grid::cell_centers() const
{
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        out[i] = center(i);
    return out;
}

std::vector<double> Grid::face_positions() const
{
    std::vector<double> out(n_faces());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = face(j);
    return out;
}

double integrate(const Grid& grid, std::span<const double> field)
{
    require_length(field, grid.n_cells(), "integrate");
    return grid.h() * std::accumulate(field.begin(), field.end(), 0.0);
}

std::vector<double> gradient_faces(const Grid& grid, std::span<const double> field)
{
    require_length(field, grid.n_cells(), "gradient_faces");
    std::vector<double> out(grid.n_faces(), 0.0);
    const double inv_h = 1.0 / grid.h();
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (grid.is_boundary_face(j))
            continue;
        out[j] = (field[grid.right_cell(j)] - field[grid.left_cell(j)]) * inv_h;
    }
    return out;
}

std::vector<double> divergence_cells(const Grid& grid, std::span<const double> flux)
{
    require_length(flux, grid.n_faces(), "divergence_cells");
    const std::size_t n = grid.n_cells();
    std::vector<double> out(n);
    const double inv_h = 1.0 / grid.h();
    for (std::size_t i = 0; i < n; ++i) {
        const double right = (grid.periodic() && i + 1 == n) ? flux[0] : flux[i + 1];
        out[i] = (right - flux[i]) * inv_h;
    }
    return out;
}

} // namespace hkflow
