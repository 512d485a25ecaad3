#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hkflow {

enum class DomainKind { Circle, Interval };

/// Uniform 1D grid on [0, length). Cell i has center (i + 1/2) h. Face j sits at
/// x = j h, between cell j-1 and cell j; on the circle cell -1 is cell n-1 and
/// there are n faces, on the interval there are n+1 faces and the two boundary
/// faces carry zero flux.
class Grid {
public:
    Grid(DomainKind kind, std::size_t n_cells, double length = 1.0);

    DomainKind kind() const noexcept { return kind_; }
    bool periodic() const noexcept { return kind_ == DomainKind::Circle; }
    std::size_t n_cells() const noexcept { return n_; }
    std::size_t n_faces() const noexcept { return periodic() ? n_ : n_ + 1; }
    double length() const noexcept { return length_; }
    double h() const noexcept { return h_; }

    double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h_; }
    double face(std::size_t j) const noexcept { return static_cast<double>(j) * h_; }
    std::vector<double> cell_centers() const;
    std::vector<double> face_positions() const;

    // Cells on either side of face j (left wraps on the circle). Only valid
    // for faces that have two neighbours.
    std::size_t left_cell(std::size_t j) const noexcept { return j == 0 ? n_ - 1 : j - 1; }
    std::size_t right_cell(std::size_t j) const noexcept { return j == n_ ? 0 : j; }
    bool is_boundary_face(std::size_t j) const noexcept
    {
        return !periodic() && (j == 0 || j == n_);
    }

    // Sample a function of position at the cell centers.
    template <class Fn>
    std::vector<double> sample(Fn&& fn) const
    {
        std::vector<double> out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            out[i] = fn(center(i));
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    DomainKind kind_;
    std::size_t n_;
    double length_;
    double h_;
};

// Midpoint rule: h * sum(field).
double integrate(const Grid& grid, std::span<const double> field);

// (field_j - field_{j-1}) / h on every face; boundary faces of the interval get 0.
std::vector<double> gradient_faces(const Grid& grid, std::span<const double> field);

// (flux_{i+1} - flux_i) / h per cell.
std::vector<double> divergence_cells(const Grid& grid, std::span<const double> flux);

} // namespace hkflow
