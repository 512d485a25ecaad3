#pragma once

#include "hkflow/density.hpp"
#include "hkflow/grid.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

namespace hkflow {

using PointFn = std::function<double(double x, double u)>;

// The fitness f(x, u) and the partial derivatives the solver needs.
struct Nonlinearity {
    PointFn f;
    PointFn f_u;
    PointFn f_x;
    PointFn f_xu;
};

// Exact primitives for the built-in models, all taken for the unshifted f.
struct ClosedForms {
    PointFn antiderivative; // G with G_u = -f
    PointFn phi;            // only called when Phi is finite
    PointFn psi;
    PointFn phi_x;
    PointFn potential; // any P with P_u = -u f_u; equals Phi whenever Phi is finite
};

struct ModelTraits {
    double u_min = 0.0; // validity interval is (u_min, u_max)
    double u_max = std::numeric_limits<double>::infinity();
    bool x_independent = false;
    bool phi_finite = true;            // Phi(x, u) = -int_0^u xi f_u < inf
    bool entropy_finite_at_zero = true; // E(x, 0) < inf
};

/// Nonlinearity f together with the additive normalization c* (f = f_raw - c*).
/// Immutable; copies share a synchronized memo of quadrature results and
/// equilibrium roots, keyed by the shift.
class EntropyModel {
public:
    EntropyModel(std::string description, Nonlinearity raw, ModelTraits traits,
                 std::optional<ClosedForms> closed);

    const std::string& description() const noexcept { return description_; }
    const ModelTraits& traits() const noexcept { return traits_; }
    bool has_closed_forms() const noexcept { return closed_.has_value(); }
    const std::optional<ClosedForms>& closed_forms() const noexcept { return closed_; }
    double shift() const noexcept { return shift_; }

    double f(double x, double u) const { return raw_.f(x, u) - shift_; }
    double f_unshifted(double x, double u) const { return raw_.f(x, u); }
    double f_u(double x, double u) const { return raw_.f_u(x, u); }
    double f_x(double x, double u) const { return raw_.f_x(x, u); }
    double f_xu(double x, double u) const { return raw_.f_xu(x, u); }
    // Phi_u = -u f_u, the nonlinear diffusion coefficient.
    double phi_u(double x, double u) const { return u > 0.0 ? -u * raw_.f_u(x, u) : 0.0; }
    // u f(x, u) with the continuous extension u f -> 0 at u = 0.
    double u_times_f(double x, double u) const { return u > 0.0 ? u * f(x, u) : 0.0; }

    // P(x, u) with P_u = -u f_u; differences of P drive the diffusive flux.
    double flux_potential(double x, double u) const;
    double phi_x(double x, double u) const;

    // Positive root of f(x, .) = 0, the equilibrium density at x.
    double equilibrium_value(double x) const;

    EntropyModel with_shift(double c_star) const;
    // Same model evaluated by quadrature only; used to cross-check the closed forms.
    EntropyModel without_closed_forms() const;

    struct Memo;
    Memo& memo() const { return *memo_; }

private:
    std::string description_;
    Nonlinearity raw_;
    ModelTraits traits_;
    std::optional<ClosedForms> closed_;
    double shift_ = 0.0;
    std::shared_ptr<Memo> memo_;
};

struct Potential {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

// f(x, u) = (1 - u^alpha) / alpha.
EntropyModel make_power_law(double alpha);
// f(x, u) = -log u - V(x).
EntropyModel make_log_potential(Potential V, std::string label = "V");
// f(x, u) = -log(u / sqrt(1 + u^2)) - log(2) / 2.
EntropyModel make_arctangential();

// Phi(x, u) = -int_0^u xi f_u(x, xi) dxi.
double phi(const EntropyModel& model, double x, double u);
// Psi(x, u) = int_0^u Phi(x, xi) dxi.
double psi(const EntropyModel& model, double x, double u);
// E(x, u) = -int_{m(x)}^u f(x, xi) dxi >= 0.
double entropy_density(const EntropyModel& model, double x, double u);

// Pointwise level set: the u > 0 with f(x, u) = c. Throws RangeError.
double level_value(const EntropyModel& model, double x, double c);
// m_c at every cell center; RangeError names the first node where c is unattainable.
DensityField implicit_level(const EntropyModel& model, const Grid& grid, double c);

struct EquilibriumResult {
    DensityField m;
    double c_star = 0.0;   // total shift relative to the unshifted f
    double residual = 0.0; // max_i |f(x_i, m_i)| after the shift
    EntropyModel model;    // the shifted model, f(x, m(x)) = 0
};

// Find c* with int m_{c*} = target_mass and shift f by it. Throws ModelError
// when no bracket is found after 60 expansions.
EquilibriumResult normalize_equilibrium(const EntropyModel& model, const Grid& grid,
                                        double target_mass);

} // namespace hkflow
