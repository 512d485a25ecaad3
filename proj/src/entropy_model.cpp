#include "hkflow/entropy_model.hpp"

#include "hkflow/error.hpp"
#include "hkflow/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace hkflow {

struct EntropyModel::Memo {
    enum Tag : std::uint64_t { Phi = 1, Psi, Entropy, Equilibrium, PhiX };

    struct Key {
        std::uint64_t tag, x, u;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept
        {
            std::uint64_t h = k.tag * 0x9E3779B97F4A7C15ULL;
            h ^= k.x + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
            h ^= k.u + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };

    std::mutex mutex;
    std::unordered_map<Key, double, KeyHash> values;

    template <class Compute>
    double get(Tag tag, double x, double u, Compute&& compute)
    {
        const Key key{tag, std::bit_cast<std::uint64_t>(x), std::bit_cast<std::uint64_t>(u)};
        {
            std::lock_guard lock(mutex);
            if (auto it = values.find(key); it != values.end())
                return it->second;
        }
        const double v = compute();
        std::lock_guard lock(mutex);
        if (values.size() > (1u << 20))
            values.clear();
        values.emplace(key, v);
        return v;
    }
};

EntropyModel::EntropyModel(std::string description, Nonlinearity raw, ModelTraits traits,
                           std::optional<ClosedForms> closed)
    : description_(std::move(description)), raw_(std::move(raw)), traits_(traits),
      closed_(std::move(closed)), memo_(std::make_shared<Memo>())
{
}

EntropyModel EntropyModel::with_shift(double c_star) const
{
    EntropyModel copy = *this;
    copy.shift_ = c_star;
    copy.memo_ = std::make_shared<Memo>();
    return copy;
}

EntropyModel EntropyModel::without_closed_forms() const
{
    EntropyModel copy = *this;
    copy.closed_.reset();
    copy.description_ += " [quadrature]";
    copy.memo_ = std::make_shared<Memo>();
    return copy;
}

namespace {

struct LevelSolve {
    double u = 0.0;
    // +1: c above the range of f (root would sit below u_min),
    // -1: c below the range of f (root would sit above u_max).
    int out_of_range = 0;
};

LevelSolve solve_level(const EntropyModel& model, double x, double c, double guess = 1.0)
{
    const double lo_lim = std::max(model.traits().u_min, 1e-300);
    const double hi_lim = std::min(model.traits().u_max, 1e300);
    auto g = [&](double u) { return model.f(x, u) - c; };

    double u = std::clamp(guess, lo_lim, hi_lim);
    double gu = g(u);
    if (std::isnan(gu))
        throw NumericError("level solve: f is NaN at x=" + std::to_string(x));
    if (gu == 0.0)
        return {u, 0};

    double lo, hi;
    if (gu > 0.0) {
        lo = u;
        hi = u;
        for (;;) {
            if (hi >= hi_lim)
                return {hi_lim, -1};
            hi = std::min(hi * 16.0, hi_lim);
            const double gh = g(hi);
            if (gh <= 0.0)
                break;
            lo = hi;
        }
    } else {
        lo = u;
        hi = u;
        for (;;) {
            if (lo <= lo_lim)
                return {lo_lim, +1};
            lo = std::max(lo / 16.0, lo_lim);
            const double gl = g(lo);
            if (gl >= 0.0)
                break;
            hi = lo;
        }
    }

    // g(lo) >= 0 >= g(hi): safeguarded Newton.
    u = (lo == hi) ? lo : std::sqrt(lo * hi);
    for (int it = 0; it < 400; ++it) {
        gu = g(u);
        if (gu == 0.0 || std::abs(gu) <= 1e-14)
            return {u, 0};
        if (gu > 0.0)
            lo = u;
        else
            hi = u;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            break;
        const double slope = model.f_u(x, u);
        double next = u - gu / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next))
            next = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        u = next;
    }
    // Bracket collapsed: pick the end with the smaller residual.
    return {std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi, 0};
}

void check_finite(double v, const char* what, double x, double u)
{
    if (std::isnan(v)) {
        std::ostringstream os;
        os << what << " is NaN at x=" << x << ", u=" << u;
        throw NumericError(os.str());
    }
}

void check_u(const EntropyModel& model, double u, const char* what)
{
    if (!(u >= 0.0) || !(u < model.traits().u_max)) {
        std::ostringstream os;
        os << what << ": u=" << u << " outside [0, " << model.traits().u_max << ")";
        throw DomainError(os.str());
    }
}

} // namespace

double EntropyModel::equilibrium_value(double x) const
{
    return memo_->get(Memo::Equilibrium, x, 0.0, [&] {
        const LevelSolve s = solve_level(*this, x, 0.0);
        if (s.out_of_range != 0)
            throw RangeError("f(x, .) = 0 has no positive root at x=" + std::to_string(x));
        return s.u;
    });
}

double EntropyModel::flux_potential(double x, double u) const
{
    if (closed_)
        return closed_->potential(x, u);
    return phi(*this, x, u);
}

double EntropyModel::phi_x(double x, double u) const
{
    if (closed_)
        return closed_->phi_x(x, u);
    if (u <= 0.0)
        return 0.0;
    return memo_->get(Memo::PhiX, x, u, [&] {
        return -integrate_from_zero([&](double xi) { return xi * raw_.f_xu(x, xi); }, u);
    });
}

double phi(const EntropyModel& model, double x, double u)
{
    check_u(model, u, "phi");
    if (u == 0.0)
        return 0.0;
    if (!model.traits().phi_finite)
        throw DomainError("phi: " + model.description() + " has Phi = +inf for u > 0");
    if (const auto& cf = model.closed_forms())
        return cf->phi(x, u);
    return model.memo().get(EntropyModel::Memo::Phi, x, u, [&] {
        return integrate_from_zero([&](double xi) { return -xi * model.f_u(x, xi); }, u);
    });
}

double psi(const EntropyModel& model, double x, double u)
{
    check_u(model, u, "psi");
    if (u == 0.0)
        return 0.0;
    if (!model.traits().phi_finite)
        throw DomainError("psi: " + model.description() + " has Phi = +inf for u > 0");
    if (const auto& cf = model.closed_forms())
        return cf->psi(x, u);
    // Psi(u) = int_0^u (u - xi) Phi_u(xi) dxi after integrating by parts.
    return model.memo().get(EntropyModel::Memo::Psi, x, u, [&] {
        return integrate_from_zero([&](double xi) { return -(u - xi) * xi * model.f_u(x, xi); }, u);
    });
}

double entropy_density(const EntropyModel& model, double x, double u)
{
    check_u(model, u, "entropy_density");
    if (u == 0.0 && !model.traits().entropy_finite_at_zero)
        throw DomainError("entropy_density: E(x, 0) = +inf for " + model.description());
    const double m = model.equilibrium_value(x);
    if (const auto& cf = model.closed_forms()) {
        const double e = cf->antiderivative(x, u) - cf->antiderivative(x, m) + model.shift() * (u - m);
        check_finite(e, "entropy_density", x, u);
        return std::max(e, 0.0);
    }
    return model.memo().get(EntropyModel::Memo::Entropy, x, u, [&] {
        // E = int_u^m f dxi; the end nearest 0 may be singular.
        const double lo = std::min(u, m), hi = std::max(u, m);
        const double sign = (u < m) ? 1.0 : -1.0;
        constexpr double split = 1e-8;
        auto f = [&](double xi) { return model.f(x, xi); };
        double integral = 0.0;
        if (lo < split) {
            const double top = std::min(split, hi);
            integral += integrate_from_zero([&](double eta) { return f(lo + eta); }, top - lo, {},
                                            top - lo);
            if (hi > top)
                integral += adaptive_simpson(f, top, hi);
        } else {
            integral = adaptive_simpson(f, lo, hi);
        }
        return std::max(sign * integral, 0.0);
    });
}

double level_value(const EntropyModel& model, double x, double c)
{
    const LevelSolve s = solve_level(model, x, c);
    if (s.out_of_range != 0) {
        std::ostringstream os;
        os << "level c=" << c << " is not attained by f(x, .) at x=" << x;
        throw RangeError(os.str());
    }
    return s.u;
}

DensityField implicit_level(const EntropyModel& model, const Grid& grid, double c)
{
    std::vector<double> values(grid.n_cells());
    double guess = 1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const LevelSolve s = solve_level(model, grid.center(i), c, guess);
        if (s.out_of_range != 0) {
            std::ostringstream os;
            os << "level c=" << c << " is not attained at node " << i << " (x=" << grid.center(i)
               << ")";
            throw RangeError(os.str(), i);
        }
        values[i] = s.u;
        guess = s.u;
    }
    return DensityField(grid, std::move(values));
}

namespace {

// Mass of m_c, with +inf / 0 standing in for levels below / above the range of f.
struct LevelMass {
    double mass;
    std::vector<double> values;
};

LevelMass level_mass(const EntropyModel& raw, const Grid& grid, double c, std::vector<double>& guess)
{
    LevelMass out{0.0, std::vector<double>(grid.n_cells())};
    int side = 0;
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const LevelSolve s = solve_level(raw, grid.center(i), c, guess[i]);
        if (s.out_of_range != 0) {
            if (side != 0 && side != s.out_of_range)
                throw ModelError("equilibrium not normalizable: level " + std::to_string(c) +
                                 " is above the range of f at one node and below it at another");
            side = s.out_of_range;
        }
        out.values[i] = s.u;
    }
    if (side > 0)
        out.mass = 0.0;
    else if (side < 0)
        out.mass = std::numeric_limits<double>::infinity();
    else {
        out.mass = integrate(grid, out.values);
        guess = out.values;
    }
    return out;
}

} // namespace

EquilibriumResult normalize_equilibrium(const EntropyModel& model, const Grid& grid,
                                        double target_mass)
{
    if (!(target_mass > 0.0) || !std::isfinite(target_mass))
        throw UsageError("normalize_equilibrium: target mass must be positive");
    const EntropyModel raw = model.with_shift(0.0);
    const double level = target_mass / grid.length();

    double c_star;
    std::vector<double> m;
    if (raw.traits().x_independent) {
        c_star = raw.f(grid.center(0), level);
        if (!std::isfinite(c_star))
            throw ModelError("equilibrium not normalizable on validity range");
        m.assign(grid.n_cells(), level);
    } else {
        std::vector<double> guess(grid.n_cells(), level);
        const double c0 = raw.f(grid.center(0), level);
        if (!std::isfinite(c0))
            throw ModelError("equilibrium not normalizable on validity range");
        double width = 1.0;
        double c_lo = c0 - width, c_hi = c0 + width;
        LevelMass m_lo = level_mass(raw, grid, c_lo, guess);
        LevelMass m_hi = level_mass(raw, grid, c_hi, guess);
        int expansions = 0;
        while (!(m_lo.mass >= target_mass && m_hi.mass <= target_mass)) {
            if (++expansions > 60)
                throw ModelError("equilibrium not normalizable on validity range");
            width *= 2.0;
            if (m_lo.mass < target_mass) {
                c_lo = c0 - width;
                m_lo = level_mass(raw, grid, c_lo, guess);
            }
            if (m_hi.mass > target_mass) {
                c_hi = c0 + width;
                m_hi = level_mass(raw, grid, c_hi, guess);
            }
        }
        // Bisection on the decreasing map c -> int m_c.
        for (int it = 0; it < 400 && c_hi - c_lo > 2.0 * std::numeric_limits<double>::epsilon() *
                                                         std::max(1.0, std::abs(c_lo));
             ++it) {
            const double mid = 0.5 * (c_lo + c_hi);
            LevelMass mm = level_mass(raw, grid, mid, guess);
            if (mm.mass >= target_mass) {
                c_lo = mid;
                m_lo = std::move(mm);
            } else {
                c_hi = mid;
                m_hi = std::move(mm);
            }
        }
        const bool take_lo = std::isfinite(m_lo.mass) &&
                             (!std::isfinite(m_hi.mass) || m_hi.mass == 0.0 ||
                              std::abs(m_lo.mass - target_mass) <= std::abs(m_hi.mass - target_mass));
        c_star = take_lo ? c_lo : c_hi;
        m = take_lo ? m_lo.values : m_hi.values;
    }

    EntropyModel shifted = model.with_shift(c_star);
    double residual = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        residual = std::max(residual, std::abs(shifted.f(grid.center(i), m[i])));
    DensityField field(grid, std::move(m));
    if (std::abs(field.mass() - target_mass) > 1e-10 * std::max(1.0, target_mass))
        throw ModelError("equilibrium normalization missed the target mass by " +
                         std::to_string(field.mass() - target_mass));
    return {std::move(field), c_star, residual, std::move(shifted)};
}

// ---------------------------------------------------------------------------
// Built-in models

EntropyModel make_power_law(double alpha)
{
    if (alpha == 0.0 || !std::isfinite(alpha))
        throw UsageError("power law needs a finite nonzero alpha");
    Nonlinearity nl;
    nl.f = [alpha](double, double u) { return (1.0 - std::pow(u, alpha)) / alpha; };
    nl.f_u = [alpha](double, double u) { return -std::pow(u, alpha - 1.0); };
    nl.f_x = [](double, double) { return 0.0; };
    nl.f_xu = [](double, double) { return 0.0; };

    ModelTraits traits;
    traits.x_independent = true;
    if (alpha <= -1.0) {
        traits.u_min = 1e-12;
        traits.phi_finite = false;
        traits.entropy_finite_at_zero = false;
    }

    ClosedForms cf;
    if (alpha == -1.0)
        cf.antiderivative = [](double, double u) { return u - std::log(u); };
    else
        cf.antiderivative = [alpha](double, double u) {
            return (std::pow(u, alpha + 1.0) / (alpha + 1.0) - u) / alpha;
        };
    cf.phi = [alpha](double, double u) { return std::pow(u, alpha + 1.0) / (alpha + 1.0); };
    cf.psi = [alpha](double, double u) {
        return std::pow(u, alpha + 2.0) / ((alpha + 1.0) * (alpha + 2.0));
    };
    cf.phi_x = [](double, double) { return 0.0; };
    if (alpha == -1.0)
        cf.potential = [](double, double u) { return std::log(u); };
    else
        cf.potential = [alpha](double, double u) { return std::pow(u, alpha + 1.0) / (alpha + 1.0); };

    std::ostringstream name;
    name << "power_law(alpha=" << alpha << ")";
    return EntropyModel(name.str(), std::move(nl), traits, std::move(cf));
}

EntropyModel make_log_potential(Potential V, std::string label)
{
    auto value = V.value;
    auto deriv = V.derivative;
    Nonlinearity nl;
    nl.f = [value](double x, double u) { return -std::log(u) - value(x); };
    nl.f_u = [](double, double u) { return -1.0 / u; };
    nl.f_x = [deriv](double x, double) { return -deriv(x); };
    nl.f_xu = [](double, double) { return 0.0; };

    ClosedForms cf;
    cf.antiderivative = [value](double x, double u) {
        const double ulogu = u > 0.0 ? u * std::log(u) : 0.0;
        return ulogu - u + u * value(x);
    };
    cf.phi = [](double, double u) { return u; };
    cf.psi = [](double, double u) { return 0.5 * u * u; };
    cf.phi_x = [](double, double) { return 0.0; };
    cf.potential = cf.phi;

    return EntropyModel("log_potential(" + label + ")", std::move(nl), ModelTraits{}, std::move(cf));
}

EntropyModel make_arctangential()
{
    const double half_log2 = 0.5 * std::numbers::ln2;
    Nonlinearity nl;
    nl.f = [half_log2](double, double u) {
        return -std::log(u) + 0.5 * std::log1p(u * u) - half_log2;
    };
    nl.f_u = [](double, double u) { return -1.0 / (u * (1.0 + u * u)); };
    nl.f_x = [](double, double) { return 0.0; };
    nl.f_xu = [](double, double) { return 0.0; };

    ModelTraits traits;
    traits.x_independent = true;

    ClosedForms cf;
    cf.antiderivative = [half_log2](double, double u) {
        const double ulog = u > 0.0 ? u * (std::log(u) - 0.5 * std::log1p(u * u)) : 0.0;
        return ulog - std::atan(u) + half_log2 * u;
    };
    cf.phi = [](double, double u) { return std::atan(u); };
    cf.psi = [](double, double u) { return u * std::atan(u) - 0.5 * std::log1p(u * u); };
    cf.phi_x = [](double, double) { return 0.0; };
    cf.potential = cf.phi;

    return EntropyModel("arctangential", std::move(nl), traits, std::move(cf));
}

} // namespace hkflow
