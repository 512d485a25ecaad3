#include "hkflow/transport.hpp"

#include "hkflow/diagnostics.hpp"
#include "hkflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hkflow {

std::string_view to_string(TransportKind kind)
{
    switch (kind) {
    case TransportKind::W2: return "W2";
    case TransportKind::HK: return "HK";
    case TransportKind::HKS: return "HKS";
    }
    return "unknown";
}

TransportKind parse_transport_kind(std::string_view name)
{
    if (name == "W2" || name == "w2")
        return TransportKind::W2;
    if (name == "HK" || name == "hk")
        return TransportKind::HK;
    if (name == "HKS" || name == "hks")
        return TransportKind::HKS;
    throw UsageError("unknown transport kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Pointwise action and its proximal map

double action_density(double rho, double m, double zeta)
{
    const double s = m * m + zeta * zeta;
    if (rho > 0.0)
        return s / rho;
    return s == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double action_prox_root(double rho, double s_sq, double gamma)
{
    // Monic cubic r^3 + a r^2 + b r + c from (r - rho)(r + 2g)^2 - g s^2.
    const double g = gamma;
    const double a = 4.0 * g - rho;
    const double b = 4.0 * g * g - 4.0 * g * rho;
    const double c = -(4.0 * g * g * rho + g * s_sq);

    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    double t;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        t = std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq);
    } else if (p < 0.0) {
        const double r = std::sqrt(-p / 3.0);
        const double arg = std::clamp(-0.5 * q / (r * r * r), -1.0, 1.0);
        t = 2.0 * r * std::cos(std::acos(arg) / 3.0);
    } else {
        t = std::cbrt(-q);
    }
    double root = t - a / 3.0;

    // Newton polish on the factored form, which keeps full relative accuracy.
    for (int it = 0; it < 3; ++it) {
        const double w = root + 2.0 * g;
        const double val = (root - rho) * w * w - g * s_sq;
        const double der = w * w + 2.0 * (root - rho) * w;
        if (der == 0.0)
            break;
        const double next = root - val / der;
        if (!std::isfinite(next) || next == root)
            break;
        root = next;
    }
    return root;
}

ActionPoint prox_action(double rho, double m, double zeta, double gamma)
{
    const double s_sq = m * m + zeta * zeta;
    const double r = action_prox_root(rho, s_sq, gamma);
    if (!(r > 0.0))
        return {0.0, 0.0, 0.0};
    const double shrink = r / (r + 2.0 * gamma);
    return {r, shrink * m, shrink * zeta};
}

// ---------------------------------------------------------------------------
// Staggered space-time discretization

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

using Matrix = std::vector<double>; // row-major

// Orthonormal eigenbasis of the Neumann second difference (DCT-II columns).
void neumann_basis(std::size_t n, double spacing, Matrix& Q, std::vector<double>& eig)
{
    Q.assign(n * n, 0.0);
    eig.assign(n, 0.0);
    const double pi = std::numbers::pi;
    for (std::size_t p = 0; p < n; ++p) {
        const double c = (p == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (std::size_t k = 0; k < n; ++k)
            Q[k * n + p] = c * std::cos(pi * p * (k + 0.5) / n);
        const double s = std::sin(pi * p / (2.0 * n));
        eig[p] = 4.0 * s * s / (spacing * spacing);
    }
}

// Orthonormal real Fourier basis of the periodic second difference.
void periodic_basis(std::size_t n, double spacing, Matrix& Q, std::vector<double>& eig)
{
    Q.assign(n * n, 0.0);
    eig.assign(n, 0.0);
    const double pi = std::numbers::pi;
    std::size_t col = 0;
    auto set_eig = [&](std::size_t freq) {
        const double s = std::sin(pi * freq / n);
        eig[col] = 4.0 * s * s / (spacing * spacing);
    };
    for (std::size_t i = 0; i < n; ++i)
        Q[i * n + col] = std::sqrt(1.0 / n);
    set_eig(0);
    ++col;
    for (std::size_t k = 1; 2 * k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double th = 2.0 * pi * k * (i + 0.5) / n;
            Q[i * n + col] = std::sqrt(2.0 / n) * std::cos(th);
            Q[i * n + col + 1] = std::sqrt(2.0 / n) * std::sin(th);
        }
        set_eig(k);
        eig[col + 1] = eig[col];
        col += 2;
    }
    if (n % 2 == 0) {
        for (std::size_t i = 0; i < n; ++i)
            Q[i * n + col] = ((i % 2 == 0) ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n));
        set_eig(n / 2);
    }
}

class StaggeredPath {
public:
    StaggeredPath(const Grid& grid, int n_time, TransportKind kind, std::span<const double> rho0,
                  std::span<const double> rho1)
        : grid_(grid), N_(static_cast<std::size_t>(n_time)), n_(grid.n_cells()),
          nf_(grid.periodic() ? grid.n_cells() : grid.n_cells() - 1), kind_(kind),
          dt_(1.0 / n_time), h_(grid.h()), rho0_(rho0.begin(), rho0.end()),
          rho1_(rho1.begin(), rho1.end())
    {
        neumann_basis(N_, dt_, Qt_, mu_);
        if (grid.periodic())
            periodic_basis(n_, h_, Qx_, lambda_);
        else
            neumann_basis(n_, h_, Qx_, lambda_);
        denom_.assign(N_ * n_, 0.0);
        const double scale = 1.0 / (dt_ * dt_) + 1.0 / (h_ * h_);
        for (std::size_t p = 0; p < N_; ++p)
            for (std::size_t j = 0; j < n_; ++j) {
                double c = 0.0;
                if (kind_ == TransportKind::HK || (kind_ == TransportKind::HKS && j != 0))
                    c = 1.0;
                const double d = mu_[p] + lambda_[j] + c;
                denom_[p * n_ + j] = (d > 1e-12 * scale) ? 1.0 / d : 0.0;
            }
    }

    std::size_t n_time() const { return N_; }
    std::size_t n_cells() const { return n_; }
    std::size_t rho_size() const { return (N_ - 1) * n_; }
    std::size_t mom_size() const { return N_ * nf_; }
    std::size_t src_size() const { return kind_ == TransportKind::W2 ? 0 : N_ * n_; }
    std::size_t size() const { return rho_size() + mom_size() + src_size(); }
    std::size_t centered_size() const { return N_ * n_; }
    bool has_source() const { return kind_ != TransportKind::W2; }

    // Offsets into the packed primal vector.
    std::size_t rho_at(std::size_t k, std::size_t i) const { return (k - 1) * n_ + i; }
    std::size_t mom_at(std::size_t k, std::size_t f) const { return rho_size() + k * nf_ + f; }
    std::size_t src_at(std::size_t k, std::size_t i) const { return rho_size() + mom_size() + k * n_ + i; }

    std::size_t face_left_cell(std::size_t f) const { return grid_.periodic() ? (f == 0 ? n_ - 1 : f - 1) : f; }
    std::size_t face_right_cell(std::size_t f) const { return grid_.periodic() ? f : f + 1; }
    std::size_t cell_left_face(std::size_t i) const
    {
        if (grid_.periodic())
            return i;
        return i == 0 ? npos : i - 1;
    }
    std::size_t cell_right_face(std::size_t i) const
    {
        if (grid_.periodic())
            return (i + 1) % n_;
        return i + 1 == n_ ? npos : i;
    }

    double node(const std::vector<double>& x, std::size_t k, std::size_t i) const
    {
        if (k == 0)
            return rho0_[i];
        if (k == N_)
            return rho1_[i];
        return x[rho_at(k, i)];
    }
    double mom(const std::vector<double>& x, std::size_t k, std::size_t f) const
    {
        return f == npos ? 0.0 : x[mom_at(k, f)];
    }

    // Centered fields (rho, m, zeta) = K x + k0; include_endpoints=false gives the linear part.
    void centered(const std::vector<double>& x, bool include_endpoints, std::vector<double>& rc,
                  std::vector<double>& mc, std::vector<double>& zc) const
    {
        rc.assign(centered_size(), 0.0);
        mc.assign(centered_size(), 0.0);
        zc.assign(centered_size(), 0.0);
        for (std::size_t k = 0; k < N_; ++k)
            for (std::size_t i = 0; i < n_; ++i) {
                const std::size_t c = k * n_ + i;
                double lo = 0.0, hi = 0.0;
                if (k > 0)
                    lo = x[rho_at(k, i)];
                else if (include_endpoints)
                    lo = rho0_[i];
                if (k + 1 < N_)
                    hi = x[rho_at(k + 1, i)];
                else if (include_endpoints)
                    hi = rho1_[i];
                rc[c] = 0.5 * (lo + hi);
                mc[c] = 0.5 * (mom(x, k, cell_left_face(i)) + mom(x, k, cell_right_face(i)));
                if (has_source())
                    zc[c] = x[src_at(k, i)];
            }
    }

    // K^T applied to centered fields.
    void adjoint(const std::vector<double>& rc, const std::vector<double>& mc,
                 const std::vector<double>& zc, std::vector<double>& x) const
    {
        x.assign(size(), 0.0);
        for (std::size_t k = 1; k < N_; ++k)
            for (std::size_t i = 0; i < n_; ++i)
                x[rho_at(k, i)] = 0.5 * (rc[(k - 1) * n_ + i] + rc[k * n_ + i]);
        for (std::size_t k = 0; k < N_; ++k)
            for (std::size_t f = 0; f < nf_; ++f)
                x[mom_at(k, f)] = 0.5 * (mc[k * n_ + face_left_cell(f)] + mc[k * n_ + face_right_cell(f)]);
        if (has_source())
            for (std::size_t c = 0; c < centered_size(); ++c)
                x[rho_size() + mom_size() + c] = zc[c];
    }

    // Continuity residual d_t rho + d_x m - zeta per space-time cell.
    std::vector<double> continuity_residual(const std::vector<double>& x) const
    {
        std::vector<double> r(centered_size());
        for (std::size_t k = 0; k < N_; ++k)
            for (std::size_t i = 0; i < n_; ++i) {
                double v = (node(x, k + 1, i) - node(x, k, i)) / dt_;
                v += (mom(x, k, cell_right_face(i)) - mom(x, k, cell_left_face(i))) / h_;
                if (has_source())
                    v -= x[src_at(k, i)];
                r[k * n_ + i] = v;
            }
        return r;
    }

    // For HKS the source lives in the subspace of zero spatial mean per slice.
    void restrict_source(std::vector<double>& x) const
    {
        if (kind_ != TransportKind::HKS)
            return;
        for (std::size_t k = 0; k < N_; ++k) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n_; ++i)
                mean += x[src_at(k, i)];
            mean /= static_cast<double>(n_);
            for (std::size_t i = 0; i < n_; ++i)
                x[src_at(k, i)] -= mean;
        }
    }

    // Orthogonal projection onto the affine set of admissible paths.
    void project(std::vector<double>& x) const
    {
        restrict_source(x);
        std::vector<double> phi = solve_normal(continuity_residual(x));
        for (std::size_t k = 1; k < N_; ++k)
            for (std::size_t i = 0; i < n_; ++i)
                x[rho_at(k, i)] -= (phi[(k - 1) * n_ + i] - phi[k * n_ + i]) / dt_;
        for (std::size_t k = 0; k < N_; ++k)
            for (std::size_t f = 0; f < nf_; ++f)
                x[mom_at(k, f)] -= (phi[k * n_ + face_left_cell(f)] - phi[k * n_ + face_right_cell(f)]) / h_;
        if (has_source()) {
            for (std::size_t k = 0; k < N_; ++k) {
                double mean = 0.0;
                if (kind_ == TransportKind::HKS) {
                    for (std::size_t i = 0; i < n_; ++i)
                        mean += phi[k * n_ + i];
                    mean /= static_cast<double>(n_);
                }
                for (std::size_t i = 0; i < n_; ++i)
                    x[src_at(k, i)] += phi[k * n_ + i] - mean;
            }
        }
    }

    // Linear-interpolation initial path with zero momentum and source.
    std::vector<double> initial_path() const
    {
        std::vector<double> x(size(), 0.0);
        for (std::size_t k = 1; k < N_; ++k) {
            const double s = static_cast<double>(k) / static_cast<double>(N_);
            for (std::size_t i = 0; i < n_; ++i)
                x[rho_at(k, i)] = (1.0 - s) * rho0_[i] + s * rho1_[i];
        }
        return x;
    }

    double dt() const { return dt_; }

private:
    // (A A^T)^+ r by diagonalization in the time and space eigenbases.
    std::vector<double> solve_normal(const std::vector<double>& r) const
    {
        std::vector<double> tmp(N_ * n_, 0.0), hat(N_ * n_, 0.0);
        // tmp = r Qx
        for (std::size_t k = 0; k < N_; ++k) {
            const double* row = &r[k * n_];
            double* out = &tmp[k * n_];
            for (std::size_t i = 0; i < n_; ++i) {
                const double v = row[i];
                const double* q = &Qx_[i * n_];
                for (std::size_t j = 0; j < n_; ++j)
                    out[j] += v * q[j];
            }
        }
        // hat = Qt^T tmp, scaled by the inverse eigenvalues
        for (std::size_t k = 0; k < N_; ++k)
            for (std::size_t p = 0; p < N_; ++p) {
                const double q = Qt_[k * N_ + p];
                const double* in = &tmp[k * n_];
                double* out = &hat[p * n_];
                for (std::size_t j = 0; j < n_; ++j)
                    out[j] += q * in[j];
            }
        for (std::size_t c = 0; c < hat.size(); ++c)
            hat[c] *= denom_[c];
        // tmp = Qt hat
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (std::size_t k = 0; k < N_; ++k)
            for (std::size_t p = 0; p < N_; ++p) {
                const double q = Qt_[k * N_ + p];
                const double* in = &hat[p * n_];
                double* out = &tmp[k * n_];
                for (std::size_t j = 0; j < n_; ++j)
                    out[j] += q * in[j];
            }
        // phi = tmp Qx^T
        std::vector<double> phi(N_ * n_, 0.0);
        for (std::size_t k = 0; k < N_; ++k) {
            const double* in = &tmp[k * n_];
            double* out = &phi[k * n_];
            for (std::size_t i = 0; i < n_; ++i) {
                const double* q = &Qx_[i * n_];
                double acc = 0.0;
                for (std::size_t j = 0; j < n_; ++j)
                    acc += q[j] * in[j];
                out[i] = acc;
            }
        }
        return phi;
    }

    const Grid& grid_;
    std::size_t N_, n_, nf_;
    TransportKind kind_;
    double dt_, h_;
    std::vector<double> rho0_, rho1_;
    Matrix Qt_, Qx_;
    std::vector<double> mu_, lambda_, denom_;
};

double rms(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

double operator_norm(const StaggeredPath& path, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    std::vector<double> x(path.size());
    for (double& v : x)
        v = rng.uniform() - 0.5;
    std::vector<double> rc, mc, zc, y;
    double estimate = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double nx = rms(x);
        for (double& v : x)
            v /= nx;
        path.centered(x, false, rc, mc, zc);
        path.adjoint(rc, mc, zc, y);
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            dot += x[i] * y[i];
        estimate = std::sqrt(std::max(dot / static_cast<double>(x.size()), 0.0));
        x.swap(y);
    }
    return estimate;
}

void validate(const TransportProblem& p)
{
    const Grid& g = p.grid;
    if (p.rho0.size() != g.n_cells() || p.rho1.size() != g.n_cells())
        throw UsageError("transport: endpoint densities do not match the grid");
    if (p.n_time < 2)
        throw UsageError("transport: n_time must be at least 2");
    if (p.opts.max_iters < 1 || !(p.opts.tol > 0.0) || !(p.opts.step_ratio > 0.0))
        throw UsageError("transport: invalid solver options");
    if (p.kind == TransportKind::W2 || p.kind == TransportKind::HKS) {
        if (std::abs(p.rho0.mass() - 1.0) > 1e-10 || std::abs(p.rho1.mass() - 1.0) > 1e-10)
            throw UsageError(std::string("transport: ") + std::string(to_string(p.kind)) +
                             " needs unit-mass endpoints");
    } else if (!(p.rho0.mass() > 0.0) || !(p.rho1.mass() > 0.0)) {
        throw UsageError("transport: HK needs positive endpoint masses");
    }
}

} // namespace

TransportResult solve_dynamic(const TransportProblem& problem)
{
    validate(problem);
    const StaggeredPath path(problem.grid, problem.n_time, problem.kind, problem.rho0.values(),
                             problem.rho1.values());
    const SolverOpts& opts = problem.opts;
    const double cell_volume = problem.grid.h() * path.dt();

    const double L = std::max(operator_norm(path, opts.seed), 1e-12);
    double tau = opts.step_ratio / L;
    double sigma = 1.0 / (opts.step_ratio * L);
    double adapt = 0.5; // residual balancing, decays so the steps settle

    std::vector<double> x = path.initial_path();
    path.project(x);
    const std::size_t nc = path.centered_size();
    std::vector<double> yr(nc, 0.0), ym(nc, 0.0), yz(nc, 0.0);
    std::vector<double> yr_t(nc), ym_t(nc), yz_t(nc);
    std::vector<double> x_t(x.size()), x_ext(x.size()), kt, rc, mc, zc;
    std::vector<ActionPoint> prox_pts(nc), best_pts;

    // The prox points always lie in the domain of the action, unlike K x which may
    // carry tiny negative densities next to nonzero momentum.
    auto action_of = [&](const std::vector<ActionPoint>& pts) {
        double total = 0.0;
        for (const ActionPoint& p : pts)
            total += action_density(p.rho, p.m, p.zeta);
        return total * cell_volume;
    };

    TransportResult result;
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<double> best_x = x;
    const bool source = path.has_source();
    constexpr double relax = 1.9; // over-relaxation of the primal-dual update

    for (int it = 1; it <= opts.max_iters; ++it) {
        // Primal: x~ = P_C(x - tau K^T y).
        path.adjoint(yr, ym, yz, kt);
        for (std::size_t i = 0; i < x.size(); ++i)
            x_t[i] = x[i] - tau * kt[i];
        path.project(x_t);
        for (std::size_t i = 0; i < x.size(); ++i)
            x_ext[i] = 2.0 * x_t[i] - x[i];
        // Dual: y~ = prox_{sigma J*}(y + sigma (K x_ext + k0)) via Moreau.
        path.centered(x_ext, true, rc, mc, zc);
        for (std::size_t c = 0; c < nc; ++c) {
            const double vr = yr[c] + sigma * rc[c];
            const double vm = ym[c] + sigma * mc[c];
            const double vz = source ? yz[c] + sigma * zc[c] : 0.0;
            const ActionPoint pnt = prox_action(vr / sigma, vm / sigma, vz / sigma, 1.0 / sigma);
            prox_pts[c] = pnt;
            yr_t[c] = vr - sigma * pnt.rho;
            ym_t[c] = vm - sigma * pnt.m;
            yz_t[c] = vz - sigma * pnt.zeta;
        }

        const bool check = (it % opts.check_every == 0) || it == opts.max_iters;
        if (check) {
            // Optimality residuals of (x~, y~), RMS-normalized.
            std::vector<double> dx(x.size()), dyr(nc), dym(nc), dyz(nc);
            for (std::size_t i = 0; i < x.size(); ++i)
                dx[i] = x[i] - x_t[i];
            for (std::size_t c = 0; c < nc; ++c) {
                dyr[c] = yr[c] - yr_t[c];
                dym[c] = ym[c] - ym_t[c];
                dyz[c] = yz[c] - yz_t[c];
            }
            std::vector<double> kdy;
            path.adjoint(dyr, dym, dyz, kdy);
            std::vector<double> pres(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                pres[i] = dx[i] / tau - kdy[i];
            std::vector<double> kr, km, kz;
            path.centered(dx, false, kr, km, kz);
            std::vector<double> dres;
            dres.reserve(3 * nc);
            for (std::size_t c = 0; c < nc; ++c) {
                dres.push_back(dyr[c] / sigma - kr[c]);
                dres.push_back(dym[c] / sigma - km[c]);
                if (source)
                    dres.push_back(dyz[c] / sigma - kz[c]);
            }
            const double p_res = rms(pres), d_res = rms(dres);
            const double residual = p_res + d_res;
            result.iters = it;
            if (residual < best_residual) {
                best_residual = residual;
                best_x = x_t;
                best_pts = prox_pts;
            }
            if (residual <= opts.tol) {
                result.converged = true;
                x = x_t;
                break;
            }
            if (p_res > 1.5 * d_res) {
                tau /= 1.0 - adapt;
                sigma *= 1.0 - adapt;
                adapt *= 0.95;
            } else if (d_res > 1.5 * p_res) {
                tau *= 1.0 - adapt;
                sigma /= 1.0 - adapt;
                adapt *= 0.95;
            }
        }
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] += relax * (x_t[i] - x[i]);
        for (std::size_t c = 0; c < nc; ++c) {
            yr[c] += relax * (yr_t[c] - yr[c]);
            ym[c] += relax * (ym_t[c] - ym[c]);
            yz[c] += relax * (yz_t[c] - yz[c]);
        }
    }

    const std::vector<double>& final_x = result.converged ? x : best_x;
    result.residual = best_residual;
    result.distance_sq = action_of(result.converged ? prox_pts : best_pts);
    if (result.distance_sq < 0.0)
        throw NumericError("transport: negative action");
    result.distance = std::sqrt(result.distance_sq);
    if (opts.keep_interpolation) {
        SpaceTimeFields st;
        st.n_time = problem.n_time;
        st.n_cells = path.n_cells();
        path.centered(final_x, true, st.rho, st.momentum, st.source);
        result.interpolation = std::move(st);
    }
    if (!result.converged) {
        std::ostringstream os;
        os << "transport " << to_string(problem.kind) << ": residual " << best_residual
           << " above tol " << opts.tol << " after " << opts.max_iters << " iterations";
        throw TransportNonConvergence(os.str(), result);
    }
    return result;
}

double w2_quantile_oracle(const Grid& grid, const DensityField& rho0, const DensityField& rho1,
                          std::size_t samples)
{
    if (grid.periodic())
        throw UsageError("w2_quantile_oracle needs an interval domain");
    if (rho0.size() != grid.n_cells() || rho1.size() != grid.n_cells())
        throw UsageError("w2_quantile_oracle: densities do not match the grid");
    if (std::abs(rho0.mass() - rho1.mass()) > 1e-10 || !(rho0.mass() > 0.0))
        throw UsageError("w2_quantile_oracle: densities must have equal positive mass");
    if (samples < 10000)
        samples = 10000;

    // Inverse CDF of a piecewise-constant density, walked monotonically in s.
    auto quantiles = [&](const DensityField& rho) {
        const double total = rho.mass();
        std::vector<double> q(samples);
        std::size_t cell = 0;
        double cdf_left = 0.0;
        const double h = grid.h();
        for (std::size_t k = 0; k < samples; ++k) {
            const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(samples) * total;
            while (cell + 1 < grid.n_cells() && cdf_left + rho[cell] * h < s) {
                cdf_left += rho[cell] * h;
                ++cell;
            }
            // Skip empty cells: the quantile jumps over them.
            while (cell + 1 < grid.n_cells() && rho[cell] == 0.0) {
                ++cell;
            }
            const double x_left = grid.face(cell);
            const double mass_in_cell = rho[cell] * h;
            const double frac = mass_in_cell > 0.0 ? std::clamp((s - cdf_left) / mass_in_cell, 0.0, 1.0) : 0.0;
            q[k] = x_left + frac * h;
        }
        return q;
    };
    const std::vector<double> q0 = quantiles(rho0), q1 = quantiles(rho1);
    double sum = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double d = q0[k] - q1[k];
        sum += d * d;
    }
    return rho0.mass() * sum / static_cast<double>(samples);
}

OrderingReport check_ordering(const Grid& grid, const DensityField& rho0, const DensityField& rho1,
                              int n_time, const SolverOpts& opts)
{
    auto solve = [&](TransportKind kind) {
        TransportProblem p{grid, rho0, rho1, kind, n_time, opts};
        return solve_dynamic(p);
    };
    const TransportResult hk = solve(TransportKind::HK);
    const TransportResult hks = solve(TransportKind::HKS);
    const TransportResult w2 = solve(TransportKind::W2);

    OrderingReport rep;
    rep.d_hk = hk.distance;
    rep.d_hks = hks.distance;
    rep.w2 = w2.distance;
    // Tolerances are on the residual scale; sqrt maps a squared-distance error to distance scale.
    rep.slack = 3.0 * std::sqrt(3.0 * opts.tol);
    rep.hk_le_hks = rep.d_hk <= rep.d_hks + rep.slack;
    rep.hks_le_w2 = rep.d_hks <= rep.w2 + rep.slack;
    return rep;
}

TalagrandResult talagrand_check(const EntropyModel& model, const Grid& grid, const DensityField& u0,
                                TransportKind kind, int n_time, const SolverOpts& opts)
{
    if (!grid.periodic())
        throw UsageError("talagrand_check runs on the circle");
    if (kind == TransportKind::W2)
        throw UsageError("talagrand_check supports HKS and HK");
    std::vector<double> m(grid.n_cells());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = model.equilibrium_value(grid.center(i));
    const DensityField eq(grid, std::move(m));

    TalagrandResult out;
    out.rhs = entropy_total(model, grid, u0.values());
    double max_dev = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i)
        max_dev = std::max(max_dev, std::abs(u0[i] - eq[i]));
    if (max_dev == 0.0) {
        out.skipped = true;
        return out;
    }
    TransportProblem p{grid, u0, eq, kind, n_time, opts};
    const TransportResult r = solve_dynamic(p);
    out.lhs = r.distance_sq;
    out.iters = r.iters;
    if (out.rhs < 1e-14) {
        if (out.lhs > 1e-6) {
            std::ostringstream os;
            os << "entropy " << out.rhs << " but squared distance " << out.lhs;
            throw CounterexampleError(os.str());
        }
        out.skipped = true;
        return out;
    }
    out.ratio = out.lhs / out.rhs;
    return out;
}

} // namespace hkflow
