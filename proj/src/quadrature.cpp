#include "hkflow/quadrature.hpp"

#include "hkflow/error.hpp"

#include <cmath>

namespace hkflow {

namespace {

struct Simpson {
    const std::function<double(double)>& g;
    long budget;

    double eval(double x)
    {
        const double v = g(x);
        if (!std::isfinite(v))
            throw NumericError("quadrature: integrand not finite at " + std::to_string(x));
        return v;
    }

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth)
    {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = eval(lm), frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth <= 0 || std::abs(delta) <= 15.0 * tol || m <= a || m >= b)
            return left + right + delta / 15.0;
        if (--budget <= 0)
            throw NumericError("quadrature: subdivision budget exhausted");
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

} // namespace

double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        const QuadratureOptions& opts)
{
    if (a == b)
        return 0.0;
    if (a > b)
        return -adaptive_simpson(g, b, a, opts);
    Simpson s{g, opts.max_subdivisions};
    const double fa = s.eval(a), fb = s.eval(b), m = 0.5 * (a + b), fm = s.eval(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Depth 60 cannot be reached before the interval collapses to adjacent doubles.
    return s.recurse(a, b, fa, fm, fb, whole, opts.abs_tol, 60);
}

double integrate_from_zero(const std::function<double(double)>& g, double b,
                           const QuadratureOptions& opts, double split_point)
{
    if (b <= 0.0)
        return 0.0;
    const double eps = std::min(split_point, b);
    QuadratureOptions half = opts;
    half.abs_tol = 0.5 * opts.abs_tol;
    auto near_zero = [&](double s) {
        if (s <= 0.0)
            return 0.0;
        const double s2 = s * s;
        const double xi = eps * s2 * s2;
        if (xi <= 0.0)
            return 0.0;
        return g(xi) * 4.0 * eps * s2 * s;
    };
    double total = adaptive_simpson(near_zero, 0.0, 1.0, half);
    if (b > eps)
        total += adaptive_simpson(g, eps, b, half);
    return total;
}

} // namespace hkflow
