#pragma once

#include <functional>

namespace hkflow {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    long max_subdivisions = 1L << 20;
};

// Adaptive Simpson with Richardson correction on [a, b] (a > b flips the sign).
// Throws NumericError when the subdivision budget runs out or the integrand
// returns a non-finite value.
double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        const QuadratureOptions& opts = {});

// Integral over [0, b] of a function that may be integrably singular at 0.
// Splits at split_point; the piece next to 0 uses xi = split * s^4 so that
// singularities up to xi^-0.75 become bounded. g is never called at 0.
double integrate_from_zero(const std::function<double(double)>& g, double b,
                           const QuadratureOptions& opts = {}, double split_point = 1e-8);

} // namespace hkflow
