#pragma once

#include <functional>

namespace nlcalib {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;      // estimated absolute error bound
    long evaluations = 0;
    bool converged = true;
};

// Globally adaptive Gauss-Kronrod 15(7) on [a, b]. Stops when the summed
// interval error estimate drops below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol = 0.0, int max_intervals = 50000);

// \int_a^inf f for a > 0 and integrands that decay at infinity, via the
// substitution r = a/t on (0, 1]. Nonpositive a throws std::invalid_argument.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double rel_tol);

}  // namespace nlcalib
