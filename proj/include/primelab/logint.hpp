#pragma once

// Li(n) = integral from 2 to n of dx / log x, by adaptive Gauss-Kronrod
// quadrature in the variable u = log x (integrand e^u / u).

#include <cstddef>
#include <map>
#include <mutex>

namespace primelab {

struct LiValue {
    double n = 2.0;
    double value = 0.0;
    double abs_error_bound = 0.0;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t intervals = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-12;         // target on the Kronrod-Gauss error estimate
    double max_rel_error = 1e-10;   // contract; failing it raises NumericalError
    std::size_t max_intervals = 20000;
};

// Integral of dx / log x over [a, b], 1 < a <= b. Single adaptive pass, no
// subtraction of two li values.
QuadratureResult integrate_inverse_log(double a, double b, const QuadratureOptions& opts = {});

// Throws DomainError for n < 2 (or NaN), NumericalError on non-convergence.
LiValue li(double n, const QuadratureOptions& opts = {});

// Integral over [n0, n1]; requires 2 <= n0 <= n1.
double li_interval(double n0, double n1, const QuadratureOptions& opts = {});
QuadratureResult li_interval_detail(double n0, double n1, const QuadratureOptions& opts = {});

// Thread-safe memo of li values at checkpoint granularity.
class LiCache {
public:
    explicit LiCache(QuadratureOptions opts = {}) : opts_(opts) {}

    LiValue get(double n);
    std::size_t size() const;

private:
    QuadratureOptions opts_;
    mutable std::mutex mu_;
    std::map<double, LiValue> values_;
};

} // namespace primelab
