#pragma once
#include <functional>
#include <limits>
#include <vector>

namespace fracgreen {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

// Globally adaptive Gauss-Kronrod (10/21) on [a, b]. `breaks` are the initial
// panel edges; they must be sorted and finite. Never throws on
// non-convergence; check `converged`.
QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                     const QuadOptions& opt = {});
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// Signed value held as sign * exp(log_abs); sign 0 means exact zero.
struct LogValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;
    double value() const;
};

LogValue log_value_of(double x);

struct LogQuadResult {
    double log_abs = 0.0;
    int sign = 0;
    double rel_error = 0.0;
    bool converged = true;
    double value() const;
};

// Integrates f where f returns its value in log form, so the integrand may
// span far outside double range. The integral is rescaled by the largest
// sampled log magnitude; `rel_tol` applies to the result, `abs_tol` is
// relative to that peak.
LogQuadResult integrate_log(const std::function<LogValue(double)>& f, const std::vector<double>& breaks,
                            const QuadOptions& opt = {});

// log(sum exp) helpers
double log_add(double a, double b);

}  // namespace fracgreen
