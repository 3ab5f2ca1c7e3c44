#pragma once
#include <functional>
#include <vector>

#include "fracgreen/kernels.hpp"
#include "fracgreen/quadrature.hpp"
#include "fracgreen/specfun.hpp"

namespace fracgreen {

struct FracGreenRequest {
    KernelSpec kernel;
    double beta = 0.5;
    double t = 1.0;
    Point x, y;
    int derivative_order = 0;
};

struct SubordinationOptions {
    double rel_tol = 1e-10;
    double scan_step = 0.25;  // in v = log u
    double cut = 45.0;        // drop (in log) at which the integrand is negligible
    double v_cap = 700.0;
    // fd1d pathway
    int fd1d_points_per_efold = 100;
};

struct GreenEvaluation {
    double value = 0.0;
    double log_abs = 0.0;
    int sign = 0;
    double rel_error = 0.0;
    // probability of base times beyond the kernel horizon (fd1d only)
    double truncated_mass = 0.0;
};

// Density of the inverse stable subordinator E_t at tau.
double log_inverse_subordinator_density(FracOrder beta, double t, double tau);
double inverse_subordinator_density(FracOrder beta, double t, double tau);

// int_0^inf B(tau) rho_t(tau) dtau for a base functional B given in log form;
// integrated as int B(t^beta u^-beta) w_beta(u) du over v = log u.
GreenEvaluation subordinate(const std::function<LogValue(double)>& base, FracOrder beta, double t,
                            const SubordinationOptions& opt = {});

GreenEvaluation evaluate_frac_green(const FracGreenRequest& req, const SubordinationOptions& opt = {});
double frac_green(const FracGreenRequest& req);
double frac_green_derivative(const FracGreenRequest& req);

// Subordinated fd1d values for one source y and a set of targets x, sharing
// a single time march. Base times below tau_min use the frozen-coefficient
// Gaussian at y; base times beyond the kernel horizon are dropped and
// reported as truncated mass.
class Fd1dSubordinator {
public:
    Fd1dSubordinator(const KernelSpec& spec, FracOrder beta, double y, std::vector<double> xs, int k = 0,
                     const SubordinationOptions& opt = {});
    GreenEvaluation evaluate(double t, std::size_t i) const;
    double tau_min() const { return taus_.front(); }
    const std::vector<double>& targets() const { return xs_; }

private:
    KernelSpec spec_;
    FracOrder beta_;
    double y_;
    std::vector<double> xs_;
    int k_;
    std::vector<double> taus_;
    std::vector<std::vector<double>> table_;  // [target][time]
};

struct SampledFunction1d {
    std::vector<double> y;       // increasing, uniformly spaced
    std::vector<double> values;
};

// int G^(beta)(t, x, y) Y(y) dy by the trapezoid rule over the sample grid
// (1-D kernels only).
double frac_solve(const KernelSpec& kernel, FracOrder beta, double t, const SampledFunction1d& Y, double x,
                  double coverage = 0.999);

}  // namespace fracgreen
