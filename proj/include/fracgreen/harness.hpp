#pragma once
#include <optional>
#include <string>
#include <vector>

#include "fracgreen/envelopes.hpp"
#include "fracgreen/kernels.hpp"
#include "fracgreen/subordination.hpp"

namespace fracgreen {

// Which two-sided estimate a sweep certifies.
enum class Theorem { global_diffusion, global_stable, local_diffusion, local_stable };
// Which derivative upper bound a sweep certifies.
enum class DerivativeProp {
    global_diffusion,
    global_stable,
    local_diffusion_small_time,
    local_diffusion_large_time,
    local_stable_small_time,
    local_stable_large_time,
};
const char* to_string(Theorem t);
const char* to_string(DerivativeProp p);

struct SweepGrid {
    std::vector<double> t;
    std::vector<double> r;  // may contain 0
    static SweepGrid log_spaced(double t_lo, double t_hi, double r_lo, double r_hi, int per_decade = 5,
                                bool include_zero = true);
    // Grid for the family: diffusion spans Omega up to ~10^3, stable spans
    // Omega in [1e-8, 1e4] so both slope windows are populated.
    static SweepGrid default_for(Family family, double beta, double alpha = 2.0, double t_hi = 10.0);
    std::size_t size() const { return t.size() * r.size(); }
};

struct HarnessOptions {
    std::optional<double> horizon_T;
    double ratio_ceiling = 1e3;
    double r2_min = 0.99;
    double slope_tol = 0.1;
    double deriv_slope_tol = 0.15;
    double large_omega_min = 10.0;  // window for the far-field slope
    double small_omega_max = 1e-3;  // window for the near-field slope
    SubordinationOptions sub;
};

struct ReportPoint {
    double t = 0.0, r = 0.0, omega = 0.0;
    Regime regime = Regime::on_diagonal;
    double log_G = 0.0;  // log |G| or log |dG|
    double log_envelope = 0.0;
    double log_ratio = 0.0;
    bool excluded = false;
    std::string note;  // "singular", "zero_derivative", or the error text
    bool operator==(const ReportPoint&) const = default;
};

struct RegimeSummary {
    Regime regime = Regime::on_diagonal;
    std::size_t count = 0;
    double log_ratio_min = 0.0, log_ratio_max = 0.0;
    bool pass = false;
    bool operator==(const RegimeSummary&) const = default;
};

// log|G| - log(polynomial part) = intercept - rate * z
struct TailFit {
    bool present = false;
    std::size_t n = 0;
    double rate = 0.0, rate_ci_low = 0.0, rate_ci_high = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool pass = false;
    bool operator==(const TailFit&) const = default;
};

struct SlopeCheck {
    std::string name;
    double omega_lo = 0.0, omega_hi = 0.0;
    std::size_t n = 0;
    double slope = 0.0, ci_low = 0.0, ci_high = 0.0;
    double expected = 0.0, tolerance = 0.0;
    bool pass = false;
    bool operator==(const SlopeCheck&) const = default;
};

struct VerificationReport {
    int schema_version = 1;
    std::string selector;
    std::string kernel;
    int d = 1;
    double alpha = 2.0;
    double beta = 0.5;
    int k = 0;
    bool one_sided = false;
    double ratio_ceiling = 1e3;
    double r2_min = 0.99;
    EnvelopeConstants constants;     // fitted prefactors and exponential rate
    double exp_constant_low = 0.0;   // slope interval ends, one per side
    double exp_constant_high = 0.0;
    std::vector<ReportPoint> points;
    std::vector<RegimeSummary> regimes;
    TailFit tail;
    std::vector<SlopeCheck> slopes;
    std::size_t failed_points = 0;
    bool pass = false;
    std::string config;  // effective configuration, echoed for provenance
    bool operator==(const VerificationReport&) const;
};

VerificationReport verify_envelope(Theorem which, const KernelSpec& kernel, double beta, const SweepGrid& grid,
                                   const HarnessOptions& opt = {});
VerificationReport verify_derivative_envelope(DerivativeProp which, const KernelSpec& kernel, double beta, int k,
                                              const SweepGrid& grid, const HarnessOptions& opt = {});

// Largest |log_ratio(a) - log_ratio(b)| over points present and included in
// both, evaluated with the constants of `b`; NaN if nothing is shared.
double max_log_ratio_difference(const VerificationReport& a, const VerificationReport& b);

enum class FitModel { power, power_plus_exponential };
struct Estimate {
    double value = 0.0, ci_low = 0.0, ci_high = 0.0;
};
struct FitResult {
    FitModel model = FitModel::power;
    std::size_t n = 0;
    Estimate log_prefactor, exponent, rate;  // y = e^{b0} x^{b1} exp(-rate x^q)
    double prefactor = 0.0;
    double q = 1.0;
    double r_squared = 0.0;
};
// Least squares on log y; 95% intervals from the t distribution. FitError
// with fewer than 8 points.
FitResult fit_constants(const std::vector<double>& x, const std::vector<double>& log_y, FitModel model,
                        double q = 1.0);

// Ordinary least squares with 95% intervals; exposed for the slope checks.
struct OlsResult {
    std::vector<Estimate> coef;
    double r_squared = 0.0;
    std::size_t n = 0;
};
OlsResult ols(const std::vector<std::vector<double>>& columns, const std::vector<double>& y);

}  // namespace fracgreen
