#pragma once
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracgreen/kernels.hpp"
#include "fracgreen/specfun.hpp"

namespace fracgreen {

struct McConfig {
    std::size_t sample_count = 100000;
    std::uint64_t seed = 1;
    double time_step = 0.01;     // initial path step for inverse subordinators
    int histogram_bins = 100;
    double bracket_tol = 0.01;   // the step is halved until it is at most this
    std::size_t max_steps_per_path = 50'000'000;
    void validate() const;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform();  // in (0, 1)
    double exponential() { return -std::log(uniform()); }
    double normal();

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Counter-based substream: independent of how work is scheduled.
Rng substream(std::uint64_t seed, std::uint64_t index);

// One increment of the beta-stable subordinator over dt (Laplace transform
// exp(-dt lambda^beta)), Kanter's representation.
double sample_stable_increment(FracOrder beta, double dt, Rng& rng);

struct SandwichCertificate {
    double c_low = 0.0;
    double c_high = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

// Levy measure sum_i w_i (-1/Gamma(-beta_i)) s^{-1-beta_i} ds with declared
// sandwich orders beta1 <= beta2.
class LevyKernelSpec {
public:
    struct Component {
        double weight;
        double beta;
    };
    static LevyKernelSpec pure_stable(double beta);
    static LevyKernelSpec mixture(std::vector<Component> comps, double beta1, double beta2);

    const std::vector<Component>& components() const { return comps_; }
    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double density(double s) const;
    double laplace_exponent(double lambda) const;
    // CertificateError unless C1 s^{-1-b1} <= nu <= C2 s^{-1-b2} on (0,1]
    // and C1 s^{-1-b2} <= nu <= C2 s^{-1-b1} on [1, inf).
    SandwichCertificate verify() const;

private:
    std::vector<Component> comps_;
    double beta1_ = 0.5, beta2_ = 0.5;
};

// Path step actually used (the bracket width of each first passage).
double inverse_subordinator_step(const McConfig& cfg);

// Samples of E_t (midpoint of the passage bracket).
std::vector<double> sample_inverse_subordinator(FracOrder beta, double t, const McConfig& cfg);
std::vector<double> sample_inverse_subordinator(const LevyKernelSpec& nu, double t, const McConfig& cfg);
// One path per sample, first passages above each level in ts; result[j][i]
// is sample i at level ts[j].
std::vector<std::vector<double>> sample_inverse_subordinator_levels(const LevyKernelSpec& nu,
                                                                    const std::vector<double>& ts,
                                                                    const McConfig& cfg);

// First coordinate of the base process at the given random times.
// Gaussian: sqrt(2 E A_11) Z; isotropic stable: sqrt(2 S) E^{1/alpha} Z with
// S positive (alpha/2)-stable.
std::vector<double> sample_base_first_coordinate(const KernelSpec& kernel, const std::vector<double>& times,
                                                 std::uint64_t seed);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::vector<double> density;
    std::vector<double> reference;  // subordinated kernel at bin centers
};

struct SubordinatedSample {
    std::vector<double> samples;  // sorted first coordinates
    Histogram histogram;
    double mean = 0.0;
    double second_moment = 0.0;
    double median = 0.0;
    double median_ci_low = 0.0, median_ci_high = 0.0;
    double time_step = 0.0;
};

SubordinatedSample subordinated_density_mc(const KernelSpec& kernel, FracOrder beta, double t, const McConfig& cfg);

// Marginal CDF of the first coordinate of the subordinated Gaussian process.
double subordinated_gaussian_cdf(double a11, FracOrder beta, double t, double x);
// CDF tabulated on a symmetric grid and interpolated linearly.
std::function<double(double)> tabulated_subordinated_cdf(const KernelSpec& kernel, FracOrder beta, double t,
                                                         int points = 401);

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};
MeanEstimate mean_estimate(const std::vector<double>& v);

struct TestFunction {
    std::string name;
    std::function<double(double)> f;
};
// The three non-increasing functions used for the ordering checks.
std::vector<TestFunction> standard_test_functions();

struct ComparisonEntry {
    std::string function;
    double t = 0.0;
    MeanEstimate middle, lower_ref, upper_ref;  // nu, beta1-stable, beta2-stable
    double ci_halfwidth = 0.0;
    bool holds = false;
};

struct ComparisonReport {
    SandwichCertificate certificate;
    std::vector<ComparisonEntry> entries;
    bool all_hold = false;
};

// E f(X(E_t)) for nu and for the two stable references; the ordering holds if
// the nu estimate lies between the references up to a 95% interval.
// SpecError if a sampled f increases, CertificateError from verify().
ComparisonReport comparison_check(const LevyKernelSpec& nu, const KernelSpec& kernel, const std::vector<double>& ts,
                                  const std::vector<TestFunction>& fs, const McConfig& cfg);

}  // namespace fracgreen
