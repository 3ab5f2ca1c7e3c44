#pragma once
#include <utility>

namespace fracgreen {

// Time order beta in (0, 1).
class FracOrder {
public:
    explicit FracOrder(double beta);
    double value() const noexcept { return beta_; }
    operator double() const noexcept { return beta_; }

private:
    double beta_;
};

// Space order alpha in (0, 2]; alpha = 2 is the Gaussian limit.
class StableOrder {
public:
    explicit StableOrder(double alpha);
    double value() const noexcept { return alpha_; }
    operator double() const noexcept { return alpha_; }

private:
    double alpha_;
};

enum class DensityMethod { series, integral_rep, asymptotic };
const char* to_string(DensityMethod m);

struct StableDensityOptions {
    double switch_point = 1.0;
    double rel_tol = 1e-12;
};

struct StableDensityEval {
    double x = 0.0;
    double value = 0.0;
    double log_value = 0.0;
    DensityMethod method = DensityMethod::series;
};

// w_beta, the density with Laplace transform exp(-s^beta).
StableDensityEval stable_density_eval(FracOrder beta, double x, const StableDensityOptions& opt = {});
double stable_density(FracOrder beta, double x);
double log_stable_density(FracOrder beta, double x);

// Individual methods, for agreement checks. The series is convergent for all
// x > 0 but loses digits for small x.
double log_stable_density_series(double beta, double x);
double log_stable_density_integral(double beta, double x);
// Leading small-x behaviour from the Laplace method on the integral form.
double log_stable_density_small_x(double beta, double x);

// P(S <= x) for S ~ w_beta, in log form.
double log_stable_cdf(FracOrder beta, double x);

// Zolotarev's function a(phi) on [0, pi); a(0) = c_beta.
double zolotarev_a(double beta, double phi);
double log_zolotarev_a(double beta, double phi);

struct StableEnvelopeConstants {
    double c_beta = 0.0;
    double c_tilde = 1.0;
    static StableEnvelopeConstants from(FracOrder beta);
};

double stable_c_beta(double beta);

// (lower, upper) envelope shapes; they differ only through c_tilde.
std::pair<double, double> stable_density_envelope(FracOrder beta, double x, const StableEnvelopeConstants& c);
double log_stable_density_envelope_shape(double beta, double x);

// G_beta(r, s) = r^{-1/beta} w_beta(s r^{-1/beta}).
double subordinator_density(FracOrder beta, double r, double s);
double log_subordinator_density(FracOrder beta, double r, double s);

struct MLSeriesOptions {
    double radius_guard = 50.0;
    // bits * terms; the default allows roughly 10 s of work
    double cost_budget = 2e10;
};

// E_beta(z) by its power series in multiprecision arithmetic.
double ml_series(FracOrder beta, double z, const MLSeriesOptions& opt = {});
// E_beta'(z) by the differentiated series.
double ml_series_derivative(FracOrder beta, double z, const MLSeriesOptions& opt = {});

// E_beta(s) for s <= 0 from the subordination integral against w_beta.
double ml_pz(FracOrder beta, double s);

// U_lambda(t) = beta t^{beta-1} E_beta'(-lambda t^beta).
double potential_density(FracOrder beta, double lambda, double t);

}  // namespace fracgreen
