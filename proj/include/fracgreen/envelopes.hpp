#pragma once
#include <optional>
#include <string>
#include <utility>

namespace fracgreen {

enum class Family { diffusion, stable };
enum class Regime { on_diagonal, off_diagonal, intermediate, far_tail };
// Which version of a derivative bound: global in time, or the local bounds
// for t < 1 and 1 < t < T.
enum class DerivCase { global, local_small_time, local_large_time };

const char* to_string(Family f);
const char* to_string(Regime r);
const char* to_string(DerivCase c);
Regime regime_from_string(const std::string& s);

struct RegimePoint {
    double t = 1.0;
    double r = 0.0;
    double omega = 0.0;
    Regime regime = Regime::on_diagonal;
    Family family = Family::diffusion;
    double alpha = 2.0;  // meaningful for the stable family
};

struct EnvelopeConstants {
    double c_beta_exponent = 1.0;
    double prefactor_low = 1.0;
    double prefactor_high = 1.0;
    std::optional<double> horizon_T;
    std::optional<double> globalization_rate;
    void validate() const;
};

struct EnvelopeValue {
    double value = 0.0;
    double log_value = 0.0;
    Regime branch = Regime::on_diagonal;
    EnvelopeConstants consts;
};

// Omega = r^2 t^-beta (diffusion) or r^alpha t^-beta (stable), with the
// coarse on/off-diagonal tag (Omega = 1 counts as on-diagonal).
RegimePoint compute_omega(Family family, double t, double r, double beta, std::optional<double> alpha = {});
RegimePoint point_from_omega(Family family, double t, double omega, double beta, std::optional<double> alpha = {});

// Fine regime for derivative bounds: the small-time cases split Omega >= 1
// into intermediate and far_tail.
Regime classify_derivative_regime(const RegimePoint& p, double beta, DerivCase c);
double diffusion_far_threshold(double t, double beta);  // t^{-beta (2-beta)/(1-beta)}
double stable_far_threshold(double t, double beta);     // t^{-beta}

EnvelopeValue envelope_diffusion(int d, double beta, const RegimePoint& p, const EnvelopeConstants& c);
EnvelopeValue envelope_stable(int d, double alpha, double beta, const RegimePoint& p, const EnvelopeConstants& c);
EnvelopeValue envelope_diffusion_deriv(int d, double beta, const RegimePoint& p, const EnvelopeConstants& c,
                                       DerivCase dc = DerivCase::global);
EnvelopeValue envelope_stable_deriv(int d, int k, double alpha, double beta, const RegimePoint& p,
                                    const EnvelopeConstants& c, DerivCase dc = DerivCase::global);

// (e^{-c tau} shape, e^{c tau} shape)
std::pair<double, double> globalize_local(double shape, double rate_c, double tau);

}  // namespace fracgreen
