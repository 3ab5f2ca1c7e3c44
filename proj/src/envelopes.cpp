#include "fracgreen/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fracgreen/errors.hpp"

namespace fracgreen {

const char* to_string(Family f) { return f == Family::diffusion ? "diffusion" : "stable"; }

const char* to_string(Regime r) {
    switch (r) {
        case Regime::on_diagonal: return "on_diagonal";
        case Regime::off_diagonal: return "off_diagonal";
        case Regime::intermediate: return "intermediate";
        case Regime::far_tail: return "far_tail";
    }
    return "?";
}

const char* to_string(DerivCase c) {
    switch (c) {
        case DerivCase::global: return "global";
        case DerivCase::local_small_time: return "local_small_time";
        case DerivCase::local_large_time: return "local_large_time";
    }
    return "?";
}

Regime regime_from_string(const std::string& s) {
    for (Regime r : {Regime::on_diagonal, Regime::off_diagonal, Regime::intermediate, Regime::far_tail})
        if (s == to_string(r)) return r;
    throw SpecError("unknown regime '" + s + "'");
}

void EnvelopeConstants::validate() const {
    if (!(c_beta_exponent > 0.0)) throw SpecError("exponential constant must be positive");
    if (!(prefactor_low > 0.0) || !(prefactor_high >= prefactor_low))
        throw SpecError("prefactors must satisfy 0 < low <= high");
    if (horizon_T && !(*horizon_T > 0.0)) throw SpecError("horizon must be positive");
    if (globalization_rate && !(*globalization_rate >= 0.0)) throw SpecError("globalization rate must be >= 0");
}

namespace {

void check_tr(double t, double r) {
    if (!(t > 0.0)) throw DomainError("time must be positive");
    if (!(r >= 0.0)) throw DomainError("distance must be nonnegative");
}

double checked_alpha(Family family, std::optional<double> alpha) {
    if (family == Family::diffusion) return 2.0;
    if (!alpha) throw SpecError("stable family needs alpha");
    if (!(*alpha > 0.0 && *alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
    return *alpha;
}

EnvelopeValue make(double logv, Regime branch, const EnvelopeConstants& c) {
    EnvelopeValue v;
    v.log_value = logv;
    v.value = std::exp(logv);
    v.branch = branch;
    v.consts = c;
    return v;
}

// log of the small-Omega shapes shared by values and derivatives:
// t^{-n beta / s} with the power/log/constant split on n vs s
double log_on_diagonal(double n, double s, double beta, double t, double omega) {
    const double lt = std::log(t);
    if (std::abs(n - s) < 1e-12) return -beta * lt + std::log(std::abs(std::log(omega)) + 1.0);
    if (n < s) return -n * beta / s * lt;
    return -n * beta / s * lt + (1.0 - n / s) * std::log(omega);
}

double log_gauss_tail(double n, double beta, double t, double omega, double C) {
    return -0.5 * n * beta * std::log(t) - 0.5 * n * (1.0 - beta) / (2.0 - beta) * std::log(omega) -
           C * std::pow(omega, 1.0 / (2.0 - beta));
}

void check_local(const RegimePoint& p, const EnvelopeConstants& c, DerivCase dc) {
    if (dc == DerivCase::global) {
        if (p.regime == Regime::intermediate || p.regime == Regime::far_tail)
            throw RegimeError("intermediate/far_tail regimes belong to the small-time local bounds");
        return;
    }
    if (!c.horizon_T) throw SpecError("local bounds need a horizon T");
    if (p.t > *c.horizon_T) throw HorizonError("time beyond the horizon T");
    if (dc == DerivCase::local_small_time && !(p.t < 1.0 || p.t == 1.0))
        throw RegimeError("small-time bounds need t <= 1");
    if (dc == DerivCase::local_large_time) {
        if (!(p.t >= 1.0)) throw RegimeError("large-time bounds need t >= 1");
        if (p.regime == Regime::intermediate || p.regime == Regime::far_tail)
            throw RegimeError("intermediate/far_tail regimes belong to the small-time local bounds");
    }
}

struct Branch {
    double logv;
    Regime r;
};

// The tag picks the branch when several apply (Omega on a boundary);
// otherwise the larger shape wins.
EnvelopeValue pick(const std::vector<Branch>& cands, Regime tag, const EnvelopeConstants& c) {
    for (const auto& b : cands)
        if (b.r == tag) return make(b.logv, b.r, c);
    auto best = *std::max_element(cands.begin(), cands.end(),
                                  [](const Branch& a, const Branch& b) { return a.logv < b.logv; });
    return make(best.logv, best.r, c);
}

Regime effective_tag(const RegimePoint& p, double beta, DerivCase dc) {
    if (dc == DerivCase::local_small_time && p.regime == Regime::off_diagonal)
        return classify_derivative_regime(p, beta, dc);
    return p.regime;
}

void check_value_tag(const RegimePoint& p) {
    if (p.regime == Regime::intermediate || p.regime == Regime::far_tail)
        throw RegimeError("intermediate/far_tail regimes only apply to small-time derivative bounds");
    if ((p.regime == Regime::on_diagonal && p.omega > 1.0) || (p.regime == Regime::off_diagonal && p.omega < 1.0))
        throw RegimeError("regime tag inconsistent with Omega");
}

void check_tag(const RegimePoint& p, double beta, DerivCase dc) {
    const Regime fine = classify_derivative_regime(p, beta, dc);
    const bool coarse_off = p.omega > 1.0;
    switch (p.regime) {
        case Regime::on_diagonal:
            if (p.omega > 1.0) throw RegimeError("regime tag inconsistent with Omega");
            break;
        case Regime::off_diagonal:
            if (p.omega < 1.0) throw RegimeError("regime tag inconsistent with Omega");
            break;
        case Regime::intermediate:
        case Regime::far_tail:
            if (!coarse_off && p.omega < 1.0) throw RegimeError("regime tag inconsistent with Omega");
            if (fine != p.regime && fine != Regime::on_diagonal) {
                // a tie at the threshold may carry either tag
                const double th = p.family == Family::diffusion ? diffusion_far_threshold(p.t, beta)
                                                                : stable_far_threshold(p.t, beta);
                if (std::abs(p.omega - th) > 1e-12 * th) throw RegimeError("regime tag inconsistent with Omega");
            }
            break;
    }
}

}  // namespace

RegimePoint compute_omega(Family family, double t, double r, double beta, std::optional<double> alpha) {
    check_tr(t, r);
    const double a = checked_alpha(family, alpha);
    RegimePoint p;
    p.t = t;
    p.r = r;
    p.family = family;
    p.alpha = a;
    p.omega = std::pow(r, a) * std::pow(t, -beta);
    p.regime = p.omega <= 1.0 ? Regime::on_diagonal : Regime::off_diagonal;
    return p;
}

RegimePoint point_from_omega(Family family, double t, double omega, double beta, std::optional<double> alpha) {
    const double a = checked_alpha(family, alpha);
    if (!(omega >= 0.0)) throw DomainError("Omega must be nonnegative");
    return compute_omega(family, t, std::pow(omega * std::pow(t, beta), 1.0 / a), beta, alpha);
}

double diffusion_far_threshold(double t, double beta) { return std::pow(t, -beta * (2.0 - beta) / (1.0 - beta)); }
double stable_far_threshold(double t, double beta) { return std::pow(t, -beta); }

Regime classify_derivative_regime(const RegimePoint& p, double beta, DerivCase c) {
    if (p.omega <= 1.0) return Regime::on_diagonal;
    if (c != DerivCase::local_small_time) return Regime::off_diagonal;
    const double th =
        p.family == Family::diffusion ? diffusion_far_threshold(p.t, beta) : stable_far_threshold(p.t, beta);
    return p.omega <= th ? Regime::intermediate : Regime::far_tail;
}

EnvelopeValue envelope_diffusion(int d, double beta, const RegimePoint& p, const EnvelopeConstants& c) {
    if (d < 1) throw DomainError("dimension must be positive");
    c.validate();
    const double on = (d == 1)   ? -0.5 * beta * std::log(p.t)
                      : (d == 2) ? -beta * std::log(p.t) + std::log(std::abs(std::log(p.omega)) + 1.0)
                                 : -0.5 * d * beta * std::log(p.t) + (1.0 - 0.5 * d) * std::log(p.omega);
    const double off = log_gauss_tail(d, beta, p.t, p.omega, c.c_beta_exponent);
    check_value_tag(p);
    if (p.omega < 1.0) return make(on, Regime::on_diagonal, c);
    if (p.omega > 1.0) return make(off, Regime::off_diagonal, c);
    return p.regime == Regime::on_diagonal ? make(on, Regime::on_diagonal, c) : make(off, Regime::off_diagonal, c);
}

EnvelopeValue envelope_stable(int d, double alpha, double beta, const RegimePoint& p, const EnvelopeConstants& c) {
    if (d < 1) throw DomainError("dimension must be positive");
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
    c.validate();
    const double on = log_on_diagonal(d, alpha, beta, p.t, p.omega);
    const double off = -d * beta / alpha * std::log(p.t) + (-1.0 - d / alpha) * std::log(p.omega);
    check_value_tag(p);
    if (p.omega < 1.0) return make(on, Regime::on_diagonal, c);
    if (p.omega > 1.0) return make(off, Regime::off_diagonal, c);
    return p.regime == Regime::on_diagonal ? make(on, Regime::on_diagonal, c) : make(off, Regime::off_diagonal, c);
}

EnvelopeValue envelope_diffusion_deriv(int d, double beta, const RegimePoint& p, const EnvelopeConstants& c,
                                       DerivCase dc) {
    if (d < 1) throw DomainError("dimension must be positive");
    c.validate();
    check_local(p, c, dc);
    check_tag(p, beta, dc);
    const double C = c.c_beta_exponent;
    const double lt = std::log(p.t);
    std::vector<Branch> cands;  // branches that apply at this Omega (several at ties)
    const double om = p.omega;
    if (dc == DerivCase::local_large_time) {
        const double lr = std::log(p.r);
        if (om <= 1.0) {
            const double on = d == 1 ? -beta * lt + std::log(std::abs(std::log(om)) + 1.0) : (1.0 - d) * lr;
            cands.push_back({on, Regime::on_diagonal});
        }
        if (om >= 1.0)
            cands.push_back({-d * (1.0 - beta) / (2.0 - beta) * lr - C * std::pow(p.r, 2.0 / (2.0 - beta)),
                             Regime::off_diagonal});
    } else {
        if (om <= 1.0) {
            const double on = d == 1 ? -beta * lt + std::log(std::abs(std::log(om)) + 1.0)
                                     : -0.5 * (d + 1) * beta * lt + (1.0 - 0.5 * (d + 1)) * std::log(om);
            cands.push_back({on, Regime::on_diagonal});
        }
        if (dc == DerivCase::global) {
            if (om >= 1.0) cands.push_back({log_gauss_tail(d + 1, beta, p.t, om, C), Regime::off_diagonal});
        } else {
            const double th = diffusion_far_threshold(p.t, beta);
            if (om >= 1.0 && om <= th)
                cands.push_back({log_gauss_tail(d + 1, beta, p.t, om, C), Regime::intermediate});
            if (om >= th) cands.push_back({log_gauss_tail(d, beta, p.t, om, C), Regime::far_tail});
        }
    }
    return pick(cands, effective_tag(p, beta, dc), c);
}

EnvelopeValue envelope_stable_deriv(int d, int k, double alpha, double beta, const RegimePoint& p,
                                    const EnvelopeConstants& c, DerivCase dc) {
    if (d < 1) throw DomainError("dimension must be positive");
    if (k < 1) throw DomainError("derivative order must be >= 1");
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
    c.validate();
    check_local(p, c, dc);
    check_tag(p, beta, dc);
    const double lt = std::log(p.t);
    const double om = p.omega;
    std::vector<Branch> cands;
    if (dc == DerivCase::local_large_time) {
        const double lr = std::log(p.r);
        if (om <= 1.0) {
            double on;
            if (std::abs(d + k - alpha) < 1e-12) on = -beta * lt + std::log(std::abs(std::log(om)) + 1.0);
            else if (d + k < alpha) on = 0.0;
            else on = (alpha - d - k) * lr;
            cands.push_back({on, Regime::on_diagonal});
        }
        if (om >= 1.0) cands.push_back({(-alpha - d) * lr, Regime::off_diagonal});
    } else {
        if (om <= 1.0) cands.push_back({log_on_diagonal(d + k, alpha, beta, p.t, om), Regime::on_diagonal});
        const double nearv = -(d + k) * beta / alpha * lt + (-1.0 - (d + k) / alpha) * std::log(om);
        const double farv = -d * beta / alpha * lt + (-1.0 - d / alpha) * std::log(om);
        if (dc == DerivCase::global) {
            if (om >= 1.0) cands.push_back({nearv, Regime::off_diagonal});
        } else {
            const double th = stable_far_threshold(p.t, beta);
            if (om >= 1.0 && om <= th) cands.push_back({nearv, Regime::intermediate});
            if (om >= th) cands.push_back({farv, Regime::far_tail});
        }
    }
    return pick(cands, effective_tag(p, beta, dc), c);
}

std::pair<double, double> globalize_local(double shape, double rate_c, double tau) {
    if (!(rate_c >= 0.0)) throw DomainError("rate must be nonnegative");
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    return {std::exp(-rate_c * tau) * shape, std::exp(rate_c * tau) * shape};
}

}  // namespace fracgreen
