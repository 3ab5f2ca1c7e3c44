#include "fracgreen/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracgreen/errors.hpp"
#include "fracgreen/quadrature.hpp"

namespace fracgreen {

using std::numbers::pi;

FracOrder::FracOrder(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1), got " + std::to_string(beta));
}

StableOrder::StableOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("alpha must lie in (0, 2], got " + std::to_string(alpha));
}

const char* to_string(DensityMethod m) {
    switch (m) {
        case DensityMethod::series: return "series";
        case DensityMethod::integral_rep: return "integral_rep";
        case DensityMethod::asymptotic: return "asymptotic";
    }
    return "?";
}

double stable_c_beta(double beta) { return (1.0 - beta) * std::pow(beta, beta / (1.0 - beta)); }

double log_zolotarev_a(double beta, double phi) {
    if (phi <= 0.0) return std::log(stable_c_beta(beta));
    // sin(phi) loses relative accuracy near pi; use the reflected angle
    const double s = phi > 0.5 * pi ? std::sin(pi - phi) : std::sin(phi);
    const double sb = std::sin(beta * phi);
    const double s1b = std::sin((1.0 - beta) * phi);
    return (std::log(sb) - std::log(s)) / (1.0 - beta) + std::log(s1b) - std::log(sb);
}

double zolotarev_a(double beta, double phi) { return std::exp(log_zolotarev_a(beta, phi)); }

double log_stable_density_series(double beta, double x) {
    // w(x) = x^{-1-beta} * sum_k c_k y^{k-1}, y = x^{-beta}
    const double ly = -beta * std::log(x);
    double sum = 0.0, comp = 0.0, biggest = 0.0;
    for (int k = 1; k < 5000; ++k) {
        const double sn = std::sin(pi * k * beta);
        const double lmag = std::lgamma(k * beta + 1.0) - std::lgamma(k + 1.0) + (k - 1) * ly;
        const double term = ((k % 2) ? 1.0 : -1.0) * sn * std::exp(lmag) / pi;
        // Kahan summation
        const double yk = term - comp;
        const double tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
        biggest = std::max(biggest, std::abs(term));
        if (k > 5 && std::exp(lmag) < 1e-18 * std::abs(sum) && lmag < std::log(biggest) - 5) break;
    }
    if (!(sum > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(sum) - (1.0 + beta) * std::log(x);
}

namespace {

// phi in [lo, hi] where the monotone log a(phi) hits `target`.
double phi_for_log_a(double beta, double target, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
        const double m = 0.5 * (lo + hi);
        if (log_zolotarev_a(beta, m) < target) lo = m;
        else hi = m;
    }
    return 0.5 * (lo + hi);
}

// Breakpoints in phi for an integrand exp(m log a - K (a - c)), m in {0,1}:
// the peak and a ladder of level sets on each side, cut where the integrand
// has dropped by e^{-40}.
std::vector<double> zolotarev_breaks(double beta, double K, double m) {
    const double c = stable_c_beta(beta);
    const double lc = std::log(c);
    auto ell = [&](double la) { return m * la - K * (std::exp(la) - c); };
    const double la_peak = (m > 0.0 && 1.0 / K > c) ? -std::log(K) : lc;
    const double top = ell(la_peak);
    // solve ell(la) = top - drop on the right of the peak (ell decreasing there)
    auto right_level = [&](double drop) {
        double lo = la_peak, hi = la_peak + 1.0;
        while (ell(hi) > top - drop) hi = la_peak + 2.0 * (hi - la_peak);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (ell(mid) > top - drop) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    std::vector<double> br{0.0};
    double phi_peak = 0.0;
    if (la_peak > lc) {
        phi_peak = phi_for_log_a(beta, la_peak, 0.0, pi);
        for (double drop : {15.0, 5.0, 1.0}) {
            // left side: ell increases in la on [lc, la_peak]
            if (ell(lc) < top - drop) {
                double lo = lc, hi = la_peak;
                for (int i = 0; i < 200; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    if (ell(mid) < top - drop) lo = mid;
                    else hi = mid;
                }
                br.push_back(phi_for_log_a(beta, 0.5 * (lo + hi), 0.0, phi_peak));
            }
        }
        br.push_back(phi_peak);
    }
    for (double drop : {1.0, 5.0, 15.0, 40.0}) {
        const double la = right_level(drop);
        br.push_back(phi_for_log_a(beta, la, phi_peak, pi));
    }
    std::vector<double> out;
    for (double b : br)
        if (out.empty() || b > out.back() + 1e-15) out.push_back(b);
    if (out.size() < 2) out.push_back(pi);
    return out;
}

}  // namespace

namespace {
constexpr double kAsymptoticK = 1e8;
}

double log_stable_density_integral(double beta, double x) {
    const double K = std::pow(x, -beta / (1.0 - beta));
    const double c = stable_c_beta(beta);
    auto br = zolotarev_breaks(beta, K, 1.0);
    auto f = [&](double phi) {
        if (phi >= pi) return 0.0;
        const double la = log_zolotarev_a(beta, phi);
        return std::exp(la - K * std::max(std::exp(la) - c, 0.0));
    };
    QuadOptions o;
    o.abs_tol = 0.0;
    // K (a - c) carries rounding noise of order K eps
    o.rel_tol = std::max(1e-13, 1e-15 * K);
    QuadResult r = integrate(f, br, o);
    return std::log(beta / ((1.0 - beta) * pi)) - std::log(x) / (1.0 - beta) - K * c + std::log(r.value);
}

double log_stable_density_small_x(double beta, double x) {
    const double c = stable_c_beta(beta);
    return std::log(std::pow(beta, 1.0 / (2.0 * (1.0 - beta))) / std::sqrt(2.0 * pi * (1.0 - beta))) -
           (2.0 - beta) / (2.0 * (1.0 - beta)) * std::log(x) - c * std::pow(x, -beta / (1.0 - beta));
}

StableDensityEval stable_density_eval(FracOrder beta, double x, const StableDensityOptions& opt) {
    if (!(x > 0.0)) throw DomainError("stable_density: x must be positive");
    StableDensityEval e;
    e.x = x;
    if (std::isinf(x)) {
        e.log_value = -std::numeric_limits<double>::infinity();
        e.value = 0.0;
        return e;
    }
    if (x < opt.switch_point && std::pow(x, -beta / (1.0 - beta)) > kAsymptoticK) {
        // a(phi) - c cancels below double resolution near the peak; the
        // leading Laplace term is accurate to O(1/K) here
        e.method = DensityMethod::asymptotic;
        e.log_value = log_stable_density_small_x(beta, x);
    } else if (x >= opt.switch_point) {
        e.method = DensityMethod::series;
        e.log_value = log_stable_density_series(beta, x);
    } else {
        e.method = DensityMethod::integral_rep;
        e.log_value = log_stable_density_integral(beta, x);
    }
    e.value = std::exp(e.log_value);
    return e;
}

double log_stable_density(FracOrder beta, double x) { return stable_density_eval(beta, x).log_value; }
double stable_density(FracOrder beta, double x) { return stable_density_eval(beta, x).value; }

double log_stable_cdf(FracOrder beta, double x) {
    if (!(x > 0.0)) throw DomainError("stable_cdf: x must be positive");
    const double b = beta.value();
    const double K = std::pow(x, -b / (1.0 - b));
    const double c = stable_c_beta(b);
    auto br = zolotarev_breaks(b, K, 0.0);
    auto f = [&](double phi) {
        if (phi >= pi) return 0.0;
        return std::exp(-K * std::max(zolotarev_a(b, phi) - c, 0.0));
    };
    QuadOptions o;
    o.abs_tol = 0.0;
    // K (a - c) carries rounding noise of order K eps
    o.rel_tol = std::max(1e-13, 1e-15 * K);
    QuadResult r = integrate(f, br, o);
    return std::log(r.value / pi) - K * c;
}

StableEnvelopeConstants StableEnvelopeConstants::from(FracOrder beta) {
    return {stable_c_beta(beta.value()), 1.0};
}

double log_stable_density_envelope_shape(double beta, double x) {
    const double lp = (-1.0 - beta) * std::log(x);
    const double lf = -(2.0 - beta) / (2.0 * (1.0 - beta)) * std::log(x) -
                      stable_c_beta(beta) * std::pow(x, -beta / (1.0 - beta));
    if (beta < 0.5) return std::min(lp, lf);
    return x > 1.0 ? lp : lf;
}

std::pair<double, double> stable_density_envelope(FracOrder beta, double x, const StableEnvelopeConstants& c) {
    if (!(x > 0.0)) throw DomainError("stable_density_envelope: x must be positive");
    const double s = std::exp(log_stable_density_envelope_shape(beta.value(), x));
    return {s / c.c_tilde, s * c.c_tilde};
}

double log_subordinator_density(FracOrder beta, double r, double s) {
    if (!(r > 0.0) || !(s > 0.0)) throw DomainError("subordinator_density: arguments must be positive");
    const double lr = std::log(r) / beta.value();
    return -lr + log_stable_density(beta, s * std::exp(-lr));
}

double subordinator_density(FracOrder beta, double r, double s) {
    return std::exp(log_subordinator_density(beta, r, s));
}

double ml_pz(FracOrder beta, double s) {
    if (s > 0.0) throw DomainError("ml_pz: argument must be nonpositive");
    if (s == 0.0) return 1.0;
    const double b = beta.value();
    const double c = stable_c_beta(b);
    // w(e^v) e^v is below e^{-800} left of v_lo; the right tail decays like e^{-beta v}
    const double v_lo = -(1.0 - b) / b * std::log(800.0 / c);
    const double v_hi = 36.0 / b;
    std::vector<double> br;
    for (double v = v_lo; v < v_hi; v += 2.0) br.push_back(v);
    br.push_back(0.0);
    br.push_back(v_hi);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    auto f = [&](double v) -> LogValue {
        const double u = std::exp(v);
        return {s * std::exp(-b * v) + log_stable_density(beta, u) + v, 1};
    };
    QuadOptions o;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-11;
    LogQuadResult r = integrate_log(f, br, o);
    if (!r.converged) throw AccuracyError("ml_pz: quadrature did not converge", r.value(), r.rel_error);
    // tail of w beyond e^{v_hi}, with exp(s u^{-beta}) ~ 1 there
    const double c1 = b / std::tgamma(1.0 - b);
    return r.value() + c1 / b * std::exp(-b * v_hi);
}

double potential_density(FracOrder beta, double lambda, double t) {
    if (!(t > 0.0)) throw DomainError("potential_density: t must be positive");
    if (!(lambda >= 0.0)) throw DomainError("potential_density: lambda must be nonnegative");
    const double b = beta.value();
    const double tb = std::pow(t, b);
    return b * tb / t * ml_series_derivative(beta, -lambda * tb);
}

}  // namespace fracgreen
