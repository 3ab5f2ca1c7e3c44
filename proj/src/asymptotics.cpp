#include "fracgreen/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracgreen/errors.hpp"
#include "fracgreen/quadrature.hpp"

namespace fracgreen {

void LaplaceIntegrandSpec::validate() const {
    if (!(a > 0.0)) throw DomainError("a must be positive");
    if (!(c > 0.0)) throw DomainError("c must be positive");
    if (!std::isfinite(N)) throw DomainError("N must be finite");
    if (!(Omega >= 1.0) || !std::isfinite(Omega)) throw DomainError("Omega must be >= 1");
}

namespace {
void check_lambda(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
}
double log_abs_or_throw(double g) {
    if (g == 0.0) return -INFINITY;
    return std::log(std::abs(g));
}
}  // namespace

double log_laplace_boundary(double g, double h, double hp, double lambda) {
    check_lambda(lambda);
    if (!(hp > 0.0)) throw AssumptionError("h'(b) must be positive at the endpoint");
    return log_abs_or_throw(g) - std::log(lambda * hp) - lambda * h;
}

double laplace_boundary(double g, double h, double hp, double lambda) {
    const double l = log_laplace_boundary(g, h, hp, lambda);
    return std::copysign(std::exp(l), g);
}

double log_laplace_interior(double g, double h, double hpp, double lambda) {
    check_lambda(lambda);
    if (!(hpp > 0.0)) throw AssumptionError("h'' must be positive at the interior minimum");
    return log_abs_or_throw(g) + 0.5 * std::log(2.0 * std::numbers::pi / (lambda * hpp)) - lambda * h;
}

double laplace_interior(double g, double h, double hpp, double lambda) {
    const double l = log_laplace_interior(g, h, hpp, lambda);
    return std::copysign(std::exp(l), g);
}

LaplaceConstants laplace_constants(double N, double a, double c) {
    LaplaceConstants k;
    const double ac = a * c;
    k.C1 = std::pow(ac, (2.0 * (N + 1.0) - 1.0) / (2.0 * (a + 1.0))) * std::sqrt(2.0 * std::numbers::pi / (a + 1.0));
    k.C2 = std::pow(ac, 1.0 / (a + 1.0)) * (1.0 + 1.0 / a);
    k.omega_power = -(2.0 * (N + 1.0) + a) / (2.0 * (a + 1.0));
    k.decay_power = a / (a + 1.0);
    return k;
}

double prop_a1_asymptotic(const LaplaceIntegrandSpec& s) {
    s.validate();
    const auto k = laplace_constants(s.N, s.a, s.c);
    return std::log(k.C1) + k.omega_power * std::log(s.Omega) - k.C2 * std::pow(s.Omega, k.decay_power);
}

double oracle_J(const LaplaceIntegrandSpec& s) {
    s.validate();
    // w = e^v: integrand exp((N+1) v - Omega e^v - c e^{-a v}) on v < 0
    const double N1 = s.N + 1.0, a = s.a, c = s.c, Om = s.Omega;
    auto phi = [=](double v) { return N1 * v - Om * std::exp(v) - c * std::exp(-a * v); };
    const double vs = std::min(0.0, -std::log(Om / (a * c)) / (a + 1.0));
    const double curv = Om * std::exp(vs) + c * a * a * std::exp(-a * vs);
    const double sig = 1.0 / std::sqrt(curv);
    const double peak = phi(vs);
    // left end: the c e^{-av} term alone has pushed the integrand 800 below the peak
    double vlo = vs - sig;
    while (phi(vlo) > peak - 800.0) vlo -= std::max(sig, 0.5 * (vs - vlo));

    std::vector<double> br{vlo};
    for (int j = -5; j <= 5; ++j) {
        const double v = vs + 0.5 * j * sig;  // doubled resolution in the saddle window
        if (v > vlo && v < 0.0) br.push_back(v);
    }
    for (double v = vs + 3.0 * sig; v < 0.0; v += std::max(3.0 * sig, 0.5)) br.push_back(v);
    br.push_back(0.0);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    QuadOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-300;
    const auto r = integrate_log([&](double v) { return LogValue{phi(v), 1}; }, br, opt);
    if (!r.converged || r.sign <= 0) throw AccuracyError("J(Omega) quadrature did not converge", r.log_abs, r.rel_error);
    return r.log_abs;
}

}  // namespace fracgreen
