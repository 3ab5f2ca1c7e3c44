#include "fracgreen/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracgreen/errors.hpp"

namespace fracgreen {

double log_inverse_subordinator_density(FracOrder beta, double t, double tau) {
    if (!(t > 0.0) || !(tau > 0.0)) throw DomainError("inverse subordinator density needs t, tau > 0");
    const double b = beta.value();
    const double lx = std::log(t) - std::log(tau) / b;
    return std::log(t / b) - (1.0 + 1.0 / b) * std::log(tau) + log_stable_density(beta, std::exp(lx));
}

double inverse_subordinator_density(FracOrder beta, double t, double tau) {
    return std::exp(log_inverse_subordinator_density(beta, t, tau));
}

GreenEvaluation subordinate(const std::function<LogValue(double)>& base, FracOrder beta, double t,
                            const SubordinationOptions& opt) {
    if (!(t > 0.0)) throw DomainError("time must be positive");
    const double b = beta.value();
    const double lt = std::log(t);
    const double ninf = -std::numeric_limits<double>::infinity();
    auto L = [&](double v) -> LogValue {
        const LogValue B = base(std::exp(b * (lt - v)));
        if (B.sign == 0 || !std::isfinite(B.log_abs)) return {};
        return {B.log_abs + log_stable_density(beta, std::exp(v)) + v, B.sign};
    };
    struct Sample {
        double v;
        LogValue f;
    };
    std::vector<Sample> scan;
    const double h = opt.scan_step;
    // w(e^v) e^v < e^{-800} below v0
    const double v0 = -(1.0 - b) / b * std::log(800.0 / stable_c_beta(b));
    double peak = ninf, v_peak = v0;
    auto level = [](const LogValue& f) { return f.sign == 0 ? -std::numeric_limits<double>::infinity() : f.log_abs; };
    bool capped = false;
    for (double v = v0;; v += h) {
        if (v > opt.v_cap) {
            capped = true;
            break;
        }
        const LogValue f = L(v);
        scan.push_back({v, f});
        if (level(f) > peak) {
            peak = level(f);
            v_peak = v;
        }
        // stop after 2 units of v entirely below the cut, past the peak
        const int m = static_cast<int>(std::ceil(2.0 / h));
        if (std::isfinite(peak) && v > v_peak + 2.0 && static_cast<int>(scan.size()) > m) {
            bool below = true;
            for (int i = 0; i < m && below; ++i) {
                const auto& s = scan[scan.size() - 1 - i];
                below = level(s.f) < peak - opt.cut;
                if (i > 0 && level(s.f) < level(scan[scan.size() - i].f)) below = false;  // still must be decreasing
            }
            if (below) break;
        }
    }
    GreenEvaluation out;
    if (!std::isfinite(peak)) {
        out.value = 0.0;
        out.log_abs = ninf;
        out.sign = 0;
        return out;
    }
    // extend to the left if the scan began inside the support
    while (level(scan.front().f) >= peak - opt.cut && scan.front().v > -opt.v_cap) {
        const double v = scan.front().v - h;
        scan.insert(scan.begin(), {v, L(v)});
        if (level(scan.front().f) > peak) {
            peak = level(scan.front().f);
            v_peak = v;
        }
    }
    std::size_t ia = 0, ib = scan.size() - 1;
    while (ia + 1 < scan.size() && level(scan[ia + 1].f) < peak - opt.cut) ++ia;
    while (ib > ia + 1 && level(scan[ib - 1].f) < peak - opt.cut) --ib;
    std::vector<double> br;
    for (std::size_t i = ia; i <= ib; i += 4) br.push_back(scan[i].v);
    if (br.back() < scan[ib].v) br.push_back(scan[ib].v);
    if (0.0 > br.front() && 0.0 < br.back()) br.push_back(0.0);
    if (v_peak > br.front() && v_peak < br.back()) br.push_back(v_peak);
    // A peak much narrower than the scan step would leave the quadrature
    // hunting inside one panel; locate it and add breaks at its own scale.
    std::size_t ip = 0;
    while (ip < scan.size() && scan[ip].v != v_peak) ++ip;
    if (ip > 0 && ip + 1 < scan.size() &&
        std::min(level(scan[ip - 1].f), level(scan[ip + 1].f)) < peak - 2.0) {
        auto lv = [&](double v) { return level(L(v)); };
        double a = v_peak - h, c = v_peak + h;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = c - g * (c - a), x2 = a + g * (c - a), f1 = lv(x1), f2 = lv(x2);
        for (int it = 0; it < 60 && c - a > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (c - a);
                f2 = lv(x2);
            } else {
                c = x2;
                x2 = x1;
                f2 = f1;
                x1 = c - g * (c - a);
                f1 = lv(x1);
            }
        }
        const double vs = 0.5 * (a + c), top = lv(vs);
        if (std::isfinite(top)) {
            peak = std::max(peak, top);
            br.push_back(vs);
            for (int side : {-1, 1}) {
                // distance at which the integrand is down by one e-fold
                double lo = 0.0, hi = 2.0 * h;
                for (int it = 0; it < 50; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (lv(vs + side * mid) > top - 1.0 ? lo : hi) = mid;
                }
                for (double k = 1.0; k * hi < 2.0 * h; k *= 2.0) br.push_back(vs + side * k * hi);
            }
            br.erase(std::remove_if(br.begin(), br.end(),
                                    [&](double v) { return v < scan[ia].v || v > scan[ib].v; }),
                     br.end());
        }
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    if (br.size() < 2) br.push_back(br.front() + h);

    QuadOptions qo;
    qo.rel_tol = opt.rel_tol;
    qo.abs_tol = 1e-14;
    qo.max_intervals = 4000;
    LogQuadResult r = integrate_log(L, br, qo);

    double tail = 0.0;
    if (capped) {
        // power-law panel: continue the last two units at their mean decay rate
        const auto& last = scan.back();
        const auto& prev = scan[scan.size() - 1 - static_cast<std::size_t>(std::ceil(2.0 / h))];
        const double gamma = (level(prev.f) - level(last.f)) / (last.v - prev.v);
        if (!(gamma > 0.02))
            throw SingularPointError("subordination integral diverges (on-diagonal singularity)");
        tail = last.f.sign * std::exp(level(last.f) - r.log_abs) / gamma;
    }
    if (!r.converged)
        throw AccuracyError("subordination quadrature did not converge", r.value(), r.rel_error);
    const double scaled = r.sign + tail;  // in units of exp(r.log_abs)
    out.sign = scaled > 0 ? 1 : (scaled < 0 ? -1 : 0);
    out.log_abs = r.log_abs + std::log(std::abs(scaled));
    out.value = out.sign * std::exp(out.log_abs);
    out.rel_error = r.rel_error;
    return out;
}

namespace {

void check_request(const FracGreenRequest& req) {
    FracOrder beta(req.beta);
    (void)beta;
    if (!(req.t > 0.0)) throw DomainError("time must be positive");
    if (req.derivative_order < 0 || req.derivative_order > req.kernel.max_derivative())
        throw CapabilityError("derivative order beyond the kernel's capability");
    if (req.derivative_order > 0 && req.kernel.family() == KernelFamily::anisotropic_stable_2d)
        throw CapabilityError("anisotropic kernel derivatives are not implemented");
    if (static_cast<int>(req.x.size()) != req.kernel.dim() || static_cast<int>(req.y.size()) != req.kernel.dim())
        throw ShapeError("point dimension does not match the kernel");
}

}  // namespace

GreenEvaluation evaluate_frac_green(const FracGreenRequest& req, const SubordinationOptions& opt) {
    check_request(req);
    if (req.kernel.family() == KernelFamily::variable_diffusion_1d) {
        Fd1dSubordinator sub(req.kernel, FracOrder(req.beta), req.y[0], {req.x[0]}, req.derivative_order, opt);
        return sub.evaluate(req.t, 0);
    }
    const KernelSpec& k = req.kernel;
    auto base = [&](double tau) { return kernel_log_value(k, tau, req.x, req.y, req.derivative_order); };
    return subordinate(base, FracOrder(req.beta), req.t, opt);
}

double frac_green(const FracGreenRequest& req) {
    if (req.derivative_order != 0) throw SpecError("frac_green evaluates values; use frac_green_derivative");
    return evaluate_frac_green(req).value;
}

double frac_green_derivative(const FracGreenRequest& req) {
    if (req.derivative_order < 1) throw SpecError("frac_green_derivative needs derivative_order >= 1");
    return evaluate_frac_green(req).value;
}

// --- fd1d pathway -------------------------------------------------------------

Fd1dSubordinator::Fd1dSubordinator(const KernelSpec& spec, FracOrder beta, double y, std::vector<double> xs, int k,
                                   const SubordinationOptions& opt)
    : spec_(spec), beta_(beta), y_(y), xs_(std::move(xs)), k_(k) {
    if (spec.family() != KernelFamily::variable_diffusion_1d) throw SpecError("needs a variable_diffusion_1d spec");
    if (k < 0 || k > 2) throw CapabilityError("fd1d derivatives are available up to order 2");
    const Fd1dSolver& s = spec.fd1d();
    const double tmin = s.options().parametrix_cells * s.spacing() * s.spacing() / s.a_min();
    const double tmax = s.horizon();
    if (!(tmax > tmin)) throw SpecError("fd1d horizon is below the resolvable base time");
    int n = static_cast<int>(std::ceil(std::log(tmax / tmin) * opt.fd1d_points_per_efold)) + 1;
    if (n % 2 == 0) ++n;  // Simpson needs an odd count
    taus_.resize(n);
    for (int j = 0; j < n; ++j) taus_[j] = tmin * std::exp(std::log(tmax / tmin) * j / (n - 1));
    taus_.back() = tmax;
    table_.assign(xs_.size(), std::vector<double>(n, 0.0));
    s.march(
        taus_, y_,
        [&](std::size_t j, const std::vector<double>& u) {
            for (std::size_t i = 0; i < xs_.size(); ++i) table_[i][j] = s.sample(u, xs_[i], k_);
        },
        1.0 / opt.fd1d_points_per_efold);
}

GreenEvaluation Fd1dSubordinator::evaluate(double t, std::size_t i) const {
    if (!(t > 0.0)) throw DomainError("time must be positive");
    const Fd1dSolver& s = spec_.fd1d();
    const int n = static_cast<int>(taus_.size());
    const double ds = std::log(taus_.back() / taus_.front()) / (n - 1);
    // Simpson in s = log tau
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        const double lr = log_inverse_subordinator_density(beta_, t, taus_[j]) + std::log(taus_[j]);
        acc += w * table_[i][j] * std::exp(lr);
    }
    acc *= ds / 3.0;
    // below tau_min: frozen-coefficient Gaussian at the source
    const double a = s.a().f(y_);
    const double dx = xs_[i] - y_;
    auto P = [&](double sl) -> LogValue {
        const double tau = std::exp(sl);
        const double lg = -0.5 * std::log(4.0 * std::numbers::pi * a * tau) - dx * dx / (4.0 * a * tau);
        double f = 1.0;
        if (k_ == 1) f = -dx / (2.0 * a * tau);
        if (k_ == 2) f = dx * dx / (4.0 * a * a * tau * tau) - 1.0 / (2.0 * a * tau);
        LogValue lf = log_value_of(f);
        if (lf.sign == 0) return {};
        return {lg + lf.log_abs + log_inverse_subordinator_density(beta_, t, tau) + sl, lf.sign};
    };
    const double s0 = std::log(taus_.front());
    std::vector<double> br;
    for (double d = 80.0; d > 0.0; d -= 5.0) br.push_back(s0 - d);
    br.push_back(s0);
    QuadOptions qo;
    qo.rel_tol = 1e-10;
    qo.abs_tol = 1e-14;
    LogQuadResult r = integrate_log(P, br, qo);
    acc += r.value();
    GreenEvaluation out;
    out.value = acc;
    LogValue lv = log_value_of(acc);
    out.log_abs = lv.log_abs;
    out.sign = lv.sign;
    out.truncated_mass =
        std::exp(log_stable_cdf(beta_, std::exp(std::log(t) - std::log(taus_.back()) / beta_.value())));
    return out;
}

// --- frac_solve ---------------------------------------------------------------

double frac_solve(const KernelSpec& kernel, FracOrder beta, double t, const SampledFunction1d& Y, double x,
                  double coverage) {
    if (kernel.dim() != 1) throw CapabilityError("frac_solve supports one-dimensional kernels");
    if (!(t > 0.0)) throw DomainError("time must be positive");
    const std::size_t n = Y.y.size();
    if (n < 2 || Y.values.size() != n) throw ShapeError("sampled function needs matching y and values");
    for (std::size_t j = 1; j < n; ++j)
        if (!(Y.y[j] > Y.y[j - 1])) throw ShapeError("sample grid must be increasing");
    std::vector<double> g(n);
    if (kernel.family() == KernelFamily::variable_diffusion_1d) {
        // G(t, x, y_j) for all y_j needs one march per source
        for (std::size_t j = 0; j < n; ++j) {
            Fd1dSubordinator sub(kernel, beta, Y.y[j], {x});
            g[j] = sub.evaluate(t, 0).value;
        }
    } else {
        // radial and decreasing in |x - y|: walk outward over distinct
        // distances and stop once the kernel is negligible
        std::vector<std::size_t> order(n);
        for (std::size_t j = 0; j < n; ++j) order[j] = j;
        auto dist = [&](std::size_t j) { return std::abs(x - Y.y[j]); };
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
        FracGreenRequest req{kernel, beta.value(), t, {x}, {0.0}, 0};
        double last_r = -1.0, last_g = 0.0, peak = 0.0;
        bool negligible = false;
        for (std::size_t j : order) {
            const double r = dist(j);
            if (negligible) {
                g[j] = 0.0;
                continue;
            }
            if (last_r < 0.0 || r - last_r > 1e-12 * std::max(1.0, r)) {
                req.y = {x + r};
                last_g = evaluate_frac_green(req).value;
                last_r = r;
                peak = std::max(peak, last_g);
                negligible = last_g < 1e-17 * peak;
            }
            g[j] = last_g;
        }
    }
    double mass = 0.0, acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double w = 0.5 * (Y.y[j + 1] - Y.y[j]);
        mass += w * (g[j] + g[j + 1]);
        acc += w * (g[j] * Y.values[j] + g[j + 1] * Y.values[j + 1]);
    }
    if (mass < coverage)
        throw CoverageError("sample grid captures only " + std::to_string(mass) + " of the kernel mass");
    return acc;
}

}  // namespace fracgreen
