#include <algorithm>
#include <cmath>

#include "fracgreen/errors.hpp"
#include "fracgreen/kernels.hpp"

namespace fracgreen {

Fd1dSolver::Fd1dSolver(Coefficient a, Coefficient b, Coefficient c, double horizon, const Fd1dOptions& opt)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), T_(horizon), opt_(opt) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw SpecError("fd1d horizon must be positive and finite");
    if (!(opt.h > 0.0) || !(opt.dt > 0.0)) throw SpecError("fd1d resolution must be positive");
    if (!a_.f || !b_.f || !c_.f) throw SpecError("fd1d coefficients must be set");
    h_ = opt.h;
    // sample a on a coarse window to size the domain, then again on the grid
    a_max_ = 0.0;
    for (double x = -50.0; x <= 50.0; x += 0.01) a_max_ = std::max(a_max_, a_.f(x));
    const double core = std::sqrt(4.0 * a_max_ * T_ * opt.tail_log);
    const double margin = 5.0;
    const int half = static_cast<int>(std::ceil((core + margin) / h_));
    L_ = half * h_;
    n_ = 2 * half + 1;
    lo_.assign(n_, 0.0);
    di_.assign(n_, 0.0);
    up_.assign(n_, 0.0);
    a_min_ = std::numeric_limits<double>::infinity();
    a_max_ = 0.0;
    double prev_a = a_.f(node(0));
    double max_slope = 0.0;
    for (int i = 0; i < n_; ++i) {
        const double x = node(i);
        const double av = a_.f(x), bv = b_.f(x), cv = c_.f(x);
        if (!std::isfinite(av) || !std::isfinite(bv) || !std::isfinite(cv))
            throw InvariantError("fd1d coefficients must be finite");
        a_min_ = std::min(a_min_, av);
        a_max_ = std::max(a_max_, av);
        if (i > 0) max_slope = std::max(max_slope, std::abs(av - prev_a) / h_);
        prev_a = av;
        lo_[i] = av / (h_ * h_) - bv / (2.0 * h_);
        di_[i] = -2.0 * av / (h_ * h_) + cv;
        up_[i] = av / (h_ * h_) + bv / (2.0 * h_);
    }
    if (!(a_min_ > 0.0)) throw InvariantError("fd1d diffusion coefficient must be bounded away from 0");
    if (!std::isfinite(max_slope) || max_slope > 1e6) throw InvariantError("fd1d diffusion coefficient must be C^1");
    // LU of I - dt/2 A for the default step (Thomas form)
    const double th = 0.5 * opt_.dt;
    fac_c_.assign(n_, 0.0);
    fac_m_.assign(n_, 1.0);
    for (int i = 1; i < n_ - 1; ++i) {
        const double l = -th * lo_[i], dd = 1.0 - th * di_[i], u = -th * up_[i];
        const double m = dd - (i > 1 ? l * fac_c_[i - 1] : 0.0);
        fac_m_[i] = m;
        fac_c_[i] = u / m;
    }
}

void Fd1dSolver::step(std::vector<double>& u, double dt, bool implicit_euler, Scratch& w) const {
    // (I - theta dt A) u_new = (I + (1 - theta) dt A) u, theta = 1/2 (CN) or 1 (BE)
    const double th = implicit_euler ? dt : 0.5 * dt;
    const double ex = implicit_euler ? 0.0 : 0.5 * dt;
    std::vector<double>& rhs = w.rhs;
    std::vector<double>& cp = w.cp;
    for (int i = 1; i < n_ - 1; ++i)
        rhs[i] = u[i] + ex * (lo_[i] * u[i - 1] + di_[i] * u[i] + up_[i] * u[i + 1]);
    for (int i = 1; i < n_ - 1; ++i) {
        const double l = -th * lo_[i], dd = 1.0 - th * di_[i], uu = -th * up_[i];
        const double m = dd - (i > 1 ? l * cp[i - 1] : 0.0);
        cp[i] = uu / m;
        rhs[i] = (rhs[i] - (i > 1 ? l * rhs[i - 1] : 0.0)) / m;
    }
    u[n_ - 1] = 0.0;
    u[0] = 0.0;
    for (int i = n_ - 2; i >= 1; --i) u[i] = rhs[i] - (i < n_ - 2 ? cp[i] * u[i + 1] : 0.0);
}

void Fd1dSolver::step_cached(std::vector<double>& u, Scratch& w) const {
    const double th = 0.5 * opt_.dt;
    std::vector<double>& rhs = w.rhs;
    for (int i = 1; i < n_ - 1; ++i)
        rhs[i] = u[i] + th * (lo_[i] * u[i - 1] + di_[i] * u[i] + up_[i] * u[i + 1]);
    for (int i = 1; i < n_ - 1; ++i) {
        const double l = -th * lo_[i];
        rhs[i] = (rhs[i] - (i > 1 ? l * rhs[i - 1] : 0.0)) / fac_m_[i];
    }
    u[n_ - 1] = 0.0;
    u[0] = 0.0;
    for (int i = n_ - 2; i >= 1; --i) u[i] = rhs[i] - (i < n_ - 2 ? fac_c_[i] * u[i + 1] : 0.0);
}

void Fd1dSolver::march(const std::vector<double>& times, double y,
                       const std::function<void(std::size_t, const std::vector<double>&)>& visit,
                       double step_fraction) const {
    if (std::abs(y) > L_ - 5.0 + 1e-12) throw DomainError("fd1d: source point outside the computational window");
    std::vector<double> u(n_, 0.0);
    // discrete unit mass, split linearly between the two nearest nodes
    const double pos = (y + L_) / h_;
    const int i0 = static_cast<int>(std::floor(pos));
    const double f = pos - i0;
    u[i0] += (1.0 - f) / h_;
    if (f > 0.0) u[i0 + 1] += f / h_;

    Scratch w{std::vector<double>(n_, 0.0), std::vector<double>(n_, 0.0)};
    double now = 0.0;
    bool started = false;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        if (t < now || (t == now && !started)) throw DomainError("fd1d: times must be positive and increasing");
        if (t > T_ * (1.0 + 1e-12)) throw HorizonError("fd1d: time beyond the horizon");
        if (t > now) {
            const double cap = std::max(opt_.dt, step_fraction * now);
            const int n = std::max(1, static_cast<int>(std::ceil((t - now) / cap - 1e-9)));
            const double dt = (t - now) / n;
            int k = 0;
            if (!started) {
                // damp the point-mass start with implicit Euler half steps
                const int full = std::min(n, (opt_.rannacher_steps + 1) / 2);
                for (int s = 0; s < 2 * full; ++s) step(u, 0.5 * dt, true, w);
                k = full;
                started = true;
            }
            const bool cached = std::abs(dt - opt_.dt) <= 1e-12 * opt_.dt;
            for (; k < n; ++k) {
                if (cached) step_cached(u, w);
                else step(u, dt, false, w);
            }
            now = t;
        }
        visit(j, u);
    }
}

std::vector<std::vector<double>> Fd1dSolver::solve_at(const std::vector<double>& times, double y) const {
    std::vector<std::vector<double>> out;
    out.reserve(times.size());
    march(times, y, [&](std::size_t, const std::vector<double>& u) { out.push_back(u); });
    return out;
}

std::vector<double> Fd1dSolver::solve(double t, double y) const { return solve_at({t}, y).front(); }

double Fd1dSolver::sample(const std::vector<double>& u, double x, int k) const {
    if (k < 0 || k > 2) throw CapabilityError("fd1d derivatives are available up to order 2");
    if (std::abs(x) > L_ - 5.0 + 1e-12) throw DomainError("fd1d: evaluation point outside the computational window");
    const double pos = (x + L_) / h_;
    int i = static_cast<int>(std::floor(pos)) - 1;
    i = std::clamp(i, 0, n_ - 4);
    const double s = pos - i;  // in [1, 2) normally
    // cubic Lagrange through nodes i..i+3 at offsets 0..3
    double w[4];
    if (k == 0) {
        w[0] = -(s - 1) * (s - 2) * (s - 3) / 6.0;
        w[1] = s * (s - 2) * (s - 3) / 2.0;
        w[2] = -s * (s - 1) * (s - 3) / 2.0;
        w[3] = s * (s - 1) * (s - 2) / 6.0;
    } else if (k == 1) {
        w[0] = -((s - 2) * (s - 3) + (s - 1) * (s - 3) + (s - 1) * (s - 2)) / 6.0;
        w[1] = ((s - 2) * (s - 3) + s * (s - 3) + s * (s - 2)) / 2.0;
        w[2] = -((s - 1) * (s - 3) + s * (s - 3) + s * (s - 1)) / 2.0;
        w[3] = ((s - 1) * (s - 2) + s * (s - 2) + s * (s - 1)) / 6.0;
        for (double& v : w) v /= h_;
    } else {
        w[0] = -(6 * s - 12) / 6.0;
        w[1] = (6 * s - 10) / 2.0;
        w[2] = -(6 * s - 8) / 2.0;
        w[3] = (6 * s - 6) / 6.0;
        for (double& v : w) v /= h_ * h_;
    }
    return w[0] * u[i] + w[1] * u[i + 1] + w[2] * u[i + 2] + w[3] * u[i + 3];
}

double Fd1dSolver::mass(const std::vector<double>& u) const {
    double m = 0.0;
    for (double v : u) m += v;
    return m * h_;
}

double fd1d_kernel(const KernelSpec& spec, double t, double x, double y) {
    if (spec.family() != KernelFamily::variable_diffusion_1d) throw SpecError("needs a variable_diffusion_1d spec");
    if (!(t > 0.0)) throw DomainError("time must be positive");
    if (t > spec.horizon()) throw HorizonError("time beyond the kernel horizon");
    return spec.fd1d().sample(spec.fd1d().solve(t, y), x, 0);
}

}  // namespace fracgreen
