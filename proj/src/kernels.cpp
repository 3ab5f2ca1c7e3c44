#include "fracgreen/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracgreen/errors.hpp"

namespace fracgreen {

using std::numbers::pi;

// --- spectral measure ---------------------------------------------------------

SpectralMeasure::SpectralMeasure(std::vector<double> density) : density_(std::move(density)) {
    if (density_.size() < 8) throw SpecError("spectral density needs at least 8 angular samples");
    for (double v : density_)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvariantError("spectral density must be strictly positive");
}

SpectralMeasure SpectralMeasure::normalized_uniform(double alpha, int n) {
    // normalize by the same discrete rule w_on_grid uses, so w is 1 to rounding
    SpectralMeasure unit(std::vector<double>(n, 1.0));
    const double m = unit.w_on_grid(alpha)[0];
    return SpectralMeasure(std::vector<double>(n, 1.0 / m));
}

double SpectralMeasure::angle(int j) const { return 2.0 * pi * j / size(); }
double SpectralMeasure::weight() const { return 2.0 * pi / size(); }

std::vector<double> SpectralMeasure::w_on_grid(double alpha) const {
    // |cos|^alpha has kinks where cos = 0, so the plain trapezoid sum over the
    // density grid is refined 16x with the density interpolated linearly.
    const int n = size(), sub = 16;
    std::vector<double> w(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double m0 = density_[j], m1 = density_[(j + 1) % n];
            for (int s = 0; s < sub; ++s) {
                const double f = double(s) / sub;
                const double phi = 2.0 * pi * (j + f) / n;
                acc += ((1.0 - f) * m0 + f * m1) * std::pow(std::abs(std::cos(angle(i) - phi)), alpha);
            }
        }
        w[i] = acc * weight() / sub;
    }
    return w;
}

Coefficient Coefficient::constant(double v) {
    return {"constant:" + std::to_string(v), [v](double) { return v; }};
}

const char* to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::constant_diffusion: return "constant_diffusion";
        case KernelFamily::isotropic_stable: return "isotropic_stable";
        case KernelFamily::anisotropic_stable_2d: return "anisotropic_stable_2d";
        case KernelFamily::variable_diffusion_1d: return "variable_diffusion_1d";
    }
    return "?";
}

// --- KernelSpec -------------------------------------------------------------

KernelSpec KernelSpec::constant_diffusion(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols() || A.rows() < 1) throw ShapeError("diffusion matrix must be square");
    if (!A.isApprox(A.transpose(), 1e-12)) throw InvariantError("diffusion matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0)) throw InvariantError("diffusion matrix must be positive definite");
    KernelSpec k;
    k.family_ = KernelFamily::constant_diffusion;
    k.d_ = static_cast<int>(A.rows());
    k.A_ = A;
    k.Ainv_ = A.inverse();
    k.log_det_ = es.eigenvalues().array().log().sum();
    k.mu_ = std::max({1.0, lmax, 1.0 / lmin});
    return k;
}

KernelSpec KernelSpec::gaussian(int d) {
    if (d < 1) throw DomainError("dimension must be positive");
    return constant_diffusion(Eigen::MatrixXd::Identity(d, d));
}

KernelSpec KernelSpec::isotropic_stable(int d, double alpha) {
    if (d < 1) throw DomainError("dimension must be positive");
    StableOrder a(alpha);
    KernelSpec k;
    k.family_ = KernelFamily::isotropic_stable;
    k.d_ = d;
    k.alpha_ = a.value();
    return k;
}

KernelSpec KernelSpec::anisotropic_stable_2d(double alpha, const SpectralMeasure& mu) {
    StableOrder a(alpha);
    KernelSpec k;
    k.family_ = KernelFamily::anisotropic_stable_2d;
    k.d_ = 2;
    k.alpha_ = a.value();
    k.measure_ = std::make_shared<SpectralMeasure>(mu);
    k.w_grid_ = mu.w_on_grid(alpha);
    for (double w : k.w_grid_)
        if (!(w > 0.0)) throw InvariantError("w_mu must be positive");
    return k;
}

KernelSpec KernelSpec::variable_diffusion_1d(Coefficient a, Coefficient b, Coefficient c, double horizon,
                                             const Fd1dOptions& opt) {
    KernelSpec k;
    k.family_ = KernelFamily::variable_diffusion_1d;
    k.d_ = 1;
    k.fd1d_ = std::make_shared<Fd1dSolver>(std::move(a), std::move(b), std::move(c), horizon, opt);
    return k;
}

double KernelSpec::horizon() const {
    return fd1d_ ? fd1d_->horizon() : std::numeric_limits<double>::infinity();
}

bool KernelSpec::symmetric() const { return family_ != KernelFamily::variable_diffusion_1d; }

int KernelSpec::max_derivative() const { return 2; }

// --- Gaussian -----------------------------------------------------------------

namespace {
void check_points(const KernelSpec& spec, const Point& x, const Point& y) {
    if (static_cast<int>(x.size()) != spec.dim() || static_cast<int>(y.size()) != spec.dim())
        throw ShapeError("point dimension does not match the kernel");
}
void check_time(double t) {
    if (!(t > 0.0)) throw DomainError("time must be positive");
}
}  // namespace

LogValue gaussian_kernel_log(const KernelSpec& spec, double t, const Point& x, const Point& y, int k) {
    check_time(t);
    check_points(spec, x, y);
    if (k < 0 || k > 2) throw CapabilityError("Gaussian derivatives are available up to order 2");
    const int d = spec.dim();
    Eigen::VectorXd delta(d);
    for (int i = 0; i < d; ++i) delta[i] = x[i] - y[i];
    const Eigen::VectorXd g = spec.matrix_inverse() * delta;
    const double q = delta.dot(g);
    const double lv = -0.5 * d * std::log(4.0 * pi * t) - 0.5 * spec.log_det() - q / (4.0 * t);
    if (k == 0) return {lv, 1};
    const double s = g[0] / (2.0 * t);
    if (k == 1) {
        LogValue f = log_value_of(-s);
        return {lv + f.log_abs, f.sign};
    }
    LogValue f = log_value_of(s * s - spec.matrix_inverse()(0, 0) / (2.0 * t));
    return {lv + f.log_abs, f.sign};
}

double gaussian_kernel(const KernelSpec& spec, double t, const Point& x, const Point& y) {
    if (spec.family() != KernelFamily::constant_diffusion) throw SpecError("gaussian_kernel needs a constant_diffusion spec");
    return gaussian_kernel_log(spec, t, x, y, 0).value();
}

// --- isotropic stable ---------------------------------------------------------

namespace {

double profile_at_zero(int d, double alpha) {
    return std::tgamma(d / alpha) / (alpha * std::pow(2.0, d - 1) * std::pow(pi, 0.5 * d) * std::tgamma(0.5 * d));
}

// Large-distance expansion in log form, lr = log(rho); convergent for
// alpha < 1, asymptotic otherwise. NaN when it cannot deliver ~1e-12
// relative accuracy.
double log_profile_series(int d, double alpha, double lr) {
    const double lh = lr - std::log(2.0);
    // terms scaled by the first one's magnitude to survive huge rho
    const double l1 = std::lgamma(0.5 * alpha + 1.0) + std::lgamma(0.5 * alpha + 0.5 * d) - alpha * lh;
    double sum = 0.0, biggest = 0.0, last = std::numeric_limits<double>::infinity();
    bool done = false;
    for (int k = 1; k < 600; ++k) {
        const double sn = std::sin(k * pi * alpha / 2.0);
        const double lm = std::lgamma(0.5 * k * alpha + 1.0) + std::lgamma(0.5 * k * alpha + 0.5 * d) -
                          std::lgamma(k + 1.0) - k * alpha * lh - l1;
        const double mag = std::exp(lm);
        if (mag > last && alpha >= 1.0 && k > 2) break;  // asymptotic series turning around
        last = mag;
        const double term = ((k % 2) ? 1.0 : -1.0) * sn * mag;
        sum += term;
        biggest = std::max(biggest, std::abs(term));
        if (mag < 1e-16 * std::abs(sum)) {
            done = true;
            break;
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(sum > 0.0)) return nan;
    if (!done && last > 1e-13 * sum) return nan;
    if (biggest > 1e3 * sum) return nan;
    return std::log(sum) + l1 - (0.5 * d + 1.0) * std::log(pi) - d * lr;
}

double profile_quadrature(int d, double alpha, double rho) {
    const double kmax = std::pow(40.0, 1.0 / alpha);
    std::vector<double> br{0.0};
    for (double b : {1e-3, 0.1, 1.0})
        if (b < kmax) br.push_back(b);
    const double half = pi / rho;
    if (half < kmax)
        for (double b = half; b < kmax; b += half)
            if (b > br.back() * 1.0000001) br.push_back(b);
    std::sort(br.begin(), br.end());
    br.push_back(kmax);
    QuadOptions o;
    o.abs_tol = 1e-16;
    o.rel_tol = 1e-12;
    o.max_intervals = 20000;
    if (d == 1) {
        auto f = [&](double k) { return std::exp(-std::pow(k, alpha)) * std::cos(k * rho); };
        return integrate(f, br, o).value / pi;
    }
    if (d == 3) {
        auto f = [&](double k) { return std::exp(-std::pow(k, alpha)) * k * std::sin(k * rho); };
        return integrate(f, br, o).value / (2.0 * pi * pi * rho);
    }
    const double nu = 0.5 * d - 1.0;
    auto f = [&](double k) {
        if (k == 0.0) return 0.0;
        return std::exp(-std::pow(k, alpha)) * std::pow(k, nu + 1.0) * std::cyl_bessel_j(nu, k * rho);
    };
    return integrate(f, br, o).value * std::pow(2.0 * pi, -0.5 * d) * std::pow(rho, -nu);
}

}  // namespace

double log_stable_radial_profile(int d, double alpha, double rho, double log_rho) {
    if (rho < 0.0) throw DomainError("distance must be nonnegative");
    if (rho == 0.0) return std::log(profile_at_zero(d, alpha));
    if (log_rho >= std::log(2.0) && alpha < 2.0) {
        const double s = log_profile_series(d, alpha, log_rho);
        if (std::isfinite(s)) return s;
    }
    if (!std::isfinite(rho)) throw RangeError("stable profile: distance out of range");
    return std::log(profile_quadrature(d, alpha, rho));
}

double stable_radial_profile(int d, double alpha, double rho) {
    if (rho < 0.0) throw DomainError("distance must be nonnegative");
    return std::exp(log_stable_radial_profile(d, alpha, rho, rho > 0.0 ? std::log(rho) : 0.0));
}

double stable_kernel_isotropic(const KernelSpec& spec, double t, double r) {
    check_time(t);
    if (spec.family() != KernelFamily::isotropic_stable) throw SpecError("needs an isotropic_stable spec");
    if (r < 0.0) throw DomainError("distance must be nonnegative");
    Point x(spec.dim(), 0.0), y(spec.dim(), 0.0);
    x[0] = r;
    return stable_kernel_isotropic_log(spec, t, x, y, 0).value();
}

LogValue stable_kernel_isotropic_log(const KernelSpec& spec, double t, const Point& x, const Point& y, int k) {
    check_time(t);
    check_points(spec, x, y);
    if (spec.family() != KernelFamily::isotropic_stable) throw SpecError("needs an isotropic_stable spec");
    const int d = spec.dim();
    const double a = spec.alpha();
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += (x[i] - y[i]) * (x[i] - y[i]);
    const double r = std::sqrt(r2);
    const double ls = -std::log(t) / a;  // log of the spatial scale factor
    const double lrho = r > 0.0 ? std::log(r) + ls : 0.0;
    const double rho = r > 0.0 ? std::exp(lrho) : 0.0;
    auto lg = [&](int dd) { return log_stable_radial_profile(dd, a, rho, lrho); };
    const double d1 = x[0] - y[0];
    switch (k) {
        case 0: return {d * ls + lg(d), 1};
        case 1: {
            if (d1 == 0.0) return {};
            return {std::log(2.0 * pi * std::abs(d1)) + (d + 2) * ls + lg(d + 2), d1 > 0.0 ? -1 : 1};
        }
        case 2: {
            // -2 pi s^{d+2} (g_{d+2} - 2 pi s^2 d1^2 g_{d+4})
            const double la = lg(d + 2);
            if (d1 == 0.0) return {std::log(2.0 * pi) + (d + 2) * ls + la, -1};
            const double lb = std::log(2.0 * pi * d1 * d1) + 2.0 * ls + lg(d + 4);
            const double diff = la > lb ? -std::expm1(lb - la) : std::expm1(la - lb);
            const double lbig = std::max(la, lb);
            LogValue inner = log_value_of(diff);
            if (inner.sign == 0) return {};
            return {std::log(2.0 * pi) + (d + 2) * ls + lbig + inner.log_abs,
                    (la > lb ? 1 : -1) * -1};
        }
        default: throw CapabilityError("stable derivatives are available up to order 2");
    }
}

double stable_kernel_isotropic_deriv(const KernelSpec& spec, double t, const Point& x, const Point& y, int k) {
    return stable_kernel_isotropic_log(spec, t, x, y, k).value();
}

// --- anisotropic stable -------------------------------------------------------

double aniso_inner(double alpha, double s) {
    s = std::abs(s);
    if (s == 0.0) return std::tgamma(2.0 / alpha) / alpha;
    if (s >= 4.0 && alpha < 2.0) {
        // sum_n (-1)^n/n! Gamma(n alpha + 2) cos(pi (n alpha + 2)/2) s^{-n alpha - 2}
        double sum = 0.0, last = std::numeric_limits<double>::infinity(), biggest = 0.0;
        bool done = false;
        for (int n = 0; n < 600; ++n) {
            const double e = n * alpha + 2.0;
            const double lm = std::lgamma(e) - std::lgamma(n + 1.0) - e * std::log(s);
            const double mag = std::exp(lm);
            if (mag > last && n > 2 && alpha >= 1.0) break;
            last = mag;
            const double term = ((n % 2) ? -1.0 : 1.0) * std::cos(0.5 * pi * e) * mag;
            sum += term;
            biggest = std::max(biggest, std::abs(term));
            if (mag < 1e-16 * std::abs(sum)) {
                done = true;
                break;
            }
        }
        if (sum != 0.0 && (done || last < 1e-13 * std::abs(sum)) && biggest < 1e3 * std::abs(sum)) return sum;
    }
    const double kmax = std::pow(40.0, 1.0 / alpha);
    std::vector<double> br{0.0};
    for (double b : {1e-3, 0.1, 1.0})
        if (b < kmax) br.push_back(b);
    const double half = pi / s;
    for (double b = half; b < kmax; b += half)
        if (b > br.back() * 1.0000001) br.push_back(b);
    std::sort(br.begin(), br.end());
    br.push_back(kmax);
    QuadOptions o;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-12;
    o.max_intervals = 20000;
    auto f = [&](double k) { return k * std::exp(-std::pow(k, alpha)) * std::cos(k * s); };
    return integrate(f, br, o).value;
}

namespace {
// periodic Catmull-Rom interpolation of grid values at angle th
double periodic_cubic(const std::vector<double>& v, double th) {
    const int n = static_cast<int>(v.size());
    double u = th / (2.0 * pi) * n;
    u -= n * std::floor(u / n);
    const int i = static_cast<int>(std::floor(u)) % n;
    const double f = u - std::floor(u);
    const double p0 = v[(i + n - 1) % n], p1 = v[i], p2 = v[(i + 1) % n], p3 = v[(i + 2) % n];
    return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)));
}
}  // namespace

double stable_kernel_anisotropic(const KernelSpec& spec, double t, const Point& x) {
    check_time(t);
    if (spec.family() != KernelFamily::anisotropic_stable_2d) throw SpecError("needs an anisotropic_stable_2d spec");
    if (x.size() != 2) throw ShapeError("anisotropic kernel needs a 2-vector");
    const auto& mu = spec.spectral_measure();
    const auto& w = spec.w_grid();
    const double a = spec.alpha();
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) {
        // smooth periodic integrand: the grid trapezoid is spectrally accurate
        double acc = 0.0;
        for (int j = 0; j < mu.size(); ++j) acc += std::pow(t * w[j], -2.0 / a);
        return acc * mu.weight() * aniso_inner(a, 0.0) / (4.0 * pi * pi);
    }
    // The integrand peaks where x is orthogonal to the direction, with angular
    // width ~ 1/(r scale); integrate the half circle starting there (h is even).
    const double phi0 = std::atan2(x[1], x[0]) + 0.5 * pi;
    const double wmax = *std::max_element(w.begin(), w.end());
    const double scale_min = std::pow(t * wmax, -1.0 / a);
    const double delta = std::asin(std::min(1.0, 40.0 / (r * scale_min)));
    std::vector<double> br{0.0};
    if (delta < 0.5 * pi) {
        for (double b : {0.1 * delta, delta, pi - delta, pi - 0.1 * delta}) br.push_back(b);
    } else {
        br.push_back(0.5 * pi);
    }
    br.push_back(pi);
    auto f = [&](double u) {
        const double scale = std::pow(t * periodic_cubic(w, phi0 + u), -1.0 / a);
        return scale * scale * aniso_inner(a, r * std::sin(u) * scale);
    };
    QuadOptions o;
    o.abs_tol = 1e-13 * scale_min * scale_min;
    o.rel_tol = 1e-10;
    return 2.0 * integrate(f, br, o).value / (4.0 * pi * pi);
}

// --- dispatcher -----------------------------------------------------------------

LogValue kernel_log_value(const KernelSpec& spec, double t, const Point& x, const Point& y, int k) {
    switch (spec.family()) {
        case KernelFamily::constant_diffusion: return gaussian_kernel_log(spec, t, x, y, k);
        case KernelFamily::isotropic_stable: return stable_kernel_isotropic_log(spec, t, x, y, k);
        default: return log_value_of(kernel_value(spec, t, x, y, k));
    }
}

double kernel_value(const KernelSpec& spec, double t, const Point& x, const Point& y, int k) {
    switch (spec.family()) {
        case KernelFamily::constant_diffusion:
        case KernelFamily::isotropic_stable: return kernel_log_value(spec, t, x, y, k).value();
        case KernelFamily::anisotropic_stable_2d: {
            if (k != 0) throw CapabilityError("anisotropic kernel derivatives are not implemented");
            check_points(spec, x, y);
            return stable_kernel_anisotropic(spec, t, {x[0] - y[0], x[1] - y[1]});
        }
        case KernelFamily::variable_diffusion_1d: {
            check_points(spec, x, y);
            check_time(t);
            if (t > spec.horizon()) throw HorizonError("time beyond the kernel horizon");
            return spec.fd1d().sample(spec.fd1d().solve(t, y[0]), x[0], k);
        }
    }
    throw SpecError("unknown kernel family");
}

}  // namespace fracgreen
