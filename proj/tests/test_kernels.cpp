#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fracgreen/errors.hpp"
#include "fracgreen/kernels.hpp"

using namespace fracgreen;
constexpr double pi = std::numbers::pi;

namespace {
double cauchy_1d(double t, double r) { return t / (pi * (t * t + r * r)); }

KernelSpec fd1d_spec(std::function<double(double)> a, double horizon, Fd1dOptions opt = {}) {
    return KernelSpec::variable_diffusion_1d({"a", std::move(a)}, Coefficient::constant(0.0),
                                             Coefficient::constant(0.0), horizon, opt);
}
}  // namespace

TEST_CASE("gaussian closed forms") {
    CHECK(gaussian_kernel(KernelSpec::gaussian(3), 1.0, {0, 0, 0}, {0, 0, 0}) ==
          doctest::Approx(std::pow(4 * pi, -1.5)).epsilon(1e-14));
    CHECK(gaussian_kernel(KernelSpec::gaussian(2), 0.5, {1, 0}, {0, 0}) == doctest::Approx(std::exp(-0.5) / (2 * pi)).epsilon(1e-14));
}

TEST_CASE("gaussian with a general matrix") {
    Eigen::MatrixXd A(2, 2);
    A << 2.0, 0.5, 0.5, 1.0;
    const auto spec = KernelSpec::constant_diffusion(A);
    const Eigen::Vector2d z(0.7, -0.4);
    const double t = 0.8;
    const double expect = std::exp(-z.dot(A.inverse() * z) / (4 * t)) / (4 * pi * t * std::sqrt(A.determinant()));
    CHECK(gaussian_kernel(spec, t, {0.7, -0.4}, {0, 0}) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(spec.ellipticity() >= 1.0);
}

TEST_CASE("gaussian mass") {
    const auto spec = KernelSpec::gaussian(1);
    boost::math::quadrature::tanh_sinh<double> q;
    const double m = q.integrate([&](double y) { return gaussian_kernel(spec, 1.0, {0.3}, {y}); },
                                 -INFINITY, INFINITY);
    CHECK(std::abs(m - 1.0) < 1e-10);
}

TEST_CASE("gaussian derivatives match finite differences") {
    const auto spec = KernelSpec::gaussian(2);
    const Point y{0.1, -0.2};
    const double t = 0.6, e = 1e-4;
    auto g = [&](double x1) { return gaussian_kernel(spec, t, {x1, 0.3}, y); };
    const double x1 = 0.9;
    CHECK(kernel_value(spec, t, {x1, 0.3}, y, 1) == doctest::Approx((g(x1 + e) - g(x1 - e)) / (2 * e)).epsilon(1e-6));
    CHECK(kernel_value(spec, t, {x1, 0.3}, y, 2) ==
          doctest::Approx((g(x1 + e) - 2 * g(x1) + g(x1 - e)) / (e * e)).epsilon(1e-5));
}

TEST_CASE("kernel argument errors") {
    const auto g = KernelSpec::gaussian(2);
    CHECK_THROWS_AS(gaussian_kernel(g, 0.0, {0, 0}, {0, 0}), DomainError);
    CHECK_THROWS_AS(gaussian_kernel(g, 1.0, {0}, {0, 0}), ShapeError);
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(KernelSpec::constant_diffusion(bad), InvariantError);
    CHECK_THROWS_AS(KernelSpec::isotropic_stable(1, 2.5), DomainError);
    CHECK_THROWS_AS(stable_kernel_isotropic(KernelSpec::isotropic_stable(1, 1.0), -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(SpectralMeasure(std::vector<double>(16, -1.0)), InvariantError);
}

TEST_CASE("isotropic stable closed forms") {
    const auto c1 = KernelSpec::isotropic_stable(1, 1.0);
    CHECK(stable_kernel_isotropic(c1, 1.0, 0.0) == doctest::Approx(0.3183099).epsilon(1e-6));
    CHECK(stable_kernel_isotropic(c1, 2.0, 2.0) == doctest::Approx(0.0795775).epsilon(1e-6));
    for (double r : {0.0, 0.3, 1.0, 3.0, 10.0, 100.0})
        CHECK(std::abs(stable_kernel_isotropic(c1, 1.0, r) - cauchy_1d(1.0, r)) < 1e-8);
    // d = 2 and d = 3 Cauchy kernels
    const auto c2 = KernelSpec::isotropic_stable(2, 1.0), c3 = KernelSpec::isotropic_stable(3, 1.0);
    for (double r : {0.0, 0.5, 2.0, 20.0}) {
        CHECK(std::abs(stable_kernel_isotropic(c2, 1.0, r) - 1.0 / (2 * pi * std::pow(1 + r * r, 1.5))) < 1e-8);
        CHECK(std::abs(stable_kernel_isotropic(c3, 1.0, r) - 1.0 / (pi * pi * std::pow(1 + r * r, 2.0))) < 1e-8);
    }
    const auto g = KernelSpec::isotropic_stable(1, 2.0);
    CHECK(stable_kernel_isotropic(g, 1.0, 0.0) == doctest::Approx(0.2820948).epsilon(1e-6));
    CHECK(std::abs(stable_kernel_isotropic(g, 1.0, 1.3) - gaussian_kernel(KernelSpec::gaussian(1), 1.0, {1.3}, {0})) <
          1e-8);
}

TEST_CASE("isotropic stable against direct Fourier inversion") {
    // (1/pi) int_0^inf exp(-xi^alpha) cos(xi r) dxi, Boost Gauss-Legendre on panels between cosine zeros
    boost::math::quadrature::tanh_sinh<double> q;
    for (double alpha : {0.7, 1.5}) {
        const auto spec = KernelSpec::isotropic_stable(1, alpha);
        const double xi_max = std::pow(33.0, 1.0 / alpha);
        for (double r : {0.0, 0.4, 2.0}) {
            double s = 0.0;
            const double panel = r > 0 ? pi / r : xi_max;
            for (double a = 0.0; a < xi_max; a += panel)
                s += q.integrate([&](double xi) { return std::exp(-std::pow(xi, alpha)) * std::cos(xi * r); }, a,
                                 std::min(a + panel, xi_max));
            CAPTURE(alpha);
            CAPTURE(r);
            CHECK(std::abs(stable_kernel_isotropic(spec, 1.0, r) - s / pi) < 1e-8);
        }
    }
}

TEST_CASE("isotropic stable self-similarity and positivity") {
    for (int d : {1, 2, 3})
        for (double alpha : {0.6, 1.0, 1.7}) {
            const auto spec = KernelSpec::isotropic_stable(d, alpha);
            for (double t : {0.1, 3.0})
                for (double r : {0.0, 0.5, 4.0}) {
                    const double lhs = stable_kernel_isotropic(spec, t, r);
                    const double rhs =
                        std::pow(t, -d / alpha) * stable_kernel_isotropic(spec, 1.0, r * std::pow(t, -1 / alpha));
                    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, rhs));
                    CHECK(lhs > 0.0);
                }
        }
}

TEST_CASE("stable derivatives match finite differences") {
    const auto spec = KernelSpec::isotropic_stable(2, 1.2);
    const Point y{0, 0};
    const double t = 1.0, e = 1e-3, x1 = 0.8;
    auto g = [&](double v) { return stable_kernel_isotropic_deriv(spec, t, {v, 0.4}, y, 0); };
    CHECK(stable_kernel_isotropic_deriv(spec, t, {x1, 0.4}, y, 1) ==
          doctest::Approx((g(x1 + e) - g(x1 - e)) / (2 * e)).epsilon(1e-5));
    CHECK(stable_kernel_isotropic_deriv(spec, t, {x1, 0.4}, y, 2) ==
          doctest::Approx((g(x1 + e) - 2 * g(x1) + g(x1 - e)) / (e * e)).epsilon(1e-4));
}

TEST_CASE("Chapman-Kolmogorov") {
    boost::math::quadrature::tanh_sinh<double> q;
    const auto g = KernelSpec::gaussian(1);
    const double lhs_g = q.integrate(
        [&](double z) { return gaussian_kernel(g, 0.3, {0.2}, {z}) * gaussian_kernel(g, 0.5, {z}, {-0.4}); },
        -INFINITY, INFINITY);
    CHECK(std::abs(lhs_g - gaussian_kernel(g, 0.8, {0.2}, {-0.4})) < 1e-4);
    const auto s = KernelSpec::isotropic_stable(1, 1.5);
    const double lhs_s = q.integrate(
        [&](double z) {
            return stable_kernel_isotropic(s, 0.3, std::abs(0.2 - z)) * stable_kernel_isotropic(s, 0.5, std::abs(z + 0.4));
        },
        -INFINITY, INFINITY);
    CHECK(std::abs(lhs_s - stable_kernel_isotropic(s, 0.8, 0.6)) < 1e-4);
}

TEST_CASE("anisotropic kernel reduces to the isotropic one for uniform measure") {
    const auto spec = KernelSpec::anisotropic_stable_2d(1.0, SpectralMeasure::normalized_uniform(1.0));
    CHECK(std::abs(stable_kernel_anisotropic(spec, 1.0, {0, 0}) - 1.0 / (2 * pi)) < 1e-6);
    CHECK(std::abs(stable_kernel_anisotropic(spec, 1.0, {1, 0}) - 0.0562698) < 1e-6);
    CHECK(std::abs(stable_kernel_anisotropic(spec, 1.0, {0.6, 0.8}) - 0.0562698) < 1e-6);
    const auto iso = KernelSpec::isotropic_stable(2, 1.0);
    for (double r : {5.0, 20.0, 50.0})
        CHECK(std::abs(stable_kernel_anisotropic(spec, 1.0, {0.6 * r, -0.8 * r}) - stable_kernel_isotropic(iso, 1.0, r)) <
              1e-6 * stable_kernel_isotropic(iso, 1.0, r));
}

TEST_CASE("anisotropic kernel mass and shape") {
    std::vector<double> dens(256);
    for (int j = 0; j < 256; ++j) dens[j] = (1.0 + 0.5 * std::cos(2 * 2 * pi * j / 256)) / (2 * pi);
    const auto spec = KernelSpec::anisotropic_stable_2d(1.5, SpectralMeasure(dens));
    // polar quadrature on |x| <= 60, log-spaced radially
    boost::math::quadrature::gauss<double, 30> gr;
    const int na = 16;
    double mass = 0.0;
    for (int j = 0; j < na; ++j) {
        const double th = 2 * pi * (j + 0.5) / na;
        mass += gr.integrate(
                    [&](double v) {
                        const double r = std::exp(v);
                        return r * r * stable_kernel_anisotropic(spec, 1.0, {r * std::cos(th), r * std::sin(th)});
                    },
                    std::log(1e-3), std::log(60.0)) *
                2 * pi / na;
    }
    CHECK(mass >= 0.99);
    CHECK(mass <= 1.001);
    // not radial: spreading differs between the axes
    const double gx = stable_kernel_anisotropic(spec, 1.0, {1.5, 0}), gy = stable_kernel_anisotropic(spec, 1.0, {0, 1.5});
    CHECK(gx > 0.0);
    CHECK(gy > 0.0);
    CHECK(std::abs(gx - gy) > 1e-3 * gx);
}

TEST_CASE("fd1d reduces to the Gaussian") {
    const auto spec = fd1d_spec([](double) { return 1.0; }, 1.0);
    CHECK(std::abs(fd1d_kernel(spec, 0.1, 0.0, 0.0) - 0.8920621) < 1e-3);
    const auto u = spec.fd1d().solve(0.1, 0.0);
    CHECK(std::abs(spec.fd1d().mass(u) - 1.0) < 1e-4);
    for (double x : {0.1, 0.5, 1.0})
        CHECK(std::abs(fd1d_kernel(spec, 0.1, x, 0.0) - fd1d_kernel(spec, 0.1, 0.0, x)) < 1e-10);
    CHECK_THROWS_AS(fd1d_kernel(spec, 1.5, 0.0, 0.0), HorizonError);
    CHECK_THROWS_AS(fd1d_kernel(spec, 0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("fd1d second-order convergence") {
    const double t = 0.1, x = 0.3;
    const double exact = gaussian_kernel(KernelSpec::gaussian(1), t, {x}, {0.0});
    auto err = [&](double h) {
        Fd1dOptions o;
        o.h = h;
        o.dt = 1e-4;
        return std::abs(fd1d_kernel(fd1d_spec([](double) { return 1.0; }, t, o), t, x, 0.0) - exact);
    };
    const double ratio = err(0.04) / err(0.02);
    CAPTURE(ratio);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("fd1d Gaussian sandwich for variable diffusivity") {
    const auto spec = fd1d_spec([](double v) { return 1.0 + 0.5 * std::sin(v); }, 1.0);
    const double t = 0.1, amax = 1.5, amin = 0.5;
    for (double y : {-1.0, 0.0, 2.0}) {
        const auto u = spec.fd1d().solve(t, y);
        double hi = 0.0, lo = INFINITY;
        for (double z = -3.0; z <= 3.0; z += 0.1) {
            const double g = spec.fd1d().sample(u, y + z);
            CHECK(g >= 0.0);
            const double base = std::pow(4 * pi * t, -0.5);
            hi = std::max(hi, g / (base * std::exp(-z * z / (4 * t * amax))));
            lo = std::min(lo, g / (base * std::exp(-z * z / (4 * t * amin))));
        }
        CAPTURE(y);
        CHECK(hi < 5.0);
        CHECK(lo > 0.2);
    }
}
