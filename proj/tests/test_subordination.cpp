#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fracgreen/errors.hpp"
#include "fracgreen/subordination.hpp"

using namespace fracgreen;
constexpr double pi = std::numbers::pi;

namespace {
// beta = 1/2: the inverse subordinator density is (pi t)^{-1/2} exp(-s^2/(4t))
double half_oracle(double t, double r) {
    boost::math::quadrature::exp_sinh<double> q;
    auto f = [&](double s) {
        if (!(s > 0.0)) return 0.0;
        return std::exp(-r * r / (4 * s)) / std::sqrt(4 * pi * s) * std::exp(-s * s / (4 * t)) / std::sqrt(pi * t);
    };
    return q.integrate(f, 1e-13);
}

double green(const KernelSpec& k, double beta, double t, Point x, Point y, int order = 0) {
    return frac_green({k, beta, t, std::move(x), std::move(y), order});
}
}  // namespace

TEST_CASE("inverse subordinator density") {
    for (double tau : {0.1, 1.0, 3.0})
        CHECK(inverse_subordinator_density(FracOrder(0.5), 2.0, tau) ==
              doctest::Approx(std::exp(-tau * tau / 8.0) / std::sqrt(2 * pi)).epsilon(1e-10));
    // constants integrate to 1, exponentials to the Mittag-Leffler function
    const auto one = subordinate([](double) { return LogValue{0.0, 1}; }, FracOrder(0.3), 2.0);
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-10));
    const auto ex = subordinate([](double tau) { return LogValue{-tau, 1}; }, FracOrder(0.3), 2.0);
    CHECK(ex.value == doctest::Approx(ml_series(FracOrder(0.3), -std::pow(2.0, 0.3))).epsilon(1e-9));
}

TEST_CASE("half-order closed form at the origin") {
    const double v = green(KernelSpec::gaussian(1), 0.5, 1.0, {0}, {0});
    CHECK(v == doctest::Approx(std::tgamma(0.25) / (std::pow(2.0, 1.5) * pi)).epsilon(1e-9));
    CHECK(std::abs(v - 0.40803) < 1e-5);
}

TEST_CASE("half-order oracle grid") {
    const auto g = KernelSpec::gaussian(1);
    for (double t : {0.25, 1.0, 4.0})
        for (double r : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const double o = half_oracle(t, r);
            CAPTURE(t);
            CAPTURE(r);
            CHECK(std::abs(green(g, 0.5, t, {r}, {0}) / o - 1.0) < 1e-6);
        }
}

TEST_CASE("symmetry") {
    const auto g = KernelSpec::gaussian(2);
    CHECK(green(g, 0.4, 1.3, {0.2, 0.5}, {-0.3, 1.0}) ==
          doctest::Approx(green(g, 0.4, 1.3, {-0.3, 1.0}, {0.2, 0.5})).epsilon(1e-12));
    const auto s = KernelSpec::isotropic_stable(1, 1.3);
    CHECK(green(s, 0.7, 0.5, {0.2}, {1.7}) == doctest::Approx(green(s, 0.7, 0.5, {1.7}, {0.2})).epsilon(1e-12));
}

TEST_CASE("mass conservation") {
    boost::math::quadrature::tanh_sinh<double> q;
    const auto g = KernelSpec::gaussian(1);
    const double mg = 2.0 * q.integrate([&](double r) { return green(g, 0.5, 1.0, {r}, {0}); }, 0.0, 40.0);
    CHECK(std::abs(mg - 1.0) < 1e-4);
    // d = 2 radially; the log singularity at r = 0 is integrable against r dr
    const auto g2 = KernelSpec::gaussian(2);
    const double m2 = q.integrate([&](double r) { return r > 0 ? 2 * pi * r * green(g2, 0.6, 1.0, {r, 0}, {0, 0}) : 0.0; },
                                  1e-8, 40.0);  // below 1e-8 the r log r mass is negligible
    CHECK(std::abs(m2 - 1.0) < 1e-4);
    // stable: in log r, plus the r^{-1-alpha} tail beyond R in closed form
    const double alpha = 1.5, R = 1e5;
    const auto s = KernelSpec::isotropic_stable(1, alpha);
    auto rg = [&](double v) {
        const double r = std::exp(v);
        return r * green(s, 0.5, 1.0, {r}, {0});
    };
    const double ms = 2.0 * (q.integrate(rg, -25.0, std::log(R)) + rg(std::log(R)) / alpha);
    CHECK(std::abs(ms - 1.0) < 1e-4);
}

TEST_CASE("scaling identities") {
    const auto g = KernelSpec::gaussian(2);
    for (double t : {0.2, 5.0}) {
        const double sc = std::pow(t, -0.3 / 2);
        const double lhs = green(g, 0.3, t, {0.4, 0.9}, {0, 0});
        const double rhs = std::pow(t, -2 * 0.3 / 2) * green(g, 0.3, 1.0, {0.4 * sc, 0.9 * sc}, {0, 0});
        CHECK(std::abs(lhs / rhs - 1.0) < 1e-6);
    }
    const auto s = KernelSpec::isotropic_stable(1, 0.8);
    for (double t : {0.2, 5.0}) {
        const double sc = std::pow(t, -0.6 / 0.8);
        const double lhs = green(s, 0.6, t, {1.5}, {0});
        const double rhs = std::pow(t, -0.6 / 0.8) * green(s, 0.6, 1.0, {1.5 * sc}, {0});
        CHECK(std::abs(lhs / rhs - 1.0) < 1e-6);
    }
}

TEST_CASE("derivatives") {
    const auto g = KernelSpec::gaussian(1);
    CHECK(std::abs(frac_green_derivative({g, 0.5, 1.0, {0.7}, {0.7}, 1})) < 1e-8);
    const double d1 = frac_green_derivative({g, 0.5, 1.0, {1.0}, {0.0}, 1});
    CHECK(d1 < 0.0);
    CHECK(frac_green_derivative({g, 0.5, 1.0, {-1.0}, {0.0}, 1}) == doctest::Approx(-d1).epsilon(1e-10));
    const double e = 1e-4;
    CHECK(d1 == doctest::Approx((green(g, 0.5, 1.0, {1 + e}, {0}) - green(g, 0.5, 1.0, {1 - e}, {0})) / (2 * e))
                    .epsilon(1e-6));
    const auto s = KernelSpec::isotropic_stable(1, 1.0);
    const double ds = frac_green_derivative({s, 0.5, 1.0, {2.0}, {0.0}, 1});
    CHECK(ds < 0.0);
    CHECK(ds == doctest::Approx((green(s, 0.5, 1.0, {2 + e}, {0}) - green(s, 0.5, 1.0, {2 - e}, {0})) / (2 * e))
                    .epsilon(1e-5));
    CHECK_THROWS_AS(frac_green_derivative({g, 0.5, 1.0, {1.0}, {0.0}, 3}), CapabilityError);
}

TEST_CASE("argument errors and divergent diagonal") {
    const auto g = KernelSpec::gaussian(1);
    CHECK_THROWS_AS(green(g, 0.5, 0.0, {0}, {0}), DomainError);
    CHECK_THROWS_AS(green(g, 0.5, -1.0, {0}, {0}), DomainError);
    CHECK_THROWS_AS(green(KernelSpec::gaussian(3), 0.5, 1.0, {0, 0, 0}, {0, 0, 0}), SingularPointError);
    // d = 3 off the diagonal is fine
    CHECK(green(KernelSpec::gaussian(3), 0.5, 1.0, {0.1, 0, 0}, {0, 0, 0}) > 0.0);
    // d = 2 diverges logarithmically on the diagonal, d = 1 does not
    CHECK_THROWS_AS(green(KernelSpec::gaussian(2), 0.5, 1.0, {0, 0}, {0, 0}), SingularPointError);
    CHECK(std::isfinite(green(KernelSpec::isotropic_stable(1, 1.5), 0.5, 1.0, {0}, {0})));
    CHECK_THROWS_AS(green(KernelSpec::isotropic_stable(1, 0.8), 0.5, 1.0, {0}, {0}), SingularPointError);
}

TEST_CASE("fd1d subordination agrees with the constant-coefficient path") {
    const auto spec = KernelSpec::variable_diffusion_1d({"one", [](double) { return 1.0; }}, Coefficient::constant(0.0),
                                                        Coefficient::constant(0.0), 10.0);
    const std::vector<double> xs{0.0, 0.5, 1.0, 2.0};
    Fd1dSubordinator sub(spec, FracOrder(0.5), 0.0, xs);
    const auto g = KernelSpec::gaussian(1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto e = sub.evaluate(0.5, i);
        CAPTURE(xs[i]);
        CHECK(std::abs(e.value / green(g, 0.5, 0.5, {xs[i]}, {0}) - 1.0) < 2e-4);
        CHECK(e.truncated_mass < 1e-12);
    }
    // beyond the horizon some base times are dropped and reported
    const auto far = sub.evaluate(50.0, 0);
    CHECK(far.truncated_mass > 0.0);
}

TEST_CASE("frac_solve") {
    const auto g = KernelSpec::gaussian(1);
    SampledFunction1d ones, step, bump;
    for (int i = 0; i <= 2400; ++i) {
        const double y = -60.0 + 0.05 * i;
        ones.y.push_back(y);
        ones.values.push_back(1.0);
        step.y.push_back(y);
        // a jump sampled on a node takes its midpoint value
        step.values.push_back(y > 0.0 ? 1.0 : (y == 0.0 ? 0.5 : 0.0));
    }
    CHECK(std::abs(frac_solve(g, FracOrder(0.5), 1.0, ones, 0.0) - 1.0) < 1e-3);
    CHECK(std::abs(frac_solve(g, FracOrder(0.5), 1.0, step, 0.0) - 0.5) < 1e-3);
    for (int i = 0; i <= 800; ++i) {
        const double y = -2.0 + 0.005 * i;
        bump.y.push_back(y);
        bump.values.push_back(std::exp(-y * y / 0.5));
    }
    // the kernel spreads like t^beta, so small times need beta near 1 to be close
    const double x = 0.3;
    CHECK(std::abs(frac_solve(g, FracOrder(0.8), 1e-4, bump, x) - std::exp(-x * x / 0.5)) < 1e-2);
    SampledFunction1d narrow{{-1.0, 0.0, 1.0}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(frac_solve(g, FracOrder(0.5), 1.0, narrow, 0.0), CoverageError);
    CHECK_THROWS_AS(frac_solve(KernelSpec::gaussian(2), FracOrder(0.5), 1.0, ones, 0.0), CapabilityError);
}
