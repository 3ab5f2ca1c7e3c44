#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fracgreen/errors.hpp"
#include "fracgreen/specfun.hpp"

using namespace fracgreen;
constexpr double pi = std::numbers::pi;

namespace {
double half_closed_form(double x) { return std::pow(x, -1.5) * std::exp(-0.25 / x) / (2.0 * std::sqrt(pi)); }

// int_0^inf f, split at 1, by Boost double-exponential rules
template <class F>
double boost_integral(F f) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    return ts.integrate(f, 0.0, 1.0, 1e-13) + es.integrate(f, 1.0, INFINITY, 1e-13);
}
}  // namespace

TEST_CASE("order types reject out-of-range values") {
    CHECK_THROWS_AS(FracOrder(0.0), DomainError);
    CHECK_THROWS_AS(FracOrder(1.0), DomainError);
    CHECK_THROWS_AS(StableOrder(2.5), DomainError);
    CHECK_NOTHROW(StableOrder(2.0));
}

TEST_CASE("stable density: half-order closed form") {
    CHECK(stable_density(FracOrder(0.5), 1.0) == doctest::Approx(0.2196958).epsilon(1e-6));
    for (double x = 0.02; x < 200.0; x *= 1.3)
        CHECK(stable_density(FracOrder(0.5), x) == doctest::Approx(half_closed_form(x)).epsilon(1e-10));
}

TEST_CASE("stable density: domain") {
    CHECK_THROWS_AS(stable_density(FracOrder(0.5), 0.0), DomainError);
    CHECK_THROWS_AS(stable_density(FracOrder(0.5), -1.0), DomainError);
}

TEST_CASE("stable density: normalization") {
    for (double b : {0.2, 0.35, 0.5, 0.65, 0.8}) {
        const FracOrder beta(b);
        const double mass = boost_integral([&](double x) { return x > 0.0 ? stable_density(beta, x) : 0.0; });
        CAPTURE(b);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("stable density: tail constant") {
    const double x = 1e4;
    CHECK(std::pow(x, 1.5) * stable_density(FracOrder(0.5), x) ==
          doctest::Approx(0.5 / std::tgamma(0.5)).epsilon(0.01));
}

TEST_CASE("stable density: series and integral forms agree near the switch") {
    for (double b : {0.2, 0.35, 0.5, 0.65, 0.8})
        for (double x = 0.8; x <= 1.25; x += 0.05) {
            const double s = std::exp(log_stable_density_series(b, x));
            const double i = std::exp(log_stable_density_integral(b, x));
            CAPTURE(b);
            CAPTURE(x);
            CHECK(std::abs(s - i) < 1e-8);
        }
}

TEST_CASE("stable density: method reporting and small-x asymptotic") {
    CHECK(stable_density_eval(FracOrder(0.5), 2.0).method == DensityMethod::series);
    CHECK(stable_density_eval(FracOrder(0.5), 0.5).method == DensityMethod::integral_rep);
    // leading term is exact for beta = 1/2
    CHECK(std::exp(log_stable_density_small_x(0.5, 0.1)) == doctest::Approx(half_closed_form(0.1)).epsilon(1e-12));
    const double x = 0.02;
    CHECK(std::exp(log_stable_density_small_x(0.3, x) - log_stable_density(FracOrder(0.3), x)) ==
          doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("stable CDF against erfc") {
    for (double x : {0.05, 0.3, 1.0, 4.0})
        CHECK(std::exp(log_stable_cdf(FracOrder(0.5), x)) == doctest::Approx(std::erfc(0.5 / std::sqrt(x))).epsilon(1e-9));
}

TEST_CASE("envelope constants and shapes") {
    const auto k = StableEnvelopeConstants::from(FracOrder(0.5));
    CHECK(k.c_beta == doctest::Approx(0.25));
    for (double b : {0.2, 0.5, 0.7})
        CHECK(stable_c_beta(b) == doctest::Approx((1 - b) * std::pow(b, b / (1 - b))));
    CHECK(stable_density_envelope(FracOrder(0.5), 0.5, k).first == doctest::Approx(std::pow(0.5, -1.5) * std::exp(-0.5)));
    CHECK(stable_density_envelope(FracOrder(0.5), 0.5, k).first == doctest::Approx(1.7155).epsilon(1e-4));
    CHECK(stable_density_envelope(FracOrder(0.5), 2.0, k).second == doctest::Approx(0.35355).epsilon(1e-4));
    CHECK_THROWS_AS(stable_density_envelope(FracOrder(0.5), 0.0, k), DomainError);
}

TEST_CASE("envelope sandwich is tight") {
    for (double b : {0.3, 0.5, 0.7}) {
        const FracOrder beta(b);
        const auto k = StableEnvelopeConstants::from(beta);
        double lo = INFINITY, hi = 0.0;
        for (double x = 0.05; x <= 50.0; x *= 1.1) {
            const double r = stable_density(beta, x) / stable_density_envelope(beta, x, k).second;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        CAPTURE(b);
        CHECK(lo > 0.0);
        CHECK(hi / lo < 10.0);
    }
}

TEST_CASE("subordinator density") {
    const FracOrder b(0.5);
    CHECK(subordinator_density(b, 1.0, 1.0) == doctest::Approx(stable_density(b, 1.0)));
    CHECK(subordinator_density(b, 4.0, 2.0) == doctest::Approx(0.0625 * stable_density(b, 0.125)));
    const double mass = boost_integral([&](double s) { return s > 0.0 ? subordinator_density(b, 2.0, s) : 0.0; });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(subordinator_density(b, 0.0, 1.0), DomainError);
}

TEST_CASE("Mittag-Leffler series") {
    CHECK(ml_series(FracOrder(0.5), 0.0) == 1.0);
    CHECK(ml_series(FracOrder(0.5), -1.0) == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-13));
    CHECK(ml_series(FracOrder(0.5), -1.0) == doctest::Approx(0.4275836).epsilon(1e-7));
    CHECK(std::abs(ml_series(FracOrder(0.999), 1.0) - std::exp(1.0)) < 1e-2);
    // E_{1/2}(z) = exp(z^2) erfc(-z) on the positive side too
    CHECK(ml_series(FracOrder(0.5), 2.0) == doctest::Approx(std::exp(4.0) * std::erfc(-2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(ml_series(FracOrder(0.5), -60.0), RangeError);
}

TEST_CASE("Mittag-Leffler derivative series") {
    // d/dz E_{1/2}(z) at z = -1 from the closed form: 2z e^{z^2} erfc(-z) + 2/sqrt(pi)
    const double z = -1.0;
    const double expect = 2 * z * std::exp(z * z) * std::erfc(-z) + 2.0 / std::sqrt(pi);
    CHECK(ml_series_derivative(FracOrder(0.5), z) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ml_series_derivative(FracOrder(0.3), 0.0) == doctest::Approx(1.0 / std::tgamma(1.3)).epsilon(1e-14));
}

TEST_CASE("Mittag-Leffler integral form") {
    CHECK(ml_pz(FracOrder(0.5), 0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(ml_pz(FracOrder(0.5), -1.0) - 0.4275836) < 1e-6);
    CHECK(std::abs(ml_pz(FracOrder(0.3), -5.0) - ml_series(FracOrder(0.3), -5.0)) < 1e-6);
    CHECK_THROWS_AS(ml_pz(FracOrder(0.5), 0.1), DomainError);
}

TEST_CASE("Mittag-Leffler is completely monotone on the negative axis") {
    for (double b : {0.3, 0.6, 0.9}) {
        const FracOrder beta(b);
        std::vector<double> v;
        for (double lam = 0.0; lam <= 10.0; lam += 0.5) v.push_back(ml_series(beta, -lam));
        for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
        // first three differences alternate in sign at the start
        const double d1 = v[1] - v[0], d2 = v[2] - 2 * v[1] + v[0], d3 = v[3] - 3 * v[2] + 3 * v[1] - v[0];
        CHECK(d1 < 0.0);
        CHECK(d2 > 0.0);
        CHECK(d3 < 0.0);
    }
}

TEST_CASE("potential density") {
    CHECK(potential_density(FracOrder(0.5), 0.0, 1.0) == doctest::Approx(1.0 / std::tgamma(0.5)).epsilon(1e-12));
    CHECK(potential_density(FracOrder(0.5), 0.0, 4.0) == doctest::Approx(0.2820948).epsilon(1e-6));
    const FracOrder b(0.5);
    const double q = boost_integral(
        [&](double r) { return r > 0.0 ? std::exp(-r) * subordinator_density(b, r, 1.0) : 0.0; });
    CHECK(std::abs(potential_density(b, 1.0, 1.0) - q) < 1e-5);
    CHECK_THROWS_AS(potential_density(b, 1.0, 0.0), DomainError);
}

TEST_CASE("stable density: finite and continuous far into the left tail") {
    for (double b : {0.2, 0.5, 0.8})
        for (double x : {1e-300, 1e-100, 1e-30, 1e-10, 1e-3}) {
            const double v = stable_density(FracOrder(b), x);
            CAPTURE(b);
            CAPTURE(x);
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    // across the switch to the asymptotic form
    const double b = 0.8, K = 1e8, x = std::pow(K, -(1 - b) / b);
    const double lo = log_stable_density(FracOrder(b), x * (1 - 1e-9));
    const double hi = log_stable_density(FracOrder(b), x * (1 + 1e-9));
    CHECK(std::abs(hi - lo) / std::abs(lo) < 1e-7);
}
