#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracgreen/quadrature.hpp"

using namespace fracgreen;

TEST_CASE("smooth integrand to full precision") {
    const auto r = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("integrable endpoint singularity") {
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("breaks are honoured for kinks") {
    const auto r = integrate([](double x) { return std::abs(x - 0.3); }, {0.0, 0.3, 1.0});
    CHECK(r.value == doctest::Approx(0.045 + 0.245).epsilon(1e-14));
}

TEST_CASE("log-domain integration far below double range") {
    // int_0^1 exp(-2000 - 3x) dx
    const auto r = integrate_log([](double x) { return LogValue{-2000.0 - 3.0 * x, 1}; }, {0.0, 1.0});
    const double expect = -2000.0 + std::log((1.0 - std::exp(-3.0)) / 3.0);
    CHECK(r.sign == 1);
    CHECK(r.log_abs == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("log-domain integration keeps signs") {
    const auto r = integrate_log([](double x) { return log_value_of(std::sin(x)); }, {0.0, 4.0});
    CHECK(r.value() == doctest::Approx(1.0 - std::cos(4.0)).epsilon(1e-12));
}

TEST_CASE("log_add") {
    CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
    CHECK(log_add(-INFINITY, 1.0) == 1.0);
}
