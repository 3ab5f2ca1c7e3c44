#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fracgreen/errors.hpp"
#include "fracgreen/harness.hpp"
#include "fracgreen/report_io.hpp"

using namespace fracgreen;

namespace {
bool has_regime(const VerificationReport& r, Regime g) {
    return std::any_of(r.regimes.begin(), r.regimes.end(), [&](const RegimeSummary& s) { return s.regime == g && s.count > 0; });
}
}  // namespace

TEST_CASE("power fit on synthetic data") {
    std::vector<double> x, ly;
    for (double v = 1.0; v < 100.0; v *= 1.5) {
        x.push_back(v);
        ly.push_back(std::log(2.0 * std::pow(v, -3.0)));
    }
    const auto f = fit_constants(x, ly, FitModel::power);
    CHECK(std::abs(f.exponent.value + 3.0) < 1e-6);
    CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(f.r_squared > 0.999999);
}

TEST_CASE("power-plus-exponential fit on synthetic data") {
    std::vector<double> x, ly;
    for (double v = 1.0; v < 200.0; v *= 1.4) {
        x.push_back(v);
        ly.push_back(-std::log(v) - 2.0 * std::pow(v, 2.0 / 3.0));
    }
    const auto f = fit_constants(x, ly, FitModel::power_plus_exponential, 2.0 / 3.0);
    CHECK(std::abs(f.rate.value - 2.0) < 1e-3);
    CHECK(std::abs(f.exponent.value + 1.0) < 1e-3);
    CHECK(f.rate.ci_low <= f.rate.value);
}

TEST_CASE("fit needs enough points") {
    std::vector<double> x{1, 2, 3, 4, 5, 6, 7}, ly{0, 1, 2, 3, 4, 5, 6};
    CHECK_THROWS_AS(fit_constants(x, ly, FitModel::power), FitError);
}

TEST_CASE("ols intervals") {
    // y = 1 + 2 x with small deterministic noise
    std::vector<double> one, xs, y;
    for (int i = 0; i < 20; ++i) {
        one.push_back(1.0);
        xs.push_back(i);
        y.push_back(1.0 + 2.0 * i + ((i % 3) - 1) * 0.01);
    }
    const auto r = ols({one, xs}, y);
    CHECK(r.coef[1].value == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(r.coef[1].ci_low < 2.0);
    CHECK(r.coef[1].ci_high > 2.0);
}

TEST_CASE("grid construction") {
    const auto g = SweepGrid::log_spaced(0.1, 10, 0.01, 10, 5);
    CHECK(g.t.size() == 11);
    CHECK(g.r.front() == 0.0);
    CHECK(g.r.size() == 17);
    CHECK_THROWS_AS(SweepGrid::log_spaced(0.1, 10, 0.01, 10, 4), SpecError);
    const auto s = SweepGrid::default_for(Family::stable, 0.5, 1.0);
    double om_lo = INFINITY, om_hi = 0.0;
    for (double t : s.t)
        for (double r : s.r)
            if (r > 0) {
                const double om = r * std::pow(t, -0.5);
                om_lo = std::min(om_lo, om);
                om_hi = std::max(om_hi, om);
            }
    CHECK(om_lo <= 1e-3);
    CHECK(om_hi >= 1e3);
}

TEST_CASE("global diffusion, d = 3") {
    const auto grid = SweepGrid::default_for(Family::diffusion, 0.5);
    const auto r = verify_envelope(Theorem::global_diffusion, KernelSpec::gaussian(3), 0.5, grid);
    CHECK(r.pass);
    CHECK(has_regime(r, Regime::on_diagonal));
    CHECK(has_regime(r, Regime::off_diagonal));
    for (const auto& s : r.regimes) CHECK(s.log_ratio_max - s.log_ratio_min < std::log(1e3));
    CHECK(r.tail.present);
    CHECK(r.tail.r_squared >= 0.99);
    CHECK(r.tail.rate_ci_low > 0.0);
    CHECK(r.exp_constant_low <= r.exp_constant_high);
    CHECK(r.failed_points == 0);
    // the r = 0 column diverges in d = 3 and is flagged
    CHECK(std::any_of(r.points.begin(), r.points.end(), [](const ReportPoint& p) { return p.excluded && p.note == "singular"; }));
    // idempotence, down to the serialized bytes
    const auto again = verify_envelope(Theorem::global_diffusion, KernelSpec::gaussian(3), 0.5, grid);
    CHECK(again == r);
    CHECK(report_to_json(again).dump() == report_to_json(r).dump());
    CHECK(report_csv(again) == report_csv(r));
}

TEST_CASE("global stable, alpha = 1: far-field slope") {
    const auto grid = SweepGrid::default_for(Family::stable, 0.5, 1.0);
    const auto r = verify_envelope(Theorem::global_stable, KernelSpec::isotropic_stable(1, 1.0), 0.5, grid);
    CHECK(r.pass);
    const auto far = std::find_if(r.slopes.begin(), r.slopes.end(), [](const SlopeCheck& s) { return s.name == "far_field"; });
    REQUIRE(far != r.slopes.end());
    CHECK(std::abs(far->slope + 2.0) <= 0.1);
}

TEST_CASE("derivative, Gaussian d = 1: zero column excluded, not failed") {
    const auto grid = SweepGrid::log_spaced(0.1, 10, 0.01, 10, 5);
    const auto r = verify_derivative_envelope(DerivativeProp::global_diffusion, KernelSpec::gaussian(1), 0.5, 1, grid);
    CHECK(r.one_sided);
    CHECK(r.pass);
    CHECK(r.failed_points == 0);
    std::size_t zeros = 0;
    for (const auto& p : r.points)
        if (p.r == 0.0) {
            CHECK(p.excluded);
            CHECK(p.note == "zero_derivative");
            ++zeros;
        }
    CHECK(zeros == grid.t.size());
    CHECK(std::isfinite(r.constants.prefactor_high));
}

TEST_CASE("local small-time stable derivative honours the t^-beta split") {
    SweepGrid grid;
    grid.t = {0.5};
    for (double r = 0.01; r < 200; r *= 1.25) grid.r.push_back(r);
    HarnessOptions opt;
    opt.horizon_T = 1.0;
    const auto rep = verify_derivative_envelope(DerivativeProp::local_stable_small_time, KernelSpec::isotropic_stable(1, 1.0),
                                                0.5, 1, grid, opt);
    const double th = std::pow(0.5, -0.5);
    std::size_t mid = 0, far = 0;
    for (const auto& p : rep.points) {
        if (p.excluded) continue;
        if (p.omega <= 1.0) {
            CHECK(p.regime == Regime::on_diagonal);
        } else if (p.omega <= th) {
            CHECK(p.regime == Regime::intermediate);
            ++mid;
        } else {
            CHECK(p.regime == Regime::far_tail);
            ++far;
        }
    }
    CHECK(mid > 0);
    CHECK(far > 0);
    CHECK(std::isfinite(rep.constants.prefactor_high));
}

TEST_CASE("selector and kernel must agree") {
    const auto grid = SweepGrid::log_spaced(0.1, 1, 0.1, 1, 5);
    CHECK_THROWS_AS(verify_envelope(Theorem::global_stable, KernelSpec::gaussian(1), 0.5, grid), SpecError);
    CHECK_THROWS_AS(verify_envelope(Theorem::global_diffusion, KernelSpec::isotropic_stable(1, 1.0), 0.5, grid), SpecError);
    CHECK_THROWS_AS(verify_envelope(Theorem::local_diffusion, KernelSpec::gaussian(1), 0.5, grid), SpecError);
    const auto an = KernelSpec::anisotropic_stable_2d(1.0, SpectralMeasure::normalized_uniform(1.0));
    CHECK_THROWS_AS(verify_derivative_envelope(DerivativeProp::global_stable, an, 0.5, 1, grid), CapabilityError);
}

TEST_CASE("local diffusion on fd1d reproduces the global Gaussian report") {
    const auto grid = SweepGrid::log_spaced(0.1, 1, 0.02, 3, 5);
    HarnessOptions opt;
    opt.horizon_T = 1.0;
    const auto fd = KernelSpec::variable_diffusion_1d({"one", [](double) { return 1.0; }}, Coefficient::constant(0.0),
                                                      Coefficient::constant(0.0), 10.0);
    const auto local = verify_envelope(Theorem::local_diffusion, fd, 0.5, grid, opt);
    const auto global = verify_envelope(Theorem::global_diffusion, KernelSpec::gaussian(1), 0.5, grid, opt);
    CHECK(local.pass);
    CHECK(global.pass);
    CHECK(max_log_ratio_difference(local, global) <= 1e-3);
}

TEST_CASE("local diffusion derivative bounds on fd1d") {
    HarnessOptions opt;
    opt.horizon_T = 4.0;
    const auto fd = KernelSpec::variable_diffusion_1d({"bump", [](double x) { return 1.0 + 0.3 * std::sin(x); }},
                                                      Coefficient::constant(0.0), Coefficient::constant(0.0), 10.0);
    const auto small = verify_derivative_envelope(DerivativeProp::local_diffusion_small_time, fd, 0.5, 1,
                                                  SweepGrid::log_spaced(0.1, 1, 0.02, 3, 5), opt);
    CHECK(small.one_sided);
    CHECK(small.pass);
    CHECK(std::isfinite(small.constants.prefactor_high));
    const auto large = verify_derivative_envelope(DerivativeProp::local_diffusion_large_time, fd, 0.5, 1,
                                                  SweepGrid::log_spaced(1, 4, 0.02, 3, 5), opt);
    CHECK(large.pass);
    CHECK(std::isfinite(large.constants.prefactor_high));
}
