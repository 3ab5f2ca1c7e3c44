#include "fracgreen/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "fracgreen/errors.hpp"
#include "fracgreen/parallel.hpp"

namespace fracgreen {

const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::global_diffusion: return "global_diffusion";
        case Theorem::global_stable: return "global_stable";
        case Theorem::local_diffusion: return "local_diffusion";
        case Theorem::local_stable: return "local_stable";
    }
    return "?";
}

const char* to_string(DerivativeProp p) {
    switch (p) {
        case DerivativeProp::global_diffusion: return "deriv_global_diffusion";
        case DerivativeProp::global_stable: return "deriv_global_stable";
        case DerivativeProp::local_diffusion_small_time: return "deriv_local_diffusion_small_time";
        case DerivativeProp::local_diffusion_large_time: return "deriv_local_diffusion_large_time";
        case DerivativeProp::local_stable_small_time: return "deriv_local_stable_small_time";
        case DerivativeProp::local_stable_large_time: return "deriv_local_stable_large_time";
    }
    return "?";
}

SweepGrid SweepGrid::log_spaced(double t_lo, double t_hi, double r_lo, double r_hi, int per_decade,
                                bool include_zero) {
    if (!(t_lo > 0.0 && t_hi >= t_lo && r_lo > 0.0 && r_hi >= r_lo)) throw DomainError("bad grid bounds");
    if (per_decade < 5) throw SpecError("grids need at least 5 points per decade");
    auto span = [&](double lo, double hi) {
        const int n = std::max(1, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade - 1e-9)));
        std::vector<double> v;
        if (hi == lo) return std::vector<double>{lo};
        for (int i = 0; i <= n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
        return v;
    };
    SweepGrid g;
    g.t = span(t_lo, t_hi);
    if (include_zero) g.r.push_back(0.0);
    for (double r : span(r_lo, r_hi)) g.r.push_back(r);
    return g;
}

SweepGrid SweepGrid::default_for(Family family, double beta, double alpha, double t_hi) {
    if (family == Family::diffusion) return log_spaced(std::min(0.1, t_hi), t_hi, 1e-2, 10.0);
    // Omega depends on (t, r) only through r^alpha t^-beta, so a short t
    // range suffices and the r range spans the Omega windows.
    const double t_lo = std::min(0.25, t_hi / 4.0), tt = std::min(4.0, t_hi);
    const double r_lo = std::pow(1e-8 * std::pow(t_lo, beta), 1.0 / alpha);
    const double r_hi = std::pow(1e4 * std::pow(tt, beta), 1.0 / alpha);
    return log_spaced(t_lo, tt, r_lo, r_hi);
}

bool VerificationReport::operator==(const VerificationReport& o) const {
    auto same_consts = [](const EnvelopeConstants& a, const EnvelopeConstants& b) {
        return a.c_beta_exponent == b.c_beta_exponent && a.prefactor_low == b.prefactor_low &&
               a.prefactor_high == b.prefactor_high && a.horizon_T == b.horizon_T &&
               a.globalization_rate == b.globalization_rate;
    };
    return schema_version == o.schema_version && selector == o.selector && kernel == o.kernel && d == o.d &&
           alpha == o.alpha && beta == o.beta && k == o.k && one_sided == o.one_sided &&
           ratio_ceiling == o.ratio_ceiling && r2_min == o.r2_min && same_consts(constants, o.constants) &&
           exp_constant_low == o.exp_constant_low && exp_constant_high == o.exp_constant_high &&
           points == o.points && regimes == o.regimes && tail == o.tail && slopes == o.slopes &&
           failed_points == o.failed_points && pass == o.pass && config == o.config;
}

// ---- regression ----

OlsResult ols(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
    const std::size_t n = y.size(), p = columns.size();
    if (n < p + 1) throw FitError("not enough points for the regression");
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        Y(i) = y[i];
        for (std::size_t j = 0; j < p; ++j) X(i, j) = columns[j][i];
    }
    const Eigen::VectorXd b = X.colPivHouseholderQr().solve(Y);
    const Eigen::VectorXd res = Y - X * b;
    const double sse = res.squaredNorm();
    const double mean = Y.mean();
    const double sst = (Y.array() - mean).square().sum();
    OlsResult out;
    out.n = n;
    out.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
    const double dof = static_cast<double>(n - p);
    const double s2 = sse / dof;
    const Eigen::MatrixXd cov = s2 * (X.transpose() * X).inverse();
    const double q = boost::math::quantile(boost::math::students_t(dof), 0.975);
    for (std::size_t j = 0; j < p; ++j) {
        const double half = q * std::sqrt(std::max(0.0, cov(j, j)));
        out.coef.push_back({b(j), b(j) - half, b(j) + half});
    }
    return out;
}

FitResult fit_constants(const std::vector<double>& x, const std::vector<double>& log_y, FitModel model, double q) {
    if (x.size() != log_y.size()) throw ShapeError("x and y sizes differ");
    if (x.size() < 8) throw FitError("fit needs at least 8 points");
    std::vector<double> one(x.size(), 1.0), lx(x.size()), xq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(log_y[i])) throw FitError("fit needs positive x and finite log y");
        lx[i] = std::log(x[i]);
        xq[i] = -std::pow(x[i], q);
    }
    FitResult r;
    r.model = model;
    r.q = q;
    r.n = x.size();
    const OlsResult o = model == FitModel::power ? ols({one, lx}, log_y) : ols({one, lx, xq}, log_y);
    r.log_prefactor = o.coef[0];
    r.prefactor = std::exp(o.coef[0].value);
    r.exponent = o.coef[1];
    if (model == FitModel::power_plus_exponential) r.rate = o.coef[2];
    r.r_squared = o.r_squared;
    return r;
}

// ---- sweeps ----

namespace {

struct Setup {
    Family family;
    bool derivative;
    DerivCase dc;
    bool local;
    std::string selector;
};

void check_family(const KernelSpec& kernel, Family f) {
    const auto fam = kernel.family();
    const bool diff = fam == KernelFamily::constant_diffusion || fam == KernelFamily::variable_diffusion_1d;
    const bool stab = (fam == KernelFamily::isotropic_stable && kernel.alpha() < 2.0) ||
                      fam == KernelFamily::anisotropic_stable_2d;
    if (f == Family::diffusion && !diff)
        throw SpecError(std::string("diffusion estimate requested for a ") + to_string(fam) + " kernel");
    if (f == Family::stable && !stab)
        throw SpecError(std::string("stable estimate requested for a ") + to_string(fam) + " kernel");
}

Setup setup_for(Theorem w) {
    switch (w) {
        case Theorem::global_diffusion: return {Family::diffusion, false, DerivCase::global, false, to_string(w)};
        case Theorem::global_stable: return {Family::stable, false, DerivCase::global, false, to_string(w)};
        case Theorem::local_diffusion: return {Family::diffusion, false, DerivCase::global, true, to_string(w)};
        case Theorem::local_stable: return {Family::stable, false, DerivCase::global, true, to_string(w)};
    }
    throw SpecError("unknown theorem selector");
}

Setup setup_for(DerivativeProp w) {
    switch (w) {
        case DerivativeProp::global_diffusion: return {Family::diffusion, true, DerivCase::global, false, to_string(w)};
        case DerivativeProp::global_stable: return {Family::stable, true, DerivCase::global, false, to_string(w)};
        case DerivativeProp::local_diffusion_small_time:
            return {Family::diffusion, true, DerivCase::local_small_time, true, to_string(w)};
        case DerivativeProp::local_diffusion_large_time:
            return {Family::diffusion, true, DerivCase::local_large_time, true, to_string(w)};
        case DerivativeProp::local_stable_small_time:
            return {Family::stable, true, DerivCase::local_small_time, true, to_string(w)};
        case DerivativeProp::local_stable_large_time:
            return {Family::stable, true, DerivCase::local_large_time, true, to_string(w)};
    }
    throw SpecError("unknown derivative selector");
}

struct Raw {
    double t, r;
    RegimePoint p;
    double log_G = 0.0;
    bool excluded = false;
    bool failed = false;
    std::string note;
};

// log|G| (or of the k-th x_1 derivative) at x - y = r e_1, every point.
void evaluate_points(std::vector<Raw>& pts, const KernelSpec& kernel, double beta, int k,
                     const SubordinationOptions& sub) {
    const int d = kernel.dim();
    if (kernel.family() == KernelFamily::variable_diffusion_1d) {
        const Fd1dSolver& s = kernel.fd1d();
        const double reach = s.half_width() - 5.0;
        std::vector<double> xs;
        std::map<double, std::size_t> index;
        for (const auto& q : pts)
            if (!index.count(q.r) && q.r <= reach) {
                index[q.r] = xs.size();
                xs.push_back(q.r);
            }
        std::unique_ptr<Fd1dSubordinator> sub_fd;
        std::string err;
        try {
            sub_fd = std::make_unique<Fd1dSubordinator>(kernel, FracOrder(beta), 0.0, xs, k, sub);
        } catch (const Error& e) {
            err = e.what();
        }
        parallel_for(pts.size(), [&](std::size_t i) {
            auto& q = pts[i];
            if (q.excluded) return;
            if (!sub_fd) {
                q.excluded = q.failed = true;
                q.note = err;
                return;
            }
            auto it = index.find(q.r);
            if (it == index.end()) {
                q.excluded = true;
                q.note = "outside_domain";
                return;
            }
            try {
                const auto g = sub_fd->evaluate(q.t, it->second);
                if (g.sign == 0) {
                    q.excluded = true;
                    q.note = "zero";
                } else {
                    q.log_G = g.log_abs;
                }
            } catch (const Error& e) {
                q.excluded = q.failed = true;
                q.note = e.what();
            }
        });
        return;
    }
    parallel_for(pts.size(), [&](std::size_t i) {
        auto& q = pts[i];
        if (q.excluded) return;
        Point x(d, 0.0), y(d, 0.0);
        x[0] = q.r;
        try {
            const auto g = evaluate_frac_green({kernel, beta, q.t, x, y, k}, sub);
            if (g.sign == 0) {
                q.excluded = true;
                q.note = "zero";
            } else {
                q.log_G = g.log_abs;
            }
        } catch (const SingularPointError&) {
            q.excluded = true;
            q.note = "singular";
        } catch (const Error& e) {
            q.excluded = q.failed = true;
            q.note = e.what();
        }
    });
}

VerificationReport run(const Setup& S, const KernelSpec& kernel, double beta, int k, const SweepGrid& grid,
                       const HarnessOptions& opt) {
    FracOrder b(beta);
    check_family(kernel, S.family);
    if (k < 0 || k > kernel.max_derivative()) throw CapabilityError("derivative order beyond kernel capability");
    if (S.local && !opt.horizon_T) throw SpecError("local estimates need a horizon T");
    if (kernel.family() == KernelFamily::anisotropic_stable_2d && k > 0)
        throw CapabilityError("anisotropic kernel derivatives are not available");
    const int d = kernel.dim();
    const double alpha = S.family == Family::diffusion ? 2.0 : kernel.alpha();

    EnvelopeConstants base;
    if (S.local) base.horizon_T = opt.horizon_T;

    VerificationReport rep;
    rep.selector = S.selector;
    rep.kernel = to_string(kernel.family());
    rep.d = d;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.k = k;
    rep.one_sided = S.derivative;
    rep.ratio_ceiling = opt.ratio_ceiling;
    rep.r2_min = opt.r2_min;

    std::vector<Raw> pts;
    for (double t : grid.t) {
        if (S.local && t > *opt.horizon_T) continue;
        if (S.dc == DerivCase::local_small_time && t > 1.0) continue;
        if (S.dc == DerivCase::local_large_time && t < 1.0) continue;
        for (double r : grid.r) {
            Raw q;
            q.t = t;
            q.r = r;
            q.p = compute_omega(S.family, t, r, beta, S.family == Family::stable ? std::optional<double>(alpha)
                                                                                  : std::nullopt);
            if (S.derivative) q.p.regime = classify_derivative_regime(q.p, beta, S.dc);
            if (S.derivative && r == 0.0) {
                q.excluded = true;
                q.note = "zero_derivative";
            }
            pts.push_back(q);
        }
    }
    evaluate_points(pts, kernel, beta, k, opt.sub);

    auto log_shape = [&](const RegimePoint& p, double C) {
        EnvelopeConstants c = base;
        c.c_beta_exponent = C;
        if (S.family == Family::diffusion)
            return S.derivative ? envelope_diffusion_deriv(d, beta, p, c, S.dc).log_value
                                : envelope_diffusion(d, beta, p, c).log_value;
        return S.derivative ? envelope_stable_deriv(d, k, alpha, beta, p, c, S.dc).log_value
                            : envelope_stable(d, alpha, beta, p, c).log_value;
    };
    // argument of the exponential factor, 0 outside the exponential branches
    auto exp_arg = [&](const RegimePoint& p) {
        if (S.family != Family::diffusion || !(p.omega > 1.0)) return 0.0;
        if (S.dc == DerivCase::local_large_time) return std::pow(p.r, 2.0 / (2.0 - beta));
        return std::pow(p.omega, 1.0 / (2.0 - beta));
    };

    // exponential tail: regress log|G| - polynomial part on the argument
    double C_used = 1.0;
    if (S.family == Family::diffusion) {
        std::vector<double> one, z, y;
        for (const auto& q : pts) {
            if (q.excluded || !(q.p.omega > 1.0)) continue;
            const double zz = exp_arg(q.p);
            one.push_back(1.0);
            z.push_back(zz);
            y.push_back(q.log_G - (log_shape(q.p, 1.0) + zz));
        }
        rep.tail.n = y.size();
        if (y.size() >= 3) {
            for (auto& v : z) v = -v;
            const auto o = ols({one, z}, y);
            rep.tail.present = true;
            rep.tail.intercept = o.coef[0].value;
            rep.tail.rate = o.coef[1].value;
            rep.tail.rate_ci_low = o.coef[1].ci_low;
            rep.tail.rate_ci_high = o.coef[1].ci_high;
            rep.tail.r_squared = o.r_squared;
            rep.tail.pass = o.r_squared >= opt.r2_min && o.coef[1].ci_low > 0.0;
            rep.exp_constant_low = rep.tail.rate_ci_low;
            rep.exp_constant_high = rep.tail.rate_ci_high;
            // an upper bound wants the slower decay
            C_used = S.derivative ? rep.tail.rate_ci_low : rep.tail.rate;
            if (!(C_used > 0.0)) C_used = rep.tail.rate > 0.0 ? rep.tail.rate : 1.0;
        }
    }

    rep.failed_points = 0;
    double lo = INFINITY, hi = -INFINITY;
    std::map<Regime, RegimeSummary> sums;
    for (const auto& q : pts) {
        ReportPoint P;
        P.t = q.t;
        P.r = q.r;
        P.omega = q.p.omega;
        P.regime = q.p.regime;
        P.excluded = q.excluded;
        P.note = q.note;
        if (q.failed) ++rep.failed_points;
        if (!q.excluded) {
            P.log_G = q.log_G;
            P.log_envelope = log_shape(q.p, C_used);
            P.log_ratio = P.log_G - P.log_envelope;
            lo = std::min(lo, P.log_ratio);
            hi = std::max(hi, P.log_ratio);
            auto& s = sums[P.regime];
            if (s.count == 0) {
                s.regime = P.regime;
                s.log_ratio_min = s.log_ratio_max = P.log_ratio;
            }
            ++s.count;
            s.log_ratio_min = std::min(s.log_ratio_min, P.log_ratio);
            s.log_ratio_max = std::max(s.log_ratio_max, P.log_ratio);
        }
        rep.points.push_back(P);
    }
    std::vector<Regime> needed{Regime::on_diagonal, Regime::off_diagonal};
    if (S.dc == DerivCase::local_small_time) needed = {Regime::on_diagonal, Regime::intermediate, Regime::far_tail};
    for (Regime g : needed) {
        RegimeSummary s = sums.count(g) ? sums[g] : RegimeSummary{g, 0, 0.0, 0.0, false};
        if (s.count > 0) {
            const bool finite = std::isfinite(s.log_ratio_min) && std::isfinite(s.log_ratio_max);
            s.pass = S.derivative ? finite : finite && s.log_ratio_max - s.log_ratio_min < std::log(opt.ratio_ceiling);
        }
        rep.regimes.push_back(s);
    }

    // power-law windows for the stable family
    if (S.family == Family::stable && S.dc != DerivCase::local_small_time) {
        auto slope_in = [&](const std::string& name, double om_lo, double om_hi, double expected, double tol) {
            SlopeCheck sc;
            sc.name = name;
            sc.omega_lo = om_lo;
            sc.omega_hi = om_hi;
            sc.expected = expected;
            sc.tolerance = tol;
            std::vector<double> one, lx, y;
            for (const auto& q : pts) {
                if (q.excluded || q.p.omega < om_lo || q.p.omega > om_hi) continue;
                one.push_back(1.0);
                lx.push_back(std::log(q.p.omega));
                // G t^{(d+k) beta / alpha} depends on Omega alone
                y.push_back(q.log_G + (d + k) * beta / alpha * std::log(q.t));
            }
            sc.n = y.size();
            if (sc.n >= 8) {
                const auto o = ols({one, lx}, y);
                sc.slope = o.coef[1].value;
                sc.ci_low = o.coef[1].ci_low;
                sc.ci_high = o.coef[1].ci_high;
                sc.pass = std::abs(sc.slope - expected) <= tol;
            }
            rep.slopes.push_back(sc);
        };
        const double tol = S.derivative ? opt.deriv_slope_tol : opt.slope_tol;
        double om_max = 0.0;
        for (const auto& q : pts) om_max = std::max(om_max, q.p.omega);
        slope_in("far_field", opt.large_omega_min, std::max(om_max, opt.large_omega_min), -1.0 - (d + k) / alpha, tol);
        if (!S.derivative && d > alpha) slope_in("near_field", 0.0, opt.small_omega_max, 1.0 - d / alpha, tol);
    }

    rep.constants = base;
    rep.constants.c_beta_exponent = C_used;
    if (std::isfinite(lo)) {
        rep.constants.prefactor_low = std::exp(lo);
        rep.constants.prefactor_high = std::exp(hi);
    }
    bool ok = !rep.points.empty() && rep.failed_points == 0 && std::isfinite(lo);
    for (const auto& s : rep.regimes) ok = ok && s.pass;
    if (S.family == Family::diffusion && !S.derivative) ok = ok && rep.tail.pass;
    for (const auto& s : rep.slopes) ok = ok && s.pass;
    rep.pass = ok;
    return rep;
}

}  // namespace

VerificationReport verify_envelope(Theorem which, const KernelSpec& kernel, double beta, const SweepGrid& grid,
                                   const HarnessOptions& opt) {
    return run(setup_for(which), kernel, beta, 0, grid, opt);
}

VerificationReport verify_derivative_envelope(DerivativeProp which, const KernelSpec& kernel, double beta, int k,
                                              const SweepGrid& grid, const HarnessOptions& opt) {
    if (k < 1) throw DomainError("derivative order must be >= 1");
    return run(setup_for(which), kernel, beta, k, grid, opt);
}

double max_log_ratio_difference(const VerificationReport& a, const VerificationReport& b) {
    std::map<std::pair<double, double>, const ReportPoint*> in_b;
    for (const auto& p : b.points)
        if (!p.excluded) in_b[{p.t, p.r}] = &p;
    double worst = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : a.points) {
        if (p.excluded) continue;
        auto it = in_b.find({p.t, p.r});
        if (it == in_b.end()) continue;
        // same envelope for both: the ratio difference is the difference in G
        const double diff = std::abs(p.log_G - it->second->log_G);
        worst = std::isnan(worst) ? diff : std::max(worst, diff);
    }
    return worst;
}

}  // namespace fracgreen
