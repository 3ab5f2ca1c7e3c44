#include "fracgreen/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracgreen/errors.hpp"
#include "fracgreen/parallel.hpp"
#include "fracgreen/subordination.hpp"

namespace fracgreen {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::size_t kChunk = 1024;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Distinct seed families for the different random inputs of one campaign.
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ splitmix64(tag)); }

std::size_t chunks_for(std::size_t n) { return (n + kChunk - 1) / kChunk; }

double log_erfc(double z) {
    if (z < 20.0) return std::log(std::erfc(z));
    const double iz2 = 1.0 / (z * z);
    return -z * z - std::log(z * std::sqrt(pi)) + std::log1p(-0.5 * iz2 + 0.75 * iz2 * iz2 - 1.875 * iz2 * iz2 * iz2);
}

}  // namespace

void McConfig::validate() const {
    if (sample_count == 0) throw DomainError("sample_count must be positive");
    if (!(time_step > 0.0)) throw DomainError("time_step must be positive");
    if (!(bracket_tol > 0.0)) throw DomainError("bracket_tol must be positive");
    if (histogram_bins < 1) throw DomainError("histogram_bins must be positive");
}

double Rng::uniform() {
    // 53 random bits, shifted off zero
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

Rng substream(std::uint64_t seed, std::uint64_t index) { return Rng(splitmix64(seed ^ splitmix64(index + 1))); }

double sample_stable_increment(FracOrder beta, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    const double b = beta.value();
    const double u = pi * rng.uniform();
    const double e = rng.exponential();
    const double logs = (1.0 - b) / b * (log_zolotarev_a(b, u) - std::log(e));
    return std::exp(logs + std::log(dt) / b);
}

// ---- Levy kernels ----

LevyKernelSpec LevyKernelSpec::pure_stable(double beta) {
    FracOrder b(beta);
    return mixture({{1.0, b.value()}}, beta, beta);
}

LevyKernelSpec LevyKernelSpec::mixture(std::vector<Component> comps, double beta1, double beta2) {
    if (comps.empty()) throw SpecError("mixture needs at least one component");
    for (const auto& c : comps) {
        if (!(c.weight > 0.0)) throw SpecError("mixture weights must be positive");
        FracOrder check(c.beta);
    }
    FracOrder b1(beta1), b2(beta2);
    if (beta1 > beta2) throw SpecError("sandwich orders need beta1 <= beta2");
    LevyKernelSpec k;
    k.comps_ = std::move(comps);
    k.beta1_ = beta1;
    k.beta2_ = beta2;
    return k;
}

double LevyKernelSpec::density(double s) const {
    double v = 0.0;
    for (const auto& c : comps_) v += c.weight * (-1.0 / std::tgamma(-c.beta)) * std::pow(s, -1.0 - c.beta);
    return v;
}

double LevyKernelSpec::laplace_exponent(double lambda) const {
    double v = 0.0;
    for (const auto& c : comps_) v += c.weight * std::pow(lambda, c.beta);
    return v;
}

SandwichCertificate LevyKernelSpec::verify() const {
    // Each component is a positive multiple of s^{-1-b_i}; the ratio to
    // s^{-1-b1} or s^{-1-b2} is monotone in s, so the bounds hold with finite
    // constants iff b1 <= b_i <= b2, and the extreme ratios sit at s = 1.
    for (const auto& c : comps_)
        if (c.beta < beta1_ || c.beta > beta2_)
            throw CertificateError("component order " + std::to_string(c.beta) + " outside the declared sandwich [" +
                                   std::to_string(beta1_) + ", " + std::to_string(beta2_) + "]");
    const double n1 = density(1.0);
    return {n1, n1, beta1_, beta2_};
}

// ---- inverse subordinators ----

double inverse_subordinator_step(const McConfig& cfg) {
    double h = cfg.time_step;
    while (h > cfg.bracket_tol) h *= 0.5;
    return h;
}

std::vector<std::vector<double>> sample_inverse_subordinator_levels(const LevyKernelSpec& nu,
                                                                    const std::vector<double>& ts,
                                                                    const McConfig& cfg) {
    cfg.validate();
    if (ts.empty()) return {};
    for (double t : ts)
        if (!(t > 0.0)) throw DomainError("passage level must be positive");
    std::vector<std::size_t> order(ts.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ts[a] < ts[b]; });

    const double h = inverse_subordinator_step(cfg);
    std::vector<double> scale;
    std::vector<FracOrder> betas;
    for (const auto& c : nu.components()) {
        betas.emplace_back(c.beta);
        scale.push_back(c.weight * h);
    }
    const std::size_t n = cfg.sample_count;
    std::vector<std::vector<double>> out(ts.size(), std::vector<double>(n));
    parallel_for(chunks_for(n), [&](std::size_t ch) {
        Rng rng = substream(cfg.seed, ch);
        const std::size_t lo = ch * kChunk, hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) {
            double s = 0.0, x = 0.0;
            std::size_t j = 0, steps = 0;
            while (j < order.size()) {
                if (++steps > cfg.max_steps_per_path) throw ResourceError("path step budget exceeded");
                for (std::size_t c = 0; c < betas.size(); ++c) x += sample_stable_increment(betas[c], scale[c], rng);
                while (j < order.size() && x >= ts[order[j]]) out[order[j++]][i] = s + 0.5 * h;
                s += h;
            }
        }
    });
    return out;
}

std::vector<double> sample_inverse_subordinator(const LevyKernelSpec& nu, double t, const McConfig& cfg) {
    return std::move(sample_inverse_subordinator_levels(nu, {t}, cfg)[0]);
}

std::vector<double> sample_inverse_subordinator(FracOrder beta, double t, const McConfig& cfg) {
    return sample_inverse_subordinator(LevyKernelSpec::pure_stable(beta), t, cfg);
}

// ---- subordinated processes ----

std::vector<double> sample_base_first_coordinate(const KernelSpec& kernel, const std::vector<double>& times,
                                                 std::uint64_t seed) {
    const std::size_t n = times.size();
    std::vector<double> out(n);
    if (kernel.family() == KernelFamily::constant_diffusion) {
        const double a11 = kernel.matrix()(0, 0);
        parallel_for(chunks_for(n), [&](std::size_t ch) {
            Rng rng = substream(seed, ch);
            for (std::size_t i = ch * kChunk; i < std::min(n, (ch + 1) * kChunk); ++i)
                out[i] = std::sqrt(2.0 * times[i] * a11) * rng.normal();
        });
        return out;
    }
    if (kernel.family() == KernelFamily::isotropic_stable) {
        const double alpha = kernel.alpha();
        if (alpha >= 2.0) {
            parallel_for(chunks_for(n), [&](std::size_t ch) {
                Rng rng = substream(seed, ch);
                for (std::size_t i = ch * kChunk; i < std::min(n, (ch + 1) * kChunk); ++i)
                    out[i] = std::sqrt(2.0 * times[i]) * rng.normal();
            });
            return out;
        }
        const FracOrder half(0.5 * alpha);
        parallel_for(chunks_for(n), [&](std::size_t ch) {
            Rng rng = substream(seed, ch);
            for (std::size_t i = ch * kChunk; i < std::min(n, (ch + 1) * kChunk); ++i) {
                const double s = sample_stable_increment(half, 1.0, rng);
                out[i] = std::sqrt(2.0 * s) * std::pow(times[i], 1.0 / alpha) * rng.normal();
            }
        });
        return out;
    }
    throw CapabilityError(std::string("no direct simulation for kernel family ") + to_string(kernel.family()));
}

namespace {

KernelSpec first_coordinate_marginal(const KernelSpec& kernel) {
    if (kernel.family() == KernelFamily::constant_diffusion) {
        Eigen::MatrixXd a(1, 1);
        a(0, 0) = kernel.matrix()(0, 0);
        return KernelSpec::constant_diffusion(a);
    }
    if (kernel.family() == KernelFamily::isotropic_stable) return KernelSpec::isotropic_stable(1, kernel.alpha());
    throw CapabilityError(std::string("no direct simulation for kernel family ") + to_string(kernel.family()));
}

}  // namespace

SubordinatedSample subordinated_density_mc(const KernelSpec& kernel, FracOrder beta, double t, const McConfig& cfg) {
    if (!(t > 0.0)) throw DomainError("t must be positive");
    const KernelSpec marginal = first_coordinate_marginal(kernel);
    const auto times = sample_inverse_subordinator(beta, t, cfg);
    SubordinatedSample r;
    r.time_step = inverse_subordinator_step(cfg);
    r.samples = sample_base_first_coordinate(kernel, times, derive(cfg.seed, 1));
    std::sort(r.samples.begin(), r.samples.end());
    const std::size_t n = r.samples.size();
    double s1 = 0.0, s2 = 0.0;
    for (double x : r.samples) {
        s1 += x;
        s2 += x * x;
    }
    r.mean = s1 / n;
    r.second_moment = s2 / n;
    r.median = n % 2 ? r.samples[n / 2] : 0.5 * (r.samples[n / 2 - 1] + r.samples[n / 2]);
    // distribution-free order-statistic interval
    const double half = 1.96 * std::sqrt(static_cast<double>(n)) / 2.0;
    const auto idx = [&](double k) {
        return r.samples[static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n - 1)))];
    };
    r.median_ci_low = idx(std::floor(n / 2.0 - half));
    r.median_ci_high = idx(std::ceil(n / 2.0 + half));

    const double R = std::max(std::abs(idx(0.005 * n)), std::abs(idx(0.995 * n)));
    const int nb = cfg.histogram_bins;
    auto& H = r.histogram;
    H.edges.resize(nb + 1);
    for (int b = 0; b <= nb; ++b) H.edges[b] = -R + 2.0 * R * b / nb;
    H.counts.assign(nb, 0);
    const double w = 2.0 * R / nb;
    for (double x : r.samples) {
        if (x < -R || x >= R) continue;
        H.counts[std::min(nb - 1, static_cast<int>((x + R) / w))]++;
    }
    H.density.resize(nb);
    H.reference.resize(nb);
    for (int b = 0; b < nb; ++b) H.density[b] = H.counts[b] / (n * w);
    parallel_for(nb, [&](std::size_t b) {
        FracGreenRequest req{marginal, beta, t, {0.5 * (H.edges[b] + H.edges[b + 1])}, {0.0}, 0};
        try {
            H.reference[b] = frac_green(req);
        } catch (const SingularPointError&) {
            H.reference[b] = std::numeric_limits<double>::infinity();  // divergent on the diagonal
        }
    });
    return r;
}

double subordinated_gaussian_cdf(double a11, FracOrder beta, double t, double x) {
    if (!(a11 > 0.0)) throw DomainError("variance coefficient must be positive");
    if (x == 0.0) return 0.5;
    const double ax = std::abs(x);
    // upper tail: P(sqrt(2 a tau) Z > |x|) averaged over tau
    auto base = [&](double tau) { return LogValue{log_erfc(ax / (2.0 * std::sqrt(a11 * tau))) - std::log(2.0), 1}; };
    const double tail = subordinate(base, beta, t).value;
    return x > 0.0 ? 1.0 - tail : tail;
}

std::function<double(double)> tabulated_subordinated_cdf(const KernelSpec& kernel, FracOrder beta, double t,
                                                         int points) {
    const KernelSpec m = first_coordinate_marginal(kernel);
    if (m.family() != KernelFamily::constant_diffusion)
        throw CapabilityError("tabulated CDF available for Gaussian kernels only");
    const double a = m.matrix()(0, 0);
    double X = std::sqrt(a * std::pow(t, beta.value()));
    while (1.0 - subordinated_gaussian_cdf(a, beta, t, X) > 1e-9) X *= 2.0;
    std::vector<double> F(points);
    const double dx = X / (points - 1);
    parallel_for(points, [&](std::size_t i) { F[i] = subordinated_gaussian_cdf(a, beta, t, i * dx); });
    return [F, dx, X](double x) {
        const double ax = std::abs(x);
        double up;
        if (ax >= X) up = 1.0;
        else {
            const double u = ax / dx;
            const std::size_t i = static_cast<std::size_t>(u);
            const double f = u - i;
            up = (1.0 - f) * F[i] + f * F[std::min(i + 1, F.size() - 1)];
        }
        return x >= 0.0 ? up : 1.0 - up;
    };
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

MeanEstimate mean_estimate(const std::vector<double>& v) {
    if (v.size() < 2) throw DomainError("need at least two samples");
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (v.size() - 1) / v.size())};
}

std::vector<TestFunction> standard_test_functions() {
    return {
        {"indicator_le_0.5", [](double x) { return x <= 0.5 ? 1.0 : 0.0; }},
        {"exp_neg_pos", [](double x) { return std::exp(-std::max(x, 0.0)); }},
        {"inv_one_plus_sq", [](double x) {
             const double p = std::max(x, 0.0);
             return 1.0 / (1.0 + p * p);
         }},
    };
}

ComparisonReport comparison_check(const LevyKernelSpec& nu, const KernelSpec& kernel, const std::vector<double>& ts,
                                  const std::vector<TestFunction>& fs, const McConfig& cfg) {
    ComparisonReport rep;
    rep.certificate = nu.verify();
    for (const auto& f : fs) {
        double prev = f.f(-50.0);
        for (int i = 1; i <= 4000; ++i) {
            const double v = f.f(-50.0 + 100.0 * i / 4000);
            if (v > prev + 1e-14 * std::max(1.0, std::abs(prev)))
                throw SpecError("test function '" + f.name + "' is not non-increasing");
            prev = v;
        }
    }
    const LevyKernelSpec refs[2] = {LevyKernelSpec::pure_stable(nu.beta1()), LevyKernelSpec::pure_stable(nu.beta2())};
    const LevyKernelSpec* procs[3] = {&nu, &refs[0], &refs[1]};
    // positions[p][j] = X(E_t) samples for process p at level ts[j]
    std::vector<std::vector<std::vector<double>>> pos(3);
    for (int p = 0; p < 3; ++p) {
        McConfig c = cfg;
        c.seed = derive(cfg.seed, 100 + p);
        auto E = sample_inverse_subordinator_levels(*procs[p], ts, c);
        for (std::size_t j = 0; j < ts.size(); ++j)
            pos[p].push_back(sample_base_first_coordinate(kernel, E[j], derive(cfg.seed, 200 + 10 * p + j)));
    }
    rep.all_hold = true;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        for (const auto& f : fs) {
            MeanEstimate est[3];
            for (int p = 0; p < 3; ++p) {
                std::vector<double> y(pos[p][j].size());
                std::transform(pos[p][j].begin(), pos[p][j].end(), y.begin(), f.f);
                est[p] = mean_estimate(y);
            }
            ComparisonEntry e;
            e.function = f.name;
            e.t = ts[j];
            e.middle = est[0];
            e.lower_ref = est[1];
            e.upper_ref = est[2];
            const double lo = std::min(est[1].mean, est[2].mean), hi = std::max(est[1].mean, est[2].mean);
            const double se_ref = std::max(est[1].std_error, est[2].std_error);
            e.ci_halfwidth = 1.96 * std::hypot(est[0].std_error, se_ref);
            e.holds = est[0].mean >= lo - e.ci_halfwidth && est[0].mean <= hi + e.ci_halfwidth;
            rep.all_hold = rep.all_hold && e.holds;
            rep.entries.push_back(e);
        }
    }
    return rep;
}

}  // namespace fracgreen
