// Mittag-Leffler power series in multiprecision.
//
// For z < 0 the terms of sum z^k / Gamma(k beta + 1) reach magnitude about
// exp(|z|^{1/beta}) before the sum settles near 0, so the working precision
// scales with that exponent. With beta = p/q the terms in each residue class
// k = j q + r obey a recurrence with integer factors only:
//   T_{k+q} = T_k * z^q q^p / prod_{m<p} ((j p + 1 + m) q + r p),
// which needs one Gamma value per class.
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "fracgreen/errors.hpp"
#include "fracgreen/specfun.hpp"

namespace fracgreen {
namespace {

struct Mp {
    mpfr_t v;
    explicit Mp(long prec) { mpfr_init2(v, prec); }
    ~Mp() { mpfr_clear(v); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
};

// Gamma(P/Q) from the lower incomplete gamma series truncated at N, where the
// upper remainder is below 2^{-prec}.
void gamma_rational_raw(mpfr_t out, unsigned long P, unsigned long Q, long prec) {
    const double x = double(P) / double(Q);
    const unsigned long N =
        static_cast<unsigned long>(std::ceil((prec + 30) * std::log(2.0) + x * std::log(prec + 30.0))) + 10;
    const long wp = prec + 64;
    Mp term(wp), sum(wp), tmp(wp);
    mpfr_set_ui(term.v, Q, MPFR_RNDN);
    mpfr_div_ui(term.v, term.v, P, MPFR_RNDN);
    mpfr_set(sum.v, term.v, MPFR_RNDN);
    for (unsigned long k = 1;; ++k) {
        mpfr_mul_ui(term.v, term.v, N * Q, MPFR_RNDN);
        mpfr_div_ui(term.v, term.v, P + k * Q, MPFR_RNDN);
        mpfr_add(sum.v, sum.v, term.v, MPFR_RNDN);
        if (k > N && mpfr_get_exp(term.v) < mpfr_get_exp(sum.v) - wp) break;
    }
    mpfr_log_ui(tmp.v, N, MPFR_RNDN);
    mpfr_mul_ui(tmp.v, tmp.v, P, MPFR_RNDN);
    mpfr_div_ui(tmp.v, tmp.v, Q, MPFR_RNDN);
    mpfr_sub_ui(tmp.v, tmp.v, N, MPFR_RNDN);
    mpfr_exp(tmp.v, tmp.v, MPFR_RNDN);
    mpfr_mul(out, sum.v, tmp.v, MPFR_RNDN);
}

// Process-wide cache; a stored value is reused for any precision up to the
// one it was computed at.
class GammaCache {
public:
    void get(mpfr_t out, unsigned long P, unsigned long Q, long prec) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(P, Q);
        auto it = map_.find(key);
        if (it == map_.end() || mpfr_get_prec(it->second->v) < prec) {
            // round the precision up so a sweep of growing |z| recomputes rarely
            long p2 = 256;
            while (p2 < prec) p2 = p2 * 3 / 2;
            auto fresh = std::make_unique<Mp>(p2);
            if (P % Q == 0) {
                mpfr_set_ui(fresh->v, 1, MPFR_RNDN);
                for (unsigned long i = 2; i < P / Q; ++i) mpfr_mul_ui(fresh->v, fresh->v, i, MPFR_RNDN);
            } else {
                gamma_rational_raw(fresh->v, P, Q, p2);
            }
            it = map_.insert_or_assign(key, std::move(fresh)).first;
        }
        mpfr_set(out, it->second->v, MPFR_RNDN);
    }

private:
    std::mutex mu_;
    std::map<std::pair<unsigned long, unsigned long>, std::unique_ptr<Mp>> map_;
};

GammaCache& gamma_cache() {
    static GammaCache c;
    return c;
}

bool rationalize(double beta, long& p, long& q) {
    // continued-fraction convergents
    double x = beta;
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    for (int i = 0; i < 40; ++i) {
        const double a = std::floor(x);
        const long ai = static_cast<long>(a);
        const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > 10000) return false;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(double(h1) / double(k1) - beta) <= 4.0 * 2.220446049250313e-16 * beta) {
            p = h1;
            q = k1;
            return true;
        }
        const double frac = x - a;
        if (frac == 0.0) return false;
        x = 1.0 / frac;
    }
    return false;
}

// sum_k k^deriv z^k / Gamma(k beta + 1); deriv is 0 or 1.
double ml_sum(double beta, double z, int deriv, const MLSeriesOptions& opt) {
    if (z == 0.0) return deriv == 0 ? 1.0 : 0.0;
    const double lz = std::log(std::abs(z));
    double lmax = 0.0;
    long kend = 0;
    for (long k = 0;; ++k) {
        const double lt = k * lz - std::lgamma(k * beta + 1.0) + (deriv && k > 0 ? std::log(double(k)) : 0.0);
        lmax = std::max(lmax, lt);
        if (k > 10 && lt < lmax - 1.0 && lt < -45.0) {
            kend = k;
            break;
        }
    }
    long bits = (z < 0.0 ? static_cast<long>(lmax / std::log(2.0)) : 0) + 64 +
                static_cast<long>(std::log2(double(kend) + 1.0));
    const double cost = double(bits) * double(kend);
    if (cost > opt.cost_budget)
        throw RangeError("ml_series: argument too large for the series at this order; use ml_pz");

    long p = 0, q = 0;
    const bool rational = rationalize(beta, p, q);
    Mp sum(bits), term(bits), acc(bits);
    mpfr_set_zero(sum.v, 1);

    if (rational) {
        // z^q q^p, exact in a short mantissa
        Mp mult(53 * q + 64 * 1 + static_cast<long>(p * std::log2(double(q)) + 64));
        mpfr_set_d(mult.v, z, MPFR_RNDN);
        mpfr_pow_ui(mult.v, mult.v, q, MPFR_RNDN);
        for (long m = 0; m < p; ++m) mpfr_mul_ui(mult.v, mult.v, q, MPFR_RNDN);
        for (long r = 0; r < q && r <= kend; ++r) {
            mpfr_set_prec(term.v, bits);
            gamma_cache().get(term.v, r * p + q, q, bits);
            Mp zr(bits);
            mpfr_set_d(zr.v, z, MPFR_RNDN);
            mpfr_pow_ui(zr.v, zr.v, r, MPFR_RNDN);
            mpfr_div(term.v, zr.v, term.v, MPFR_RNDN);
            long prev_exp = mpfr_get_exp(term.v);
            for (long j = 0;; ++j) {
                const long k = j * q + r;
                if (k > kend) break;
                if (deriv) {
                    if (k > 0) {
                        mpfr_mul_ui(acc.v, term.v, k, MPFR_RNDN);
                        mpfr_add(sum.v, sum.v, acc.v, MPFR_RNDN);
                    }
                } else {
                    mpfr_add(sum.v, sum.v, term.v, MPFR_RNDN);
                }
                // past the peak the terms only shrink, so the absolute error
                // budget of 2^-64 needs fewer bits
                if (z < 0.0) {
                    const long e = mpfr_get_exp(term.v);
                    if (e < prev_exp) {
                        const long want = std::max<long>(e, 0) + 72 + static_cast<long>(std::log2(double(kend) + 1.0));
                        if (want < static_cast<long>(mpfr_get_prec(term.v)) - 64)
                            mpfr_prec_round(term.v, want, MPFR_RNDN);
                    }
                    prev_exp = e;
                }
                mpfr_mul(term.v, term.v, mult.v, MPFR_RNDN);
                // divide by the product of the p integer factors, packed into
                // 64-bit chunks
                unsigned long packed = 1;
                for (long m = 0; m < p; ++m) {
                    const unsigned long f = static_cast<unsigned long>((j * p + 1 + m) * q + r * p);
                    if (packed > (~0UL) / f) {
                        mpfr_div_ui(term.v, term.v, packed, MPFR_RNDN);
                        packed = 1;
                    }
                    packed *= f;
                }
                mpfr_div_ui(term.v, term.v, packed, MPFR_RNDN);
            }
        }
    } else {
        if (bits > 4000 || kend > 20000)
            throw RangeError("ml_series: irrational order too costly for the series; use ml_pz");
        Mp g(bits), zk(bits), kb(bits);
        mpfr_set_ui(zk.v, 1, MPFR_RNDN);
        for (long k = 0; k <= kend; ++k) {
            mpfr_set_d(kb.v, beta, MPFR_RNDN);
            mpfr_mul_ui(kb.v, kb.v, k, MPFR_RNDN);
            mpfr_add_ui(kb.v, kb.v, 1, MPFR_RNDN);
            mpfr_gamma(g.v, kb.v, MPFR_RNDN);
            mpfr_div(term.v, zk.v, g.v, MPFR_RNDN);
            if (deriv) mpfr_mul_ui(term.v, term.v, k, MPFR_RNDN);
            mpfr_add(sum.v, sum.v, term.v, MPFR_RNDN);
            mpfr_mul_d(zk.v, zk.v, z, MPFR_RNDN);
        }
    }
    if (deriv) mpfr_div_d(sum.v, sum.v, z, MPFR_RNDN);
    const double v = mpfr_get_d(sum.v, MPFR_RNDN);
    if (!std::isfinite(v)) throw RangeError("ml_series: result outside double range");
    return v;
}

void check_guard(double z, const MLSeriesOptions& opt) {
    if (!std::isfinite(z) || std::abs(z) > opt.radius_guard)
        throw RangeError("ml_series: |z| beyond the series guard; use ml_pz");
}

}  // namespace

double ml_series(FracOrder beta, double z, const MLSeriesOptions& opt) {
    check_guard(z, opt);
    return ml_sum(beta.value(), z, 0, opt);
}

double ml_series_derivative(FracOrder beta, double z, const MLSeriesOptions& opt) {
    check_guard(z, opt);
    if (z == 0.0) return 1.0 / std::tgamma(1.0 + beta.value());
    return ml_sum(beta.value(), z, 1, opt);
}

}  // namespace fracgreen
