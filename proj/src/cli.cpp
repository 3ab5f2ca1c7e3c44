#include "fracgreen/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "fracgreen/asymptotics.hpp"
#include "fracgreen/envelopes.hpp"
#include "fracgreen/errors.hpp"
#include "fracgreen/harness.hpp"
#include "fracgreen/mc.hpp"
#include "fracgreen/report_io.hpp"
#include "fracgreen/specfun.hpp"
#include "fracgreen/subordination.hpp"
#include "json.hpp"

namespace fracgreen {

namespace {

using nlohmann::json;

// Bad parameters caught after parsing; reported like a parse error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::optional<double> tolerance;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 1;
    std::string config;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--tolerance", c.tolerance, "relative tolerance (meaning depends on the subcommand)");
    sub->add_option("--out", c.out, "output path (stdout if empty)");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", c.seed, "root random seed");
    sub->add_option("--config", c.config, "JSON file of option values; command-line flags win");
}

// Table with a fixed column order; cells are numbers or strings.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    std::string csv() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << ',';
                if (r[i].is_number()) os << format_double(r[i].get<double>());
                else if (r[i].is_boolean()) os << (r[i].get<bool>() ? 1 : 0);
                else if (r[i].is_string()) os << r[i].get<std::string>();
            }
            os << '\n';
        }
        return os.str();
    }
    json to_json() const {
        json a = json::array();
        for (const auto& r : rows) {
            json o = json::object();
            for (std::size_t i = 0; i < r.size(); ++i)
                o[columns[i]] = r[i].is_number() ? number_to_json(r[i].get<double>()) : r[i];
            a.push_back(o);
        }
        return a;
    }
};

json num(double v) { return json(v); }

void emit(const std::string& text, const Common& c, std::ostream& out) {
    if (c.out.empty()) out << text;
    else write_text_atomic(c.out, text);
}

void emit_table(const Table& t, const Common& c, std::ostream& out, const json& config) {
    if (c.format == "json") emit(json{{"config", config}, {"rows", t.to_json()}}.dump(2) + "\n", c, out);
    else emit(t.csv(), c, out);
}

// Effective option values of a subcommand, defaults included.
json effective_config(const CLI::App* sub) {
    json j = json::object();
    j["subcommand"] = sub->get_name();
    for (const CLI::Option* o : sub->get_options()) {
        const std::string name = o->get_lnames().empty() ? o->get_name() : o->get_lnames().front();
        if (name == "help" || name == "config") continue;
        std::vector<std::string> vals = o->results();
        if (vals.empty()) {
            const std::string d = o->get_default_str();
            if (d.empty()) continue;
            vals = {d};
        }
        json arr = json::array();
        for (const auto& v : vals) {
            char* end = nullptr;
            const double x = std::strtod(v.c_str(), &end);
            if (end && *end == '\0' && !v.empty()) arr.push_back(x);
            else arr.push_back(v);
        }
        j[name] = arr.size() == 1 && o->get_expected_max() <= 1 ? arr[0] : arr;
    }
    return j;
}

// Splices options from a JSON config file in front of the command-line
// ones, skipping keys given explicitly.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file " + path);
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    std::set<std::string> given;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                            : a.find('=') - 2));
    std::vector<std::string> extra;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (it.key() == "config" || it.key() == "subcommand" || given.count(it.key())) continue;
        auto add_scalar = [&](const json& v) {
            if (v.is_string()) extra.push_back(v.get<std::string>());
            else if (v.is_number_integer()) extra.push_back(std::to_string(v.get<long long>()));
            else if (v.is_number()) extra.push_back(format_double(v.get<double>()));
            else throw UsageError("unsupported config value for '" + it.key() + "'");
        };
        const json& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) extra.push_back("--" + it.key());
            continue;
        }
        extra.push_back("--" + it.key());
        if (v.is_array())
            for (const auto& e : v) add_scalar(e);
        else
            add_scalar(v);
    }
    std::vector<std::string> merged{args.front()};
    merged.insert(merged.end(), extra.begin(), extra.end());
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

// ---- kernels from flags ----

struct KernelFlags {
    std::string kernel = "gaussian";
    int d = 1;
    double alpha = 1.0;
    double a = 1.0, b = 0.0, c = 0.0;
    std::string a_file;
    double fd1d_horizon = 10.0;
};

void add_kernel_flags(CLI::App* sub, KernelFlags& k, bool with_fd1d) {
    std::vector<std::string> kinds{"gaussian", "stable", "anisotropic"};
    if (with_fd1d) kinds.push_back("fd1d");
    sub->add_option("--kernel", k.kernel, "base kernel family")->check(CLI::IsMember(kinds));
    sub->add_option("--d", k.d, "space dimension")->check(CLI::Range(1, 16));
    sub->add_option("--alpha", k.alpha, "stable order");
    if (with_fd1d) {
        sub->add_option("--a", k.a, "fd1d: constant diffusion coefficient");
        sub->add_option("--b", k.b, "fd1d: constant drift");
        sub->add_option("--c", k.c, "fd1d: constant potential");
        sub->add_option("--a-file", k.a_file, "fd1d: CSV of x,a(x) samples, interpolated linearly");
        sub->add_option("--fd1d-horizon", k.fd1d_horizon, "fd1d: largest base time");
    }
}

Coefficient coefficient_from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read coefficient file " + path);
    std::vector<std::pair<double, double>> pts;
    std::string line;
    while (std::getline(f, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double x, v;
        if (is >> x >> v) pts.emplace_back(x, v);
    }
    if (pts.size() < 2) throw IoError("coefficient file needs at least two x,a rows");
    std::sort(pts.begin(), pts.end());
    Coefficient c;
    c.name = path;
    c.f = [pts](double x) {
        if (x <= pts.front().first) return pts.front().second;
        if (x >= pts.back().first) return pts.back().second;
        auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(x, -HUGE_VAL));
        const auto& [x1, v1] = *it;
        const auto& [x0, v0] = *(it - 1);
        return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
    };
    return c;
}

KernelSpec make_kernel(const KernelFlags& k) {
    if (k.kernel == "gaussian") return KernelSpec::gaussian(k.d);
    if (k.kernel == "stable") return KernelSpec::isotropic_stable(k.d, k.alpha);
    if (k.kernel == "anisotropic") {
        if (k.d != 2) throw UsageError("the anisotropic kernel is two-dimensional; use --d 2");
        return KernelSpec::anisotropic_stable_2d(k.alpha, SpectralMeasure::normalized_uniform(k.alpha));
    }
    if (k.d != 1) throw UsageError("fd1d is one-dimensional; use --d 1");
    const Coefficient a = k.a_file.empty() ? Coefficient::constant(k.a) : coefficient_from_file(k.a_file);
    return KernelSpec::variable_diffusion_1d(a, Coefficient::constant(k.b), Coefficient::constant(k.c),
                                             k.fd1d_horizon);
}

std::string join_point(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ";" : "") + format_double(p[i]);
    return s;
}

// ---- subcommands ----

struct SpecfunFlags {
    std::string function;
    double beta = 0.5;
    std::vector<double> x;
    double lambda = 1.0;
};

int run_specfun(const SpecfunFlags& f, const Common& c, std::ostream& out, const json& config) {
    FracOrder b(f.beta);
    if (f.x.empty()) throw UsageError("--x needs at least one value");
    Table t{{"function", "beta", "x", "value", "method"}, {}};
    for (double x : f.x) {
        json method = "";
        double v;
        if (f.function == "stable_density") {
            const auto e = stable_density_eval(b, x);
            v = e.value;
            method = to_string(e.method);
        } else if (f.function == "stable_cdf") v = std::exp(log_stable_cdf(b, x));
        else if (f.function == "ml") v = ml_series(b, x);
        else if (f.function == "ml_derivative") v = ml_series_derivative(b, x);
        else if (f.function == "ml_pz") v = ml_pz(b, x);
        else v = potential_density(b, f.lambda, x);
        t.rows.push_back({f.function, num(f.beta), num(x), num(v), method});
    }
    emit_table(t, c, out, config);
    return 0;
}

struct GridFlags {
    std::vector<double> t{1.0};
    std::vector<double> r;
    std::vector<double> x;
    std::vector<double> y{0.0};
    int k = 0;
};

int run_kernel(const KernelFlags& kf, const GridFlags& g, const Common& c, std::ostream& out, const json& config) {
    const KernelSpec spec = make_kernel(kf);
    if (g.r.empty()) throw UsageError("--r needs at least one value");
    Table tab{{"t", "r", "k", "value"}, {}};
    for (double t : g.t)
        for (double r : g.r) {
            Point x(spec.dim(), 0.0), y(spec.dim(), 0.0);
            x[0] = r;
            tab.rows.push_back({num(t), num(r), num(g.k), num(kernel_value(spec, t, x, y, g.k))});
        }
    emit_table(tab, c, out, config);
    return 0;
}

int run_green(const KernelFlags& kf, double beta, const GridFlags& g, const Common& c, std::ostream& out,
              const json& config) {
    const KernelSpec spec = make_kernel(kf);
    FracOrder b(beta);
    SubordinationOptions so;
    if (c.tolerance) so.rel_tol = *c.tolerance;
    if (g.x.empty()) throw UsageError("--x needs at least one value");
    Table tab{{"t", "x", "y", "k", "value", "rel_error"}, {}};
    const int d = spec.dim();
    std::vector<Point> xs, ys;
    if (d == 1) {
        for (double v : g.x) xs.push_back({v});
        for (double v : g.y) ys.push_back({v});
    } else {
        if (static_cast<int>(g.x.size()) != d) throw UsageError("--x needs exactly d coordinates");
        std::vector<double> y = g.y;
        if (y.size() == 1 && y[0] == 0.0) y.assign(d, 0.0);
        if (static_cast<int>(y.size()) != d) throw UsageError("--y needs exactly d coordinates");
        xs.push_back(g.x);
        ys.push_back(y);
    }
    if (spec.family() == KernelFamily::variable_diffusion_1d) {
        std::vector<double> targets;
        for (const auto& x : xs) targets.push_back(x[0]);
        for (const auto& y : ys) {
            Fd1dSubordinator s(spec, b, y[0], targets, g.k, so);
            for (double t : g.t)
                for (std::size_t i = 0; i < targets.size(); ++i) {
                    const auto e = s.evaluate(t, i);
                    tab.rows.push_back({num(t), format_double(targets[i]), format_double(y[0]), num(g.k),
                                        num(e.value), num(e.rel_error)});
                }
        }
    } else {
        for (double t : g.t)
            for (const auto& y : ys)
                for (const auto& x : xs) {
                    const auto e = evaluate_frac_green({spec, beta, t, x, y, g.k}, so);
                    tab.rows.push_back({num(t), join_point(x), join_point(y), num(g.k), num(e.value),
                                        num(e.rel_error)});
                }
    }
    emit_table(tab, c, out, config);
    return 0;
}

struct EnvelopeFlags {
    std::string theorem;
    int d = 1;
    double alpha = 1.0;
    double beta = 0.5;
    std::vector<double> t{1.0};
    std::vector<double> r;
    int k = 0;
    std::string dcase = "auto";
    double c_exp = 1.0;
    double horizon = 1.0;
};

int run_envelope(const EnvelopeFlags& f, const Common& c, std::ostream& out, const json& config) {
    const bool stable = f.theorem == "3.2" || f.theorem == "4.2";
    const bool local = f.theorem == "4.1" || f.theorem == "4.2";
    if (f.r.empty()) throw UsageError("--r needs at least one value");
    EnvelopeConstants k;
    k.c_beta_exponent = f.c_exp;
    if (local) k.horizon_T = f.horizon;
    Table tab{{"t", "r", "omega", "regime", "value", "log_value"}, {}};
    for (double t : f.t)
        for (double r : f.r) {
            const Family fam = stable ? Family::stable : Family::diffusion;
            RegimePoint p = compute_omega(fam, t, r, f.beta, stable ? std::optional<double>(f.alpha) : std::nullopt);
            EnvelopeValue v;
            if (f.k == 0) {
                if (local && t > f.horizon) throw HorizonError("time beyond the horizon T");
                v = stable ? envelope_stable(f.d, f.alpha, f.beta, p, k) : envelope_diffusion(f.d, f.beta, p, k);
            } else {
                DerivCase dc = DerivCase::global;
                if (local) {
                    if (f.dcase == "small_time") dc = DerivCase::local_small_time;
                    else if (f.dcase == "large_time") dc = DerivCase::local_large_time;
                    else if (f.dcase == "global") throw UsageError("local estimates take --case small_time or large_time");
                    else dc = t <= 1.0 ? DerivCase::local_small_time : DerivCase::local_large_time;
                } else if (f.dcase != "auto" && f.dcase != "global") {
                    throw UsageError("global estimates take --case global");
                }
                p.regime = classify_derivative_regime(p, f.beta, dc);
                v = stable ? envelope_stable_deriv(f.d, f.k, f.alpha, f.beta, p, k, dc)
                           : envelope_diffusion_deriv(f.d, f.beta, p, k, dc);
            }
            tab.rows.push_back({num(t), num(r), num(p.omega), to_string(v.branch), num(v.value), num(v.log_value)});
        }
    emit_table(tab, c, out, config);
    return 0;
}

struct VerifyFlags {
    std::string theorem;
    int k = 0;
    std::string dcase = "small_time";
    double beta = 0.5;
    double horizon = 1.0;
    std::optional<double> t_min, t_max, r_min, r_max;
    int per_decade = 5;
    double ratio_ceiling = 1e3;
    bool kernel_given = false;
};

int run_verify(KernelFlags kf, const VerifyFlags& f, const Common& c, std::ostream& out, const json& config) {
    const bool stable = f.theorem == "3.2" || f.theorem == "4.2";
    const bool local = f.theorem == "4.1" || f.theorem == "4.2";
    if (!f.kernel_given) kf.kernel = stable ? "stable" : (f.theorem == "4.1" ? "fd1d" : "gaussian");
    const KernelSpec spec = make_kernel(kf);
    HarnessOptions opt;
    opt.ratio_ceiling = f.ratio_ceiling;
    if (c.tolerance) opt.sub.rel_tol = *c.tolerance;
    if (local) opt.horizon_T = f.horizon;
    const Family fam = stable ? Family::stable : Family::diffusion;
    const double alpha = stable ? spec.alpha() : 2.0;
    SweepGrid grid = SweepGrid::default_for(fam, f.beta, alpha, local ? f.horizon : 10.0);
    if (f.t_min || f.t_max || f.r_min || f.r_max) {
        const double tl = f.t_min.value_or(grid.t.front()), th = f.t_max.value_or(grid.t.back());
        const double rl = f.r_min.value_or(grid.r[1]), rh = f.r_max.value_or(grid.r.back());
        grid = SweepGrid::log_spaced(tl, th, rl, rh, f.per_decade);
    }
    VerificationReport rep;
    if (f.k == 0) {
        const Theorem th = f.theorem == "3.1"   ? Theorem::global_diffusion
                           : f.theorem == "3.2" ? Theorem::global_stable
                           : f.theorem == "4.1" ? Theorem::local_diffusion
                                                : Theorem::local_stable;
        rep = verify_envelope(th, spec, f.beta, grid, opt);
    } else {
        DerivativeProp p;
        if (!local) p = stable ? DerivativeProp::global_stable : DerivativeProp::global_diffusion;
        else if (f.dcase == "small_time")
            p = stable ? DerivativeProp::local_stable_small_time : DerivativeProp::local_diffusion_small_time;
        else
            p = stable ? DerivativeProp::local_stable_large_time : DerivativeProp::local_diffusion_large_time;
        rep = verify_derivative_envelope(p, spec, f.beta, f.k, grid, opt);
    }
    rep.config = config.dump();
    std::string base = c.out.empty() ? "verify_report" : c.out;
    if (base.size() > 5 && base.substr(base.size() - 5) == ".json") base.resize(base.size() - 5);
    write_report(rep, base);
    json summary{{"selector", rep.selector}, {"pass", rep.pass}, {"points", rep.points.size()},
                 {"report", base + ".json"}, {"table", base + ".csv"}};
    if (c.format == "json") out << summary.dump(2) << "\n";
    else out << (rep.pass ? "pass" : "fail") << " " << rep.selector << " points=" << rep.points.size() << " report="
             << base << ".json\n";
    return rep.pass ? 0 : 1;
}

struct LaplaceFlags {
    std::vector<double> a{1.0, 2.0};
    std::vector<double> N{-0.5, 0.0, 1.0};
    std::vector<double> c{0.25, 1.0};
    std::vector<double> omega{1e2, 1e3, 1e4};
};

int run_laplace(const LaplaceFlags& f, const Common& c, std::ostream& out, const json& config) {
    Table tab{{"a", "N", "c", "Omega", "log_oracle", "log_asymptotic", "log_ratio"}, {}};
    std::vector<double> om = f.omega;
    std::sort(om.begin(), om.end());
    bool ok = true;
    for (double a : f.a)
        for (double N : f.N)
            for (double cc : f.c) {
                double prev = INFINITY;
                for (double o : om) {
                    LaplaceIntegrandSpec s{N, a, cc, o};
                    const double lo = oracle_J(s), la = prop_a1_asymptotic(s);
                    const double lr = lo - la;
                    // non-increasing up to quadrature noise
                    if (std::abs(lr) > prev + 1e-9) ok = false;
                    prev = std::abs(lr);
                    tab.rows.push_back({num(a), num(N), num(cc), num(o), num(lo), num(la), num(lr)});
                }
            }
    emit_table(tab, c, out, config);
    return ok ? 0 : 1;
}

struct McFlags {
    std::string mode;
    double beta = 0.5;
    std::vector<double> t{1.0};
    double dt = 1.0;
    std::size_t samples = 100000;
    int bins = 100;
    double time_step = 0.01;
    std::vector<double> mix_weights{0.5, 0.5};
    std::vector<double> mix_betas{0.4, 0.6};
    std::optional<double> beta1, beta2;
    bool check = false;
};

Table histogram_table(const std::vector<double>& v, int bins, double lo, double hi) {
    Table tab{{"bin_left", "bin_right", "count", "density"}, {}};
    std::vector<std::size_t> counts(bins, 0);
    const double w = (hi - lo) / bins;
    for (double x : v)
        if (x >= lo && x < hi) counts[std::min(bins - 1, static_cast<int>((x - lo) / w))]++;
    for (int b = 0; b < bins; ++b)
        tab.rows.push_back({num(lo + b * w), num(lo + (b + 1) * w), num(static_cast<double>(counts[b])),
                            num(counts[b] / (v.size() * w))});
    return tab;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return v[std::min(v.size() - 1, static_cast<std::size_t>(q * v.size()))];
}

int run_mc(const KernelFlags& kf, const McFlags& f, const Common& c, std::ostream& out, const json& config) {
    McConfig cfg;
    cfg.sample_count = f.samples;
    cfg.seed = c.seed;
    cfg.histogram_bins = f.bins;
    cfg.time_step = f.time_step;
    cfg.bracket_tol = c.tolerance.value_or(f.time_step);
    cfg.validate();
    FracOrder b(f.beta);
    json summary{{"mode", f.mode}, {"config", config}};
    bool ok = true;
    Table tab;
    if (f.mode == "increment") {
        std::vector<double> s(cfg.sample_count), e(cfg.sample_count);
        Rng rng = substream(cfg.seed, 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = sample_stable_increment(b, f.dt, rng);
            e[i] = std::exp(-s[i]);
        }
        const auto m = mean_estimate(e);
        const double expect = std::exp(-f.dt);
        summary["laplace_at_1"] = {{"mean", m.mean}, {"std_error", m.std_error}, {"expected", expect}};
        ok = std::abs(m.mean - expect) <= 3.0 * m.std_error;
        tab = histogram_table(s, f.bins, 0.0, quantile(s, 0.99));
    } else if (f.mode == "inverse") {
        const double t = f.t.front();
        const auto e = sample_inverse_subordinator(b, t, cfg);
        const auto m = mean_estimate(e);
        const double expect = std::pow(t, f.beta) / std::tgamma(1.0 + f.beta);
        summary["mean"] = {{"mean", m.mean}, {"std_error", m.std_error}, {"expected", expect}};
        summary["time_step"] = inverse_subordinator_step(cfg);
        ok = std::abs(m.mean - expect) <= 3.0 * m.std_error;
        if (f.beta == 0.5) {
            const double ks = ks_statistic(e, [t](double s) { return std::erf(s / (2.0 * std::sqrt(t))); });
            summary["ks_closed_form"] = ks;
            ok = ok && ks < 0.02;
        }
        tab = histogram_table(e, f.bins, 0.0, quantile(e, 0.995));
    } else if (f.mode == "density") {
        const double t = f.t.front();
        const KernelSpec spec = make_kernel(kf);
        const auto s = subordinated_density_mc(spec, b, t, cfg);
        summary["mean"] = s.mean;
        summary["second_moment"] = s.second_moment;
        summary["median"] = {{"value", s.median}, {"ci_low", s.median_ci_low}, {"ci_high", s.median_ci_high}};
        summary["time_step"] = s.time_step;
        if (spec.family() == KernelFamily::constant_diffusion) {
            const double ks = ks_statistic(s.samples, tabulated_subordinated_cdf(spec, b, t));
            const double m2 = 2.0 * spec.matrix()(0, 0) * std::pow(t, f.beta) / std::tgamma(1.0 + f.beta);
            summary["ks_frac_green"] = ks;
            summary["second_moment_expected"] = m2;
            ok = ks < 0.02 && std::abs(s.second_moment / m2 - 1.0) < 0.05;
        } else {
            ok = s.median_ci_low <= 0.0 && 0.0 <= s.median_ci_high;
        }
        const auto& H = s.histogram;
        tab.columns = {"bin_left", "bin_right", "count", "density", "reference"};
        for (std::size_t i = 0; i < H.counts.size(); ++i)
            tab.rows.push_back({num(H.edges[i]), num(H.edges[i + 1]), num(static_cast<double>(H.counts[i])),
                                num(H.density[i]), num(H.reference[i])});
    } else {
        if (f.mix_weights.size() != f.mix_betas.size() || f.mix_betas.empty())
            throw UsageError("--mix-weights and --mix-betas need the same nonzero length");
        std::vector<LevyKernelSpec::Component> comps;
        for (std::size_t i = 0; i < f.mix_betas.size(); ++i) comps.push_back({f.mix_weights[i], f.mix_betas[i]});
        const double b1 = f.beta1.value_or(*std::min_element(f.mix_betas.begin(), f.mix_betas.end()));
        const double b2 = f.beta2.value_or(*std::max_element(f.mix_betas.begin(), f.mix_betas.end()));
        const auto nu = LevyKernelSpec::mixture(comps, b1, b2);
        const auto rep = comparison_check(nu, make_kernel(kf), f.t, standard_test_functions(), cfg);
        summary["certificate"] = {{"c_low", rep.certificate.c_low}, {"c_high", rep.certificate.c_high},
                                  {"beta1", rep.certificate.beta1}, {"beta2", rep.certificate.beta2}};
        summary["all_hold"] = rep.all_hold;
        ok = rep.all_hold;
        tab.columns = {"function", "t", "middle", "middle_se", "lower_ref", "lower_se", "upper_ref", "upper_se",
                       "ci_halfwidth", "holds"};
        for (const auto& e : rep.entries)
            tab.rows.push_back({e.function, num(e.t), num(e.middle.mean), num(e.middle.std_error),
                                num(e.lower_ref.mean), num(e.lower_ref.std_error), num(e.upper_ref.mean),
                                num(e.upper_ref.std_error), num(e.ci_halfwidth), json(e.holds)});
        summary["entries"] = tab.to_json();
    }
    summary["pass"] = ok;
    if (c.format == "json") emit(summary.dump(2) + "\n", c, out);
    else emit(tab.csv(), c, out);
    return (!f.check || ok) ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Green's functions of time-fractional evolution equations"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    Common common;
    KernelFlags kf;
    GridFlags grid;

    auto* specfun = app.add_subcommand("specfun", "tabulate stable densities, Mittag-Leffler values, potentials");
    SpecfunFlags sf;
    specfun->add_option("--function", sf.function, "which function")
        ->required()
        ->check(CLI::IsMember({"stable_density", "stable_cdf", "ml", "ml_derivative", "ml_pz", "potential"}));
    specfun->add_option("--beta", sf.beta, "order in (0,1)")->required();
    specfun->add_option("--x", sf.x, "arguments (x, z, s or t)")->required();
    specfun->add_option("--lambda", sf.lambda, "potential: killing rate");
    add_common(specfun, common);

    auto* kernel = app.add_subcommand("kernel", "tabulate base kernels");
    add_kernel_flags(kernel, kf, false);
    kernel->add_option("--t", grid.t, "times");
    kernel->add_option("--r", grid.r, "distances along x_1")->required();
    kernel->add_option("--k", grid.k, "x_1-derivative order")->check(CLI::Range(0, 2));
    add_common(kernel, common);

    auto* green = app.add_subcommand("green", "tabulate the fractional Green's function");
    double green_beta = 0.5;
    add_kernel_flags(green, kf, true);
    green->add_option("--beta", green_beta, "time order")->required();
    green->add_option("--t", grid.t, "times");
    green->add_option("--x", grid.x, "targets (d = 1) or one target point")->required();
    green->add_option("--y", grid.y, "sources (d = 1) or one source point");
    green->add_option("--k", grid.k, "x_1-derivative order")->check(CLI::Range(0, 2));
    add_common(green, common);

    auto* envelope = app.add_subcommand("envelope", "tabulate estimate shapes and regimes");
    EnvelopeFlags ef;
    envelope->add_option("--theorem", ef.theorem, "estimate")->required()->check(CLI::IsMember({"3.1", "3.2", "4.1", "4.2"}));
    envelope->add_option("--d", ef.d, "dimension")->check(CLI::Range(1, 64));
    envelope->add_option("--alpha", ef.alpha, "stable order");
    envelope->add_option("--beta", ef.beta, "time order");
    envelope->add_option("--t", ef.t, "times");
    envelope->add_option("--r", ef.r, "distances")->required();
    envelope->add_option("--k", ef.k, "derivative order (0 for values)")->check(CLI::Range(0, 8));
    envelope->add_option("--case", ef.dcase, "derivative case")
        ->check(CLI::IsMember({"auto", "global", "small_time", "large_time"}));
    envelope->add_option("--c-exp", ef.c_exp, "exponential constant");
    envelope->add_option("--horizon", ef.horizon, "horizon T of the local estimates");
    add_common(envelope, common);

    auto* verify = app.add_subcommand("verify", "certify an estimate on a sweep grid");
    VerifyFlags vf;
    add_kernel_flags(verify, kf, true);
    verify->add_option("--theorem", vf.theorem, "estimate")->required()->check(CLI::IsMember({"3.1", "3.2", "4.1", "4.2"}));
    verify->add_option("--k", vf.k, "derivative order (0 for values)")->check(CLI::Range(0, 2));
    verify->add_option("--case", vf.dcase, "local derivative case")->check(CLI::IsMember({"small_time", "large_time"}));
    verify->add_option("--beta", vf.beta, "time order");
    verify->add_option("--horizon", vf.horizon, "horizon T of the local estimates");
    verify->add_option("--t-min", vf.t_min, "grid: smallest time");
    verify->add_option("--t-max", vf.t_max, "grid: largest time");
    verify->add_option("--r-min", vf.r_min, "grid: smallest positive distance");
    verify->add_option("--r-max", vf.r_max, "grid: largest distance");
    verify->add_option("--per-decade", vf.per_decade, "grid: points per decade")->check(CLI::Range(5, 100));
    verify->add_option("--ratio-ceiling", vf.ratio_ceiling, "largest allowed max/min ratio per regime");
    add_common(verify, common);

    auto* laplace = app.add_subcommand("laplace-check", "compare the Laplace asymptotic with quadrature");
    LaplaceFlags lf;
    laplace->add_option("--a", lf.a, "inner exponents");
    laplace->add_option("--N", lf.N, "powers of w");
    laplace->add_option("--c", lf.c, "inner constants");
    laplace->add_option("--omega", lf.omega, "large parameters");
    add_common(laplace, common);

    auto* mc = app.add_subcommand("mc", "Monte Carlo campaigns");
    McFlags mf;
    add_kernel_flags(mc, kf, false);
    mc->add_option("--mode", mf.mode, "campaign")->required()->check(CLI::IsMember({"increment", "inverse", "density", "comparison"}));
    mc->add_option("--beta", mf.beta, "time order");
    mc->add_option("--t", mf.t, "times (several for comparison)");
    mc->add_option("--dt", mf.dt, "increment: time step");
    mc->add_option("--samples", mf.samples, "sample count");
    mc->add_option("--bins", mf.bins, "histogram bins")->check(CLI::Range(1, 100000));
    mc->add_option("--time-step", mf.time_step, "inverse subordinator path step");
    mc->add_option("--mix-weights", mf.mix_weights, "comparison: mixture weights");
    mc->add_option("--mix-betas", mf.mix_betas, "comparison: mixture orders");
    mc->add_option("--beta1", mf.beta1, "comparison: lower sandwich order");
    mc->add_option("--beta2", mf.beta2, "comparison: upper sandwich order");
    mc->add_flag("--check", mf.check, "exit 1 unless the built-in checks pass");
    add_common(mc, common);

    auto error_record = [&](const std::string& kind, const std::string& msg) {
        err << json{{"error", {{"kind", kind}, {"message", msg}}}}.dump() << "\n";
    };

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());  // CLI11 takes them reversed
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const json config = effective_config(sub);
    try {
        if (sub == specfun) return run_specfun(sf, common, out, config);
        if (sub == kernel) return run_kernel(kf, grid, common, out, config);
        if (sub == green) return run_green(kf, green_beta, grid, common, out, config);
        if (sub == envelope) return run_envelope(ef, common, out, config);
        if (sub == verify) {
            vf.kernel_given = verify->get_option("--kernel")->count() > 0;
            return run_verify(kf, vf, common, out, config);
        }
        if (sub == laplace) return run_laplace(lf, common, out, config);
        return run_mc(kf, mf, common, out, config);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        error_record(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        error_record("internal", e.what());
        return 1;
    }
}

}  // namespace fracgreen
