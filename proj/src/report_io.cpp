#include "fracgreen/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracgreen/errors.hpp"

namespace fracgreen {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number_to_json(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

double number_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
    }
    throw IoError("expected a number in report JSON");
}

json constants_to_json(const EnvelopeConstants& c) {
    json j{{"c_beta_exponent", number_to_json(c.c_beta_exponent)},
           {"prefactor_low", number_to_json(c.prefactor_low)},
           {"prefactor_high", number_to_json(c.prefactor_high)}};
    j["horizon_T"] = c.horizon_T ? number_to_json(*c.horizon_T) : json(nullptr);
    j["globalization_rate"] = c.globalization_rate ? number_to_json(*c.globalization_rate) : json(nullptr);
    return j;
}

EnvelopeConstants constants_from_json(const json& j) {
    EnvelopeConstants c;
    c.c_beta_exponent = number_from_json(j.at("c_beta_exponent"));
    c.prefactor_low = number_from_json(j.at("prefactor_low"));
    c.prefactor_high = number_from_json(j.at("prefactor_high"));
    if (j.contains("horizon_T") && !j["horizon_T"].is_null()) c.horizon_T = number_from_json(j["horizon_T"]);
    if (j.contains("globalization_rate") && !j["globalization_rate"].is_null())
        c.globalization_rate = number_from_json(j["globalization_rate"]);
    return c;
}

json report_to_json(const VerificationReport& r) {
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({{"t", number_to_json(p.t)},
                       {"r", number_to_json(p.r)},
                       {"omega", number_to_json(p.omega)},
                       {"regime", to_string(p.regime)},
                       {"log_G", number_to_json(p.log_G)},
                       {"log_envelope", number_to_json(p.log_envelope)},
                       {"log_ratio", number_to_json(p.log_ratio)},
                       {"excluded", p.excluded},
                       {"note", p.note}});
    json regs = json::array();
    for (const auto& s : r.regimes)
        regs.push_back({{"regime", to_string(s.regime)},
                        {"count", s.count},
                        {"log_ratio_min", number_to_json(s.log_ratio_min)},
                        {"log_ratio_max", number_to_json(s.log_ratio_max)},
                        {"pass", s.pass}});
    json slopes = json::array();
    for (const auto& s : r.slopes)
        slopes.push_back({{"name", s.name},
                          {"omega_lo", number_to_json(s.omega_lo)},
                          {"omega_hi", number_to_json(s.omega_hi)},
                          {"n", s.n},
                          {"slope", number_to_json(s.slope)},
                          {"ci_low", number_to_json(s.ci_low)},
                          {"ci_high", number_to_json(s.ci_high)},
                          {"expected", number_to_json(s.expected)},
                          {"tolerance", number_to_json(s.tolerance)},
                          {"pass", s.pass}});
    const auto& t = r.tail;
    json tail{{"present", t.present},
              {"n", t.n},
              {"rate", number_to_json(t.rate)},
              {"rate_ci_low", number_to_json(t.rate_ci_low)},
              {"rate_ci_high", number_to_json(t.rate_ci_high)},
              {"intercept", number_to_json(t.intercept)},
              {"r_squared", number_to_json(t.r_squared)},
              {"pass", t.pass}};
    json config = r.config.empty() ? json(nullptr) : json::parse(r.config);
    return {{"schema_version", r.schema_version},
            {"selector", r.selector},
            {"kernel", r.kernel},
            {"d", r.d},
            {"alpha", number_to_json(r.alpha)},
            {"beta", number_to_json(r.beta)},
            {"k", r.k},
            {"one_sided", r.one_sided},
            {"ratio_ceiling", number_to_json(r.ratio_ceiling)},
            {"r2_min", number_to_json(r.r2_min)},
            {"constants", constants_to_json(r.constants)},
            {"exp_constant_low", number_to_json(r.exp_constant_low)},
            {"exp_constant_high", number_to_json(r.exp_constant_high)},
            {"failed_points", r.failed_points},
            {"pass", r.pass},
            {"regimes", regs},
            {"tail", tail},
            {"slopes", slopes},
            {"points", pts},
            {"config", config}};
}

VerificationReport report_from_json(const json& j) {
    try {
        VerificationReport r;
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kReportSchemaVersion) throw IoError("unsupported report schema version");
        r.selector = j.at("selector").get<std::string>();
        r.kernel = j.at("kernel").get<std::string>();
        r.d = j.at("d").get<int>();
        r.alpha = number_from_json(j.at("alpha"));
        r.beta = number_from_json(j.at("beta"));
        r.k = j.at("k").get<int>();
        r.one_sided = j.at("one_sided").get<bool>();
        r.ratio_ceiling = number_from_json(j.at("ratio_ceiling"));
        r.r2_min = number_from_json(j.at("r2_min"));
        r.constants = constants_from_json(j.at("constants"));
        r.exp_constant_low = number_from_json(j.at("exp_constant_low"));
        r.exp_constant_high = number_from_json(j.at("exp_constant_high"));
        r.failed_points = j.at("failed_points").get<std::size_t>();
        r.pass = j.at("pass").get<bool>();
        for (const auto& s : j.at("regimes"))
            r.regimes.push_back({regime_from_string(s.at("regime").get<std::string>()), s.at("count").get<std::size_t>(),
                                 number_from_json(s.at("log_ratio_min")), number_from_json(s.at("log_ratio_max")),
                                 s.at("pass").get<bool>()});
        const auto& t = j.at("tail");
        r.tail.present = t.at("present").get<bool>();
        r.tail.n = t.at("n").get<std::size_t>();
        r.tail.rate = number_from_json(t.at("rate"));
        r.tail.rate_ci_low = number_from_json(t.at("rate_ci_low"));
        r.tail.rate_ci_high = number_from_json(t.at("rate_ci_high"));
        r.tail.intercept = number_from_json(t.at("intercept"));
        r.tail.r_squared = number_from_json(t.at("r_squared"));
        r.tail.pass = t.at("pass").get<bool>();
        for (const auto& s : j.at("slopes")) {
            SlopeCheck c;
            c.name = s.at("name").get<std::string>();
            c.omega_lo = number_from_json(s.at("omega_lo"));
            c.omega_hi = number_from_json(s.at("omega_hi"));
            c.n = s.at("n").get<std::size_t>();
            c.slope = number_from_json(s.at("slope"));
            c.ci_low = number_from_json(s.at("ci_low"));
            c.ci_high = number_from_json(s.at("ci_high"));
            c.expected = number_from_json(s.at("expected"));
            c.tolerance = number_from_json(s.at("tolerance"));
            c.pass = s.at("pass").get<bool>();
            r.slopes.push_back(c);
        }
        for (const auto& p : j.at("points")) {
            ReportPoint q;
            q.t = number_from_json(p.at("t"));
            q.r = number_from_json(p.at("r"));
            q.omega = number_from_json(p.at("omega"));
            q.regime = regime_from_string(p.at("regime").get<std::string>());
            q.log_G = number_from_json(p.at("log_G"));
            q.log_envelope = number_from_json(p.at("log_envelope"));
            q.log_ratio = number_from_json(p.at("log_ratio"));
            q.excluded = p.at("excluded").get<bool>();
            q.note = p.at("note").get<std::string>();
            r.points.push_back(q);
        }
        if (j.contains("config") && !j["config"].is_null()) r.config = j["config"].dump();
        return r;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed report JSON: ") + e.what());
    }
}

std::string report_csv(const VerificationReport& r) {
    std::ostringstream os;
    os << "t,r,omega,regime,log_G,log_envelope,log_ratio,excluded\n";
    for (const auto& p : r.points) {
        os << format_double(p.t) << ',' << format_double(p.r) << ',' << format_double(p.omega) << ','
           << to_string(p.regime) << ',';
        if (p.excluded) os << ",,," << 1 << '\n';
        else
            os << format_double(p.log_G) << ',' << format_double(p.log_envelope) << ',' << format_double(p.log_ratio)
               << ',' << 0 << '\n';
    }
    return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw IoError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move report into place at " + path);
    }
}

void write_report(const VerificationReport& r, const std::string& base) {
    write_text_atomic(base + ".json", report_to_json(r).dump(2) + "\n");
    write_text_atomic(base + ".csv", report_csv(r));
}

VerificationReport read_report(const std::string& json_path) {
    std::ifstream f(json_path);
    if (!f) throw IoError("cannot open " + json_path);
    try {
        return report_from_json(json::parse(f));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed report JSON: ") + e.what());
    }
}

}  // namespace fracgreen
