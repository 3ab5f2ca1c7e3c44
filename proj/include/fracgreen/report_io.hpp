#pragma once
#include <string>

#include "fracgreen/harness.hpp"
#include "json.hpp"

namespace fracgreen {

inline constexpr int kReportSchemaVersion = 1;

// Non-finite doubles are stored as the strings "inf", "-inf", "nan".
nlohmann::json number_to_json(double v);
double number_from_json(const nlohmann::json& j);

nlohmann::json constants_to_json(const EnvelopeConstants& c);
EnvelopeConstants constants_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& j);

// Columns: t,r,omega,regime,log_G,log_envelope,log_ratio,excluded
std::string report_csv(const VerificationReport& r);

// Doubles printed with 17 significant digits.
std::string format_double(double v);

// Writes to a sibling temp file then renames over `path`; IoError on failure.
void write_text_atomic(const std::string& path, const std::string& content);

// <base>.json and <base>.csv
void write_report(const VerificationReport& r, const std::string& base);
VerificationReport read_report(const std::string& json_path);

}  // namespace fracgreen
