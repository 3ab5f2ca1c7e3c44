#pragma once
#include <stdexcept>
#include <string>

namespace fracgreen {

// Base for every library failure; `kind()` is the machine-readable tag used in
// CLI error records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define FRACGREEN_ERROR(Name, tag)                                            \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& msg) : Error(tag, msg) {}            \
    };

FRACGREEN_ERROR(DomainError, "domain")
FRACGREEN_ERROR(RangeError, "range")
FRACGREEN_ERROR(CapabilityError, "capability")
FRACGREEN_ERROR(SpecError, "spec")
FRACGREEN_ERROR(ShapeError, "shape")
FRACGREEN_ERROR(HorizonError, "horizon")
FRACGREEN_ERROR(CoverageError, "coverage")
FRACGREEN_ERROR(RegimeError, "regime")
FRACGREEN_ERROR(FitError, "fit")
FRACGREEN_ERROR(ResourceError, "resource")
FRACGREEN_ERROR(CertificateError, "certificate")
FRACGREEN_ERROR(SingularPointError, "singular_point")
FRACGREEN_ERROR(InvariantError, "invariant")
FRACGREEN_ERROR(IoError, "io")

#undef FRACGREEN_ERROR

// Violated hypothesis of an asymptotic formula (h' <= 0 and the like).
class AssumptionError : public DomainError {
public:
    using DomainError::DomainError;
};

// Quadrature that did not meet its tolerance; carries what it got.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& msg, double estimate, double error)
        : Error("accuracy", msg), estimate_(estimate), error_(error) {}
    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

}  // namespace fracgreen
