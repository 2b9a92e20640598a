#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bgw {

// Base class for operational failures. `kind()` is a stable tag the CLI maps
// onto exit codes and the tests match on.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& w) : Error("overflow", w) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& w) : Error("dimension", w) {}
};

struct NotConvergedError : Error {
    explicit NotConvergedError(const std::string& w, double gap_ = 0.0)
        : Error("not_converged", w), gap(gap_) {}
    double gap;
};

struct InfiniteOperatorError : Error {
    explicit InfiniteOperatorError(const std::string& w) : Error("infinite_operator", w) {}
};

struct NotPrimitiveError : Error {
    explicit NotPrimitiveError(const std::string& w, int n_max_ = 0)
        : Error("not_primitive", w), n_max(n_max_) {}
    int n_max;
};

struct NonIntegrableError : Error {
    explicit NonIntegrableError(const std::string& w) : Error("non_integrable", w) {}
};

struct ZeroColumnError : Error {
    explicit ZeroColumnError(const std::string& w) : Error("zero_column", w) {}
};

struct UnverifiedMatingError : Error {
    explicit UnverifiedMatingError(const std::string& w) : Error("unverified_mating", w) {}
};

struct SamplingError : Error {
    explicit SamplingError(const std::string& w) : Error("sampling", w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};

// Carries the individual violations so callers can print them one per line.
struct ValidationError : Error {
    explicit ValidationError(std::vector<std::string> violations_)
        : Error("validation", join(violations_)), violations(std::move(violations_)) {}
    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "model validation failed:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
};

}  // namespace bgw
