#ifndef IAWD_CORE_HPP
#define IAWD_CORE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iawd {

enum class ErrorCode {
    BadParamCount,
    NonPositiveParam,
    InvalidSample,
    NonPositiveShape,
    DomainError,
    NoConvergence,
    Overflow,
    DegenerateSample,
    InvalidMomentSolution,
    KernelMismatch,
    UnsupportedAlt,
    EstimationFailed,
    ReplicateBudgetExhausted,
    InvalidArgument,
    ConfigError,
    ParseError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::BadParamCount: return "BadParamCount";
    case ErrorCode::NonPositiveParam: return "NonPositiveParam";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::NonPositiveShape: return "NonPositiveShape";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::InvalidMomentSolution: return "InvalidMomentSolution";
    case ErrorCode::KernelMismatch: return "KernelMismatch";
    case ErrorCode::UnsupportedAlt: return "UnsupportedAlt";
    case ErrorCode::EstimationFailed: return "EstimationFailed";
    case ErrorCode::ReplicateBudgetExhausted: return "ReplicateBudgetExhausted";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class Family { Poisson, Dickman, Gamma, CPExp, CPGamma };

inline std::string_view to_string(Family f) {
    switch (f) {
    case Family::Poisson: return "poisson";
    case Family::Dickman: return "dickman";
    case Family::Gamma: return "gamma";
    case Family::CPExp: return "cpexp";
    case Family::CPGamma: return "cpgamma";
    }
    return "unknown";
}

inline Family family_from_string(std::string_view s) {
    for (Family f : {Family::Poisson, Family::Dickman, Family::Gamma, Family::CPExp, Family::CPGamma})
        if (to_string(f) == s) return f;
    throw Error(ErrorCode::InvalidArgument, "unknown family '" + std::string(s) + "'");
}

/// Number of parameters carried by each family.
inline std::size_t param_count(Family f) {
    switch (f) {
    case Family::Poisson:
    case Family::Dickman: return 1;
    case Family::Gamma:
    case Family::CPExp: return 2;
    case Family::CPGamma: return 3;
    }
    return 0;
}

/// Parameter names in storage order; used for reports and config files.
inline std::vector<std::string> param_names(Family f) {
    switch (f) {
    case Family::Poisson: return {"lambda"};
    case Family::Dickman: return {"theta"};
    case Family::Gamma: return {"alpha", "beta"};
    case Family::CPExp: return {"lambda", "beta"};
    case Family::CPGamma: return {"lambda", "alpha", "beta"};
    }
    return {};
}

/// Size-bias families use a(x)=x and a constant c(x)d(y); the compound
/// Poisson families use c(x)d(y)=lambda*y.
inline bool is_compound(Family f) { return f == Family::CPExp || f == Family::CPGamma; }

/// Dense parameter vector. Layout per family:
///   Poisson (lambda), Dickman (theta), Gamma (alpha, beta),
///   CPExp (lambda, beta), CPGamma (lambda, alpha, beta).
/// All rates use the rate convention (density proportional to x^(a-1) e^(-b x)).
class Params {
public:
    Params() = default;
    Params(std::initializer_list<double> v) : values_(v) {}
    explicit Params(std::vector<double> v) : values_(std::move(v)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_.at(i); }
    double& operator[](std::size_t i) { return values_.at(i); }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const Params&, const Params&) = default;

private:
    std::vector<double> values_;
};

struct FamilySpec {
    Family family = Family::Poisson;
    Params params;

    friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

/// Checks parameter count and strict positivity; throws on violation.
inline void validate(const FamilySpec& spec) {
    const std::size_t want = param_count(spec.family);
    if (spec.params.size() != want)
        throw Error(ErrorCode::BadParamCount, std::string(to_string(spec.family)) + " expects " +
                                                  std::to_string(want) + " parameters, got " +
                                                  std::to_string(spec.params.size()));
    const auto names = param_names(spec.family);
    for (std::size_t i = 0; i < want; ++i) {
        const double v = spec.params[i];
        if (!std::isfinite(v) || !(v > 0.0))
            throw Error(ErrorCode::NonPositiveParam,
                        names[i] + " must be finite and > 0, got " + std::to_string(v));
    }
}

/// Compensated (Neumaier) accumulator. Summation is deterministic for a fixed
/// order of add() calls.
class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Immutable iid sample of non-negative reals with cached raw moments.
/// The variance uses the 1/n divisor.
class Sample {
public:
    explicit Sample(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw Error(ErrorCode::InvalidSample, "sample must contain at least one value");
        NeumaierSum s1, s2, s3;
        for (double x : values_) {
            if (!std::isfinite(x)) throw Error(ErrorCode::InvalidSample, "sample contains a non-finite value");
            if (x < 0.0) throw Error(ErrorCode::InvalidSample, "sample values must be >= 0");
            s1.add(x);
            s2.add(x * x);
            s3.add(x * x * x);
        }
        const double n = static_cast<double>(values_.size());
        mean_ = s1.value() / n;
        mean_sq_ = s2.value() / n;
        mean_cube_ = s3.value() / n;
        NeumaierSum dev;
        for (double x : values_) dev.add((x - mean_) * (x - mean_));
        var_ = dev.value() / n;
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double mean() const noexcept { return mean_; }
    /// n^-1 sum x^2
    double mean_sq() const noexcept { return mean_sq_; }
    /// n^-1 sum x^3
    double mean_cube() const noexcept { return mean_cube_; }
    /// n^-1 sum (x - mean)^2
    double variance() const noexcept { return var_; }

    bool all_integral() const noexcept {
        for (double x : values_)
            if (x != std::floor(x)) return false;
        return true;
    }

private:
    std::vector<double> values_;
    double mean_ = 0.0;
    double mean_sq_ = 0.0;
    double mean_cube_ = 0.0;
    double var_ = 0.0;
};

enum class WeightShape { GaussFamily, ExpAbs, LaplaceExp };

inline std::string_view to_string(WeightShape w) {
    switch (w) {
    case WeightShape::GaussFamily: return "gauss";
    case WeightShape::ExpAbs: return "expabs";
    case WeightShape::LaplaceExp: return "laplace";
    }
    return "unknown";
}

inline WeightShape weight_from_string(std::string_view s) {
    if (s == "gauss") return WeightShape::GaussFamily;
    if (s == "expabs") return WeightShape::ExpAbs;
    if (s == "laplace") return WeightShape::LaplaceExp;
    throw Error(ErrorCode::InvalidArgument, "unknown weight '" + std::string(s) + "'");
}

/// Weight function on the frequency axis.
///  - GaussFamily: p_family(t) exp(-gamma t^2 / 2), with prefactor 1 (Poisson, CPGamma),
///    t^2 (Dickman), beta^2 + t^2 (Gamma), (beta^2 + t^2)^2 (CPExp).
///  - ExpAbs: exp(-gamma |t|).
///  - LaplaceExp: half-line weight of the CPGamma Laplace statistic.
struct WeightSpec {
    WeightShape shape = WeightShape::GaussFamily;
    double gamma = 1.0;

    WeightSpec() = default;
    WeightSpec(WeightShape s, double g) : shape(s), gamma(g) {
        if (!std::isfinite(g) || !(g > 0.0))
            throw Error(ErrorCode::NonPositiveParam, "weight gamma must be > 0");
    }

    friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

enum class StatKind { T, U };

inline std::string_view to_string(StatKind s) { return s == StatKind::T ? "T" : "U"; }

inline StatKind stat_from_string(std::string_view s) {
    if (s == "T" || s == "t") return StatKind::T;
    if (s == "U" || s == "u") return StatKind::U;
    throw Error(ErrorCode::InvalidArgument, "unknown statistic '" + std::string(s) + "'");
}

/// Result of a bootstrap goodness-of-fit test.
struct TestOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
    double critical_value = 0.0;
    Params estimated;
    std::size_t B = 0;
    std::uint64_t seed = 0;
    bool rejected = false;
    /// Replicates discarded because the moment estimator failed on them.
    std::size_t redraws = 0;
};

}  // namespace iawd

#endif  // IAWD_CORE_HPP
