#ifndef IAWD_SAMPLERS_HPP
#define IAWD_SAMPLERS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iawd/core.hpp"

namespace iawd {

//---------------------------------------------------------------------------//
// Random streams
//---------------------------------------------------------------------------//

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b * 0xd1b54a32d192ed03ULL);
    splitmix64(s);
    return splitmix64(s);
}

/// xoshiro256** generator; satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        for (auto& w : s_) w = splitmix64(seed);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Named random stream: the pair (master_seed, stream_id) fixes the sequence,
/// independent of which thread consumes it.
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    Xoshiro256 engine() const { return Xoshiro256(mix64(master_seed, stream_id)); }

    /// Sub-stream k of this stream.
    RngStream child(std::uint64_t k) const { return {mix64(master_seed ^ 0x5851f42d4c957f2dULL, stream_id), k}; }

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

//---------------------------------------------------------------------------//
// Variate generators
//---------------------------------------------------------------------------//

namespace detail {

inline double poisson(Xoshiro256& g, double lambda) {
    if (lambda <= 0.0) return 0.0;
    return static_cast<double>(std::poisson_distribution<long long>(lambda)(g));
}

/// Gamma(shape, rate).
inline double gamma(Xoshiro256& g, double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(g);
}

/// Compound Poisson gamma: N ~ Po(lambda), X | N ~ Gamma(N alpha, beta).
inline double compound_poisson_gamma(Xoshiro256& g, double lambda, double alpha, double beta) {
    const double n = poisson(g, lambda);
    return n == 0.0 ? 0.0 : gamma(g, n * alpha, beta);
}

inline double dickman(Xoshiro256& g, double theta, int burn_in) {
    // Backward series of the perpetuity X = U^{1/theta} (1 + X):
    // X = W_1 + W_1 W_2 + W_1 W_2 W_3 + ... with W_k = U_k^{1/theta}. After at least
    // burn_in terms, stop once the running product is below double resolution; the
    // neglected tail is that product times an independent copy of 1 + X.
    // Iterating forward and stopping on the product would bias draws downward.
    double x = 0.0;
    double prod = 1.0;
    for (int m = 0;; ++m) {
        prod *= std::exp(std::log(g.uniform()) / theta);
        x += prod;
        if (m + 1 >= burn_in && prod < 1e-17) break;
    }
    return x;
}

/// Inverse Gaussian(mean, shape) by Michael, Schucany and Haas.
inline double inverse_gaussian(Xoshiro256& g, double mean, double shape) {
    const double nu = std::normal_distribution<double>(0.0, 1.0)(g);
    const double y = nu * nu;
    const double x =
        mean + mean * mean * y / (2.0 * shape) -
        mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
    return g.uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

}  // namespace detail

/// Default minimum number of series terms per Dickman draw.
inline constexpr int kDickmanBurnIn = 128;

/// Generalised Dickman(theta) draws via the perpetuity X =_d U^{1/theta} (1 + X).
inline Sample sample_dickman(double theta, std::size_t n, const RngStream& stream, int burn_in = kDickmanBurnIn) {
    if (!(theta > 0.0)) throw Error(ErrorCode::NonPositiveParam, "dickman theta must be > 0");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
    auto g = stream.engine();
    std::vector<double> v(n);
    for (auto& x : v) x = detail::dickman(g, theta, burn_in);
    return Sample(std::move(v));
}

namespace detail {

inline double draw_null(Xoshiro256& g, const FamilySpec& spec) {
    const auto& p = spec.params;
    switch (spec.family) {
    case Family::Poisson: return poisson(g, p[0]);
    case Family::Dickman: return dickman(g, p[0], kDickmanBurnIn);
    case Family::Gamma: return gamma(g, p[0], p[1]);
    case Family::CPExp: {
        const double n = poisson(g, p[0]);
        return n == 0.0 ? 0.0 : gamma(g, n, p[1]);
    }
    case Family::CPGamma: return compound_poisson_gamma(g, p[0], p[1], p[2]);
    }
    return 0.0;
}

}  // namespace detail

/// n iid draws from a null family. A Poisson spec with lambda = 0 is accepted
/// and yields the point mass at zero.
inline Sample sample_null(const FamilySpec& spec, std::size_t n, const RngStream& stream) {
    if (!(spec.family == Family::Poisson && spec.params.size() == 1 && spec.params[0] == 0.0)) validate(spec);
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
    auto g = stream.engine();
    std::vector<double> v(n);
    for (auto& x : v) x = detail::draw_null(g, spec);
    return Sample(std::move(v));
}

//---------------------------------------------------------------------------//
// Alternatives
//---------------------------------------------------------------------------//

enum class AltFamily {
    DiscreteUniform,
    Binomial,
    NegBinomial,
    PoissonMixture,
    PoissonDeltaZero,
    DiscreteWeibull,
    Weibull,
    InverseGaussian,
    LogNormal,
    Power,
    ShiftedPareto,
    Gompertz,
    LinearFailureRate,
    MixedCPExp,
    MixedCPGamma,
    GammaAlt,
};

struct AltInfo {
    AltFamily family;
    std::string_view name;
    std::size_t min_params;
    std::size_t max_params;
    bool discrete;
};

// Parameterisations (all continuous laws with unit scale unless a scale is given):
//   discrete_uniform (m)              uniform on {0, ..., m}
//   binomial (m, p)
//   negbinomial (r, p)                failures before the r-th success, mean r (1-p) / p
//   poisson_mixture (p, t1, t2)       p Po(t1) + (1-p) Po(t2)
//   poisson_delta_zero (w, lambda)    w Po(lambda) + (1-w) delta_0
//   discrete_weibull (q, b)           P(X >= x) = q^(x^b)
//   weibull (k [, scale])             F(x) = 1 - exp(-(x/scale)^k)
//   inverse_gaussian (mean [, shape]) shape defaults to 1
//   lognormal (sigma)                 log X ~ N(0, sigma^2)
//   power (t)                         X = U^t, density t^-1 x^((1-t)/t) on (0, 1)
//   shifted_pareto (t)                density t (1+x)^-(t+1)
//   gompertz (t)                      F(x) = 1 - exp(-t (e^x - 1))
//   linear_failure_rate (t)           hazard 1 + t x
//   mixed_cpexp (p, l1, b1, l2, b2)   p CP(l1, Exp(b1)) + (1-p) CP(l2, Exp(b2))
//   mixed_cpgamma (p, l1, a1, b1, l2, a2, b2)
//   gamma (shape [, rate])
inline constexpr AltInfo kAltTable[] = {
    {AltFamily::DiscreteUniform, "discrete_uniform", 1, 1, true},
    {AltFamily::Binomial, "binomial", 2, 2, true},
    {AltFamily::NegBinomial, "negbinomial", 2, 2, true},
    {AltFamily::PoissonMixture, "poisson_mixture", 3, 3, true},
    {AltFamily::PoissonDeltaZero, "poisson_delta_zero", 2, 2, true},
    {AltFamily::DiscreteWeibull, "discrete_weibull", 2, 2, true},
    {AltFamily::Weibull, "weibull", 1, 2, false},
    {AltFamily::InverseGaussian, "inverse_gaussian", 1, 2, false},
    {AltFamily::LogNormal, "lognormal", 1, 1, false},
    {AltFamily::Power, "power", 1, 1, false},
    {AltFamily::ShiftedPareto, "shifted_pareto", 1, 1, false},
    {AltFamily::Gompertz, "gompertz", 1, 1, false},
    {AltFamily::LinearFailureRate, "linear_failure_rate", 1, 1, false},
    {AltFamily::MixedCPExp, "mixed_cpexp", 5, 5, false},
    {AltFamily::MixedCPGamma, "mixed_cpgamma", 7, 7, false},
    {AltFamily::GammaAlt, "gamma", 1, 2, false},
};

inline const AltInfo& alt_info(AltFamily f) {
    for (const auto& info : kAltTable)
        if (info.family == f) return info;
    throw Error(ErrorCode::UnsupportedAlt, "unknown alternative");
}

inline std::string_view to_string(AltFamily f) { return alt_info(f).name; }

inline AltFamily alt_from_string(std::string_view s) {
    for (const auto& info : kAltTable)
        if (info.name == s) return info.family;
    throw Error(ErrorCode::UnsupportedAlt, "unknown alternative '" + std::string(s) + "'");
}

struct AltSpec {
    AltFamily family = AltFamily::DiscreteUniform;
    std::vector<double> params;

    friend bool operator==(const AltSpec&, const AltSpec&) = default;
};

inline void validate(const AltSpec& alt) {
    const AltInfo& info = alt_info(alt.family);
    const auto& p = alt.params;
    if (p.size() < info.min_params || p.size() > info.max_params)
        throw Error(ErrorCode::BadParamCount,
                    std::string(info.name) + ": wrong number of parameters (" + std::to_string(p.size()) + ")");
    for (double v : p)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonPositiveParam, std::string(info.name) + ": non-finite parameter");
    auto prob = [&](double v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(ErrorCode::NonPositiveParam, std::string(info.name) + ": probability outside [0, 1]");
    };
    auto positive = [&](double v) {
        if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveParam, std::string(info.name) + ": parameter must be > 0");
    };
    switch (alt.family) {
    case AltFamily::DiscreteUniform: positive(p[0]); break;
    case AltFamily::Binomial:
    case AltFamily::NegBinomial:
        positive(p[0]);
        prob(p[1]);
        if (p[0] != std::floor(p[0]))
            throw Error(ErrorCode::NonPositiveParam, std::string(info.name) + ": size must be an integer");
        break;
    case AltFamily::PoissonMixture:
        prob(p[0]);
        positive(p[1]);
        positive(p[2]);
        break;
    case AltFamily::PoissonDeltaZero:
        prob(p[0]);
        positive(p[1]);
        break;
    case AltFamily::DiscreteWeibull:
        if (!(p[0] > 0.0 && p[0] < 1.0))
            throw Error(ErrorCode::NonPositiveParam, "discrete_weibull: q must lie in (0, 1)");
        positive(p[1]);
        break;
    case AltFamily::MixedCPExp:
        prob(p[0]);
        for (std::size_t i = 1; i < p.size(); ++i) positive(p[i]);
        break;
    case AltFamily::MixedCPGamma:
        prob(p[0]);
        for (std::size_t i = 1; i < p.size(); ++i) positive(p[i]);
        break;
    default:
        for (double v : p) positive(v);
    }
}

namespace detail {

inline double draw_alt(Xoshiro256& g, const AltSpec& alt) {
    const auto& p = alt.params;
    switch (alt.family) {
    case AltFamily::DiscreteUniform:
        return static_cast<double>(std::uniform_int_distribution<long long>(0, static_cast<long long>(p[0]))(g));
    case AltFamily::Binomial:
        return static_cast<double>(std::binomial_distribution<long long>(static_cast<long long>(p[0]), p[1])(g));
    case AltFamily::NegBinomial:
        return static_cast<double>(
            std::negative_binomial_distribution<long long>(static_cast<long long>(p[0]), p[1])(g));
    case AltFamily::PoissonMixture: return g.uniform() < p[0] ? poisson(g, p[1]) : poisson(g, p[2]);
    case AltFamily::PoissonDeltaZero: return g.uniform() < p[0] ? poisson(g, p[1]) : 0.0;
    case AltFamily::DiscreteWeibull: {
        const double z = std::pow(std::log(g.uniform()) / std::log(p[0]), 1.0 / p[1]);
        return std::max(0.0, std::ceil(z) - 1.0);
    }
    case AltFamily::Weibull: return std::weibull_distribution<double>(p[0], p.size() > 1 ? p[1] : 1.0)(g);
    case AltFamily::InverseGaussian: return inverse_gaussian(g, p[0], p.size() > 1 ? p[1] : 1.0);
    case AltFamily::LogNormal: return std::exp(p[0] * std::normal_distribution<double>(0.0, 1.0)(g));
    case AltFamily::Power: return std::pow(g.uniform(), p[0]);
    case AltFamily::ShiftedPareto: return std::expm1(-std::log(g.uniform()) / p[0]);
    case AltFamily::Gompertz: return std::log1p(-std::log(g.uniform()) / p[0]);
    case AltFamily::LinearFailureRate: {
        // Cumulative hazard x + t x^2 / 2 equals an Exp(1) draw.
        const double e = -std::log(g.uniform());
        return 2.0 * e / (1.0 + std::sqrt(1.0 + 2.0 * p[0] * e));
    }
    case AltFamily::MixedCPExp: {
        const bool first = g.uniform() < p[0];
        const double lambda = first ? p[1] : p[3];
        const double beta = first ? p[2] : p[4];
        const double n = poisson(g, lambda);
        return n == 0.0 ? 0.0 : gamma(g, n, beta);
    }
    case AltFamily::MixedCPGamma: {
        const bool first = g.uniform() < p[0];
        return first ? compound_poisson_gamma(g, p[1], p[2], p[3]) : compound_poisson_gamma(g, p[4], p[5], p[6]);
    }
    case AltFamily::GammaAlt: return gamma(g, p[0], p.size() > 1 ? p[1] : 1.0);
    }
    throw Error(ErrorCode::UnsupportedAlt, "unknown alternative");
}

}  // namespace detail

inline Sample sample_alternative(const AltSpec& alt, std::size_t n, const RngStream& stream) {
    validate(alt);
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
    auto g = stream.engine();
    std::vector<double> v(n);
    for (auto& x : v) x = detail::draw_alt(g, alt);
    return Sample(std::move(v));
}

/// Data-generating law of a simulation row: a null family or an alternative.
using Distribution = std::variant<FamilySpec, AltSpec>;

inline Sample sample_from(const Distribution& d, std::size_t n, const RngStream& stream) {
    if (const auto* spec = std::get_if<FamilySpec>(&d)) return sample_null(*spec, n, stream);
    return sample_alternative(std::get<AltSpec>(d), n, stream);
}

inline bool is_discrete(const Distribution& d) {
    if (const auto* spec = std::get_if<FamilySpec>(&d)) return spec->family == Family::Poisson;
    return alt_info(std::get<AltSpec>(d).family).discrete;
}

}  // namespace iawd

#endif  // IAWD_SAMPLERS_HPP
