#ifndef IAWD_ESTIMATORS_HPP
#define IAWD_ESTIMATORS_HPP

#include <cmath>
#include <sstream>
#include <string>

#include "iawd/core.hpp"

namespace iawd {

/// Raw moment summaries behind a CPGamma estimate; reported when the moment
/// equations have no admissible solution.
struct CpgMoments {
    double mean = 0.0;
    double variance = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
};

inline CpgMoments cpg_moments(const Sample& s) {
    CpgMoments m;
    m.mean = s.mean();
    m.variance = s.variance();
    m.b2 = m.variance / m.mean;
    // x3bar - xbar * x2bar - 2 xbar s^2 is the third central moment.
    m.b3 = (s.mean_cube() - s.mean() * s.mean_sq() - 2.0 * s.mean() * s.variance()) / m.variance;
    return m;
}

namespace detail {

inline void require_positive(const Params& p, Family f, const std::string& diag) {
    const auto names = param_names(f);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i]) || !(p[i] > 0.0))
            throw Error(ErrorCode::InvalidMomentSolution,
                        std::string(to_string(f)) + " moment estimate " + names[i] + " = " + std::to_string(p[i]) +
                            " is not admissible" + (diag.empty() ? "" : " (" + diag + ")"));
}

}  // namespace detail

/// Method-of-moments estimates (variance with divisor n):
///   Poisson   lambda = xbar
///   Dickman   theta  = xbar
///   Gamma     alpha  = xbar^2 / s^2,  beta = xbar / s^2
///   CPExp     beta   = 2 xbar / s^2,  lambda = xbar beta
///   CPGamma   B2 = s^2 / xbar, B3 = m3 / s^2,
///             alpha = (B3 - 2 B2) / (B2 - B3), beta = 1 / (B3 - B2), lambda = xbar / (2 B2 - B3)
///
/// A Poisson sample of all zeros yields lambda = 0 (the point mass at zero);
/// every other estimate must be strictly positive.
inline Params estimate(Family family, const Sample& s) {
    const double xbar = s.mean();
    const double s2 = s.variance();
    switch (family) {
    case Family::Poisson: return Params{xbar};
    case Family::Dickman:
        if (!(xbar > 0.0)) throw Error(ErrorCode::DegenerateSample, "dickman estimate needs a positive mean");
        return Params{xbar};
    case Family::Gamma: {
        if (!(s2 > 0.0)) throw Error(ErrorCode::DegenerateSample, "gamma estimate needs positive variance");
        Params p{xbar * xbar / s2, xbar / s2};
        detail::require_positive(p, family, "");
        return p;
    }
    case Family::CPExp: {
        if (!(s2 > 0.0)) throw Error(ErrorCode::DegenerateSample, "cpexp estimate needs positive variance");
        const double beta = 2.0 * xbar / s2;
        Params p{xbar * beta, beta};
        detail::require_positive(p, family, "");
        return p;
    }
    case Family::CPGamma: {
        if (!(s2 > 0.0) || !(xbar > 0.0))
            throw Error(ErrorCode::DegenerateSample, "cpgamma estimate needs positive mean and variance");
        const CpgMoments m = cpg_moments(s);
        const double alpha = (m.b3 - 2.0 * m.b2) / (m.b2 - m.b3);
        const double beta = 1.0 / (m.b3 - m.b2);
        const double lambda = xbar / (2.0 * m.b2 - m.b3);
        std::ostringstream diag;
        diag << "mean=" << m.mean << " variance=" << m.variance << " B2=" << m.b2 << " B3=" << m.b3;
        Params p{lambda, alpha, beta};
        detail::require_positive(p, family, diag.str());
        return p;
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown family");
}

}  // namespace iawd

#endif  // IAWD_ESTIMATORS_HPP
