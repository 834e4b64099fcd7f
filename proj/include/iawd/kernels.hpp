#ifndef IAWD_KERNELS_HPP
#define IAWD_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "iawd/core.hpp"
#include "iawd/special_math.hpp"

namespace iawd {

//---------------------------------------------------------------------------//
// Stein data and weights
//---------------------------------------------------------------------------//

/// d(t) = E[d(Y) e^{itY}] for the family's biasing variable Y.
///   Poisson: Y = 1; Dickman: Y ~ U[0,1]; Gamma: Y ~ Exp(beta);
///   CPExp: E[Y e^{itY}] with Y ~ Exp(beta); CPGamma: E[Y e^{itY}] with Y ~ Gamma(alpha, beta).
inline std::complex<double> stein_d(const FamilySpec& spec, double t) {
    using C = std::complex<double>;
    const C it(0.0, t);
    switch (spec.family) {
    case Family::Poisson: return std::exp(it);
    case Family::Dickman:
        if (std::abs(t) < 1e-8) return C(1.0 - t * t / 6.0, t / 2.0);
        return (std::exp(it) - 1.0) / it;
    case Family::Gamma: {
        const double beta = spec.params[1];
        return beta / (beta - it);
    }
    case Family::CPExp: {
        const double beta = spec.params[1];
        return beta / ((beta - it) * (beta - it));
    }
    case Family::CPGamma: {
        const double alpha = spec.params[1];
        const double beta = spec.params[2];
        return (alpha / beta) * std::pow(C(1.0, -t / beta), -(alpha + 1.0));
    }
    }
    return {};
}

/// Family-specific polynomial prefactor of the Gaussian weight.
inline double gauss_prefactor(const FamilySpec& spec, double t) {
    switch (spec.family) {
    case Family::Poisson:
    case Family::CPGamma: return 1.0;
    case Family::Dickman: return t * t;
    case Family::Gamma: {
        const double b = spec.params[1];
        return b * b + t * t;
    }
    case Family::CPExp: {
        const double b = spec.params[1];
        const double q = b * b + t * t;
        return q * q;
    }
    }
    return 1.0;
}

/// Normalisation constant of the weight. Gaussian weights use sqrt(gamma / 2 pi)
/// (times gamma for Dickman) so that the closed-form kernels hold verbatim; ExpAbs
/// uses gamma / 2 so that int omega = 1.
inline double weight_constant(Family family, const WeightSpec& w) {
    switch (w.shape) {
    case WeightShape::GaussFamily: {
        const double c = std::sqrt(w.gamma / (2.0 * std::numbers::pi));
        return family == Family::Dickman ? c * w.gamma : c;
    }
    case WeightShape::ExpAbs: return 0.5 * w.gamma;
    case WeightShape::LaplaceExp: break;
    }
    throw Error(ErrorCode::InvalidArgument, "LaplaceExp is a half-line weight; no real-line value");
}

/// omega(t) on the real line, normalised per weight_constant().
inline double weight_value(const FamilySpec& spec, const WeightSpec& w, double t) {
    const double c = weight_constant(spec.family, w);
    if (w.shape == WeightShape::GaussFamily)
        return c * gauss_prefactor(spec, t) * std::exp(-0.5 * w.gamma * t * t);
    return c * std::exp(-w.gamma * std::abs(t));
}

/// Frequency beyond which omega is negligible (below ~1e-16 of its peak, with
/// headroom for the polynomial prefactors).
inline double weight_cutoff(const WeightSpec& w) {
    if (w.shape == WeightShape::GaussFamily) return std::sqrt(2.0 * 45.0 / w.gamma);
    return 45.0 / w.gamma;
}

//---------------------------------------------------------------------------//
// Kernel triple
//---------------------------------------------------------------------------//

enum class Provenance { ClosedForm, Quadrature };

/// Evaluators for Psi1, Psi2, Psi3 at a lag r. Psi1 and Psi2 are even; Psi3 is not.
struct KernelTriple {
    std::function<double(double)> psi1;
    std::function<double(double)> psi2;
    std::function<double(double)> psi3;
    Provenance provenance = Provenance::ClosedForm;
    FamilySpec spec;
    WeightSpec weight;
};

/// Quadrature settings used for numerically evaluated kernels.
inline QuadratureConfig kernel_quadrature_config() {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-13;
    cfg.rel_tol = 1e-10;
    cfg.max_subdivisions = 4000;
    return cfg;
}

namespace detail {

/// Integrates g over [0, upper] with extra breakpoints at multiples of `scale`
/// so that narrow features near the origin are not stepped over.
template <class G>
double integrate_with_breaks(const G& g, double upper, double scale, const QuadratureConfig& cfg) {
    std::vector<double> pts{0.0};
    for (double p = scale; p < upper; p *= 8.0) pts.push_back(p);
    pts.push_back(upper);
    NeumaierSum s;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s.add(integrate(g, pts[i], pts[i + 1], cfg));
    return s.value();
}

/// Characteristic frequency scale of |d(t)|: the width over which it changes.
inline double stein_scale(const FamilySpec& spec) {
    switch (spec.family) {
    case Family::Gamma:
    case Family::CPExp: return spec.params[1];
    case Family::CPGamma: return spec.params[2] / std::sqrt(spec.params[1] + 1.0);
    default: return 1.0;
    }
}

inline KernelTriple fourier_quadrature_kernels(const FamilySpec& spec, const WeightSpec& w) {
    const double upper = weight_cutoff(w);
    const double scale = std::min(1.0, stein_scale(spec));
    const QuadratureConfig cfg = kernel_quadrature_config();
    KernelTriple k;
    k.provenance = Provenance::Quadrature;
    k.spec = spec;
    k.weight = w;
    // Integrands are even in t (Psi3 after pairing t and -t), so integrate over [0, upper] and double.
    k.psi1 = [spec, w, upper, scale, cfg](double r) {
        auto g = [&](double t) { return std::cos(t * r) * weight_value(spec, w, t); };
        return 2.0 * integrate_with_breaks(g, upper, scale, cfg);
    };
    k.psi2 = [spec, w, upper, scale, cfg](double r) {
        auto g = [&](double t) { return std::norm(stein_d(spec, t)) * std::cos(t * r) * weight_value(spec, w, t); };
        return 2.0 * integrate_with_breaks(g, upper, scale, cfg);
    };
    k.psi3 = [spec, w, upper, scale, cfg](double r) {
        auto g = [&](double t) {
            const auto d = stein_d(spec, t);
            return (std::cos(t * r) * d.real() + std::sin(t * r) * d.imag()) * weight_value(spec, w, t);
        };
        return 2.0 * integrate_with_breaks(g, upper, scale, cfg);
    };
    return k;
}

}  // namespace detail

/// Psi2 of the compound Poisson gamma family under the pure Gaussian weight:
///   c int |d(t)|^2 cos(tr) e^{-gamma t^2/2} dt,  |d(t)|^2 = alpha^2 / (beta^2 (1 + (t/beta)^2)^(alpha+1)).
inline double cpg_psi2(double alpha, double beta, double gamma, double r,
                       const QuadratureConfig& cfg = kernel_quadrature_config()) {
    const double c = std::sqrt(gamma / (2.0 * std::numbers::pi));
    const double upper = std::sqrt(2.0 * 45.0 / gamma);
    const double scale = std::min(1.0, beta / std::sqrt(alpha + 1.0));
    auto g = [&](double t) {
        const double u = t / beta;
        const double mod2 = alpha * alpha / (beta * beta) * std::exp(-(alpha + 1.0) * std::log1p(u * u));
        return mod2 * std::cos(t * r) * std::exp(-0.5 * gamma * t * t);
    };
    return 2.0 * c * detail::integrate_with_breaks(g, upper, scale, cfg);
}

/// Psi3 of the compound Poisson gamma family: int_0^inf y Psi1(r - y) g(y; alpha, beta) dy
/// with Psi1(u) = exp(-u^2 / (2 gamma)) and g the gamma density (rate parameterisation).
inline double cpg_psi3(double alpha, double beta, double gamma, double r,
                       const QuadratureConfig& cfg = kernel_quadrature_config()) {
    // y * density(y) = beta^alpha y^alpha e^{-beta y} / Gamma(alpha)
    const double log_norm = alpha * std::log(beta) - std::lgamma(alpha);
    auto g = [&](double y) {
        if (y <= 0.0) return 0.0;
        const double z = r - y;
        return std::exp(log_norm + alpha * std::log(y) - beta * y - z * z / (2.0 * gamma));
    };
    const double width = 9.5 * std::sqrt(gamma);
    const double lo = std::max(0.0, r - width);
    const double hi = r + width;
    if (hi <= 0.0) return 0.0;
    // Breakpoints around the gamma mass so that a narrow density is never stepped over.
    const double mean = alpha / beta;
    const double sd = std::sqrt(alpha) / beta;
    std::vector<double> pts{lo, hi};
    for (double p : {mean - 10.0 * sd, mean - sd, mean, mean + sd, mean + 10.0 * sd, r})
        if (p > lo && p < hi) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    NeumaierSum s;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s.add(integrate(g, pts[i], pts[i + 1], cfg));
    return s.value();
}

/// (Psi2, Psi3) of the compound Poisson gamma family at lag r, by quadrature.
inline std::pair<double, double> cpg_psi_quadrature(double alpha, double beta, double gamma, double r,
                                                    const QuadratureConfig& cfg = kernel_quadrature_config()) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
        throw Error(ErrorCode::NonPositiveParam, "cpg_psi_quadrature needs alpha, beta, gamma > 0");
    return {cpg_psi2(alpha, beta, gamma, r, cfg), cpg_psi3(alpha, beta, gamma, r, cfg)};
}

/// Kernel triple for a family and weight. Gaussian weights use the closed forms
/// for Poisson, Dickman, Gamma and CPExp; CPGamma (Psi2, Psi3) and every ExpAbs
/// kernel are quadrature-backed.
inline KernelTriple kernel_triple(const FamilySpec& spec, const WeightSpec& weight) {
    if (weight.shape == WeightShape::LaplaceExp)
        throw Error(ErrorCode::InvalidArgument, "LaplaceExp weight has no Fourier kernel triple");
    if (spec.params.size() != param_count(spec.family))
        throw Error(ErrorCode::BadParamCount, "kernel_triple: parameter count does not match family");
    if (weight.shape == WeightShape::ExpAbs) return detail::fourier_quadrature_kernels(spec, weight);

    const double g = weight.gamma;
    auto gauss = [g](double r) { return std::exp(-r * r / (2.0 * g)); };
    KernelTriple k;
    k.spec = spec;
    k.weight = weight;
    k.provenance = Provenance::ClosedForm;
    switch (spec.family) {
    case Family::Poisson:
        k.psi1 = gauss;
        k.psi2 = gauss;
        k.psi3 = [gauss](double r) { return gauss(r - 1.0); };
        break;
    case Family::Dickman:
        k.psi1 = [g, gauss](double r) { return (g - r * r) / g * gauss(r); };
        k.psi2 = [g, gauss](double r) { return g * (2.0 * gauss(r) - gauss(r + 1.0) - gauss(r - 1.0)); };
        k.psi3 = [gauss](double r) { return r * gauss(r) - (r - 1.0) * gauss(r - 1.0); };
        break;
    case Family::Gamma: {
        const double b = spec.params[1];
        k.psi1 = [g, b, gauss](double r) { return (g - r * r + b * b * g * g) / (g * g) * gauss(r); };
        k.psi2 = [b, gauss](double r) { return b * b * gauss(r); };
        k.psi3 = [g, b, gauss](double r) { return b / g * (r + b * g) * gauss(r); };
        break;
    }
    case Family::CPExp: {
        const double b = spec.params[1];
        k.psi1 = [g, b, gauss](double r) {
            const double r2 = r * r;
            const double bg = b * b * g;
            return (r2 * r2 - 2.0 * r2 * g * (3.0 + bg) + g * g * (3.0 + bg * (2.0 + bg))) / (g * g * g * g) *
                   gauss(r);
        };
        k.psi2 = [b, gauss](double r) { return b * b * gauss(r); };
        k.psi3 = [g, b, gauss](double r) {
            const double s = b * g + r;
            return b / (g * g) * (-g + s * s) * gauss(r);
        };
        break;
    }
    case Family::CPGamma: {
        const double a = spec.params[1];
        const double b = spec.params[2];
        k.provenance = Provenance::Quadrature;
        k.psi1 = gauss;
        k.psi2 = [a, b, g](double r) { return cpg_psi2(a, b, g, r); };
        k.psi3 = [a, b, g](double r) { return cpg_psi3(a, b, g, r); };
        break;
    }
    }
    return k;
}

//---------------------------------------------------------------------------//
// Laplace coefficients (compound Poisson gamma)
//---------------------------------------------------------------------------//

/// Coefficients of the CPGamma Laplace statistic:
///   k2(x) =  int_0^inf e(t)^-2 e^{-t(x+gamma)} dt > 0
///   k1(x) = -int_0^inf e(t)^-1 e^{-t(x+gamma)} dt < 0
/// with e(t) = E[Y e^{-tY}] = (alpha/beta) (1 + t/beta)^-(alpha+1), beta a rate.
struct LaplaceCoeffs {
    std::function<double(double)> k1;
    std::function<double(double)> k2;
    double gamma = 1.0;
};

namespace detail {

inline double checked_exp(double log_value, const char* what) {
    if (!(log_value < 709.0))
        throw Error(ErrorCode::Overflow, std::string(what) + " overflows even in log space");
    return std::exp(log_value);
}

}  // namespace detail

/// Closed forms via the upper incomplete gamma, evaluated in log space:
///   log|k1(x)| = beta z - alpha log beta - log alpha - (alpha+2) log z + log G(alpha+2, beta z)
///   log  k2(x) = beta z - 2 alpha log beta - 2 log alpha - (2 alpha+3) log z + log G(2 alpha+3, beta z)
/// where z = x + gamma.
inline LaplaceCoeffs laplace_coeffs_cpg(const Params& est, double gamma) {
    validate(FamilySpec{Family::CPGamma, est});
    if (!(gamma > 0.0)) throw Error(ErrorCode::NonPositiveParam, "Laplace weight gamma must be > 0");
    const double alpha = est[1];
    const double beta = est[2];
    const double log_a = std::log(alpha);
    const double log_b = std::log(beta);
    LaplaceCoeffs c;
    c.gamma = gamma;
    c.k1 = [=](double x) {
        const double z = x + gamma;
        const double lv = beta * z - alpha * log_b - log_a - (alpha + 2.0) * std::log(z) +
                          log_upper_incomplete_gamma(alpha + 2.0, beta * z);
        return -detail::checked_exp(lv, "K1");
    };
    c.k2 = [=](double x) {
        const double z = x + gamma;
        const double lv = beta * z - 2.0 * alpha * log_b - 2.0 * log_a - (2.0 * alpha + 3.0) * std::log(z) +
                          log_upper_incomplete_gamma(2.0 * alpha + 3.0, beta * z);
        return detail::checked_exp(lv, "K2");
    };
    return c;
}

/// e(t) = E[Y e^{-tY}] for Y ~ Gamma(alpha, beta) (rate).
inline double laplace_e(double alpha, double beta, double t) {
    return alpha / beta * std::exp(-(alpha + 1.0) * std::log1p(t / beta));
}

}  // namespace iawd

#endif  // IAWD_KERNELS_HPP
