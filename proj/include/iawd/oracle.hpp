#ifndef IAWD_ORACLE_HPP
#define IAWD_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "iawd/core.hpp"
#include "iawd/kernels.hpp"
#include "iawd/special_math.hpp"

// Brute-force references: the statistics integrated directly in the frequency
// domain, with no kernel algebra. Slow by design.

namespace iawd {

/// Tolerances tight enough to check the kernel path to ~1e-8 relative.
inline QuadratureConfig oracle_quadrature_config() {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-15;
    cfg.rel_tol = 1e-12;
    cfg.max_subdivisions = 20000;
    return cfg;
}

namespace detail {

/// |D_t|^2 with D_t = n^{-1/2} sum_j (x_j - c d(t)) e^{i t x_j}.
inline double fourier_discrepancy_sq(const Sample& sample, const FamilySpec& spec, double c, double t) {
    std::complex<double> sx(0.0, 0.0), s1(0.0, 0.0);
    for (double x : sample.values()) {
        const std::complex<double> e(std::cos(t * x), std::sin(t * x));
        sx += x * e;
        s1 += e;
    }
    const std::complex<double> d = sx - c * stein_d(spec, t) * s1;
    return std::norm(d) / static_cast<double>(sample.size());
}

/// Integrates an even integrand over [-cutoff, cutoff] in panels short enough
/// to resolve the oscillation at the largest sample frequency.
template <class F>
double integrate_oscillatory_even(const F& f, double cutoff, double max_freq, const QuadratureConfig& cfg) {
    const double panel = std::min(cutoff, 2.0 * std::numbers::pi / (max_freq + 1.0));
    const int panels = static_cast<int>(std::ceil(cutoff / panel));
    NeumaierSum total;
    for (int k = 0; k < panels; ++k) {
        const double a = k * panel;
        const double b = std::min(cutoff, (k + 1) * panel);
        total.add(integrate_adaptive(f, a, b, cfg).value);
    }
    return 2.0 * total.value();
}

}  // namespace detail

/// T as the integral of |D_t|^2 omega(t) for a caller-supplied even weight that is
/// negligible beyond `cutoff`.
inline double t_statistic_oracle(const Sample& sample, const FamilySpec& spec,
                                 const std::function<double(double)>& omega, double cutoff,
                                 const QuadratureConfig& cfg = oracle_quadrature_config()) {
    cfg.check();
    if (spec.params.size() != param_count(spec.family))
        throw Error(ErrorCode::BadParamCount, "oracle: parameter count does not match family");
    const double c = is_compound(spec.family) ? spec.params[0] : sample.mean();
    const auto& v = sample.values();
    const double max_freq = *std::max_element(v.begin(), v.end());
    auto integrand = [&](double t) { return detail::fourier_discrepancy_sq(sample, spec, c, t) * omega(t); };
    return detail::integrate_oscillatory_even(integrand, cutoff, max_freq, cfg);
}

inline double t_statistic_oracle(const Sample& sample, const FamilySpec& spec, const WeightSpec& weight,
                                 const QuadratureConfig& cfg = oracle_quadrature_config()) {
    if (weight.shape == WeightShape::LaplaceExp)
        throw Error(ErrorCode::InvalidArgument, "t_statistic_oracle needs a real-line weight");
    auto omega = [&](double t) { return weight_value(spec, weight, t); };
    return t_statistic_oracle(sample, spec, omega, weight_cutoff(weight), cfg);
}

/// U as the half-line integral of |E_t|^2 e(t)^-2 e^{-gamma t}, with
/// E_t = n^{-1/2} sum_j (x_j - lambda e(t)) e^{-t x_j}.
inline double u_statistic_oracle(const Sample& sample, const Params& est, double gamma,
                                 const QuadratureConfig& cfg = oracle_quadrature_config()) {
    cfg.check();
    validate(FamilySpec{Family::CPGamma, est});
    if (!(gamma > 0.0)) throw Error(ErrorCode::NonPositiveParam, "Laplace weight gamma must be > 0");
    const double lambda = est[0];
    const double alpha = est[1];
    const double beta = est[2];
    const double n = static_cast<double>(sample.size());
    auto integrand = [&](double t) {
        // Divide through by e(t) before squaring: (sum x e^{-tx} / e(t) - lambda sum e^{-tx})^2.
        const double inv_e = 1.0 / laplace_e(alpha, beta, t);
        double sx = 0.0, s1 = 0.0;
        for (double x : sample.values()) {
            const double e = std::exp(-t * x);
            sx += x * e;
            s1 += e;
        }
        const double d = sx * inv_e - lambda * s1;
        return d * d / n * std::exp(-gamma * t);
    };
    return integrate_half_line(integrand, cfg, gamma);
}

}  // namespace iawd

#endif  // IAWD_ORACLE_HPP
