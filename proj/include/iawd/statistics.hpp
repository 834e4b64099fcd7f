#ifndef IAWD_STATISTICS_HPP
#define IAWD_STATISTICS_HPP

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>
#include <vector>

#include "iawd/core.hpp"
#include "iawd/kernels.hpp"

namespace iawd {

namespace detail {

/// Sorted distinct values with multiplicities. Sorting fixes the summation
/// order, so every statistic is bit-identical under permutation of the sample.
inline std::vector<std::pair<double, double>> distinct_with_counts(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> out;
    for (double x : v) {
        if (!out.empty() && out.back().first == x)
            out.back().second += 1.0;
        else
            out.emplace_back(x, 1.0);
    }
    return out;
}

inline double clamp_rounding(double value) {
    const double eps = 1e-10 * (1.0 + std::abs(value));
    return (value < 0.0 && value >= -eps) ? 0.0 : value;
}

/// Memoises an expensive kernel by its argument.
class Memo {
public:
    explicit Memo(const std::function<double(double)>& f, bool enabled) : f_(f), enabled_(enabled) {}
    double operator()(double r) {
        if (!enabled_) return f_(r);
        auto it = cache_.find(r);
        if (it != cache_.end()) return it->second;
        const double v = f_(r);
        cache_.emplace(r, v);
        return v;
    }

private:
    const std::function<double(double)>& f_;
    bool enabled_;
    std::unordered_map<double, double> cache_;
};

}  // namespace detail

/// Empirical Fourier statistic
///   T = n^-1 sum_{k,l} [a(x_k) a(x_l) Psi1(d_kl) + c^2 Psi2(d_kl) - 2 a(x_k) c Psi3(d_kl)],  d_kl = x_k - x_l,
/// with a(x) = x and c = xbar (Poisson, Dickman, Gamma) or c = lambda (CPExp, CPGamma).
/// Psi1 and Psi2 are evaluated once per unordered pair; Psi3 at both d and -d.
inline double t_statistic(const Sample& sample, const FamilySpec& spec, const KernelTriple& kernels) {
    if (!(kernels.spec == spec))
        throw Error(ErrorCode::KernelMismatch, "kernels were built for different family parameters");
    const double c = is_compound(spec.family) ? spec.params[0] : sample.mean();
    const auto groups = detail::distinct_with_counts(sample.values());

    const bool memo = kernels.provenance == Provenance::Quadrature;
    detail::Memo psi1(kernels.psi1, memo), psi2(kernels.psi2, memo), psi3(kernels.psi3, memo);

    const double p1_0 = psi1(0.0);
    const double p2_0 = psi2(0.0);
    const double p3_0 = psi3(0.0);
    NeumaierSum total;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto [u, mu] = groups[i];
        total.add(mu * mu * (u * u * p1_0 + c * c * p2_0 - 2.0 * u * c * p3_0));
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const auto [v, mv] = groups[j];
            const double d = u - v;
            const double pair =
                2.0 * u * v * psi1(d) + 2.0 * c * c * psi2(d) - 2.0 * c * (u * psi3(d) + v * psi3(-d));
            total.add(mu * mv * pair);
        }
    }
    return detail::clamp_rounding(total.value() / static_cast<double>(sample.size()));
}

inline double t_statistic(const Sample& sample, const FamilySpec& spec, const WeightSpec& weight) {
    return t_statistic(sample, spec, kernel_triple(spec, weight));
}

/// Laplace statistic for the compound Poisson gamma family:
///   U = n^-1 sum_{j,k} [x_j x_k K2(x_j + x_k) + 2 lambda x_j K1(x_j + x_k) + lambda^2 / (x_j + x_k + gamma)].
inline double u_statistic_cpg(const Sample& sample, const Params& est, double gamma) {
    const LaplaceCoeffs coeffs = laplace_coeffs_cpg(est, gamma);
    const double lambda = est[0];
    const auto groups = detail::distinct_with_counts(sample.values());
    // Zero observations drop out of the K terms; skipping them avoids evaluating
    // K at x = 0, where it can overflow for extreme fits.
    auto term = [&](double u, double v) {
        const double s = u + v;
        double t = lambda * lambda / (s + gamma);
        if (s > 0.0) t += lambda * s * coeffs.k1(s);
        if (u > 0.0 && v > 0.0) t += u * v * coeffs.k2(s);
        return t;
    };
    NeumaierSum total;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto [u, mu] = groups[i];
        total.add(mu * mu * term(u, u));
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const auto [v, mv] = groups[j];
            total.add(2.0 * mu * mv * term(u, v));
        }
    }
    return detail::clamp_rounding(total.value() / static_cast<double>(sample.size()));
}

}  // namespace iawd

#endif  // IAWD_STATISTICS_HPP
