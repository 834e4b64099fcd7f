#ifndef IAWD_SPECIAL_MATH_HPP
#define IAWD_SPECIAL_MATH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "iawd/core.hpp"

namespace iawd {

//---------------------------------------------------------------------------//
// Upper incomplete gamma
//---------------------------------------------------------------------------//

/// log of the upper incomplete gamma function, log int_x^inf y^(a-1) e^-y dy.
/// Series for the lower function when x < a + 1, Lentz continued fraction otherwise.
inline double log_upper_incomplete_gamma(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw Error(ErrorCode::NonPositiveShape, "upper incomplete gamma needs a > 0");
    if (!(x >= 0.0)) throw Error(ErrorCode::DomainError, "upper incomplete gamma needs x >= 0");
    const double lg = std::lgamma(a);
    if (x == 0.0) return lg;
    if (std::isinf(x)) return -std::numeric_limits<double>::infinity();

    constexpr double eps = 1e-17;
    constexpr int max_iter = 100000;
    if (x < a + 1.0) {
        // lower(a,x) = e^-x x^a sum_{k>=0} x^k / (a (a+1) ... (a+k))
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int i = 0; i < max_iter; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) break;
        }
        const double log_lower = -x + a * std::log(x) + std::log(sum);
        return lg + std::log1p(-std::exp(log_lower - lg));
    }

    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return -x + a * std::log(x) + std::log(h);
}

/// Upper incomplete gamma function int_x^inf y^(a-1) e^-y dy, a > 0, x >= 0.
inline double upper_incomplete_gamma(double a, double x) {
    return std::exp(log_upper_incomplete_gamma(a, x));
}

//---------------------------------------------------------------------------//
// Quadrature
//---------------------------------------------------------------------------//

enum class HalfLineTransform { ExpMap, Laguerre };

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 200;
    HalfLineTransform half_line_transform = HalfLineTransform::ExpMap;

    void check() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw Error(ErrorCode::InvalidArgument, "quadrature tolerances must be > 0");
        if (max_subdivisions < 10)
            throw Error(ErrorCode::InvalidArgument, "max_subdivisions must be >= 10");
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

namespace detail {

// 21-point Kronrod rule with embedded 10-point Gauss rule (QUADPACK qk21).
// Odd indices of kXgk are the Gauss abscissae.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(const F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resk = kWgk[10] * fc;
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> fv1{}, fv2{};
    for (int j = 0; j < 10; ++j) {
        const double x = half * kXgk[j];
        fv1[j] = f(centre - x);
        fv2[j] = f(centre + x);
        const double s = fv1[j] + fv2[j];
        resk += kWgk[j] * s;
        resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * s;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

    double err = std::abs((resk - resg) * half);
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * epmach))
        err = std::max(epmach * 50.0 * resabs, err);
    return {a, b, resk * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21-point) quadrature on a finite interval.
/// Bisects the segment with the largest error estimate until the total error
/// drops below max(abs_tol, rel_tol |I|). Throws NoConvergence when the
/// subdivision budget runs out first.
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b, const QuadratureConfig& cfg = {}) {
    cfg.check();
    if (a == b) return {};
    std::vector<detail::Segment> heap;
    heap.reserve(static_cast<std::size_t>(cfg.max_subdivisions) + 1);
    heap.push_back(detail::gk21(f, a, b));
    double total = heap.front().value;
    double error = heap.front().error;
    int subdivisions = 1;
    auto converged = [&] { return error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
    while (!converged()) {
        if (subdivisions >= cfg.max_subdivisions)
            throw Error(ErrorCode::NoConvergence, "adaptive quadrature exhausted " +
                                                      std::to_string(cfg.max_subdivisions) +
                                                      " subdivisions (error estimate " +
                                                      std::to_string(error) + ")");
        std::pop_heap(heap.begin(), heap.end());
        const detail::Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Segment left = detail::gk21(f, worst.a, mid);
        const detail::Segment right = detail::gk21(f, mid, worst.b);
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        ++subdivisions;
        total += (left.value + right.value) - worst.value;
        error += (left.error + right.error) - worst.error;
        if (!std::isfinite(total))
            throw Error(ErrorCode::NoConvergence, "integrand produced a non-finite value");
        if (converged() || subdivisions % 64 == 0) {
            // Running totals drift; resum before trusting them.
            NeumaierSum v, e;
            for (const auto& seg : heap) {
                v.add(seg.value);
                e.add(seg.error);
            }
            total = v.value();
            error = e.value();
        }
    }
    return {total, error, subdivisions};
}

template <class F>
double integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {}) {
    return integrate_adaptive(f, a, b, cfg).value;
}

/// Integral over the real line via t = s / (1 - s^2), s in (-1, 1).
template <class F>
double integrate_real_line(const F& f, const QuadratureConfig& cfg = {}) {
    auto mapped = [&f](double s) {
        const double d = 1.0 - s * s;
        if (d <= 0.0) return 0.0;
        const double t = s / d;
        const double jac = (1.0 + s * s) / (d * d);
        if (!std::isfinite(t) || !std::isfinite(jac)) return 0.0;
        const double v = f(t) * jac;
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(mapped, -1.0, 1.0, cfg);
}

inline constexpr double kLaguerreSplit = 8.0;

namespace detail {

/// Gauss-Laguerre nodes and weights (weight e^-x), Newton iteration on L_n.
inline void gauss_laguerre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            z = 3.0 / (1.0 + 2.4 * n);
        else if (i == 1)
            z += 15.0 / (1.0 + 2.5 * n);
        else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2]);
        }
        double p1 = 0.0, p2 = 0.0, pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1 - z) * p2 - j * p3) / (j + 1);
            }
            pp = (n * p1 - n * p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::abs(z)) break;
        }
        x[i] = z;
        // w_i = -1 / (pp * n * L_{n-1}(x_i)); here p2 = L_{n-1}.
        w[i] = -1.0 / (pp * n * p2);
    }
}

template <class F>
double laguerre_sum(const F& f, const std::vector<double>& x, const std::vector<double>& w) {
    NeumaierSum s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = w[i] * std::exp(x[i]) * f(x[i]);
        if (std::isfinite(v)) s.add(v);
    }
    return s.value();
}

}  // namespace detail

/// Integral over (0, inf).
///  - ExpMap: [0, 1/rate] directly plus the tail through t = (1 - log(1 - s)) / rate,
///    which flattens integrands decaying like exp(-rate t).
///  - Laguerre: adaptive on [0, 8/rate], 64-point Gauss-Laguerre beyond, tail error
///    estimated against the 32-point rule.
template <class F>
double integrate_half_line(const F& f, const QuadratureConfig& cfg = {}, double decay_rate = 1.0) {
    cfg.check();
    if (!(decay_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "decay rate must be > 0");
    if (cfg.half_line_transform == HalfLineTransform::Laguerre) {
        static const auto rules = [] {
            std::array<std::vector<double>, 4> r;
            detail::gauss_laguerre(32, r[0], r[1]);
            detail::gauss_laguerre(64, r[2], r[3]);
            return r;
        }();
        // Adaptive on [0, a]; the tail t = a + x / rate goes to Gauss-Laguerre, which
        // keeps endpoint singularities at 0 away from the polynomial rule.
        const double a = kLaguerreSplit / decay_rate;
        auto tail = [&f, a, decay_rate](double x) { return f(a + x / decay_rate) / decay_rate; };
        const double coarse = detail::laguerre_sum(tail, rules[0], rules[1]);
        const double fine = detail::laguerre_sum(tail, rules[2], rules[3]);
        QuadratureConfig head = cfg;
        head.abs_tol = 0.5 * cfg.abs_tol;
        const double body = integrate(f, 0.0, a, head);
        if (std::abs(fine - coarse) > std::max(0.5 * cfg.abs_tol, cfg.rel_tol * std::abs(body + fine)))
            throw Error(ErrorCode::NoConvergence, "Gauss-Laguerre 32/64 tail estimates disagree");
        return body + fine;
    }
    const double split = 1.0 / decay_rate;
    auto tail = [&f, split, decay_rate](double s) {
        const double d = 1.0 - s;
        if (d <= 0.0) return 0.0;
        const double t = split - std::log(d) / decay_rate;
        const double v = f(t) / (d * decay_rate);
        return std::isfinite(v) ? v : 0.0;
    };
    QuadratureConfig half = cfg;
    half.abs_tol = 0.5 * cfg.abs_tol;
    return integrate(f, 0.0, split, half) + integrate(tail, 0.0, 1.0, half);
}

}  // namespace iawd

#endif  // IAWD_SPECIAL_MATH_HPP
