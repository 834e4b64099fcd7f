// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Tolerances and Monte Carlo budgets are fixed here; IAWD_THREADS sets parallelism.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "iawd/iawd.hpp"

using namespace iawd;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
    }
};

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

class Dice {
public:
    explicit Dice(std::uint64_t seed) : g_(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * g_.uniform(); }
    template <class T>
    T pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(g_.uniform() * static_cast<double>(v.size()))];
    }

private:
    Xoshiro256 g_;
};

const WeightSpec kGauss1(WeightShape::GaussFamily, 1.0);
const WeightSpec kLaplace1(WeightShape::LaplaceExp, 1.0);

Params random_params(Family f, Dice& d) {
    switch (f) {
        case Family::Poisson: return {d.uniform(0.3, 8.0)};
        case Family::Dickman: return {d.uniform(0.3, 6.0)};
        case Family::Gamma: return {d.uniform(0.3, 6.0), d.uniform(0.3, 4.0)};
        case Family::CPExp: return {d.uniform(0.3, 5.0), d.uniform(0.3, 4.0)};
        case Family::CPGamma: return {d.uniform(0.5, 4.0), d.uniform(0.3, 3.0), d.uniform(0.5, 4.0)};
    }
    return {};
}

/// Fitted parameters when the sample admits them, else the generating ones.
Params fitted_or(Family f, const Sample& s, const Params& fallback) {
    try {
        return estimate(f, s);
    } catch (const Error&) {
        return fallback;
    }
}

Verdict oracle_equivalence() {
    Verdict v;
    Dice dice(101);
    const std::vector<Family> families{Family::Poisson, Family::Dickman, Family::Gamma, Family::CPExp};
    double worst_t = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Family f = families[static_cast<std::size_t>(i) % families.size()];
        const Params truth = random_params(f, dice);
        const std::size_t n = dice.pick<std::size_t>({3, 10, 20});
        const WeightSpec w(WeightShape::GaussFamily, dice.pick<double>({0.25, 1.0, 5.0}));
        const Sample s = sample_null({f, truth}, n, {101, static_cast<std::uint64_t>(i)});
        const FamilySpec spec{f, fitted_or(f, s, truth)};
        const double fast = t_statistic(s, spec, w);
        const double slow = t_statistic_oracle(s, spec, w);
        // Statistics that vanish up to rounding are compared on an absolute scale.
        const double err = std::abs(fast - slow) / std::max(std::abs(slow), 1e-12 * n);
        worst_t = std::max(worst_t, err);
    }
    v.require(worst_t <= 1e-6, "T worst rel " + fmt(worst_t));

    double worst_u = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Params truth = random_params(Family::CPGamma, dice);
        const std::size_t n = dice.pick<std::size_t>({3, 10, 20});
        const double gamma = dice.pick<double>({0.25, 1.0, 5.0});
        const Sample s = sample_null({Family::CPGamma, truth}, n, {102, static_cast<std::uint64_t>(i)});
        const Params est = fitted_or(Family::CPGamma, s, truth);
        worst_u = std::max(worst_u, rel_err(u_statistic_cpg(s, est, gamma), u_statistic_oracle(s, est, gamma)));
    }
    v.require(worst_u <= 1e-5, "U worst rel " + fmt(worst_u));
    return v;
}

Verdict poisson_level() {
    Verdict v;
    const TestSetup setup{Family::Poisson, kGauss1, StatKind::T};
    for (double lambda : {1.0, 5.0}) {
        const auto r = full_bootstrap_power(FamilySpec{Family::Poisson, {lambda}}, setup, 50, 1000, 200, 0.1,
                                            2000 + static_cast<std::uint64_t>(lambda));
        v.require(r.rate >= 0.07 && r.rate <= 0.13, "Po(" + fmt(lambda) + ") size " + fmt(r.rate));
    }
    return v;
}

Verdict strong_power() {
    Verdict v;
    const auto u01 = full_bootstrap_power(AltSpec{AltFamily::DiscreteUniform, {1}},
                                          {Family::Poisson, kGauss1, StatKind::T}, 50, 1000, 200, 0.1, 3001);
    v.require(u01.rate >= 0.95, "Poisson vs U(0;1) " + fmt(u01.rate));
    const auto w05 = full_bootstrap_power(AltSpec{AltFamily::Weibull, {0.5}},
                                          {Family::Dickman, kGauss1, StatKind::T}, 50, 1000, 200, 0.1, 3002);
    v.require(w05.rate >= 0.95, "Dickman vs W(0.5) " + fmt(w05.rate));
    return v;
}

Verdict gamma_vs_pareto() {
    Verdict v;
    const auto r = full_bootstrap_power(AltSpec{AltFamily::ShiftedPareto, {1}}, {Family::Gamma, kGauss1, StatKind::T},
                                        50, 1000, 200, 0.05, 4001);
    v.require(r.rate >= 0.65 && r.rate <= 0.95, "Gamma vs SP(1) " + fmt(r.rate));
    return v;
}

Verdict cpg_warp_speed() {
    Verdict v;
    const TestSetup setup{Family::CPGamma, kLaplace1, StatKind::U};
    auto report = [](const std::string& label, const PowerResult& r) {
        return label + " " + fmt(r.rate) + " (" + std::to_string(r.estimation_failures) + " fits failed)";
    };
    const auto null_rate = warp_speed_power(FamilySpec{Family::CPGamma, {1, 1, 5}}, setup, 100, 500, 0.05, 5001);
    v.require(null_rate.rate >= 0.02 && null_rate.rate <= 0.12, report("CP(1,Gamma(1,5)) size", null_rate));
    const auto ig = warp_speed_power(AltSpec{AltFamily::InverseGaussian, {0.5}}, setup, 100, 500, 0.05, 5002);
    v.require(ig.rate >= 0.40, report("IG(0.5)", ig));
    const auto mcp =
        warp_speed_power(AltSpec{AltFamily::MixedCPGamma, {0.75, 1, 1, 3, 10, 5, 3}}, setup, 100, 500, 0.05, 5003);
    v.require(mcp.rate >= 0.90, report("MCP(3/4,1,Gamma(1,3),10,Gamma(5,3))", mcp));
    return v;
}

Verdict estimator_recovery() {
    Verdict v;
    const std::vector<FamilySpec> truths{{Family::Poisson, {3.0}},
                                         {Family::Dickman, {2.0}},
                                         {Family::Gamma, {2.5, 1.5}},
                                         {Family::CPExp, {2.0, 1.5}},
                                         {Family::CPGamma, {2.0, 1.5, 2.0}}};
    std::uint64_t id = 0;
    for (const auto& truth : truths) {
        const Sample s = sample_null(truth, 100000, {6001, id++});
        const Params est = estimate(truth.family, s);
        const double tol = truth.family == Family::CPGamma ? 0.15 : 0.05;
        double worst = 0.0;
        for (std::size_t i = 0; i < est.size(); ++i) worst = std::max(worst, rel_err(est[i], truth.params[i]));
        v.require(worst <= tol, std::string(to_string(truth.family)) + " " + fmt(worst, 2));
    }
    return v;
}

Verdict dickman_moments() {
    Verdict v;
    for (double theta : {1.0, 5.0}) {
        const Sample s = sample_dickman(theta, 100000, {7001, static_cast<std::uint64_t>(theta)});
        const double n = static_cast<double>(s.size());
        const double mean = s.mean();
        const double var = s.variance();
        double m4 = 0.0;
        for (double x : s.values()) m4 += std::pow(x - mean, 4);
        m4 /= n;
        const double se_mean = std::sqrt(var / n);
        const double se_var = std::sqrt((m4 - var * var) / n);
        const double z_mean = (mean - theta) / se_mean;
        const double z_var = (var - theta / 2.0) / se_var;
        v.require(std::abs(z_mean) <= 3.0 && std::abs(z_var) <= 3.0,
                  "theta=" + fmt(theta) + " z_mean " + fmt(z_mean, 2) + " z_var " + fmt(z_var, 2));
    }
    return v;
}

Verdict invariants() {
    Verdict v;
    Dice dice(8001);
    const std::vector<Family> all{Family::Poisson, Family::Dickman, Family::Gamma, Family::CPExp, Family::CPGamma};
    std::size_t negatives = 0, perm_fail = 0, cases = 0;
    for (int i = 0; i < 60; ++i) {
        const Family f = all[static_cast<std::size_t>(i) % all.size()];
        const Params truth = random_params(f, dice);
        const WeightSpec w(dice.pick<WeightShape>({WeightShape::GaussFamily, WeightShape::ExpAbs}),
                           dice.pick<double>({0.25, 1.0, 5.0}));
        const Sample s = sample_null({f, truth}, 12, {8001, static_cast<std::uint64_t>(i)});
        const FamilySpec spec{f, fitted_or(f, s, truth)};
        std::vector<double> rev(s.values().begin(), s.values().end());
        std::reverse(rev.begin(), rev.end());
        std::rotate(rev.begin(), rev.begin() + 5, rev.end());
        const double t = t_statistic(s, spec, w);
        const double t_perm = t_statistic(Sample(rev), spec, w);
        negatives += t < 0.0 ? 1 : 0;
        perm_fail += rel_err(t_perm, t) > 1e-12 && std::abs(t_perm - t) > 1e-14 ? 1 : 0;
        if (f == Family::CPGamma) {
            const double u = u_statistic_cpg(s, spec.params, w.gamma);
            negatives += u < 0.0 ? 1 : 0;
            perm_fail += rel_err(u_statistic_cpg(Sample(rev), spec.params, w.gamma), u) > 1e-12 ? 1 : 0;
        }
        ++cases;
    }
    v.require(negatives == 0, "non-negative (" + std::to_string(cases) + " cases)");
    v.require(perm_fail == 0, "permutation invariant");

    bool same = true;
    const std::vector<std::pair<FamilySpec, StatKind>> boots{{{Family::Gamma, {2.0, 1.0}}, StatKind::T},
                                                             {{Family::CPGamma, {2.0, 1.0, 2.0}}, StatKind::U}};
    for (const auto& [spec, stat] : boots) {
        const Sample s = sample_null(spec, 30, {8002, 0});
        const WeightSpec w = stat == StatKind::U ? kLaplace1 : kGauss1;
        const TestOutcome one = bootstrap_test(s, spec.family, w, stat, 99, 0.05, 17, 1);
        for (unsigned threads : {2u, 4u}) {
            const TestOutcome many = bootstrap_test(s, spec.family, w, stat, 99, 0.05, 17, threads);
            same = same && one.statistic == many.statistic && one.p_value == many.p_value &&
                   one.critical_value == many.critical_value && one.redraws == many.redraws;
        }
    }
    v.require(same, "thread-count determinism");

    bool monotone = true;
    const Sample s = sample_null({Family::Poisson, {2.0}}, 40, {8003, 0});
    const BootstrapRun run = bootstrap_replicates(s, {Family::Poisson, kGauss1, StatKind::T}, 200, 23, 1);
    double prev = -1.0;
    for (double alpha = 0.5; alpha >= 0.005; alpha -= 0.005) {
        const double crit = decide(run, alpha, 23).critical_value;
        monotone = monotone && crit >= prev;
        prev = crit;
    }
    v.require(monotone, "critical value non-increasing in alpha");
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {"1 oracle equivalence", oracle_equivalence},
        {"2 poisson level", poisson_level},
        {"3 strong power", strong_power},
        {"4 gamma vs SP(1)", gamma_vs_pareto},
        {"5 cpgamma warp speed", cpg_warp_speed},
        {"6 estimator recovery", estimator_recovery},
        {"7 dickman moments", dickman_moments},
        {"8 invariants", invariants},
    };
    std::printf("threads: %u\n", resolve_threads(0));
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %-22s %7.1fs  %s\n", v.pass ? "PASS" : "FAIL", c.name, secs, v.detail.str().c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
