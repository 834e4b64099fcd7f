#ifndef IAWD_BOOTSTRAP_HPP
#define IAWD_BOOTSTRAP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "iawd/core.hpp"
#include "iawd/estimators.hpp"
#include "iawd/kernels.hpp"
#include "iawd/samplers.hpp"
#include "iawd/statistics.hpp"

namespace iawd {

//---------------------------------------------------------------------------//
// Threads
//---------------------------------------------------------------------------//

/// Worker count: an explicit request wins, then IAWD_THREADS, then the hardware.
/// Zero anywhere means "auto".
inline unsigned resolve_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("IAWD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Work is handed out dynamically; results must
/// be written to per-index slots. If any call throws, the exception from the
/// smallest failing index is rethrown, so errors do not depend on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

//---------------------------------------------------------------------------//
// Quantiles
//---------------------------------------------------------------------------//

/// Ceiling-index order statistic x_(ceil(level * m)) of m values (1-based), clamped
/// to [1, m]. A 1e-9 slack keeps e.g. 0.95 * 200 at index 190 despite rounding.
inline double empirical_quantile(std::vector<double> values, double level) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty set");
    if (!(level > 0.0 && level <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1]");
    const double m = static_cast<double>(values.size());
    auto k = static_cast<std::size_t>(std::ceil(level * m - 1e-9));
    k = std::clamp<std::size_t>(k, 1, values.size());
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
    return values[k - 1];
}

/// (1 + #{replicates >= statistic}) / (B + 1).
inline double bootstrap_p_value(const std::vector<double>& replicates, double statistic) {
    const auto ge = std::count_if(replicates.begin(), replicates.end(), [&](double v) { return v >= statistic; });
    return (1.0 + static_cast<double>(ge)) / (static_cast<double>(replicates.size()) + 1.0);
}

//---------------------------------------------------------------------------//
// Statistic dispatch
//---------------------------------------------------------------------------//

/// Statistic choice with its weight; checked once up front.
struct TestSetup {
    Family family;
    WeightSpec weight;
    StatKind stat;

    void check() const {
        if (stat == StatKind::U) {
            if (family != Family::CPGamma)
                throw Error(ErrorCode::InvalidArgument, "the U statistic is defined for cpgamma only");
            if (weight.shape != WeightShape::LaplaceExp)
                throw Error(ErrorCode::InvalidArgument, "the U statistic needs the laplace weight");
        } else if (weight.shape == WeightShape::LaplaceExp) {
            throw Error(ErrorCode::InvalidArgument, "the laplace weight belongs to the U statistic");
        }
    }

    /// U beyond the double range (extreme fits) is reported as +inf: the data are
    /// then as far from the fitted law as the statistic can express.
    double evaluate(const Sample& sample, const Params& est) const {
        if (stat == StatKind::U) {
            try {
                return u_statistic_cpg(sample, est, weight.gamma);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Overflow) throw;
                return std::numeric_limits<double>::infinity();
            }
        }
        return t_statistic(sample, FamilySpec{family, est}, weight);
    }
};

/// What a power study records for a data set that admits no parameter estimate.
/// Reject: no member of the null family matches the sample moments, which is
/// evidence against the null. Accept: count it as a non-rejection.
enum class FailurePolicy { Reject, Accept };

inline std::string_view to_string(FailurePolicy p) { return p == FailurePolicy::Reject ? "reject" : "accept"; }

inline FailurePolicy failure_policy_from_string(std::string_view s) {
    if (s == "reject") return FailurePolicy::Reject;
    if (s == "accept") return FailurePolicy::Accept;
    throw Error(ErrorCode::InvalidArgument, "estimation-failure policy must be 'reject' or 'accept'");
}

namespace detail {

inline bool is_estimation_failure(const Error& e) {
    return e.code() == ErrorCode::InvalidMomentSolution || e.code() == ErrorCode::DegenerateSample;
}

/// Per-replicate attempt cap; the whole run is additionally capped at 10 B redraws.
inline constexpr std::size_t kMaxAttemptsPerReplicate = 100;

struct Replicate {
    double value = 0.0;
    std::size_t redraws = 0;
};

/// One parametric-bootstrap replicate drawn from F(.; est). Attempt a uses
/// sub-stream a of `stream`, so redraws are reproducible too.
inline Replicate bootstrap_replicate(const TestSetup& setup, const Params& est, std::size_t n,
                                     const RngStream& stream) {
    const FamilySpec fitted{setup.family, est};
    for (std::size_t a = 0; a < kMaxAttemptsPerReplicate; ++a) {
        const Sample star = sample_null(fitted, n, stream.child(a));
        Params est_star;
        try {
            est_star = estimate(setup.family, star);
        } catch (const Error& e) {
            if (!is_estimation_failure(e)) throw;
            continue;
        }
        return {setup.evaluate(star, est_star), a};
    }
    throw Error(ErrorCode::ReplicateBudgetExhausted,
                "bootstrap replicate failed to produce an estimable sample in " +
                    std::to_string(kMaxAttemptsPerReplicate) + " attempts");
}

inline Params estimate_observed(Family family, const Sample& sample) {
    try {
        return estimate(family, sample);
    } catch (const Error& e) {
        if (!is_estimation_failure(e)) throw;
        throw Error(ErrorCode::EstimationFailed, std::string("cannot estimate parameters: ") + e.what());
    }
}

}  // namespace detail

/// Statistic, fitted parameters and the sorted bootstrap replicates.
struct BootstrapRun {
    double statistic = 0.0;
    Params estimated;
    std::vector<double> replicates;
    std::size_t redraws = 0;
};

/// Steps (1)-(2) of the parametric bootstrap: fit, then B replicates where
/// replicate j consumes stream (seed, j) whatever thread runs it.
inline BootstrapRun bootstrap_replicates(const Sample& sample, const TestSetup& setup, std::size_t B,
                                         std::uint64_t seed, unsigned threads = 0) {
    setup.check();
    if (B < 1) throw Error(ErrorCode::InvalidArgument, "B must be >= 1");
    BootstrapRun run;
    run.estimated = detail::estimate_observed(setup.family, sample);
    run.statistic = setup.evaluate(sample, run.estimated);

    std::vector<detail::Replicate> reps(B);
    parallel_for(
        B,
        [&](std::size_t j) { reps[j] = detail::bootstrap_replicate(setup, run.estimated, sample.size(), {seed, j}); },
        threads);
    run.replicates.reserve(B);
    for (const auto& r : reps) {
        run.replicates.push_back(r.value);
        run.redraws += r.redraws;
    }
    if (run.redraws > 10 * B)
        throw Error(ErrorCode::ReplicateBudgetExhausted,
                    std::to_string(run.redraws) + " redraws exceed the budget of 10 B = " + std::to_string(10 * B));
    std::sort(run.replicates.begin(), run.replicates.end());
    return run;
}

/// Steps (3)-(4): critical value T*_(ceil((1-alpha) B)); reject iff T exceeds it.
inline TestOutcome decide(const BootstrapRun& run, double alpha, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    TestOutcome out;
    out.statistic = run.statistic;
    out.estimated = run.estimated;
    out.B = run.replicates.size();
    out.seed = seed;
    out.redraws = run.redraws;
    out.critical_value = empirical_quantile(run.replicates, 1.0 - alpha);
    out.p_value = bootstrap_p_value(run.replicates, run.statistic);
    out.rejected = out.statistic > out.critical_value;
    return out;
}

/// Parametric bootstrap test of H0: sample ~ family.
inline TestOutcome bootstrap_test(const Sample& sample, Family family, const WeightSpec& weight, StatKind stat,
                                  std::size_t B, double alpha, std::uint64_t seed, unsigned threads = 0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    const TestSetup setup{family, weight, stat};
    return decide(bootstrap_replicates(sample, setup, B, seed, threads), alpha, seed);
}

//---------------------------------------------------------------------------//
// Power studies
//---------------------------------------------------------------------------//

struct PowerResult {
    double rate = 0.0;
    std::size_t rejections = 0;
    std::size_t repetitions = 0;
    /// Repetitions whose data sample admitted no parameter estimate; counted in
    /// `rejections` under FailurePolicy::Reject.
    std::size_t estimation_failures = 0;
};

/// Warp-speed power: per repetition r, one data statistic T_r and one bootstrap
/// replicate T*_r; reject when T_r exceeds the pooled (1 - alpha) quantile of {T*_r}.
/// Repetition r draws its data from stream (seed, r) sub-stream 0 and its
/// replicate from sub-stream 1.
inline PowerResult warp_speed_power(const Distribution& data, const TestSetup& setup, std::size_t n,
                                    std::size_t reps, double alpha, std::uint64_t seed, unsigned threads = 0,
                                    FailurePolicy on_failure = FailurePolicy::Reject) {
    setup.check();
    if (reps < 50) throw Error(ErrorCode::InvalidArgument, "warp-speed power needs at least 50 repetitions");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    struct Rep {
        bool ok = false;
        double t = 0.0;
        double t_star = 0.0;
    };
    std::vector<Rep> out(reps);
    parallel_for(
        reps,
        [&](std::size_t r) {
            const RngStream stream{seed, r};
            const Sample x = sample_from(data, n, stream.child(0));
            Params est;
            try {
                est = estimate(setup.family, x);
            } catch (const Error& e) {
                if (!detail::is_estimation_failure(e)) throw;
                return;
            }
            out[r] = {true, setup.evaluate(x, est), detail::bootstrap_replicate(setup, est, n, stream.child(1)).value};
        },
        threads);

    PowerResult res;
    res.repetitions = reps;
    std::vector<double> pooled;
    for (const auto& o : out) {
        if (o.ok)
            pooled.push_back(o.t_star);
        else
            ++res.estimation_failures;
    }
    if (!pooled.empty()) {
        const double crit = empirical_quantile(pooled, 1.0 - alpha);
        for (const auto& o : out)
            if (o.ok && o.t > crit) ++res.rejections;
    }
    if (on_failure == FailurePolicy::Reject) res.rejections += res.estimation_failures;
    res.rate = static_cast<double>(res.rejections) / static_cast<double>(reps);
    return res;
}

/// Power with a full B-replicate bootstrap per repetition. Repetition r draws its
/// data from stream (seed, r) sub-stream 0 and bootstraps with seed mix64(seed, r).
inline PowerResult full_bootstrap_power(const Distribution& data, const TestSetup& setup, std::size_t n,
                                        std::size_t reps, std::size_t B, double alpha, std::uint64_t seed,
                                        unsigned threads = 0, FailurePolicy on_failure = FailurePolicy::Reject) {
    setup.check();
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "power needs at least one repetition");
    std::vector<signed char> verdict(reps, 0);  // 1 reject, 0 accept, -1 estimation failure
    parallel_for(
        reps,
        [&](std::size_t r) {
            const Sample x = sample_from(data, n, RngStream{seed, r}.child(0));
            try {
                const auto run = bootstrap_replicates(x, setup, B, mix64(seed, r), 1);
                verdict[r] = decide(run, alpha, seed).rejected ? 1 : 0;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EstimationFailed) throw;
                verdict[r] = -1;
            }
        },
        threads);
    PowerResult res;
    res.repetitions = reps;
    for (auto v : verdict) {
        if (v == 1) ++res.rejections;
        if (v == -1) ++res.estimation_failures;
    }
    if (on_failure == FailurePolicy::Reject) res.rejections += res.estimation_failures;
    res.rate = static_cast<double>(res.rejections) / static_cast<double>(reps);
    return res;
}

}  // namespace iawd

#endif  // IAWD_BOOTSTRAP_HPP
