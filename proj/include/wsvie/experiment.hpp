#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "brownian.hpp"
#include "problem.hpp"
#include "solver.hpp"
#include "walsh.hpp"

namespace wsvie {

/// Error statistics at one report time over the successful trials.
struct ErrorStats {
    double t = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    std::size_t n = 0;
};

struct MonteCarloReport {
    std::vector<ErrorStats> stats;
    std::size_t requested = 0;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;  ///< "trial <i>: <what>", sorted by trial

    std::size_t effective() const noexcept { return requested - failures; }
};

struct ConvergenceReport {
    std::vector<std::size_t> resolutions;
    std::vector<double> rms_errors;
    std::vector<std::size_t> effective_trials;
    std::vector<std::size_t> failures;
    /// Least-squares slope of log(rms) against log(h). Empty when the errors
    /// are at solver-tolerance level and a slope would be meaningless.
    std::optional<double> estimated_order;
};

inline const std::vector<double>& default_report_times() {
    static const std::vector<double> times{0.1, 0.3, 0.5, 0.7, 0.9};
    return times;
}

struct ExperimentOptions {
    SolverOptions solver;
    std::vector<double> report_times = default_report_times();
    unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Two-sided 95% normal quantile used for the confidence interval.
inline constexpr double z_975 = 1.96;

/**
 * Pathwise error |x(t) - x_m(t)| at report time t.
 *
 * The numerical side is the block-constant value x_m(t_j) of the block j
 * containing t. The exact solution is evaluated at time t with the Brownian
 * value of that block's collocation sample B(t_j), which is the sample the
 * block value was built from. Deterministic time dependence of the exact
 * solution therefore still contributes the O(h) reconstruction error.
 */
inline double error_at(const SolveResult& result, const ProblemSpec& problem,
                       const BrownianPath& path, double t) {
    if (!problem.exact)
        throw std::invalid_argument("error_at: problem '" + problem.label +
                                    "' has no exact solution");
    if (path.resolution() != result.resolution())
        throw std::invalid_argument("error_at: path and result resolutions differ");
    const double numeric = reconstruct(result, t);
    const auto j = static_cast<std::size_t>(std::floor(t * static_cast<double>(result.resolution())));
    return std::abs((*problem.exact)(t, path.at_midpoint(j)) - numeric);
}

/// Walsh coefficients (1/m) T_W v of a vector of block values.
inline CoefficientVector walsh_coefficients(std::span<const double> block_values,
                                            const WalshMatrix& tw) {
    auto c = tw.apply(block_values);
    const double inv_m = 1.0 / static_cast<double>(tw.size());
    for (auto& v : c) v *= inv_m;
    return CoefficientVector(std::move(c));
}

/// max_i |X_i - Y_i|
inline double coefficient_error_norm(const CoefficientVector& X, const CoefficientVector& Y) {
    if (X.size() != Y.size())
        throw std::invalid_argument("coefficient_error_norm: lengths " + std::to_string(X.size()) +
                                    " and " + std::to_string(Y.size()) + " differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) worst = std::max(worst, std::abs(X[i] - Y[i]));
    return worst;
}

/// Infinity norm between the Walsh coefficients of the exact solution sampled
/// at the midpoints and those of the solved x_m.
inline double solution_coefficient_error(const SolveResult& result, const ProblemSpec& problem,
                                         const BrownianPath& path, const BasisConfig& cfg) {
    if (!problem.exact)
        throw std::invalid_argument("solution_coefficient_error: no exact solution");
    const WalshMatrix tw(cfg);
    std::vector<double> exact(cfg.resolution());
    for (std::size_t j = 0; j < exact.size(); ++j)
        exact[j] = (*problem.exact)(cfg.midpoint(j), path.at_midpoint(j));
    return coefficient_error_norm(walsh_coefficients(exact, tw),
                                  walsh_coefficients(result.x_colloc, tw));
}

/// Mean, sample sd (n-1) and mean +- 1.96 sd / sqrt(n), summed in index order.
inline ErrorStats summarize(double t, std::span<const double> samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("summarize: need at least 2 samples, got " +
                                    std::to_string(samples.size()));
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double half = z_975 * sd / std::sqrt(n);
    return ErrorStats{t, mean, sd, mean - half, mean + half, samples.size()};
}

namespace detail {

/// Run body(i) for i in [0, count) on a few threads. Each index writes only
/// its own slot, so results do not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    pool.clear();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct TrialOutcome {
    std::vector<double> errors;
    std::string failure;
    bool ok = false;
};

inline std::vector<TrialOutcome> run_trials(const ProblemSpec& problem, const BasisConfig& cfg,
                                            std::size_t n, std::uint64_t base_seed,
                                            const ExperimentOptions& opts) {
    if (!problem.exact)
        throw std::invalid_argument("problem '" + problem.label + "' has no exact solution");
    for (double t : opts.report_times) require_unit_interval(t, "report time");

    std::vector<TrialOutcome> out(n);
    parallel_for(n, opts.threads, [&](std::size_t idx) {
        const std::uint64_t trial = idx + 1;
        const BrownianPath path = sample_trial_path(cfg, base_seed, trial);
        TrialOutcome& o = out[idx];
        try {
            const SolveResult r = solve(problem, path, cfg, opts.solver);
            o.errors.reserve(opts.report_times.size());
            for (double t : opts.report_times) o.errors.push_back(error_at(r, problem, path, t));
            o.ok = true;
        } catch (const NonConvergence& e) {
            o.failure = "trial " + std::to_string(trial) + ": " + e.what();
        } catch (const NonFiniteIterate& e) {
            o.failure = "trial " + std::to_string(trial) + ": " + e.what();
        }
    });
    return out;
}

}  // namespace detail

/// Solve on n paths keyed by (base_seed, 1..n) and aggregate the error at
/// each report time. Trials whose solve fails are excluded and counted.
inline MonteCarloReport monte_carlo(const ProblemSpec& problem, const BasisConfig& cfg,
                                    std::size_t n, std::uint64_t base_seed,
                                    const ExperimentOptions& opts = {}) {
    if (n < 2) throw std::invalid_argument("monte_carlo: need at least 2 trials");
    const auto outcomes = detail::run_trials(problem, cfg, n, base_seed, opts);

    MonteCarloReport report;
    report.requested = n;
    for (const auto& o : outcomes)
        if (!o.ok) {
            ++report.failures;
            report.failure_messages.push_back(o.failure);
        }
    if (report.effective() < 2)
        throw std::runtime_error("monte_carlo: only " + std::to_string(report.effective()) + " of " +
                                 std::to_string(n) + " trials succeeded");

    std::vector<double> column;
    column.reserve(n);
    for (std::size_t k = 0; k < opts.report_times.size(); ++k) {
        column.clear();
        for (const auto& o : outcomes)
            if (o.ok) column.push_back(o.errors[k]);
        report.stats.push_back(summarize(opts.report_times[k], column));
    }
    return report;
}

/// Least-squares slope of y against x.
inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares_slope: need two equal-length series");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// RMS error over trials and report times at each resolution, and the
/// observed order of convergence in h.
inline ConvergenceReport convergence_study(const ProblemSpec& problem,
                                           std::span<const std::size_t> resolutions,
                                           std::size_t n, std::uint64_t base_seed,
                                           const ExperimentOptions& opts = {}) {
    if (resolutions.size() < 3)
        throw std::invalid_argument("convergence_study: need at least 3 resolutions");
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
        (void)BasisConfig::from_resolution(resolutions[i]);
        if (i > 0 && resolutions[i] <= resolutions[i - 1])
            throw std::invalid_argument("convergence_study: resolutions must increase");
    }
    if (n < 1) throw std::invalid_argument("convergence_study: need at least 1 trial");

    ConvergenceReport report;
    for (std::size_t m : resolutions) {
        const auto cfg = BasisConfig::from_resolution(m);
        const auto outcomes = detail::run_trials(problem, cfg, n, base_seed, opts);
        double ss = 0.0;
        std::size_t count = 0, failed = 0;
        for (const auto& o : outcomes) {
            if (!o.ok) {
                ++failed;
                continue;
            }
            for (double e : o.errors) {
                ss += e * e;
                ++count;
            }
        }
        if (count == 0)
            throw std::runtime_error("convergence_study: every trial failed at m = " +
                                     std::to_string(m));
        report.resolutions.push_back(m);
        report.rms_errors.push_back(std::sqrt(ss / static_cast<double>(count)));
        report.effective_trials.push_back(n - failed);
        report.failures.push_back(failed);
    }

    const double floor = 10.0 * opts.solver.tol;
    const bool resolvable = std::all_of(report.rms_errors.begin(), report.rms_errors.end(),
                                        [floor](double e) { return std::isfinite(e) && e > floor; });
    if (resolvable) {
        std::vector<double> log_h, log_e;
        for (std::size_t i = 0; i < report.resolutions.size(); ++i) {
            log_h.push_back(-std::log(static_cast<double>(report.resolutions[i])));
            log_e.push_back(std::log(report.rms_errors[i]));
        }
        report.estimated_order = least_squares_slope(log_h, log_e);
    }
    return report;
}

}  // namespace wsvie
