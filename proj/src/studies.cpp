#include "mcie/studies.hpp"

#include <algorithm>
#include <cmath>

#include "mcie/deterministic.hpp"
#include "mcie/errors.hpp"
#include "mcie/inference.hpp"
#include "mcie/mc_fredholm.hpp"
#include "mcie/mc_volterra.hpp"
#include "mcie/parallel.hpp"

namespace mcie {
namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_rate_inputs(int m, std::span<const std::int64_t> budgets, int replications) {
    detail::require(m >= 1, "m must be at least 1");
    detail::require(budgets.size() >= 4, "a rate study needs at least 4 budgets");
    detail::require(replications >= 20, "a rate study needs at least 20 replications");
    for (std::size_t i = 1; i < budgets.size(); ++i) {
        detail::require(budgets[i] > budgets[i - 1], "budgets must be strictly increasing");
    }
}

/// Shared driver: `error(N, schedule, replication)` returns one sup error.
template <typename ErrorFn>
RateStudyResult run_rate_study(int m, std::span<const std::int64_t> budgets, int replications,
                               const StudyOptions& options, double scale, ErrorFn error) {
    RateStudyResult out;
    const auto reps = static_cast<std::size_t>(replications);
    for (std::size_t n = 0; n < budgets.size(); ++n) {
        const PartitionSchedule schedule = make_schedule(options.schedule, budgets[n], m);
        RateRow row;
        row.N = budgets[n];
        row.errors.resize(reps);
        parallel::for_chunks(reps, [&](std::size_t r0, std::size_t r1) {
            for (std::size_t r = r0; r < r1; ++r) {
                row.errors[r] = error(schedule, options.first_replication + n * reps + r);
            }
        });
        row.median_error = median(row.errors);
        out.rows.push_back(std::move(row));
    }

    std::vector<double> xs;
    std::vector<double> ys;
    bool degenerate = false;
    for (const auto& row : out.rows) {
        xs.push_back(static_cast<double>(row.N));
        ys.push_back(row.median_error);
        degenerate = degenerate || row.median_error <= 1e-13 * std::max(1.0, scale);
    }
    if (degenerate) {
        out.note = "median errors are at round-off level; the slope is undefined";
    } else {
        out.slope = log_log_slope(xs, ys);
    }
    return out;
}

}  // namespace

std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size() && x.size() >= 2, "slope fit needs at least two points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            return std::nullopt;
        }
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) {
        return std::nullopt;
    }
    return sxy / sxx;
}

RateStudyResult rate_study(const FredholmProblem& problem, int m, std::span<const std::int64_t> budgets,
                           int replications, const RandomStream& stream, const StudyOptions& options) {
    check_rate_inputs(m, budgets, replications);
    const FunctionOnGrid target = picard_solve(problem, m).back();
    return run_rate_study(m, budgets, replications, options, target.sup_norm(),
                          [&](const PartitionSchedule& schedule, std::uint64_t rep) {
                              const FredholmRun run = mc_solve_fredholm(problem, schedule, stream, rep);
                              return sup_distance(run.final_stage().grid_values, target);
                          });
}

RateStudyResult rate_study(const VolterraProblem& problem, int m, std::span<const std::int64_t> budgets,
                           int replications, const RandomStream& stream, const StudyOptions& options) {
    check_rate_inputs(m, budgets, replications);
    const FunctionOnProductGrid target = volterra_solve(problem, m).back();
    return run_rate_study(m, budgets, replications, options, target.sup_norm(),
                          [&](const PartitionSchedule& schedule, std::uint64_t rep) {
                              const VolterraRun run = mc_solve_volterra(problem, schedule, stream, rep);
                              return sup_distance(run.final_stage().grid_table, target);
                          });
}

namespace {

void check_coverage_inputs(int m, std::int64_t N, double level, int replications) {
    detail::require(m >= 1, "m must be at least 1");
    detail::require(N >= m, "budget N must be at least m");
    detail::require(level > 0.0 && level < 1.0, "level must lie in (0, 1)");
    detail::require(replications >= 100, "a coverage study needs at least 100 replications");
}

struct ReplicationOutcome {
    bool covered = false;
    bool reference_covered = false;
    double halfwidth = 0.0;
    double sup_error = 0.0;
};

/// Shared driver: `replicate(schedule, replication)` returns one outcome.
template <typename ReplicateFn>
CoverageResult run_coverage_study(int m, std::int64_t N, int replications, bool has_reference, double widening,
                                  const StudyOptions& options, ReplicateFn replicate) {
    const PartitionSchedule schedule = make_schedule(options.schedule, N, m);
    const auto reps = static_cast<std::size_t>(replications);
    std::vector<ReplicationOutcome> outcomes(reps);
    parallel::for_chunks(reps, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            outcomes[r] = replicate(schedule, options.first_replication + r);
        }
    });

    CoverageResult out;
    out.replications = replications;
    out.widening = widening;
    int reference_hits = 0;
    double width_sum = 0.0;
    for (const auto& o : outcomes) {
        out.covered += o.covered ? 1 : 0;
        reference_hits += o.reference_covered ? 1 : 0;
        width_sum += o.halfwidth;
        out.halfwidths.push_back(o.halfwidth);
        out.sup_errors.push_back(o.sup_error);
    }
    out.coverage = static_cast<double>(out.covered) / replications;
    out.mean_halfwidth = width_sum / replications;
    if (has_reference) {
        out.reference_coverage = static_cast<double>(reference_hits) / replications;
    }
    return out;
}

}  // namespace

CoverageResult coverage_study(const FredholmProblem& problem, int m, std::int64_t N, double level, int replications,
                              const RandomStream& stream, const StudyOptions& options,
                              const FredholmReference& reference) {
    check_coverage_inputs(m, N, level, replications);
    const auto iterates = picard_solve(problem, m);
    const FunctionOnGrid& target = iterates.back();
    const double slack = kCoverageSlack * std::max(1.0, target.sup_norm());
    const double widening = apriori_error_bound(problem.rho, sup_distance(iterates[1], iterates[0]), m);
    std::vector<double> exact;
    if (reference) {
        for (std::size_t j = 0; j < problem.grid.size(); ++j) {
            exact.push_back(reference(problem.grid.point(j)));
        }
    }
    return run_coverage_study(
        m, N, replications, static_cast<bool>(reference), widening, options,
        [&](const PartitionSchedule& schedule, std::uint64_t rep) {
            const FredholmRun run = mc_solve_fredholm(problem, schedule, stream, rep);
            const CovarianceEstimate cov = estimate_covariance(problem, run);
            const ConfidenceBand band = confidence_band(run.final_stage().grid_values.values, cov, schedule.q(m),
                                                        level, stream, options.n_sim, rep);
            ReplicationOutcome o;
            o.covered = band.covers(target.values, slack);
            o.reference_covered = !exact.empty() && band.covers(exact, slack + widening);
            o.halfwidth = band.halfwidth;
            o.sup_error = sup_distance(run.final_stage().grid_values, target);
            return o;
        });
}

CoverageResult coverage_study(const VolterraProblem& problem, int m, std::int64_t N, double level, int replications,
                              const RandomStream& stream, const StudyOptions& options,
                              const VolterraReference& reference) {
    check_coverage_inputs(m, N, level, replications);
    const auto iterates = volterra_solve(problem, m);
    const FunctionOnProductGrid& target = iterates.back();
    const double slack = kCoverageSlack * std::max(1.0, target.sup_norm());
    const double widening = volterra_tail_bound(problem.lip, sup_distance(iterates[1], iterates[0]), m);
    std::vector<double> exact;
    if (reference) {
        for (double tau : problem.tau_grid) {
            for (std::size_t j = 0; j < problem.grid.size(); ++j) {
                exact.push_back(reference(tau, problem.grid.point(j)));
            }
        }
    }
    return run_coverage_study(
        m, N, replications, static_cast<bool>(reference), widening, options,
        [&](const PartitionSchedule& schedule, std::uint64_t rep) {
            const VolterraRun run = mc_solve_volterra(problem, schedule, stream, rep);
            const CovarianceEstimate cov = estimate_covariance(problem, run);
            const ConfidenceBand band = confidence_band(run.final_stage().grid_table.values, cov, schedule.q(m),
                                                        level, stream, options.n_sim, rep);
            ReplicationOutcome o;
            o.covered = band.covers(target.values, slack);
            o.reference_covered = !exact.empty() && band.covers(exact, slack + widening);
            o.halfwidth = band.halfwidth;
            o.sup_error = sup_distance(run.final_stage().grid_table, target);
            return o;
        });
}

}  // namespace mcie
