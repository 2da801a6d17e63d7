#include "mcie/mc_fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcie/errors.hpp"
#include "mcie/parallel.hpp"
#include "mcie/summation.hpp"

namespace mcie {
namespace {

constexpr std::size_t kRowBlock = 32;
constexpr std::size_t kColumnBlock = 4096;

std::vector<double> forcing_at(const FredholmProblem& problem, PointSpan points) {
    std::vector<double> out(points.size());
    for (std::size_t r = 0; r < points.size(); ++r) {
        out[r] = problem.forcing(points[r]);
        if (!std::isfinite(out[r])) {
            throw EvaluationError("forcing term produced a non-finite value");
        }
    }
    return out;
}

/// f(points) + row means of K against (columns, z).
std::vector<double> iterate_at(const FredholmProblem& problem, PointSpan points, PointSpan columns,
                               std::span<const double> z) {
    std::vector<double> out = forcing_at(problem, points);
    std::vector<double> means(points.size());
    kernel_row_means(problem.kernel, points, columns, z, means);
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] += means[r];
    }
    return out;
}

}  // namespace

void kernel_row_means(const FredholmKernel& kernel, PointSpan rows, PointSpan columns, std::span<const double> z,
                      std::span<double> out) {
    detail::require(z.size() == columns.size(), "one z value per column is required");
    detail::require(!columns.empty(), "row means need at least one column");
    const std::size_t blocks = (rows.size() + kRowBlock - 1) / kRowBlock;
    parallel::for_chunks(blocks, [&](std::size_t b0, std::size_t b1) {
        std::vector<double> tile;
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t r0 = b * kRowBlock;
            const std::size_t nr = std::min(kRowBlock, rows.size() - r0);
            const PointSpan block_rows = rows.subspan(r0, nr);
            std::vector<CompensatedSum> acc(nr);
            std::vector<double> shift(nr);
            for (std::size_t c0 = 0; c0 < columns.size(); c0 += kColumnBlock) {
                const std::size_t nc = std::min(kColumnBlock, columns.size() - c0);
                tile.resize(nr * nc);
                kernel.tile(block_rows, columns.subspan(c0, nc), z.subspan(c0, nc), tile);
                for (std::size_t r = 0; r < nr; ++r) {
                    const double* row = tile.data() + r * nc;
                    if (c0 == 0) {
                        shift[r] = row[0];
                    }
                    const double sh = shift[r];
                    CompensatedSum local = acc[r];
                    for (std::size_t c = 0; c < nc; ++c) {
                        local.add(row[c] - sh);
                    }
                    acc[r] = local;
                }
            }
            for (std::size_t r = 0; r < nr; ++r) {
                // A non-finite summand leaves a non-finite sum.
                out[r0 + r] = shift[r] + acc[r].value() / static_cast<double>(columns.size());
                if (!std::isfinite(out[r0 + r])) {
                    throw EvaluationError("kernel produced a non-finite value");
                }
            }
        }
    });
}

FunctionOnGrid depending_trials_integral(const std::function<double(Point t, Point s)>& g,
                                         const MetricSpaceGrid& grid, const MeasureSpec& measure, std::int64_t N,
                                         const RandomStream& stream, std::uint64_t replication) {
    detail::require(N >= 1, "sample count must be at least 1");
    const PointSet draws = sample_measure(measure, static_cast<std::size_t>(N), stream, replication, 0);
    FunctionOnGrid out;
    out.values.resize(grid.size());
    parallel::for_chunks(grid.size(), [&](std::size_t j0, std::size_t j1) {
        std::vector<double> row(draws.size());
        for (std::size_t j = j0; j < j1; ++j) {
            for (std::size_t i = 0; i < draws.size(); ++i) {
                row[i] = g(grid.point(j), draws[i]);
                if (!std::isfinite(row[i])) {
                    throw EvaluationError("integrand produced a non-finite value");
                }
            }
            out.values[j] = shifted_mean(row);
        }
    });
    return out;
}

FredholmRun mc_solve_fredholm(const FredholmProblem& problem, const PartitionSchedule& schedule,
                              const RandomStream& stream, std::uint64_t replication) {
    const PartitionReport report = validate_partition(schedule);
    if (!report.ok()) {
        detail::fail_validation("schedule/budget mismatch: " + report.violations.front());
    }
    detail::require(problem.measure.dim() == problem.grid.dim(), "measure and grid dimensions differ");

    FredholmRun run;
    run.schedule = schedule;
    run.replication = replication;
    const int m = schedule.stages();
    for (int k = 1; k <= m; ++k) {
        run.stage_points.push_back(sample_measure(problem.measure, static_cast<std::size_t>(schedule.q(k)), stream,
                                                  replication, static_cast<std::uint64_t>(k),
                                                  static_cast<std::uint64_t>(schedule.stage_begin(k))));
    }

    run.inputs.push_back(forcing_at(problem, run.stage_points[0]));
    for (int k = 1; k <= m; ++k) {
        const auto K = static_cast<std::size_t>(k);
        StageIterate it;
        it.stage = k;
        it.first_sample = schedule.stage_begin(k);
        it.sample_count = schedule.q(k);
        const PointSpan columns = run.stage_points[K - 1];
        const std::span<const double> z = run.inputs[K - 1];
        if (k < m) {
            it.sample_values = iterate_at(problem, run.stage_points[K], columns, z);
            run.inputs.push_back(it.sample_values);
        }
        it.grid_values.values = iterate_at(problem, problem.grid.points(), columns, z);
        run.stages.push_back(std::move(it));
    }
    return run;
}

std::vector<double> evaluate_stage(const FredholmProblem& problem, const FredholmRun& run, int k, PointSpan points) {
    detail::require(k >= 0 && k <= run.m(), "stage index out of range");
    if (k == 0) {
        return forcing_at(problem, points);
    }
    const auto K = static_cast<std::size_t>(k);
    return iterate_at(problem, points, run.stage_points[K - 1], run.inputs[K - 1]);
}

}  // namespace mcie
