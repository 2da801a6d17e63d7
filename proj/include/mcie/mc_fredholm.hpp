#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mcie/deterministic.hpp"
#include "mcie/grid.hpp"
#include "mcie/partition.hpp"
#include "mcie/points.hpp"
#include "mcie/problem.hpp"
#include "mcie/random_stream.hpp"

namespace mcie {

/// I_N(t) = N^-1 sum_i g(t, xi_i) with the same draws for every grid point.
FunctionOnGrid depending_trials_integral(const std::function<double(Point t, Point s)>& g,
                                         const MetricSpaceGrid& grid, const MeasureSpec& measure,
                                         std::int64_t N, const RandomStream& stream,
                                         std::uint64_t replication = 0);

/**
 * Random iterate x_k^k of stage k.
 *
 * `sample_values` holds x_k^k at the stage-(k+1) sample points (empty for
 * k = m); `grid_values` holds x_k^k on the evaluation grid.
 * Stage k consumed global sample indices [first_sample, first_sample + q(k)).
 */
struct StageIterate {
    int stage = 0;
    std::vector<double> sample_values;
    FunctionOnGrid grid_values;
    std::int64_t first_sample = 0;
    std::int64_t sample_count = 0;
};

/**
 * One replication of the staged recursion. `inputs[k-1]` holds
 * x_{k-1}^{k-1}(xi_i) for the stage-k draws, so x_k^k can be re-evaluated
 * anywhere from (stage_points[k-1], inputs[k-1]).
 */
struct FredholmRun {
    PartitionSchedule schedule;
    std::uint64_t replication = 0;
    std::vector<PointSet> stage_points;
    std::vector<std::vector<double>> inputs;
    std::vector<StageIterate> stages;

    int m() const noexcept { return schedule.stages(); }
    const StageIterate& final_stage() const { return stages.back(); }
};

/// x_k^k(t) = f(t) + q(k)^-1 sum_{i in Q(k)} K(t, xi_i, x_{k-1}^{k-1}(xi_i)).
FredholmRun mc_solve_fredholm(const FredholmProblem& problem, const PartitionSchedule& schedule,
                              const RandomStream& stream, std::uint64_t replication = 0);

/// x_k^k at arbitrary points; k = 0 returns f.
std::vector<double> evaluate_stage(const FredholmProblem& problem, const FredholmRun& run, int k,
                                   PointSpan points);

/// Mean over columns of K(t_r, s_c, z_c) for every row, in fixed column order.
/// Shared by the deterministic and Monte-Carlo paths.
void kernel_row_means(const FredholmKernel& kernel, PointSpan rows, PointSpan columns,
                      std::span<const double> z, std::span<double> out);

}  // namespace mcie
