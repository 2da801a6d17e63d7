#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mcie/deterministic.hpp"
#include "mcie/partition.hpp"
#include "mcie/points.hpp"
#include "mcie/problem.hpp"
#include "mcie/random_stream.hpp"

namespace mcie {

/**
 * X_k^k tabulated on tau_grid x {distinct stage-(k+1) sample points}
 * (`table`, with `column_of[i]` mapping stage-(k+1) draw i to its column)
 * and on tau_grid x grid (`grid_table`).
 */
struct VolterraStageIterate {
    int stage = 0;
    FunctionOnProductGrid table;
    std::vector<std::size_t> column_of;
    FunctionOnProductGrid grid_table;
};

struct VolterraRun {
    PartitionSchedule schedule;
    std::uint64_t replication = 0;
    std::vector<PointSet> xi;                ///< per stage
    std::vector<std::vector<double>> eta;    ///< per stage
    std::vector<VolterraStageIterate> stages;

    int m() const noexcept { return schedule.stages(); }
    const VolterraStageIterate& final_stage() const { return stages.back(); }
};

/**
 * X_k^k(tau, y) = f(tau, y)
 *     + tau / q(k) * sum_{i in Q(k)} K(tau, y, tau eta_i, xi_i, X_{k-1}^{k-1}(tau eta_i, xi_i)),
 * with X_{k-1}^{k-1}(., xi_i) interpolated in tau from the previous table.
 * xi and eta use separate channels of the same lane.
 */
VolterraRun mc_solve_volterra(const VolterraProblem& problem, const PartitionSchedule& schedule,
                              const RandomStream& stream, std::uint64_t replication = 0);

/// Columns of X_k^k on tau_grid at arbitrary y points (tau-major, points.size() columns).
/// k = 0 returns f.
FunctionOnProductGrid evaluate_stage(const VolterraProblem& problem, const VolterraRun& run, int k,
                                     PointSpan points);

/**
 * Cauchy problem dX/dtau = rhs(tau, X), X(0) = x0 solved by the staged
 * recursion on a single-atom T. Returns the final stage; its grid_table has
 * two identical columns.
 */
struct CauchyDemoResult {
    VolterraProblem problem;
    VolterraRun run;
    const VolterraStageIterate& final_stage() const { return run.final_stage(); }
};

CauchyDemoResult volterra_cauchy_demo(const std::function<double(double, double)>& rhs, double x0,
                                      double lip, const PartitionSchedule& schedule,
                                      const RandomStream& stream, std::uint64_t replication = 0,
                                      std::size_t tau_points = 65);

/// Distinct points of `points` in first-appearance order; column_of[i] is the
/// position of points[i] among them.
PointSet distinct_points(const PointSet& points, std::vector<std::size_t>& column_of);

/// The degenerate problem solved by volterra_cauchy_demo.
VolterraProblem cauchy_problem(const std::function<double(double, double)>& rhs, double x0, double lip,
                               std::size_t tau_points = 65);

}  // namespace mcie
