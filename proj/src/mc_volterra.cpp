#include "mcie/mc_volterra.hpp"

#include <cmath>
#include <map>
#include <string>

#include "mcie/errors.hpp"
#include "mcie/interpolation.hpp"
#include "mcie/parallel.hpp"
#include "mcie/summation.hpp"

namespace mcie {
namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw EvaluationError(std::string(what) + " produced a non-finite value");
    }
}

/**
 * X_k^k on tau_grid x ys from the stage-k draws. `previous` is the stage-(k-1)
 * iterate whose table columns are indexed by column_of; null means X_0 = f.
 */
FunctionOnProductGrid stage_values(const VolterraProblem& problem, const TauInterpolator& interp,
                                   const PointSet& xi, std::span<const double> eta,
                                   const VolterraStageIterate* previous, PointSpan ys) {
    const std::size_t A = problem.tau_grid.size();
    const std::size_t q = xi.size();

    // Z[a * q + i] = X_{k-1}^{k-1}(tau_a eta_i, xi_i).
    std::vector<double> Z(A * q);
    parallel::for_chunks(A, [&](std::size_t a0, std::size_t a1) {
        for (std::size_t a = a0; a < a1; ++a) {
            const double tau = problem.tau_grid[a];
            for (std::size_t i = 0; i < q; ++i) {
                const double nu = tau * eta[i];
                double z = 0.0;
                if (previous == nullptr) {
                    z = problem.forcing(nu, xi[i]);
                } else {
                    const auto& table = previous->table;
                    const auto st = interp.stencil(nu);
                    z = TauInterpolator::apply(st, table.values.data() + previous->column_of[i], table.points);
                }
                check_finite(z, "previous stage");
                Z[a * q + i] = z;
            }
        }
    });

    FunctionOnProductGrid out;
    out.tau_count = A;
    out.points = ys.size();
    out.values.resize(A * ys.size());
    parallel::for_chunks(A, [&](std::size_t a0, std::size_t a1) {
        std::vector<double> summand(q);
        for (std::size_t a = a0; a < a1; ++a) {
            const double tau = problem.tau_grid[a];
            for (std::size_t r = 0; r < ys.size(); ++r) {
                for (std::size_t i = 0; i < q; ++i) {
                    summand[i] = problem.kernel(tau, ys[r], tau * eta[i], xi[i], Z[a * q + i]);
                    check_finite(summand[i], "kernel");
                }
                const double f = problem.forcing(tau, ys[r]);
                check_finite(f, "forcing term");
                out.at(a, r) = f + tau * shifted_mean(summand);
            }
        }
    });
    return out;
}

FunctionOnProductGrid forcing_columns(const VolterraProblem& problem, PointSpan ys) {
    FunctionOnProductGrid out;
    out.tau_count = problem.tau_grid.size();
    out.points = ys.size();
    out.values.resize(out.tau_count * out.points);
    for (std::size_t a = 0; a < out.tau_count; ++a) {
        for (std::size_t r = 0; r < ys.size(); ++r) {
            out.at(a, r) = problem.forcing(problem.tau_grid[a], ys[r]);
            check_finite(out.at(a, r), "forcing term");
        }
    }
    return out;
}

/// Copy of `count` columns starting at `first`.
FunctionOnProductGrid columns_of(const FunctionOnProductGrid& all, std::size_t first, std::size_t count) {
    FunctionOnProductGrid out;
    out.tau_count = all.tau_count;
    out.points = count;
    out.values.resize(all.tau_count * count);
    for (std::size_t a = 0; a < all.tau_count; ++a) {
        for (std::size_t c = 0; c < count; ++c) {
            out.at(a, c) = all.at(a, first + c);
        }
    }
    return out;
}

}  // namespace

PointSet distinct_points(const PointSet& points, std::vector<std::size_t>& column_of) {
    PointSet distinct(points.dim());
    std::map<std::vector<double>, std::size_t> seen;
    column_of.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point p = points[i];
        auto [it, inserted] = seen.try_emplace(std::vector<double>(p.begin(), p.end()), distinct.size());
        if (inserted) {
            distinct.push_back(p);
        }
        column_of[i] = it->second;
    }
    return distinct;
}

VolterraRun mc_solve_volterra(const VolterraProblem& problem, const PartitionSchedule& schedule,
                              const RandomStream& stream, std::uint64_t replication) {
    const PartitionReport report = validate_partition(schedule);
    if (!report.ok()) {
        detail::fail_validation("schedule/budget mismatch: " + report.violations.front());
    }
    detail::require(problem.measure.dim() == problem.grid.dim(), "measure and grid dimensions differ");
    const TauInterpolator interp(problem.tau_grid, problem.tau_interpolation_order);

    VolterraRun run;
    run.schedule = schedule;
    run.replication = replication;
    const int m = schedule.stages();
    for (int k = 1; k <= m; ++k) {
        const auto q = static_cast<std::size_t>(schedule.q(k));
        const auto first = static_cast<std::uint64_t>(schedule.stage_begin(k));
        run.xi.push_back(sample_measure(problem.measure, q, stream, replication, static_cast<std::uint64_t>(k), first));
        std::vector<double> eta(q);
        for (std::size_t i = 0; i < q; ++i) {
            eta[i] = stream.uniform(Lane{replication, static_cast<std::uint64_t>(k), first + i}, kEtaChannel);
        }
        run.eta.push_back(std::move(eta));
    }

    const PointSpan grid_points = problem.grid.points();
    for (int k = 1; k <= m; ++k) {
        const auto K = static_cast<std::size_t>(k);
        VolterraStageIterate it;
        it.stage = k;
        PointSet outputs(problem.grid.dim());
        std::size_t next_columns = 0;
        if (k < m) {
            outputs = distinct_points(run.xi[K], it.column_of);
            next_columns = outputs.size();
        }
        for (std::size_t j = 0; j < grid_points.size(); ++j) {
            outputs.push_back(grid_points[j]);
        }
        const VolterraStageIterate* previous = k == 1 ? nullptr : &run.stages.back();
        const FunctionOnProductGrid all = stage_values(problem, interp, run.xi[K - 1], run.eta[K - 1], previous, outputs);
        it.table = columns_of(all, 0, next_columns);
        it.grid_table = columns_of(all, next_columns, grid_points.size());
        run.stages.push_back(std::move(it));
    }
    return run;
}

FunctionOnProductGrid evaluate_stage(const VolterraProblem& problem, const VolterraRun& run, int k, PointSpan points) {
    detail::require(k >= 0 && k <= run.m(), "stage index out of range");
    if (k == 0) {
        return forcing_columns(problem, points);
    }
    const auto K = static_cast<std::size_t>(k);
    const TauInterpolator interp(problem.tau_grid, problem.tau_interpolation_order);
    const VolterraStageIterate* previous = k == 1 ? nullptr : &run.stages[K - 2];
    return stage_values(problem, interp, run.xi[K - 1], run.eta[K - 1], previous, points);
}

VolterraProblem cauchy_problem(const std::function<double(double, double)>& rhs, double x0, double lip,
                               std::size_t tau_points) {
    detail::require(static_cast<bool>(rhs), "right-hand side is empty");
    const double origin = 0.0;
    VolterraProblem p{
        .forcing = [x0](double, Point) { return x0; },
        .kernel = [rhs](double, Point, double nu, Point, double z) { return rhs(nu, z); },
        .lip = lip,
        .measure = MeasureSpec::point_mass(Point(&origin, 1)),
        .grid = MetricSpaceGrid(PointSet(1, {0.0, 1.0}), {1.0, 0.0}, make_distance(DistanceKind::euclidean)),
        .tau_grid = equispaced_tau_grid(tau_points),
    };
    validate(p);
    return p;
}

CauchyDemoResult volterra_cauchy_demo(const std::function<double(double, double)>& rhs, double x0, double lip,
                                      const PartitionSchedule& schedule, const RandomStream& stream,
                                      std::uint64_t replication, std::size_t tau_points) {
    CauchyDemoResult result{cauchy_problem(rhs, x0, lip, tau_points), {}};
    result.run = mc_solve_volterra(result.problem, schedule, stream, replication);
    return result;
}

}  // namespace mcie
