#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcie/points.hpp"
#include "mcie/problem.hpp"

namespace mcie {

/// Values aligned with the points of a MetricSpaceGrid.
struct FunctionOnGrid {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double sup_norm() const noexcept;
};

/// Values on tau_grid x grid, stored tau-major: values[a * points + j].
struct FunctionOnProductGrid {
    std::size_t tau_count = 0;
    std::size_t points = 0;
    std::vector<double> values;

    double at(std::size_t a, std::size_t j) const { return values[a * points + j]; }
    double& at(std::size_t a, std::size_t j) { return values[a * points + j]; }
    double sup_norm() const noexcept;
};

double sup_distance(const FunctionOnGrid& a, const FunctionOnGrid& b);
double sup_distance(const FunctionOnProductGrid& a, const FunctionOnProductGrid& b);

// ---------------------------------------------------------------------------
// Fredholm

/// f on the problem grid.
FunctionOnGrid forcing_on_grid(const FredholmProblem& problem);

/// x'(t_j) = f(t_j) + sum_l w_l K(t_j, t_l, x(t_l)).
FunctionOnGrid picard_step(const FredholmProblem& problem, const FunctionOnGrid& x);

/// x_0 = f, then m Picard steps. All iterates are kept.
std::vector<FunctionOnGrid> picard_solve(const FredholmProblem& problem, int m);

/**
 * Nystrom extension: evaluates f(t) + sum_l w_l K(t, t_l, x_prev(t_l)) at
 * arbitrary points, i.e. the iterate that follows `x_prev` off the grid.
 */
std::vector<double> nystrom_extend(const FredholmProblem& problem, const FunctionOnGrid& x_prev,
                                   PointSpan points);

/// delta0 * rho^m / (1 - rho).
double apriori_error_bound(double rho, double delta0, int m);

// ---------------------------------------------------------------------------
// Volterra

FunctionOnProductGrid forcing_on_grid(const VolterraProblem& problem);

/**
 * X'(tau_a, y_j) = f(tau_a, y_j)
 *     + tau_a * sum_b w'_b sum_l w_l K(tau_a, y_j, tau_a nu_b, t_l, X(tau_a nu_b, t_l)),
 * with Gauss-Legendre (nu_b, w'_b) on [0,1] and X off the tau grid
 * reconstructed by the problem's interpolation order.
 */
FunctionOnProductGrid volterra_step(const VolterraProblem& problem, const FunctionOnProductGrid& x);

/// X_0 = f, then m steps. All iterates are kept.
std::vector<FunctionOnProductGrid> volterra_solve(const VolterraProblem& problem, int m);

/// Iterate at an arbitrary (tau, y): the Volterra analogue of nystrom_extend.
double volterra_extend(const VolterraProblem& problem, const FunctionOnProductGrid& x_prev, double tau,
                       Point y);

/**
 * delta0 * sum_{n >= m} C^n / n!, computed as delta0 * C^m * E_{1,m+1}(C)
 * from the positive series of the Mittag-Leffler function.
 */
double volterra_tail_bound(double C, double delta0, int m);

/// E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta) by direct summation.
double mittag_leffler(double alpha, double beta, double z);

}  // namespace mcie
