#include "mcie/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcie/errors.hpp"
#include "mcie/interpolation.hpp"
#include "mcie/parallel.hpp"
#include "mcie/summation.hpp"

namespace mcie {

double FunctionOnGrid::sup_norm() const noexcept {
    double s = 0.0;
    for (double v : values) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

double FunctionOnProductGrid::sup_norm() const noexcept {
    double s = 0.0;
    for (double v : values) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

namespace {

double sup_difference(std::span<const double> a, std::span<const double> b) {
    detail::require(a.size() == b.size(), "functions live on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s = std::max(s, std::abs(a[i] - b[i]));
    }
    return s;
}

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw EvaluationError(std::string(what) + " produced a non-finite value");
        }
    }
}

constexpr std::size_t kRowBlock = 64;

/// out[r] = base[r] + sum_c weights[c] K(rows[r], columns[c], z[c]).
void weighted_kernel_sums(const FredholmKernel& kernel, PointSpan rows, PointSpan columns,
                          std::span<const double> z, std::span<const double> weights,
                          std::span<const double> base, std::span<double> out) {
    const std::size_t cols = columns.size();
    const std::size_t blocks = (rows.size() + kRowBlock - 1) / kRowBlock;
    parallel::for_chunks(blocks, [&](std::size_t b0, std::size_t b1) {
        std::vector<double> tile;
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t r0 = b * kRowBlock;
            const std::size_t nr = std::min(kRowBlock, rows.size() - r0);
            tile.resize(nr * cols);
            kernel.tile(rows.subspan(r0, nr), columns, z, tile);
            require_finite(tile, "kernel");
            for (std::size_t r = 0; r < nr; ++r) {
                CompensatedSum acc;
                for (std::size_t c = 0; c < cols; ++c) {
                    acc.add(weights[c] * tile[r * cols + c]);
                }
                out[r0 + r] = base[r0 + r] + acc.value();
            }
        }
    });
}

}  // namespace

double sup_distance(const FunctionOnGrid& a, const FunctionOnGrid& b) { return sup_difference(a.values, b.values); }

double sup_distance(const FunctionOnProductGrid& a, const FunctionOnProductGrid& b) {
    detail::require(a.tau_count == b.tau_count && a.points == b.points, "functions live on different grids");
    return sup_difference(a.values, b.values);
}

FunctionOnGrid forcing_on_grid(const FredholmProblem& problem) {
    FunctionOnGrid f;
    f.values.resize(problem.grid.size());
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        f.values[j] = problem.forcing(problem.grid.point(j));
    }
    require_finite(f.values, "forcing term");
    return f;
}

FunctionOnGrid picard_step(const FredholmProblem& problem, const FunctionOnGrid& x) {
    detail::require(x.size() == problem.grid.size(), "iterate does not match the problem grid");
    const FunctionOnGrid f = forcing_on_grid(problem);
    FunctionOnGrid next;
    next.values.resize(x.size());
    const PointSpan points = problem.grid.points();
    weighted_kernel_sums(problem.kernel, points, points, x.values, problem.grid.weights(), f.values, next.values);
    return next;
}

std::vector<FunctionOnGrid> picard_solve(const FredholmProblem& problem, int m) {
    detail::require(m >= 1, "the number of Picard steps must be at least 1");
    std::vector<FunctionOnGrid> iterates;
    iterates.reserve(static_cast<std::size_t>(m) + 1);
    iterates.push_back(forcing_on_grid(problem));
    for (int n = 1; n <= m; ++n) {
        iterates.push_back(picard_step(problem, iterates.back()));
    }
    return iterates;
}

std::vector<double> nystrom_extend(const FredholmProblem& problem, const FunctionOnGrid& x_prev, PointSpan points) {
    detail::require(x_prev.size() == problem.grid.size(), "iterate does not match the problem grid");
    std::vector<double> base(points.size());
    for (std::size_t r = 0; r < points.size(); ++r) {
        base[r] = problem.forcing(points[r]);
    }
    require_finite(base, "forcing term");
    std::vector<double> out(points.size());
    weighted_kernel_sums(problem.kernel, points, problem.grid.points(), x_prev.values, problem.grid.weights(), base,
                         out);
    return out;
}

double apriori_error_bound(double rho, double delta0, int m) {
    detail::require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
    detail::require(delta0 >= 0.0, "delta0 must be non-negative");
    detail::require(m >= 0, "m must be non-negative");
    return delta0 * std::pow(rho, m) / (1.0 - rho);
}

// ---------------------------------------------------------------------------
// Volterra

FunctionOnProductGrid forcing_on_grid(const VolterraProblem& problem) {
    FunctionOnProductGrid f;
    f.tau_count = problem.tau_grid.size();
    f.points = problem.grid.size();
    f.values.resize(f.tau_count * f.points);
    for (std::size_t a = 0; a < f.tau_count; ++a) {
        for (std::size_t j = 0; j < f.points; ++j) {
            f.at(a, j) = problem.forcing(problem.tau_grid[a], problem.grid.point(j));
        }
    }
    require_finite(f.values, "forcing term");
    return f;
}

namespace {

struct NuRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

NuRule nu_rule(const VolterraProblem& problem) {
    NuRule rule;
    gauss_legendre_unit(problem.nu_nodes, rule.nodes, rule.weights);
    return rule;
}

/// tau * sum_b w'_b sum_l w_l K(tau, y, tau nu_b, t_l, X(tau nu_b, t_l)) for every y in `ys`.
void volterra_integral(const VolterraProblem& problem, const TauInterpolator& interp, const NuRule& rule,
                       const FunctionOnProductGrid& x, double tau, PointSpan ys, std::span<double> out) {
    const std::size_t P = problem.grid.size();
    const auto& w = problem.grid.weights();
    std::vector<CompensatedSum> acc(ys.size());
    std::vector<double> z(P);
    for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
        const double nu = tau * rule.nodes[b];
        const auto st = interp.stencil(nu);
        for (std::size_t l = 0; l < P; ++l) {
            z[l] = TauInterpolator::apply(st, x.values.data() + l, P);
        }
        for (std::size_t r = 0; r < ys.size(); ++r) {
            double inner = 0.0;
            for (std::size_t l = 0; l < P; ++l) {
                const double k = problem.kernel(tau, ys[r], nu, problem.grid.point(l), z[l]);
                if (!std::isfinite(k)) {
                    throw EvaluationError("kernel produced a non-finite value");
                }
                inner += w[l] * k;
            }
            acc[r].add(rule.weights[b] * inner);
        }
    }
    for (std::size_t r = 0; r < ys.size(); ++r) {
        out[r] = tau * acc[r].value();
    }
}

}  // namespace

FunctionOnProductGrid volterra_step(const VolterraProblem& problem, const FunctionOnProductGrid& x) {
    detail::require(x.tau_count == problem.tau_grid.size() && x.points == problem.grid.size(),
                    "iterate does not match the problem grids");
    const TauInterpolator interp(problem.tau_grid, problem.tau_interpolation_order);
    const NuRule rule = nu_rule(problem);
    FunctionOnProductGrid next = forcing_on_grid(problem);
    const PointSpan ys = problem.grid.points();
    parallel::for_chunks(x.tau_count, [&](std::size_t a0, std::size_t a1) {
        std::vector<double> integral(x.points);
        for (std::size_t a = a0; a < a1; ++a) {
            volterra_integral(problem, interp, rule, x, problem.tau_grid[a], ys, integral);
            for (std::size_t j = 0; j < x.points; ++j) {
                next.at(a, j) += integral[j];
            }
        }
    });
    return next;
}

std::vector<FunctionOnProductGrid> volterra_solve(const VolterraProblem& problem, int m) {
    detail::require(m >= 1, "the number of Picard steps must be at least 1");
    std::vector<FunctionOnProductGrid> iterates;
    iterates.reserve(static_cast<std::size_t>(m) + 1);
    iterates.push_back(forcing_on_grid(problem));
    for (int n = 1; n <= m; ++n) {
        iterates.push_back(volterra_step(problem, iterates.back()));
    }
    return iterates;
}

double volterra_extend(const VolterraProblem& problem, const FunctionOnProductGrid& x_prev, double tau, Point y) {
    detail::require(x_prev.tau_count == problem.tau_grid.size() && x_prev.points == problem.grid.size(),
                    "iterate does not match the problem grids");
    detail::require(tau >= 0.0 && tau <= 1.0, "tau must lie in [0, 1]");
    const TauInterpolator interp(problem.tau_grid, problem.tau_interpolation_order);
    const NuRule rule = nu_rule(problem);
    double integral = 0.0;
    volterra_integral(problem, interp, rule, x_prev, tau, PointSpan(y.data(), y.size(), 1), {&integral, 1});
    const double base = problem.forcing(tau, y);
    if (!std::isfinite(base)) {
        throw EvaluationError("forcing term produced a non-finite value");
    }
    return base + integral;
}

double mittag_leffler(double alpha, double beta, double z) {
    detail::require(alpha > 0.0 && beta > 0.0, "Mittag-Leffler parameters must be positive");
    CompensatedSum sum;
    for (int k = 0; k < 100000; ++k) {
        const double arg = alpha * k + beta;
        double term = 0.0;
        if (z != 0.0 || k == 0) {
            const double log_mag = (k == 0 ? 0.0 : k * std::log(std::abs(z))) - std::lgamma(arg);
            term = std::exp(log_mag);
            if (z < 0.0 && k % 2 == 1) {
                term = -term;
            }
        }
        sum.add(term);
        // Terms decrease monotonically once the gamma argument passes |z|^(1/alpha).
        if (arg > std::abs(z) + 2.0 && std::abs(term) <= 1e-17 * std::abs(sum.value())) {
            break;
        }
        if (z == 0.0) {
            break;
        }
    }
    return sum.value();
}

double volterra_tail_bound(double C, double delta0, int m) {
    detail::require(C >= 0.0 && std::isfinite(C), "C must be finite and non-negative");
    detail::require(delta0 >= 0.0, "delta0 must be non-negative");
    detail::require(m >= 0, "m must be non-negative");
    if (C == 0.0) {
        return m == 0 ? delta0 : 0.0;
    }
    // C^m E_{1,m+1}(C) = sum_{n >= m} C^n / n!, all terms positive.
    return delta0 * std::pow(C, m) * mittag_leffler(1.0, m + 1.0, C);
}

}  // namespace mcie
