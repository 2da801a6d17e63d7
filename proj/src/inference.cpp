#include "mcie/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "mcie/errors.hpp"
#include "mcie/interpolation.hpp"
#include "mcie/parallel.hpp"
#include "mcie/summation.hpp"

namespace mcie {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double CovarianceEstimate::max_diagonal() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        m = std::max(m, matrix[i * size + i]);
    }
    return m;
}

double CovarianceEstimate::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        t += matrix[i * size + i];
    }
    return t;
}

namespace {

/// Weighted covariance of the rows of `rows` (weights sum to one), on data
/// shifted by the first row with positive weight.
CovarianceEstimate weighted_covariance(RowMatrix rows, const Eigen::VectorXd& weights, CovarianceSource source) {
    const Eigen::Index n = rows.rows();
    Eigen::Index pivot = 0;
    while (pivot + 1 < n && weights[pivot] <= 0.0) {
        ++pivot;
    }
    const Eigen::RowVectorXd shift = rows.row(pivot);
    rows.rowwise() -= shift;
    const Eigen::RowVectorXd mean = weights.transpose() * rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        rows.row(i) *= std::sqrt(weights[i]);
    }
    // Only the lower triangle is accumulated; the Gram product dominates for long tau grids.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
    cov.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
    cov.selfadjointView<Eigen::Lower>().rankUpdate(mean.transpose(), -1.0);
    cov = cov.selfadjointView<Eigen::Lower>();

    CovarianceEstimate out;
    out.size = static_cast<std::size_t>(cov.rows());
    out.source = source;
    out.matrix.resize(out.size * out.size);
    for (std::size_t i = 0; i < out.size; ++i) {
        for (std::size_t j = 0; j < out.size; ++j) {
            out.matrix[i * out.size + j] = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    repair_psd(out);
    return out;
}

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw EvaluationError(std::string(what) + " produced a non-finite value");
        }
    }
}

/// rows(i, r) = K(grid_r, draw_i, z_i).
RowMatrix kernel_samples(const FredholmProblem& problem, PointSpan draws, std::span<const double> z) {
    const PointSpan grid = problem.grid.points();
    const std::size_t P = grid.size();
    RowMatrix rows(static_cast<Eigen::Index>(draws.size()), static_cast<Eigen::Index>(P));
    constexpr std::size_t kBlock = 2048;
    const std::size_t blocks = (draws.size() + kBlock - 1) / kBlock;
    parallel::for_chunks(blocks, [&](std::size_t b0, std::size_t b1) {
        std::vector<double> tile;
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t c0 = b * kBlock;
            const std::size_t nc = std::min(kBlock, draws.size() - c0);
            tile.resize(P * nc);
            problem.kernel.tile(grid, draws.subspan(c0, nc), z.subspan(c0, nc), tile);
            check_finite(tile, "kernel");
            for (std::size_t r = 0; r < P; ++r) {
                for (std::size_t c = 0; c < nc; ++c) {
                    rows(static_cast<Eigen::Index>(c0 + c), static_cast<Eigen::Index>(r)) = tile[r * nc + c];
                }
            }
        }
    });
    return rows;
}

/// X_prev(tau nu, point) by interpolation of column `col` of a tau-major table.
double interpolate_column(const TauInterpolator& interp, const FunctionOnProductGrid& table, std::size_t col,
                          double tau) {
    return TauInterpolator::apply(interp.stencil(tau), table.values.data() + col, table.points);
}

}  // namespace

CovarianceEstimate empirical_covariance(std::span<const double> samples, std::size_t count, std::size_t points) {
    detail::require(count >= 2, "covariance estimation needs at least 2 samples");
    detail::require(points >= 1 && samples.size() == count * points, "sample matrix has the wrong size");
    RowMatrix rows = Eigen::Map<const RowMatrix>(samples.data(), static_cast<Eigen::Index>(count),
                                                 static_cast<Eigen::Index>(points));
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count), 1.0 / count);
    return weighted_covariance(std::move(rows), weights, CovarianceSource::empirical);
}

CovarianceEstimate estimate_covariance(const FredholmProblem& problem, PointSpan draws,
                                       std::span<const double> previous_values) {
    detail::require(draws.size() >= 2, "covariance estimation needs N >= 2");
    detail::require(previous_values.size() == draws.size(), "one previous value per draw is required");
    RowMatrix rows = kernel_samples(problem, draws, previous_values);
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(rows.rows(), 1.0 / static_cast<double>(rows.rows()));
    return weighted_covariance(std::move(rows), weights, CovarianceSource::empirical);
}

CovarianceEstimate estimate_covariance(const FredholmProblem& problem, const FredholmRun& run) {
    const int m = run.m();
    PointSet draws(problem.grid.dim());
    std::vector<double> z;
    for (int k = 1; k <= m; ++k) {
        const PointSet& pts = run.stage_points[static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 0; i < pts.size(); ++i) {
            draws.push_back(pts[i]);
        }
        // The stage-m inputs already hold x_{m-1}^{m-1} at the stage-m draws.
        const std::vector<double> values =
            k == m ? run.inputs[static_cast<std::size_t>(m - 1)] : evaluate_stage(problem, run, m - 1, pts);
        z.insert(z.end(), values.begin(), values.end());
    }
    return estimate_covariance(problem, draws, z);
}

CovarianceEstimate estimate_covariance(const VolterraProblem& problem, const VolterraRun& run) {
    const int m = run.m();
    const std::size_t A = problem.tau_grid.size();
    const PointSpan ys = problem.grid.points();
    const std::size_t P = ys.size();

    PointSet xi(problem.grid.dim());
    std::vector<double> eta;
    for (int k = 1; k <= m; ++k) {
        const PointSet& pts = run.xi[static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 0; i < pts.size(); ++i) {
            xi.push_back(pts[i]);
        }
        const auto& e = run.eta[static_cast<std::size_t>(k - 1)];
        eta.insert(eta.end(), e.begin(), e.end());
    }
    const std::size_t N = xi.size();
    detail::require(N >= 2, "covariance estimation needs N >= 2");

    std::vector<std::size_t> column_of;
    const PointSet distinct = distinct_points(xi, column_of);
    FunctionOnProductGrid previous;
    if (m > 1) {
        previous = evaluate_stage(problem, run, m - 1, distinct);
    }
    const TauInterpolator interp(problem.tau_grid, problem.tau_interpolation_order);

    RowMatrix rows(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(A * P));
    parallel::for_chunks(N, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            for (std::size_t a = 0; a < A; ++a) {
                const double tau = problem.tau_grid[a];
                const double nu = tau * eta[i];
                const double z = m > 1 ? interpolate_column(interp, previous, column_of[i], nu)
                                       : problem.forcing(nu, xi[i]);
                for (std::size_t j = 0; j < P; ++j) {
                    const double v = tau * problem.kernel(tau, ys[j], nu, xi[i], z);
                    if (!std::isfinite(v)) {
                        throw EvaluationError("kernel produced a non-finite value");
                    }
                    rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a * P + j)) = v;
                }
            }
        }
    });
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), 1.0 / N);
    return weighted_covariance(std::move(rows), weights, CovarianceSource::empirical);
}

CovarianceEstimate limit_covariance(const FredholmProblem& problem, const FunctionOnGrid& x_prev) {
    detail::require(x_prev.size() == problem.grid.size(), "iterate does not match the problem grid");
    RowMatrix rows = kernel_samples(problem, problem.grid.points(), x_prev.values);
    const auto& w = problem.grid.weights();
    const Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    return weighted_covariance(std::move(rows), weights, CovarianceSource::limit);
}

CovarianceEstimate limit_covariance(const VolterraProblem& problem, const FunctionOnProductGrid& x_prev) {
    detail::require(x_prev.tau_count == problem.tau_grid.size() && x_prev.points == problem.grid.size(),
                    "iterate does not match the problem grids");
    std::vector<double> nu_nodes;
    std::vector<double> nu_weights;
    gauss_legendre_unit(problem.nu_nodes, nu_nodes, nu_weights);
    const TauInterpolator interp(problem.tau_grid, problem.tau_interpolation_order);
    const std::size_t A = problem.tau_grid.size();
    const std::size_t B = nu_nodes.size();
    const PointSpan ys = problem.grid.points();
    const std::size_t P = ys.size();
    const auto& w = problem.grid.weights();

    // One row per quadrature node (nu_b, v_l) of the law of (eta, xi).
    RowMatrix rows(static_cast<Eigen::Index>(B * P), static_cast<Eigen::Index>(A * P));
    Eigen::VectorXd weights(static_cast<Eigen::Index>(B * P));
    parallel::for_chunks(B, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            for (std::size_t l = 0; l < P; ++l) {
                const auto row = static_cast<Eigen::Index>(b * P + l);
                weights[row] = nu_weights[b] * w[l];
                for (std::size_t a = 0; a < A; ++a) {
                    const double tau = problem.tau_grid[a];
                    const double nu = tau * nu_nodes[b];
                    const double z = interpolate_column(interp, x_prev, l, nu);
                    for (std::size_t j = 0; j < P; ++j) {
                        const double v = tau * problem.kernel(tau, ys[j], nu, ys[l], z);
                        if (!std::isfinite(v)) {
                            throw EvaluationError("kernel produced a non-finite value");
                        }
                        rows(row, static_cast<Eigen::Index>(a * P + j)) = v;
                    }
                }
            }
        }
    });
    return weighted_covariance(std::move(rows), weights, CovarianceSource::limit);
}

void repair_psd(CovarianceEstimate& cov) {
    const std::size_t n = cov.size;
    detail::require(n >= 1 && cov.matrix.size() == n * n, "covariance matrix has the wrong size");
    check_finite(cov.matrix, "covariance estimation");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = cov.matrix[i * n + j];
            const double b = cov.matrix[j * n + i];
            asym = std::max(asym, std::abs(a - b));
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.5 * (a + b);
        }
    }
    cov.max_asymmetry = asym;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    if (eig.info() != Eigen::Success) {
        throw EvaluationError("eigendecomposition of the covariance failed");
    }
    const Eigen::VectorXd lambda = eig.eigenvalues();
    cov.min_eigenvalue = lambda.minCoeff();
    const double tol = 1e-10 * std::max(0.0, M.trace());
    if (cov.min_eigenvalue < -tol || (tol == 0.0 && cov.min_eigenvalue < 0.0)) {
        const Eigen::VectorXd clipped = lambda.cwiseMax(0.0);
        M = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
        M = 0.5 * (M + M.transpose()).eval();
        cov.repaired = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cov.matrix[i * n + j] = M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
}

std::vector<double> gaussian_sup_samples(const CovarianceEstimate& cov, std::size_t n_sim, const RandomStream& stream,
                                         std::uint64_t replication) {
    const std::size_t n = cov.size;
    detail::require(n >= 1 && cov.matrix.size() == n * n, "covariance matrix has the wrong size");
    detail::require(n_sim >= 1000, "Gaussian simulation needs at least 1000 draws");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                0.5 * (cov.matrix[i * n + j] + cov.matrix[j * n + i]);
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    if (eig.info() != Eigen::Success) {
        throw EvaluationError("eigendecomposition of the covariance failed");
    }
    // Square-root factor with negative eigenvalues clamped to zero. Every column is kept so that
    // draw c always feeds eigenvector c, whatever the sign of round-off eigenvalues.
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd factor = eig.eigenvectors() * root.asDiagonal();
    const bool degenerate = root.maxCoeff() == 0.0;

    std::vector<double> sups(n_sim, 0.0);
    if (!degenerate) {
        parallel::for_chunks(n_sim, [&](std::size_t s0, std::size_t s1) {
            Eigen::VectorXd z(factor.cols());
            for (std::size_t s = s0; s < s1; ++s) {
                LaneEngine engine(stream, Lane{replication, kGaussianStage, s});
                std::normal_distribution<double> normal;
                for (Eigen::Index c = 0; c < z.size(); ++c) {
                    z[c] = normal(engine);
                }
                sups[s] = (factor * z).cwiseAbs().maxCoeff();
            }
        });
    }
    std::sort(sups.begin(), sups.end());
    return sups;
}

double empirical_quantile(std::span<const double> sorted, double level) {
    detail::require(!sorted.empty(), "quantile of an empty sample");
    detail::require(level >= 0.0 && level <= 1.0, "quantile level must lie in [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * level;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double gaussian_sup_quantile(const CovarianceEstimate& cov, double level, std::size_t n_sim,
                             const RandomStream& stream, std::uint64_t replication) {
    detail::require(level > 0.0 && level < 1.0, "level must lie in (0, 1)");
    const std::vector<double> sups = gaussian_sup_samples(cov, n_sim, stream, replication);
    return empirical_quantile(sups, level);
}

bool ConfidenceBand::covers(std::span<const double> values, double slack) const {
    detail::require(values.size() == center.size(), "band and target have different sizes");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(std::abs(values[i] - center[i]) <= halfwidth + slack)) {
            return false;
        }
    }
    return true;
}

ConfidenceBand confidence_band(std::span<const double> center, const CovarianceEstimate& cov, std::int64_t q_m,
                               double level, const RandomStream& stream, std::size_t n_sim,
                               std::uint64_t replication) {
    detail::require(q_m >= 1, "q_m must be at least 1");
    detail::require(center.size() == cov.size, "band center and covariance sizes differ");
    ConfidenceBand band;
    band.center.assign(center.begin(), center.end());
    band.level = level;
    band.q_m = q_m;
    band.quantile = gaussian_sup_quantile(cov, level, n_sim, stream, replication);
    band.halfwidth = band.quantile / std::sqrt(static_cast<double>(q_m));
    return band;
}

double tail_log_asymptote(double u, const CovarianceEstimate& cov) {
    detail::require(u > 0.0, "u must be positive");
    const double max_var = cov.max_diagonal();
    detail::require(max_var > 0.0, "the tail asymptote is undefined for a zero-variance covariance");
    return -u * u / (2.0 * max_var);
}

namespace {

/// Row-major d_p matrix from kernel samples a(r, l) = K(t_r, t_l, x(t_l)).
std::vector<double> semi_distances(const RowMatrix& a, const std::vector<double>& weights, double p) {
    const auto n = static_cast<std::size_t>(a.rows());
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            CompensatedSum acc;
            for (std::size_t l = 0; l < weights.size(); ++l) {
                const double diff = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) -
                                    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
                acc.add(weights[l] * std::pow(std::abs(diff), p));
            }
            d[i * n + j] = d[j * n + i] = std::pow(std::max(0.0, acc.value()), 1.0 / p);
        }
    }
    return d;
}

RowMatrix kernel_on_grid(const FredholmProblem& problem, std::span<const double> z) {
    const PointSpan grid = problem.grid.points();
    const std::size_t P = grid.size();
    std::vector<double> tile(P * P);
    problem.kernel.tile(grid, grid, z, tile);
    check_finite(tile, "kernel");
    return Eigen::Map<RowMatrix>(tile.data(), static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
}

std::size_t greedy_cover(const std::vector<double>& d, std::size_t n, double eps) {
    std::vector<char> covered(n, 0);
    std::size_t centers = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (covered[c]) {
            continue;
        }
        ++centers;
        for (std::size_t j = 0; j < n; ++j) {
            if (d[c * n + j] <= eps) {
                covered[j] = 1;
            }
        }
    }
    return centers;
}

}  // namespace

EntropyDiagnostic entropy_diagnostic(const FredholmProblem& problem, const FunctionOnGrid& x_prev, double p,
                                     const EntropyOptions& options) {
    detail::require(p >= 2.0, "p must be at least 2");
    detail::require(x_prev.size() == problem.grid.size(), "iterate does not match the problem grid");
    detail::require(options.epsilon_levels >= 2, "at least two epsilon levels are required");

    EntropyDiagnostic out;
    out.p = p;
    out.size = problem.grid.size();
    out.distances = semi_distances(kernel_on_grid(problem, x_prev.values), problem.grid.weights(), p);

    // Ascending epsilon; a cover at a smaller radius also covers at a larger one.
    const std::size_t L = options.epsilon_levels;
    std::vector<double> eps(L);
    std::vector<std::size_t> counts(L);
    for (std::size_t j = 0; j < L; ++j) {
        eps[j] = std::ldexp(1.0, -static_cast<int>(L - 1 - j));
        counts[j] = greedy_cover(out.distances, out.size, eps[j]);
        if (j > 0) {
            counts[j] = std::min(counts[j], counts[j - 1]);
        }
        out.covering_counts[eps[j]] = counts[j];
    }

    // Growth of log N against log(1/eps) where the count is neither 1 nor saturated.
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t j = 0; j < L; ++j) {
        if (counts[j] > 1 && counts[j] < out.size) {
            xs.push_back(-std::log(eps[j]));
            ys.push_back(std::log(static_cast<double>(counts[j])));
        }
    }
    if (xs.size() >= 2) {
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        out.growth_exponent = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    out.insufficient_resolution = out.size < options.min_resolution;
    out.divergence_suspected = out.growth_exponent / p >= 1.0;

    if (!out.divergence_suspected) {
        // Step function on (eps_{j-1}, eps_j] at the smaller radius, constant below the finest one.
        double integral = eps[0] * std::pow(static_cast<double>(counts[0]), 1.0 / p);
        for (std::size_t j = 1; j < L; ++j) {
            integral += (eps[j] - eps[j - 1]) * std::pow(static_cast<double>(counts[j - 1]), 1.0 / p);
        }
        out.integral_estimate = integral;
    }
    out.caveat =
        "covering counts are taken over the grid points only, so they understate the continuum values below the "
        "grid spacing";
    if (out.insufficient_resolution) {
        out.caveat += "; the grid has too few points for a growth estimate";
    }
    return out;
}

double distance_ball_bound(const FredholmProblem& problem, double p, std::size_t levels) {
    detail::require(p >= 2.0, "p must be at least 2");
    detail::require(levels >= 2, "at least two levels are required");
    const double radius = forcing_sup(problem) / (1.0 - problem.rho);
    double bound = 0.0;
    std::vector<double> z(problem.grid.size());
    for (std::size_t k = 0; k < levels; ++k) {
        const double c = -radius + 2.0 * radius * static_cast<double>(k) / static_cast<double>(levels - 1);
        std::fill(z.begin(), z.end(), c);
        const auto d = semi_distances(kernel_on_grid(problem, z), problem.grid.weights(), p);
        bound = std::max(bound, *std::max_element(d.begin(), d.end()));
    }
    return bound;
}

}  // namespace mcie
