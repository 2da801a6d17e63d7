#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcie/deterministic.hpp"
#include "mcie/mc_fredholm.hpp"
#include "mcie/mc_volterra.hpp"
#include "mcie/problem.hpp"
#include "mcie/random_stream.hpp"

namespace mcie {

enum class CovarianceSource { empirical, limit };

/// Symmetric size x size matrix over the evaluation points (row-major).
struct CovarianceEstimate {
    std::size_t size = 0;
    std::vector<double> matrix;
    CovarianceSource source = CovarianceSource::empirical;
    double max_asymmetry = 0.0;    ///< before symmetrisation
    double min_eigenvalue = 0.0;   ///< before repair
    bool repaired = false;

    double operator()(std::size_t i, std::size_t j) const { return matrix[i * size + j]; }
    double max_diagonal() const noexcept;
    double trace() const noexcept;
};

/**
 * Covariance of the rows of `samples` (count x points, row-major):
 * N^-1 sum a_i a_i^T - mean mean^T, computed on data shifted by the first
 * row so that identical rows give an exactly zero matrix. Symmetrised and
 * PSD-repaired.
 */
CovarianceEstimate empirical_covariance(std::span<const double> samples, std::size_t count, std::size_t points);

/// Remark-A style estimate from explicit draws and the values of x_{m-1}^{m-1} there.
CovarianceEstimate estimate_covariance(const FredholmProblem& problem, PointSpan draws,
                                       std::span<const double> previous_values);

/// Uses all N draws of the run, re-evaluating x_{m-1}^{m-1} where needed.
CovarianceEstimate estimate_covariance(const FredholmProblem& problem, const FredholmRun& run);

/// Over tau_grid x grid (tau-major), from all N pairs (eta_i, xi_i) of the run.
CovarianceEstimate estimate_covariance(const VolterraProblem& problem, const VolterraRun& run);

/// R_m(t1,t2) = int K1 K2 dmu - int K1 dmu int K2 dmu with x_prev = x_{m-1} on the grid.
CovarianceEstimate limit_covariance(const FredholmProblem& problem, const FunctionOnGrid& x_prev);

/// R_m^V over tau_grid x grid with x_prev = X_{m-1}; the nu-integral uses the
/// problem's Gauss-Legendre node count.
CovarianceEstimate limit_covariance(const VolterraProblem& problem, const FunctionOnProductGrid& x_prev);

/// Symmetrises and clips negative eigenvalues at zero when the smallest one
/// is below -1e-10 * trace (or negative at all when the trace is zero).
void repair_psd(CovarianceEstimate& cov);

/// Sorted draws of sup_t |G(t)|, G ~ N(0, cov), lanes (replication, kGaussianStage, i).
std::vector<double> gaussian_sup_samples(const CovarianceEstimate& cov, std::size_t n_sim,
                                         const RandomStream& stream, std::uint64_t replication = 0);

/// Order statistic with linear interpolation, h = (n - 1) * level.
double empirical_quantile(std::span<const double> sorted, double level);

double gaussian_sup_quantile(const CovarianceEstimate& cov, double level, std::size_t n_sim,
                             const RandomStream& stream, std::uint64_t replication = 0);

/// center +- halfwidth with halfwidth = quantile / sqrt(q_m).
struct ConfidenceBand {
    std::vector<double> center;
    double halfwidth = 0.0;
    double quantile = 0.0;
    double level = 0.0;
    std::int64_t q_m = 0;

    bool covers(std::span<const double> values, double slack = 0.0) const;
};

inline constexpr std::size_t kDefaultGaussianSims = 10000;

ConfidenceBand confidence_band(std::span<const double> center, const CovarianceEstimate& cov,
                               std::int64_t q_m, double level, const RandomStream& stream,
                               std::size_t n_sim = kDefaultGaussianSims, std::uint64_t replication = 0);

/// -u^2 / (2 max_t R(t,t)). Throws ValidationError for a zero diagonal.
double tail_log_asymptote(double u, const CovarianceEstimate& cov);

struct EntropyDiagnostic {
    double p = 2.0;
    std::size_t size = 0;
    std::vector<double> distances;                 ///< size x size, row-major
    std::map<double, std::size_t> covering_counts; ///< epsilon -> N(T, d_p, epsilon)
    std::optional<double> integral_estimate;       ///< empty when flagged divergent
    double growth_exponent = 0.0;                  ///< fitted a in N(eps) ~ eps^-a
    bool divergence_suspected = false;
    bool insufficient_resolution = false;
    std::string caveat;
};

struct EntropyOptions {
    std::size_t epsilon_levels = 24;  ///< epsilon = 2^-j, j = 0..levels-1
    std::size_t min_resolution = 8;
};

/**
 * d_p(t1,t2) = ( int |K(t1,s,x(s)) - K(t2,s,x(s))|^p mu(ds) )^(1/p) by grid
 * quadrature, greedy covering counts, and a step-function estimate of
 * int_0^1 N^(1/p)(eps) d eps.
 */
EntropyDiagnostic entropy_diagnostic(const FredholmProblem& problem, const FunctionOnGrid& x_prev, double p,
                                     const EntropyOptions& options = {});

/// max over grid pairs of d_p computed with constant functions g = c for
/// `levels` values of c in [-S, S], S = ||f|| / (1 - rho).
double distance_ball_bound(const FredholmProblem& problem, double p, std::size_t levels = 9);

}  // namespace mcie
