#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcie/partition.hpp"
#include "mcie/problem.hpp"
#include "mcie/random_stream.hpp"

namespace mcie {

struct StudyOptions {
    ScheduleKind schedule = ScheduleKind::uniform;
    std::size_t n_sim = 10000;
    std::uint64_t first_replication = 0;
};

struct RateRow {
    std::int64_t N = 0;
    double median_error = 0.0;
    std::vector<double> errors;  ///< sup-grid error per replication
};

struct RateStudyResult {
    std::vector<RateRow> rows;
    std::optional<double> slope;  ///< least-squares slope of log(median) vs log(N)
    std::string note;
};

/// Median over replications of sup |x_m^m - x_m| for each N, and the log-log slope.
RateStudyResult rate_study(const FredholmProblem& problem, int m, std::span<const std::int64_t> budgets,
                           int replications, const RandomStream& stream, const StudyOptions& options = {});
RateStudyResult rate_study(const VolterraProblem& problem, int m, std::span<const std::int64_t> budgets,
                           int replications, const RandomStream& stream, const StudyOptions& options = {});

/// Least-squares slope of log(y) against log(x); empty if any y <= 0.
std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y);

struct CoverageResult {
    int replications = 0;
    int covered = 0;
    double coverage = 0.0;
    std::optional<double> reference_coverage;  ///< band widened by the a-priori bound vs the exact solution
    double mean_halfwidth = 0.0;
    double widening = 0.0;
    std::vector<double> sup_errors;
    std::vector<double> halfwidths;
};

using FredholmReference = std::function<double(Point)>;
using VolterraReference = std::function<double(double, Point)>;

/**
 * Fraction of replications whose band covers the deterministic x_m at every
 * grid point. With a reference, also the fraction covering it after widening
 * the half-width by apriori_error_bound(rho, ||x_1 - x_0||, m).
 */
CoverageResult coverage_study(const FredholmProblem& problem, int m, std::int64_t N, double level,
                              int replications, const RandomStream& stream, const StudyOptions& options = {},
                              const FredholmReference& reference = {});
CoverageResult coverage_study(const VolterraProblem& problem, int m, std::int64_t N, double level,
                              int replications, const RandomStream& stream, const StudyOptions& options = {},
                              const VolterraReference& reference = {});

/// Absolute slack used when comparing a zero-width band against its target.
inline constexpr double kCoverageSlack = 1e-12;

}  // namespace mcie
