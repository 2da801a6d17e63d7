#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mcie {

/**
 * Split of the sample budget N into m consecutive blocks Q(1..m).
 *
 * sizes[k-1] = q(k), boundaries[k-1] = n(k) = q(1) + ... + q(k),
 * gamma[k-1] = q(k) / budget. `from_sizes` does not check anything, so a
 * schedule that breaks the invariants can still be built and handed to
 * validate_partition().
 */
struct PartitionSchedule {
    std::int64_t budget = 0;
    std::vector<std::int64_t> sizes;
    std::vector<std::int64_t> boundaries;
    std::vector<double> gamma;

    static PartitionSchedule from_sizes(std::int64_t budget, std::vector<std::int64_t> sizes);

    int stages() const noexcept { return static_cast<int>(sizes.size()); }
    std::int64_t q(int k) const { return sizes.at(static_cast<std::size_t>(k - 1)); }
    /// First global sample index of stage k (0-based), i.e. n(k-1).
    std::int64_t stage_begin(int k) const { return k == 1 ? 0 : boundaries.at(static_cast<std::size_t>(k - 2)); }
    std::int64_t total() const noexcept { return boundaries.empty() ? 0 : boundaries.back(); }
};

enum class ScheduleKind { uniform, paper_optimal, budget_consistent };

ScheduleKind parse_schedule_kind(const std::string& name);
std::string to_string(ScheduleKind kind);

/// q(k) = floor(N/m), with N mod m added to the last stage.
PartitionSchedule uniform_partition(std::int64_t N, int m);

struct PaperOptimalSizes {
    std::vector<std::int64_t> sizes;
    std::int64_t sum = 0;
    bool sums_to_budget = false;
};

/**
 * The asymptotic stage sizes
 *   q0(m)   = floor(N^(1/2) - C_m N^(1/4)),
 *   q0(m-k) = floor(N^(2^(-k-1)) - C_{m-k} N^(2^(-k-2))),  k = 1..m-2,
 *   q0(1)   = floor(C_1 N^(2^(-m))),
 * evaluated literally. Their sum is about sqrt(N), not N. `constants` holds
 * C_1..C_m; empty means all ones.
 */
PaperOptimalSizes paper_optimal_partition(std::int64_t N, int m, std::span<const double> constants = {});

/**
 * Z = sum_{j=0}^{m-1} 1 / prod_{i=0}^{j} q(m-i).
 */
double allocation_objective(std::span<const std::int64_t> q);

/// Minimiser of allocation_objective subject to sum q = N, q(k) >= 1, found by
/// the cascade q(m-k) ~ N^(2^-k) followed by pairwise-transfer descent.
PartitionSchedule budget_consistent_partition(std::int64_t N, int m);

/// Exhaustive minimiser for N <= 500, m <= 3; lexicographically smallest on ties.
PartitionSchedule brute_force_allocation(std::int64_t N, int m);

/// Builds a budget-respecting schedule of the given kind. paper_optimal is
/// rejected here because its sizes do not sum to N.
PartitionSchedule make_schedule(ScheduleKind kind, std::int64_t N, int m);

struct PartitionReport {
    std::int64_t budget = 0;
    std::int64_t sum = 0;
    std::int64_t min_size = 0;
    double last_stage_ratio = 0.0;  ///< q(m) / N
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

PartitionReport validate_partition(const PartitionSchedule& schedule);

}  // namespace mcie
