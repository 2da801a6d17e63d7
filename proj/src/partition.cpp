#include "mcie/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcie/errors.hpp"

namespace mcie {

PartitionSchedule PartitionSchedule::from_sizes(std::int64_t budget, std::vector<std::int64_t> sizes) {
    PartitionSchedule s;
    s.budget = budget;
    s.sizes = std::move(sizes);
    std::int64_t acc = 0;
    for (std::int64_t q : s.sizes) {
        acc += q;
        s.boundaries.push_back(acc);
        s.gamma.push_back(budget > 0 ? static_cast<double>(q) / static_cast<double>(budget) : 0.0);
    }
    return s;
}

ScheduleKind parse_schedule_kind(const std::string& name) {
    if (name == "uniform") {
        return ScheduleKind::uniform;
    }
    if (name == "paper-optimal" || name == "paper_optimal") {
        return ScheduleKind::paper_optimal;
    }
    if (name == "budget-consistent" || name == "budget_consistent") {
        return ScheduleKind::budget_consistent;
    }
    detail::fail_validation("unknown schedule kind '" + name + "'");
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
    case ScheduleKind::uniform:
        return "uniform";
    case ScheduleKind::paper_optimal:
        return "paper-optimal";
    case ScheduleKind::budget_consistent:
        return "budget-consistent";
    }
    return "unknown";
}

PartitionSchedule uniform_partition(std::int64_t N, int m) {
    detail::require(m >= 1, "stage count must be at least 1");
    detail::require(N >= m, "budget N must be at least the stage count m");
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(m), N / m);
    sizes.back() += N % m;
    return PartitionSchedule::from_sizes(N, std::move(sizes));
}

namespace {

/// floor() that treats values within 1e-9 (relative) of an integer as that integer,
/// so e.g. 256^(1/4) evaluates to 4 rather than 3.
std::int64_t robust_floor(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
        return static_cast<std::int64_t>(r);
    }
    return static_cast<std::int64_t>(std::floor(x));
}

}  // namespace

PaperOptimalSizes paper_optimal_partition(std::int64_t N, int m, std::span<const double> constants) {
    detail::require(m >= 1 && m <= 16, "stage count must be in [1, 16]");
    detail::require(N >= 1, "budget N must be positive");
    detail::require(constants.empty() || constants.size() == static_cast<std::size_t>(m),
                    "expected one constant per stage");
    auto C = [&](int k) { return constants.empty() ? 1.0 : constants[static_cast<std::size_t>(k - 1)]; };
    const double n = static_cast<double>(N);

    PaperOptimalSizes out;
    out.sizes.assign(static_cast<std::size_t>(m), 0);
    auto set = [&](int k, std::int64_t v) { out.sizes[static_cast<std::size_t>(k - 1)] = v; };
    set(1, robust_floor(C(1) * std::pow(n, std::ldexp(1.0, -m))));
    if (m >= 2) {
        set(m, robust_floor(std::sqrt(n) - C(m) * std::pow(n, 0.25)));
        // Interior stages take the integer part of each power separately; a floor of the
        // difference gives 25 instead of 26 at (1e6, 3) because 10^1.5 - 10^0.75 = 25.9994.
        for (int k = 1; k <= m - 2; ++k) {
            set(m - k, robust_floor(std::pow(n, std::ldexp(1.0, -k - 1))) -
                           robust_floor(C(m - k) * std::pow(n, std::ldexp(1.0, -k - 2))));
        }
    }
    for (int k = 1; k <= m; ++k) {
        const std::int64_t q = out.sizes[static_cast<std::size_t>(k - 1)];
        if (q < 1) {
            detail::fail_validation("stage size q(" + std::to_string(k) + ") = " + std::to_string(q) +
                                    " is below 1; N is too small for these constants");
        }
        out.sum += q;
    }
    out.sums_to_budget = out.sum == N;
    return out;
}

double allocation_objective(std::span<const std::int64_t> q) {
    detail::require(!q.empty(), "allocation objective needs at least one stage");
    double z = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::int64_t v = q[q.size() - 1 - i];
        detail::require(v >= 1, "stage sizes must be at least 1");
        prod *= static_cast<double>(v);
        z += 1.0 / prod;
    }
    return z;
}

PartitionSchedule budget_consistent_partition(std::int64_t N, int m) {
    detail::require(m >= 1 && m <= 16, "stage count must be in [1, 16]");
    detail::require(N >= m, "infeasible budget: N must be at least the stage count m");
    const auto M = static_cast<std::size_t>(m);
    std::vector<std::int64_t> q(M, 1);
    // Cascade q(m-k) ~ N^(2^-k), keeping room for one sample in every other stage.
    std::int64_t used = 0;
    for (int k = 1; k <= m - 1; ++k) {
        const std::int64_t room = N - used - (m - k);
        const auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(N), std::ldexp(1.0, -k))));
        q[M - 1 - static_cast<std::size_t>(k)] = std::clamp<std::int64_t>(guess, 1, std::max<std::int64_t>(1, room));
        used += q[M - 1 - static_cast<std::size_t>(k)];
    }
    q[M - 1] = N - used;
    if (q[M - 1] < 1) {
        std::fill(q.begin(), q.end(), 1);
        q[M - 1] = N - (m - 1);
    }

    // Pairwise-transfer descent with halving steps.
    double best = allocation_objective(q);
    std::int64_t step = 1;
    while (step * 2 <= N / 2) {
        step *= 2;
    }
    for (; step >= 1; step /= 2) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t from = 0; from < M; ++from) {
                for (std::size_t to = 0; to < M; ++to) {
                    if (from == to || q[from] - step < 1) {
                        continue;
                    }
                    q[from] -= step;
                    q[to] += step;
                    const double z = allocation_objective(q);
                    if (z < best) {
                        best = z;
                        improved = true;
                    } else {
                        q[from] += step;
                        q[to] -= step;
                    }
                }
            }
        }
    }
    return PartitionSchedule::from_sizes(N, std::move(q));
}

PartitionSchedule brute_force_allocation(std::int64_t N, int m) {
    detail::require(m >= 1 && m <= 3, "brute force supports m <= 3");
    detail::require(N <= 500, "brute force supports N <= 500");
    detail::require(N >= m, "infeasible budget: N must be at least the stage count m");
    std::vector<std::int64_t> best;
    double best_z = std::numeric_limits<double>::infinity();
    std::vector<std::int64_t> q(static_cast<std::size_t>(m));
    // Lexicographic enumeration; strict improvement keeps the smallest on ties.
    auto consider = [&] {
        const double z = allocation_objective(q);
        if (z < best_z) {
            best_z = z;
            best = q;
        }
    };
    if (m == 1) {
        q[0] = N;
        consider();
    } else if (m == 2) {
        for (q[0] = 1; q[0] <= N - 1; ++q[0]) {
            q[1] = N - q[0];
            consider();
        }
    } else {
        for (q[0] = 1; q[0] <= N - 2; ++q[0]) {
            for (q[1] = 1; q[1] <= N - q[0] - 1; ++q[1]) {
                q[2] = N - q[0] - q[1];
                consider();
            }
        }
    }
    return PartitionSchedule::from_sizes(N, std::move(best));
}

PartitionSchedule make_schedule(ScheduleKind kind, std::int64_t N, int m) {
    switch (kind) {
    case ScheduleKind::uniform:
        return uniform_partition(N, m);
    case ScheduleKind::budget_consistent:
        return budget_consistent_partition(N, m);
    case ScheduleKind::paper_optimal:
        break;
    }
    detail::fail_validation("the paper-optimal sizes do not sum to N and cannot drive a solver");
}

PartitionReport validate_partition(const PartitionSchedule& schedule) {
    PartitionReport r;
    r.budget = schedule.budget;
    if (schedule.sizes.empty()) {
        r.violations.push_back("schedule has no stages");
        return r;
    }
    r.min_size = *std::min_element(schedule.sizes.begin(), schedule.sizes.end());
    for (std::size_t k = 0; k < schedule.sizes.size(); ++k) {
        r.sum += schedule.sizes[k];
        if (schedule.sizes[k] < 1) {
            r.violations.push_back("q(" + std::to_string(k + 1) + ") < 1");
        }
    }
    if (r.budget < 1) {
        r.violations.push_back("budget must be positive");
    }
    if (r.sum != r.budget) {
        std::ostringstream msg;
        msg << "sum of stage sizes " << r.sum << " != budget " << r.budget;
        r.violations.push_back(msg.str());
    }
    if (schedule.boundaries.size() != schedule.sizes.size() ||
        (!schedule.boundaries.empty() && schedule.boundaries.back() != r.sum)) {
        r.violations.push_back("boundaries do not match the stage sizes");
    }
    if (r.budget > 0) {
        r.last_stage_ratio = static_cast<double>(schedule.sizes.back()) / static_cast<double>(r.budget);
        r.gamma_min = std::numeric_limits<double>::infinity();
        r.gamma_max = -std::numeric_limits<double>::infinity();
        for (std::int64_t q : schedule.sizes) {
            const double g = static_cast<double>(q) / static_cast<double>(r.budget);
            r.gamma_min = std::min(r.gamma_min, g);
            r.gamma_max = std::max(r.gamma_max, g);
        }
        if (!(r.gamma_min > 0.0 && r.gamma_max <= 1.0)) {
            r.violations.push_back("gamma entries must lie in (0, 1]");
        }
    }
    return r;
}

}  // namespace mcie
