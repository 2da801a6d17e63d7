#include "mcie/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcie/errors.hpp"

namespace mcie {

void FredholmKernel::tile(PointSpan t, PointSpan s, std::span<const double> z, std::span<double> out) const {
    if (tile_) {
        tile_(t, s, z, out);
        return;
    }
    const std::size_t cols = s.size();
    for (std::size_t r = 0; r < t.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            out[r * cols + c] = pointwise_(t[r], s[c], z[c]);
        }
    }
}

std::vector<double> equispaced_tau_grid(std::size_t count) {
    detail::require(count >= 2, "tau grid needs at least 2 points");
    std::vector<double> tau(count);
    for (std::size_t a = 0; a < count; ++a) {
        tau[a] = static_cast<double>(a) / static_cast<double>(count - 1);
    }
    tau.back() = 1.0;
    return tau;
}

double forcing_sup(const FredholmProblem& problem) {
    double sup = 0.0;
    for (std::size_t j = 0; j < problem.grid.size(); ++j) {
        const double v = problem.forcing(problem.grid.point(j));
        if (!std::isfinite(v)) {
            throw EvaluationError("forcing term is not finite at grid point " + std::to_string(j));
        }
        sup = std::max(sup, std::abs(v));
    }
    return sup;
}

double forcing_sup(const VolterraProblem& problem) {
    double sup = 0.0;
    for (double tau : problem.tau_grid) {
        for (std::size_t j = 0; j < problem.grid.size(); ++j) {
            const double v = problem.forcing(tau, problem.grid.point(j));
            if (!std::isfinite(v)) {
                throw EvaluationError("forcing term is not finite on the tau grid");
            }
            sup = std::max(sup, std::abs(v));
        }
    }
    return sup;
}

namespace {

// Channels above the point coordinates of a probe lane.
constexpr std::uint64_t kProbeGridChannel = 2048;
constexpr std::uint64_t kProbeZChannel = 2049;
constexpr std::uint64_t kProbeGapChannel = 2050;
constexpr std::uint64_t kProbeSignChannel = 2051;
constexpr std::uint64_t kProbeTauChannel = 2052;
constexpr std::uint64_t kProbeNuChannel = 2053;

struct ZPair {
    double z1;
    double z2;
};

ZPair probe_z(const RandomStream& stream, const Lane& lane, double half_range) {
    const double s = half_range > 0.0 ? half_range : 1.0;
    const double z1 = -s + 2.0 * s * stream.uniform(lane, kProbeZChannel);
    const double lo = 1e-6;
    const double hi = std::max(2.0 * s, 2e-6);
    const double gap = lo * std::pow(hi / lo, stream.uniform(lane, kProbeGapChannel));
    const double z2 = stream.uniform(lane, kProbeSignChannel) < 0.5 ? z1 - gap : z1 + gap;
    return {z1, z2};
}

std::size_t probe_grid_index(const RandomStream& stream, const Lane& lane, std::size_t size) {
    const auto k = static_cast<std::size_t>(stream.uniform(lane, kProbeGridChannel) * static_cast<double>(size));
    return std::min(k, size - 1);
}

double ratio(double k1, double k2, double z1, double z2) {
    if (!std::isfinite(k1) || !std::isfinite(k2)) {
        throw EvaluationError("kernel is not finite at a Lipschitz probe");
    }
    return std::abs(k1 - k2) / std::abs(z1 - z2);
}

}  // namespace

double probe_lipschitz(const FredholmProblem& problem, const RandomStream& stream,
                       const LipschitzProbeOptions& options) {
    detail::require(options.n_probes >= 100, "Lipschitz probing needs at least 100 probes");
    const double half_range = options.z_half_range.value_or(forcing_sup(problem) / (1.0 - problem.rho));
    std::vector<double> s(problem.measure.dim());
    double best = 0.0;
    for (std::size_t i = 0; i < options.n_probes; ++i) {
        const Lane lane{options.replication, kProbeStage, i};
        problem.measure.draw(stream, lane, s);
        const Point t = problem.grid.point(probe_grid_index(stream, lane, problem.grid.size()));
        const auto [z1, z2] = probe_z(stream, lane, half_range);
        best = std::max(best, ratio(problem.kernel(t, s, z1), problem.kernel(t, s, z2), z1, z2));
    }
    return best;
}

double probe_lipschitz(const VolterraProblem& problem, const RandomStream& stream,
                       const LipschitzProbeOptions& options) {
    detail::require(options.n_probes >= 100, "Lipschitz probing needs at least 100 probes");
    const double half_range = options.z_half_range.value_or(forcing_sup(problem) * std::exp(problem.lip));
    std::vector<double> v(problem.measure.dim());
    double best = 0.0;
    for (std::size_t i = 0; i < options.n_probes; ++i) {
        const Lane lane{options.replication, kProbeStage, i};
        problem.measure.draw(stream, lane, v);
        const Point y = problem.grid.point(probe_grid_index(stream, lane, problem.grid.size()));
        const double tau = stream.uniform(lane, kProbeTauChannel);
        const double nu = tau * stream.uniform(lane, kProbeNuChannel);
        const auto [z1, z2] = probe_z(stream, lane, half_range);
        best = std::max(best, ratio(problem.kernel(tau, y, nu, v, z1), problem.kernel(tau, y, nu, v, z2), z1, z2));
    }
    return best;
}

namespace {

void check_measure_matches_grid(const MeasureSpec& measure, const MetricSpaceGrid& grid) {
    detail::require(measure.dim() == grid.dim(), "measure and grid dimensions differ");
}

}  // namespace

void validate(const FredholmProblem& problem) {
    detail::require(static_cast<bool>(problem.forcing), "forcing term is empty");
    detail::require(static_cast<bool>(problem.kernel), "kernel is empty");
    detail::require(problem.rho > 0.0 && problem.rho < 1.0, "rho must lie in (0, 1)");
    check_measure_matches_grid(problem.measure, problem.grid);
    const double lip = probe_lipschitz(problem, RandomStream(0));
    detail::require(lip <= problem.rho + 1e-6,
                    "probed Lipschitz constant " + std::to_string(lip) + " exceeds rho");
}

void validate(const VolterraProblem& problem) {
    detail::require(static_cast<bool>(problem.forcing), "forcing term is empty");
    detail::require(static_cast<bool>(problem.kernel), "kernel is empty");
    detail::require(std::isfinite(problem.lip) && problem.lip > 0.0, "lip must be finite and positive");
    check_measure_matches_grid(problem.measure, problem.grid);
    const auto& tau = problem.tau_grid;
    detail::require(tau.size() >= 2, "tau grid needs at least 2 points");
    detail::require(tau.front() == 0.0 && tau.back() == 1.0, "tau grid must start at 0 and end at 1");
    for (std::size_t a = 1; a < tau.size(); ++a) {
        detail::require(tau[a] > tau[a - 1], "tau grid must be strictly increasing");
    }
    detail::require(problem.tau_interpolation_order >= 1 && problem.tau_interpolation_order <= 15 &&
                        static_cast<std::size_t>(problem.tau_interpolation_order) < tau.size(),
                    "tau interpolation order must be in [1, 15] and below the tau grid size");
    detail::require(problem.nu_nodes >= 1, "nu quadrature needs at least one node");
    const double lip = probe_lipschitz(problem, RandomStream(0));
    detail::require(lip <= problem.lip + 1e-6,
                    "probed Lipschitz constant " + std::to_string(lip) + " exceeds lip");
}

}  // namespace mcie
