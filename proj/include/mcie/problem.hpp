#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mcie/grid.hpp"
#include "mcie/measure.hpp"
#include "mcie/points.hpp"
#include "mcie/random_stream.hpp"

namespace mcie {

/**
 * Fredholm kernel K(t, s, z).
 *
 * Besides the pointwise form, a kernel may supply a tile evaluator that fills
 * out[r * s.size() + c] = K(t[r], s[c], z[c]) in one call, which lets it hoist
 * work that depends only on the column. The default tile loops pointwise.
 */
class FredholmKernel {
public:
    using Pointwise = std::function<double(Point t, Point s, double z)>;
    using Tile = std::function<void(PointSpan t, PointSpan s, std::span<const double> z, std::span<double> out)>;

    FredholmKernel() = default;

    template <typename F>
        requires std::invocable<F, Point, Point, double>
    FredholmKernel(F fn)  // NOLINT(google-explicit-constructor)
        : pointwise_(std::move(fn)) {}

    FredholmKernel(Pointwise fn, Tile tile) : pointwise_(std::move(fn)), tile_(std::move(tile)) {}

    explicit operator bool() const noexcept { return static_cast<bool>(pointwise_); }

    double operator()(Point t, Point s, double z) const { return pointwise_(t, s, z); }

    void tile(PointSpan t, PointSpan s, std::span<const double> z, std::span<double> out) const;

private:
    Pointwise pointwise_;
    Tile tile_;
};

using ForcingFn = std::function<double(Point)>;

/// x(t) = f(t) + integral of K(t, s, x(s)) mu(ds), |K(.,.,z1) - K(.,.,z2)| <= rho |z1 - z2|.
struct FredholmProblem {
    ForcingFn forcing;
    FredholmKernel kernel;
    double rho = 0.5;
    MeasureSpec measure = MeasureSpec::uniform(1);
    MetricSpaceGrid grid = build_grid({});
};

using VolterraForcingFn = std::function<double(double tau, Point y)>;
using VolterraKernelFn = std::function<double(double tau, Point y, double nu, Point v, double z)>;

/**
 * X(tau, y) = f(tau, y) + int_0^tau dnu int_T K(tau, y, nu, v, X(nu, v)) mu(dv).
 *
 * `lip` bounds the Lipschitz constant in z and need not be below one.
 * Values off `tau_grid` are reconstructed by local Lagrange interpolation of
 * degree `tau_interpolation_order`.
 */
struct VolterraProblem {
    VolterraForcingFn forcing;
    VolterraKernelFn kernel;
    double lip = 1.0;
    MeasureSpec measure = MeasureSpec::uniform(1);
    MetricSpaceGrid grid = build_grid({});
    std::vector<double> tau_grid;
    int tau_interpolation_order = 1;
    std::size_t nu_nodes = 32;  ///< Gauss-Legendre nodes for the deterministic nu-integral
};

/// Equispaced grid on [0,1] with `count` points (count >= 2).
std::vector<double> equispaced_tau_grid(std::size_t count = 65);

/// Throws ValidationError when a documented invariant of the problem fails.
void validate(const FredholmProblem& problem);
void validate(const VolterraProblem& problem);

struct LipschitzProbeOptions {
    std::size_t n_probes = 1000;
    /// Half-width S of the z-range [-S, S]. Defaults to ||f|| / (1 - rho) for
    /// Fredholm problems and ||f|| * exp(lip) for Volterra problems.
    std::optional<double> z_half_range;
    std::uint64_t replication = 0;
};

/**
 * Largest observed |K(.., z1) - K(.., z2)| / |z1 - z2| over random probes.
 * Argument points are drawn from the measure; z1 is uniform on [-S, S] and the
 * gap |z2 - z1| is log-uniform on [1e-6, 2S]. A lower bound on the true constant.
 */
double probe_lipschitz(const FredholmProblem& problem, const RandomStream& stream,
                       const LipschitzProbeOptions& options = {});
double probe_lipschitz(const VolterraProblem& problem, const RandomStream& stream,
                       const LipschitzProbeOptions& options = {});

/// sup over grid points of |f|.
double forcing_sup(const FredholmProblem& problem);
double forcing_sup(const VolterraProblem& problem);

}  // namespace mcie
