#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mcie/points.hpp"

namespace mcie {

using DistanceFn = std::function<double(Point, Point)>;

enum class DistanceKind { euclidean, chebyshev };

/// Per-axis node placement and weights for a tensor grid on [0,1]^dim.
enum class QuadratureRule {
    equal_weight,    ///< equispaced nodes including both ends, weights 1/n
    gauss_legendre,  ///< Gauss-Legendre nodes mapped to (0,1)
};

struct GridSpec {
    std::size_t dim = 1;
    std::size_t points_per_axis = 2;
    QuadratureRule rule = QuadratureRule::equal_weight;
    DistanceKind distance = DistanceKind::euclidean;
};

/**
 * Finite stand-in for (T, d, mu): points, quadrature weights representing mu,
 * and a metric. Weights are non-negative and sum to 1; at least two points.
 */
class MetricSpaceGrid {
public:
    MetricSpaceGrid(PointSet points, std::vector<double> weights, DistanceFn distance);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return points_.dim(); }
    const PointSet& points() const noexcept { return points_; }
    Point point(std::size_t i) const { return points_[i]; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const DistanceFn& distance_fn() const noexcept { return distance_; }
    double distance(std::size_t i, std::size_t j) const { return distance_(points_[i], points_[j]); }

    /// Row-major size() x size() matrix of pairwise distances.
    std::vector<double> distance_matrix() const;

private:
    PointSet points_;
    std::vector<double> weights_;
    DistanceFn distance_;
};

MetricSpaceGrid build_grid(const GridSpec& spec);

/// Same spec with `factor` times as many points per axis.
GridSpec refined(GridSpec spec, std::size_t factor);

DistanceFn make_distance(DistanceKind kind);

/// Gauss-Legendre nodes and weights on [0,1], ascending nodes, weights summing to 1.
void gauss_legendre_unit(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

/// Checks symmetry, zero diagonal and the triangle inequality on every triple.
/// Returns an empty string on success, else a description of the first failure.
std::string verify_metric_axioms(const MetricSpaceGrid& grid, double tol = 1e-12);

}  // namespace mcie
