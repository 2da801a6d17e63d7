#include "mcie/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcie/errors.hpp"
#include "mcie/summation.hpp"

namespace mcie {

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    detail::require(dim > 0, "point dimension must be positive");
    detail::require(coords_.size() % dim == 0, "coordinate count is not a multiple of the dimension");
}

void PointSet::push_back(Point p) {
    detail::require(p.size() == dim_, "point dimension mismatch");
    coords_.insert(coords_.end(), p.begin(), p.end());
}

MetricSpaceGrid::MetricSpaceGrid(PointSet points, std::vector<double> weights, DistanceFn distance)
    : points_(std::move(points)), weights_(std::move(weights)), distance_(std::move(distance)) {
    detail::require(points_.size() >= 2, "a grid needs at least 2 points");
    detail::require(weights_.size() == points_.size(), "one weight per grid point is required");
    detail::require(static_cast<bool>(distance_), "grid distance function is empty");
    CompensatedSum total;
    for (double w : weights_) {
        detail::require(std::isfinite(w) && w >= 0.0, "grid weights must be finite and non-negative");
        total.add(w);
    }
    detail::require(std::abs(total.value() - 1.0) <= 1e-12, "grid weights must sum to 1");
}

std::vector<double> MetricSpaceGrid::distance_matrix() const {
    const std::size_t n = size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i * n + j] = d[j * n + i] = distance(i, j);
        }
    }
    return d;
}

DistanceFn make_distance(DistanceKind kind) {
    switch (kind) {
    case DistanceKind::euclidean:
        return [](Point a, Point b) {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                s += (a[i] - b[i]) * (a[i] - b[i]);
            }
            return std::sqrt(s);
        };
    case DistanceKind::chebyshev:
        return [](Point a, Point b) {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                s = std::max(s, std::abs(a[i] - b[i]));
            }
            return s;
        };
    }
    detail::fail_validation("unknown distance kind");
}

namespace {

/// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(std::size_t n, double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double pk = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre_unit(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
    detail::require(n >= 1, "Gauss-Legendre rule needs at least one node");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double p = 0.0;
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            legendre(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        legendre(n, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = weights[n - 1 - i] = 0.5 * w;
    }
    if (n % 2 == 1) {
        nodes[n / 2] = 0.5;
    }
}

namespace {

void axis_rule(std::size_t n, QuadratureRule rule, std::vector<double>& nodes, std::vector<double>& weights) {
    if (rule == QuadratureRule::gauss_legendre) {
        gauss_legendre_unit(n, nodes, weights);
        return;
    }
    nodes.resize(n);
    weights.assign(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    }
}

}  // namespace

MetricSpaceGrid build_grid(const GridSpec& spec) {
    detail::require(spec.dim >= 1, "grid dimension must be at least 1");
    detail::require(spec.points_per_axis >= 2, "grid needs at least 2 points per axis");
    std::vector<double> nodes;
    std::vector<double> axis_weights;
    axis_rule(spec.points_per_axis, spec.rule, nodes, axis_weights);

    std::size_t total = 1;
    for (std::size_t d = 0; d < spec.dim; ++d) {
        detail::require(total <= (std::size_t{1} << 24) / spec.points_per_axis, "grid is too large");
        total *= spec.points_per_axis;
    }
    PointSet points(spec.dim);
    points.resize(total);
    std::vector<double> weights(total, 1.0);
    // Last axis varies fastest.
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        auto p = points.mutable_point(flat);
        for (std::size_t d = spec.dim; d-- > 0;) {
            const std::size_t a = rest % spec.points_per_axis;
            rest /= spec.points_per_axis;
            p[d] = nodes[a];
            weights[flat] *= axis_weights[a];
        }
    }
    if (spec.rule == QuadratureRule::equal_weight) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(total));
    }
    return MetricSpaceGrid(std::move(points), std::move(weights), make_distance(spec.distance));
}

GridSpec refined(GridSpec spec, std::size_t factor) {
    detail::require(factor >= 1, "refinement factor must be at least 1");
    spec.points_per_axis *= factor;
    return spec;
}

std::string verify_metric_axioms(const MetricSpaceGrid& grid, double tol) {
    const std::size_t n = grid.size();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d[i * n + j] = grid.distance(i, j);
        }
    }
    std::ostringstream msg;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(d[i * n + i]) > tol) {
            msg << "d(" << i << "," << i << ") = " << d[i * n + i] << " is not zero";
            return msg.str();
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!(d[i * n + j] >= -tol) || std::abs(d[i * n + j] - d[j * n + i]) > tol) {
                msg << "d(" << i << "," << j << ") is negative or asymmetric";
                return msg.str();
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                if (d[i * n + k] > d[i * n + j] + d[j * n + k] + tol) {
                    msg << "triangle inequality fails for (" << i << "," << j << "," << k << ")";
                    return msg.str();
                }
            }
        }
    }
    return {};
}

}  // namespace mcie
