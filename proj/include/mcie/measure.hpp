#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "mcie/grid.hpp"
#include "mcie/points.hpp"
#include "mcie/random_stream.hpp"

namespace mcie {

struct UniformCube {
    std::size_t dim = 1;
};

struct DiscreteWeighted {
    PointSet atoms;
    std::vector<double> weights;
};

/// Law of F^{-1}(U) for U uniform on [0,1]; F^{-1} must be non-decreasing.
struct InverseCdf1d {
    std::function<double(double)> inverse_cdf;
};

/**
 * The law mu of the samples xi(i). Construct through the factory functions,
 * which check the invariants.
 */
class MeasureSpec {
public:
    using Kind = std::variant<UniformCube, DiscreteWeighted, InverseCdf1d>;

    static MeasureSpec uniform(std::size_t dim = 1);
    static MeasureSpec discrete(PointSet atoms, std::vector<double> weights);
    static MeasureSpec point_mass(Point atom);
    static MeasureSpec inverse_cdf(std::function<double(double)> inverse_cdf);

    const Kind& kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept;
    bool is_discrete() const noexcept { return std::holds_alternative<DiscreteWeighted>(kind_); }

    /// Writes the draw for `lane` into `out` (size dim()).
    void draw(const RandomStream& stream, const Lane& lane, std::span<double> out) const;

private:
    explicit MeasureSpec(Kind kind) : kind_(std::move(kind)) {}
    void build_cumulative();

    Kind kind_;
    std::vector<double> cumulative_;
};

/// `count` draws at lanes (replication, stage, first_index + i).
PointSet sample_measure(const MeasureSpec& measure, std::size_t count, const RandomStream& stream,
                        std::uint64_t replication = 0, std::uint64_t stage = 0,
                        std::uint64_t first_index = 0);

/**
 * Quadrature grid representing the measure: tensor Gauss-Legendre for the
 * uniform cube, the atoms for a discrete measure, and mapped Gauss-Legendre
 * nodes for an inverse CDF. `resolution` is nodes per axis (ignored for
 * discrete measures, which must have at least two atoms).
 */
MetricSpaceGrid measure_grid(const MeasureSpec& measure, std::size_t resolution,
                             DistanceKind distance = DistanceKind::euclidean);

}  // namespace mcie
