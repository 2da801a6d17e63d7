#include "mcie/measure.hpp"

#include <algorithm>
#include <cmath>

#include "mcie/errors.hpp"
#include "mcie/parallel.hpp"
#include "mcie/summation.hpp"

namespace mcie {

MeasureSpec MeasureSpec::uniform(std::size_t dim) {
    detail::require(dim >= 1, "uniform measure dimension must be at least 1");
    return MeasureSpec(UniformCube{dim});
}

MeasureSpec MeasureSpec::discrete(PointSet atoms, std::vector<double> weights) {
    detail::require(!atoms.empty(), "discrete measure needs at least one atom");
    detail::require(atoms.size() == weights.size(), "discrete measure needs one weight per atom");
    CompensatedSum total;
    for (double w : weights) {
        detail::require(std::isfinite(w) && w >= 0.0, "discrete measure weights must be non-negative");
        total.add(w);
    }
    detail::require(std::abs(total.value() - 1.0) <= 1e-12, "discrete measure weights must sum to 1");
    MeasureSpec spec(DiscreteWeighted{std::move(atoms), std::move(weights)});
    spec.build_cumulative();
    return spec;
}

MeasureSpec MeasureSpec::point_mass(Point atom) {
    PointSet atoms(atom.size());
    atoms.push_back(atom);
    return discrete(std::move(atoms), {1.0});
}

MeasureSpec MeasureSpec::inverse_cdf(std::function<double(double)> inverse_cdf) {
    detail::require(static_cast<bool>(inverse_cdf), "inverse CDF is empty");
    constexpr int kChecks = 1024;
    double previous = inverse_cdf(0.0);
    detail::require(std::isfinite(previous), "inverse CDF is not finite at 0");
    for (int i = 1; i <= kChecks; ++i) {
        const double v = inverse_cdf(static_cast<double>(i) / kChecks);
        detail::require(std::isfinite(v), "inverse CDF is not finite on [0,1]");
        detail::require(v >= previous, "inverse CDF must be non-decreasing on [0,1]");
        previous = v;
    }
    return MeasureSpec(InverseCdf1d{std::move(inverse_cdf)});
}

void MeasureSpec::build_cumulative() {
    const auto& d = std::get<DiscreteWeighted>(kind_);
    cumulative_.resize(d.weights.size());
    CompensatedSum acc;
    for (std::size_t i = 0; i < d.weights.size(); ++i) {
        acc.add(d.weights[i]);
        cumulative_[i] = acc.value();
    }
}

std::size_t MeasureSpec::dim() const noexcept {
    struct Visitor {
        std::size_t operator()(const UniformCube& u) const { return u.dim; }
        std::size_t operator()(const DiscreteWeighted& d) const { return d.atoms.dim(); }
        std::size_t operator()(const InverseCdf1d&) const { return 1; }
    };
    return std::visit(Visitor{}, kind_);
}

void MeasureSpec::draw(const RandomStream& stream, const Lane& lane, std::span<double> out) const {
    if (const auto* u = std::get_if<UniformCube>(&kind_)) {
        for (std::size_t c = 0; c < u->dim; ++c) {
            out[c] = stream.uniform(lane, c);
        }
    } else if (const auto* d = std::get_if<DiscreteWeighted>(&kind_)) {
        const double u01 = stream.uniform(lane, 0) * cumulative_.back();
        // First atom whose cumulative weight exceeds u; zero-weight atoms are never chosen.
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u01);
        std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
        if (k >= cumulative_.size()) {
            k = cumulative_.size() - 1;
            while (k > 0 && d->weights[k] == 0.0) {
                --k;
            }
        }
        const Point atom = d->atoms[k];
        std::copy(atom.begin(), atom.end(), out.begin());
    } else {
        const auto& inv = std::get<InverseCdf1d>(kind_);
        out[0] = inv.inverse_cdf(stream.uniform(lane, 0));
        if (!std::isfinite(out[0])) {
            throw EvaluationError("inverse CDF returned a non-finite value");
        }
    }
}

PointSet sample_measure(const MeasureSpec& measure, std::size_t count, const RandomStream& stream,
                        std::uint64_t replication, std::uint64_t stage, std::uint64_t first_index) {
    detail::require(count >= 1, "sample count must be at least 1");
    PointSet out(measure.dim());
    out.resize(count);
    parallel::for_chunks(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            measure.draw(stream, Lane{replication, stage, first_index + i}, out.mutable_point(i));
        }
    });
    return out;
}

MetricSpaceGrid measure_grid(const MeasureSpec& measure, std::size_t resolution, DistanceKind distance) {
    if (const auto* u = std::get_if<UniformCube>(&measure.kind())) {
        return build_grid(GridSpec{u->dim, resolution, QuadratureRule::gauss_legendre, distance});
    }
    if (const auto* d = std::get_if<DiscreteWeighted>(&measure.kind())) {
        return MetricSpaceGrid(d->atoms, d->weights, make_distance(distance));
    }
    const auto& inv = std::get<InverseCdf1d>(measure.kind());
    std::vector<double> nodes;
    std::vector<double> weights;
    gauss_legendre_unit(resolution, nodes, weights);
    for (double& x : nodes) {
        x = inv.inverse_cdf(x);
    }
    return MetricSpaceGrid(PointSet(1, std::move(nodes)), std::move(weights), make_distance(distance));
}

}  // namespace mcie
