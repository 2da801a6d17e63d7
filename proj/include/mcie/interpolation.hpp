#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcie {

/**
 * Local Lagrange interpolation on a strictly increasing abscissa grid.
 * Each query uses order + 1 consecutive nodes, centred on the bracketing
 * interval and shifted inward at the ends.
 */
class TauInterpolator {
public:
    TauInterpolator(std::vector<double> nodes, int order);

    struct Stencil {
        std::size_t first = 0;
        std::size_t count = 0;
        double weights[16] = {};
    };

    /// Throws ValidationError for x outside [nodes.front(), nodes.back()].
    Stencil stencil(double x) const;

    /// Interpolates the column values[first_index + k * stride].
    static double apply(const Stencil& st, const double* values, std::size_t stride) noexcept {
        double acc = 0.0;
        for (std::size_t k = 0; k < st.count; ++k) {
            acc += st.weights[k] * values[(st.first + k) * stride];
        }
        return acc;
    }

    double operator()(double x, std::span<const double> column) const {
        return apply(stencil(x), column.data(), 1);
    }

    const std::vector<double>& nodes() const noexcept { return nodes_; }
    int order() const noexcept { return order_; }

private:
    std::size_t bracket(double x) const noexcept;

    std::vector<double> nodes_;
    int order_;
    std::size_t count_;
    // 1 / prod_{l != k} (x_k - x_l) for the window starting at each node, row-major by start.
    std::vector<double> inv_denominators_;
    double inv_step_ = 0.0;  // nonzero only for equispaced nodes
};

}  // namespace mcie
