#include "mcie/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcie/errors.hpp"

namespace mcie {

TauInterpolator::TauInterpolator(std::vector<double> nodes, int order) : nodes_(std::move(nodes)), order_(order) {
    detail::require(nodes_.size() >= 2, "interpolation needs at least 2 nodes");
    detail::require(order_ >= 1 && order_ <= 15, "interpolation order must be in [1, 15]");
    detail::require(static_cast<std::size_t>(order_) < nodes_.size(), "interpolation order needs order + 1 nodes");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        detail::require(nodes_[i] > nodes_[i - 1], "interpolation nodes must be strictly increasing");
    }
    const std::size_t n = nodes_.size();
    count_ = static_cast<std::size_t>(order_) + 1;
    inv_denominators_.resize((n - count_ + 1) * count_);
    for (std::size_t first = 0; first + count_ <= n; ++first) {
        for (std::size_t k = 0; k < count_; ++k) {
            double d = 1.0;
            for (std::size_t l = 0; l < count_; ++l) {
                if (l != k) {
                    d *= nodes_[first + k] - nodes_[first + l];
                }
            }
            inv_denominators_[first * count_ + k] = 1.0 / d;
        }
    }
    const double step = (nodes_.back() - nodes_.front()) / static_cast<double>(n - 1);
    bool equispaced = true;
    for (std::size_t i = 0; i < n && equispaced; ++i) {
        equispaced = std::abs(nodes_[i] - (nodes_.front() + static_cast<double>(i) * step)) <= 1e-12 * step;
    }
    if (equispaced) {
        inv_step_ = 1.0 / step;
    }
}

/// Index j with nodes[j] <= x < nodes[j + 1], clamped to [0, n - 2].
std::size_t TauInterpolator::bracket(double x) const noexcept {
    const std::size_t n = nodes_.size();
    std::size_t j;
    if (inv_step_ > 0.0) {
        j = static_cast<std::size_t>(std::max(0.0, (x - nodes_.front()) * inv_step_));
        j = std::min(j, n - 1);
        // The computed index can be off by one near a node.
        if (j > 0 && x < nodes_[j]) {
            --j;
        } else if (j + 1 < n && x >= nodes_[j + 1]) {
            ++j;
        }
    } else {
        const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
        j = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    }
    return std::min(j, n - 2);
}

TauInterpolator::Stencil TauInterpolator::stencil(double x) const {
    const std::size_t n = nodes_.size();
    const double span = nodes_.back() - nodes_.front();
    if (!(x >= nodes_.front() - 1e-14 * span && x <= nodes_.back() + 1e-14 * span)) {
        detail::fail_validation("interpolation abscissa " + std::to_string(x) + " is outside the node range");
    }
    x = std::clamp(x, nodes_.front(), nodes_.back());
    const std::size_t j = bracket(x);

    Stencil st;
    st.count = count_;
    const std::size_t back = st.count / 2 - (st.count % 2 == 0 ? 1 : 0);
    st.first = j >= back ? j - back : 0;
    st.first = std::min(st.first, n - st.count);

    // w_k = prod_{l != k} (x - x_l) / prod_{l != k} (x_k - x_l), numerators from prefix and suffix products.
    double diff[16];
    for (std::size_t k = 0; k < st.count; ++k) {
        diff[k] = x - nodes_[st.first + k];
    }
    double prefix = 1.0;
    for (std::size_t k = 0; k < st.count; ++k) {
        st.weights[k] = prefix;
        prefix *= diff[k];
    }
    double suffix = 1.0;
    const double* inv = inv_denominators_.data() + st.first * st.count;
    for (std::size_t k = st.count; k-- > 0;) {
        st.weights[k] *= suffix * inv[k];
        suffix *= diff[k];
    }
    return st;
}

}  // namespace mcie
