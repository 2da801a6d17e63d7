#include "fast_kernels.hpp"

#include <cmath>

namespace mcie::detail {

void cos_product_rows(const double* t, std::size_t nr, const double* s, const double* scale, std::size_t nc,
                      double* out) noexcept {
    for (std::size_t r = 0; r < nr; ++r) {
        const double tr = t[r];
        double* row = out + r * nc;
        for (std::size_t c = 0; c < nc; ++c) {
            row[c] = std::cos(tr * s[c]) * scale[c];
        }
    }
}

}  // namespace mcie::detail
