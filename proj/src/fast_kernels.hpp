#pragma once

#include <cstddef>

namespace mcie::detail {

/// out[r * nc + c] = cos(t[r] * s[c]) * scale[c]. Built with vectorised libm
/// calls; results may differ from std::cos in the last few bits.
void cos_product_rows(const double* t, std::size_t nr, const double* s, const double* scale, std::size_t nc,
                      double* out) noexcept;

}  // namespace mcie::detail
