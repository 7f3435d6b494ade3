#pragma once

#include <cstddef>
#include <span>

namespace dpdncv {

/// Sum with a fixed pairwise reduction tree. The result depends only on the
/// input order, never on how the work is partitioned.
double pairwise_sum(std::span<const double> values);

/// Soft-threshold operator S(z, t) = sign(z) * max(|z| - t, 0), exact zero inside.
inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace dpdncv
