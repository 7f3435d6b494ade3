#include "dpdncv/errors.hpp"
#include "dpdncv/numeric.hpp"
#include "dpdncv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dpdncv {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

CdResult weighted_lasso_cd(const Matrix& X, const Vector& y, const Vector& w,
                           const Vector& thresholds, Vector beta, int max_passes, double tol) {
    const Index n = X.rows();
    const Index p = X.cols();
    if (y.size() != n || w.size() != n) throw DimensionError("weighted lasso: row mismatch");
    if (thresholds.size() != p || beta.size() != p) {
        throw DimensionError("weighted lasso: column mismatch");
    }

    Vector d(p);
    for (Index j = 0; j < p; ++j) d[j] = (w.array() * X.col(j).array().square()).sum();

    // Thresholds below the rounding noise of x_j' w e would let roundoff
    // through as tiny nonzero coefficients.
    const double wy = std::sqrt((w.array() * y.array().square()).sum());
    Vector thr(p);
    for (Index j = 0; j < p; ++j) {
        thr[j] = std::max(thresholds[j], 64.0 * kEps * std::sqrt(std::max(d[j], 0.0)) * wy);
    }

    // we = w .* (y - X beta)
    Vector we = y;
    for (Index j = 0; j < p; ++j) {
        if (beta[j] != 0.0) we.noalias() -= beta[j] * X.col(j);
    }
    we.array() *= w.array();

    auto update = [&](Index j) -> double {
        const double old = beta[j];
        if (d[j] <= 0.0) {
            beta[j] = 0.0;
            return std::abs(old);
        }
        const auto xj = X.col(j);
        const double z = xj.dot(we) + d[j] * old;
        const double next = soft_threshold(z, thr[j]) / d[j];
        const double delta = next - old;
        if (delta != 0.0) {
            for (Index i = 0; i < n; ++i) we[i] -= delta * w[i] * xj[i];
            beta[j] = next;
        }
        return std::abs(delta);
    };

    CdResult out;
    std::vector<Index> active;
    while (out.passes < max_passes) {
        double change = 0.0;
        for (Index j = 0; j < p; ++j) change = std::max(change, update(j));
        ++out.passes;
        if (change < tol) {
            out.converged = true;
            break;
        }
        active.clear();
        for (Index j = 0; j < p; ++j) {
            if (beta[j] != 0.0) active.push_back(j);
        }
        while (out.passes < max_passes) {
            double inner = 0.0;
            for (Index j : active) inner = std::max(inner, update(j));
            ++out.passes;
            if (inner < tol) break;
        }
    }
    out.beta = std::move(beta);
    return out;
}

}  // namespace dpdncv
