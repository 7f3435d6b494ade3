#include "dpdncv/errors.hpp"
#include "dpdncv/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpdncv {

KktReport kkt_check(const ObjectiveContext& ctx, const PenaltySpec& pen,
                    const ModelParams& params, const KktTolerances& tol) {
    params.validate();
    const Index p = ctx.p();
    if (params.beta.size() != p) throw DimensionError("kkt_check: beta length does not match p");

    const Vector g = gradient(ctx, params);
    const ActiveSet as = ActiveSet::from_beta(params.beta);
    KktReport rep;

    for (Index j : as.active) {
        const double b = params.beta[j];
        const double pstar = deriv(pen, std::abs(b)) * (b > 0.0 ? 1.0 : -1.0);
        rep.stationarity_S_norm = std::max(rep.stationarity_S_norm, std::abs(g[j] + pstar));
    }

    double worst = 0.0;
    for (Index j : as.inactive) worst = std::max(worst, std::abs(g[j]));
    rep.dual_feasibility_margin = rho(pen) - worst / pen.lambda;

    rep.sigma_eq_residual = std::abs(g[p]);

    const Matrix B = bordered_matrix(ctx.data().X(), sigma_matrix(ctx, params), as.active) /
                     static_cast<double>(ctx.n());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(B, Eigen::EigenvaluesOnly);
    Vector active_beta(static_cast<Index>(as.size()));
    for (std::size_t k = 0; k < as.size(); ++k) active_beta[static_cast<Index>(k)] = params.beta[as.active[k]];
    rep.second_order_margin = eig.eigenvalues().minCoeff() - local_concavity(pen, active_beta);

    rep.stationarity_ok = rep.stationarity_S_norm <= tol.stationarity;
    rep.dual_ok = rep.dual_feasibility_margin > tol.dual_margin;
    rep.sigma_ok = rep.sigma_eq_residual <= tol.sigma_eq;
    rep.second_order_ok = as.empty() || rep.second_order_margin > tol.second_order_margin;
    rep.satisfied = rep.stationarity_ok && rep.dual_ok && rep.sigma_ok && rep.second_order_ok;
    return rep;
}

}  // namespace dpdncv
