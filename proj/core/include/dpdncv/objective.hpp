#pragma once

#include "dpdncv/error_model.hpp"
#include "dpdncv/penalty.hpp"
#include "dpdncv/types.hpp"

#include <memory>
#include <span>

namespace dpdncv {

/// Data, error model and alpha, with the per-alpha moments cached.
class ObjectiveContext {
public:
    ObjectiveContext(Dataset data, DpdConfig config,
                     std::shared_ptr<const ErrorModel> model = normal_model());
    ObjectiveContext(std::shared_ptr<const Dataset> data, DpdConfig config,
                     std::shared_ptr<const ErrorModel> model = normal_model());

    const Dataset& data() const noexcept { return *data_; }
    std::shared_ptr<const Dataset> data_ptr() const noexcept { return data_; }
    const DpdKernel& kernel() const noexcept { return kernel_; }
    const ErrorModel& model() const noexcept { return kernel_.model(); }
    double alpha() const noexcept { return config_.alpha; }
    const DpdConfig& config() const noexcept { return config_; }
    Index n() const noexcept { return data_->n(); }
    Index p() const noexcept { return data_->p(); }

    /// Same data and model at another alpha.
    ObjectiveContext with_alpha(double alpha) const;

private:
    std::shared_ptr<const Dataset> data_;
    DpdConfig config_;
    DpdKernel kernel_;
};

/// DPD loss L_n^alpha(beta, sigma), including the +1/alpha constant for
/// alpha > 0; the average negative log density at alpha = 0.
double dpd_loss(const ObjectiveContext& ctx, const ModelParams& params);

/// Same as dpd_loss, from precomputed raw residuals y - X beta.
double dpd_loss_from_residuals(const ObjectiveContext& ctx, const Vector& raw_resid,
                               double sigma);

/// dpd_loss + sum_j p_lambda(|beta_j|).
double penalized_objective(const ObjectiveContext& ctx, const ModelParams& params,
                           const PenaltySpec& pen);

/// Gradient of dpd_loss in (beta, sigma), length p + 1.
Vector gradient(const ObjectiveContext& ctx, const ModelParams& params);

/// Diagonals (length n) of the three blocks of an n-by-n block-diagonal
/// weight matrix; see bordered_matrix.
struct SigmaBlocks {
    Vector j11;
    Vector j12;
    Vector j22;
};

/// -(1+alpha)/sigma^{alpha+2} * J_ij(r_i). X*' Sigma X* equals n times the
/// Hessian of dpd_loss.
SigmaBlocks sigma_matrix(const ObjectiveContext& ctx, const ModelParams& params);

/// (1+alpha)^2/sigma^{2 alpha+2} * psi_i(r_k) psi_j(r_k); the meat of the
/// sandwich covariance.
SigmaBlocks sigma_star_matrix(const ObjectiveContext& ctx, const ModelParams& params);

/// X_S*' Sigma X_S* for the column subset S, where X_S* = blockdiag(X_S, 1_n).
/// The result is (|S|+1) x (|S|+1) with the sigma row/column last.
Matrix bordered_matrix(const Matrix& X, const SigmaBlocks& blocks, std::span<const Index> cols);

}  // namespace dpdncv
