#pragma once

#include "dpdncv/objective.hpp"
#include "dpdncv/penalty.hpp"
#include "dpdncv/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dpdncv {

enum class InitMode { Zero, Supplied, RansacLasso };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& name);

struct SolverConfig {
    double tol = 1e-6;          ///< stop when the loss change falls below this
    double param_tol = 1e-8;    ///< ... and the max parameter change falls below this
    int max_outer_iters = 200;
    int max_cccp_iters = 10;
    int max_cd_passes = 1000;
    double cd_tol = 1e-7;
    double sigma_floor = 1e-8;

    InitMode init = InitMode::Zero;
    std::optional<ModelParams> supplied;

    // ransac_lasso initializer
    int ransac_starts = 100;
    double ransac_fraction = 0.2;
    int ransac_csteps = 2;
    double ransac_trim = 0.75;
    std::uint64_t seed = 0;

    void validate() const;
};

struct KktTolerances {
    double stationarity = 1e-4;
    double dual_margin = 0.0;
    double sigma_eq = 1e-4;
    double second_order_margin = 0.0;
};

/// First- and second-order optimality certificate for a local minimizer of
/// the penalized objective.
struct KktReport {
    double stationarity_S_norm = 0.0;     ///< max-norm of the active-set score + P*
    double dual_feasibility_margin = 0.0; ///< rho - max |inactive score| / lambda
    double sigma_eq_residual = 0.0;       ///< |sigma score|
    double second_order_margin = 0.0;     ///< Lambda_min(bordered Hessian) - local concavity
    bool stationarity_ok = false;
    bool dual_ok = false;
    bool sigma_ok = false;
    bool second_order_ok = false;
    bool satisfied = false;
};

struct FitResult {
    ModelParams params;
    ActiveSet active_set;
    double objective = 0.0;
    double loss = 0.0;
    int outer_iters = 0;
    std::vector<double> trace;       ///< penalized objective, starting at the initial point
    std::vector<double> loss_trace;  ///< dpd_loss at the same points
    KktReport kkt;
    bool converged = false;
    bool cd_warning = false;
    bool sigma_floored = false;
    bool degenerate_scale = false;
};

/// w_i = exp(-alpha r_i^2 / 2); all ones at alpha = 0.
Vector weights(const ObjectiveContext& ctx, const ModelParams& params);

/// One sigma fixed-point update with weights at the supplied (beta, sigma):
/// sigma^2 = sum w e^2 / (sum w - n alpha / (1+alpha)^{3/2}), clamped at
/// sigma_floor. Throws DegenerateScaleError when the denominator is <= 0.
double sigma_step(const ObjectiveContext& ctx, const ModelParams& params,
                  double sigma_floor = 1e-8);

struct SigmaOutcome {
    double sigma;
    bool degenerate = false;
};

/// Minimizes the loss in sigma at fixed raw residuals: a coarse log-grid scan
/// (alpha > 0) followed by safeguarded fixed-point steps. Never increases the
/// loss relative to the starting sigma.
SigmaOutcome sigma_descent(const ObjectiveContext& ctx, const Vector& raw_resid, double sigma,
                           double sigma_floor);

struct BetaStepResult {
    Vector beta;
    bool cd_converged = true;
    int cd_passes = 0;
    int cccp_iters = 0;
};

/// CCCP step in beta at fixed sigma: the concave part of the penalty is
/// linearized and the loss is majorized by its tangent bound in the squared
/// residuals, giving a weighted lasso solved by coordinate descent. The
/// penalized objective never increases.
BetaStepResult beta_step(const ObjectiveContext& ctx, const PenaltySpec& pen,
                         const ModelParams& current, const SolverConfig& cfg);

/// Alternating beta/sigma minimization of the penalized DPD objective.
FitResult fit(const ObjectiveContext& ctx, const PenaltySpec& pen, const SolverConfig& cfg);

/// Same, from an explicit starting point (ignores cfg.init).
FitResult fit_from(const ObjectiveContext& ctx, const PenaltySpec& pen, const SolverConfig& cfg,
                   ModelParams start);

KktReport kkt_check(const ObjectiveContext& ctx, const PenaltySpec& pen,
                    const ModelParams& params, const KktTolerances& tol = {});

/// Starting point per cfg.init.
ModelParams initializer(const ObjectiveContext& ctx, const SolverConfig& cfg);

/// 1.4826 * median |v - median(v)|.
double mad_scale(const Vector& v);

/// Exhaustive minimizer for small problems: every support of size
/// <= max_support is optimized by multi-start BFGS over (beta_S, log sigma).
/// Requires p <= 12. Intended as a test oracle.
FitResult oracle_minimize(const ObjectiveContext& ctx, const PenaltySpec& pen, int max_support);

struct CdResult {
    Vector beta;
    int passes = 0;
    bool converged = false;
};

/// Cyclic coordinate descent for
///   (1/2) sum_i w_i (y_i - x_i' beta)^2 + sum_j thresholds_j |beta_j|
/// with active-set cycling and exact zeros from soft-thresholding.
CdResult weighted_lasso_cd(const Matrix& X, const Vector& y, const Vector& w,
                           const Vector& thresholds, Vector beta, int max_passes, double tol);

}  // namespace dpdncv
