#pragma once

#include "dpdncv/objective.hpp"
#include "dpdncv/penalty.hpp"
#include "dpdncv/solver.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace dpdncv {

/// Point mass (y_t, x_t) added to the empirical distribution.
struct ContaminationPoint {
    double y_t = 0.0;
    Vector x_t;
};

struct IfResult {
    std::vector<Index> active;
    Vector if_beta_active;
    double if_sigma = 0.0;
    Vector if_beta_inactive;  ///< always exactly zero
    double norm2 = 0.0;       ///< Euclidean norm of the beta part

    /// Beta part scattered into a length-p vector.
    Vector beta_full(Index p) const;
};

/// Twice-differentiable penalty for the smooth influence function.
class SmoothPenalty {
public:
    virtual ~SmoothPenalty() = default;
    /// d/db p(b), signed.
    virtual double first(double b) const = 0;
    virtual double second(double b) const = 0;
};

/// p(b) = lambda * b^2, lambda >= 0.
class RidgePenalty final : public SmoothPenalty {
public:
    explicit RidgePenalty(double lambda);
    double first(double b) const override { return 2.0 * lambda_ * b; }
    double second(double) const override { return 2.0 * lambda_; }

private:
    double lambda_;
};

/// p_lambda(phi_h(b)) with phi_h(b) = b^2/(2h) + h/2 on [-h, h] and |b| outside.
class SmoothedFoldedPenalty final : public SmoothPenalty {
public:
    SmoothedFoldedPenalty(PenaltySpec pen, double h);
    double first(double b) const override;
    double second(double b) const override;

private:
    PenaltySpec pen_;
    double h_;
};

/// Influence function of (beta, sigma) under a smooth penalty, length p + 1
/// with sigma last. Throws SingularMatrixError past condition number 1e12.
Vector if_smooth(const ObjectiveContext& ctx, const ModelParams& params, const SmoothPenalty& pen,
                 const ContaminationPoint& point);

/// Sparse-case influence function; the bordered matrix is factored once so
/// that grids of contamination points are cheap.
class SparseInfluence {
public:
    SparseInfluence(const ObjectiveContext& ctx, const ModelParams& params, const PenaltySpec& pen);

    IfResult operator()(const ContaminationPoint& point) const;
    IfResult operator()(double y_t, const Vector& x_t) const;

    const std::vector<Index>& active() const noexcept { return active_; }
    double min_eigenvalue() const noexcept { return min_eig_; }

private:
    Index p_;
    double alpha_;
    ModelParams params_;
    std::vector<Index> active_;
    Vector pstar_;
    Eigen::PartialPivLU<Matrix> lu_;
    DpdKernel kernel_;
    double min_eig_ = 0.0;
};

IfResult if_sparse(const ObjectiveContext& ctx, const ModelParams& params, const PenaltySpec& pen,
                   const ContaminationPoint& point);

/// Closed-form sigma influence for the normal model as a function of the raw
/// residual r_t = y_t - x_t' beta. Throws near the pole 1 - 3a - a^2 = 0.
double if_normal_sigma_closed_form(double alpha, double sigma, double r_t);

/// (2 pi)^{-alpha/2} (1+alpha)^{-1/2}.
double zeta1(double alpha);

struct SensitivityGrid {
    std::vector<double> y_values;
    std::vector<double> x_scales;
    /// x_t = x_scale * direction; empty means 1/s on the active coordinates.
    Vector direction;

    /// ny points on [-y_radius, y_radius] and nx points on [0, x_max].
    static SensitivityGrid uniform(double y_radius, int ny, double x_max, int nx);
};

struct SensitivityRow {
    double y_t;
    double x_scale;
    double if_beta_norm2;
    double if_sigma;
};

struct SensitivityResult {
    std::vector<SensitivityRow> rows;  ///< y-major, x_scale inner
    double sup_beta = 0.0;
    double sup_sigma = 0.0;
};

/// Evaluates the sparse influence function over the grid and reports the
/// empirical sensitivity (grid supremum). Throws on an empty grid.
SensitivityResult sensitivity_scan(const ObjectiveContext& ctx, const ModelParams& params,
                                   const PenaltySpec& pen, const SensitivityGrid& grid,
                                   int threads = 1);

void write_sensitivity_csv(std::ostream& os, const SensitivityResult& res);

/// Bread^{-1} meat bread^{-1} on the active set with sigma last, where bread
/// and meat are X_S*' Sigma X_S* and X_S*' Sigma* X_S*.
Matrix asymptotic_covariance(const ObjectiveContext& ctx, const FitResult& fit);

}  // namespace dpdncv
