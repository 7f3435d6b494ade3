#pragma once

#include "dpdncv/solver.hpp"

#include <optional>
#include <vector>

namespace dpdncv {

struct TuningGrid {
    std::vector<double> lambdas;  ///< empty: default grid from the data
    std::vector<double> alphas;   ///< empty: the context's alpha
    bool warm_start = true;
    int n_lambda = 50;
    double lambda_min_ratio = 1e-3;

    /// Sorts lambdas descending, drops duplicates, validates positivity.
    void normalize();
};

struct TuningOptions {
    /// Fits with more nonzeros than this are treated as saturated and end the
    /// descending path. <= 0 means n / 2.
    Index max_model_size = 0;
    int threads = 1;
};

struct TuningPoint {
    double lambda = 0.0;
    double alpha = 0.0;
    double hbic = 0.0;
    std::size_t model_size = 0;
    double sigma2 = 0.0;
    double objective = 0.0;
    bool converged = false;
    bool saturated = false;
    bool skipped = false;  ///< not fitted: the path stopped above this lambda
};

struct TuningResult {
    double best_lambda = 0.0;
    std::optional<double> best_alpha;
    std::vector<TuningPoint> points;     ///< alpha-major, lambdas descending
    std::vector<TuningPoint> per_alpha;  ///< best point for each alpha
    FitResult best_fit;
    ModelParams pilot;
    double lambda_max = 0.0;
};

/// log(sigma^2) + log(log n) * log(p) / n * ||beta||_0.
double hbic(double sigma, std::size_t model_size, Index n, Index p);
double hbic(const FitResult& fit, Index n, Index p);

/// Smallest lambda at which beta = 0 minimizes the first weighted-lasso
/// surrogate built at the pilot point, divided by rho(p_lambda).
double lambda_max(const ObjectiveContext& ctx, const PenaltySpec& pen, const ModelParams& pilot);

/// n log-spaced values from lam_max down to ratio * lam_max.
std::vector<double> log_grid(double lam_max, int n, double ratio);

/// HBIC selection over a descending lambda grid at the context's alpha. Each
/// point is fitted from the pilot; with warm_start the previous unsaturated
/// solution is tried as well and the fit with the lower HBIC kept. The path
/// stops once every start at a lambda saturates. The lambda in `pen` is ignored.
TuningResult lambda_path(const ObjectiveContext& ctx, const PenaltySpec& pen, TuningGrid grid,
                         const SolverConfig& cfg, const TuningOptions& opts = {});

/// Joint (lambda, alpha) selection; one lambda_path per alpha.
TuningResult alpha_sweep(const ObjectiveContext& ctx, const PenaltySpec& pen, TuningGrid grid,
                         const SolverConfig& cfg, const TuningOptions& opts = {});

}  // namespace dpdncv
