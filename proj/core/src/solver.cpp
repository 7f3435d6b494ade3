#include "dpdncv/solver.hpp"

#include "dpdncv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpdncv {

std::string to_string(InitMode mode) {
    switch (mode) {
        case InitMode::Zero: return "zero";
        case InitMode::Supplied: return "supplied";
        case InitMode::RansacLasso: return "ransac_lasso";
    }
    return "unknown";
}

InitMode parse_init_mode(const std::string& name) {
    if (name == "zero") return InitMode::Zero;
    if (name == "supplied") return InitMode::Supplied;
    if (name == "ransac_lasso" || name == "ransac") return InitMode::RansacLasso;
    throw std::invalid_argument("unknown init mode: " + name);
}

void SolverConfig::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("solver config: ") + what + " must be > 0");
        }
    };
    positive(tol, "tol");
    positive(param_tol, "param_tol");
    positive(cd_tol, "cd_tol");
    positive(sigma_floor, "sigma_floor");
    if (max_outer_iters < 1 || max_cccp_iters < 1 || max_cd_passes < 1) {
        throw std::invalid_argument("solver config: iteration caps must be >= 1");
    }
    if (init == InitMode::Supplied && !supplied) {
        throw std::invalid_argument("solver config: init=supplied without a starting point");
    }
    if (ransac_starts < 1) throw std::invalid_argument("solver config: ransac_starts must be >= 1");
    if (!(ransac_fraction > 0.0 && ransac_fraction <= 1.0)) {
        throw std::invalid_argument("solver config: ransac_fraction must be in (0, 1]");
    }
    if (!(ransac_trim > 0.0 && ransac_trim <= 1.0)) {
        throw std::invalid_argument("solver config: ransac_trim must be in (0, 1]");
    }
    if (ransac_csteps < 0) throw std::invalid_argument("solver config: ransac_csteps must be >= 0");
}

namespace {

void require_normal(const ObjectiveContext& ctx) {
    if (!ctx.model().is_normal()) {
        throw std::invalid_argument("solver supports the normal error model only");
    }
}

Vector weights_from_residuals(const Vector& e, double sigma, double alpha) {
    if (alpha == 0.0) return Vector::Ones(e.size());
    Vector w(e.size());
    for (Index i = 0; i < e.size(); ++i) {
        const double r = std::min(std::abs(e[i] / sigma), 1e8);
        w[i] = std::exp(-0.5 * alpha * r * r);
    }
    return w;
}

double sigma_step_from_residuals(const Vector& e, double sigma, double alpha, double floor) {
    const Vector w = weights_from_residuals(e, sigma, alpha);
    const double n = static_cast<double>(e.size());
    const double num = (w.array() * e.array().square()).sum();
    const double den = w.sum() - n * alpha / std::pow(1.0 + alpha, 1.5);
    if (!(den > 0.0)) {
        throw DegenerateScaleError("sigma update: non-positive denominator (all mass outlying)");
    }
    return std::max(std::sqrt(num / den), floor);
}

// Iterates the fixed-point map, backtracking in log(sigma) so the loss never
// increases.
}  // namespace

SigmaOutcome sigma_descent(const ObjectiveContext& ctx, const Vector& e, double sigma,
                           double floor) {
    SigmaOutcome out{sigma};
    double current = dpd_loss_from_residuals(ctx, e, sigma);

    // The loss in sigma can have a spurious small-scale minimum once beta has
    // moved far from the data; a coarse log-grid scan finds the right basin.
    if (ctx.alpha() > 0.0 && e.size() > 0) {
        const double rms = std::sqrt(e.squaredNorm() / static_cast<double>(e.size()));
        const double hi = 4.0 * std::max(sigma, rms);
        const double lo = std::max(floor, 1e-4 * hi);
        constexpr int kGrid = 64;
        for (int g = 0; g < kGrid; ++g) {
            const double s = lo * std::pow(hi / lo, static_cast<double>(g) / (kGrid - 1));
            const double v = dpd_loss_from_residuals(ctx, e, s);
            if (v < current) {
                current = v;
                out.sigma = s;
            }
        }
    }
    for (int it = 0; it < 500; ++it) {
        double proposal;
        try {
            proposal = sigma_step_from_residuals(e, out.sigma, ctx.alpha(), floor);
        } catch (const DegenerateScaleError&) {
            out.degenerate = true;
            break;
        }
        if (proposal == out.sigma) break;
        const double log_step = std::log(proposal / out.sigma);
        double t = 1.0;
        bool accepted = false;
        double cand = out.sigma;
        double cand_loss = current;
        for (int h = 0; h <= 30; ++h, t *= 0.5) {
            cand = std::max(out.sigma * std::exp(t * log_step), floor);
            cand_loss = dpd_loss_from_residuals(ctx, e, cand);
            if (cand_loss <= current) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        const double rel = std::abs(cand - out.sigma) / out.sigma;
        out.sigma = cand;
        current = cand_loss;
        if (rel < 1e-13) break;
    }
    return out;
}

namespace {

double objective_at(const ObjectiveContext& ctx, const PenaltySpec& pen, const Vector& e,
                    double sigma, const Vector& beta) {
    return dpd_loss_from_residuals(ctx, e, sigma) + total_penalty(pen, beta);
}

}  // namespace

Vector weights(const ObjectiveContext& ctx, const ModelParams& params) {
    params.validate();
    return weights_from_residuals(raw_residuals(ctx.data(), params.beta), params.sigma,
                                  ctx.alpha());
}

double sigma_step(const ObjectiveContext& ctx, const ModelParams& params, double sigma_floor) {
    params.validate();
    return sigma_step_from_residuals(raw_residuals(ctx.data(), params.beta), params.sigma,
                                     ctx.alpha(), sigma_floor);
}

BetaStepResult beta_step(const ObjectiveContext& ctx, const PenaltySpec& pen,
                         const ModelParams& current, const SolverConfig& cfg) {
    require_normal(ctx);
    current.validate();
    const Dataset& d = ctx.data();
    const Index p = d.p();
    if (current.beta.size() != p) throw DimensionError("beta_step: beta length does not match p");

    const double alpha = ctx.alpha();
    const double sigma = current.sigma;
    const double c = std::pow(2.0 * std::numbers::pi, -0.5 * alpha);
    const double A = (1.0 + alpha) * c / (static_cast<double>(d.n()) * std::pow(sigma, alpha + 2.0));
    const double lambda0 = deriv_at_zero_plus(pen);

    BetaStepResult out;
    Vector beta = current.beta;
    Vector e = raw_residuals(d, beta);
    double q = objective_at(ctx, pen, e, sigma, beta);

    Vector thresholds(p);
    for (int it = 0; it < cfg.max_cccp_iters; ++it) {
        const Vector w = weights_from_residuals(e, sigma, alpha);
        for (Index j = 0; j < p; ++j) {
            const double slope = beta[j] == 0.0 ? lambda0 : deriv(pen, std::abs(beta[j]));
            thresholds[j] = slope / A;
        }
        CdResult cd = weighted_lasso_cd(d.X(), d.y(), w, thresholds, beta, cfg.max_cd_passes,
                                        cfg.cd_tol);
        out.cd_passes += cd.passes;
        out.cd_converged = out.cd_converged && cd.converged;
        ++out.cccp_iters;

        Vector cand = std::move(cd.beta);
        Vector e_cand = raw_residuals(d, cand);
        double q_cand = objective_at(ctx, pen, e_cand, sigma, cand);
        bool accepted = q_cand <= q;
        if (!accepted) {
            const Vector dir = cand - beta;
            double t = 1.0;
            for (int h = 0; h < 30 && !accepted; ++h) {
                t *= 0.5;
                cand = beta + t * dir;
                for (Index j = 0; j < p; ++j) {
                    if (dir[j] != 0.0 && std::abs(cand[j]) < 1e-300) cand[j] = 0.0;
                }
                e_cand = raw_residuals(d, cand);
                q_cand = objective_at(ctx, pen, e_cand, sigma, cand);
                accepted = q_cand <= q;
            }
        }
        if (!accepted) break;
        const double change = (cand - beta).cwiseAbs().maxCoeff();
        beta = std::move(cand);
        e = std::move(e_cand);
        q = q_cand;
        if (change < cfg.cd_tol) break;
    }
    out.beta = std::move(beta);
    return out;
}

FitResult fit_from(const ObjectiveContext& ctx, const PenaltySpec& pen, const SolverConfig& cfg,
                   ModelParams start) {
    require_normal(ctx);
    cfg.validate();
    const Dataset& d = ctx.data();
    if (start.beta.size() != d.p()) throw DimensionError("fit: start beta length does not match p");
    start.sigma = std::max(start.sigma, cfg.sigma_floor);
    start.validate();

    FitResult res;
    Vector beta = std::move(start.beta);
    double sigma = start.sigma;
    Vector e = raw_residuals(d, beta);
    double loss = dpd_loss_from_residuals(ctx, e, sigma);
    double q = loss + total_penalty(pen, beta);
    res.trace.push_back(q);
    res.loss_trace.push_back(loss);

    for (int k = 1; k <= cfg.max_outer_iters; ++k) {
        BetaStepResult bs = beta_step(ctx, pen, ModelParams(beta, sigma), cfg);
        res.cd_warning = res.cd_warning || !bs.cd_converged;
        Vector e_new = raw_residuals(d, bs.beta);
        const SigmaOutcome so = sigma_descent(ctx, e_new, sigma, cfg.sigma_floor);
        res.degenerate_scale = res.degenerate_scale || so.degenerate;

        const double loss_new = dpd_loss_from_residuals(ctx, e_new, so.sigma);
        const double q_new = loss_new + total_penalty(pen, bs.beta);
        double change = std::abs(so.sigma - sigma);
        if (beta.size() > 0) change = std::max(change, (bs.beta - beta).cwiseAbs().maxCoeff());
        const double scale = 1.0 + std::max(sigma, beta.size() > 0 ? beta.cwiseAbs().maxCoeff() : 0.0);

        const double loss_change = std::abs(loss_new - loss);
        beta = std::move(bs.beta);
        sigma = so.sigma;
        e = std::move(e_new);
        loss = loss_new;
        q = q_new;
        res.trace.push_back(q);
        res.loss_trace.push_back(loss);
        res.outer_iters = k;
        if (loss_change < cfg.tol && change < cfg.param_tol * scale) {
            res.converged = true;
            break;
        }
    }

    res.sigma_floored = sigma <= cfg.sigma_floor;
    res.params = ModelParams(std::move(beta), sigma);
    res.active_set = ActiveSet::from_beta(res.params.beta);
    res.loss = loss;
    res.objective = q;
    res.kkt = kkt_check(ctx, pen, res.params);
    return res;
}

FitResult fit(const ObjectiveContext& ctx, const PenaltySpec& pen, const SolverConfig& cfg) {
    cfg.validate();
    return fit_from(ctx, pen, cfg, initializer(ctx, cfg));
}

}  // namespace dpdncv
