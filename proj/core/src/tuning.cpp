#include "dpdncv/tuning.hpp"

#include "dpdncv/errors.hpp"
#include "dpdncv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dpdncv {

void TuningGrid::normalize() {
    for (double l : lambdas) {
        if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("lambda grid values must be > 0");
    }
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
    for (double a : alphas) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("alpha grid values must be >= 0");
    }
    if (n_lambda < 1) throw std::invalid_argument("n_lambda must be >= 1");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0)) {
        throw std::invalid_argument("lambda_min_ratio must be in (0, 1]");
    }
}

double hbic(double sigma, std::size_t model_size, Index n, Index p) {
    if (n < 3) throw std::invalid_argument("hbic: n must be >= 3");
    if (p < 1) throw std::invalid_argument("hbic: p must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("hbic: sigma must be > 0");
    const double nn = static_cast<double>(n);
    return std::log(sigma * sigma) +
           std::log(std::log(nn)) * std::log(static_cast<double>(p)) / nn * static_cast<double>(model_size);
}

double hbic(const FitResult& fit, Index n, Index p) {
    return hbic(fit.params.sigma, fit.active_set.size(), n, p);
}

double lambda_max(const ObjectiveContext& ctx, const PenaltySpec& pen, const ModelParams& pilot) {
    pilot.validate();
    const Dataset& d = ctx.data();
    const double alpha = ctx.alpha();
    const double sigma = pilot.sigma;
    const Vector w = weights(ctx, pilot);
    const double c = std::pow(2.0 * std::numbers::pi, -0.5 * alpha);
    const double A = (1.0 + alpha) * c / (static_cast<double>(d.n()) * std::pow(sigma, alpha + 2.0));
    const Vector wy = w.cwiseProduct(d.y());
    const double top = (d.X().transpose() * wy).cwiseAbs().maxCoeff();
    return A * top / rho(pen);
}

std::vector<double> log_grid(double lam_max, int n, double ratio) {
    if (!(lam_max > 0.0)) throw std::invalid_argument("log_grid: lambda_max must be > 0");
    if (n == 1) return {lam_max};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = lam_max * std::pow(ratio, static_cast<double>(k) / (n - 1));
    }
    return out;
}

TuningResult lambda_path(const ObjectiveContext& ctx, const PenaltySpec& pen, TuningGrid grid,
                         const SolverConfig& cfg, const TuningOptions& opts) {
    grid.normalize();
    cfg.validate();
    const Index n = ctx.n();
    const Index p = ctx.p();
    const Index max_size = opts.max_model_size > 0 ? opts.max_model_size : std::max<Index>(1, n / 2);

    TuningResult res;
    res.pilot = initializer(ctx, cfg);
    if (grid.lambdas.empty()) {
        double lmax = lambda_max(ctx, pen, res.pilot);
        if (!(lmax > 0.0)) lmax = 1.0;
        res.lambda_max = lmax;
        grid.lambdas = log_grid(lmax, grid.n_lambda, grid.lambda_min_ratio);
    } else {
        res.lambda_max = grid.lambdas.front();
    }

    SolverConfig point_cfg = cfg;
    point_cfg.init = InitMode::Supplied;
    point_cfg.supplied = res.pilot;

    const double inf = std::numeric_limits<double>::infinity();
    std::optional<ModelParams> previous;
    bool stopped = false;
    std::size_t best_index = grid.lambdas.size();
    std::vector<std::string> failures;

    auto score = [&](const FitResult& fr) {
        if (!fr.converged || static_cast<Index>(fr.active_set.size()) > max_size) return inf;
        return hbic(fr, n, p);
    };

    for (std::size_t k = 0; k < grid.lambdas.size(); ++k) {
        TuningPoint pt;
        pt.lambda = grid.lambdas[k];
        pt.alpha = ctx.alpha();
        pt.hbic = inf;
        if (stopped) {
            pt.skipped = true;
            res.points.push_back(pt);
            continue;
        }
        const PenaltySpec pk = pen.with_lambda(pt.lambda);
        FitResult fr = fit_from(ctx, pk, point_cfg, res.pilot);
        bool all_saturated = static_cast<Index>(fr.active_set.size()) > max_size;
        if (grid.warm_start && previous) {
            FitResult warm = fit_from(ctx, pk, point_cfg, *previous);
            all_saturated = all_saturated && static_cast<Index>(warm.active_set.size()) > max_size;
            const double s_warm = score(warm);
            const double s_cold = score(fr);
            if (s_warm < s_cold || (!std::isfinite(s_cold) && !std::isfinite(s_warm) && warm.converged && !fr.converged)) {
                fr = std::move(warm);
            }
        }
        pt.model_size = fr.active_set.size();
        pt.sigma2 = fr.params.sigma * fr.params.sigma;
        pt.objective = fr.objective;
        pt.converged = fr.converged;
        pt.saturated = static_cast<Index>(pt.model_size) > max_size;
        pt.hbic = score(fr);
        if (!pt.converged) {
            std::ostringstream msg;
            msg << "lambda=" << pt.lambda << " (alpha=" << pt.alpha << ") did not converge";
            failures.push_back(msg.str());
        }
        if (all_saturated) stopped = true;
        if (!pt.saturated) previous = fr.params;

        if (std::isfinite(pt.hbic) &&
            (best_index == grid.lambdas.size() || pt.hbic < res.points[best_index].hbic)) {
            best_index = k;
            res.best_fit = std::move(fr);
        }
        res.points.push_back(pt);
    }

    if (best_index == grid.lambdas.size()) {
        std::ostringstream msg;
        msg << "no usable fit on the lambda grid";
        for (const auto& f : failures) msg << "; " << f;
        throw std::runtime_error(msg.str());
    }
    res.best_lambda = res.points[best_index].lambda;
    res.per_alpha.push_back(res.points[best_index]);
    return res;
}

TuningResult alpha_sweep(const ObjectiveContext& ctx, const PenaltySpec& pen, TuningGrid grid,
                         const SolverConfig& cfg, const TuningOptions& opts) {
    grid.normalize();
    if (grid.alphas.empty()) grid.alphas.push_back(ctx.alpha());

    std::vector<std::optional<TuningResult>> parts(grid.alphas.size());
    std::vector<std::string> errors(grid.alphas.size());
    TuningOptions inner = opts;
    inner.threads = 1;
    parallel_for(grid.alphas.size(), opts.threads, [&](std::size_t i) {
        try {
            parts[i] = lambda_path(ctx.with_alpha(grid.alphas[i]), pen, grid, cfg, inner);
        } catch (const std::runtime_error& e) {
            errors[i] = e.what();
        }
    });

    TuningResult res;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!parts[i]) {
            // keep the row count: the alpha is reported with no usable point
            TuningPoint pt;
            pt.alpha = grid.alphas[i];
            pt.hbic = std::numeric_limits<double>::infinity();
            pt.skipped = true;
            res.per_alpha.push_back(pt);
            continue;
        }
        const TuningResult& part = *parts[i];
        res.points.insert(res.points.end(), part.points.begin(), part.points.end());
        res.per_alpha.push_back(part.per_alpha.front());
        if (!best || part.per_alpha.front().hbic < parts[*best]->per_alpha.front().hbic) best = i;
    }
    if (!best) {
        std::ostringstream msg;
        msg << "no usable fit for any alpha";
        for (const auto& e : errors) {
            if (!e.empty()) msg << "; " << e;
        }
        throw std::runtime_error(msg.str());
    }
    TuningResult& chosen = *parts[*best];
    res.best_lambda = chosen.best_lambda;
    res.best_alpha = grid.alphas[*best];
    res.best_fit = std::move(chosen.best_fit);
    res.pilot = chosen.pilot;
    res.lambda_max = chosen.lambda_max;
    return res;
}

}  // namespace dpdncv
