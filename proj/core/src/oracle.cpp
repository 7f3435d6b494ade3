#include "dpdncv/errors.hpp"
#include "dpdncv/solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace dpdncv {

namespace {

// Penalized objective restricted to a support, in z = (beta_S, log sigma).
class SupportProblem {
public:
    SupportProblem(const ObjectiveContext& ctx, const PenaltySpec& pen, std::vector<Index> support)
        : ctx_(ctx), pen_(pen), support_(std::move(support)) {}

    Index dim() const { return static_cast<Index>(support_.size()) + 1; }

    ModelParams params(const Vector& z) const {
        Vector beta = Vector::Zero(ctx_.p());
        for (std::size_t k = 0; k < support_.size(); ++k) beta[support_[k]] = z[static_cast<Index>(k)];
        return ModelParams(std::move(beta), std::exp(z[dim() - 1]));
    }

    double value(const Vector& z) const {
        const double ls = z[dim() - 1];
        if (!std::isfinite(ls) || ls < -30.0 || ls > 30.0) return std::numeric_limits<double>::infinity();
        return penalized_objective(ctx_, params(z), pen_);
    }

    Vector grad(const Vector& z) const {
        const ModelParams th = params(z);
        const Vector g = gradient(ctx_, th);
        Vector out(dim());
        for (std::size_t k = 0; k < support_.size(); ++k) {
            const double b = z[static_cast<Index>(k)];
            const double sgn = b > 0.0 ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
            out[static_cast<Index>(k)] = g[support_[k]] + sgn * deriv(pen_, std::abs(b));
        }
        out[dim() - 1] = th.sigma * g[ctx_.p()];
        return out;
    }

private:
    const ObjectiveContext& ctx_;
    const PenaltySpec& pen_;
    std::vector<Index> support_;
};

double bfgs(const SupportProblem& prob, Vector& z) {
    const Index d = prob.dim();
    Matrix H = Matrix::Identity(d, d);
    double f = prob.value(z);
    Vector g = prob.grad(z);
    for (int it = 0; it < 1000; ++it) {
        if (g.cwiseAbs().maxCoeff() < 1e-11) break;
        Vector dir = -H * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            H.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }
        double t = 1.0;
        Vector zn;
        double fn = f;
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            zn = z + t * dir;
            fn = prob.value(zn);
            if (fn <= f + 1e-4 * t * slope) {
                ok = true;
                break;
            }
        }
        if (!ok) break;
        const Vector gn = prob.grad(zn);
        const Vector s = zn - z;
        const Vector y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Matrix I = Matrix::Identity(d, d);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
                rho * s * s.transpose();
        }
        const double df = f - fn;
        z = zn;
        f = fn;
        g = gn;
        if (df <= 1e-15 * (1.0 + std::abs(f)) && s.cwiseAbs().maxCoeff() < 1e-12) break;
    }
    return f;
}

void for_each_support(Index p, Index max_size, std::vector<Index>& cur, Index next,
                      const auto& visit) {
    visit(cur);
    if (static_cast<Index>(cur.size()) == max_size) return;
    for (Index j = next; j < p; ++j) {
        cur.push_back(j);
        for_each_support(p, max_size, cur, j + 1, visit);
        cur.pop_back();
    }
}

}  // namespace

FitResult oracle_minimize(const ObjectiveContext& ctx, const PenaltySpec& pen, int max_support) {
    const Index p = ctx.p();
    const Index n = ctx.n();
    if (p > 12) throw DimensionError("oracle_minimize: instance too large (p > 12)");
    if (max_support < 0 || max_support > 10) {
        throw DimensionError("oracle_minimize: max_support must be in [0, 10]");
    }
    const Dataset& data = ctx.data();
    const double y_scale = std::max(mad_scale(data.y()), 1e-8);

    double best_f = std::numeric_limits<double>::infinity();
    ModelParams best;
    std::size_t best_size = 0;

    std::vector<Index> cur;
    for_each_support(p, std::min<Index>(max_support, p), cur, 0, [&](const std::vector<Index>& S) {
        const Index s = static_cast<Index>(S.size());
        SupportProblem prob(ctx, pen, S);

        std::vector<Vector> starts;
        Vector ols = Vector::Zero(s);
        double ols_scale = y_scale;
        if (s > 0 && s < n) {
            const Matrix XS = data.X()(Eigen::all, S);
            ols = XS.colPivHouseholderQr().solve(data.y());
            const double rss = (data.y() - XS * ols).squaredNorm();
            if (rss > 0.0) ols_scale = std::sqrt(rss / static_cast<double>(n));
        }
        for (double mult : {1.0, 0.5, 2.0}) {
            Vector z(s + 1);
            z.head(s) = ols;
            z[s] = std::log(ols_scale * mult);
            starts.push_back(z);
        }
        Vector zero(s + 1);
        zero.head(s).setZero();
        zero[s] = std::log(y_scale);
        starts.push_back(zero);

        for (Vector z : starts) {
            const double f = bfgs(prob, z);
            const ModelParams th = prob.params(z);
            const double q = penalized_objective(ctx, th, pen);
            (void)f;
            const bool better = q < best_f - 1e-12 ||
                                (std::abs(q - best_f) <= 1e-12 && S.size() < best_size);
            if (better) {
                best_f = q;
                best = th;
                best_size = S.size();
            }
        }
    });

    FitResult res;
    res.params = best;
    res.active_set = ActiveSet::from_beta(best.beta);
    res.objective = best_f;
    res.loss = dpd_loss(ctx, best);
    res.trace = {best_f};
    res.loss_trace = {res.loss};
    res.converged = true;
    res.kkt = kkt_check(ctx, pen, best);
    return res;
}

}  // namespace dpdncv
