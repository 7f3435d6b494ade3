#include "dpdncv/objective.hpp"

#include "dpdncv/errors.hpp"
#include "dpdncv/numeric.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dpdncv {

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kLeaf = 16;
    if (values.size() <= kLeaf) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ObjectiveContext::ObjectiveContext(Dataset data, DpdConfig config,
                                   std::shared_ptr<const ErrorModel> model)
    : ObjectiveContext(std::make_shared<const Dataset>(std::move(data)), config,
                       std::move(model)) {}

ObjectiveContext::ObjectiveContext(std::shared_ptr<const Dataset> data, DpdConfig config,
                                   std::shared_ptr<const ErrorModel> model)
    : data_(std::move(data)), config_(DpdConfig(config.alpha)),
      kernel_(std::move(model), config.alpha) {
    if (!data_) throw std::invalid_argument("dataset must not be null");
}

ObjectiveContext ObjectiveContext::with_alpha(double alpha) const {
    return ObjectiveContext(data_, DpdConfig(alpha), kernel_.model_ptr());
}

namespace {

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("sigma must be finite and strictly positive");
    }
}

double mean_of(std::vector<double>& terms) {
    return pairwise_sum(terms) / static_cast<double>(terms.size());
}

}  // namespace

double dpd_loss_from_residuals(const ObjectiveContext& ctx, const Vector& raw_resid,
                               double sigma) {
    require_sigma(sigma);
    if (raw_resid.size() != ctx.n()) throw DimensionError("residual length does not match n");
    const DpdKernel& k = ctx.kernel();
    const double alpha = ctx.alpha();
    std::vector<double> terms(static_cast<std::size_t>(raw_resid.size()));

    if (alpha == 0.0) {
        for (Index i = 0; i < raw_resid.size(); ++i) {
            terms[i] = -k.model().log_density(raw_resid[i] / sigma);
        }
        return std::log(sigma) + mean_of(terms);
    }

    for (Index i = 0; i < raw_resid.size(); ++i) terms[i] = k.fpow(raw_resid[i] / sigma);
    const double scale = std::pow(sigma, -alpha);
    return scale * k.moments().m_f - (1.0 + alpha) / alpha * scale * mean_of(terms) + 1.0 / alpha;
}

double dpd_loss(const ObjectiveContext& ctx, const ModelParams& params) {
    require_sigma(params.sigma);
    return dpd_loss_from_residuals(ctx, raw_residuals(ctx.data(), params.beta), params.sigma);
}

double penalized_objective(const ObjectiveContext& ctx, const ModelParams& params,
                           const PenaltySpec& pen) {
    return dpd_loss(ctx, params) + total_penalty(pen, params.beta);
}

Vector gradient(const ObjectiveContext& ctx, const ModelParams& params) {
    require_sigma(params.sigma);
    const Dataset& d = ctx.data();
    const DpdKernel& k = ctx.kernel();
    const double alpha = ctx.alpha();
    const Vector r = residuals(d, params);
    const Index n = d.n();
    const Index p = d.p();

    Vector psi1(n);
    std::vector<double> psi2(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        psi1[i] = k.psi1(r[i]);
        psi2[i] = k.psi2(r[i]);
    }
    const double pref = (1.0 + alpha) / std::pow(params.sigma, alpha + 1.0) / static_cast<double>(n);

    Vector g(p + 1);
    std::vector<double> col(static_cast<std::size_t>(n));
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) col[i] = psi1[i] * d.X()(i, j);
        g[j] = pref * pairwise_sum(col);
    }
    g[p] = pref * pairwise_sum(psi2);
    return g;
}

SigmaBlocks sigma_matrix(const ObjectiveContext& ctx, const ModelParams& params) {
    require_sigma(params.sigma);
    const DpdKernel& k = ctx.kernel();
    const double alpha = ctx.alpha();
    const Vector r = residuals(ctx.data(), params);
    const double pref = -(1.0 + alpha) / std::pow(params.sigma, alpha + 2.0);
    SigmaBlocks b{Vector(r.size()), Vector(r.size()), Vector(r.size())};
    for (Index i = 0; i < r.size(); ++i) {
        const JTerms t = k.j_terms(r[i]);
        b.j11[i] = pref * t.j11;
        b.j12[i] = pref * t.j12;
        b.j22[i] = pref * t.j22;
    }
    return b;
}

SigmaBlocks sigma_star_matrix(const ObjectiveContext& ctx, const ModelParams& params) {
    require_sigma(params.sigma);
    const DpdKernel& k = ctx.kernel();
    const double alpha = ctx.alpha();
    const Vector r = residuals(ctx.data(), params);
    const double pref = (1.0 + alpha) * (1.0 + alpha) / std::pow(params.sigma, 2.0 * alpha + 2.0);
    SigmaBlocks b{Vector(r.size()), Vector(r.size()), Vector(r.size())};
    for (Index i = 0; i < r.size(); ++i) {
        const double p1 = k.psi1(r[i]);
        const double p2 = k.psi2(r[i]);
        b.j11[i] = pref * p1 * p1;
        b.j12[i] = pref * p1 * p2;
        b.j22[i] = pref * p2 * p2;
    }
    return b;
}

Matrix bordered_matrix(const Matrix& X, const SigmaBlocks& blocks, std::span<const Index> cols) {
    const Index n = X.rows();
    if (blocks.j11.size() != n || blocks.j12.size() != n || blocks.j22.size() != n) {
        throw DimensionError("sigma blocks do not match the design row count");
    }
    const Index s = static_cast<Index>(cols.size());
    Matrix sub(n, s);
    for (Index c = 0; c < s; ++c) {
        if (cols[c] < 0 || cols[c] >= X.cols()) throw DimensionError("column index out of range");
        sub.col(c) = X.col(cols[c]);
    }
    Matrix out(s + 1, s + 1);
    out.topLeftCorner(s, s).noalias() = sub.transpose() * blocks.j11.asDiagonal() * sub;
    const Vector cross = sub.transpose() * blocks.j12;
    out.topRightCorner(s, 1) = cross;
    out.bottomLeftCorner(1, s) = cross.transpose();
    out(s, s) = blocks.j22.sum();
    return out;
}

}  // namespace dpdncv
