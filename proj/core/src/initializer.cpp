#include "dpdncv/errors.hpp"
#include "dpdncv/rng.hpp"
#include "dpdncv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace dpdncv {

namespace {

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

// 1.4826 * median |e|; residuals of a no-intercept fit are centred at zero.
double abs_median_scale(const Vector& e) {
    std::vector<double> a(static_cast<std::size_t>(e.size()));
    for (Index i = 0; i < e.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(e[i]);
    return 1.4826 * median_inplace(a);
}

double robust_start_scale(const Vector& v, double floor) {
    double s = mad_scale(v);
    if (!(s > 0.0) && v.size() > 1) {
        s = std::sqrt((v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1));
    }
    return std::max(s, floor);
}

// DPD loss over the h smallest absolute residuals at a MAD-type scale.
double trimmed_score(const ObjectiveContext& ctx, const Vector& beta, Index h, double floor) {
    const Vector e = raw_residuals(ctx.data(), beta);
    const double s = std::max(abs_median_scale(e), floor);
    std::vector<double> a(static_cast<std::size_t>(e.size()));
    for (Index i = 0; i < e.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(e[i] / s);
    std::nth_element(a.begin(), a.begin() + (h - 1), a.end());
    a.resize(static_cast<std::size_t>(h));

    const DpdKernel& k = ctx.kernel();
    const double alpha = ctx.alpha();
    double acc = 0.0;
    if (alpha == 0.0) {
        for (double r : a) acc -= k.model().log_density(r);
        return std::log(s) + acc / static_cast<double>(h);
    }
    for (double r : a) acc += k.fpow(r);
    const double scale = std::pow(s, -alpha);
    return scale * k.moments().m_f - (1.0 + alpha) / alpha * scale * acc / static_cast<double>(h) +
           1.0 / alpha;
}

struct Candidate {
    Vector beta;
    double score = std::numeric_limits<double>::infinity();
};

// Unit-weight lasso path on a row subset, each point scored on the full data.
Candidate subset_path(const ObjectiveContext& ctx, const std::vector<Index>& rows, Index h,
                      const SolverConfig& cfg) {
    const Dataset& d = ctx.data();
    const Matrix Xs = d.X()(rows, Eigen::all);
    const Vector ys = d.y()(rows);
    const Index m = Xs.rows();
    const Index p = Xs.cols();
    const Vector w = Vector::Ones(m);

    Candidate best;
    best.beta = Vector::Zero(p);
    best.score = trimmed_score(ctx, best.beta, h, cfg.sigma_floor);

    const double lam_max = (Xs.transpose() * ys).cwiseAbs().maxCoeff();
    if (!(lam_max > 0.0)) return best;

    constexpr int kPoints = 20;
    Vector beta = Vector::Zero(p);
    for (int l = 1; l < kPoints; ++l) {
        const double t = lam_max * std::pow(0.01, static_cast<double>(l) / (kPoints - 1));
        beta = weighted_lasso_cd(Xs, ys, w, Vector::Constant(p, t), beta, 200, 1e-6).beta;
        const Index nnz = (beta.array() != 0.0).count();
        if (2 * nnz > m) break;
        const double score = trimmed_score(ctx, beta, h, cfg.sigma_floor);
        if (score < best.score) {
            best.score = score;
            best.beta = beta;
        }
    }
    return best;
}

std::vector<Index> smallest_residual_rows(const ObjectiveContext& ctx, const Vector& beta, Index h) {
    const Vector e = raw_residuals(ctx.data(), beta);
    std::vector<Index> idx(static_cast<std::size_t>(e.size()));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Index a, Index b) { return std::abs(e[a]) < std::abs(e[b]); });
    idx.resize(static_cast<std::size_t>(h));
    std::sort(idx.begin(), idx.end());
    return idx;
}

ModelParams ransac_lasso(const ObjectiveContext& ctx, const SolverConfig& cfg) {
    const Index n = ctx.n();
    const Index p = ctx.p();
    const Index m = std::clamp<Index>(static_cast<Index>(std::ceil(cfg.ransac_fraction * n)),
                                      std::min<Index>(n, 3), n);
    const Index h = std::clamp<Index>(static_cast<Index>(std::ceil(cfg.ransac_trim * n)), 1, n);

    Philox4x32 rng(cfg.seed, mix_stream(cfg.seed, 0x72616e73ull));
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});

    Candidate best;
    best.beta = Vector::Zero(p);
    best.score = trimmed_score(ctx, best.beta, h, cfg.sigma_floor);

    for (int k = 0; k < cfg.ransac_starts; ++k) {
        for (Index i = 0; i < m; ++i) {
            std::uniform_int_distribution<Index> pick(i, n - 1);
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<Index> rows(perm.begin(), perm.begin() + m);
        std::sort(rows.begin(), rows.end());

        Candidate cand = subset_path(ctx, rows, h, cfg);
        for (int step = 0; step < cfg.ransac_csteps; ++step) {
            rows = smallest_residual_rows(ctx, cand.beta, h);
            Candidate refined = subset_path(ctx, rows, h, cfg);
            if (refined.score < cand.score) cand = std::move(refined);
        }
        if (cand.score < best.score) best = std::move(cand);
    }

    const Vector e = raw_residuals(ctx.data(), best.beta);
    const double s0 = std::max(abs_median_scale(e), cfg.sigma_floor);
    const double s = sigma_descent(ctx, e, s0, cfg.sigma_floor).sigma;
    return ModelParams(std::move(best.beta), s);
}

}  // namespace

double mad_scale(const Vector& v) {
    if (v.size() == 0) return 0.0;
    std::vector<double> a(v.data(), v.data() + v.size());
    const double med = median_inplace(a);
    for (Index i = 0; i < v.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(v[i] - med);
    return 1.4826 * median_inplace(a);
}

ModelParams initializer(const ObjectiveContext& ctx, const SolverConfig& cfg) {
    switch (cfg.init) {
        case InitMode::Supplied: {
            if (!cfg.supplied) throw std::invalid_argument("init=supplied without a starting point");
            if (cfg.supplied->beta.size() != ctx.p()) {
                throw DimensionError("supplied start: beta length does not match p");
            }
            ModelParams out = *cfg.supplied;
            out.validate();
            return out;
        }
        case InitMode::RansacLasso:
            return ransac_lasso(ctx, cfg);
        case InitMode::Zero:
        default:
            return ModelParams(Vector::Zero(ctx.p()), robust_start_scale(ctx.data().y(), cfg.sigma_floor));
    }
}

}  // namespace dpdncv
