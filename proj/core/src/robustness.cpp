#include "dpdncv/robustness.hpp"

#include "dpdncv/errors.hpp"
#include "dpdncv/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace dpdncv {

namespace {

constexpr double kMaxCondition = 1e12;

// Returns the smallest |eigenvalue|; throws when the condition number is too large.
double check_conditioning(const Matrix& M, const char* what) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    const Vector ev = eig.eigenvalues();
    const double lo = ev.cwiseAbs().minCoeff();
    const double hi = ev.cwiseAbs().maxCoeff();
    const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(cond < kMaxCondition)) {
        throw SingularMatrixError(std::string(what) + " is numerically singular", ev.minCoeff(), cond);
    }
    return ev.minCoeff();
}

double sign_of(double b) { return b > 0.0 ? 1.0 : (b < 0.0 ? -1.0 : 0.0); }

std::vector<Index> all_columns(Index p) {
    std::vector<Index> cols(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) cols[static_cast<std::size_t>(j)] = j;
    return cols;
}

}  // namespace

Vector IfResult::beta_full(Index p) const {
    Vector out = Vector::Zero(p);
    for (std::size_t k = 0; k < active.size(); ++k) out[active[k]] = if_beta_active[static_cast<Index>(k)];
    return out;
}

RidgePenalty::RidgePenalty(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("ridge lambda must be >= 0");
}

SmoothedFoldedPenalty::SmoothedFoldedPenalty(PenaltySpec pen, double h) : pen_(pen), h_(h) {
    if (!(h > 0.0)) throw std::invalid_argument("smoothing width must be > 0");
}

double SmoothedFoldedPenalty::first(double b) const {
    const double a = std::abs(b);
    if (a > h_) return deriv(pen_, a) * sign_of(b);
    const double phi = b * b / (2.0 * h_) + 0.5 * h_;
    return deriv(pen_, phi) * b / h_;
}

double SmoothedFoldedPenalty::second(double b) const {
    const double a = std::abs(b);
    if (a > h_) return second_deriv(pen_, a);
    const double phi = b * b / (2.0 * h_) + 0.5 * h_;
    const double dphi = b / h_;
    return second_deriv(pen_, phi) * dphi * dphi + deriv(pen_, phi) / h_;
}

Vector if_smooth(const ObjectiveContext& ctx, const ModelParams& params, const SmoothPenalty& pen,
                 const ContaminationPoint& point) {
    params.validate();
    const Index p = ctx.p();
    if (params.beta.size() != p || point.x_t.size() != p) throw DimensionError("if_smooth: length mismatch");

    const std::vector<Index> cols = all_columns(p);
    Matrix J = bordered_matrix(ctx.data().X(), sigma_matrix(ctx, params), cols) /
               static_cast<double>(ctx.n());
    for (Index j = 0; j < p; ++j) J(j, j) += pen.second(params.beta[j]);
    check_conditioning(J, "J matrix");

    const double alpha = ctx.alpha();
    const double sigma = params.sigma;
    const double pref = (1.0 + alpha) / std::pow(sigma, alpha + 1.0);
    const double r_t = (point.y_t - point.x_t.dot(params.beta)) / sigma;
    const DpdKernel& k = ctx.kernel();

    Vector rhs(p + 1);
    const double s1 = pref * k.psi1(r_t);
    for (Index j = 0; j < p; ++j) rhs[j] = s1 * point.x_t[j] + pen.first(params.beta[j]);
    rhs[p] = pref * k.psi2(r_t);
    return -J.partialPivLu().solve(rhs);
}

SparseInfluence::SparseInfluence(const ObjectiveContext& ctx, const ModelParams& params,
                                 const PenaltySpec& pen)
    : p_(ctx.p()), alpha_(ctx.alpha()), params_(params), kernel_(ctx.kernel()) {
    params.validate();
    if (params.beta.size() != p_) throw DimensionError("if_sparse: beta length does not match p");
    active_ = ActiveSet::from_beta(params.beta).active;
    const Index s = static_cast<Index>(active_.size());

    Matrix S = bordered_matrix(ctx.data().X(), sigma_matrix(ctx, params), active_) /
               static_cast<double>(ctx.n());
    pstar_.resize(s);
    for (Index k = 0; k < s; ++k) {
        const double b = params.beta[active_[static_cast<std::size_t>(k)]];
        S(k, k) += second_deriv(pen, std::abs(b));
        pstar_[k] = deriv(pen, std::abs(b)) * sign_of(b);
    }
    min_eig_ = check_conditioning(S, "S matrix");
    lu_.compute(S);
}

IfResult SparseInfluence::operator()(double y_t, const Vector& x_t) const {
    if (x_t.size() != p_) throw DimensionError("if_sparse: x_t length does not match p");
    if (!std::isfinite(y_t) || !x_t.allFinite()) throw std::invalid_argument("if_sparse: non-finite point");
    const Index s = static_cast<Index>(active_.size());
    const double sigma = params_.sigma;
    const double pref = (1.0 + alpha_) / std::pow(sigma, alpha_ + 1.0);

    double fitted = 0.0;
    for (Index j : active_) fitted += x_t[j] * params_.beta[j];
    const double r_t = (y_t - fitted) / sigma;

    Vector rhs(s + 1);
    const double s1 = pref * kernel_.psi1(r_t);
    for (Index k = 0; k < s; ++k) rhs[k] = s1 * x_t[active_[static_cast<std::size_t>(k)]] + pstar_[k];
    rhs[s] = pref * kernel_.psi2(r_t);
    const Vector sol = -lu_.solve(rhs);

    IfResult out;
    out.active = active_;
    out.if_beta_active = sol.head(s);
    out.if_sigma = sol[s];
    out.if_beta_inactive = Vector::Zero(p_ - s);
    out.norm2 = out.if_beta_active.norm();
    return out;
}

IfResult SparseInfluence::operator()(const ContaminationPoint& point) const {
    return (*this)(point.y_t, point.x_t);
}

IfResult if_sparse(const ObjectiveContext& ctx, const ModelParams& params, const PenaltySpec& pen,
                   const ContaminationPoint& point) {
    return SparseInfluence(ctx, params, pen)(point);
}

double zeta1(double alpha) {
    return std::pow(2.0 * std::numbers::pi, -0.5 * alpha) / std::sqrt(1.0 + alpha);
}

double if_normal_sigma_closed_form(double alpha, double sigma, double r_t) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    const double pole = 0.5 * (std::sqrt(13.0) - 3.0);
    if (std::abs(alpha - pole) < 1e-6) {
        throw std::domain_error(
            "closed-form sigma influence is singular where 1 - 3 alpha - alpha^2 = 0 "
            "(alpha ~ 0.302776); use the general influence function instead");
    }
    const double z = r_t / sigma;
    const double bracket =
        (1.0 - z * z) * std::exp(-0.5 * alpha * z * z) - alpha / std::pow(1.0 + alpha, 1.5);
    return sigma * std::pow(1.0 + alpha, 2.5) / (1.0 - 3.0 * alpha - alpha * alpha) * bracket;
}

SensitivityGrid SensitivityGrid::uniform(double y_radius, int ny, double x_max, int nx) {
    if (ny < 0 || nx < 0) throw std::invalid_argument("grid sizes must be >= 0");
    SensitivityGrid g;
    for (int i = 0; i < ny; ++i) {
        g.y_values.push_back(ny == 1 ? 0.0 : -y_radius + 2.0 * y_radius * i / (ny - 1));
    }
    for (int j = 0; j < nx; ++j) {
        g.x_scales.push_back(nx == 1 ? x_max : x_max * j / (nx - 1));
    }
    return g;
}

SensitivityResult sensitivity_scan(const ObjectiveContext& ctx, const ModelParams& params,
                                   const PenaltySpec& pen, const SensitivityGrid& grid, int threads) {
    if (grid.y_values.empty() || grid.x_scales.empty()) {
        throw std::invalid_argument("sensitivity_scan: empty grid, supremum undefined");
    }
    const SparseInfluence eval(ctx, params, pen);
    const Index p = ctx.p();
    Vector dir = grid.direction;
    if (dir.size() == 0) {
        dir = Vector::Zero(p);
        const auto& act = eval.active();
        for (Index j : act) dir[j] = 1.0 / static_cast<double>(act.size());
    }
    if (dir.size() != p) throw DimensionError("sensitivity_scan: direction length does not match p");

    const std::size_t nx = grid.x_scales.size();
    SensitivityResult res;
    res.rows.resize(grid.y_values.size() * nx);
    parallel_for(grid.y_values.size(), threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < nx; ++j) {
            const double y_t = grid.y_values[i];
            const double xs = grid.x_scales[j];
            const IfResult r = eval(y_t, xs * dir);
            res.rows[i * nx + j] = {y_t, xs, r.norm2, r.if_sigma};
        }
    });
    for (const auto& row : res.rows) {
        res.sup_beta = std::max(res.sup_beta, row.if_beta_norm2);
        res.sup_sigma = std::max(res.sup_sigma, std::abs(row.if_sigma));
    }
    return res;
}

void write_sensitivity_csv(std::ostream& os, const SensitivityResult& res) {
    os << "y_t,x_scale,if_beta_norm2,if_sigma\n";
    char buf[160];
    for (const auto& r : res.rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", r.y_t, r.x_scale, r.if_beta_norm2,
                      r.if_sigma);
        os << buf;
    }
}

Matrix asymptotic_covariance(const ObjectiveContext& ctx, const FitResult& fit) {
    const ModelParams& th = fit.params;
    th.validate();
    const std::vector<Index> active = ActiveSet::from_beta(th.beta).active;
    if (active.empty()) throw std::invalid_argument("asymptotic_covariance: empty active set");
    const Matrix& X = ctx.data().X();
    const Matrix bread = bordered_matrix(X, sigma_matrix(ctx, th), active);
    const Matrix meat = bordered_matrix(X, sigma_star_matrix(ctx, th), active);
    check_conditioning(bread, "bread matrix");
    const Eigen::PartialPivLU<Matrix> lu(bread);
    const Matrix left = lu.solve(meat);
    const Matrix C = lu.solve(left.transpose()).transpose();
    return 0.5 * (C + C.transpose());
}

}  // namespace dpdncv
