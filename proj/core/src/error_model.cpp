#include "dpdncv/error_model.hpp"

#include "dpdncv/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpdncv {

namespace {

constexpr double kResidualClamp = 1e8;

double clamp_residual(double s) {
    return std::fmax(-kResidualClamp, std::fmin(kResidualClamp, s));
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be finite and >= 0");
    }
}

// A non-owning shared_ptr for the convenience wrappers.
std::shared_ptr<const ErrorModel> borrow(const ErrorModel& model) {
    return std::shared_ptr<const ErrorModel>(&model, [](const ErrorModel*) {});
}

}  // namespace

double ErrorModel::log_density(double s) const { return std::log(density(s)); }

double ErrorModel::density_pow(double s, double alpha) const {
    if (alpha == 0.0) return 1.0;
    return std::exp(alpha * log_density(s));
}

std::optional<ModelMoments> ErrorModel::closed_form_moments(double) const { return std::nullopt; }

double NormalErrorModel::density(double s) const {
    s = clamp_residual(s);
    return std::exp(-0.5 * s * s) / std::sqrt(2.0 * std::numbers::pi);
}

double NormalErrorModel::log_density(double s) const {
    s = clamp_residual(s);
    return -0.5 * s * s - 0.5 * std::log(2.0 * std::numbers::pi);
}

double NormalErrorModel::density_pow(double s, double alpha) const {
    if (alpha == 0.0) return 1.0;
    s = clamp_residual(s);
    return std::pow(2.0 * std::numbers::pi, -0.5 * alpha) * std::exp(-0.5 * alpha * s * s);
}

std::optional<ModelMoments> NormalErrorModel::closed_form_moments(double alpha) const {
    check_alpha(alpha);
    // int s^k phi^{1+a} = M_f * E[Z^k] / (1+a)^{k/2}, with u(s) = -s and u' = -1.
    const double a1 = 1.0 + alpha;
    const double m_f = std::pow(2.0 * std::numbers::pi, -0.5 * alpha) / std::sqrt(a1);
    auto raw = [&](int k) {
        static constexpr double gauss_moment[5] = {1.0, 0.0, 1.0, 0.0, 3.0};
        return m_f * gauss_moment[k] / std::pow(a1, 0.5 * k);
    };
    ModelMoments m;
    m.m_f = m_f;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m.m_ij[i][j] = ((j % 2 == 0) ? 1.0 : -1.0) * raw(i + j);
        }
        m.m_star[i] = -raw(i);
    }
    return m;
}

std::shared_ptr<const ErrorModel> normal_model() {
    static const auto instance = std::make_shared<const NormalErrorModel>();
    return instance;
}

ModelMoments quadrature_moments(const ErrorModel& model, double alpha, double rel_tol) {
    check_alpha(alpha);
    const double a1 = 1.0 + alpha;
    double tail = 1.0;
    while (tail < 1e4 && (std::exp(a1 * model.log_density(tail)) >= 1e-16 ||
                          std::exp(a1 * model.log_density(-tail)) >= 1e-16)) {
        tail *= 1.5;
    }

    auto integrate = [&](auto&& g) {
        double error = 0.0;
        double l1 = 0.0;
        const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            g, -tail, tail, 20, rel_tol * 1e-2, &error, &l1);
        if (error > rel_tol * std::fmax(l1, 1e-300)) {
            throw QuadratureError("moment quadrature did not reach relative tolerance; achieved " +
                                      std::to_string(error / std::fmax(l1, 1e-300)),
                                  error / std::fmax(l1, 1e-300));
        }
        return value;
    };

    auto weight = [&](double s) { return std::exp(a1 * model.log_density(s)); };

    ModelMoments m;
    m.m_f = integrate([&](double s) { return weight(s); });
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m.m_ij[i][j] = integrate([&](double s) {
                return std::pow(s, i) * std::pow(model.score(s), j) * weight(s);
            });
        }
        m.m_star[i] = integrate(
            [&](double s) { return std::pow(s, i) * model.score_deriv(s) * weight(s); });
    }
    return m;
}

ModelMoments model_moments(const ErrorModel& model, double alpha) {
    check_alpha(alpha);
    if (auto closed = model.closed_form_moments(alpha)) return *closed;
    return quadrature_moments(model, alpha);
}

DpdKernel::DpdKernel(std::shared_ptr<const ErrorModel> model, double alpha)
    : model_(std::move(model)), alpha_(alpha) {
    if (!model_) throw std::invalid_argument("error model must not be null");
    check_alpha(alpha_);
    moments_ = model_moments(*model_, alpha_);
}

double DpdKernel::fpow(double s) const { return model_->density_pow(s, alpha_); }

double DpdKernel::psi1(double s) const { return model_->score(s) * fpow(s); }

double DpdKernel::psi2(double s) const {
    const double correction = alpha_ == 0.0 ? 0.0 : alpha_ / (alpha_ + 1.0) * moments_.m_f;
    return (s * model_->score(s) + 1.0) * fpow(s) - correction;
}

JTerms DpdKernel::j_terms(double s) const {
    const double u = model_->score(s);
    const double du = model_->score_deriv(s);
    const double fa = fpow(s);
    const double a = alpha_;
    JTerms t;
    t.j11 = (a * u * u + du) * fa;
    t.j12 = ((1.0 + a) * u + a * s * u * u + s * du) * fa;
    t.j22 = (a == 0.0 ? 0.0 : -a * moments_.m_f) +
            ((1.0 + a) * (1.0 + 2.0 * s * u) + a * s * s * u * u + s * s * du) * fa;
    return t;
}

double psi1(const ErrorModel& model, double alpha, double s) {
    check_alpha(alpha);
    return model.score(s) * model.density_pow(s, alpha);
}

double psi2(const ErrorModel& model, double alpha, double s) {
    return DpdKernel(borrow(model), alpha).psi2(s);
}

JTerms j_terms(const ErrorModel& model, double alpha, double s) {
    return DpdKernel(borrow(model), alpha).j_terms(s);
}

}  // namespace dpdncv
