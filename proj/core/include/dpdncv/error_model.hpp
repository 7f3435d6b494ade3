#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

namespace dpdncv {

/// Moment functionals of a standardized error density at a given alpha:
///   m_f        = int f^{1+alpha}
///   m_ij[i][j] = int s^i u(s)^j f(s)^{1+alpha} ds
///   m_star[i]  = int s^i u'(s) f(s)^{1+alpha} ds
/// for i, j in {0, 1, 2}.
struct ModelMoments {
    double m_f = 0.0;
    std::array<std::array<double, 3>, 3> m_ij{};
    std::array<double, 3> m_star{};
};

/// Standardized error density f (zero mean, unit variance) together with its
/// log-derivative u = f'/f and u'. Implementations must be immutable.
class ErrorModel {
public:
    virtual ~ErrorModel() = default;

    virtual std::string name() const = 0;
    virtual double density(double s) const = 0;
    virtual double log_density(double s) const;
    virtual double score(double s) const = 0;
    virtual double score_deriv(double s) const = 0;

    /// f(s)^alpha. Overridden where a stable closed form exists.
    virtual double density_pow(double s, double alpha) const;

    /// Exact moments when the family admits them; quadrature is used otherwise.
    virtual std::optional<ModelMoments> closed_form_moments(double alpha) const;

    virtual bool is_normal() const { return false; }
};

class NormalErrorModel final : public ErrorModel {
public:
    std::string name() const override { return "normal"; }
    double density(double s) const override;
    double log_density(double s) const override;
    double score(double s) const override { return -s; }
    double score_deriv(double) const override { return -1.0; }
    double density_pow(double s, double alpha) const override;
    std::optional<ModelMoments> closed_form_moments(double alpha) const override;
    bool is_normal() const override { return true; }
};

/// Shared immutable instance.
std::shared_ptr<const ErrorModel> normal_model();

/// Closed form when available, adaptive Gauss-Kronrod otherwise.
ModelMoments model_moments(const ErrorModel& model, double alpha);

/// Always integrates numerically on [-T, T] with f(+-T)^{1+alpha} < 1e-16.
/// Throws QuadratureError when the relative tolerance is not met.
ModelMoments quadrature_moments(const ErrorModel& model, double alpha, double rel_tol = 1e-10);

struct JTerms {
    double j11 = 0.0;
    double j12 = 0.0;
    double j22 = 0.0;
};

/// An error model bound to a fixed alpha with its moments cached. All of the
/// psi- and J-functions consumed by the objective, solver and influence code
/// go through this type.
class DpdKernel {
public:
    DpdKernel(std::shared_ptr<const ErrorModel> model, double alpha);

    double alpha() const noexcept { return alpha_; }
    const ErrorModel& model() const noexcept { return *model_; }
    std::shared_ptr<const ErrorModel> model_ptr() const noexcept { return model_; }
    const ModelMoments& moments() const noexcept { return moments_; }

    /// f^alpha(s); identically 1 at alpha = 0.
    double fpow(double s) const;
    double psi1(double s) const;
    double psi2(double s) const;
    JTerms j_terms(double s) const;

private:
    std::shared_ptr<const ErrorModel> model_;
    double alpha_;
    ModelMoments moments_;
};

// Convenience forms that compute the moments on every call.
double psi1(const ErrorModel& model, double alpha, double s);
double psi2(const ErrorModel& model, double alpha, double s);
JTerms j_terms(const ErrorModel& model, double alpha, double s);

}  // namespace dpdncv
