#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace dpdncv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Response y (length n) and fixed design X (n x p).
class Dataset {
public:
    Dataset(Vector y, Matrix X, std::vector<std::string> names = {});

    const Vector& y() const noexcept { return y_; }
    const Matrix& X() const noexcept { return X_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    Index n() const noexcept { return y_.size(); }
    Index p() const noexcept { return X_.cols(); }

private:
    Vector y_;
    Matrix X_;
    std::vector<std::string> names_;
};

/// theta = (beta, sigma).
struct ModelParams {
    Vector beta;
    double sigma = 1.0;

    ModelParams() = default;
    ModelParams(Vector b, double s);

    /// Throws std::invalid_argument on non-finite beta or sigma <= 0.
    void validate() const;
};

struct DpdConfig {
    double alpha = 0.0;

    DpdConfig() = default;
    explicit DpdConfig(double a);

    /// alpha == 0 is the likelihood limit, handled by a dedicated branch.
    bool is_likelihood() const noexcept { return alpha == 0.0; }
};

/// Nonzero support S of a coefficient vector and its complement N.
struct ActiveSet {
    std::vector<Index> active;
    std::vector<Index> inactive;

    static ActiveSet from_beta(const Vector& beta);
    std::size_t size() const noexcept { return active.size(); }
    bool empty() const noexcept { return active.empty(); }
};

/// r_i = (y_i - x_i' beta) / sigma.
Vector residuals(const Dataset& data, const ModelParams& params);

/// Raw residuals y - X beta, skipping zero coefficients.
Vector raw_residuals(const Dataset& data, const Vector& beta);

}  // namespace dpdncv
