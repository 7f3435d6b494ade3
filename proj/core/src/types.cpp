#include "dpdncv/types.hpp"

#include "dpdncv/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace dpdncv {

Dataset::Dataset(Vector y, Matrix X, std::vector<std::string> names)
    : y_(std::move(y)), X_(std::move(X)), names_(std::move(names)) {
    if (y_.size() < 1 || X_.cols() < 1) {
        throw DimensionError("dataset needs n >= 1 and p >= 1");
    }
    if (X_.rows() != y_.size()) {
        throw DimensionError("design has " + std::to_string(X_.rows()) + " rows but y has " +
                             std::to_string(y_.size()) + " entries");
    }
    if (!y_.allFinite()) throw std::invalid_argument("response contains non-finite values");
    if (!X_.allFinite()) throw std::invalid_argument("design contains non-finite values");
    if (!names_.empty() && static_cast<Index>(names_.size()) != X_.cols()) {
        throw DimensionError("column name count does not match p");
    }
}

ModelParams::ModelParams(Vector b, double s) : beta(std::move(b)), sigma(s) { validate(); }

void ModelParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("sigma must be finite and strictly positive");
    }
    if (!beta.allFinite()) throw std::invalid_argument("beta contains non-finite values");
}

DpdConfig::DpdConfig(double a) : alpha(a) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be finite and >= 0");
    }
}

ActiveSet ActiveSet::from_beta(const Vector& beta) {
    ActiveSet s;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) {
            s.active.push_back(j);
        } else {
            s.inactive.push_back(j);
        }
    }
    return s;
}

Vector raw_residuals(const Dataset& data, const Vector& beta) {
    if (beta.size() != data.p()) {
        throw DimensionError("beta has length " + std::to_string(beta.size()) + ", expected " +
                             std::to_string(data.p()));
    }
    Vector e = data.y();
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) e.noalias() -= beta[j] * data.X().col(j);
    }
    return e;
}

Vector residuals(const Dataset& data, const ModelParams& params) {
    if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be strictly positive");
    return raw_residuals(data, params.beta) / params.sigma;
}

}  // namespace dpdncv
