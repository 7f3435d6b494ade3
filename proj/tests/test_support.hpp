#pragma once

#include "dpdncv/dpdncv.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace dpdncv::testing {

inline Matrix random_matrix(Index n, Index p, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) X(i, j) = z(rng);
    return X;
}

inline Vector random_vector(Index n, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> z(0.0, sd);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

/// y = X beta + noise_sd * N(0, 1).
inline Dataset linear_data(Index n, const Vector& beta, double noise_sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Matrix X = random_matrix(n, beta.size(), rng);
    Vector y = X * beta + random_vector(n, rng, noise_sd);
    return Dataset(std::move(y), std::move(X));
}

/// Composite Simpson on [a, b] with m (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000) {
    const double h = (b - a) / m;
    double s = f(a) + f(b);
    for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

inline double std_normal_pdf(double s) {
    return std::exp(-0.5 * s * s) / std::sqrt(2.0 * M_PI);
}

/// Central difference of f at x along coordinate k.
inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                               double h = 1e-6) {
    Vector g(x.size());
    for (Index k = 0; k < x.size(); ++k) {
        Vector a = x, b = x;
        const double step = h * std::max(1.0, std::abs(x(k)));
        a(k) += step;
        b(k) -= step;
        g(k) = (f(a) - f(b)) / (2.0 * step);
    }
    return g;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline ModelParams theta_to_params(const Vector& theta) {
    const Index p = theta.size() - 1;
    return ModelParams(theta.head(p), theta(p));
}

inline Vector params_to_theta(const ModelParams& m) {
    Vector t(m.beta.size() + 1);
    t << m.beta, m.sigma;
    return t;
}

}  // namespace dpdncv::testing
