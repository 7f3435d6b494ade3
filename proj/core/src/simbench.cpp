#include "dpdncv/simbench.hpp"

#include "dpdncv/errors.hpp"
#include "dpdncv/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dpdncv {

namespace {

enum Purpose : std::uint64_t { kDesign = 1, kNoise = 2, kContam = 3, kTestDesign = 4, kTestNoise = 5, kSolver = 6 };

Philox4x32 stream_for(std::uint64_t seed, int replicate, Purpose purpose) {
    return Philox4x32(seed, mix_stream(static_cast<std::uint64_t>(replicate), purpose));
}

constexpr std::array<Index, 5> kSupport{0, 1, 3, 6, 10};

}  // namespace

std::string to_string(Setting s) { return s == Setting::A ? "A" : "B"; }

std::string to_string(Contamination c) {
    switch (c) {
        case Contamination::None: return "none";
        case Contamination::YOutliers: return "y";
        case Contamination::XOutliers: return "x";
    }
    return "none";
}

std::string to_string(XOutlierMode m) { return m == XOutlierMode::Coords ? "coords" : "rows"; }

Setting parse_setting(const std::string& s) {
    if (s == "A" || s == "a") return Setting::A;
    if (s == "B" || s == "b") return Setting::B;
    throw std::invalid_argument("unknown setting '" + s + "' (expected A or B)");
}

Contamination parse_contamination(const std::string& s) {
    if (s == "none") return Contamination::None;
    if (s == "y" || s == "y_outliers") return Contamination::YOutliers;
    if (s == "x" || s == "x_outliers") return Contamination::XOutliers;
    throw std::invalid_argument("unknown contamination '" + s + "' (expected none, y or x)");
}

XOutlierMode parse_x_outlier_mode(const std::string& s) {
    if (s == "coords") return XOutlierMode::Coords;
    if (s == "rows") return XOutlierMode::Rows;
    throw std::invalid_argument("unknown x-outlier mode '" + s + "' (expected coords or rows)");
}

void SimSpec::validate() const {
    if (n < 1 || p < 1) throw std::invalid_argument("sim spec: n and p must be >= 1");
    if (!(contamination_rate >= 0.0 && contamination_rate <= 1.0)) {
        throw std::invalid_argument("sim spec: contamination rate must be in [0, 1]");
    }
    if (!(noise_sd > 0.0)) throw std::invalid_argument("sim spec: noise_sd must be > 0");
    if (replicates < 1) throw std::invalid_argument("sim spec: replicates must be >= 1");
    if (!std::isfinite(outlier_shift)) throw std::invalid_argument("sim spec: outlier shift must be finite");
}

Matrix gen_design(Index n, Index p, Philox4x32& rng) {
    if (n < 1 || p < 1) throw std::invalid_argument("gen_design: n and p must be >= 1");
    std::normal_distribution<double> z;
    const double innov = std::sqrt(0.75);
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i) {
        double prev = z(rng);
        X(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
            prev = 0.5 * prev + innov * z(rng);
            X(i, j) = prev;
        }
    }
    return X;
}

Vector gen_beta(Setting setting, Index p) {
    if (p < 11) throw std::invalid_argument("gen_beta: p must be >= 11");
    Vector b = Vector::Zero(p);
    if (setting == Setting::A) {
        for (Index j : kSupport) b[j] = static_cast<double>(j + 1);
    } else {
        const std::array<double, 5> vals{1.5, 0.5, 1.0, 1.5, 1.0};
        for (std::size_t k = 0; k < kSupport.size(); ++k) b[kSupport[k]] = vals[k];
    }
    return b;
}

Vector gen_response(const Matrix& X, const Vector& beta, double noise_sd, Philox4x32& rng) {
    if (X.cols() != beta.size()) throw DimensionError("gen_response: X and beta disagree");
    std::normal_distribution<double> z;
    Vector y = X * beta;
    for (Index i = 0; i < y.size(); ++i) y[i] += noise_sd * z(rng);
    return y;
}

Contaminated contaminate(const Vector& y, const Matrix& X, const SimSpec& spec, Philox4x32& rng) {
    if (!(spec.contamination_rate >= 0.0)) throw std::invalid_argument("contaminate: negative rate");
    if (spec.contamination_rate > 1.0) throw std::invalid_argument("contaminate: rate > 1");
    if (X.rows() != y.size()) throw DimensionError("contaminate: X and y disagree");
    Contaminated out{y, X, {}};
    if (spec.contamination == Contamination::None) return out;

    const Index n = y.size();
    const auto k = static_cast<Index>(std::floor(spec.contamination_rate * static_cast<double>(n) + 1e-9));
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
        std::uniform_int_distribution<Index> pick(i, n - 1);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    out.outliers.assign(perm.begin(), perm.begin() + k);
    std::sort(out.outliers.begin(), out.outliers.end());

    const Index cols = spec.x_mode == XOutlierMode::Rows ? X.cols() : std::min<Index>(10, X.cols());
    for (Index i : out.outliers) {
        if (spec.contamination == Contamination::YOutliers) {
            out.y[i] += spec.outlier_shift;
        } else {
            for (Index j = 0; j < cols; ++j) out.X(i, j) += spec.outlier_shift;
        }
    }
    return out;
}

MetricRow metrics(const Vector& beta_hat, double sigma_hat, const Vector& beta0, double sigma0,
                  const Matrix& X_test, const Vector& y_test) {
    if (beta_hat.size() != beta0.size() || X_test.cols() != beta0.size() || X_test.rows() != y_test.size()) {
        throw DimensionError("metrics: dimension mismatch");
    }
    const Index p = beta0.size();
    MetricRow m;
    m.msee = (beta_hat - beta0).squaredNorm() / static_cast<double>(p);
    m.rmspe = std::sqrt((y_test - X_test * beta_hat).squaredNorm());
    m.ee_sigma = std::abs(sigma_hat - sigma0);
    Index true_pos = 0, true_neg = 0, support = 0, negatives = 0, ms = 0;
    for (Index j = 0; j < p; ++j) {
        const bool truth = beta0[j] != 0.0;
        const bool est = beta_hat[j] != 0.0;
        support += truth;
        negatives += !truth;
        ms += est;
        true_pos += truth && est;
        true_neg += !truth && !est;
    }
    m.tp = support > 0 ? static_cast<double>(true_pos) / static_cast<double>(support) : 1.0;
    m.tn = negatives > 0 ? static_cast<double>(true_neg) / static_cast<double>(negatives) : 1.0;
    m.ms = static_cast<double>(ms);
    return m;
}

SimReplicate generate_replicate(const SimSpec& spec, int index) {
    spec.validate();
    const Vector beta0 = gen_beta(spec.setting, spec.p);

    Philox4x32 design_rng = stream_for(spec.seed, index, kDesign);
    Philox4x32 noise_rng = stream_for(spec.seed, index, kNoise);
    Philox4x32 contam_rng = stream_for(spec.seed, index, kContam);
    Philox4x32 test_design_rng = stream_for(spec.seed, index, kTestDesign);
    Philox4x32 test_noise_rng = stream_for(spec.seed, index, kTestNoise);

    const Matrix X = gen_design(spec.n, spec.p, design_rng);
    const Vector y = gen_response(X, beta0, spec.noise_sd, noise_rng);
    Contaminated c = contaminate(y, X, spec, contam_rng);

    Matrix X_test = gen_design(spec.n, spec.p, test_design_rng);
    Vector y_test = gen_response(X_test, beta0, spec.noise_sd, test_noise_rng);
    return SimReplicate{Dataset(std::move(c.y), std::move(c.X)), std::move(X_test), std::move(y_test), beta0,
                        std::move(c.outliers)};
}

ExperimentTable run_experiment(const SimSpec& spec, const MethodConfig& method) {
    spec.validate();
    if (method.alphas.empty()) throw std::invalid_argument("run_experiment: no alpha values");
    const std::size_t na = method.alphas.size();
    const std::size_t nr = static_cast<std::size_t>(spec.replicates);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    ExperimentTable table;
    table.per_replicate.assign(na, std::vector<MetricRow>(nr, MetricRow{nan, nan, nan, nan, nan, nan}));
    std::vector<std::string> errors(na * nr);

    parallel_for(nr, method.threads, [&](std::size_t r) {
        const SimReplicate rep = generate_replicate(spec, static_cast<int>(r));
        auto data = std::make_shared<const Dataset>(rep.train);
        SolverConfig cfg = method.solver;
        cfg.seed = mix_stream(spec.seed, mix_stream(r, kSolver));
        for (std::size_t a = 0; a < na; ++a) {
            try {
                const ObjectiveContext ctx(data, DpdConfig(method.alphas[a]));
                TuningGrid grid = method.grid;
                grid.alphas.clear();
                const TuningResult tr = lambda_path(ctx, method.penalty, grid, cfg, method.tuning);
                table.per_replicate[a][r] = metrics(tr.best_fit.params.beta, tr.best_fit.params.sigma,
                                                    rep.beta0, spec.noise_sd, rep.X_test, rep.y_test);
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "replicate " << r << ", alpha " << method.alphas[a] << ": " << e.what();
                errors[a * nr + r] = msg.str();
            }
        }
    });

    for (std::size_t a = 0; a < na; ++a) {
        TableRow row;
        row.alpha = method.alphas[a];
        for (std::size_t r = 0; r < nr; ++r) {
            const MetricRow& m = table.per_replicate[a][r];
            if (!errors[a * nr + r].empty()) {
                ++row.failures;
                table.failures.push_back(errors[a * nr + r]);
                continue;
            }
            ++row.successes;
            row.mean.msee += m.msee;
            row.mean.rmspe += m.rmspe;
            row.mean.ee_sigma += m.ee_sigma;
            row.mean.tp += m.tp;
            row.mean.tn += m.tn;
            row.mean.ms += m.ms;
        }
        if (row.successes > 0) {
            const double k = static_cast<double>(row.successes);
            row.mean.msee /= k;
            row.mean.rmspe /= k;
            row.mean.ee_sigma /= k;
            row.mean.tp /= k;
            row.mean.tn /= k;
            row.mean.ms /= k;
        } else {
            row.mean = MetricRow{nan, nan, nan, nan, nan, nan};
        }
        table.rows.push_back(row);
    }
    return table;
}

void write_table_csv(std::ostream& os, const ExperimentTable& table) {
    os << "method,alpha,msee,rmspe,ee_sigma,tp,tn,ms\n";
    char buf[256];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%s,%.4g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.method.c_str(), r.alpha,
                      r.mean.msee, r.mean.rmspe, r.mean.ee_sigma, r.mean.tp, r.mean.tn, r.mean.ms);
        os << buf;
    }
}

}  // namespace dpdncv
