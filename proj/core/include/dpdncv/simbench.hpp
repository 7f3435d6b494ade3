#pragma once

#include "dpdncv/rng.hpp"
#include "dpdncv/tuning.hpp"
#include "dpdncv/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpdncv {

enum class Setting { A, B };
enum class Contamination { None, YOutliers, XOutliers };
/// Coords: shift the first min(10, p) covariates of each chosen sample.
/// Rows: shift every covariate of each chosen sample.
enum class XOutlierMode { Coords, Rows };

std::string to_string(Setting s);
std::string to_string(Contamination c);
std::string to_string(XOutlierMode m);
Setting parse_setting(const std::string& s);
Contamination parse_contamination(const std::string& s);
XOutlierMode parse_x_outlier_mode(const std::string& s);

struct SimSpec {
    Index n = 100;
    Index p = 500;
    Setting setting = Setting::A;
    Contamination contamination = Contamination::None;
    double contamination_rate = 0.10;
    double outlier_shift = 20.0;
    double noise_sd = 0.5;
    int replicates = 20;
    std::uint64_t seed = 0;
    XOutlierMode x_mode = XOutlierMode::Coords;

    void validate() const;
};

/// Rows i.i.d. N(0, Sigma) with Sigma_ij = 0.5^|i-j|.
Matrix gen_design(Index n, Index p, Philox4x32& rng);

Vector gen_beta(Setting setting, Index p);

Vector gen_response(const Matrix& X, const Vector& beta, double noise_sd, Philox4x32& rng);

struct Contaminated {
    Vector y;
    Matrix X;
    std::vector<Index> outliers;  ///< sorted
};

Contaminated contaminate(const Vector& y, const Matrix& X, const SimSpec& spec, Philox4x32& rng);

struct MetricRow {
    double msee = 0.0;
    double rmspe = 0.0;
    double ee_sigma = 0.0;
    double tp = 0.0;
    double tn = 0.0;
    double ms = 0.0;
};

MetricRow metrics(const Vector& beta_hat, double sigma_hat, const Vector& beta0, double sigma0,
                  const Matrix& X_test, const Vector& y_test);

/// One replicate's training data, clean test set and truth.
struct SimReplicate {
    Dataset train;
    Matrix X_test;
    Vector y_test;
    Vector beta0;
    std::vector<Index> outliers;
};

/// Deterministic in (spec.seed, index) alone.
SimReplicate generate_replicate(const SimSpec& spec, int index);

struct MethodConfig {
    std::vector<double> alphas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    PenaltySpec penalty = PenaltySpec::scad(1.0);
    SolverConfig solver = [] {
        SolverConfig c;
        c.init = InitMode::RansacLasso;
        return c;
    }();
    TuningGrid grid;
    TuningOptions tuning;
    int threads = 1;
};

struct TableRow {
    std::string method = "DPD-ncv";
    double alpha = 0.0;
    MetricRow mean;
    int successes = 0;
    int failures = 0;
};

struct ExperimentTable {
    std::vector<TableRow> rows;  ///< one per alpha, in input order
    /// per_replicate[a][r]; failed replicates hold NaN metrics.
    std::vector<std::vector<MetricRow>> per_replicate;
    std::vector<std::string> failures;
};

ExperimentTable run_experiment(const SimSpec& spec, const MethodConfig& method);

/// Columns: method, alpha, msee, rmspe, ee_sigma, tp, tn, ms.
void write_table_csv(std::ostream& os, const ExperimentTable& table);

}  // namespace dpdncv
