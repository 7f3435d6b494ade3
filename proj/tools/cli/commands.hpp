#pragma once

#include "dpdncv/dpdncv.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dpdncv::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitUsage = 2 };

/// Bad flags or input; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InfluenceGridFlags {
    double y_radius = 10.0;
    int ny = 41;
    double x_max = 5.0;
    int nx = 11;
};

struct RunConfig {
    std::string subcommand;
    std::string input;      ///< data CSV
    std::string fit_input;  ///< influence: fit JSON
    std::string output;     ///< empty: stdout
    std::string trace_output;
    std::string emit_data_dir;

    double alpha = 0.2;
    bool alpha_given = false;
    std::string penalty = "scad";
    std::optional<double> scad_a;
    std::optional<double> mcp_a;
    std::optional<double> lambda;

    std::vector<double> lambda_grid;
    std::vector<double> alpha_grid;
    int n_lambda = 50;
    double lambda_min_ratio = 1e-3;
    bool warm_start = true;
    Index max_model_size = 0;

    std::string init = "ransac";
    std::uint64_t seed = 0;
    int threads = 0;
    bool strict = false;

    SimSpec sim;
    std::string format = "csv";

    InfluenceGridFlags grid;

    /// Throws UsageError on inconsistent flags.
    PenaltySpec penalty_spec(double lambda_value) const;
    SolverConfig solver_config() const;
};

nlohmann::json fit_to_json(const FitResult& fit, const Dataset& data, double alpha,
                           const PenaltySpec& pen, const SolverConfig& cfg);

/// Inverse of fit_to_json's parameter block. Throws UsageError when the JSON
/// does not describe a fit on p covariates or has an empty active set.
struct LoadedFit {
    ModelParams params;
    double alpha = 0.0;
    PenaltySpec penalty;
};
LoadedFit fit_from_json(const nlohmann::json& j, Index p);

int cmd_fit(const RunConfig& rc, std::ostream& out, std::ostream& err);
int cmd_tune(const RunConfig& rc, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& rc, std::ostream& out, std::ostream& err);
int cmd_influence(const RunConfig& rc, std::ostream& out, std::ostream& err);

/// Parses argv (program name first) and dispatches. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpdncv::cli
