#include "cli/commands.hpp"

#include "cli/csv.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dpdncv::cli {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// Writes to --out when given, else to the stream.
template <class Fn>
void emit(const RunConfig& rc, std::ostream& out, Fn&& write) {
    if (rc.output.empty()) {
        write(out);
        return;
    }
    std::ofstream f(rc.output, std::ios::binary);
    if (!f) throw UsageError("cannot open output file: " + rc.output);
    write(f);
    if (!f) throw std::runtime_error("failed writing " + rc.output);
}

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

Dataset load_input(const RunConfig& rc) {
    if (rc.input.empty()) throw UsageError(rc.subcommand + ": missing input CSV");
    if (!std::filesystem::exists(rc.input)) throw UsageError("input file not found: " + rc.input);
    return read_dataset_file(rc.input);
}

json kkt_to_json(const KktReport& k) {
    return {{"stationarity", k.stationarity_S_norm},
            {"dual_margin", k.dual_feasibility_margin},
            {"sigma_residual", k.sigma_eq_residual},
            {"second_order_margin", k.second_order_margin},
            {"stationarity_ok", k.stationarity_ok},
            {"dual_ok", k.dual_ok},
            {"sigma_ok", k.sigma_ok},
            {"second_order_ok", k.second_order_ok},
            {"satisfied", k.satisfied}};
}

json penalty_to_json(const PenaltySpec& pen) {
    return {{"family", to_string(pen.family)}, {"lambda", pen.lambda}, {"a", pen.a}};
}

TuningGrid make_grid(const RunConfig& rc) {
    TuningGrid g;
    g.lambdas = rc.lambda_grid;
    g.alphas = rc.alpha_grid;
    g.n_lambda = rc.n_lambda;
    g.lambda_min_ratio = rc.lambda_min_ratio;
    g.warm_start = rc.warm_start;
    return g;
}

void warn_unconverged(std::ostream& err, const FitResult& fit) {
    if (!fit.converged)
        err << "warning: solver stopped after " << fit.outer_iters
            << " iterations without converging\n";
}

}  // namespace

PenaltySpec RunConfig::penalty_spec(double lambda_value) const {
    const PenaltyFamily fam = parse_penalty_family(penalty);
    if (scad_a && fam != PenaltyFamily::SCAD) throw UsageError("--scad-a requires --penalty scad");
    if (mcp_a && fam != PenaltyFamily::MCP) throw UsageError("--mcp-a requires --penalty mcp");
    switch (fam) {
        case PenaltyFamily::SCAD: return PenaltySpec::scad(lambda_value, scad_a.value_or(kDefaultScadA));
        case PenaltyFamily::MCP: return PenaltySpec::mcp(lambda_value, mcp_a.value_or(kDefaultMcpA));
        case PenaltyFamily::L1: break;
    }
    return PenaltySpec::l1(lambda_value);
}

SolverConfig RunConfig::solver_config() const {
    SolverConfig c;
    c.init = parse_init_mode(init);
    if (c.init == InitMode::Supplied) throw UsageError("--init supplied is not available from the command line");
    c.seed = seed;
    c.validate();
    return c;
}

json fit_to_json(const FitResult& fit, const Dataset& data, double alpha, const PenaltySpec& pen,
                 const SolverConfig& cfg) {
    json beta = json::array();
    for (Index j : fit.active_set.active) {
        json e{{"index", j}, {"value", fit.params.beta(j)}};
        if (static_cast<std::size_t>(j) < data.names().size())
            e["name"] = data.names()[static_cast<std::size_t>(j)];
        beta.push_back(std::move(e));
    }
    return {{"schema_version", kSchemaVersion},
            {"n", data.n()},
            {"p", data.p()},
            {"alpha", alpha},
            {"penalty", penalty_to_json(pen)},
            {"init", to_string(cfg.init)},
            {"seed", cfg.seed},
            {"beta", std::move(beta)},
            {"sigma", fit.params.sigma},
            {"objective", fit.objective},
            {"loss", fit.loss},
            {"iterations", fit.outer_iters},
            {"converged", fit.converged},
            {"sigma_floored", fit.sigma_floored},
            {"degenerate_scale", fit.degenerate_scale},
            {"cd_warning", fit.cd_warning},
            {"kkt", kkt_to_json(fit.kkt)}};
}

LoadedFit fit_from_json(const json& j, Index p) {
    try {
        if (!j.contains("schema_version")) throw UsageError("fit JSON has no schema_version");
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            throw UsageError("unsupported fit JSON schema_version");
        const json& fj = j.contains("fit") ? j.at("fit") : j;  // tune output nests the fit
        if (fj.at("p").get<Index>() != p)
            throw UsageError("fit JSON has p = " + std::to_string(fj.at("p").get<Index>()) +
                             " but the data has " + std::to_string(p) + " covariates");
        LoadedFit out;
        out.alpha = fj.at("alpha").get<double>();
        const json& pj = fj.at("penalty");
        out.penalty = PenaltySpec::make(parse_penalty_family(pj.at("family").get<std::string>()),
                                        pj.at("lambda").get<double>(), pj.at("a").get<double>());
        Vector beta = Vector::Zero(p);
        for (const auto& e : fj.at("beta")) {
            const Index k = e.at("index").get<Index>();
            if (k < 0 || k >= p) throw UsageError("fit JSON coefficient index out of range");
            beta(k) = e.at("value").get<double>();
        }
        if ((beta.array() != 0.0).count() == 0) throw UsageError("fit JSON has an empty active set");
        out.params = ModelParams(std::move(beta), fj.at("sigma").get<double>());
        return out;
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed fit JSON: ") + e.what());
    }
}

int cmd_fit(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    if (!rc.lambda) throw UsageError("fit: --lambda is required");
    const Dataset data = load_input(rc);
    const PenaltySpec pen = rc.penalty_spec(*rc.lambda);
    const SolverConfig cfg = rc.solver_config();
    const ObjectiveContext ctx(data, DpdConfig(rc.alpha));
    const FitResult res = fit(ctx, pen, cfg);
    json j = fit_to_json(res, data, rc.alpha, pen, cfg);
    j["command"] = "fit";
    emit(rc, out, [&](std::ostream& os) { write_json(os, j); });
    warn_unconverged(err, res);
    return rc.strict && !res.converged ? kExitNumerical : kExitOk;
}

int cmd_tune(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const Dataset data = load_input(rc);
    const PenaltySpec pen = rc.penalty_spec(1.0);
    const SolverConfig cfg = rc.solver_config();
    TuningGrid grid = make_grid(rc);
    if (grid.alphas.empty()) grid.alphas = {rc.alpha};
    TuningOptions opts;
    opts.threads = rc.threads;
    opts.max_model_size = rc.max_model_size;
    const ObjectiveContext ctx(data, DpdConfig(grid.alphas.front()));
    const TuningResult tr = alpha_sweep(ctx, pen, grid, cfg, opts);

    const double best_alpha = tr.best_alpha.value_or(grid.alphas.front());
    json per_alpha = json::array();
    for (const auto& pt : tr.per_alpha)
        per_alpha.push_back({{"alpha", pt.alpha},
                             {"lambda", pt.lambda},
                             {"hbic", pt.skipped ? json(nullptr) : json(pt.hbic)},
                             {"model_size", pt.model_size},
                             {"usable", !pt.skipped}});
    json j{{"schema_version", kSchemaVersion},
           {"command", "tune"},
           {"best_lambda", tr.best_lambda},
           {"best_alpha", best_alpha},
           {"lambda_max", tr.lambda_max},
           {"n_points", tr.points.size()},
           {"per_alpha", std::move(per_alpha)},
           {"fit", fit_to_json(tr.best_fit, data, best_alpha, pen.with_lambda(tr.best_lambda), cfg)}};
    emit(rc, out, [&](std::ostream& os) { write_json(os, j); });

    if (!rc.trace_output.empty()) {
        std::ofstream f(rc.trace_output, std::ios::binary);
        if (!f) throw UsageError("cannot open trace file: " + rc.trace_output);
        f << "alpha,lambda,hbic,model_size,sigma2,objective,converged,saturated,skipped\n";
        for (const auto& pt : tr.points)
            f << format_double(pt.alpha) << ',' << format_double(pt.lambda) << ','
              << (pt.skipped ? std::string() : format_double(pt.hbic)) << ',' << pt.model_size
              << ',' << format_double(pt.sigma2) << ',' << format_double(pt.objective) << ','
              << pt.converged << ',' << pt.saturated << ',' << pt.skipped << '\n';
    }
    warn_unconverged(err, tr.best_fit);
    return rc.strict && !tr.best_fit.converged ? kExitNumerical : kExitOk;
}

int cmd_simulate(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    SimSpec spec = rc.sim;
    spec.seed = rc.seed;
    spec.validate();

    if (!rc.emit_data_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(rc.emit_data_dir);
        for (int r = 0; r < spec.replicates; ++r) {
            const SimReplicate rep = generate_replicate(spec, r);
            char name[32];
            std::snprintf(name, sizeof name, "replicate_%03d", r);
            const fs::path base = fs::path(rc.emit_data_dir) / name;
            std::ofstream f(base.string() + ".csv", std::ios::binary);
            if (!f) throw UsageError("cannot write to " + rc.emit_data_dir);
            write_dataset(f, rep.train.y(), rep.train.X());
            json truth{{"schema_version", kSchemaVersion},
                       {"replicate", r},
                       {"setting", to_string(spec.setting)},
                       {"contamination", to_string(spec.contamination)},
                       {"seed", spec.seed},
                       {"sigma", spec.noise_sd},
                       {"outliers", rep.outliers}};
            json beta = json::array();
            for (Index j = 0; j < rep.beta0.size(); ++j)
                if (rep.beta0(j) != 0.0) beta.push_back({{"index", j}, {"value", rep.beta0(j)}});
            truth["beta"] = std::move(beta);
            std::ofstream t(base.string() + "_truth.json", std::ios::binary);
            write_json(t, truth);
        }
        return kExitOk;
    }

    MethodConfig method;
    if (!rc.alpha_grid.empty()) method.alphas = rc.alpha_grid;
    else if (rc.alpha_given) method.alphas = {rc.alpha};
    method.penalty = rc.penalty_spec(1.0);
    method.solver = rc.solver_config();
    method.grid = make_grid(rc);
    method.grid.alphas.clear();
    method.tuning.max_model_size = rc.max_model_size;
    method.threads = rc.threads;
    const ExperimentTable table = run_experiment(spec, method);

    emit(rc, out, [&](std::ostream& os) {
        if (rc.format == "json") {
            json rows = json::array();
            for (const auto& row : table.rows)
                rows.push_back({{"method", row.method},
                                {"alpha", row.alpha},
                                {"msee", row.mean.msee},
                                {"rmspe", row.mean.rmspe},
                                {"ee_sigma", row.mean.ee_sigma},
                                {"tp", row.mean.tp},
                                {"tn", row.mean.tn},
                                {"ms", row.mean.ms},
                                {"successes", row.successes},
                                {"failures", row.failures}});
            write_json(os, {{"schema_version", kSchemaVersion},
                            {"command", "simulate"},
                            {"setting", to_string(spec.setting)},
                            {"contamination", to_string(spec.contamination)},
                            {"x_outlier_mode", to_string(spec.x_mode)},
                            {"n", spec.n},
                            {"p", spec.p},
                            {"replicates", spec.replicates},
                            {"seed", spec.seed},
                            {"rows", std::move(rows)},
                            {"failures", table.failures}});
        } else {
            write_table_csv(os, table);
        }
    });
    for (const auto& f : table.failures) err << "warning: " << f << '\n';
    return rc.strict && !table.failures.empty() ? kExitNumerical : kExitOk;
}

int cmd_influence(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const Dataset data = load_input(rc);
    ModelParams params;
    PenaltySpec pen;
    double alpha = rc.alpha;

    if (!rc.fit_input.empty()) {
        if (rc.lambda) throw UsageError("influence: --lambda conflicts with --fit");
        std::ifstream f(rc.fit_input);
        if (!f) throw UsageError("cannot open fit file: " + rc.fit_input);
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw UsageError(rc.fit_input + ": " + e.what());
        }
        LoadedFit lf = fit_from_json(j, data.p());
        if (rc.alpha_given && rc.alpha != lf.alpha)
            throw UsageError("influence: --alpha differs from the fit's alpha");
        params = std::move(lf.params);
        pen = lf.penalty;
        alpha = lf.alpha;
    } else {
        const SolverConfig cfg = rc.solver_config();
        const ObjectiveContext ctx(data, DpdConfig(alpha));
        FitResult res;
        if (rc.lambda) {
            pen = rc.penalty_spec(*rc.lambda);
            res = fit(ctx, pen, cfg);
        } else {
            TuningGrid grid = make_grid(rc);
            grid.alphas.clear();
            TuningOptions opts;
            opts.threads = rc.threads;
            opts.max_model_size = rc.max_model_size;
            const TuningResult tr = lambda_path(ctx, rc.penalty_spec(1.0), grid, cfg, opts);
            pen = rc.penalty_spec(tr.best_lambda);
            res = tr.best_fit;
        }
        warn_unconverged(err, res);
        if (res.active_set.empty())
            throw std::runtime_error("influence: the fitted model has an empty active set");
        params = res.params;
    }

    const ObjectiveContext ctx(data, DpdConfig(alpha));
    const SensitivityGrid grid =
        SensitivityGrid::uniform(rc.grid.y_radius, rc.grid.ny, rc.grid.x_max, rc.grid.nx);
    const SensitivityResult sr = sensitivity_scan(ctx, params, pen, grid, rc.threads);
    emit(rc, out, [&](std::ostream& os) { write_sensitivity_csv(os, sr); });
    return kExitOk;
}

namespace {

void add_common(CLI::App* sub, RunConfig& rc) {
    sub->add_option("--alpha", rc.alpha, "DPD tuning parameter (>= 0)")->check(CLI::NonNegativeNumber);
    sub->add_option("--penalty", rc.penalty, "scad, mcp or l1")
        ->check(CLI::IsMember({"scad", "mcp", "l1", "lasso"}, CLI::ignore_case));
    sub->add_option("--scad-a", rc.scad_a, "SCAD shape (> 2)");
    sub->add_option("--mcp-a", rc.mcp_a, "MCP shape (> 1)");
    sub->add_option("--seed", rc.seed, "seed for every random stream");
    sub->add_option("--threads", rc.threads, "worker threads (0: logical cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", rc.output, "output file (default stdout)");
    sub->add_flag("--strict", rc.strict, "exit 1 when the solver does not converge");
    sub->add_option("--init", rc.init, "initializer: zero or ransac")
        ->check(CLI::IsMember({"zero", "ransac", "ransac_lasso"}, CLI::ignore_case));
}

void add_grid(CLI::App* sub, RunConfig& rc) {
    sub->add_option("--lambda-grid", rc.lambda_grid, "comma-separated lambda values")->delimiter(',');
    sub->add_option("--n-lambda", rc.n_lambda, "default grid size")->check(CLI::PositiveNumber);
    sub->add_option("--lambda-min-ratio", rc.lambda_min_ratio, "smallest lambda / lambda_max")
        ->check(CLI::Range(1e-12, 1.0));
    sub->add_option("--warm-start", rc.warm_start, "also start each lambda from the previous fit");
    sub->add_option("--max-model-size", rc.max_model_size, "saturation size (0: n/2)")
        ->check(CLI::NonNegativeNumber);
}

int dispatch(CLI::App& app, RunConfig& rc, std::ostream& out, std::ostream& err) {
    try {
        if (rc.subcommand == "fit") return cmd_fit(rc, out, err);
        if (rc.subcommand == "tune") return cmd_tune(rc, out, err);
        if (rc.subcommand == "simulate") return cmd_simulate(rc, out, err);
        if (rc.subcommand == "influence") return cmd_influence(rc, out, err);
        err << app.help();
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CsvError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    CLI::App app{"Robust sparse regression with the penalized DPD estimator", "dpdncv"};
    app.require_subcommand(1);

    auto* fit_cmd = app.add_subcommand("fit", "fit at one lambda and print the fit as JSON");
    fit_cmd->add_option("input", rc.input, "CSV with header; column y first")->required();
    add_common(fit_cmd, rc);
    fit_cmd->add_option("--lambda", rc.lambda, "penalty level (> 0)")->check(CLI::PositiveNumber);

    auto* tune_cmd = app.add_subcommand("tune", "select lambda (and alpha) by HBIC");
    tune_cmd->add_option("input", rc.input, "CSV with header; column y first")->required();
    add_common(tune_cmd, rc);
    add_grid(tune_cmd, rc);
    tune_cmd->add_option("--alpha-grid", rc.alpha_grid, "comma-separated alpha values")->delimiter(',');
    tune_cmd->add_option("--trace", rc.trace_output, "per-lambda trace CSV");

    auto* sim_cmd = app.add_subcommand("simulate", "run the simulation study and print its table");
    add_common(sim_cmd, rc);
    add_grid(sim_cmd, rc);
    sim_cmd->add_option("--alpha-grid", rc.alpha_grid, "comma-separated alpha values")->delimiter(',');
    std::string setting = "A", contamination = "none", xmode = "coords";
    sim_cmd->add_option("--setting", setting, "A or B");
    sim_cmd->add_option("--contamination", contamination, "none, y or x");
    sim_cmd->add_option("--x-outlier-mode", xmode, "coords or rows");
    sim_cmd->add_option("--n", rc.sim.n, "training sample size");
    sim_cmd->add_option("--p", rc.sim.p, "number of covariates");
    sim_cmd->add_option("--replicates", rc.sim.replicates, "number of replicates");
    sim_cmd->add_option("--rate", rc.sim.contamination_rate, "contamination rate");
    sim_cmd->add_option("--format", rc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sim_cmd->add_option("--emit-data", rc.emit_data_dir,
                        "write each replicate's training CSV and truth to DIR, then exit");

    auto* inf_cmd = app.add_subcommand("influence", "influence-function surface as CSV");
    inf_cmd->add_option("input", rc.input, "CSV with header; column y first")->required();
    add_common(inf_cmd, rc);
    add_grid(inf_cmd, rc);
    inf_cmd->add_option("--lambda", rc.lambda, "fit at this lambda instead of tuning")
        ->check(CLI::PositiveNumber);
    inf_cmd->add_option("--fit", rc.fit_input, "use the parameters from a fit or tune JSON");
    inf_cmd->add_option("--y-radius", rc.grid.y_radius, "y_t grid spans [-R, R]")->check(CLI::PositiveNumber);
    inf_cmd->add_option("--ny", rc.grid.ny, "y_t grid points")->check(CLI::PositiveNumber);
    inf_cmd->add_option("--x-max", rc.grid.x_max, "x_t scale grid spans [0, X]")->check(CLI::NonNegativeNumber);
    inf_cmd->add_option("--nx", rc.grid.nx, "x_t scale grid points")->check(CLI::PositiveNumber);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    rc.subcommand = app.get_subcommands().front()->get_name();
    rc.alpha_given = app.get_subcommands().front()->count("--alpha") > 0;
    try {
        if (rc.subcommand == "simulate") {
            rc.sim.setting = parse_setting(setting);
            rc.sim.contamination = parse_contamination(contamination);
            rc.sim.x_mode = parse_x_outlier_mode(xmode);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return dispatch(app, rc, out, err);
}

}  // namespace dpdncv::cli
