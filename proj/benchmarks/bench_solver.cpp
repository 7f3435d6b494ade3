#include "dpdncv/dpdncv.hpp"

#include <benchmark/benchmark.h>

using namespace dpdncv;

namespace {

SimReplicate replicate(Index p) {
    SimSpec spec;
    spec.p = p;
    return generate_replicate(spec, 0);
}

void BM_DpdLoss(benchmark::State& state) {
    const SimReplicate rep = replicate(state.range(0));
    const ObjectiveContext ctx(rep.train, DpdConfig(0.2));
    const ModelParams params(rep.beta0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(dpd_loss(ctx, params));
}
BENCHMARK(BM_DpdLoss)->Arg(100)->Arg(500);

void BM_WeightedLassoCd(benchmark::State& state) {
    const SimReplicate rep = replicate(state.range(0));
    const Matrix& X = rep.train.X();
    const Vector w = Vector::Ones(X.rows());
    const Vector thr = Vector::Constant(X.cols(), 5.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(weighted_lasso_cd(X, rep.train.y(), w, thr, Vector::Zero(X.cols()), 1000, 1e-7));
}
BENCHMARK(BM_WeightedLassoCd)->Arg(100)->Arg(500);

void BM_FitFromTruth(benchmark::State& state) {
    const SimReplicate rep = replicate(state.range(0));
    const ObjectiveContext ctx(rep.train, DpdConfig(0.2));
    const SolverConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_from(ctx, PenaltySpec::scad(0.5), cfg, ModelParams(rep.beta0, 1.0)));
}
BENCHMARK(BM_FitFromTruth)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_RansacInitializer(benchmark::State& state) {
    const SimReplicate rep = replicate(state.range(0));
    const ObjectiveContext ctx(rep.train, DpdConfig(0.2));
    SolverConfig cfg;
    cfg.init = InitMode::RansacLasso;
    for (auto _ : state) benchmark::DoNotOptimize(initializer(ctx, cfg));
}
BENCHMARK(BM_RansacInitializer)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_LambdaPath(benchmark::State& state) {
    const SimReplicate rep = replicate(state.range(0));
    const ObjectiveContext ctx(rep.train, DpdConfig(0.2));
    SolverConfig cfg;
    cfg.init = InitMode::RansacLasso;
    for (auto _ : state)
        benchmark::DoNotOptimize(lambda_path(ctx, PenaltySpec::scad(1.0), TuningGrid{}, cfg, TuningOptions{}));
}
BENCHMARK(BM_LambdaPath)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
