#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace dpdncv;
using namespace dpdncv::testing;

namespace {

SolverConfig ransac(std::uint64_t seed = 0) {
    SolverConfig c;
    c.init = InitMode::RansacLasso;
    c.seed = seed;
    return c;
}

Dataset strong_data(std::uint64_t seed, Index n = 100, Index p = 20) {
    Vector beta = Vector::Zero(p);
    beta(0) = 3.0;
    beta(4) = -2.0;
    beta(9) = 1.5;
    return linear_data(n, beta, 0.5, seed);
}

// HBIC's per-variable charge is small when p is small, so one noise
// covariate can slip in.
void expect_true_support_plus_at_most_one(const FitResult& f) {
    for (Index j : {0, 4, 9}) EXPECT_NE(f.params.beta(j), 0.0) << j;
    EXPECT_LE(f.active_set.size(), 4u);
}

}  // namespace

TEST(Hbic, Examples) {
    EXPECT_DOUBLE_EQ(hbic(1.0, 0, 100, 500), 0.0);
    const double expect = std::log(std::log(100.0)) * std::log(500.0) / 100.0 * 5.0;
    EXPECT_NEAR(hbic(1.0, 5, 100, 500), expect, 1e-15);
    EXPECT_NEAR(hbic(1.0, 5, 100, 500), 0.47455, 1e-5);
    EXPECT_NEAR(hbic(std::sqrt(2.0), 3, 50, 40) - hbic(1.0, 3, 50, 40), std::log(2.0), 1e-14);
}

TEST(Hbic, Validation) {
    EXPECT_THROW(hbic(1.0, 0, 2, 10), std::invalid_argument);
    EXPECT_THROW(hbic(0.0, 0, 10, 10), std::invalid_argument);
    EXPECT_NO_THROW(hbic(1.0, 0, 3, 1));
}

TEST(Hbic, Monotonicity) {
    for (double s : {0.1, 1.0, 3.0}) {
        for (std::size_t k = 0; k < 10; ++k) {
            EXPECT_LT(hbic(s, k, 100, 500), hbic(s, k + 1, 100, 500));
            EXPECT_LT(hbic(s, k, 100, 500), hbic(s * 1.01, k, 100, 500));
        }
    }
}

TEST(TuningGrid, Normalize) {
    TuningGrid g;
    g.lambdas = {0.1, 1.0, 0.5, 1.0, 0.1};
    g.normalize();
    EXPECT_EQ(g.lambdas, (std::vector<double>{1.0, 0.5, 0.1}));
    g.lambdas = {1.0, -0.5};
    EXPECT_THROW(g.normalize(), std::invalid_argument);
    g.lambdas.clear();
    g.n_lambda = 0;
    EXPECT_THROW(g.normalize(), std::invalid_argument);
}

TEST(LogGrid, Endpoints) {
    const auto g = log_grid(2.0, 50, 1e-3);
    ASSERT_EQ(g.size(), 50u);
    EXPECT_DOUBLE_EQ(g.front(), 2.0);
    EXPECT_NEAR(g.back(), 2e-3, 1e-15);
    for (std::size_t k = 1; k < g.size(); ++k) EXPECT_LT(g[k], g[k - 1]);
    EXPECT_EQ(log_grid(3.0, 1, 1e-3), std::vector<double>{3.0});
}

TEST(LambdaMax, ZeroIsTheFirstSurrogateSolution) {
    const Dataset d = strong_data(1);
    const ObjectiveContext ctx(d, DpdConfig(0.3));
    SolverConfig cfg;
    const ModelParams pilot = initializer(ctx, cfg);
    const double lmax = lambda_max(ctx, PenaltySpec::scad(1.0), pilot);
    EXPECT_TRUE((beta_step(ctx, PenaltySpec::scad(lmax * (1 + 1e-9)), pilot, cfg).beta.array() == 0.0).all());
    EXPECT_FALSE((beta_step(ctx, PenaltySpec::scad(lmax * 0.9), pilot, cfg).beta.array() == 0.0).all());
}

TEST(LambdaPath, SingleLambdaReturnsIt) {
    const Dataset d = strong_data(2);
    TuningGrid g;
    g.lambdas = {0.4};
    const auto tr = lambda_path(ObjectiveContext(d, DpdConfig(0.2)), PenaltySpec::scad(1.0), g, ransac());
    EXPECT_EQ(tr.best_lambda, 0.4);
    ASSERT_EQ(tr.points.size(), 1u);
    EXPECT_EQ(tr.points[0].lambda, 0.4);
}

TEST(LambdaPath, SelectsTrueSupport) {
    const Dataset d = strong_data(3);
    const auto tr = lambda_path(ObjectiveContext(d, DpdConfig(0.2)), PenaltySpec::scad(1.0), TuningGrid{}, ransac());
    expect_true_support_plus_at_most_one(tr.best_fit);
    EXPECT_EQ(tr.points.size(), 50u);
    double min_hbic = INFINITY;
    for (const auto& pt : tr.points)
        if (!pt.skipped) min_hbic = std::min(min_hbic, pt.hbic);
    EXPECT_DOUBLE_EQ(hbic(tr.best_fit, d.n(), d.p()), min_hbic);
}

TEST(LambdaPath, SettingAModelSize) {
    SimSpec spec;
    spec.p = 100;
    const SimReplicate rep = generate_replicate(spec, 0);
    const auto tr = lambda_path(ObjectiveContext(rep.train, DpdConfig(0.2)), PenaltySpec::scad(1.0), TuningGrid{},
                                ransac(mix_stream(spec.seed, mix_stream(0, 6))));
    const auto ms = tr.best_fit.active_set.size();
    EXPECT_GE(ms, 5u);
    EXPECT_LE(ms, 7u);
}

TEST(LambdaPath, TiesGoToLargerLambda) {
    std::mt19937_64 rng(4);
    const Dataset d(random_vector(40, rng), random_matrix(40, 5, rng));
    TuningGrid g;
    g.lambdas = {50.0, 100.0};
    const auto tr = lambda_path(ObjectiveContext(d, DpdConfig(0.2)), PenaltySpec::scad(1.0), g, ransac());
    ASSERT_EQ(tr.points.size(), 2u);
    EXPECT_EQ(tr.points[0].hbic, tr.points[1].hbic);
    EXPECT_EQ(tr.best_lambda, 100.0);
}

TEST(LambdaPath, DuplicatedGridSelectsSameLambda) {
    const Dataset d = strong_data(5);
    const ObjectiveContext ctx(d, DpdConfig(0.2));
    TuningGrid g;
    g.lambdas = log_grid(2.0, 15, 0.01);
    const auto a = lambda_path(ctx, PenaltySpec::scad(1.0), g, ransac());
    auto doubled = g;
    doubled.lambdas.insert(doubled.lambdas.end(), g.lambdas.begin(), g.lambdas.end());
    const auto b = lambda_path(ctx, PenaltySpec::scad(1.0), doubled, ransac());
    EXPECT_EQ(a.best_lambda, b.best_lambda);
    EXPECT_EQ(b.points.size(), 15u);
}

TEST(LambdaPath, WarmAndColdAgree) {
    const Dataset d = strong_data(6);
    const ObjectiveContext ctx(d, DpdConfig(0.3));
    TuningGrid warm, cold;
    cold.warm_start = false;
    const auto a = lambda_path(ctx, PenaltySpec::scad(1.0), warm, ransac());
    const auto b = lambda_path(ctx, PenaltySpec::scad(1.0), cold, ransac());
    const long diff = static_cast<long>(a.best_fit.active_set.size()) - static_cast<long>(b.best_fit.active_set.size());
    EXPECT_LE(std::abs(diff), 1);
}

TEST(LambdaPath, AllNonConvergedIsAnError) {
    const Dataset d = strong_data(7);
    SolverConfig cfg = ransac();
    cfg.max_outer_iters = 1;
    cfg.tol = 1e-300;
    cfg.param_tol = 1e-300;
    TuningGrid g;
    g.lambdas = {0.5, 0.3};
    try {
        lambda_path(ObjectiveContext(d, DpdConfig(0.2)), PenaltySpec::scad(1.0), g, cfg);
        FAIL() << "expected an error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("did not converge"), std::string::npos) << e.what();
    }
}

TEST(LambdaPath, NullDataSelectsEmptyModel) {
    int small = 0;
    const int reps = 10;
    for (int r = 0; r < reps; ++r) {
        std::mt19937_64 rng(1000 + r);
        const Dataset d(random_vector(100, rng, 0.5), random_matrix(100, 50, rng));
        const auto tr = lambda_path(ObjectiveContext(d, DpdConfig(0.2)), PenaltySpec::scad(1.0), TuningGrid{},
                                    ransac(static_cast<std::uint64_t>(r)));
        small += tr.best_fit.active_set.size() <= 1;
    }
    EXPECT_GE(small, 9);
}

TEST(AlphaSweep, SingleAlphaReducesToPath) {
    const Dataset d = strong_data(8);
    const ObjectiveContext ctx(d, DpdConfig(0.0));
    TuningGrid g;
    g.alphas = {0.0};
    const auto a = alpha_sweep(ctx, PenaltySpec::scad(1.0), g, ransac());
    const auto b = lambda_path(ctx, PenaltySpec::scad(1.0), TuningGrid{}, ransac());
    EXPECT_EQ(a.best_lambda, b.best_lambda);
    EXPECT_EQ(a.best_alpha, 0.0);
    EXPECT_EQ(a.best_fit.params.beta, b.best_fit.params.beta);
}

TEST(AlphaSweep, CleanDataRecoversSignalForEveryAlpha) {
    const Dataset d = strong_data(9);
    const ObjectiveContext ctx(d, DpdConfig(0.0));
    for (double a : {0.0, 0.2, 0.4}) {
        const auto tr = lambda_path(ctx.with_alpha(a), PenaltySpec::scad(1.0), TuningGrid{}, ransac());
        SCOPED_TRACE(a);
        expect_true_support_plus_at_most_one(tr.best_fit);
    }
    TuningGrid g;
    g.alphas = {0.2, 0.4, 0.0};
    const auto sweep = alpha_sweep(ctx, PenaltySpec::scad(1.0), g, ransac());
    EXPECT_EQ(sweep.points.size(), 150u);
    ASSERT_EQ(sweep.per_alpha.size(), 3u);
    for (const auto& row : sweep.per_alpha) {
        EXPECT_GE(row.model_size, 3u);
        EXPECT_LE(row.model_size, 4u);
    }
}

TEST(AlphaSweep, RobustAlphaWinsUnderYOutliers) {
    SimSpec spec;
    spec.p = 50;
    spec.contamination = Contamination::YOutliers;
    const SimReplicate rep = generate_replicate(spec, 0);
    TuningGrid g;
    g.alphas = {0.0, 0.2, 0.4};
    const auto tr = alpha_sweep(ObjectiveContext(rep.train, DpdConfig(0.0)), PenaltySpec::scad(1.0), g, ransac());
    ASSERT_TRUE(tr.best_alpha.has_value());
    EXPECT_GT(*tr.best_alpha, 0.0);
    EXPECT_LT(std::min(tr.per_alpha[1].hbic, tr.per_alpha[2].hbic), tr.per_alpha[0].hbic);
}

TEST(AlphaSweep, ThreadCountDoesNotChangeResult) {
    const Dataset d = strong_data(10, 60, 12);
    TuningGrid g;
    g.alphas = {0.0, 0.3, 0.6};
    g.n_lambda = 10;
    TuningOptions one, many;
    many.threads = 3;
    const ObjectiveContext ctx(d, DpdConfig(0.0));
    const auto a = alpha_sweep(ctx, PenaltySpec::scad(1.0), g, ransac(), one);
    const auto b = alpha_sweep(ctx, PenaltySpec::scad(1.0), g, ransac(), many);
    EXPECT_EQ(a.best_lambda, b.best_lambda);
    EXPECT_EQ(a.best_fit.params.beta, b.best_fit.params.beta);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) EXPECT_EQ(a.points[k].hbic, b.points[k].hbic);
}
