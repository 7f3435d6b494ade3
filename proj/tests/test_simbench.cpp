#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

using namespace dpdncv;

TEST(GenDesign, AutocorrelatedCovariance) {
    Philox4x32 rng(3, 0);
    const Matrix X = gen_design(50000, 3, rng);
    const Matrix C = (X.transpose() * X) / 50000.0;
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) EXPECT_NEAR(C(i, j), std::pow(0.5, std::abs(i - j)), 0.02);
    EXPECT_NEAR(std::pow(0.5, std::abs(0 - 2)), 0.25, 0.0);
}

TEST(GenDesign, SingleColumnIsStandardNormal) {
    Philox4x32 rng(4, 0);
    const Matrix X = gen_design(20000, 1, rng);
    EXPECT_NEAR(X.mean(), 0.0, 0.03);
    EXPECT_NEAR(X.squaredNorm() / 20000.0, 1.0, 0.03);
    EXPECT_THROW(gen_design(0, 3, rng), std::invalid_argument);
}

TEST(GenBeta, SettingA) {
    const Vector b = gen_beta(Setting::A, 100);
    ASSERT_EQ(b.size(), 100);
    EXPECT_EQ((b.array() != 0.0).count(), 5);
    EXPECT_DOUBLE_EQ(b.sum(), 25.0);
    EXPECT_EQ(b(0), 1.0);
    EXPECT_EQ(b(1), 2.0);
    EXPECT_EQ(b(3), 4.0);
    EXPECT_EQ(b(6), 7.0);
    EXPECT_EQ(b(10), 11.0);
}

TEST(GenBeta, SettingB) {
    const Vector b = gen_beta(Setting::B, 100);
    EXPECT_EQ((b.array() != 0.0).count(), 5);
    EXPECT_EQ(b(0), 1.5);
    EXPECT_EQ(b(1), 0.5);
    EXPECT_EQ(b(3), 1.0);
    EXPECT_EQ(b(6), 1.5);
    EXPECT_EQ(b(10), 1.0);
}

TEST(GenBeta, RejectsSmallP) {
    EXPECT_THROW(gen_beta(Setting::A, 10), std::invalid_argument);
    EXPECT_NO_THROW(gen_beta(Setting::B, 11));
}

TEST(GenResponse, NoiselessAndVariance) {
    Philox4x32 rng(5, 0);
    const Matrix X = gen_design(10000, 12, rng);
    const Vector b = gen_beta(Setting::A, 12);
    const Vector y0 = gen_response(X, b, 1e-300, rng);
    EXPECT_LT((y0 - X * b).cwiseAbs().maxCoeff(), 1e-12);
    const Vector y = gen_response(X, b, 0.5, rng);
    const Vector e = y - X * b;
    const double var = (e.array() - e.mean()).square().sum() / 9999.0;
    EXPECT_NEAR(var, 0.25, 0.25 * 0.05);
}

namespace {

SimSpec small_spec(Contamination c) {
    SimSpec s;
    s.n = 100;
    s.p = 20;
    s.contamination = c;
    return s;
}

}  // namespace

TEST(Contaminate, ZeroRateIsIdentity) {
    Philox4x32 rng(6, 0);
    const Matrix X = gen_design(100, 20, rng);
    const Vector y = gen_response(X, gen_beta(Setting::A, 20), 0.5, rng);
    SimSpec s = small_spec(Contamination::YOutliers);
    s.contamination_rate = 0.0;
    const Contaminated c = contaminate(y, X, s, rng);
    EXPECT_TRUE(c.outliers.empty());
    EXPECT_EQ(c.y, y);
    EXPECT_EQ(c.X, X);
}

TEST(Contaminate, YOutliersShiftExactlyTenResponses) {
    Philox4x32 rng(7, 0);
    const Matrix X = gen_design(100, 20, rng);
    const Vector y = gen_response(X, gen_beta(Setting::A, 20), 0.5, rng);
    const Contaminated c = contaminate(y, X, small_spec(Contamination::YOutliers), rng);
    ASSERT_EQ(c.outliers.size(), 10u);
    EXPECT_TRUE(std::is_sorted(c.outliers.begin(), c.outliers.end()));
    EXPECT_EQ(std::set<Index>(c.outliers.begin(), c.outliers.end()).size(), 10u);
    const std::set<Index> out(c.outliers.begin(), c.outliers.end());
    for (Index i = 0; i < 100; ++i) EXPECT_EQ(c.y(i) - y(i), out.count(i) ? 20.0 : 0.0);
    EXPECT_EQ(c.X, X);
}

TEST(Contaminate, XOutliersCoordsAndRows) {
    Philox4x32 rng(8, 0);
    const Matrix X = gen_design(100, 20, rng);
    const Vector y = gen_response(X, gen_beta(Setting::A, 20), 0.5, rng);
    const Contaminated c = contaminate(y, X, small_spec(Contamination::XOutliers), rng);
    ASSERT_EQ(c.outliers.size(), 10u);
    EXPECT_EQ(c.y, y);
    const Matrix D = c.X - X;
    for (Index i : c.outliers) {
        for (Index j = 0; j < 20; ++j) EXPECT_DOUBLE_EQ(D(i, j) + X(i, j) - X(i, j), j < 10 ? 20.0 : 0.0);
    }
    EXPECT_DOUBLE_EQ(D.cwiseAbs().sum(), 10 * 10 * 20.0);

    SimSpec rows = small_spec(Contamination::XOutliers);
    rows.x_mode = XOutlierMode::Rows;
    Philox4x32 rng2(8, 1);
    const Contaminated r = contaminate(y, X, rows, rng2);
    EXPECT_NEAR((r.X - X).cwiseAbs().sum(), 10 * 20 * 20.0, 1e-9);
}

TEST(Contaminate, NarrowDesignClampsShiftedColumns) {
    Philox4x32 rng(9, 0);
    const Matrix X = gen_design(30, 5, rng);
    const Vector y = Vector::Zero(30);
    SimSpec s = small_spec(Contamination::XOutliers);
    const Contaminated c = contaminate(y, X, s, rng);
    ASSERT_EQ(c.outliers.size(), 3u);
    EXPECT_NEAR((c.X - X).cwiseAbs().sum(), 3 * 5 * 20.0, 1e-9);
}

TEST(Contaminate, RejectsBadRate) {
    Philox4x32 rng(10, 0);
    SimSpec s = small_spec(Contamination::YOutliers);
    s.contamination_rate = 1.5;
    EXPECT_THROW(contaminate(Vector::Zero(3), Matrix::Zero(3, 2), s, rng), std::invalid_argument);
    s.contamination_rate = 0.1;
    EXPECT_THROW(contaminate(Vector::Zero(3), Matrix::Zero(4, 2), s, rng), DimensionError);
}

TEST(Metrics, ExampleValues) {
    Vector b0(4);
    b0 << 1, 0, 2, 0;
    Vector bh(4);
    bh << 1.5, 0, 0, 0.5;
    Matrix Xt(2, 4);
    Xt << 1, 0, 0, 0, 0, 0, 1, 0;
    Vector yt(2);
    yt << 1, 2;
    const MetricRow m = metrics(bh, 0.7, b0, 0.5, Xt, yt);
    EXPECT_DOUBLE_EQ(m.msee, (0.25 + 4.0 + 0.25) / 4.0);
    EXPECT_DOUBLE_EQ(m.rmspe, std::sqrt(0.25 + 4.0));
    EXPECT_NEAR(m.ee_sigma, 0.2, 1e-15);
    EXPECT_DOUBLE_EQ(m.tp, 0.5);
    EXPECT_DOUBLE_EQ(m.tn, 0.5);
    EXPECT_DOUBLE_EQ(m.ms, 2.0);
}

TEST(Metrics, PerfectRecovery) {
    const Vector b0 = gen_beta(Setting::B, 30);
    Philox4x32 rng(11, 0);
    const Matrix Xt = gen_design(10, 30, rng);
    const MetricRow m = metrics(b0, 0.5, b0, 0.5, Xt, Xt * b0);
    EXPECT_EQ(m.msee, 0.0);
    EXPECT_EQ(m.rmspe, 0.0);
    EXPECT_EQ(m.tp, 1.0);
    EXPECT_EQ(m.tn, 1.0);
    EXPECT_EQ(m.ms, 5.0);
}

TEST(Metrics, DuplicatedTestSetScalesPredictionErrorByRootTwo) {
    const Vector b0 = gen_beta(Setting::A, 15);
    Philox4x32 rng(12, 0);
    const Matrix Xt = gen_design(8, 15, rng);
    const Vector yt = gen_response(Xt, b0, 0.5, rng);
    const Vector bh = b0 * 0.9;
    Matrix X2(16, 15);
    X2 << Xt, Xt;
    Vector y2(16);
    y2 << yt, yt;
    const double r1 = metrics(bh, 0.5, b0, 0.5, Xt, yt).rmspe;
    const double r2 = metrics(bh, 0.5, b0, 0.5, X2, y2).rmspe;
    EXPECT_NEAR(r2, std::sqrt(2.0) * r1, 1e-12);
}

TEST(Metrics, TrueNegativeIdentity) {
    // TN * (p - s) + (MS - TP * s) = p - s
    const Vector b0 = gen_beta(Setting::A, 40);
    std::mt19937_64 g(13);
    std::bernoulli_distribution coin(0.3);
    for (int rep = 0; rep < 20; ++rep) {
        Vector bh = Vector::Zero(40);
        for (Index j = 0; j < 40; ++j)
            if (coin(g)) bh(j) = 1.0;
        const MetricRow m = metrics(bh, 1.0, b0, 0.5, Matrix::Zero(1, 40), Vector::Zero(1));
        EXPECT_NEAR(m.tn * 35.0 + (m.ms - m.tp * 5.0), 35.0, 1e-12);
    }
    EXPECT_THROW(metrics(Vector::Zero(3), 1.0, b0, 0.5, Matrix::Zero(1, 40), Vector::Zero(1)), DimensionError);
}

TEST(Replicates, DeterministicAndIndependentOfOrder) {
    SimSpec s = small_spec(Contamination::YOutliers);
    s.seed = 99;
    const SimReplicate a3 = generate_replicate(s, 3);
    const SimReplicate a1 = generate_replicate(s, 1);
    const SimReplicate b3 = generate_replicate(s, 3);
    EXPECT_EQ(a3.train.X(), b3.train.X());
    EXPECT_EQ(a3.train.y(), b3.train.y());
    EXPECT_EQ(a3.y_test, b3.y_test);
    EXPECT_EQ(a3.outliers, b3.outliers);
    EXPECT_NE(a3.train.X(), a1.train.X());
    s.seed = 100;
    EXPECT_NE(generate_replicate(s, 3).train.X(), a3.train.X());
    EXPECT_NE(a3.X_test, a3.train.X());
}

TEST(Replicates, CleanTestSet) {
    SimSpec s = small_spec(Contamination::YOutliers);
    s.outlier_shift = 1e6;
    const SimReplicate r = generate_replicate(s, 0);
    EXPECT_LT(r.y_test.cwiseAbs().maxCoeff(), 1e3);
    EXPECT_GT(r.train.y().cwiseAbs().maxCoeff(), 1e5);
}

TEST(Parsers, RoundTripAndErrors) {
    for (Setting v : {Setting::A, Setting::B}) EXPECT_EQ(parse_setting(to_string(v)), v);
    for (Contamination v : {Contamination::None, Contamination::YOutliers, Contamination::XOutliers})
        EXPECT_EQ(parse_contamination(to_string(v)), v);
    for (XOutlierMode v : {XOutlierMode::Coords, XOutlierMode::Rows}) EXPECT_EQ(parse_x_outlier_mode(to_string(v)), v);
    EXPECT_THROW(parse_setting("C"), std::invalid_argument);
    EXPECT_THROW(parse_contamination("z"), std::invalid_argument);
    EXPECT_THROW(parse_x_outlier_mode("cols"), std::invalid_argument);
}

TEST(SimSpecValidation, Rejects) {
    SimSpec s;
    s.replicates = 0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = SimSpec{};
    s.contamination_rate = -0.1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = SimSpec{};
    s.noise_sd = 0.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

namespace {

MethodConfig quick_method(int threads) {
    MethodConfig m;
    m.alphas = {0.1, 0.2};
    m.grid.n_lambda = 15;
    m.threads = threads;
    m.solver.ransac_starts = 20;
    return m;
}

}  // namespace

TEST(Experiment, ThreadCountDoesNotChangeResults) {
    SimSpec s;
    s.n = 60;
    s.p = 20;
    s.replicates = 3;
    s.seed = 7;
    s.contamination = Contamination::YOutliers;
    const ExperimentTable a = run_experiment(s, quick_method(1));
    const ExperimentTable b = run_experiment(s, quick_method(3));
    std::ostringstream oa, ob;
    write_table_csv(oa, a);
    write_table_csv(ob, b);
    EXPECT_EQ(oa.str(), ob.str());
    ASSERT_EQ(a.rows.size(), 2u);
    EXPECT_EQ(a.rows[0].alpha, 0.1);
    EXPECT_EQ(a.rows[0].successes + a.rows[0].failures, 3);
    EXPECT_EQ(oa.str().substr(0, oa.str().find('\n')), "method,alpha,msee,rmspe,ee_sigma,tp,tn,ms");
}

TEST(Experiment, RecoversSupportOnEasyProblem) {
    SimSpec s;
    s.n = 100;
    s.p = 30;
    s.replicates = 3;
    s.seed = 1;
    s.setting = Setting::A;
    const ExperimentTable t = run_experiment(s, quick_method(1));
    for (const auto& row : t.rows) {
        EXPECT_EQ(row.failures, 0);
        EXPECT_EQ(row.mean.tp, 1.0);
        EXPECT_GE(row.mean.tn, 0.9);
    }
}
