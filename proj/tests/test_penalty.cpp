#include "dpdncv/penalty.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace dpdncv;

namespace {

std::vector<PenaltySpec> all_families() {
    return {PenaltySpec::l1(0.7), PenaltySpec::scad(0.7), PenaltySpec::scad(1.0, 2.5),
            PenaltySpec::mcp(0.7), PenaltySpec::mcp(1.3, 1.5)};
}

double concave_part(const PenaltySpec& p, double s) { return value(p, s) - p.lambda * s; }

}  // namespace

TEST(PenaltySpec, Validation) {
    EXPECT_THROW(PenaltySpec::scad(0.0), std::invalid_argument);
    EXPECT_THROW(PenaltySpec::scad(-1.0), std::invalid_argument);
    EXPECT_THROW(PenaltySpec::scad(1.0, 2.0), std::invalid_argument);
    EXPECT_THROW(PenaltySpec::mcp(1.0, 1.0), std::invalid_argument);
    EXPECT_NO_THROW(PenaltySpec::l1(0.1));
    EXPECT_EQ(PenaltySpec::scad(1.0).a, 3.7);
    EXPECT_EQ(PenaltySpec::mcp(1.0).a, 3.0);
}

TEST(PenaltySpec, ParseFamily) {
    EXPECT_EQ(parse_penalty_family("SCAD"), PenaltyFamily::SCAD);
    EXPECT_EQ(parse_penalty_family("mcp"), PenaltyFamily::MCP);
    EXPECT_EQ(parse_penalty_family("lasso"), PenaltyFamily::L1);
    EXPECT_THROW(parse_penalty_family("ridge"), std::invalid_argument);
}

TEST(PenaltyValue, ScadExamples) {
    const auto p = PenaltySpec::scad(1.0, 3.7);
    EXPECT_EQ(value(p, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(value(p, 0.5), 0.5);
    EXPECT_NEAR(value(p, 10.0), 2.35, 1e-12);
}

TEST(PenaltyValue, RejectsNegativeArgument) {
    EXPECT_THROW(value(PenaltySpec::scad(1.0), -0.1), std::invalid_argument);
}

TEST(PenaltyValue, McpPlateau) {
    const auto p = PenaltySpec::mcp(1.0, 3.0);
    EXPECT_NEAR(value(p, 5.0), 1.5, 1e-12);
}

TEST(PenaltyDeriv, TableExamples) {
    EXPECT_EQ(deriv(PenaltySpec::mcp(1.0, 3.0), 3.5), 0.0);
    EXPECT_NEAR(deriv(PenaltySpec::scad(1.0, 3.7), 2.0), 1.7 / 2.7, 1e-12);
    EXPECT_NEAR(deriv(PenaltySpec::scad(1.0, 3.7), 2.0), 0.62963, 1e-5);
    for (double s : {0.01, 1.0, 50.0}) EXPECT_DOUBLE_EQ(deriv(PenaltySpec::l1(0.3), s), 0.3);
}

TEST(PenaltyDeriv, SlopeAtZeroIsLambda) {
    for (const auto& p : all_families()) {
        EXPECT_DOUBLE_EQ(deriv_at_zero_plus(p), p.lambda);
        EXPECT_DOUBLE_EQ(rho(p), 1.0);
    }
}

TEST(PenaltySecondDeriv, TableExamples) {
    EXPECT_NEAR(second_deriv(PenaltySpec::scad(1.0, 3.7), 2.0), -1.0 / 2.7, 1e-12);
    EXPECT_EQ(second_deriv(PenaltySpec::scad(1.0, 3.7), 0.5), 0.0);
    EXPECT_NEAR(second_deriv(PenaltySpec::mcp(1.0, 3.0), 1.0), -1.0 / 3.0, 1e-12);
    EXPECT_EQ(second_deriv(PenaltySpec::l1(1.0), 1e-9), 0.0);
}

TEST(PenaltyKnots, LeftBranchConvention) {
    const auto p = PenaltySpec::scad(1.0, 3.7);
    EXPECT_DOUBLE_EQ(deriv(p, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(deriv(p, 3.7), 0.0);
    EXPECT_NEAR(second_deriv(p, 1.0), -1.0 / 2.7, 1e-15);
    EXPECT_NEAR(second_deriv(p, 3.7), -1.0 / 2.7, 1e-15);
    const auto m = PenaltySpec::mcp(1.0, 3.0);
    EXPECT_NEAR(second_deriv(m, 3.0), -1.0 / 3.0, 1e-15);
}

TEST(Cccp, Examples) {
    for (const auto& p : all_families()) EXPECT_EQ(cccp_grad(p, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(cccp_grad(PenaltySpec::scad(1.0, 3.7), 10.0), -1.0);
    for (double s : {0.0, 0.2, 4.0}) EXPECT_EQ(cccp_grad(PenaltySpec::l1(0.4), s), 0.0);
}

TEST(Concavity, LocalExamples) {
    Vector b1(3);
    b1 << 0.3, -2.0, 7.0;
    EXPECT_EQ(local_concavity(PenaltySpec::l1(1.0), b1), 0.0);
    Vector b2(2);
    b2 << 0.5, 2.0;
    EXPECT_NEAR(local_concavity(PenaltySpec::scad(1.0, 3.7), b2), 1.0 / 2.7, 1e-12);
    EXPECT_NEAR(local_concavity(PenaltySpec::mcp(1.0, 3.0), Vector::Constant(1, 0.5)), 1.0 / 3.0,
                1e-12);
}

TEST(Concavity, MaximumOverFamilies) {
    EXPECT_EQ(max_concavity(PenaltySpec::l1(1.0)), 0.0);
    EXPECT_NEAR(max_concavity(PenaltySpec::scad(1.0, 3.7)), 1.0 / 2.7, 1e-12);
    EXPECT_NEAR(max_concavity(PenaltySpec::mcp(2.0, 3.0)), 1.0 / 3.0, 1e-12);
}

TEST(PenaltyProperties, ContinuousAtKnots) {
    const double eps = 1e-8;
    for (const auto& p : all_families()) {
        for (double knot : {p.lambda, p.a * p.lambda}) {
            if (knot <= eps) continue;
            // A jump would show up above the slope contribution 2 eps lambda.
            EXPECT_LE(std::abs(value(p, knot - eps) - value(p, knot + eps)),
                      2.0 * eps * p.lambda + 1e-10);
        }
    }
}

TEST(PenaltyProperties, DerivMatchesFiniteDifferences) {
    const double h = 1e-6;
    for (const auto& p : all_families()) {
        for (double s = 0.013; s < 6.0; s += 0.0371) {
            bool near_knot = std::abs(s - p.lambda) < 1e-4 || std::abs(s - p.a * p.lambda) < 1e-4;
            if (near_knot) continue;
            const double fd = (value(p, s + h) - value(p, s - h)) / (2 * h);
            EXPECT_NEAR(deriv(p, s), fd, 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(PenaltyProperties, DerivNonIncreasing) {
    for (const auto& p : all_families()) {
        double prev = deriv(p, 1e-6);
        for (double s = 1e-3; s < 10.0; s += 1e-3) {
            const double d = deriv(p, s);
            EXPECT_LE(d, prev + 1e-15);
            EXPECT_GE(d, 0.0);
            prev = d;
        }
    }
}

TEST(PenaltyProperties, ScadUnbiasedAndSparse) {
    const auto p = PenaltySpec::scad(0.8, 3.7);
    double min_sum = INFINITY;
    for (double s = 1e-4; s < 8.0; s += 1e-3) {
        if (s > p.a * p.lambda) EXPECT_EQ(deriv(p, s), 0.0);
        min_sum = std::min(min_sum, s + deriv(p, s));
    }
    EXPECT_GT(min_sum, 0.0);
}

TEST(PenaltyProperties, CccpTangentMajorizes) {
    for (const auto& p : all_families()) {
        for (double s0 = 0.0; s0 < 5.0; s0 += 0.1) {
            const double g = cccp_grad(p, s0);
            for (double s = 0.0; s < 5.0; s += 0.05) {
                EXPECT_LE(concave_part(p, s), concave_part(p, s0) + g * (s - s0) + 1e-12);
            }
        }
    }
}

TEST(PenaltyTotal, SumsAbsoluteValues) {
    Vector b(3);
    b << -0.5, 0.0, 2.0;
    const auto p = PenaltySpec::scad(1.0);
    EXPECT_DOUBLE_EQ(total_penalty(p, b), value(p, 0.5) + value(p, 2.0));
}
