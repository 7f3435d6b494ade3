#pragma once

#include "dpdncv/types.hpp"

#include <string>
#include <string_view>

namespace dpdncv {

enum class PenaltyFamily { L1, SCAD, MCP };

std::string to_string(PenaltyFamily family);
/// Accepts "l1", "lasso", "scad", "mcp" (case-insensitive).
PenaltyFamily parse_penalty_family(std::string_view name);

inline constexpr double kDefaultScadA = 3.7;
inline constexpr double kDefaultMcpA = 3.0;

/// Folded-concave penalty p_lambda(|s|). All three families satisfy
/// p'(0+) = lambda, so rho(p_lambda) = 1.
struct PenaltySpec {
    PenaltyFamily family = PenaltyFamily::SCAD;
    double lambda = 1.0;
    double a = kDefaultScadA;

    /// Validates lambda > 0 and the family constraint on a.
    static PenaltySpec make(PenaltyFamily family, double lambda, double a);
    static PenaltySpec l1(double lambda) { return make(PenaltyFamily::L1, lambda, 0.0); }
    static PenaltySpec scad(double lambda, double a = kDefaultScadA) {
        return make(PenaltyFamily::SCAD, lambda, a);
    }
    static PenaltySpec mcp(double lambda, double a = kDefaultMcpA) {
        return make(PenaltyFamily::MCP, lambda, a);
    }

    PenaltySpec with_lambda(double new_lambda) const { return make(family, new_lambda, a); }
};

// Knots: at s == lambda or s == a*lambda the left branch is used for value and
// deriv; second_deriv takes the more negative one-sided value. s == 0 is read
// as 0+ wherever a one-sided limit is meant.

double value(const PenaltySpec& pen, double s);
double deriv(const PenaltySpec& pen, double s);
double deriv_at_zero_plus(const PenaltySpec& pen);
double second_deriv(const PenaltySpec& pen, double s);

/// rho(p_lambda) = p'(0+)/lambda.
double rho(const PenaltySpec& pen);

/// Derivative of the concave part J(s) = p(s) - lambda*s at s >= 0.
double cccp_grad(const PenaltySpec& pen, double s_current);

/// max_j { -p''(|b_j|) }.
double local_concavity(const PenaltySpec& pen, const Vector& b);

/// sup over (0, inf) of -p''.
double max_concavity(const PenaltySpec& pen);

/// sum_j p(|beta_j|).
double total_penalty(const PenaltySpec& pen, const Vector& beta);

}  // namespace dpdncv
