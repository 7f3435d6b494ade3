#include "dpdncv/penalty.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace dpdncv {

std::string to_string(PenaltyFamily family) {
    switch (family) {
        case PenaltyFamily::L1: return "l1";
        case PenaltyFamily::SCAD: return "scad";
        case PenaltyFamily::MCP: return "mcp";
    }
    return "unknown";
}

PenaltyFamily parse_penalty_family(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "l1" || lower == "lasso") return PenaltyFamily::L1;
    if (lower == "scad") return PenaltyFamily::SCAD;
    if (lower == "mcp") return PenaltyFamily::MCP;
    throw std::invalid_argument("unknown penalty family '" + std::string(name) + "'");
}

PenaltySpec PenaltySpec::make(PenaltyFamily family, double lambda, double a) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("penalty lambda must be finite and > 0");
    }
    if (family == PenaltyFamily::SCAD && !(a > 2.0)) {
        throw std::invalid_argument("SCAD requires a > 2");
    }
    if (family == PenaltyFamily::MCP && !(a > 1.0)) {
        throw std::invalid_argument("MCP requires a > 1");
    }
    return PenaltySpec{family, lambda, a};
}

namespace {

void require_nonnegative(double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("penalty argument must be >= 0 (pass |beta_j|)");
}

}  // namespace

double value(const PenaltySpec& pen, double s) {
    require_nonnegative(s);
    const double lam = pen.lambda;
    const double a = pen.a;
    switch (pen.family) {
        case PenaltyFamily::L1:
            return lam * s;
        case PenaltyFamily::SCAD:
            if (s <= lam) return lam * s;
            if (s <= a * lam) return (2.0 * a * lam * s - s * s - lam * lam) / (2.0 * (a - 1.0));
            return 0.5 * (a + 1.0) * lam * lam;
        case PenaltyFamily::MCP:
            if (s <= a * lam) return lam * s - s * s / (2.0 * a);
            return 0.5 * a * lam * lam;
    }
    return 0.0;
}

double deriv(const PenaltySpec& pen, double s) {
    require_nonnegative(s);
    const double lam = pen.lambda;
    const double a = pen.a;
    switch (pen.family) {
        case PenaltyFamily::L1:
            return lam;
        case PenaltyFamily::SCAD:
            if (s <= lam) return lam;
            if (s <= a * lam) return (a * lam - s) / (a - 1.0);
            return 0.0;
        case PenaltyFamily::MCP:
            if (s <= a * lam) return (a * lam - s) / a;
            return 0.0;
    }
    return 0.0;
}

double deriv_at_zero_plus(const PenaltySpec& pen) { return deriv(pen, 0.0); }

double second_deriv(const PenaltySpec& pen, double s) {
    require_nonnegative(s);
    const double lam = pen.lambda;
    const double a = pen.a;
    switch (pen.family) {
        case PenaltyFamily::L1:
            return 0.0;
        case PenaltyFamily::SCAD:
            return (s >= lam && s <= a * lam) ? -1.0 / (a - 1.0) : 0.0;
        case PenaltyFamily::MCP:
            return (s <= a * lam) ? -1.0 / a : 0.0;
    }
    return 0.0;
}

double rho(const PenaltySpec& pen) { return deriv_at_zero_plus(pen) / pen.lambda; }

double cccp_grad(const PenaltySpec& pen, double s_current) {
    require_nonnegative(s_current);
    if (s_current == 0.0) return 0.0;
    return deriv(pen, s_current) - pen.lambda;
}

double local_concavity(const PenaltySpec& pen, const Vector& b) {
    double zeta = 0.0;
    for (Index j = 0; j < b.size(); ++j) {
        zeta = std::max(zeta, -second_deriv(pen, std::abs(b[j])));
    }
    return zeta;
}

double max_concavity(const PenaltySpec& pen) {
    switch (pen.family) {
        case PenaltyFamily::L1: return 0.0;
        case PenaltyFamily::SCAD: return 1.0 / (pen.a - 1.0);
        case PenaltyFamily::MCP: return 1.0 / pen.a;
    }
    return 0.0;
}

double total_penalty(const PenaltySpec& pen, const Vector& beta) {
    double total = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) total += value(pen, std::abs(beta[j]));
    }
    return total;
}

}  // namespace dpdncv
