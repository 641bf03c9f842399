#include "causal/bounds.hpp"

#include <algorithm>

#include "causal/classical_latent.hpp"
#include "causal/simplex.hpp"

namespace causal {

std::pair<double, double> natural_bounds(const ObservedDistribution& d) {
    const double naive = naive_effect(d);
    const double lower = naive - d.p(1, 0, 1) - d.p(0, 1, 0);
    const double upper = naive + d.p(0, 0, 1) + d.p(1, 1, 0);
    return {lower, upper};
}

std::array<double, 8> instrumental_lower(const ObservedDistribution& d) {
    const auto P = [&](int y, int x, int z) { return d.p(y, x, z); };
    return {
        P(1, 1, 1) + P(0, 0, 0) - 1.0,
        P(1, 1, 0) + P(0, 0, 1) - 1.0,
        P(1, 1, 0) - P(1, 1, 1) - P(1, 0, 1) - P(0, 1, 0) - P(1, 0, 0),
        P(1, 1, 1) - P(1, 1, 0) - P(1, 0, 0) - P(0, 1, 1) - P(1, 0, 1),
        -P(0, 1, 1) - P(1, 0, 1),
        -P(0, 1, 0) - P(1, 0, 0),
        P(0, 0, 1) - P(0, 1, 1) - P(1, 0, 1) - P(0, 1, 0) - P(0, 0, 0),
        P(0, 0, 0) - P(0, 1, 0) - P(1, 0, 0) - P(0, 1, 1) - P(0, 0, 1),
    };
}

std::array<double, 8> instrumental_upper(const ObservedDistribution& d) {
    std::array<double, 8> upper = instrumental_lower(d.relabel_y());
    for (double& v : upper) v = -v;
    return upper;
}

std::array<double, 8> instrumental_upper_variant(const ObservedDistribution& d) {
    std::array<double, 8> upper = instrumental_upper(d);
    upper[2] -= 2.0 * d.p(0, 0, 0);
    upper[3] -= 2.0 * d.p(0, 0, 0);
    return upper;
}

UpperVariantDiagnostic diagnose_upper_variant(const ObservedDistribution& d) {
    const std::array<double, 8> lower = instrumental_lower(d);
    const std::array<double, 8> upper = instrumental_upper(d);
    const std::array<double, 8> variant = instrumental_upper_variant(d);
    UpperVariantDiagnostic diag;
    diag.symmetry_row3 = upper[2];
    diag.symmetry_row4 = upper[3];
    diag.variant_row3 = variant[2];
    diag.variant_row4 = variant[3];
    diag.max_lower = *std::max_element(lower.begin(), lower.end());
    diag.variant_inconsistent =
        variant[2] < diag.max_lower || variant[3] < diag.max_lower;
    return diag;
}

namespace {

// One latent type weight per (compliance, response) pair, column b*4 + r.
// Rows: the eight observed cells, then total mass 1.
LinearProgram latent_type_lp(const ObservedDistribution& d) {
    LinearProgram lp;
    lp.objective.assign(16, 0.0);
    for (int b = 0; b < 4; ++b) {
        lp.objective[b * 4 + static_cast<int>(ResponseType::Helped)] = 1.0;
        lp.objective[b * 4 + static_cast<int>(ResponseType::Hurt)] = -1.0;
    }
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) {
                std::vector<double> row(16, 0.0);
                for (int b = 0; b < 4; ++b)
                    for (int r = 0; r < 4; ++r) {
                        const ComplianceType ct = kComplianceTypes[b];
                        const ResponseType rt = kResponseTypes[r];
                        if (decision(ct, z) == x && outcome(rt, x) == y)
                            row[b * 4 + r] = 1.0;
                    }
                lp.constraints.push_back(std::move(row));
                lp.rhs.push_back(d.p(y, x, z));
            }
    lp.constraints.push_back(std::vector<double>(16, 1.0));
    lp.rhs.push_back(1.0);
    return lp;
}

}  // namespace

LpBounds tight_bounds_lp(const ObservedDistribution& d, double feasibility_tol) {
    LinearProgram lp = latent_type_lp(d);
    LpBounds out;

    const LpResult low = solve_lp(lp, feasibility_tol);
    out.phase1_residual = low.phase1_residual;
    if (low.status != LpStatus::Optimal) return out;

    for (double& c : lp.objective) c = -c;
    const LpResult high = solve_lp(lp, feasibility_tol);
    if (high.status != LpStatus::Optimal) return out;

    out.feasible = true;
    out.lower = low.objective;
    out.upper = -high.objective;
    return out;
}

FullReport full_report(const ObservedDistribution& d, std::optional<double> true_ace,
                       double tol) {
    FullReport report;
    report.true_ace = true_ace;

    BoundsReport& b = report.bounds;
    std::tie(b.natural_lower, b.natural_upper) = natural_bounds(d);
    b.inst_lower = instrumental_lower(d);
    b.inst_upper = instrumental_upper(d);
    const LpBounds lp = tight_bounds_lp(d);
    b.lp_lower = lp.lower;
    b.lp_upper = lp.upper;
    b.feasible = lp.feasible;

    if (true_ace) {
        for (int i = 0; i < 8; ++i) {
            if (b.inst_lower[i] > *true_ace + tol)
                report.violations.push_back({"lower", i + 1, b.inst_lower[i]});
            if (b.inst_upper[i] < *true_ace - tol)
                report.violations.push_back({"upper", i + 1, b.inst_upper[i]});
        }
    }
    return report;
}

json_t to_json(const BoundsReport& r) {
    json_t j;
    j["natural_lower"] = r.natural_lower;
    j["natural_upper"] = r.natural_upper;
    j["inst_lower"] = r.inst_lower;
    j["inst_upper"] = r.inst_upper;
    j["lp_lower"] = r.lp_lower ? json_t(*r.lp_lower) : json_t(nullptr);
    j["lp_upper"] = r.lp_upper ? json_t(*r.lp_upper) : json_t(nullptr);
    j["feasible"] = r.feasible;
    return j;
}

json_t to_json(const FullReport& r) {
    json_t j = to_json(r.bounds);
    j["true_ace"] = r.true_ace ? json_t(*r.true_ace) : json_t(nullptr);
    json_t v = json_t::array();
    for (const BoundViolation& viol : r.violations)
        v.push_back(json_t{{"side", viol.side}, {"index", viol.index}, {"value", viol.value}});
    j["violations"] = std::move(v);
    return j;
}

}  // namespace causal
