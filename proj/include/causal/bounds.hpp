#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causal/trial_data.hpp"

namespace causal {

// Bounds on the average causal effect recoverable from one distribution.
// inst_lower / inst_upper are the eight closed-form instrumental bounds per
// side, index 0 holding bound 1. lp_* are empty when no latent type mixture
// reproduces the distribution.
struct BoundsReport {
    double natural_lower = 0.0;
    double natural_upper = 0.0;
    std::array<double, 8> inst_lower{};
    std::array<double, 8> inst_upper{};
    std::optional<double> lp_lower;
    std::optional<double> lp_upper;
    bool feasible = false;
};

struct BoundViolation {
    std::string side;  // "lower" or "upper"
    int index = 0;     // 1-based bound number
    double value = 0.0;
};

struct FullReport {
    BoundsReport bounds;
    std::optional<double> true_ace;
    std::vector<BoundViolation> violations;
};

struct LpBounds {
    std::optional<double> lower;
    std::optional<double> upper;
    bool feasible = false;
    double phase1_residual = 0.0;
};

// naive contrast widened by the never-observed counterfactual mass
std::pair<double, double> natural_bounds(const ObservedDistribution& d);

std::array<double, 8> instrumental_lower(const ObservedDistribution& d);

// Generated from instrumental_lower by relabeling y and reversing sign, so
// the two lists stay consistent by construction.
std::array<double, 8> instrumental_upper(const ObservedDistribution& d);

// Upper list with the trailing P(y0,x0|z0) term of rows 3 and 4 negated, a
// variant that circulates in transcriptions of this bound set. Kept only for
// diagnostics: on some distributions those rows dip below valid lower
// bounds, which is how the sign error is caught.
std::array<double, 8> instrumental_upper_variant(const ObservedDistribution& d);

struct UpperVariantDiagnostic {
    double symmetry_row3 = 0.0;
    double symmetry_row4 = 0.0;
    double variant_row3 = 0.0;
    double variant_row4 = 0.0;
    double max_lower = 0.0;
    // true when a variant row falls below the best valid lower bound
    bool variant_inconsistent = false;
};
UpperVariantDiagnostic diagnose_upper_variant(const ObservedDistribution& d);

// Sharp bounds by linear programming over the 16 latent type weights.
LpBounds tight_bounds_lp(const ObservedDistribution& d, double feasibility_tol = 1e-8);

// All bounds plus, when a reference effect is supplied, the list of bounds
// it violates beyond tol.
FullReport full_report(const ObservedDistribution& d,
                       std::optional<double> true_ace = std::nullopt, double tol = 1e-9);

json_t to_json(const BoundsReport& r);
json_t to_json(const FullReport& r);

}  // namespace causal
