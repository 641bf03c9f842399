#pragma once

#include <vector>

namespace causal {

// minimize objective . x  subject to  constraints x = rhs, x >= 0
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> constraints;
    std::vector<double> rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> solution;
    // leftover artificial mass after phase 1; meaningful for Infeasible
    double phase1_residual = 0.0;
};

// Two-phase dense simplex with Bland's rule, so degenerate vertices cannot
// cycle and identical inputs always take the identical pivot path.
LpResult solve_lp(const LinearProgram& lp, double feasibility_tol = 1e-8);

}  // namespace causal
