#include "causal/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace causal {

namespace {
constexpr double kPivotEps = 1e-11;   // reduced-cost and ratio-test threshold
constexpr double kDriveOutEps = 1e-9; // smallest pivot used to evict an artificial
constexpr int kMaxIterations = 100000;
}  // namespace

LpResult solve_lp(const LinearProgram& lp, double feasibility_tol) {
    const std::size_t n = lp.objective.size();
    const std::size_t m = lp.constraints.size();
    if (lp.rhs.size() != m) throw std::invalid_argument("rhs size does not match row count");
    for (const auto& row : lp.constraints)
        if (row.size() != n) throw std::invalid_argument("constraint width does not match objective");

    // tableau: structural columns, one artificial per row, rhs last
    const std::size_t rhs_col = n + m;
    std::vector<std::vector<double>> t(m, std::vector<double>(n + m + 1, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sgn = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sgn * lp.constraints[i][j];
        t[i][n + i] = 1.0;
        t[i][rhs_col] = sgn * lp.rhs[i];
        basis[i] = n + i;
    }

    auto pivot = [&](std::size_t pr, std::size_t pc) {
        const double pv = t[pr][pc];
        for (double& v : t[pr]) v /= pv;
        t[pr][pc] = 1.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i == pr) continue;
            const double f = t[i][pc];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= rhs_col; ++j) t[i][j] -= f * t[pr][j];
            t[i][pc] = 0.0;
        }
        basis[pr] = pc;
    };

    // Bland's rule: entering = lowest-index improving column, leaving =
    // lowest basis index among minimum-ratio rows. Entering is restricted to
    // structural columns; an artificial that leaves the basis never returns.
    auto run = [&](const std::vector<double>& cost) -> bool {
        for (int iter = 0; iter < kMaxIterations; ++iter) {
            std::size_t enter = n;
            for (std::size_t j = 0; j < n; ++j) {
                double cbar = cost[j];
                for (std::size_t i = 0; i < t.size(); ++i) cbar -= cost[basis[i]] * t[i][j];
                if (cbar < -kPivotEps) {
                    enter = j;
                    break;
                }
            }
            if (enter == n) return true;  // optimal

            std::size_t leave = t.size();
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (t[i][enter] <= kPivotEps) continue;
                const double ratio = t[i][rhs_col] / t[i][enter];
                if (leave == t.size() || ratio < best_ratio - 1e-12 ||
                    (std::abs(ratio - best_ratio) <= 1e-12 && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == t.size()) return false;  // unbounded
            pivot(leave, enter);
        }
        throw std::logic_error("simplex did not terminate");
    };

    // phase 1: minimize the total artificial mass
    std::vector<double> phase1_cost(n + m, 0.0);
    for (std::size_t j = n; j < n + m; ++j) phase1_cost[j] = 1.0;
    run(phase1_cost);

    double residual = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (basis[i] >= n) residual += t[i][rhs_col];
    LpResult result;
    result.phase1_residual = residual;
    if (residual > feasibility_tol) {
        result.status = LpStatus::Infeasible;
        return result;
    }

    // evict zero-level artificials; rows with no structural support are
    // redundant constraints and drop out
    for (std::size_t i = t.size(); i-- > 0;) {
        if (basis[i] < n) continue;
        std::size_t pc = n;
        double best = kDriveOutEps;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(t[i][j]) > best) {
                best = std::abs(t[i][j]);
                pc = j;
            }
        if (pc < n) {
            pivot(i, pc);
        } else {
            t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
            basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }

    // phase 2: the real objective
    std::vector<double> cost(n + m, 0.0);
    for (std::size_t j = 0; j < n; ++j) cost[j] = lp.objective[j];
    if (!run(cost)) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    result.status = LpStatus::Optimal;
    result.solution.assign(n, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i)
        if (basis[i] < n) result.solution[basis[i]] = t[i][rhs_col];
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * result.solution[j];
    result.objective = obj;
    return result;
}

}  // namespace causal
