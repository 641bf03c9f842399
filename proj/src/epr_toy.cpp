#include "causal/epr_toy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "causal/bounds.hpp"

namespace causal {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

// counterclockwise rotation of the polarization plane
ComplexMatrix rotation(double angle_deg) {
    const double r = deg2rad(angle_deg);
    ComplexMatrix m(2);
    m.at(0, 0) = std::cos(r);
    m.at(0, 1) = -std::sin(r);
    m.at(1, 0) = std::sin(r);
    m.at(1, 1) = std::cos(r);
    return m;
}

}  // namespace

PolarizerAngles violation_angles() { return {67.5, 22.5, -45.0, 0.0}; }

DensityState singlet_state() {
    // (|hv> - |vh>) / sqrt(2)
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double psi[4] = {0.0, inv_sqrt2, -inv_sqrt2, 0.0};
    ComplexMatrix rho(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho.at(i, j) = psi[i] * psi[j];
    return DensityState(std::move(rho));
}

ComplexMatrix projector(double angle_deg, int outcome) {
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
    const double r = deg2rad(angle_deg);
    const double c = std::cos(r), s = std::sin(r);
    ComplexMatrix p(2);
    p.at(0, 0) = c * c;
    p.at(0, 1) = c * s;
    p.at(1, 0) = c * s;
    p.at(1, 1) = s * s;
    if (outcome == 1) return p;
    ComplexMatrix q = ComplexMatrix::identity(2);
    q -= p;
    return q;
}

double coincidence_probability(double alpha_deg, double beta_deg) {
    return 0.5 * (1.0 - std::cos(2.0 * deg2rad(alpha_deg - beta_deg)));
}

double covariance(double alpha_deg, double beta_deg) {
    return -std::cos(2.0 * deg2rad(alpha_deg - beta_deg));
}

ChshResult chsh(const PolarizerAngles& a) {
    ChshResult r;
    const double alphas[2] = {a.alpha0, a.alpha1};
    const double betas[2] = {a.beta0, a.beta1};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.covariances[i][j] = covariance(alphas[i], betas[j]);
    r.s_value = r.covariances[0][0] + r.covariances[0][1] + r.covariances[1][0] -
                r.covariances[1][1];
    return r;
}

int max_classical_chsh() {
    int best = 0;
    for (int a0 = -1; a0 <= 1; a0 += 2)
        for (int a1 = -1; a1 <= 1; a1 += 2)
            for (int b0 = -1; b0 <= 1; b0 += 2)
                for (int b1 = -1; b1 <= 1; b1 += 2)
                    best = std::max(best, std::abs(a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1));
    return best;
}

ObservedDistribution toy_distribution(const PolarizerAngles& a) {
    const double alphas[2] = {a.alpha0, a.alpha1};
    const double betas[2] = {a.beta0, a.beta1};
    ProbCube p{};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) {
                const double c = std::cos(2.0 * deg2rad(alphas[z] - betas[x]));
                const double sign = (y + x) % 2 == 0 ? 1.0 : -1.0;
                p[y][x][z] = 0.25 * (1.0 - sign * c);
            }
    return ObservedDistribution(p, 0.5);
}

QuantumLatentModel toy_embedding(const PolarizerAngles& a) {
    // Left side carries advice and decision: advice j rotates the frame to
    // alpha_j, the decision branch projects on the frame axis (x=1) or its
    // complement. Right side carries evolution and recovery: branch l
    // rotates to beta_l, recovery passes along the frame axis.
    ComplexMatrix axis_pass(2);
    axis_pass.at(0, 0) = 1.0;
    ComplexMatrix axis_block(2);
    axis_block.at(1, 1) = 1.0;

    return QuantumLatentModel::make_structured(
        2, 2, singlet_state(), {rotation(-a.alpha0)}, {rotation(-a.alpha1)},
        {axis_block}, {axis_pass}, {rotation(-a.beta0)}, {rotation(-a.beta1)}, axis_pass);
}

SecondExperiment second_experiment(const PolarizerAngles& a) {
    SecondExperiment e;
    const double alphas[2] = {a.alpha0, a.alpha1};
    const double betas[2] = {a.beta0, a.beta1};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int w = 0; w < 2; ++w) {
                    const double c = std::cos(2.0 * deg2rad(alphas[z] - betas[w]));
                    const double sign = (x + y) % 2 == 0 ? 1.0 : -1.0;
                    e.p[x][y][z][w] = 0.25 * (1.0 - sign * c);
                }
    for (int z = 0; z < 2; ++z)
        for (int w = 0; w < 2; ++w) {
            double cov = 0.0;
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    cov += (2 * x - 1) * (2 * y - 1) * e.p[x][y][z][w];
            e.chsh.covariances[z][w] = cov;
        }
    e.chsh.s_value = e.chsh.covariances[0][0] + e.chsh.covariances[0][1] +
                     e.chsh.covariances[1][0] - e.chsh.covariances[1][1];
    e.exceeds_classical_bound = std::abs(e.chsh.s_value) > 2.0 + 1e-9;
    return e;
}

ScanResult scan_max_violation(double grid_step_deg) {
    if (!(grid_step_deg > 0.0 && grid_step_deg <= 45.0))
        throw std::invalid_argument("grid step must lie in (0, 45]");
    const int n = static_cast<int>(std::ceil(180.0 / grid_step_deg - 1e-9));

    // Third lower bound on the toy cells in closed form:
    //   1/4 * (-3 - 2 c(a0-b1) + c(a1-b1) - c(a1-b0) - c(a0-b0))
    // with c(d) = cos(2d). On the grid every difference is a multiple of the
    // step, so one table covers all four terms. b0 and b1 appear in separate
    // terms: for fixed (a0, a1) each maximizes independently, which turns
    // the n^4 sweep into an exact n^3 one.
    std::vector<double> c(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d)
        c[d + n - 1] = std::cos(2.0 * deg2rad(d * grid_step_deg));

    double best = 0.0;
    int bi0 = 0, bi1 = 0, bj0 = 0, bj1 = 0;
    bool have_best = false;
    for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1) {
            double part0 = 0.0;
            int j0best = 0;
            for (int j0 = 0; j0 < n; ++j0) {
                const double v = -c[i1 - j0 + n - 1] - c[i0 - j0 + n - 1];
                if (j0 == 0 || v > part0) {
                    part0 = v;
                    j0best = j0;
                }
            }
            double part1 = 0.0;
            int j1best = 0;
            for (int j1 = 0; j1 < n; ++j1) {
                const double v = -2.0 * c[i0 - j1 + n - 1] + c[i1 - j1 + n - 1];
                if (j1 == 0 || v > part1) {
                    part1 = v;
                    j1best = j1;
                }
            }
            const double total = 0.25 * (-3.0 + (part0 + part1));
            if (!have_best || total > best) {
                have_best = true;
                best = total;
                bi0 = i0;
                bi1 = i1;
                bj0 = j0best;
                bj1 = j1best;
            }
        }

    ScanResult r;
    r.angles = {bi0 * grid_step_deg, bi1 * grid_step_deg, bj0 * grid_step_deg,
                bj1 * grid_step_deg};
    // report the value the full pipeline assigns to the winning angles
    r.violation = instrumental_lower(toy_distribution(r.angles))[2] -
                  quantum_ace(toy_embedding(r.angles));
    return r;
}

}  // namespace causal
