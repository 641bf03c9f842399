#pragma once

#include <array>

#include "causal/quantum_latent.hpp"
#include "causal/trial_data.hpp"

namespace causal {

// Polarizer settings in degrees; only the value mod 180 matters.
struct PolarizerAngles {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double beta0 = 0.0;
    double beta1 = 0.0;
    friend bool operator==(const PolarizerAngles&, const PolarizerAngles&) = default;
};

// The angle set at which the third instrumental lower bound certifies a
// 13.4% effect while the generating mechanism has none.
PolarizerAngles violation_angles();

// Two photons in the rotation-invariant entangled polarization state.
DensityState singlet_state();

// Rank-one projector onto the polarization at `angle_deg` (outcome 1) or its
// orthogonal complement (outcome 0).
ComplexMatrix projector(double angle_deg, int outcome);

// P(the two pass/block results agree) for filters at alpha and beta:
// (1 - cos 2(a-b)) / 2. Zero at equal angles, one at 90 degrees apart.
double coincidence_probability(double alpha_deg, double beta_deg);

// expectation of the +-1 pass/block product for one filter pair: -cos 2(a-b)
double covariance(double alpha_deg, double beta_deg);

struct ChshResult {
    // covariances[i][j] pairs alpha_i with beta_j
    std::array<std::array<double, 2>, 2> covariances{};
    double s_value = 0.0;
};

// C(a0,b0) + C(a0,b1) + C(a1,b0) - C(a1,b1)
ChshResult chsh(const PolarizerAngles& a);

// Largest |s| over the 16 deterministic local strategies; exactly 2.
int max_classical_chsh();

// Trial distribution read off the filter pairs: advice arm z sets the left
// filter to alpha_z, treatment x is the left outcome measured against
// beta_x's partner frame, recovery y is the right outcome at beta_x.
ObservedDistribution toy_distribution(const PolarizerAngles& a);

// The same mechanism packaged as a structured quantum latent model on two
// qubits. observed_distribution of the result reproduces toy_distribution.
QuantumLatentModel toy_embedding(const PolarizerAngles& a);

struct SecondExperiment {
    // p[x][y][z][w]: left outcome x at angle alpha_z, right outcome y at beta_w
    std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> p{};
    ChshResult chsh;
    bool exceeds_classical_bound = false;
};

// Both filters externally randomized; the cells feed the CHSH combination.
SecondExperiment second_experiment(const PolarizerAngles& a);

struct ScanResult {
    PolarizerAngles angles;
    // third instrumental lower bound minus the embedding's true effect
    double violation = 0.0;
};

// Exhaustive grid search over all four angles in [0, 180) with the given
// step. Deterministic; ties keep the lexicographically first
// (alpha0, alpha1, beta0, beta1). Throws std::invalid_argument unless
// 0 < grid_step_deg <= 45.
ScanResult scan_max_violation(double grid_step_deg);

}  // namespace causal
