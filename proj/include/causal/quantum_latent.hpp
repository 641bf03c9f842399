#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "causal/operator_core.hpp"
#include "causal/trial_data.hpp"

namespace causal {

struct InadmissibleModel : std::runtime_error {
    explicit InadmissibleModel(const std::string& msg) : std::runtime_error(msg) {}
};

// Latent quantum mechanism behind a noncompliance trial, in the Heisenberg
// picture on a bipartite space of dimension dim_a * dim_b:
//   advice[j]    unital map recording which advice was delivered
//   decision     two-outcome instrument, branch k = treatment intake k
//   evolution[l] unital map for staying untreated (l=0) or treated (l=1)
//   recovery     yes-no recovery measurement
// Cell probabilities compose right-to-left on the recovery effect,
// e.g. P(y=1, x=k | z=j) = state( advice_j( decision_k( evolution_k(recovery) ) ) ).
//
// The structured flag marks models whose advice and decision act on factor A
// only while evolution and recovery act on factor B only; for those, the
// exclusion restriction holds identically, not just numerically.
class QuantumLatentModel {
public:
    QuantumLatentModel(int dim_a, int dim_b, DensityState state, KrausMap advice0,
                       KrausMap advice1, Instrument decision, KrausMap evolution0,
                       KrausMap evolution1, Effect recovery, bool structured);

    // Assembles a structured model from factor-local pieces: advice and
    // decision Kraus operators of dimension dim_a, evolution Kraus operators
    // and the recovery matrix of dimension dim_b.
    static QuantumLatentModel make_structured(
        int dim_a, int dim_b, DensityState state,
        const std::vector<ComplexMatrix>& advice0_a,
        const std::vector<ComplexMatrix>& advice1_a,
        const std::vector<ComplexMatrix>& decision0_a,
        const std::vector<ComplexMatrix>& decision1_a,
        const std::vector<ComplexMatrix>& evolution0_b,
        const std::vector<ComplexMatrix>& evolution1_b, const ComplexMatrix& recovery_b);

    int dim_a() const { return dim_a_; }
    int dim_b() const { return dim_b_; }
    int dim() const { return dim_a_ * dim_b_; }
    const DensityState& state() const { return state_; }
    const KrausMap& advice(int j) const { return advice_[j]; }
    const Instrument& decision() const { return decision_; }
    const KrausMap& evolution(int l) const { return evolution_[l]; }
    const Effect& recovery() const { return recovery_; }
    bool structured() const { return structured_; }

    json_t to_json() const;
    static QuantumLatentModel from_json(const json_t& j);

private:
    int dim_a_;
    int dim_b_;
    DensityState state_;
    std::array<KrausMap, 2> advice_;
    Instrument decision_;
    std::array<KrausMap, 2> evolution_;
    Effect recovery_;
    bool structured_;
};

// recovery effect seen after evolution branch l: evolution_l(recovery)
ComplexMatrix drugged_recovery(const QuantumLatentModel& m, int l);

// max over l of |state(advice1(decision_total(m_l))) - state(advice0(...))|,
// the exclusion-restriction deviation
double check_exclusion(const QuantumLatentModel& m);

// unital advice/evolution maps and exclusion within tol
bool is_admissible(const QuantumLatentModel& m, double tol = 1e-9);

// Trial distribution generated by the mechanism; advice arm probability pz.
// Throws InadmissibleModel when is_admissible fails.
ObservedDistribution observed_distribution(const QuantumLatentModel& m, double pz = 0.5,
                                           double tol = 1e-9);

// P(y=1, x=k | z=j) with the evolution branch forced to l: the cross-branch
// cell that no trial can sample when l != k
double counterfactual(const QuantumLatentModel& m, int j, int k, int l, double tol = 1e-9);

// state(advice1(decision_total(m1))) - state(advice1(decision_total(m0)))
double quantum_ace(const QuantumLatentModel& m, double tol = 1e-9);

struct CertificateValue {
    double operator_min_eig = 0.0;  // smallest eigenvalue of the certificate operator
    double state_value = 0.0;       // its expectation in the model state
};

// Certificate operator for lower bound 1:
//   1 + advice1(D(m1)) - advice1(D(m0)) - advice1(D1(m1)) - advice0(D0(1 - m0))
// A nonnegative state_value certifies that bound 1 cannot exceed the true
// effect; for structured models the operator itself is positive
// semidefinite.
CertificateValue certificate_group1(const QuantumLatentModel& m, double tol = 1e-9);

// Certificate operator advice1(D0(m1)) + advice0(D1(1 - m0)) for the natural
// bounds; positive semidefinite for every admissible model.
double certificate_natural(const QuantumLatentModel& m, double tol = 1e-9);

// model relabelings; each preserves admissibility
QuantumLatentModel swap_advice(const QuantumLatentModel& m);             // z0 <-> z1
QuantumLatentModel swap_treatment_outcome(const QuantumLatentModel& m);  // x, y jointly
QuantumLatentModel unify_advice(const QuantumLatentModel& m, int j);     // both arms = advice j
QuantumLatentModel with_state(const QuantumLatentModel& m, DensityState state);

// The survivor group: bounds that remain sound under quantum latent factors.
inline constexpr std::array<int, 4> kGroupOneIndices{1, 2, 5, 6};

// Certificates for bounds 1, 2, 5, 6, obtained by re-running
// certificate_group1 on the relabeled models
//   {identity, swap_advice, unify_advice(1), unify_advice(0)}.
std::array<CertificateValue, 4> group1_certificates(const QuantumLatentModel& m,
                                                    double tol = 1e-9);

// Random structured model: random pure state (mixed toward the identity by
// mix_weight), Haar advice/evolution unitaries, a random projective decision
// split on factor A, and a random B-side recovery effect.
QuantumLatentModel random_model(std::uint64_t seed, int dim_a, int dim_b,
                                double mix_weight = 0.0);

}  // namespace causal
