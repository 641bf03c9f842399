#include "causal/quantum_latent.hpp"

#include <cmath>
#include <utility>

#include "causal/rng.hpp"

namespace causal {

namespace {

std::vector<ComplexMatrix> tensored_with_identity_right(
    const std::vector<ComplexMatrix>& ops, int dim_b) {
    const ComplexMatrix ib = ComplexMatrix::identity(dim_b);
    std::vector<ComplexMatrix> out;
    out.reserve(ops.size());
    for (const ComplexMatrix& k : ops) out.push_back(tensor(k, ib));
    return out;
}

std::vector<ComplexMatrix> tensored_with_identity_left(
    const std::vector<ComplexMatrix>& ops, int dim_a) {
    const ComplexMatrix ia = ComplexMatrix::identity(dim_a);
    std::vector<ComplexMatrix> out;
    out.reserve(ops.size());
    for (const ComplexMatrix& k : ops) out.push_back(tensor(ia, k));
    return out;
}

double state_value(const QuantumLatentModel& m, const ComplexMatrix& a) {
    return m.state().expectation(a).real();
}

void require_admissible(const QuantumLatentModel& m, double tol) {
    if (!is_admissible(m, tol))
        throw InadmissibleModel("model violates the exclusion restriction beyond " +
                                std::to_string(tol));
}

void require_bit(int v, const char* name) {
    if (v != 0 && v != 1) throw std::invalid_argument(std::string(name) + " must be 0 or 1");
}

}  // namespace

QuantumLatentModel::QuantumLatentModel(int dim_a, int dim_b, DensityState state,
                                       KrausMap advice0, KrausMap advice1,
                                       Instrument decision, KrausMap evolution0,
                                       KrausMap evolution1, Effect recovery,
                                       bool structured)
    : dim_a_(dim_a),
      dim_b_(dim_b),
      state_(std::move(state)),
      advice_{std::move(advice0), std::move(advice1)},
      decision_(std::move(decision)),
      evolution_{std::move(evolution0), std::move(evolution1)},
      recovery_(std::move(recovery)),
      structured_(structured) {
    if (dim_a_ < 1 || dim_b_ < 1) throw std::invalid_argument("factor dimensions must be >= 1");
    const int d = dim_a_ * dim_b_;
    if (state_.dim() != d || decision_.dim() != d || recovery_.dim() != d ||
        advice_[0].dim() != d || advice_[1].dim() != d || evolution_[0].dim() != d ||
        evolution_[1].dim() != d)
        throw DimMismatch("model pieces must share dimension dim_a * dim_b");
    for (int j = 0; j < 2; ++j) {
        if (!advice_[j].unital()) throw InvalidOperator("advice maps must be unital");
        if (!evolution_[j].unital()) throw InvalidOperator("evolution maps must be unital");
    }
}

QuantumLatentModel QuantumLatentModel::make_structured(
    int dim_a, int dim_b, DensityState state,
    const std::vector<ComplexMatrix>& advice0_a, const std::vector<ComplexMatrix>& advice1_a,
    const std::vector<ComplexMatrix>& decision0_a,
    const std::vector<ComplexMatrix>& decision1_a,
    const std::vector<ComplexMatrix>& evolution0_b,
    const std::vector<ComplexMatrix>& evolution1_b, const ComplexMatrix& recovery_b) {
    for (const auto* side : {&advice0_a, &advice1_a, &decision0_a, &decision1_a})
        for (const ComplexMatrix& k : *side)
            if (k.dim() != dim_a) throw DimMismatch("factor-A piece has wrong dimension");
    for (const auto* side : {&evolution0_b, &evolution1_b})
        for (const ComplexMatrix& k : *side)
            if (k.dim() != dim_b) throw DimMismatch("factor-B piece has wrong dimension");
    if (recovery_b.dim() != dim_b) throw DimMismatch("factor-B piece has wrong dimension");

    return QuantumLatentModel(
        dim_a, dim_b, std::move(state),
        KrausMap(tensored_with_identity_right(advice0_a, dim_b)),
        KrausMap(tensored_with_identity_right(advice1_a, dim_b)),
        Instrument(KrausMap(tensored_with_identity_right(decision0_a, dim_b)),
                   KrausMap(tensored_with_identity_right(decision1_a, dim_b))),
        KrausMap(tensored_with_identity_left(evolution0_b, dim_a)),
        KrausMap(tensored_with_identity_left(evolution1_b, dim_a)),
        Effect(tensor(ComplexMatrix::identity(dim_a), recovery_b)), true);
}

json_t QuantumLatentModel::to_json() const {
    json_t j;
    j["dimA"] = dim_a_;
    j["dimB"] = dim_b_;
    j["rho"] = matrix_to_json(state_.matrix());
    j["G0"] = kraus_to_json(advice_[0]);
    j["G1"] = kraus_to_json(advice_[1]);
    j["D0"] = kraus_to_json(decision_.branch(0));
    j["D1"] = kraus_to_json(decision_.branch(1));
    j["E0"] = kraus_to_json(evolution_[0]);
    j["E1"] = kraus_to_json(evolution_[1]);
    j["m"] = matrix_to_json(recovery_.matrix());
    j["structured"] = structured_;
    return j;
}

QuantumLatentModel QuantumLatentModel::from_json(const json_t& j) {
    return QuantumLatentModel(
        j.at("dimA").get<int>(), j.at("dimB").get<int>(),
        DensityState(matrix_from_json(j.at("rho"))), kraus_from_json(j.at("G0")),
        kraus_from_json(j.at("G1")),
        Instrument(kraus_from_json(j.at("D0")), kraus_from_json(j.at("D1"))),
        kraus_from_json(j.at("E0")), kraus_from_json(j.at("E1")),
        Effect(matrix_from_json(j.at("m"))), j.at("structured").get<bool>());
}

ComplexMatrix drugged_recovery(const QuantumLatentModel& m, int l) {
    require_bit(l, "evolution branch");
    return m.evolution(l).apply(m.recovery().matrix());
}

double check_exclusion(const QuantumLatentModel& m) {
    double worst = 0.0;
    for (int l = 0; l < 2; ++l) {
        const ComplexMatrix seen = m.decision().apply_total(drugged_recovery(m, l));
        const double dev =
            std::abs(state_value(m, m.advice(1).apply(seen)) -
                     state_value(m, m.advice(0).apply(seen)));
        worst = std::max(worst, dev);
    }
    return worst;
}

bool is_admissible(const QuantumLatentModel& m, double tol) {
    // unitality is a construction invariant; exclusion is the live check
    return check_exclusion(m) <= tol;
}

ObservedDistribution observed_distribution(const QuantumLatentModel& m, double pz,
                                           double tol) {
    require_admissible(m, tol);
    const ComplexMatrix one = ComplexMatrix::identity(m.dim());
    ProbCube p{};
    for (int k = 0; k < 2; ++k) {
        ComplexMatrix not_recovered = one;
        not_recovered -= m.recovery().matrix();
        const ComplexMatrix yes = m.decision().branch(k).apply(
            m.evolution(k).apply(m.recovery().matrix()));
        const ComplexMatrix no =
            m.decision().branch(k).apply(m.evolution(k).apply(not_recovered));
        for (int j = 0; j < 2; ++j) {
            p[1][k][j] = state_value(m, m.advice(j).apply(yes));
            p[0][k][j] = state_value(m, m.advice(j).apply(no));
        }
    }
    return ObservedDistribution(p, pz);
}

double counterfactual(const QuantumLatentModel& m, int j, int k, int l, double tol) {
    require_bit(j, "advice arm");
    require_bit(k, "decision branch");
    require_admissible(m, tol);
    return state_value(m, m.advice(j).apply(m.decision().branch(k).apply(
                              drugged_recovery(m, l))));
}

double quantum_ace(const QuantumLatentModel& m, double tol) {
    require_admissible(m, tol);
    const ComplexMatrix seen1 = m.decision().apply_total(drugged_recovery(m, 1));
    const ComplexMatrix seen0 = m.decision().apply_total(drugged_recovery(m, 0));
    return state_value(m, m.advice(1).apply(seen1)) -
           state_value(m, m.advice(1).apply(seen0));
}

CertificateValue certificate_group1(const QuantumLatentModel& m, double tol) {
    require_admissible(m, tol);
    const ComplexMatrix one = ComplexMatrix::identity(m.dim());
    const ComplexMatrix m1 = drugged_recovery(m, 1);
    const ComplexMatrix m0 = drugged_recovery(m, 0);
    ComplexMatrix untreated_miss = one;
    untreated_miss -= m0;

    ComplexMatrix cert = one;
    cert += m.advice(1).apply(m.decision().apply_total(m1));
    cert -= m.advice(1).apply(m.decision().apply_total(m0));
    cert -= m.advice(1).apply(m.decision().branch(1).apply(m1));
    cert -= m.advice(0).apply(m.decision().branch(0).apply(untreated_miss));

    return {min_eigenvalue(cert), state_value(m, cert)};
}

double certificate_natural(const QuantumLatentModel& m, double tol) {
    require_admissible(m, tol);
    const ComplexMatrix one = ComplexMatrix::identity(m.dim());
    ComplexMatrix untreated_miss = one;
    untreated_miss -= drugged_recovery(m, 0);

    ComplexMatrix cert = m.advice(1).apply(m.decision().branch(0).apply(drugged_recovery(m, 1)));
    cert += m.advice(0).apply(m.decision().branch(1).apply(untreated_miss));
    return min_eigenvalue(cert);
}

QuantumLatentModel swap_advice(const QuantumLatentModel& m) {
    return QuantumLatentModel(m.dim_a(), m.dim_b(), m.state(), m.advice(1), m.advice(0),
                              m.decision(), m.evolution(0), m.evolution(1), m.recovery(),
                              m.structured());
}

QuantumLatentModel swap_treatment_outcome(const QuantumLatentModel& m) {
    return QuantumLatentModel(m.dim_a(), m.dim_b(), m.state(),
                              m.advice(0), m.advice(1),
                              Instrument(m.decision().branch(1), m.decision().branch(0)),
                              m.evolution(1), m.evolution(0),
                              m.recovery().complement(), m.structured());
}

QuantumLatentModel unify_advice(const QuantumLatentModel& m, int j) {
    require_bit(j, "advice arm");
    return QuantumLatentModel(m.dim_a(), m.dim_b(), m.state(), m.advice(j), m.advice(j),
                              m.decision(), m.evolution(0), m.evolution(1), m.recovery(),
                              m.structured());
}

QuantumLatentModel with_state(const QuantumLatentModel& m, DensityState state) {
    return QuantumLatentModel(m.dim_a(), m.dim_b(), std::move(state), m.advice(0),
                              m.advice(1), m.decision(), m.evolution(0), m.evolution(1),
                              m.recovery(), m.structured());
}

std::array<CertificateValue, 4> group1_certificates(const QuantumLatentModel& m,
                                                    double tol) {
    return {certificate_group1(m, tol), certificate_group1(swap_advice(m), tol),
            certificate_group1(unify_advice(m, 1), tol),
            certificate_group1(unify_advice(m, 0), tol)};
}

namespace {

ComplexMatrix random_ginibre(Rng& rng, int d) {
    ComplexMatrix g(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g.at(i, j) = cplx(rng.gaussian(), rng.gaussian());
    return g;
}

// Ginibre columns through modified Gram-Schmidt; the positive-real
// normalization coefficients make the result Haar distributed.
ComplexMatrix random_unitary(Rng& rng, int d) {
    ComplexMatrix g = random_ginibre(rng, d);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < j; ++k) {
            cplx overlap = 0.0;
            for (int i = 0; i < d; ++i) overlap += std::conj(g.at(i, k)) * g.at(i, j);
            for (int i = 0; i < d; ++i) g.at(i, j) -= overlap * g.at(i, k);
        }
        double norm = 0.0;
        for (int i = 0; i < d; ++i) norm += std::norm(g.at(i, j));
        norm = std::sqrt(norm);
        for (int i = 0; i < d; ++i) g.at(i, j) /= norm;
    }
    return g;
}

DensityState random_state(Rng& rng, int d, double mix_weight) {
    std::vector<cplx> v(d);
    double norm = 0.0;
    for (cplx& c : v) {
        c = cplx(rng.gaussian(), rng.gaussian());
        norm += std::norm(c);
    }
    norm = std::sqrt(norm);
    ComplexMatrix rho(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            rho.at(i, j) = (1.0 - mix_weight) * (v[i] / norm) * std::conj(v[j] / norm);
    for (int i = 0; i < d; ++i) rho.at(i, i) += mix_weight / d;
    return DensityState(std::move(rho));
}

// random Hermitian rescaled so its spectrum spans [0, 1]
ComplexMatrix random_effect_matrix(Rng& rng, int d) {
    const ComplexMatrix g = random_ginibre(rng, d);
    ComplexMatrix h = g;
    h += g.adjoint();
    h *= cplx(0.5, 0.0);
    const std::vector<double> eig = hermitian_eigenvalues(h);
    const double spread = eig.back() - eig.front();
    if (spread < 1e-12) {
        ComplexMatrix half = ComplexMatrix::identity(d);
        half *= cplx(0.5, 0.0);
        return half;
    }
    ComplexMatrix shift = ComplexMatrix::identity(d);
    shift *= cplx(eig.front(), 0.0);
    h -= shift;
    h *= cplx(1.0 / spread, 0.0);
    return h;
}

}  // namespace

QuantumLatentModel random_model(std::uint64_t seed, int dim_a, int dim_b,
                                double mix_weight) {
    if (dim_a < 2) throw std::invalid_argument("dim_a must be >= 2 for a two-outcome split");
    if (dim_b < 1) throw std::invalid_argument("dim_b must be >= 1");
    if (!(mix_weight >= 0.0 && mix_weight <= 1.0))
        throw std::invalid_argument("mix_weight must lie in [0, 1]");

    // the draw order below is part of the seed contract
    Rng rng(seed);
    DensityState state = random_state(rng, dim_a * dim_b, mix_weight);
    const ComplexMatrix advice0 = random_unitary(rng, dim_a);
    const ComplexMatrix advice1 = random_unitary(rng, dim_a);

    const int rank = 1 + rng.uniform_int(dim_a - 1);
    const ComplexMatrix v = random_unitary(rng, dim_a);
    ComplexMatrix take(dim_a);
    for (int r = 0; r < rank; ++r)
        for (int i = 0; i < dim_a; ++i)
            for (int j = 0; j < dim_a; ++j)
                take.at(i, j) += v.at(i, r) * std::conj(v.at(j, r));
    ComplexMatrix refuse = ComplexMatrix::identity(dim_a);
    refuse -= take;

    const ComplexMatrix evolution0 = random_unitary(rng, dim_b);
    const ComplexMatrix evolution1 = random_unitary(rng, dim_b);
    const ComplexMatrix recovery = random_effect_matrix(rng, dim_b);

    return QuantumLatentModel::make_structured(dim_a, dim_b, std::move(state), {advice0},
                                               {advice1}, {refuse}, {take}, {evolution0},
                                               {evolution1}, recovery);
}

}  // namespace causal
