#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "causal/bounds.hpp"
#include "causal/quantum_latent.hpp"
#include "causal/rng.hpp"

using namespace causal;

namespace {

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix m(2);
    m.at(0, 0) = a;
    m.at(1, 1) = b;
    return m;
}

ComplexMatrix rot(double deg) {
    const double t = deg * M_PI / 180.0;
    ComplexMatrix r(2);
    r.at(0, 0) = std::cos(t);
    r.at(0, 1) = -std::sin(t);
    r.at(1, 0) = std::sin(t);
    r.at(1, 1) = std::cos(t);
    return r;
}

// rho_B[k][l] = sum_i rho[(i,k),(i,l)]
ComplexMatrix partial_trace_a(const ComplexMatrix& rho, int da, int db) {
    ComplexMatrix out(db);
    for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
            for (int i = 0; i < da; ++i) out.at(k, l) += rho.at(i * db + k, i * db + l);
    return out;
}

// rho_A[i][i'] = sum_k rho[(i,k),(i',k)]
ComplexMatrix partial_trace_b(const ComplexMatrix& rho, int da, int db) {
    ComplexMatrix out(da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k) out.at(i, j) += rho.at(i * db + k, j * db + k);
    return out;
}

// top-left B block of a matrix of the form 1_A (x) b
ComplexMatrix b_block(const ComplexMatrix& full, int db) {
    ComplexMatrix out(db);
    for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) out.at(k, l) = full.at(k, l);
    return out;
}

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a * b).trace().real();
}

DensityState product_diag_state(double a0, double b0) {
    return DensityState(tensor(diag2(a0, 1.0 - a0), diag2(b0, 1.0 - b0)));
}

DensityState random_pure_state(Rng& rng, int d) {
    std::vector<cplx> v(d);
    double norm = 0.0;
    for (cplx& c : v) {
        c = cplx(rng.gaussian(), rng.gaussian());
        norm += std::norm(c);
    }
    norm = std::sqrt(norm);
    ComplexMatrix rho(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) rho.at(i, j) = (v[i] / norm) * std::conj(v[j] / norm);
    return DensityState(std::move(rho));
}

// A-side advice acting on the B factor: exclusion fails by exactly 1/2
QuantumLatentModel exclusion_violator() {
    ComplexMatrix rho(4);
    rho.at(0, 0) = 1.0;  // |00><00|
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    return QuantumLatentModel(
        2, 2, DensityState(rho), KrausMap::identity_map(4),
        KrausMap({tensor(i2, rot(45.0))}),
        Instrument(KrausMap({tensor(diag2(0.0, 1.0), i2)}),
                   KrausMap({tensor(diag2(1.0, 0.0), i2)})),
        KrausMap::identity_map(4), KrausMap::identity_map(4),
        Effect(tensor(i2, diag2(1.0, 0.0))), false);
}

}  // namespace

TEST_CASE("product state factorizes into decision and recovery marginals") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    const QuantumLatentModel m = QuantumLatentModel::make_structured(
        2, 2, product_diag_state(0.6, 0.3), {i2}, {i2}, {diag2(0.0, 1.0)},
        {diag2(1.0, 0.0)}, {i2}, {i2}, diag2(0.8, 0.1));

    // P(x=1|z) = 0.6, P(y=1|any branch) = 0.3*0.8 + 0.7*0.1 = 0.31
    const ObservedDistribution d = observed_distribution(m);
    for (int z = 0; z < 2; ++z) {
        CHECK(d.p(1, 1, z) == doctest::Approx(0.186).epsilon(1e-13));
        CHECK(d.p(1, 0, z) == doctest::Approx(0.124).epsilon(1e-13));
        CHECK(d.p(0, 1, z) == doctest::Approx(0.414).epsilon(1e-13));
        CHECK(d.p(0, 0, z) == doctest::Approx(0.276).epsilon(1e-13));
    }
    CHECK(d.pz() == 0.5);

    // same cells from the two factor marginals computed independently
    const ComplexMatrix rho_a = partial_trace_b(m.state().matrix(), 2, 2);
    const ComplexMatrix rho_b = partial_trace_a(m.state().matrix(), 2, 2);
    const double take = real_trace_product(rho_a, diag2(1.0, 0.0));
    const double recover = real_trace_product(rho_b, diag2(0.8, 0.1));
    CHECK(d.p(1, 1, 0) == doctest::Approx(take * recover).epsilon(1e-14));
    CHECK(d.p(1, 0, 0) == doctest::Approx((1.0 - take) * recover).epsilon(1e-14));

    CHECK(std::abs(quantum_ace(m)) <= 1e-15);  // identical drug evolutions
    CHECK(check_exclusion(m) <= 1e-15);
    CHECK(is_admissible(m));
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            CHECK(counterfactual(m, j, k, 0) ==
                  doctest::Approx(counterfactual(m, j, k, 1)).epsilon(1e-15));
}

TEST_CASE("rotated drug evolution shifts recovery by the B-side expectation") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    const ComplexMatrix recovery = diag2(0.8, 0.1);
    const QuantumLatentModel m = QuantumLatentModel::make_structured(
        2, 2, product_diag_state(0.6, 0.3), {i2}, {i2}, {diag2(0.0, 1.0)},
        {diag2(1.0, 0.0)}, {i2}, {rot(30.0)}, recovery);

    const ComplexMatrix r = rot(30.0);
    const ComplexMatrix m1b = r.adjoint() * recovery * r;
    const ComplexMatrix rho_b = partial_trace_a(m.state().matrix(), 2, 2);
    const double yes1 = real_trace_product(rho_b, m1b);
    const double yes0 = real_trace_product(rho_b, recovery);

    CHECK(quantum_ace(m) == doctest::Approx(yes1 - yes0).epsilon(1e-12));

    const ObservedDistribution d = observed_distribution(m);
    CHECK(d.p(1, 1, 0) == doctest::Approx(0.6 * yes1).epsilon(1e-13));
    CHECK(d.p(1, 0, 0) == doctest::Approx(0.4 * yes0).epsilon(1e-13));

    // cross-branch counterfactual: refusers forced through the drug evolution
    CHECK(counterfactual(m, 1, 0, 1) == doctest::Approx(0.4 * yes1).epsilon(1e-13));
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            CHECK(counterfactual(m, j, k, k) == doctest::Approx(d.p(1, k, j)).epsilon(1e-15));

    CHECK_THROWS_AS(counterfactual(m, 2, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(counterfactual(m, 0, 0, -1), std::invalid_argument);
}

TEST_CASE("partial trace over the advice factor reproduces the effect") {
    for (const auto& [da, db, seeds] :
         {std::tuple{2, 2, 20}, std::tuple{3, 2, 10}, std::tuple{2, 3, 6}}) {
        for (int s = 0; s < seeds; ++s) {
            const QuantumLatentModel m = random_model(42 + s, da, db);
            CHECK(check_exclusion(m) <= 1e-12);
            CHECK(is_admissible(m));

            const ComplexMatrix rho_b = partial_trace_a(m.state().matrix(), da, db);
            const ComplexMatrix diff =
                b_block(drugged_recovery(m, 1), db) - b_block(drugged_recovery(m, 0), db);
            CHECK(quantum_ace(m) ==
                  doctest::Approx(real_trace_product(rho_b, diff)).epsilon(1e-10));

            CHECK_NOTHROW(observed_distribution(m));
        }
    }
}

TEST_CASE("certain recovery reduces cells to the decision marginal") {
    Rng rng(7);
    const QuantumLatentModel m = QuantumLatentModel::make_structured(
        2, 2, random_pure_state(rng, 4), {rot(20.0)}, {rot(50.0)}, {diag2(0.0, 1.0)},
        {diag2(1.0, 0.0)}, {rot(10.0)}, {rot(-40.0)}, ComplexMatrix::identity(2));

    const ObservedDistribution d = observed_distribution(m);
    const ComplexMatrix rho_a = partial_trace_b(m.state().matrix(), 2, 2);
    for (int j = 0; j < 2; ++j) {
        CHECK(d.p(0, 0, j) <= 1e-12);
        CHECK(d.p(0, 1, j) <= 1e-12);
        CHECK(d.p(1, 1, j) + d.p(1, 0, j) == doctest::Approx(1.0).epsilon(1e-12));

        const ComplexMatrix u = (j == 0) ? rot(20.0) : rot(50.0);
        const ComplexMatrix seen_take = u.adjoint() * diag2(1.0, 0.0) * u;
        CHECK(d.p(1, 1, j) ==
              doctest::Approx(real_trace_product(rho_a, seen_take)).epsilon(1e-12));

        // forcing the other evolution cannot change a certain outcome
        for (int k = 0; k < 2; ++k)
            CHECK(counterfactual(m, j, k, 0) ==
                  doctest::Approx(counterfactual(m, j, k, 1)).epsilon(1e-15));
    }
    CHECK(std::abs(quantum_ace(m)) <= 1e-12);
}

TEST_CASE("advice acting on the treated factor breaks exclusion") {
    const QuantumLatentModel m = exclusion_violator();
    CHECK(check_exclusion(m) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(check_exclusion(m) > 0.1);
    CHECK_FALSE(is_admissible(m));
    CHECK(is_admissible(m, 0.6));

    CHECK_THROWS_AS(observed_distribution(m), InadmissibleModel);
    CHECK_THROWS_AS(quantum_ace(m), InadmissibleModel);
    CHECK_THROWS_AS(counterfactual(m, 0, 0, 0), InadmissibleModel);
    CHECK_THROWS_AS(certificate_group1(m), InadmissibleModel);
    CHECK_THROWS_AS(certificate_natural(m), InadmissibleModel);

    // a loose tolerance admits the same model
    CHECK_NOTHROW(observed_distribution(m, 0.5, 0.6));
}

TEST_CASE("certificate expectations equal effect minus the matching lower bound") {
    for (int s = 0; s < 25; ++s) {
        const int da = (s % 5 == 4) ? 3 : 2;
        const QuantumLatentModel m = random_model(100 + s, da, 2);
        const ObservedDistribution d = observed_distribution(m);
        const std::array<double, 8> lo = instrumental_lower(d);
        const double ace = quantum_ace(m);

        const std::array<CertificateValue, 4> certs = group1_certificates(m);
        for (int i = 0; i < 4; ++i) {
            const int bound = kGroupOneIndices[i] - 1;
            CHECK(certs[i].state_value == doctest::Approx(ace - lo[bound]).epsilon(1e-10));
            CHECK(certs[i].operator_min_eig >= -1e-9);
            CHECK(certs[i].state_value >= certs[i].operator_min_eig - 1e-10);
        }
        CHECK(certificate_natural(m) >= -1e-9);

        // treatment-outcome swap lands on the same bound-2 certificate
        const CertificateValue swapped = certificate_group1(swap_treatment_outcome(m));
        CHECK(swapped.state_value == doctest::Approx(certs[1].state_value).epsilon(1e-10));
        CHECK(quantum_ace(swap_treatment_outcome(m)) == doctest::Approx(ace).epsilon(1e-10));
    }
}

TEST_CASE("certificate operators stay positive on replaced states") {
    Rng rng(99);
    for (int s = 0; s < 10; ++s) {
        const QuantumLatentModel m = random_model(500 + s, 2, 2);
        const std::array<CertificateValue, 4> certs = group1_certificates(m);
        for (int t = 0; t < 5; ++t) {
            const QuantumLatentModel other = with_state(m, random_pure_state(rng, m.dim()));
            const std::array<CertificateValue, 4> again = group1_certificates(other);
            for (int i = 0; i < 4; ++i) {
                // same operator, so the floor carries over to every state
                CHECK(again[i].operator_min_eig ==
                      doctest::Approx(certs[i].operator_min_eig).epsilon(1e-12));
                CHECK(again[i].state_value >= certs[i].operator_min_eig - 1e-10);
            }
            CHECK(certificate_natural(other) >= -1e-9);
        }
    }
}

TEST_CASE("relabeled models reproduce relabeled distributions") {
    for (int s = 0; s < 12; ++s) {
        const QuantumLatentModel m = random_model(300 + s, 2, 2);
        const ObservedDistribution d = observed_distribution(m);

        const ObservedDistribution dz = observed_distribution(swap_advice(m));
        const ObservedDistribution dz_ref = d.relabel_z();
        const ObservedDistribution dxy = observed_distribution(swap_treatment_outcome(m));
        const ObservedDistribution dxy_ref = d.relabel_xy();
        const ObservedDistribution du1 = observed_distribution(unify_advice(m, 1));

        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x)
                for (int z = 0; z < 2; ++z) {
                    CHECK(dz.p(y, x, z) == doctest::Approx(dz_ref.p(y, x, z)).epsilon(1e-15));
                    CHECK(dxy.p(y, x, z) ==
                          doctest::Approx(dxy_ref.p(y, x, z)).epsilon(1e-12));
                    CHECK(du1.p(y, x, z) == doctest::Approx(d.p(y, x, 1)).epsilon(1e-15));
                }
    }
}

TEST_CASE("always-take decision keeps the certificate positive") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    const QuantumLatentModel m = QuantumLatentModel::make_structured(
        2, 2, product_diag_state(0.6, 0.3), {i2}, {i2}, {ComplexMatrix(2)}, {i2}, {i2},
        {i2}, diag2(0.8, 0.1));

    const ObservedDistribution d = observed_distribution(m);
    for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) CHECK(d.p(y, 0, z) == 0.0);
    CHECK(d.p(1, 1, 0) == doctest::Approx(0.31).epsilon(1e-14));

    // certificate collapses to 1 - D1(m1): scalar 1 - 0.31, floor 1 - 0.8
    const CertificateValue cert = certificate_group1(m);
    CHECK(cert.state_value == doctest::Approx(0.69).epsilon(1e-12));
    CHECK(cert.operator_min_eig == doctest::Approx(0.2).epsilon(1e-11));
    CHECK(std::abs(quantum_ace(m)) <= 1e-15);
}

TEST_CASE("random model generation is deterministic per seed") {
    const QuantumLatentModel a = random_model(7, 2, 2);
    const QuantumLatentModel b = random_model(7, 2, 2);
    const QuantumLatentModel c = random_model(8, 2, 2);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_json().dump() != c.to_json().dump());
    CHECK(a.structured());

    const QuantumLatentModel mixed = random_model(9, 2, 2, 0.25);
    CHECK(is_admissible(mixed));
    CHECK_NOTHROW(observed_distribution(mixed));

    CHECK_THROWS_AS(random_model(1, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(random_model(1, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(random_model(1, 2, 2, 1.5), std::invalid_argument);
}

TEST_CASE("json round trip preserves the model exactly") {
    const QuantumLatentModel m = random_model(11, 2, 2);
    const json_t j = m.to_json();

    std::vector<std::string> keys;
    for (const auto& item : j.items()) keys.push_back(item.key());
    CHECK(keys == std::vector<std::string>{"dimA", "dimB", "rho", "G0", "G1", "D0", "D1",
                                           "E0", "E1", "m", "structured"});

    const QuantumLatentModel back = QuantumLatentModel::from_json(j);
    CHECK(back.to_json().dump() == j.dump());

    json_t missing = j;
    missing.erase("E1");
    CHECK_THROWS(QuantumLatentModel::from_json(missing));

    json_t shrunk = j;
    ComplexMatrix half = ComplexMatrix::identity(4);
    half *= cplx(std::sqrt(0.5), 0.0);
    shrunk["G0"] = kraus_to_json(KrausMap({half}));
    CHECK_THROWS_AS(QuantumLatentModel::from_json(shrunk), InvalidOperator);
}

TEST_CASE("constructors reject mismatched or non-unital pieces") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    const ComplexMatrix i3 = ComplexMatrix::identity(3);

    CHECK_THROWS_AS(QuantumLatentModel::make_structured(
                        2, 2, product_diag_state(0.6, 0.3), {i3}, {i2}, {diag2(0, 1)},
                        {diag2(1, 0)}, {i2}, {i2}, diag2(0.5, 0.5)),
                    DimMismatch);
    CHECK_THROWS_AS(QuantumLatentModel::make_structured(
                        2, 2, product_diag_state(0.6, 0.3), {i2}, {i2}, {diag2(0, 1)},
                        {diag2(1, 0)}, {i2}, {i2}, i3),
                    DimMismatch);

    ComplexMatrix half = ComplexMatrix::identity(4);
    half *= cplx(std::sqrt(0.5), 0.0);
    const Instrument decision(KrausMap({tensor(diag2(0, 1), i2)}),
                              KrausMap({tensor(diag2(1, 0), i2)}));
    CHECK_THROWS_AS(QuantumLatentModel(2, 2, product_diag_state(0.6, 0.3), KrausMap({half}),
                                       KrausMap::identity_map(4), decision,
                                       KrausMap::identity_map(4), KrausMap::identity_map(4),
                                       Effect(tensor(i2, diag2(1, 0))), false),
                    InvalidOperator);
    CHECK_THROWS_AS(QuantumLatentModel(0, 2, product_diag_state(0.6, 0.3),
                                       KrausMap::identity_map(4), KrausMap::identity_map(4),
                                       decision, KrausMap::identity_map(4),
                                       KrausMap::identity_map(4),
                                       Effect(tensor(i2, diag2(1, 0))), false),
                    std::invalid_argument);
}
