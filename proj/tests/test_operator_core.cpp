#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "causal/operator_core.hpp"
#include "causal/rng.hpp"

using namespace causal;

namespace {

ComplexMatrix random_matrix(Rng& rng, int n) {
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = cplx(rng.gaussian(), rng.gaussian());
    return m;
}

ComplexMatrix random_hermitian(Rng& rng, int n) {
    ComplexMatrix g = random_matrix(rng, n);
    ComplexMatrix h = g;
    h += g.adjoint();
    h *= cplx(0.5, 0.0);
    return h;
}

// exact eigenvalues of a 2x2 Hermitian matrix, independent of the Jacobi code
std::pair<double, double> herm2_eigs(const ComplexMatrix& h) {
    const double a = h.at(0, 0).real();
    const double d = h.at(1, 1).real();
    const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h.at(0, 1)));
    return {0.5 * (a + d) - r, 0.5 * (a + d) + r};
}

std::vector<cplx> mat_vec(const ComplexMatrix& m, const std::vector<cplx>& v) {
    std::vector<cplx> w(v.size(), cplx(0.0, 0.0));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) w[i] += m.at(i, j) * v[j];
    return w;
}

// Power-iteration estimate of the smallest eigenvalue, via the dominant
// eigenvalue of shift*1 - h. Only uses matrix-vector products, so it is an
// oracle for the Jacobi solver.
double power_min_eig(const ComplexMatrix& h, Rng& rng) {
    const int n = h.dim();
    const double shift = h.frobenius_norm() + 1.0;
    ComplexMatrix b = ComplexMatrix::identity(n);
    b *= cplx(shift, 0.0);
    b -= h;

    std::vector<cplx> v(n);
    double norm = 0.0;
    for (cplx& c : v) {
        c = cplx(rng.gaussian(), rng.gaussian());
        norm += std::norm(c);
    }
    norm = std::sqrt(norm);
    for (cplx& c : v) c /= norm;

    for (int iter = 0; iter < 3000; ++iter) {
        std::vector<cplx> w = mat_vec(b, v);
        double wn = 0.0;
        for (const cplx& c : w) wn += std::norm(c);
        wn = std::sqrt(wn);
        for (cplx& c : w) c /= wn;
        v = std::move(w);
    }
    const std::vector<cplx> bv = mat_vec(b, v);
    cplx rayleigh = 0.0;
    for (int i = 0; i < n; ++i) rayleigh += std::conj(v[i]) * bv[i];
    return shift - rayleigh.real();
}

DensityState make_singlet() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double psi[4] = {0.0, inv_sqrt2, -inv_sqrt2, 0.0};
    ComplexMatrix rho(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho.at(i, j) = psi[i] * psi[j];
    return DensityState(std::move(rho));
}

ComplexMatrix pass_projector(double angle_deg) {
    const double r = angle_deg * 3.14159265358979323846 / 180.0;
    ComplexMatrix p(2);
    p.at(0, 0) = std::cos(r) * std::cos(r);
    p.at(0, 1) = std::cos(r) * std::sin(r);
    p.at(1, 0) = p.at(0, 1);
    p.at(1, 1) = std::sin(r) * std::sin(r);
    return p;
}

}  // namespace

TEST_CASE("matrix arithmetic and adjoints") {
    Rng rng(11);
    const ComplexMatrix a = random_matrix(rng, 3);
    const ComplexMatrix b = random_matrix(rng, 3);

    CHECK((a * b).adjoint().approx_equal(b.adjoint() * a.adjoint(), 1e-12));
    CHECK(std::abs((a * b).trace() - (b * a).trace()) <= 1e-12);
    CHECK((ComplexMatrix::identity(3) * a).approx_equal(a, 0.0));

    const ComplexMatrix wrong(2);
    CHECK_THROWS_AS(a * wrong, DimMismatch);
    CHECK_THROWS_AS(ComplexMatrix(a) += wrong, DimMismatch);
    CHECK_THROWS_AS(ComplexMatrix(-1), std::invalid_argument);
}

TEST_CASE("tensor product: ordering and multiplicativity") {
    ComplexMatrix d(2);
    d.at(0, 0) = 1.0;
    d.at(1, 1) = 2.0;
    const ComplexMatrix t = tensor(d, ComplexMatrix::identity(2));
    // first factor indexes the outer blocks
    CHECK(t.at(0, 0) == cplx(1.0, 0.0));
    CHECK(t.at(1, 1) == cplx(1.0, 0.0));
    CHECK(t.at(2, 2) == cplx(2.0, 0.0));
    CHECK(t.at(3, 3) == cplx(2.0, 0.0));

    Rng rng(12);
    const ComplexMatrix a = random_matrix(rng, 2);
    const ComplexMatrix b = random_matrix(rng, 3);
    const ComplexMatrix c = random_matrix(rng, 2);
    const ComplexMatrix e = random_matrix(rng, 3);
    CHECK((tensor(a, b) * tensor(c, e)).approx_equal(tensor(a * c, b * e), 1e-10));
    CHECK(std::abs(tensor(a, b).trace() - a.trace() * b.trace()) <= 1e-12);
}

TEST_CASE("eigenvalues match 2x2 closed form") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix h = random_hermitian(rng, 2);
        const auto [lo, hi] = herm2_eigs(h);
        const std::vector<double> eig = hermitian_eigenvalues(h);
        REQUIRE(eig.size() == 2);
        CHECK(std::abs(eig[0] - lo) <= 1e-12);
        CHECK(std::abs(eig[1] - hi) <= 1e-12);
    }
}

TEST_CASE("eigenvalues: fixed spectra") {
    ComplexMatrix diag(3);
    diag.at(0, 0) = 5.0;
    diag.at(1, 1) = -2.0;
    diag.at(2, 2) = 0.5;
    const std::vector<double> d = hermitian_eigenvalues(diag);
    CHECK(d[0] == -2.0);
    CHECK(d[1] == 0.5);
    CHECK(d[2] == 5.0);

    ComplexMatrix pauli_y(2);
    pauli_y.at(0, 1) = cplx(0.0, -1.0);
    pauli_y.at(1, 0) = cplx(0.0, 1.0);
    const std::vector<double> py = hermitian_eigenvalues(pauli_y);
    CHECK(std::abs(py[0] + 1.0) <= 1e-12);
    CHECK(std::abs(py[1] - 1.0) <= 1e-12);

    // rank-1 state: one eigenvalue 1, rest 0
    const std::vector<double> s = hermitian_eigenvalues(make_singlet().matrix());
    CHECK(std::abs(s[0]) <= 1e-12);
    CHECK(std::abs(s[1]) <= 1e-12);
    CHECK(std::abs(s[2]) <= 1e-12);
    CHECK(std::abs(s[3] - 1.0) <= 1e-12);
}

TEST_CASE("eigenvalues: randomized invariants and power-iteration oracle") {
    Rng rng(14);
    for (int n : {3, 4, 6, 8}) {
        for (int trial = 0; trial < 4; ++trial) {
            const ComplexMatrix h = random_hermitian(rng, n);
            const std::vector<double> eig = hermitian_eigenvalues(h);
            REQUIRE(static_cast<int>(eig.size()) == n);

            double sum = 0.0, sum_sq = 0.0;
            for (double e : eig) {
                sum += e;
                sum_sq += e * e;
            }
            CHECK(std::abs(sum - h.trace().real()) <= 1e-9);
            CHECK(std::abs(sum_sq - h.frobenius_norm() * h.frobenius_norm()) <= 1e-9);

            // Rayleigh quotients upper-bound the bottom of the spectrum
            for (int k = 0; k < 50; ++k) {
                std::vector<cplx> v(n);
                double norm = 0.0;
                for (cplx& c : v) {
                    c = cplx(rng.gaussian(), rng.gaussian());
                    norm += std::norm(c);
                }
                const std::vector<cplx> hv = mat_vec(h, v);
                cplx q = 0.0;
                for (int i = 0; i < n; ++i) q += std::conj(v[i]) * hv[i];
                CHECK(eig.front() <= q.real() / norm + 1e-12);
            }

            CHECK(std::abs(min_eigenvalue(h) - power_min_eig(h, rng)) <= 1e-6);

            // spectrum shifts with the diagonal
            ComplexMatrix shifted = h;
            shifted += ComplexMatrix::identity(n);
            shifted += ComplexMatrix::identity(n);
            const std::vector<double> eig2 = hermitian_eigenvalues(shifted);
            for (int i = 0; i < n; ++i) CHECK(std::abs(eig2[i] - eig[i] - 2.0) <= 1e-10);
        }
    }
}

TEST_CASE("eigenvalues reject non-hermitian input") {
    ComplexMatrix m(2);
    m.at(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eigenvalues(m), NotHermitian);
    CHECK_THROWS_AS(min_eigenvalue(m), NotHermitian);
}

TEST_CASE("kraus maps: unitality and linearity") {
    const KrausMap id = KrausMap::identity_map(3);
    CHECK(id.unital());

    Rng rng(15);
    const ComplexMatrix a = random_hermitian(rng, 2);
    const ComplexMatrix b = random_hermitian(rng, 2);

    // projective pinching is unital
    const KrausMap pinch({pass_projector(30.0), pass_projector(120.0)});
    CHECK(pinch.unital());
    CHECK(pinch.apply_to_identity().approx_equal(ComplexMatrix::identity(2), 1e-12));

    ComplexMatrix sum = a;
    sum += b;
    ComplexMatrix applied = pinch.apply(a);
    applied += pinch.apply(b);
    CHECK(pinch.apply(sum).approx_equal(applied, 1e-12));

    // scaled identity is not unital
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= cplx(std::sqrt(0.5), 0.0);
    CHECK_FALSE(KrausMap({half}).unital());

    CHECK_THROWS_AS(KrausMap(std::vector<ComplexMatrix>{}), InvalidOperator);
    CHECK_THROWS_AS(KrausMap({ComplexMatrix::identity(2), ComplexMatrix::identity(3)}),
                    DimMismatch);
}

TEST_CASE("effects: spectrum window and complement") {
    const Effect pass(pass_projector(25.0));
    const Effect blocked = pass.complement();
    ComplexMatrix total = pass.matrix();
    total += blocked.matrix();
    CHECK(total.approx_equal(ComplexMatrix::identity(2), 1e-12));
    CHECK(blocked.complement().matrix().approx_equal(pass.matrix(), 1e-12));

    ComplexMatrix big = pass_projector(0.0);
    big *= cplx(1.5, 0.0);
    CHECK_THROWS_AS(Effect{big}, InvalidOperator);

    ComplexMatrix neg(2);
    neg.at(0, 0) = -0.1;
    neg.at(1, 1) = 0.5;
    CHECK_THROWS_AS(Effect{neg}, InvalidOperator);

    ComplexMatrix skew(2);
    skew.at(0, 1) = 1.0;
    CHECK_THROWS_AS(Effect{skew}, InvalidOperator);
}

TEST_CASE("density states: constructor guards and expectations") {
    const DensityState singlet = make_singlet();
    CHECK(std::abs(singlet.matrix().trace() - cplx(1.0, 0.0)) <= 1e-15);

    // tensor filter pair against the closed form (1 - cos 2(a-b)) / 4
    for (double alpha : {0.0, 22.5, 67.5, -45.0, 10.0})
        for (double beta : {0.0, -22.5, 45.0, 133.0}) {
            const ComplexMatrix joint = tensor(pass_projector(alpha), pass_projector(beta));
            const double expected =
                0.25 * (1.0 - std::cos(2.0 * (alpha - beta) * 3.14159265358979323846 / 180.0));
            CHECK(std::abs(expectation(singlet, joint).real() - expected) <= 1e-12);
            CHECK(std::abs(expectation(singlet, joint).imag()) <= 1e-12);
        }

    ComplexMatrix off_trace = ComplexMatrix::identity(2);
    CHECK_THROWS_AS(DensityState{off_trace}, InvalidOperator);

    ComplexMatrix sig(2);
    sig.at(0, 0) = 1.2;
    sig.at(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityState{sig}, InvalidOperator);

    ComplexMatrix skew(2);
    skew.at(0, 1) = 1.0;
    skew.at(0, 0) = 1.0;
    CHECK_THROWS_AS(DensityState{skew}, InvalidOperator);
}

TEST_CASE("instruments: branch sum must resolve the identity") {
    const KrausMap take({pass_projector(40.0)});
    const KrausMap refuse({pass_projector(130.0)});
    const Instrument inst(refuse, take);

    Rng rng(16);
    const ComplexMatrix a = random_hermitian(rng, 2);
    ComplexMatrix total = inst.branch(0).apply(a);
    total += inst.branch(1).apply(a);
    CHECK(inst.apply_total(a).approx_equal(total, 1e-13));

    CHECK_THROWS_AS(Instrument(take, take), InvalidOperator);
    CHECK_THROWS_AS(Instrument(take, KrausMap::identity_map(3)), DimMismatch);
}

TEST_CASE("matrix and kraus json round trips") {
    Rng rng(17);
    const ComplexMatrix m = random_matrix(rng, 3);
    CHECK(matrix_from_json(matrix_to_json(m)) == m);

    const KrausMap pinch({pass_projector(30.0), pass_projector(120.0)});
    const KrausMap back = kraus_from_json(kraus_to_json(pinch));
    REQUIRE(back.kraus().size() == 2);
    CHECK(back.kraus()[0] == pinch.kraus()[0]);
    CHECK(back.kraus()[1] == pinch.kraus()[1]);

    json_t bad = matrix_to_json(m);
    bad["re"].erase(0);
    CHECK_THROWS_AS(matrix_from_json(bad), std::invalid_argument);
    json_t zero = matrix_to_json(m);
    zero["dim"] = 0;
    CHECK_THROWS_AS(matrix_from_json(zero), std::invalid_argument);
}
