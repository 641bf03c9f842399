#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace causal {

using cplx = std::complex<double>;
using json_t = nlohmann::ordered_json;

struct DimMismatch : std::invalid_argument {
    explicit DimMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

struct NotHermitian : std::invalid_argument {
    explicit NotHermitian(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown by Effect / DensityState / KrausMap / Instrument constructors when
// the input violates the class invariant. Inputs are rejected, not repaired.
struct InvalidOperator : std::invalid_argument {
    explicit InvalidOperator(const std::string& msg) : std::invalid_argument(msg) {}
};

// Dense square complex matrix, row-major storage.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim);

    static ComplexMatrix identity(int dim);

    int dim() const { return dim_; }
    cplx& at(int r, int c) { return e_[static_cast<std::size_t>(r) * dim_ + c]; }
    const cplx& at(int r, int c) const { return e_[static_cast<std::size_t>(r) * dim_ + c]; }

    ComplexMatrix adjoint() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool is_hermitian(double tol) const;
    bool approx_equal(const ComplexMatrix& other, double tol) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx scale);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
        return a.dim_ == b.dim_ && a.e_ == b.e_;
    }

private:
    int dim_ = 0;
    std::vector<cplx> e_;
};

// Kronecker product; the first factor indexes the outer blocks.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

// Eigenvalues of a Hermitian matrix in ascending order, computed by a cyclic
// complex Jacobi iteration run to off-diagonal Frobenius norm <= 1e-12.
// Throws NotHermitian if the input fails the Hermiticity check.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h, double herm_tol = 1e-10);
double min_eigenvalue(const ComplexMatrix& h, double herm_tol = 1e-10);

// Completely positive map in the Heisenberg picture: a -> sum_i K_i^† a K_i.
class KrausMap {
public:
    KrausMap() = default;
    explicit KrausMap(std::vector<ComplexMatrix> kraus, double unital_tol = 1e-9);

    static KrausMap identity_map(int dim);

    int dim() const { return dim_; }
    bool unital() const { return unital_; }
    const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

    ComplexMatrix apply(const ComplexMatrix& a) const;
    // sum_i K_i^† K_i, the map's value on the identity
    ComplexMatrix apply_to_identity() const;

private:
    std::vector<ComplexMatrix> kraus_;
    int dim_ = 0;
    bool unital_ = false;
};

// Hermitian matrix with spectrum in [0, 1]: a yes-no measurement operator.
class Effect {
public:
    explicit Effect(ComplexMatrix m, double herm_tol = 1e-10, double eig_tol = 1e-9);

    int dim() const { return m_.dim(); }
    const ComplexMatrix& matrix() const { return m_; }
    Effect complement() const;

private:
    ComplexMatrix m_;
};

// Hermitian positive semidefinite matrix with unit trace.
class DensityState {
public:
    explicit DensityState(ComplexMatrix rho, double herm_tol = 1e-10,
                          double psd_tol = 1e-9, double trace_tol = 1e-10);

    int dim() const { return rho_.dim(); }
    const ComplexMatrix& matrix() const { return rho_; }
    cplx expectation(const ComplexMatrix& a) const;

private:
    ComplexMatrix rho_;
};

// Two-outcome quantum instrument: a pair of CP maps whose values on the
// identity sum to the identity.
class Instrument {
public:
    Instrument() = default;
    Instrument(KrausMap branch0, KrausMap branch1, double norm_tol = 1e-9);

    int dim() const { return branches_[0].dim(); }
    const KrausMap& branch(int k) const { return branches_[k]; }
    // non-selective evolution: branch0(a) + branch1(a)
    ComplexMatrix apply_total(const ComplexMatrix& a) const;

private:
    KrausMap branches_[2];
};

cplx expectation(const DensityState& state, const ComplexMatrix& a);

// matrix <-> {"dim": n, "re": [[..]], "im": [[..]]}
json_t matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json_t& j);
json_t kraus_to_json(const KrausMap& k);
KrausMap kraus_from_json(const json_t& j);

}  // namespace causal
