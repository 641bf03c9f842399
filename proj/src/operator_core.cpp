#include "causal/operator_core.hpp"

#include <algorithm>
#include <cmath>

namespace causal {

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.dim() != b.dim())
        throw DimMismatch(std::string(op) + ": dimensions " + std::to_string(a.dim()) +
                          " and " + std::to_string(b.dim()) + " differ");
}

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
    if (dim < 0) throw std::invalid_argument("matrix dimension must be nonnegative");
    e_.assign(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r.at(j, i) = std::conj(at(i, j));
    return r;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& v : e_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const cplx& v : e_) m = std::max(m, std::abs(v));
    return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
    return true;
}

bool ComplexMatrix::approx_equal(const ComplexMatrix& other, double tol) const {
    if (dim_ != other.dim_) return false;
    for (std::size_t i = 0; i < e_.size(); ++i)
        if (std::abs(e_[i] - other.e_[i]) > tol) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "add");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += other.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_dim(*this, other, "subtract");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= other.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) {
    for (cplx& v : e_) v *= scale;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "multiply");
    const int n = a.dim();
    ComplexMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) r.at(i, j) += aik * b.at(k, j);
        }
    return r;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int na = a.dim(), nb = b.dim();
    ComplexMatrix r(na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) {
            const cplx aij = a.at(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l)
                    r.at(i * nb + k, j * nb + l) = aij * b.at(k, l);
        }
    return r;
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(a.at(i, j));
    return std::sqrt(s);
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h, double herm_tol) {
    if (!h.is_hermitian(herm_tol)) throw NotHermitian("eigenvalue input is not Hermitian");
    const int n = h.dim();
    ComplexMatrix a = h;
    // symmetrize so rounding in the input cannot bias the iteration
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const cplx v = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
            a.at(i, j) = v;
            a.at(j, i) = std::conj(v);
        }
        a.at(i, i) = cplx(a.at(i, i).real(), 0.0);
    }

    constexpr double kOffTol = 1e-12;
    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > kOffTol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a.at(p, q);
                const double r = std::abs(apq);
                if (r < 1e-300) continue;
                const cplx phase = apq / r;  // e^{i phi}
                const double tau = (a.at(q, q).real() - a.at(p, p).real()) / (2.0 * r);
                const double sign = tau >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // column rotation: A <- A U with U the plane rotation in (p, q)
                for (int i = 0; i < n; ++i) {
                    const cplx aip = a.at(i, p), aiq = a.at(i, q);
                    a.at(i, p) = c * aip - s * std::conj(phase) * aiq;
                    a.at(i, q) = s * phase * aip + c * aiq;
                }
                // row rotation: A <- U^† A
                for (int j = 0; j < n; ++j) {
                    const cplx apj = a.at(p, j), aqj = a.at(q, j);
                    a.at(p, j) = c * apj - s * phase * aqj;
                    a.at(q, j) = s * std::conj(phase) * apj + c * aqj;
                }
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                a.at(p, p) = cplx(a.at(p, p).real(), 0.0);
                a.at(q, q) = cplx(a.at(q, q).real(), 0.0);
            }
        }
    }

    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a.at(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

double min_eigenvalue(const ComplexMatrix& h, double herm_tol) {
    if (h.dim() == 0) throw std::invalid_argument("min_eigenvalue of empty matrix");
    return hermitian_eigenvalues(h, herm_tol).front();
}

KrausMap::KrausMap(std::vector<ComplexMatrix> kraus, double unital_tol)
    : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw InvalidOperator("Kraus list must be non-empty");
    dim_ = kraus_[0].dim();
    if (dim_ <= 0) throw InvalidOperator("Kraus operators must be non-empty matrices");
    for (const ComplexMatrix& k : kraus_)
        if (k.dim() != dim_) throw DimMismatch("Kraus operators must share one dimension");
    ComplexMatrix s = apply_to_identity();
    s -= ComplexMatrix::identity(dim_);
    unital_ = s.max_abs() <= unital_tol;
}

KrausMap KrausMap::identity_map(int dim) {
    return KrausMap({ComplexMatrix::identity(dim)});
}

ComplexMatrix KrausMap::apply(const ComplexMatrix& a) const {
    if (a.dim() != dim_) throw DimMismatch("map applied to matrix of wrong dimension");
    ComplexMatrix r(dim_);
    for (const ComplexMatrix& k : kraus_) r += k.adjoint() * a * k;
    return r;
}

ComplexMatrix KrausMap::apply_to_identity() const {
    ComplexMatrix r(dim_);
    for (const ComplexMatrix& k : kraus_) r += k.adjoint() * k;
    return r;
}

Effect::Effect(ComplexMatrix m, double herm_tol, double eig_tol) : m_(std::move(m)) {
    if (m_.dim() == 0) throw InvalidOperator("effect must be non-empty");
    if (!m_.is_hermitian(herm_tol)) throw InvalidOperator("effect is not Hermitian");
    const std::vector<double> eig = hermitian_eigenvalues(m_, herm_tol);
    if (eig.front() < -eig_tol || eig.back() > 1.0 + eig_tol)
        throw InvalidOperator("effect spectrum escapes [0, 1]");
}

Effect Effect::complement() const {
    ComplexMatrix c = ComplexMatrix::identity(m_.dim());
    c -= m_;
    return Effect(std::move(c));
}

DensityState::DensityState(ComplexMatrix rho, double herm_tol, double psd_tol,
                           double trace_tol)
    : rho_(std::move(rho)) {
    if (rho_.dim() == 0) throw InvalidOperator("state must be non-empty");
    if (!rho_.is_hermitian(herm_tol)) throw InvalidOperator("state is not Hermitian");
    if (min_eigenvalue(rho_, herm_tol) < -psd_tol)
        throw InvalidOperator("state is not positive semidefinite");
    if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > trace_tol)
        throw InvalidOperator("state trace is not 1");
}

cplx DensityState::expectation(const ComplexMatrix& a) const {
    if (a.dim() != rho_.dim()) throw DimMismatch("expectation of wrong-dimension observable");
    cplx t = 0.0;
    for (int i = 0; i < rho_.dim(); ++i)
        for (int k = 0; k < rho_.dim(); ++k) t += rho_.at(i, k) * a.at(k, i);
    return t;
}

Instrument::Instrument(KrausMap branch0, KrausMap branch1, double norm_tol) {
    if (branch0.dim() != branch1.dim())
        throw DimMismatch("instrument branches must share one dimension");
    ComplexMatrix s = branch0.apply_to_identity();
    s += branch1.apply_to_identity();
    s -= ComplexMatrix::identity(branch0.dim());
    if (s.max_abs() > norm_tol)
        throw InvalidOperator("instrument branches do not sum to the identity on 1");
    branches_[0] = std::move(branch0);
    branches_[1] = std::move(branch1);
}

ComplexMatrix Instrument::apply_total(const ComplexMatrix& a) const {
    ComplexMatrix r = branches_[0].apply(a);
    r += branches_[1].apply(a);
    return r;
}

cplx expectation(const DensityState& state, const ComplexMatrix& a) {
    return state.expectation(a);
}

json_t matrix_to_json(const ComplexMatrix& m) {
    json_t re = json_t::array(), im = json_t::array();
    for (int i = 0; i < m.dim(); ++i) {
        json_t rrow = json_t::array(), irow = json_t::array();
        for (int j = 0; j < m.dim(); ++j) {
            rrow.push_back(m.at(i, j).real());
            irow.push_back(m.at(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json_t{{"dim", m.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json_t& j) {
    const int n = j.at("dim").get<int>();
    if (n <= 0) throw std::invalid_argument("matrix dim must be positive");
    const json_t& re = j.at("re");
    const json_t& im = j.at("im");
    if (static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n)
        throw std::invalid_argument("matrix row count does not match dim");
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(re[i].size()) != n || static_cast<int>(im[i].size()) != n)
            throw std::invalid_argument("matrix column count does not match dim");
        for (int k = 0; k < n; ++k)
            m.at(i, k) = cplx(re[i][k].get<double>(), im[i][k].get<double>());
    }
    return m;
}

json_t kraus_to_json(const KrausMap& k) {
    json_t ops = json_t::array();
    for (const ComplexMatrix& m : k.kraus()) ops.push_back(matrix_to_json(m));
    return ops;
}

KrausMap kraus_from_json(const json_t& j) {
    std::vector<ComplexMatrix> ops;
    for (const json_t& m : j) ops.push_back(matrix_from_json(m));
    return KrausMap(std::move(ops));
}

}  // namespace causal
