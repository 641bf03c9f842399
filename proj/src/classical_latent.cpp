#include "causal/classical_latent.hpp"

#include <cmath>

#include "causal/rng.hpp"

namespace causal {

int decision(ComplianceType b, int z) {
    switch (b) {
        case ComplianceType::NeverTake: return 0;
        case ComplianceType::AlwaysTake: return 1;
        case ComplianceType::Complier: return z;
        case ComplianceType::Defier: return 1 - z;
    }
    throw std::invalid_argument("bad compliance type");
}

int outcome(ResponseType r, int x) {
    switch (r) {
        case ResponseType::NeverRecover: return 0;
        case ResponseType::AlwaysRecover: return 1;
        case ResponseType::Helped: return x;
        case ResponseType::Hurt: return 1 - x;
    }
    throw std::invalid_argument("bad response type");
}

CanonicalModel::CanonicalModel(const LatentCells& q, double pz, double tol)
    : q_(q), pz_(pz) {
    if (!std::isfinite(pz_) || pz_ < 0.0 || pz_ > 1.0)
        throw InvalidModel("pz outside [0, 1]");
    double sum = 0.0;
    for (auto& row : q_)
        for (double& v : row) {
            if (!std::isfinite(v)) throw InvalidModel("cell weight is not finite");
            if (v < -tol) throw InvalidModel("cell weight is negative");
            if (v < 0.0) v = 0.0;
            sum += v;
        }
    if (std::abs(sum - 1.0) > tol)
        throw InvalidModel("cell weights sum to " + std::to_string(sum) + ", not 1");
    for (auto& row : q_)
        for (double& v : row) v /= sum;
}

json_t CanonicalModel::to_json() const {
    json_t q = json_t::array();
    for (const auto& row : q_) {
        json_t r = json_t::array();
        for (double v : row) r.push_back(v);
        q.push_back(std::move(r));
    }
    return json_t{{"q", std::move(q)}, {"pz", pz_}};
}

CanonicalModel CanonicalModel::from_json(const json_t& j) {
    const json_t& q = j.at("q");
    if (q.size() != 4) throw InvalidModel("\"q\" must be a 4x4 array");
    LatentCells cells{};
    for (int b = 0; b < 4; ++b) {
        if (q[b].size() != 4) throw InvalidModel("\"q\" must be a 4x4 array");
        for (int r = 0; r < 4; ++r) cells[b][r] = q[b][r].get<double>();
    }
    return CanonicalModel(cells, j.at("pz").get<double>());
}

ObservedDistribution forward(const CanonicalModel& m) {
    ProbCube p{};
    for (ComplianceType b : kComplianceTypes)
        for (ResponseType r : kResponseTypes)
            for (int z = 0; z < 2; ++z) {
                const int x = decision(b, z);
                const int y = outcome(r, x);
                p[y][x][z] += m.q(b, r);
            }
    return ObservedDistribution(p, m.pz(), 1e-12);
}

double intervene(const CanonicalModel& m, int x) {
    if (x != 0 && x != 1) throw std::invalid_argument("treatment must be 0 or 1");
    double total = 0.0;
    for (ComplianceType b : kComplianceTypes)
        for (ResponseType r : kResponseTypes)
            if (outcome(r, x) == 1) total += m.q(b, r);
    return total;
}

double ace(const CanonicalModel& m) {
    // y(1) - y(0) is +1 for Helped, -1 for Hurt, 0 otherwise
    double d = 0.0;
    for (ComplianceType b : kComplianceTypes) {
        d += m.q(b, ResponseType::Helped);
        d -= m.q(b, ResponseType::Hurt);
    }
    return d;
}

std::vector<TrialRecord> sample(const CanonicalModel& m, std::int64_t n, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample size must be nonnegative");
    Rng rng(seed);
    double w[16];
    for (int b = 0; b < 4; ++b)
        for (int r = 0; r < 4; ++r)
            w[b * 4 + r] = m.q(kComplianceTypes[b], kResponseTypes[r]);

    std::vector<TrialRecord> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const int z = rng.bernoulli(m.pz()) ? 1 : 0;
        const int cell = rng.categorical(w);
        const ComplianceType b = kComplianceTypes[cell / 4];
        const ResponseType r = kResponseTypes[cell % 4];
        const int x = decision(b, z);
        out.push_back({z, x, outcome(r, x)});
    }
    return out;
}

CanonicalModel random_model(std::uint64_t seed) {
    Rng rng(seed);
    LatentCells q{};
    double sum = 0.0;
    for (auto& row : q)
        for (double& v : row) {
            v = rng.exponential();
            sum += v;
        }
    for (auto& row : q)
        for (double& v : row) v /= sum;
    return CanonicalModel(q, 0.5);
}

}  // namespace causal
