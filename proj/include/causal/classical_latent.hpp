#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "causal/trial_data.hpp"

namespace causal {

// How a participant reacts to advice: the treatment they take given arm z.
enum class ComplianceType { NeverTake = 0, AlwaysTake = 1, Complier = 2, Defier = 3 };

// How a participant reacts to treatment: the outcome given intake x.
enum class ResponseType { NeverRecover = 0, AlwaysRecover = 1, Helped = 2, Hurt = 3 };

inline constexpr std::array<ComplianceType, 4> kComplianceTypes{
    ComplianceType::NeverTake, ComplianceType::AlwaysTake, ComplianceType::Complier,
    ComplianceType::Defier};
inline constexpr std::array<ResponseType, 4> kResponseTypes{
    ResponseType::NeverRecover, ResponseType::AlwaysRecover, ResponseType::Helped,
    ResponseType::Hurt};

int decision(ComplianceType b, int z);
int outcome(ResponseType r, int x);

// q[compliance][response]
using LatentCells = std::array<std::array<double, 4>, 4>;

struct InvalidModel : std::invalid_argument {
    explicit InvalidModel(const std::string& msg) : std::invalid_argument(msg) {}
};

// Joint distribution over the 16 deterministic participant types, plus the
// advice arm probability. Advice is independent of type by construction.
class CanonicalModel {
public:
    static constexpr double kDefaultTol = 1e-12;

    CanonicalModel(const LatentCells& q, double pz, double tol = kDefaultTol);

    double q(ComplianceType b, ResponseType r) const {
        return q_[static_cast<int>(b)][static_cast<int>(r)];
    }
    const LatentCells& cells() const { return q_; }
    double pz() const { return pz_; }

    json_t to_json() const;
    static CanonicalModel from_json(const json_t& j);

private:
    LatentCells q_;
    double pz_;
};

// Distribution of (y, x) given z implied by the type mixture.
ObservedDistribution forward(const CanonicalModel& m);

// P(y=1 | do x=1) - P(y=1 | do x=0)
double ace(const CanonicalModel& m);

// P(y=1 | do x)
double intervene(const CanonicalModel& m, int x);

// n records drawn type-by-type; deterministic for a given seed
std::vector<TrialRecord> sample(const CanonicalModel& m, std::int64_t n, std::uint64_t seed);

// Dirichlet(1,...,1) cell weights via normalized exponentials, pz = 0.5
CanonicalModel random_model(std::uint64_t seed);

}  // namespace causal
