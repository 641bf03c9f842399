#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace causal {

using json_t = nlohmann::ordered_json;

// One trial participant: advice arm z, treatment taken x, recovery y.
struct TrialRecord {
    int z = 0;
    int x = 0;
    int y = 0;
    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct EmptyArm : std::runtime_error {
    explicit EmptyArm(int z)
        : std::runtime_error("no records in advice arm z=" + std::to_string(z)), arm(z) {}
    int arm;
};

struct CsvParseError : std::runtime_error {
    CsvParseError(std::size_t line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    std::size_t line;
};

struct InvalidDistribution : std::invalid_argument {
    explicit InvalidDistribution(const std::string& msg) : std::invalid_argument(msg) {}
};

// p[y][x][z]
using ProbCube = std::array<std::array<std::array<double, 2>, 2>, 2>;

struct DistributionViolation {
    std::string check;
    double magnitude = 0.0;
};

// Conditional distribution P(y, x | z) for both advice arms plus the arm
// probability P(z=1). Construction clamps negatives within kNegativeTol to
// zero and renormalizes each arm, so downstream simplex arithmetic sees
// slices that sum to 1 exactly up to rounding. Anything worse is rejected.
class ObservedDistribution {
public:
    static constexpr double kDefaultSumTol = 1e-9;
    static constexpr double kNegativeTol = 1e-12;

    ObservedDistribution(const ProbCube& p, double pz, double sum_tol = kDefaultSumTol);

    double p(int y, int x, int z) const { return p_[y][x][z]; }
    double pz() const { return pz_; }
    // P(y=1 | z)
    double recovery_given(int z) const { return p_[1][0][z] + p_[1][1][z]; }

    // relabelings; each returns a valid distribution
    ObservedDistribution relabel_z() const;   // z0 <-> z1, pz -> 1 - pz
    ObservedDistribution relabel_y() const;   // y0 <-> y1
    ObservedDistribution relabel_xy() const;  // x0 <-> x1 and y0 <-> y1 jointly

    json_t to_json() const;
    static ObservedDistribution from_json(const json_t& j);

private:
    ProbCube p_{};
    double pz_ = 0.5;
};

// Frequency estimate from raw records. Throws EmptyArm when an advice arm is
// unrepresented; rejects records with out-of-range fields.
ObservedDistribution estimate(const std::vector<TrialRecord>& records);

// Diagnostics on raw numbers, usable before construction succeeds.
std::vector<DistributionViolation> validate(const ProbCube& p, double pz, double tol = 1e-9);
std::vector<DistributionViolation> validate(const ObservedDistribution& d, double tol = 1e-9);

// P(y=1 | z=1) - P(y=1 | z=0), the as-advised contrast
double naive_effect(const ObservedDistribution& d);

// i.i.d. records drawn from the distribution; deterministic for a given seed
std::vector<TrialRecord> sample(const ObservedDistribution& d, std::int64_t n,
                                std::uint64_t seed);

// CSV with exact header "z,x,y"; all fields 0 or 1; errors carry line numbers
std::vector<TrialRecord> read_records_csv(std::istream& in);
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);

}  // namespace causal
