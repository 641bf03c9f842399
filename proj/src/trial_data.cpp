#include "causal/trial_data.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "causal/rng.hpp"

namespace causal {

namespace {

bool is_bit(int v) { return v == 0 || v == 1; }

std::string cell_name(int y, int x, int z) {
    return "p[y=" + std::to_string(y) + "][x=" + std::to_string(x) +
           "][z=" + std::to_string(z) + "]";
}

}  // namespace

ObservedDistribution::ObservedDistribution(const ProbCube& p, double pz, double sum_tol)
    : p_(p), pz_(pz) {
    if (!std::isfinite(pz_) || pz_ < -kNegativeTol || pz_ > 1.0 + kNegativeTol)
        throw InvalidDistribution("pz outside [0, 1]");
    pz_ = std::min(std::max(pz_, 0.0), 1.0);
    for (int z = 0; z < 2; ++z) {
        double sum = 0.0;
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) {
                double& v = p_[y][x][z];
                if (!std::isfinite(v)) throw InvalidDistribution(cell_name(y, x, z) + " is not finite");
                if (v < -kNegativeTol)
                    throw InvalidDistribution(cell_name(y, x, z) + " is negative");
                if (v < 0.0) v = 0.0;
                sum += v;
            }
        if (std::abs(sum - 1.0) > sum_tol)
            throw InvalidDistribution("z=" + std::to_string(z) + " slice sums to " +
                                      std::to_string(sum) + ", not 1");
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) p_[y][x][z] /= sum;
    }
}

ObservedDistribution ObservedDistribution::relabel_z() const {
    ProbCube q{};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) q[y][x][z] = p_[y][x][1 - z];
    return ObservedDistribution(q, 1.0 - pz_);
}

ObservedDistribution ObservedDistribution::relabel_y() const {
    ProbCube q{};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) q[y][x][z] = p_[1 - y][x][z];
    return ObservedDistribution(q, pz_);
}

ObservedDistribution ObservedDistribution::relabel_xy() const {
    ProbCube q{};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) q[y][x][z] = p_[1 - y][1 - x][z];
    return ObservedDistribution(q, pz_);
}

json_t ObservedDistribution::to_json() const {
    json_t p = json_t::array();
    for (int y = 0; y < 2; ++y) {
        json_t py = json_t::array();
        for (int x = 0; x < 2; ++x) {
            json_t pyx = json_t::array();
            for (int z = 0; z < 2; ++z) pyx.push_back(p_[y][x][z]);
            py.push_back(std::move(pyx));
        }
        p.push_back(std::move(py));
    }
    return json_t{{"p", std::move(p)}, {"pz", pz_}};
}

ObservedDistribution ObservedDistribution::from_json(const json_t& j) {
    const json_t& p = j.at("p");
    ProbCube cube{};
    if (p.size() != 2) throw InvalidDistribution("\"p\" must be a 2x2x2 array");
    for (int y = 0; y < 2; ++y) {
        if (p[y].size() != 2) throw InvalidDistribution("\"p\" must be a 2x2x2 array");
        for (int x = 0; x < 2; ++x) {
            if (p[y][x].size() != 2) throw InvalidDistribution("\"p\" must be a 2x2x2 array");
            for (int z = 0; z < 2; ++z) cube[y][x][z] = p[y][x][z].get<double>();
        }
    }
    return ObservedDistribution(cube, j.at("pz").get<double>());
}

ObservedDistribution estimate(const std::vector<TrialRecord>& records) {
    long long counts[2][2][2] = {};
    long long arm_totals[2] = {};
    for (const TrialRecord& r : records) {
        if (!is_bit(r.z) || !is_bit(r.x) || !is_bit(r.y))
            throw InvalidDistribution("record fields must be 0 or 1");
        counts[r.y][r.x][r.z] += 1;
        arm_totals[r.z] += 1;
    }
    for (int z = 0; z < 2; ++z)
        if (arm_totals[z] == 0) throw EmptyArm(z);

    ProbCube p{};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z)
                p[y][x][z] = static_cast<double>(counts[y][x][z]) /
                             static_cast<double>(arm_totals[z]);
    const double pz = static_cast<double>(arm_totals[1]) /
                      static_cast<double>(arm_totals[0] + arm_totals[1]);
    return ObservedDistribution(p, pz);
}

std::vector<DistributionViolation> validate(const ProbCube& p, double pz, double tol) {
    std::vector<DistributionViolation> out;
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z)
                if (!(p[y][x][z] >= -tol))
                    out.push_back({cell_name(y, x, z) + " negative", -p[y][x][z]});
    for (int z = 0; z < 2; ++z) {
        double sum = 0.0;
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) sum += p[y][x][z];
        if (!(std::abs(sum - 1.0) <= tol))
            out.push_back({"z=" + std::to_string(z) + " slice sum differs from 1",
                           std::abs(sum - 1.0)});
    }
    if (!(pz >= -tol && pz <= 1.0 + tol))
        out.push_back({"pz outside [0, 1]", std::max(-pz, pz - 1.0)});
    return out;
}

std::vector<DistributionViolation> validate(const ObservedDistribution& d, double tol) {
    ProbCube p{};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) p[y][x][z] = d.p(y, x, z);
    return validate(p, d.pz(), tol);
}

double naive_effect(const ObservedDistribution& d) {
    return d.recovery_given(1) - d.recovery_given(0);
}

std::vector<TrialRecord> sample(const ObservedDistribution& d, std::int64_t n,
                                std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample size must be nonnegative");
    Rng rng(seed);
    std::vector<TrialRecord> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const int z = rng.bernoulli(d.pz()) ? 1 : 0;
        const double w[4] = {d.p(0, 0, z), d.p(0, 1, z), d.p(1, 0, z), d.p(1, 1, z)};
        const int cell = rng.categorical(w);
        out.push_back({z, cell & 1, cell >> 1});
    }
    return out;
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
    std::vector<TrialRecord> out;
    std::string line;
    std::size_t line_no = 0;

    auto trimmed = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
            s.pop_back();
        std::size_t b = 0;
        while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
        return s.substr(b);
    };

    if (!std::getline(in, line)) throw CsvParseError(1, "missing header");
    ++line_no;
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
    if (trimmed(line) != "z,x,y") throw CsvParseError(1, "header must be \"z,x,y\"");

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trimmed(line);
        if (t.empty()) continue;
        int fields[3];
        std::size_t pos = 0;
        for (int f = 0; f < 3; ++f) {
            std::size_t end = f < 2 ? t.find(',', pos) : t.size();
            if (end == std::string::npos) throw CsvParseError(line_no, "expected 3 fields");
            const std::string tok = trimmed(t.substr(pos, end - pos));
            if (tok == "0") fields[f] = 0;
            else if (tok == "1") fields[f] = 1;
            else throw CsvParseError(line_no, "field \"" + tok + "\" is not 0 or 1");
            pos = end + 1;
        }
        out.push_back({fields[0], fields[1], fields[2]});
    }
    return out;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << "z,x,y\n";
    for (const TrialRecord& r : records)
        out << r.z << ',' << r.x << ',' << r.y << '\n';
}

}  // namespace causal
