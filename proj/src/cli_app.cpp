#include "causal/cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "causal/bounds.hpp"
#include "causal/classical_latent.hpp"
#include "causal/epr_toy.hpp"
#include "causal/quantum_latent.hpp"
#include "causal/trial_data.hpp"

namespace causal {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitViolation = 3;
constexpr int kExitMismatch = 4;

struct CommonOpts {
    std::uint64_t seed = 42;
    double tol = 1e-9;
    std::string output = "table";
};

// key/value flattening shared by the table and csv renderers
void flatten(const json_t& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten(value, prefix.empty() ? key : prefix + "." + key, rows);
    } else if (j.is_array()) {
        int i = 0;
        for (const json_t& value : j)
            flatten(value, prefix + "_" + std::to_string(++i), rows);
        if (j.empty()) rows.emplace_back(prefix, "(none)");
    } else if (j.is_string()) {
        rows.emplace_back(prefix, j.get<std::string>());
    } else {
        rows.emplace_back(prefix, j.dump());
    }
}

void render(const json_t& payload, const std::string& mode, std::ostream& out) {
    if (mode == "json") {
        out << payload.dump(2) << "\n";
        return;
    }
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(payload, "", rows);
    if (mode == "csv") {
        out << "key,value\n";
        for (const auto& [key, value] : rows) out << key << "," << value << "\n";
        return;
    }
    std::size_t width = 0;
    for (const auto& [key, value] : rows) width = std::max(width, key.size());
    for (const auto& [key, value] : rows)
        out << std::left << std::setw(static_cast<int>(width) + 2) << (key + ":") << value
            << "\n";
}

json_t checks_to_json(const std::vector<std::tuple<std::string, bool, double>>& checks) {
    json_t arr = json_t::array();
    for (const auto& [name, pass, value] : checks)
        arr.push_back(json_t{{"name", name}, {"pass", pass}, {"value", value}});
    return arr;
}

json_t load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json_t::parse(in);
}

ObservedDistribution load_distribution(const std::string& path, std::string format) {
    if (format == "auto") {
        if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
            format = "json";
        } else if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
            format = "csv";
        } else {
            std::ifstream probe(path);
            if (!probe) throw std::runtime_error("cannot open " + path);
            char c = 0;
            probe >> std::ws >> c;
            format = c == '{' ? "json" : "csv";
        }
    }
    if (format == "json") return ObservedDistribution::from_json(load_json_file(path));
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return estimate(read_records_csv(in));
}

std::vector<double> parse_number_list(const std::string& text, std::size_t count,
                                      const std::string& flag) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "\"" + token + "\" is not a number");
        }
        while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
            ++used;
        if (used != token.size())
            throw CLI::ValidationError(flag, "\"" + token + "\" is not a number");
        values.push_back(v);
    }
    if (values.size() != count)
        throw CLI::ValidationError(flag, "expected " + std::to_string(count) +
                                             " comma-separated values");
    return values;
}

json_t report_to_payload(const FullReport& report, const CommonOpts& opts) {
    json_t payload;
    payload["seed"] = opts.seed;
    payload["tol"] = opts.tol;
    const json_t body = to_json(report);
    for (const auto& [key, value] : body.items()) payload[key] = value;
    return payload;
}

int cmd_bounds(const std::string& input, const std::string& format,
               std::optional<double> true_ace, bool diagnose, const CommonOpts& opts,
               std::ostream& out) {
    const ObservedDistribution dist = load_distribution(input, format);
    const FullReport report = full_report(dist, true_ace, opts.tol);
    json_t payload = report_to_payload(report, opts);
    if (diagnose) {
        const UpperVariantDiagnostic diag = diagnose_upper_variant(dist);
        payload["upper_variant"] =
            json_t{{"symmetry_row3", diag.symmetry_row3}, {"symmetry_row4", diag.symmetry_row4},
                   {"variant_row3", diag.variant_row3},   {"variant_row4", diag.variant_row4},
                   {"max_lower", diag.max_lower},
                   {"variant_inconsistent", diag.variant_inconsistent}};
    }
    render(payload, opts.output, out);
    return report.violations.empty() ? kExitOk : kExitViolation;
}

int cmd_reproduce(const PolarizerAngles& angles, bool with_chsh, const CommonOpts& opts,
                  std::ostream& out) {
    const ObservedDistribution direct = toy_distribution(angles);
    const QuantumLatentModel model = toy_embedding(angles);
    const ObservedDistribution via_model = observed_distribution(model);

    double pipeline_dev = 0.0;
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z)
                pipeline_dev =
                    std::max(pipeline_dev, std::abs(direct.p(y, x, z) - via_model.p(y, x, z)));

    const double exclusion_dev = check_exclusion(model);
    const double ace = quantum_ace(model);
    const std::array<double, 8> lower = instrumental_lower(direct);
    const std::array<double, 8> upper = instrumental_upper(direct);
    const auto [nat_lower, nat_upper] = natural_bounds(direct);
    const std::array<CertificateValue, 4> certs = group1_certificates(model);
    const double nat_cert = certificate_natural(model);
    const double bound3_excess = lower[2] - ace;

    std::vector<std::tuple<std::string, bool, double>> checks;
    checks.emplace_back("pipeline_equivalence", pipeline_dev <= 1e-12, pipeline_dev);
    checks.emplace_back("exclusion", exclusion_dev <= 1e-12, exclusion_dev);
    for (int g = 0; g < 4; ++g) {
        const int idx = kGroupOneIndices[g];
        checks.emplace_back("lower_" + std::to_string(idx) + "_sound",
                            lower[idx - 1] <= ace + 1e-9, lower[idx - 1]);
        checks.emplace_back("upper_" + std::to_string(idx) + "_sound",
                            upper[idx - 1] >= ace - 1e-9, upper[idx - 1]);
        checks.emplace_back("certificate_" + std::to_string(idx),
                            certs[g].state_value >= -1e-9, certs[g].state_value);
    }
    checks.emplace_back("natural_lower_sound", nat_lower <= ace + 1e-9, nat_lower);
    checks.emplace_back("natural_upper_sound", nat_upper >= ace - 1e-9, nat_upper);
    checks.emplace_back("natural_certificate", nat_cert >= -1e-9, nat_cert);

    if (angles == violation_angles()) {
        const double aplus = 0.25 * (1.0 + 1.0 / std::sqrt(2.0));
        const double aminus = 0.25 * (1.0 - 1.0 / std::sqrt(2.0));
        double cell_dev = std::abs(direct.p(1, 1, 0) - aplus);
        cell_dev = std::max(cell_dev, std::abs(direct.p(1, 1, 1) - aminus));
        cell_dev = std::max(cell_dev, std::abs(direct.p(1, 0, 1) - aminus));
        cell_dev = std::max(cell_dev, std::abs(direct.p(0, 1, 0) - aminus));
        cell_dev = std::max(cell_dev, std::abs(direct.p(1, 0, 0) - aminus));
        checks.emplace_back("reference_cells", cell_dev <= 1e-12, cell_dev);
        checks.emplace_back("zero_effect", std::abs(ace) <= 1e-12, ace);
        const double target = 0.25 * (5.0 / std::sqrt(2.0) - 3.0);
        checks.emplace_back("bound3_value", std::abs(lower[2] - target) <= 1e-9, lower[2]);
        checks.emplace_back("bound3_violated", bound3_excess > opts.tol, bound3_excess);
    }

    json_t chsh_payload;
    if (with_chsh) {
        const PolarizerAngles bell{0.0, 45.0, 22.5, -22.5};
        const ChshResult r = chsh(bell);
        const SecondExperiment exp = second_experiment(bell);
        const double tsirelson = 2.0 * std::sqrt(2.0);
        checks.emplace_back("chsh_quantum", std::abs(std::abs(r.s_value) - tsirelson) <= 1e-9,
                            r.s_value);
        checks.emplace_back("chsh_classical_limit", max_classical_chsh() == 2,
                            static_cast<double>(max_classical_chsh()));
        checks.emplace_back("chsh_exceeds_classical", exp.exceeds_classical_bound,
                            exp.chsh.s_value);
        chsh_payload = json_t{{"angles", {bell.alpha0, bell.alpha1, bell.beta0, bell.beta1}},
                              {"s_value", r.s_value},
                              {"classical_max", max_classical_chsh()}};
    }

    bool all_passed = true;
    for (const auto& [name, pass, value] : checks) all_passed = all_passed && pass;

    json_t payload;
    payload["seed"] = opts.seed;
    payload["tol"] = opts.tol;
    payload["angles"] =
        json_t{{"alpha0", angles.alpha0}, {"alpha1", angles.alpha1},
               {"beta0", angles.beta0},   {"beta1", angles.beta1}};
    payload["quantum_ace"] = ace;
    payload["exclusion_dev"] = exclusion_dev;
    payload["pipeline_max_dev"] = pipeline_dev;
    payload["natural_lower"] = nat_lower;
    payload["natural_upper"] = nat_upper;
    payload["inst_lower"] = lower;
    payload["inst_upper"] = upper;
    payload["bound3_excess"] = bound3_excess;
    payload["violated"] = bound3_excess > opts.tol;
    json_t cert_json = json_t::array();
    for (int g = 0; g < 4; ++g)
        cert_json.push_back(json_t{{"bound", kGroupOneIndices[g]},
                                   {"operator_min_eig", certs[g].operator_min_eig},
                                   {"state_value", certs[g].state_value}});
    payload["certificates"] = std::move(cert_json);
    payload["natural_certificate_min_eig"] = nat_cert;
    if (with_chsh) payload["chsh"] = std::move(chsh_payload);
    payload["checks"] = checks_to_json(checks);
    payload["all_passed"] = all_passed;
    if (!(bound3_excess > opts.tol)) payload["note"] = "no violation at these angles";

    render(payload, opts.output, out);
    return all_passed ? kExitOk : kExitMismatch;
}

int cmd_verify(int samples, int dim_a, int dim_b, const CommonOpts& opts, std::ostream& out) {
    if (samples < 1) throw CLI::ValidationError("--samples", "must be >= 1");

    // classical side: random type mixtures
    double soundness_min = 1e300;
    double natural_min = 1e300;
    double lp_dev_max = 0.0;
    double symmetry_dev_max = 0.0;
    bool lp_all_feasible = true;
    int violation_reports = 0;
    static constexpr int kZPerm[8] = {1, 0, 3, 2, 5, 4, 7, 6};
    static constexpr int kXyPerm[8] = {1, 0, 7, 6, 4, 5, 3, 2};
    for (int i = 0; i < samples; ++i) {
        const CanonicalModel model = random_model(opts.seed + static_cast<std::uint64_t>(i));
        const ObservedDistribution dist = forward(model);
        const double a = ace(model);
        const FullReport report = full_report(dist, a, opts.tol);
        violation_reports += static_cast<int>(report.violations.size());
        const std::array<double, 8>& lo = report.bounds.inst_lower;
        const std::array<double, 8>& hi = report.bounds.inst_upper;
        for (int k = 0; k < 8; ++k) {
            soundness_min = std::min(soundness_min, a - lo[k]);
            soundness_min = std::min(soundness_min, hi[k] - a);
        }
        natural_min = std::min({natural_min, a - report.bounds.natural_lower,
                                report.bounds.natural_upper - a});
        if (report.bounds.feasible) {
            lp_dev_max = std::max(
                lp_dev_max, std::abs(*report.bounds.lp_lower -
                                     *std::max_element(lo.begin(), lo.end())));
            lp_dev_max = std::max(
                lp_dev_max, std::abs(*report.bounds.lp_upper -
                                     *std::min_element(hi.begin(), hi.end())));
        } else {
            lp_all_feasible = false;
        }
        const std::array<double, 8> lo_z = instrumental_lower(dist.relabel_z());
        const std::array<double, 8> lo_xy = instrumental_lower(dist.relabel_xy());
        for (int k = 0; k < 8; ++k) {
            symmetry_dev_max = std::max(symmetry_dev_max, std::abs(lo_z[k] - lo[kZPerm[k]]));
            symmetry_dev_max = std::max(symmetry_dev_max, std::abs(lo_xy[k] - lo[kXyPerm[k]]));
        }
    }

    // quantum side: random structured mechanisms
    double exclusion_max = 0.0;
    double group_lower_min = 1e300;
    double group_upper_min = 1e300;
    double q_natural_min = 1e300;
    double cert_scalar_min = 1e300;
    double cert_operator_min = 1e300;
    double nat_cert_min = 1e300;
    int distribution_violations = 0;
    for (int i = 0; i < samples; ++i) {
        const QuantumLatentModel model =
            random_model(opts.seed + static_cast<std::uint64_t>(i), dim_a, dim_b);
        exclusion_max = std::max(exclusion_max, check_exclusion(model));
        const ObservedDistribution dist = observed_distribution(model);
        distribution_violations += static_cast<int>(validate(dist, opts.tol).size());
        const double a = quantum_ace(model);
        const std::array<double, 8> lo = instrumental_lower(dist);
        const std::array<double, 8> hi = instrumental_upper(dist);
        for (int idx : kGroupOneIndices) {
            group_lower_min = std::min(group_lower_min, a - lo[idx - 1]);
            group_upper_min = std::min(group_upper_min, hi[idx - 1] - a);
        }
        const auto [nl, nu] = natural_bounds(dist);
        q_natural_min = std::min({q_natural_min, a - nl, nu - a});
        for (const CertificateValue& cert : group1_certificates(model)) {
            cert_scalar_min = std::min(cert_scalar_min, cert.state_value);
            cert_operator_min = std::min(cert_operator_min, cert.operator_min_eig);
        }
        nat_cert_min = std::min(nat_cert_min, certificate_natural(model));
    }

    const bool classical_ok = soundness_min >= -1e-9 && natural_min >= -1e-9 &&
                              lp_all_feasible && lp_dev_max <= 1e-7 &&
                              symmetry_dev_max <= 1e-12 && violation_reports == 0;
    const bool quantum_ok = exclusion_max <= 1e-12 && distribution_violations == 0 &&
                            group_lower_min >= -1e-9 && group_upper_min >= -1e-9 &&
                            q_natural_min >= -1e-9 && cert_scalar_min >= -1e-9 &&
                            cert_operator_min >= -1e-9 && nat_cert_min >= -1e-9;

    json_t payload;
    payload["seed"] = opts.seed;
    payload["tol"] = opts.tol;
    payload["samples"] = samples;
    payload["dims"] = {dim_a, dim_b};
    payload["classical"] = json_t{{"soundness_margin_min", soundness_min},
                                  {"natural_margin_min", natural_min},
                                  {"lp_all_feasible", lp_all_feasible},
                                  {"lp_agreement_max_dev", lp_dev_max},
                                  {"symmetry_max_dev", symmetry_dev_max},
                                  {"violation_reports", violation_reports},
                                  {"passed", classical_ok}};
    payload["quantum"] = json_t{{"exclusion_max", exclusion_max},
                                {"distribution_violations", distribution_violations},
                                {"group_lower_margin_min", group_lower_min},
                                {"group_upper_margin_min", group_upper_min},
                                {"natural_margin_min", q_natural_min},
                                {"certificate_scalar_min", cert_scalar_min},
                                {"certificate_operator_min", cert_operator_min},
                                {"natural_certificate_min", nat_cert_min},
                                {"passed", quantum_ok}};
    payload["all_passed"] = classical_ok && quantum_ok;
    render(payload, opts.output, out);
    return classical_ok && quantum_ok ? kExitOk : kExitMismatch;
}

int cmd_simulate(const std::string& input, std::int64_t samples, const CommonOpts& opts,
                 std::ostream& out) {
    if (samples < 1) throw CLI::ValidationError("--samples", "must be >= 1");
    const json_t j = load_json_file(input);
    std::vector<TrialRecord> records;
    if (j.contains("q")) {
        records = sample(CanonicalModel::from_json(j), samples, opts.seed);
    } else if (j.contains("rho")) {
        const QuantumLatentModel model = QuantumLatentModel::from_json(j);
        records = sample(observed_distribution(model), samples, opts.seed);
    } else if (j.contains("p")) {
        records = sample(ObservedDistribution::from_json(j), samples, opts.seed);
    } else {
        throw std::runtime_error(input + " holds neither a latent model nor a distribution");
    }
    write_records_csv(out, records);
    return kExitOk;
}

int cmd_scan(double step, std::ostream& out) {
    const ScanResult r = scan_max_violation(step);
    out << "alpha0,alpha1,beta0,beta1,violation\n";
    out << std::setprecision(10) << r.angles.alpha0 << "," << r.angles.alpha1 << ","
        << r.angles.beta0 << "," << r.angles.beta1 << "," << std::setprecision(17)
        << r.violation << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bounds on treatment effects under noncompliance, with a quantum"
                 " latent-factor simulator"};
    app.name("causal-bounds");
    app.require_subcommand(0, 1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opts.seed,
                        "Random seed (env CAUSAL_BOUNDS_SEED overrides the default)")
            ->envname("CAUSAL_BOUNDS_SEED")
            ->capture_default_str();
        cmd->add_option("--tol", opts.tol, "Violation tolerance")->capture_default_str();
        cmd->add_option("--output", opts.output, "Output format")
            ->check(CLI::IsMember({"table", "json", "csv"}))
            ->capture_default_str();
    };

    std::string input;
    std::string format = "auto";
    double true_ace = 0.0;
    bool diagnose = false;
    CLI::App* bounds_cmd =
        app.add_subcommand("bounds", "Report effect bounds for an observed distribution");
    bounds_cmd->add_option("--input", input, "Trial records (csv) or distribution (json)")
        ->required();
    bounds_cmd->add_option("--format", format, "Input format")
        ->check(CLI::IsMember({"auto", "csv", "json"}));
    CLI::Option* true_ace_opt = bounds_cmd->add_option(
        "--true-ace", true_ace, "Reference effect; violated bounds switch the exit code to 3");
    bounds_cmd->add_flag("--diagnose-variant", diagnose,
                         "Also evaluate the sign-variant upper rows 3 and 4");
    add_common(bounds_cmd);

    std::string angles_text;
    bool with_chsh = false;
    CLI::App* reproduce_cmd = app.add_subcommand(
        "reproduce", "Re-derive the zero-effect construction and check its fingerprints");
    reproduce_cmd->add_option("--angles", angles_text,
                              "alpha0,alpha1,beta0,beta1 in degrees (default 67.5,22.5,-45,0)");
    reproduce_cmd->add_flag("--chsh", with_chsh, "Also run the two-filter correlation checks");
    add_common(reproduce_cmd);

    int samples = 100;
    std::string dims_text = "2,2";
    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "Randomized soundness sweep over classical and quantum models");
    verify_cmd->add_option("--samples", samples, "Models per side")->capture_default_str();
    verify_cmd->add_option("--dims", dims_text, "Quantum factor dimensions dA,dB")
        ->capture_default_str();
    add_common(verify_cmd);

    std::string sim_input;
    std::int64_t sim_samples = 1000;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Draw trial records from a model file as CSV");
    simulate_cmd->add_option("--input", sim_input, "Model or distribution (json)")->required();
    simulate_cmd->add_option("--samples", sim_samples, "Record count")->capture_default_str();
    add_common(simulate_cmd);

    double step = 22.5;
    CLI::App* scan_cmd = app.add_subcommand(
        "scan", "Grid-search polarizer angles for the largest bound-3 violation");
    scan_cmd->add_option("--step", step, "Grid step in degrees, in (0, 45]")
        ->capture_default_str();
    add_common(scan_cmd);

    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("causal-bounds");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const std::string& s : full) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());

        if (bounds_cmd->parsed()) {
            std::optional<double> reference;
            if (true_ace_opt->count() > 0) reference = true_ace;
            return cmd_bounds(input, format, reference, diagnose, opts, out);
        }
        if (reproduce_cmd->parsed()) {
            PolarizerAngles angles = violation_angles();
            if (!angles_text.empty()) {
                const std::vector<double> v = parse_number_list(angles_text, 4, "--angles");
                angles = {v[0], v[1], v[2], v[3]};
            }
            return cmd_reproduce(angles, with_chsh, opts, out);
        }
        if (verify_cmd->parsed()) {
            const std::vector<double> d = parse_number_list(dims_text, 2, "--dims");
            const int dim_a = static_cast<int>(d[0]);
            const int dim_b = static_cast<int>(d[1]);
            if (dim_a != d[0] || dim_b != d[1])
                throw CLI::ValidationError("--dims", "dimensions must be integers");
            return cmd_verify(samples, dim_a, dim_b, opts, out);
        }
        if (simulate_cmd->parsed()) return cmd_simulate(sim_input, sim_samples, opts, out);
        if (scan_cmd->parsed()) return cmd_scan(step, out);

        err << app.help();
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    } catch (const CsvParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const EmptyArm& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InadmissibleModel& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InvalidDistribution& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InvalidModel& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InvalidOperator& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DimMismatch& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NotHermitian& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace causal
