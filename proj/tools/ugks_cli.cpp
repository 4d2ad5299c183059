// Command-line front end: runs presets and config files, inspects operators,
// and drives the sweep harnesses.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ugks/error.hpp"
#include "ugks/scenario.hpp"
#include "ugks/velocity_space.hpp"

namespace {

using namespace ugks;

struct CommonOptions {
    std::string preset;
    std::string config;
    std::string op;
    std::string variant;
    std::string out_dir;
    std::string compare;
    double dt = 0.0;
};

Scenario resolve_scenario(const CommonOptions& o) {
    Scenario s;
    if (!o.config.empty()) s = load_scenario_file(o.config);
    else if (!o.preset.empty()) s = preset(o.preset);
    else s = preset("transport");
    if (!o.op.empty()) s.op = parse_operator_kind(o.op);
    if (!o.variant.empty()) s.variant = parse_variant(o.variant);
    if (!o.out_dir.empty()) s.out_dir = o.out_dir;
    if (o.dt > 0.0) s.dt = o.dt;
    if (!o.compare.empty()) {
        s.compare_exact_transport = o.compare == "transport";
        s.compare_exact_diffusion = o.compare == "diffusion";
        s.compare_limit_fd = o.compare == "limit-fd";
        if (s.reference() == Reference::None && o.compare != "none") {
            throw Error(ErrorCategory::InvalidConfig,
                        "unknown comparison '" + o.compare + "' (expected transport, diffusion, limit-fd or none)");
        }
    }
    s.validate();
    return s;
}

Matrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open matrix file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ss(line);
        std::vector<double> row;
        std::string token;
        while (ss >> token) {
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0') {
                throw Error(ErrorCategory::Parse, path + ":" + std::to_string(line_no) + ": bad number '" + token + "'");
            }
            row.push_back(v);
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw Error(ErrorCategory::Parse, path + ": no matrix rows");
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw Error(ErrorCategory::Parse, path + ": row " + std::to_string(i + 1) + " has "
                                                  + std::to_string(rows[i].size()) + " entries, expected "
                                                  + std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

int cmd_run(const CommonOptions& o) {
    const Scenario s = resolve_scenario(o);
    const ErrorReport report = run_and_report(s, true);
    std::printf("scenario %s operator %s variant %s dt %.6g lambda* %.10g\n", s.name.c_str(),
                std::string(to_string(s.op)).c_str(), std::string(to_string(s.variant)).c_str(), report.dt,
                report.lambda_star);
    for (const auto& r : report.snapshots) {
        std::printf("t %.6g steps %zu mass_drift %.3e", r.t, r.steps, r.mass_drift);
        if (!r.rho_ref.empty()) std::printf(" L1 %.6e L2 %.6e Linf %.6e", r.error.l1, r.error.l2, r.error.linf);
        std::printf(" -> %s\n", r.csv_path.c_str());
    }
    std::printf("seconds per step %.3e\n", report.seconds_per_step);
    return 0;
}

int cmd_validate(const std::string& op_name, std::size_t nv, const std::string& matrix_path, unsigned seed) {
    const bool from_file = !matrix_path.empty();
    const Matrix m = from_file ? load_matrix(matrix_path) : Matrix{};
    const std::size_t size = from_file ? m.size() : nv;
    if (size < 2 || size % 2 != 0) {
        throw Error(ErrorCategory::InvalidConfig, "operator size must be a positive even number");
    }
    const VelocityGrid grid = build_grid(size / 2);
    std::optional<CollisionOperator> built;
    if (!from_file) built = build_operator(parse_operator_kind(op_name), grid);
    const Matrix& d = from_file ? m : built->matrix();

    const ValidationReport report = validate_operator(d);
    const auto flag = [](bool ok) { return ok ? "ok" : "FAIL"; };
    std::printf("size %zu\n", size);
    std::printf("symmetric %s\nzero row sums %s\nnonnegative off-diagonal %s\n", flag(report.symmetric),
                flag(report.zero_row_sums), flag(report.nonnegative_off_diagonal));
    std::printf("negative semidefinite %s (largest eigenvalue %.3e)\n", flag(report.negative_semidefinite),
                report.max_eigenvalue);
    std::printf("kernel span(1) %s (dimension %zu)\nirreducible %s\ndelta bound %.6g\n",
                flag(report.kernel_is_constants), report.kernel_dimension, flag(report.irreducible),
                report.delta_bound);
    if (!report.ok()) {
        std::string msg = "operator failed validation:";
        for (const auto& f : report.failures) msg += " [" + f + "]";
        throw Error(ErrorCategory::OperatorInvalid, msg);
    }

    const CollisionOperator op = from_file ? from_matrix(grid, d) : *built;
    std::printf("lambda* %.15g\n", op.lambda_star());

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.1, 2.0);
    double worst_roundtrip = 0.0;
    double worst_entropy = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> phi(size), f(size);
        for (auto& v : phi) v = normal(rng);
        ugks::remove_mean(phi);
        const auto psi = pseudo_inverse_apply(op, phi);
        const auto back = op.apply(psi);
        double err = 0.0;
        for (std::size_t j = 0; j < size; ++j) err += (back[j] - phi[j]) * (back[j] - phi[j]);
        worst_roundtrip = std::max(worst_roundtrip, std::sqrt(err) / norm2(phi));
        for (auto& v : f) v = uniform(rng);
        worst_entropy = std::max(worst_entropy, entropy_dissipation(op, f));
    }
    std::printf("pseudo-inverse round trip (20 random vectors, seed %u) max relative error %.3e\n", seed,
                worst_roundtrip);
    std::printf("entropy dissipation (20 random positive states) max %.3e\n", worst_entropy);
    return 0;
}

int cmd_lambda_star(const std::string& op_name, const std::vector<std::size_t>& nvs) {
    const auto rows = lambda_star_report(parse_operator_kind(op_name.empty() ? "sc" : op_name), nvs);
    std::printf("nv,lambda_star,continuum\n");
    for (const auto& r : rows) {
        if (r.continuum) std::printf("%zu,%.15g,%.15g\n", r.nv, r.lambda_star, *r.continuum);
        else std::printf("%zu,%.15g,\n", r.nv, r.lambda_star);
    }
    return 0;
}

int cmd_ap_sweep(const CommonOptions& o, const std::vector<double>& eps, double t_final) {
    Scenario base = resolve_scenario(o);
    const auto rows = ap_sweep(base.op, eps, base, t_final);
    std::printf("epsilon,eta,branch,dt,steps,rel_l2_error,linf_error,upwind_gap,finite\n");
    for (const auto& r : rows) {
        std::printf("%.6g,%.6g,%s,%.6g,%zu,%.6e,%.6e,%.6e,%s\n", r.epsilon, r.eta,
                    r.transport_branch ? "transport" : "diffusion", r.dt, r.steps, r.rel_l2_error, r.linf_error,
                    r.upwind_gap, r.finite ? "yes" : "no");
    }
    return 0;
}

int cmd_compare_variants(const CommonOptions& o, const std::vector<double>& dts, double t) {
    const Scenario base = resolve_scenario(o);
    const auto rows = compare_variants(base, dts, t);
    std::printf("dt,linf,l2\n");
    for (const auto& r : rows) std::printf("%.6g,%.6e,%.6e\n", r.dt, r.linf, r.l2);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        std::printf("ratio dt=%.6g/dt=%.6g: %.4f\n", rows[k - 1].dt, rows[k].dt, rows[k - 1].linf / rows[k].linf);
    }
    return 0;
}

void add_scenario_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--preset", o.preset, "transport, intermediate or diffusive");
    cmd->add_option("--config", o.config, "JSON scenario file");
    cmd->add_option("--operator", o.op, "bgk, fp or sc");
    cmd->add_option("--variant", o.variant, "explicit or implicit");
    cmd->add_option("--dt", o.dt, "time step (overrides the scenario)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unified gas kinetic scheme for 1D linear kinetic equations"};
    app.require_subcommand(1);
    unsigned seed = 12345;
    app.add_option("--seed", seed, "seed for randomized checks");

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "run a scenario and write density snapshots");
    add_scenario_flags(run, run_opts);
    run->add_option("--out-dir", run_opts.out_dir, "output directory for CSV files");
    run->add_option("--compare", run_opts.compare, "reference: transport, diffusion, limit-fd or none");

    std::string val_op = "bgk";
    std::size_t val_nv = 100;
    std::string val_matrix;
    auto* validate = app.add_subcommand("validate-operator", "check the structure of a collision operator");
    validate->add_option("--operator", val_op, "bgk, fp or sc");
    validate->add_option("--nv", val_nv, "number of velocities");
    validate->add_option("--matrix", val_matrix, "whitespace or comma separated square matrix");

    std::string ls_op;
    std::vector<std::size_t> ls_nv{50, 100, 200, 400};
    auto* lambda = app.add_subcommand("lambda-star", "pseudo-eigenvalue for several grid sizes");
    lambda->add_option("--operator", ls_op, "bgk, fp or sc (default sc)");
    lambda->add_option("--nv", ls_nv, "velocity counts")->delimiter(',');

    CommonOptions ap_opts;
    std::vector<double> ap_eps{1e8, 1e-2, 1e-3, 1e-4, 1e-5};
    double ap_t = 0.1;
    auto* ap = app.add_subcommand("ap-sweep", "accuracy and stability across epsilon");
    add_scenario_flags(ap, ap_opts);
    ap->add_option("--eps", ap_eps, "epsilon values")->delimiter(',');
    ap->add_option("--t", ap_t, "final time");

    CommonOptions cv_opts;
    cv_opts.preset = "diffusive";
    std::vector<double> cv_dt{2e-5, 1e-5};
    double cv_t = 0.05;
    auto* cv = app.add_subcommand("compare-variants", "explicit vs implicit-diffusion variants");
    add_scenario_flags(cv, cv_opts);
    cv->add_option("--dts", cv_dt, "time steps")->delimiter(',');
    cv->add_option("--t", cv_t, "comparison time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(ErrorCategory::InvalidConfig)).c_str(),
                     e.what());
        return exit_code(ErrorCategory::InvalidConfig);
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*validate) return cmd_validate(val_op, val_nv, val_matrix, seed);
        if (*lambda) return cmd_lambda_star(ls_op, ls_nv);
        if (*ap) return cmd_ap_sweep(ap_opts, ap_eps, ap_t);
        if (*cv) return cmd_compare_variants(cv_opts, cv_dt, cv_t);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.category())).c_str(), e.what());
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(ErrorCategory::SolverFailure)).c_str(),
                     e.what());
        return exit_code(ErrorCategory::SolverFailure);
    }
    return 0;
}
