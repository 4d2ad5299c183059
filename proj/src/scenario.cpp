#include "ugks/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ugks/error.hpp"
#include "ugks/oracles.hpp"

namespace ugks {

namespace {

using nlohmann::json;

std::string field_location(const std::string& text, const std::string& source, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return source;
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
    return source + ":" + std::to_string(line);
}

[[noreturn]] void field_error(const std::string& where, const std::string& key, const std::string& what) {
    throw Error(ErrorCategory::Parse, where + ": field '" + key + "': " + what);
}

double as_number(const json& value, const std::string& where, const std::string& key) {
    if (!value.is_number()) field_error(where, key, "expected a number");
    return value.get<double>();
}

std::size_t as_count(const json& value, const std::string& where, const std::string& key) {
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        field_error(where, key, "expected a non-negative integer");
    }
    return value.get<std::size_t>();
}

bool as_bool(const json& value, const std::string& where, const std::string& key) {
    if (!value.is_boolean()) field_error(where, key, "expected true or false");
    return value.get<bool>();
}

std::string as_string(const json& value, const std::string& where, const std::string& key) {
    if (!value.is_string()) field_error(where, key, "expected a string");
    return value.get<std::string>();
}

std::vector<double> cell_centres(std::size_t nx) {
    std::vector<double> x(nx);
    const double dx = 1.0 / static_cast<double>(nx);
    for (std::size_t i = 0; i < nx; ++i) x[i] = (static_cast<double>(i) + 0.5) * dx;
    return x;
}

std::vector<double> transport_density(double t, std::span<const double> x, const VelocityGrid& grid, double eta) {
    std::vector<double> rho(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double s = 0.0;
        for (double v : grid.velocities) s += oracles::exact_transport(t, x[i], v, eta);
        rho[i] = s / static_cast<double>(grid.size());
    }
    return rho;
}

std::vector<double> diffusion_density(double t, std::span<const double> x, double kappa) {
    std::vector<double> rho(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rho[i] = oracles::exact_diffusion_density(t, x[i], kappa);
    return rho;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

std::string format_time(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

}  // namespace

void Scenario::validate() const {
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << name << " must be positive, got " << v;
            throw Error(ErrorCategory::InvalidConfig, os.str());
        }
    };
    positive(eta, "eta");
    positive(epsilon, "epsilon");
    positive(sigma, "sigma");
    if (dt) positive(*dt, "dt");
    if (nx == 0) throw Error(ErrorCategory::InvalidConfig, "nx must be at least 1");
    if (variant == Variant::ImplicitDiffusion && nx < 3) {
        throw Error(ErrorCategory::InvalidConfig, "the implicit-diffusion variant needs nx >= 3");
    }
    if (nv < 2 || nv % 2 != 0) {
        throw Error(ErrorCategory::InvalidConfig, "nv must be a positive even number, got " + std::to_string(nv));
    }
    if (op == OperatorKind::Custom) {
        throw Error(ErrorCategory::InvalidConfig, "scenarios need a built-in operator (bgk, fp or sc)");
    }
    if (!dt) {
        if (cfl_c1 < 0.0 || cfl_c2 < 0.0 || !(cfl_c1 + cfl_c2 > 0.0)) {
            throw Error(ErrorCategory::InvalidConfig, "cfl_c1 and cfl_c2 must be non-negative and not both zero");
        }
    }
    for (std::size_t k = 0; k < t_snapshots.size(); ++k) {
        if (!(t_snapshots[k] >= 0.0) || !std::isfinite(t_snapshots[k])) {
            throw Error(ErrorCategory::InvalidConfig, "snapshot times must be non-negative");
        }
        if (k > 0 && t_snapshots[k] < t_snapshots[k - 1]) {
            throw Error(ErrorCategory::InvalidConfig, "snapshot times must be sorted ascending");
        }
    }
    const int refs = int(compare_exact_transport) + int(compare_exact_diffusion) + int(compare_limit_fd);
    if (refs > 1) throw Error(ErrorCategory::InvalidConfig, "choose at most one comparison reference");
    if (compare_exact_diffusion) {
        for (double t : t_snapshots) {
            if (!(t > 0.0)) throw Error(ErrorCategory::InvalidConfig, "exact diffusion reference needs t > 0");
        }
    }
}

double Scenario::time_step() const noexcept {
    if (dt) return *dt;
    const double h = dx();
    return cfl_c1 * h * h + cfl_c2 * eta * h;
}

Reference Scenario::reference() const noexcept {
    if (compare_exact_transport) return Reference::ExactTransport;
    if (compare_exact_diffusion) return Reference::ExactDiffusion;
    if (compare_limit_fd) return Reference::LimitFd;
    return Reference::None;
}

SchemeParams Scenario::scheme_params() const {
    SchemeParams p;
    p.eta = eta;
    p.epsilon = epsilon;
    p.sigma = sigma;
    p.dt = time_step();
    p.dx = dx();
    p.nx = nx;
    p.variant = variant;
    return p;
}

bool is_preset(std::string_view name) noexcept {
    return name == "transport" || name == "intermediate" || name == "diffusive";
}

Scenario preset(std::string_view name) {
    Scenario s;
    s.name = std::string(name);
    s.nx = 100;
    s.nv = 100;
    s.sigma = 1.0;
    s.dt = 1e-5;
    s.t_snapshots = {0.05, 0.1};
    if (name == "transport") {
        s.eta = 1.0;
        s.epsilon = 100.0;
    } else if (name == "intermediate") {
        s.eta = 0.1;
        s.epsilon = 0.1;
    } else if (name == "diffusive") {
        s.eta = 1e-4;
        s.epsilon = 1e-4;
        s.t_snapshots = {0.05, 0.075, 0.1};
    } else {
        throw Error(ErrorCategory::InvalidConfig,
                    "unknown preset '" + std::string(name) + "' (expected transport, intermediate or diffusive)");
    }
    return s;
}

Scenario parse_scenario_json(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCategory::Parse, source + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCategory::Parse, source + ": top level must be a JSON object");

    Scenario s;
    if (doc.contains("preset")) {
        const std::string where = field_location(text, source, "preset");
        const std::string name = as_string(doc["preset"], where, "preset");
        if (!is_preset(name)) field_error(where, "preset", "unknown preset '" + name + "'");
        s = preset(name);
    }
    for (const auto& [key, value] : doc.items()) {
        const std::string where = field_location(text, source, key);
        if (key == "preset") continue;
        if (key == "name") s.name = as_string(value, where, key);
        else if (key == "operator") {
            try {
                s.op = parse_operator_kind(as_string(value, where, key));
            } catch (const Error& e) {
                field_error(where, key, e.what());
            }
        } else if (key == "eta") s.eta = as_number(value, where, key);
        else if (key == "epsilon") s.epsilon = as_number(value, where, key);
        else if (key == "sigma") s.sigma = as_number(value, where, key);
        else if (key == "nx") s.nx = as_count(value, where, key);
        else if (key == "nv") s.nv = as_count(value, where, key);
        else if (key == "dt") {
            if (value.is_string() && value.get<std::string>() == "auto") s.dt.reset();
            else if (value.is_number()) s.dt = value.get<double>();
            else field_error(where, key, "expected a number or \"auto\"");
        } else if (key == "cfl_c1") s.cfl_c1 = as_number(value, where, key);
        else if (key == "cfl_c2") s.cfl_c2 = as_number(value, where, key);
        else if (key == "t_snapshots") {
            if (!value.is_array()) field_error(where, key, "expected an array of numbers");
            s.t_snapshots.clear();
            for (const auto& t : value) s.t_snapshots.push_back(as_number(t, where, key));
        } else if (key == "variant") {
            try {
                s.variant = parse_variant(as_string(value, where, key));
            } catch (const Error& e) {
                field_error(where, key, e.what());
            }
        } else if (key == "out_dir") s.out_dir = as_string(value, where, key);
        else if (key == "compare_exact_transport") s.compare_exact_transport = as_bool(value, where, key);
        else if (key == "compare_exact_diffusion") s.compare_exact_diffusion = as_bool(value, where, key);
        else if (key == "compare_limit_fd") s.compare_limit_fd = as_bool(value, where, key);
        else throw Error(ErrorCategory::Parse, where + ": unknown field '" + key + "'");
    }
    try {
        s.validate();
    } catch (const Error& e) {
        throw Error(ErrorCategory::InvalidConfig, source + ": " + e.what());
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_json(buffer.str(), path);
}

Scenario load_scenario(std::string_view preset_or_path) {
    if (is_preset(preset_or_path)) return preset(preset_or_path);
    return load_scenario_file(std::string(preset_or_path));
}

KineticState initialize_state(const Scenario& scenario, const VelocityGrid& grid) {
    const std::size_t nx = scenario.nx;
    const std::size_t nv = grid.size();
    KineticState state(nx, nv);
    const auto x = cell_centres(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        auto row = state.row(i);
        for (std::size_t j = 0; j < nv; ++j) row[j] = oracles::f0(x[i], grid.velocities[j]);
        state.rho[i] = mean(row);
    }
    return state;
}

Norms error_norms(std::span<const double> a, std::span<const double> b) {
    Norms n;
    if (a.empty()) return n;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        n.l1 += d;
        n.l2 += d * d;
        n.linf = std::max(n.linf, d);
    }
    const double w = 1.0 / static_cast<double>(a.size());
    n.l1 *= w;
    n.l2 = std::sqrt(n.l2 * w);
    return n;
}

std::string snapshot_file_name(const Scenario& scenario, double t) {
    return scenario.name + "_" + std::string(to_string(scenario.op)) + "_t" + format_time(t) + ".csv";
}

void write_density_csv(const std::string& path, std::span<const double> x, std::span<const double> rho,
                       std::span<const double> rho_ref) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::Io, "cannot write '" + path + "'");
    const bool with_ref = !rho_ref.empty();
    out << (with_ref ? "x,rho,rho_ref,abs_err\n" : "x,rho\n");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << x[i] << ',' << rho[i];
        if (with_ref) out << ',' << rho_ref[i] << ',' << std::abs(rho[i] - rho_ref[i]);
        out << '\n';
    }
    if (!out) throw Error(ErrorCategory::Io, "write to '" + path + "' failed");
}

DensityCsv read_density_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCategory::Parse, path + ": empty file");
    std::size_t columns = 0;
    if (line == "x,rho") columns = 2;
    else if (line == "x,rho,rho_ref,abs_err") columns = 4;
    else throw Error(ErrorCategory::Parse, path + ":1: unexpected header '" + line + "'");

    DensityCsv csv;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> values;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw Error(ErrorCategory::Parse, path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            values.push_back(v);
        }
        if (values.size() != columns) {
            throw Error(ErrorCategory::Parse, path + ":" + std::to_string(line_no) + ": expected "
                                                  + std::to_string(columns) + " columns");
        }
        csv.x.push_back(values[0]);
        csv.rho.push_back(values[1]);
        if (columns == 4) {
            csv.rho_ref.push_back(values[2]);
            csv.abs_err.push_back(values[3]);
        }
    }
    return csv;
}

ErrorReport run_and_report(const Scenario& scenario, bool write_csv) {
    scenario.validate();
    const VelocityGrid grid = build_grid(scenario.nv / 2);
    const CollisionOperator op = build_operator(scenario.op, grid);
    const Scheme scheme(scenario.scheme_params(), op, grid);
    const KineticState initial = initialize_state(scenario, grid);
    const auto x = cell_centres(scenario.nx);
    const double kappa = 1.0 / (3.0 * scenario.sigma * std::abs(op.lambda_star()));
    const double kappa_d = grid.second_moment() / (scenario.sigma * std::abs(op.lambda_star()));

    if (write_csv) {
        std::error_code ec;
        std::filesystem::create_directories(scenario.out_dir, ec);
        if (ec) throw Error(ErrorCategory::Io, "cannot create '" + scenario.out_dir + "': " + ec.message());
    }

    const RunResult result = run(scheme, initial, scenario.t_snapshots);

    ErrorReport report;
    report.lambda_star = op.lambda_star();
    report.dt = scheme.params().dt;
    report.seconds_per_step = result.seconds_per_step;

    std::vector<double> limit_rho = initial.rho;
    std::size_t limit_steps = 0;
    for (const Snapshot& snap : result.snapshots) {
        SnapshotReport r;
        r.t = snap.state.t;
        r.steps = snap.state.steps;
        r.x = x;
        r.rho = snap.state.rho;
        switch (scenario.reference()) {
            case Reference::ExactTransport: r.rho_ref = transport_density(r.t, x, grid, scenario.eta); break;
            case Reference::ExactDiffusion: r.rho_ref = diffusion_density(r.t, x, kappa); break;
            case Reference::LimitFd:
                while (limit_steps < r.steps) {
                    limit_rho = oracles::limit_diffusion_step(limit_rho, report.dt, scenario.dx(), kappa_d);
                    ++limit_steps;
                }
                r.rho_ref = limit_rho;
                break;
            case Reference::None: break;
        }
        if (!r.rho_ref.empty()) r.error = error_norms(r.rho, r.rho_ref);
        r.mass = snap.state.mass();
        r.mass_drift = (r.mass - result.initial_mass) / result.initial_mass;
        if (write_csv) {
            r.csv_path = (std::filesystem::path(scenario.out_dir) / snapshot_file_name(scenario, snap.requested_time))
                             .string();
            write_density_csv(r.csv_path, r.x, r.rho, r.rho_ref);
        }
        report.snapshots.push_back(std::move(r));
    }
    return report;
}

std::vector<LambdaStarRow> lambda_star_report(OperatorKind kind, std::span<const std::size_t> nv_list) {
    std::vector<LambdaStarRow> rows;
    for (std::size_t nv : nv_list) {
        if (nv < 2 || nv % 2 != 0) {
            throw Error(ErrorCategory::InvalidConfig, "nv must be a positive even number, got " + std::to_string(nv));
        }
        const CollisionOperator op = build_operator(kind, build_grid(nv / 2));
        LambdaStarRow row;
        row.nv = nv;
        row.lambda_star = op.lambda_star();
        switch (kind) {
            case OperatorKind::Bgk: row.continuum = -1.0; break;
            case OperatorKind::FokkerPlanck: row.continuum = -2.0; break;
            case OperatorKind::ScatteringPeriodic: row.continuum = -1.5; break;
            case OperatorKind::Custom: break;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<ApSweepRow> ap_sweep(OperatorKind kind, std::span<const double> epsilons, const Scenario& base,
                                 double t_final) {
    std::vector<ApSweepRow> rows;
    for (double eps : epsilons) {
        Scenario s = base;
        s.op = kind;
        s.epsilon = eps;
        s.eta = eps >= 1.0 ? 1.0 : eps;
        s.dt.reset();
        s.t_snapshots = {t_final};
        s.compare_exact_transport = false;
        s.compare_exact_diffusion = false;
        s.compare_limit_fd = false;
        s.validate();

        const VelocityGrid grid = build_grid(s.nv / 2);
        const CollisionOperator op = build_operator(kind, grid);
        const Scheme scheme(s.scheme_params(), op, grid);
        const KineticState initial = initialize_state(s, grid);
        const RunResult result = run(scheme, initial, s.t_snapshots);
        const KineticState& final_state = result.snapshots.back().state;
        const auto x = cell_centres(s.nx);

        ApSweepRow row;
        row.epsilon = eps;
        row.eta = s.eta;
        row.transport_branch = eps >= 1.0;
        row.dt = scheme.params().dt;
        row.steps = final_state.steps;
        row.finite = all_finite(final_state.f);

        std::vector<double> ref;
        if (row.transport_branch) {
            ref = transport_density(final_state.t, x, grid, s.eta);
            KineticState upwind = initial;
            for (std::size_t k = 0; k < row.steps; ++k) {
                upwind = oracles::upwind_transport_step(upwind, row.dt, s.dx(), s.eta, grid);
            }
            row.upwind_gap = error_norms(final_state.rho, upwind.rho).linf;
        } else {
            ref = diffusion_density(final_state.t, x, 1.0 / (3.0 * s.sigma * std::abs(op.lambda_star())));
        }
        const Norms err = error_norms(final_state.rho, ref);
        const std::vector<double> zeros(ref.size(), 0.0);
        row.rel_l2_error = err.l2 / error_norms(ref, zeros).l2;
        row.linf_error = err.linf;
        rows.push_back(row);
    }
    return rows;
}

std::vector<VariantComparison> compare_variants(const Scenario& base, std::span<const double> dts, double t) {
    std::vector<VariantComparison> rows;
    for (double dt : dts) {
        Scenario s = base;
        s.dt = dt;
        s.t_snapshots = {t};
        std::vector<double> rho[2];
        const Variant variants[2] = {Variant::ExplicitDiffusion, Variant::ImplicitDiffusion};
        const VelocityGrid grid = build_grid(s.nv / 2);
        const CollisionOperator op = build_operator(s.op, grid);
        for (int k = 0; k < 2; ++k) {
            s.variant = variants[k];
            s.validate();
            const Scheme scheme(s.scheme_params(), op, grid);
            const RunResult result = run(scheme, initialize_state(s, grid), s.t_snapshots);
            rho[k] = result.snapshots.back().state.rho;
        }
        const Norms n = error_norms(rho[0], rho[1]);
        rows.push_back({dt, n.linf, n.l2});
    }
    return rows;
}

}  // namespace ugks
