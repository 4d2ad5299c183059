#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ugks/ugks_core.hpp"
#include "ugks/velocity_space.hpp"

namespace ugks {

enum class Reference { None, ExactTransport, ExactDiffusion, LimitFd };

/// A complete run description. `name` is the preset the scenario started
/// from and prefixes the CSV file names.
struct Scenario {
    std::string name = "custom";
    OperatorKind op = OperatorKind::Bgk;
    double eta = 1.0;
    double epsilon = 1.0;
    double sigma = 1.0;
    std::size_t nx = 100;
    std::size_t nv = 100;
    /// Unset means "auto": cfl_c1 dx^2 + cfl_c2 eta dx.
    std::optional<double> dt;
    double cfl_c1 = 0.5;
    double cfl_c2 = 0.5;
    std::vector<double> t_snapshots{0.05, 0.1};
    Variant variant = Variant::ExplicitDiffusion;
    std::string out_dir = ".";
    bool compare_exact_transport = false;
    bool compare_exact_diffusion = false;
    bool compare_limit_fd = false;

    /// Throws Error(InvalidConfig) describing the first offending field.
    void validate() const;
    double dx() const noexcept { return 1.0 / static_cast<double>(nx); }
    double time_step() const noexcept;
    Reference reference() const noexcept;
    SchemeParams scheme_params() const;
};

/// "transport", "intermediate" or "diffusive"; throws Error(InvalidConfig) otherwise.
Scenario preset(std::string_view name);
bool is_preset(std::string_view name) noexcept;

/// Flat JSON object. An optional "preset" key selects the base values, the
/// remaining keys override them, unknown keys are rejected.
Scenario parse_scenario_json(const std::string& text, const std::string& source = "<config>");
Scenario load_scenario_file(const std::string& path);
/// Preset name or path to a JSON file.
Scenario load_scenario(std::string_view preset_or_path);

/// F_ij = f0(x_i, v_j) at cell centres x_i = (i + 1/2) dx.
KineticState initialize_state(const Scenario& scenario, const VelocityGrid& grid);

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

/// Discrete norms of a - b with weight 1/n.
Norms error_norms(std::span<const double> a, std::span<const double> b);

struct SnapshotReport {
    double t = 0.0;
    std::size_t steps = 0;
    std::string csv_path;
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> rho_ref;  // empty without a reference
    Norms error;
    double mass = 0.0;
    /// (mass - initial mass) / initial mass
    double mass_drift = 0.0;
};

struct ErrorReport {
    std::vector<SnapshotReport> snapshots;
    double lambda_star = 0.0;
    double dt = 0.0;
    double seconds_per_step = 0.0;
};

/// Runs the scenario and writes one CSV per snapshot when write_csv is set.
ErrorReport run_and_report(const Scenario& scenario, bool write_csv = true);

/// "<name>_<operator>_t<time>.csv"
std::string snapshot_file_name(const Scenario& scenario, double t);

struct DensityCsv {
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> rho_ref;
    std::vector<double> abs_err;
};

void write_density_csv(const std::string& path, std::span<const double> x, std::span<const double> rho,
                       std::span<const double> rho_ref = {});
DensityCsv read_density_csv(const std::string& path);

struct LambdaStarRow {
    std::size_t nv = 0;
    double lambda_star = 0.0;
    std::optional<double> continuum;
};

std::vector<LambdaStarRow> lambda_star_report(OperatorKind kind, std::span<const std::size_t> nv_list);

struct ApSweepRow {
    double epsilon = 0.0;
    double eta = 0.0;
    bool transport_branch = false;
    double dt = 0.0;
    std::size_t steps = 0;
    /// Relative L2 error of rho against the branch oracle.
    double rel_l2_error = 0.0;
    double linf_error = 0.0;
    /// Transport branch only: L-inf distance between the UGKS and upwind densities.
    double upwind_gap = 0.0;
    bool finite = true;
};

/// For each epsilon: eps >= 1 runs the transport branch (eta = 1), otherwise
/// eta = eps. dt follows the CFL law of `base`; t_final defaults to 0.1.
std::vector<ApSweepRow> ap_sweep(OperatorKind kind, std::span<const double> epsilons, const Scenario& base,
                                 double t_final = 0.1);

struct VariantComparison {
    double dt = 0.0;
    double linf = 0.0;
    double l2 = 0.0;
};

/// Explicit vs implicit-diffusion densities at time t for each dt.
std::vector<VariantComparison> compare_variants(const Scenario& base, std::span<const double> dts, double t);

}  // namespace ugks
