#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ugks/linalg.hpp"
#include "ugks/velocity_space.hpp"

namespace ugks {

enum class Variant { ExplicitDiffusion, ImplicitDiffusion };

/// "explicit" / "implicit"
std::string_view to_string(Variant variant) noexcept;
Variant parse_variant(std::string_view name);

struct SchemeParams {
    double eta = 1.0;
    double epsilon = 1.0;
    double sigma = 1.0;
    double dt = 1e-5;
    double dx = 0.01;
    std::size_t nx = 100;
    Variant variant = Variant::ExplicitDiffusion;

    /// Throws Error(InvalidConfig) unless all scalars are positive and finite
    /// and dx * nx == 1 to 1e-14.
    void validate() const;
};

/// Time-integrated interface coefficients, w = lambda* sigma dt / (eta eps).
struct FluxCoefficients {
    double a_coef = 0.0;
    double c_coef = 0.0;
    double d_coef = 0.0;
    double w = 0.0;
};

/// Stable for all w < 0: series near zero, e^w flushed to 0 below -700.
FluxCoefficients flux_coefficients(double eta, double epsilon, double sigma, double dt, double lambda_star);
FluxCoefficients flux_coefficients(const SchemeParams& params, double lambda_star);

struct HalfMoments {
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    double j_minus = 0.0;
    double j_plus = 0.0;

    double rho() const noexcept { return rho_minus + rho_plus; }
};

/// Averages with weight 1/(2N) over v < 0 and v > 0.
HalfMoments half_moments(std::span<const double> f_row, const VelocityGrid& grid);

/// F is stored row-major: row i holds the 2N velocities of cell i.
struct KineticState {
    std::size_t nx = 0;
    std::size_t nv = 0;
    std::vector<double> f;
    std::vector<double> rho;
    double t = 0.0;
    std::size_t steps = 0;

    KineticState() = default;
    KineticState(std::size_t nx_, std::size_t nv_) : nx(nx_), nv(nv_), f(nx_ * nv_, 0.0), rho(nx_, 0.0) {}

    std::span<double> row(std::size_t i) noexcept { return {f.data() + i * nv, nv}; }
    std::span<const double> row(std::size_t i) const noexcept { return {f.data() + i * nv, nv}; }
    double mass() const noexcept;
};

/// Micro flux from precomputed pieces: upwind trace, rho_i^+ + rho_{i+1}^- and
/// the density gradient.
void micro_flux(std::span<const double> left, std::span<const double> right, double half_density_sum,
                double gradient, const FluxCoefficients& coeffs, const CollisionOperator& op,
                const VelocityGrid& grid, std::span<double> out);

/// Micro flux at the interface between two cells; densities come from the rows.
void micro_flux(std::span<const double> left, std::span<const double> right, const FluxCoefficients& coeffs,
                const CollisionOperator& op, const VelocityGrid& grid, double dx, std::span<double> out);

/// A (J_i^+ + J_{i+1}^-) + D_coef <V,V>/(2N) (rho_{i+1} - rho_i)/dx
double macro_flux(std::span<const double> left, std::span<const double> right, const FluxCoefficients& coeffs,
                  const CollisionOperator& op, const VelocityGrid& grid, double dx);

/// One-step driver for a fixed parameter set. Caches the flux coefficients
/// and, for tridiagonal operators, the factorization of I - c D.
class Scheme {
public:
    Scheme(const SchemeParams& params, const CollisionOperator& op, const VelocityGrid& grid);

    const SchemeParams& params() const noexcept { return params_; }
    const FluxCoefficients& coefficients() const noexcept { return coeffs_; }
    const CollisionOperator& op() const noexcept { return op_; }
    const VelocityGrid& grid() const noexcept { return grid_; }

    /// Dispatches on params().variant.
    KineticState step(const KineticState& state) const;
    KineticState step_explicit(const KineticState& state) const;
    KineticState step_implicit_diffusion(const KineticState& state) const;

private:
    void check_state(const KineticState& state) const;
    void collide(const KineticState& state, KineticState& next, std::span<const double> rho_next,
                 std::span<const double> gradient) const;
    void collision_solve(std::size_t cell, std::span<const double> rhs, std::span<double> out) const;

    SchemeParams params_;
    CollisionOperator op_;
    VelocityGrid grid_;
    FluxCoefficients coeffs_;
    double relax_ = 0.0;  // sigma dt / (eps eta)
    std::optional<TridiagonalFactorization> lu_;
    TridiagonalSystem collision_band_;
};

KineticState step_explicit(const KineticState& state, const SchemeParams& params, const CollisionOperator& op,
                           const VelocityGrid& grid);
KineticState step_implicit_diffusion(const KineticState& state, const SchemeParams& params,
                                     const CollisionOperator& op, const VelocityGrid& grid);

/// Index of the first step whose time reaches t (no interpolation).
std::size_t steps_to_reach(double t, double dt);

struct Snapshot {
    double requested_time = 0.0;
    KineticState state;
};

struct RunResult {
    KineticState final_state;
    std::vector<Snapshot> snapshots;
    double initial_mass = 0.0;
    double seconds_per_step = 0.0;
};

/// Steps until the last requested time; `times` must be ascending. The
/// observer, when set, sees every state after each step.
RunResult run(const Scheme& scheme, KineticState initial, std::span<const double> times,
              const std::function<void(const KineticState&)>& observer = {});

/// max_i |rho_i - (1/2N) sum_j F_ij|
double micro_macro_defect(const KineticState& state);

}  // namespace ugks
