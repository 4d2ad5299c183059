#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ugks/linalg.hpp"
#include "ugks/ugks_core.hpp"
#include "ugks/velocity_space.hpp"

namespace ugks::oracles {

/// f0(x, v) = exp(-(x - 1/2)^2 - 10 (1 - v)^2)
double f0(double x, double v) noexcept;
/// C = (1/2) int_{-1}^{1} exp(-10 (1 - v)^2) dv by composite Simpson, computed once.
double initial_constant();
/// rho0(x) = C exp(-(x - 1/2)^2)
double rho0(double x);
/// int_0^1 rho0(x) dx
double initial_mass();

/// Composite Simpson rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, std::size_t panels) {
    const double h = (b - a) / static_cast<double>(panels);
    double s = f(a) + f(b);
    for (std::size_t k = 1; k < panels; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
    return s * h / 3.0;
}

/// f0 traced back along characteristics of speed v/eta, wrapped to [0, 1).
double exact_transport(double t, double x, double v, double eta = 1.0);

/// Periodized heat kernel applied to rho0. Throws Error(InvalidConfig) for
/// t <= 0 or kappa <= 0.
double exact_diffusion_density(double t, double x, double kappa);

/// rho_i + dt kappa_d / dx^2 (rho_{i+1} - 2 rho_i + rho_{i-1}), periodic.
std::vector<double> limit_diffusion_step(std::span<const double> rho, double dt, double dx, double kappa_d);

/// Eigenspace decomposition D = sum_k lambda_k P_k, lambda_0 = 0 first and
/// the rest in decreasing order.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<std::size_t> multiplicities;
    std::vector<Matrix> projectors;

    std::size_t count() const noexcept { return eigenvalues.size(); }
};

/// Eigenvalues closer than group_tol * max|D_ij| share a projector.
SpectralDecomposition dense_spectral(const Matrix& d, double group_tol = 1e-8);
SpectralDecomposition dense_spectral(const CollisionOperator& op, double group_tol = 1e-8);

/// sum_{k>=1} lambda_k^{-1} P_k phi
std::vector<double> spectral_pseudo_inverse(const SpectralDecomposition& spectral, std::span<const double> phi);

/// exp(lambda* sigma t_rel / (eta eps)), flushed to 0 below exponent -700.
double relaxation_factor(double t_rel, const SchemeParams& params, double lambda_star);
/// (1/lambda*) [1 + (s - 1) e^s] with s the exponent above.
double c_of_t(double t_rel, const SchemeParams& params, double lambda_star);

/// M(t) = e^s I + (1 - e^s) D / lambda*
Matrix assemble_m(double t_rel, const SchemeParams& params, const CollisionOperator& op);
/// sum_k A_k^{-1} P_k with A_k = e^s + (lambda_k / lambda*) (1 - e^s)
Matrix assemble_m_inverse(double t_rel, const SchemeParams& params, const CollisionOperator& op,
                          const SpectralDecomposition& spectral);
/// Right-hand side S(t) of M(t) F(t) = S(t) for the gradient reconstruction.
std::vector<double> assemble_s(double t_rel, std::span<const double> left, std::span<const double> right,
                               const SchemeParams& params, const CollisionOperator& op, const VelocityGrid& grid);

struct InterfaceValue {
    std::vector<double> closed_form;
    std::vector<double> dense;
};

/// Interface value at t_n + t_rel: the closed form used by the scheme and
/// the unapproximated M(t)^{-1} S(t).
InterfaceValue interface_value_oracle(double t_rel, std::span<const double> left, std::span<const double> right,
                                      const SchemeParams& params, const CollisionOperator& op,
                                      const VelocityGrid& grid, const SpectralDecomposition& spectral);

/// max_i || F_i - rho_i 1 - (eps/sigma) (d_x rho)_i U ||_inf with a periodic
/// central difference for d_x rho.
double chapman_enskog_residual(const KineticState& state, const CollisionOperator& op, const SchemeParams& params);

/// First-order upwind step for eta f_t + v f_x = 0. Throws
/// Error(InvalidConfig) when max |v| dt / (eta dx) > 1.
KineticState upwind_transport_step(const KineticState& state, double dt, double dx, double eta,
                                   const VelocityGrid& grid);

}  // namespace ugks::oracles
