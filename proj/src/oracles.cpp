#include "ugks/oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ugks/error.hpp"

namespace ugks::oracles {

namespace {

constexpr std::size_t kSimpsonPanels = 2000;

Eigen::MatrixXd to_eigen(const Matrix& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return m;
}

double exponent(double t_rel, const SchemeParams& params, double lambda_star) {
    return lambda_star * params.sigma * t_rel / (params.eta * params.epsilon);
}

}  // namespace

double f0(double x, double v) noexcept {
    return std::exp(-(x - 0.5) * (x - 0.5) - 10.0 * (1.0 - v) * (1.0 - v));
}

double initial_constant() {
    static const double c = [] {
        const double value = 0.5 * simpson([](double v) { return std::exp(-10.0 * (1.0 - v) * (1.0 - v)); },
                                           -1.0, 1.0, kSimpsonPanels);
        if (value < 0.13 || value > 0.15) {
            throw Error(ErrorCategory::SolverFailure, "initial constant outside [0.13, 0.15]");
        }
        return value;
    }();
    return c;
}

double rho0(double x) { return initial_constant() * std::exp(-(x - 0.5) * (x - 0.5)); }

double initial_mass() {
    static const double m = simpson([](double x) { return rho0(x); }, 0.0, 1.0, kSimpsonPanels);
    return m;
}

double exact_transport(double t, double x, double v, double eta) {
    double xs = x - v * t / eta;
    xs -= std::floor(xs);
    return f0(xs, v);
}

double exact_diffusion_density(double t, double x, double kappa) {
    if (!(t > 0.0)) throw Error(ErrorCategory::InvalidConfig, "exact diffusion density needs t > 0");
    if (!(kappa > 0.0)) throw Error(ErrorCategory::InvalidConfig, "diffusion coefficient must be positive");
    const double spread = 4.0 * kappa * t;
    const double norm = 1.0 / std::sqrt(std::numbers::pi * spread);
    const int images = std::max(10, static_cast<int>(std::ceil(6.0 * std::sqrt(2.0 * kappa * t))));
    const auto integrand = [&](double y) {
        double k = 0.0;
        for (int j = -images; j <= images; ++j) {
            const double d = x - y + static_cast<double>(j);
            k += std::exp(-d * d / spread);
        }
        return norm * k * std::exp(-(y - 0.5) * (y - 0.5));
    };
    return initial_constant() * simpson(integrand, 0.0, 1.0, kSimpsonPanels);
}

std::vector<double> limit_diffusion_step(std::span<const double> rho, double dt, double dx, double kappa_d) {
    const std::size_t n = rho.size();
    const double mu = dt * kappa_d / (dx * dx);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = rho[(i + n - 1) % n];
        const double right = rho[(i + 1) % n];
        out[i] = rho[i] + mu * (right - 2.0 * rho[i] + left);
    }
    return out;
}

SpectralDecomposition dense_spectral(const Matrix& d, double group_tol) {
    const std::size_t n = d.size();
    if (n == 0 || n > 1024) {
        throw Error(ErrorCategory::InvalidConfig, "dense spectral decomposition needs 1 <= 2N <= 1024");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(d));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCategory::SolverFailure, "symmetric eigensolver failed");
    }
    const Eigen::VectorXd& ev = solver.eigenvalues();
    const Eigen::MatrixXd& q = solver.eigenvectors();
    const double tol = group_tol * std::max(d.max_abs(), 1e-300);

    // Eigen returns ascending order; walk from the top so lambda_0 = 0 comes first.
    SpectralDecomposition out;
    std::vector<std::vector<Eigen::Index>> groups;
    for (Eigen::Index k = ev.size() - 1; k >= 0; --k) {
        if (!groups.empty() && std::abs(ev(k) - ev(groups.back().front())) <= tol) {
            groups.back().push_back(k);
        } else {
            groups.push_back({k});
        }
    }
    for (const auto& g : groups) {
        double lambda = 0.0;
        Matrix p(n);
        for (Eigen::Index k : g) {
            lambda += ev(k);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    p(i, j) += q(static_cast<Eigen::Index>(i), k) * q(static_cast<Eigen::Index>(j), k);
        }
        out.eigenvalues.push_back(lambda / static_cast<double>(g.size()));
        out.multiplicities.push_back(g.size());
        out.projectors.push_back(std::move(p));
    }
    if (std::abs(out.eigenvalues.front()) <= tol) out.eigenvalues.front() = 0.0;
    return out;
}

SpectralDecomposition dense_spectral(const CollisionOperator& op, double group_tol) {
    return dense_spectral(op.matrix(), group_tol);
}

std::vector<double> spectral_pseudo_inverse(const SpectralDecomposition& spectral, std::span<const double> phi) {
    std::vector<double> out(phi.size(), 0.0);
    std::vector<double> tmp(phi.size());
    for (std::size_t k = 0; k < spectral.count(); ++k) {
        if (spectral.eigenvalues[k] == 0.0) continue;
        spectral.projectors[k].apply(phi, tmp);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += tmp[j] / spectral.eigenvalues[k];
    }
    return out;
}

double relaxation_factor(double t_rel, const SchemeParams& params, double lambda_star) {
    const double s = exponent(t_rel, params, lambda_star);
    return s < -700.0 ? 0.0 : std::exp(s);
}

double c_of_t(double t_rel, const SchemeParams& params, double lambda_star) {
    const double s = exponent(t_rel, params, lambda_star);
    const double es = relaxation_factor(t_rel, params, lambda_star);
    return (1.0 + (s - 1.0) * es) / lambda_star;
}

Matrix assemble_m(double t_rel, const SchemeParams& params, const CollisionOperator& op) {
    const double es = relaxation_factor(t_rel, params, op.lambda_star());
    const Matrix& d = op.matrix();
    const std::size_t n = d.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = (1.0 - es) * d(i, j) / op.lambda_star();
    for (std::size_t i = 0; i < n; ++i) m(i, i) += es;
    return m;
}

Matrix assemble_m_inverse(double t_rel, const SchemeParams& params, const CollisionOperator& op,
                          const SpectralDecomposition& spectral) {
    const double es = relaxation_factor(t_rel, params, op.lambda_star());
    const std::size_t n = op.size();
    Matrix inv(n);
    for (std::size_t k = 0; k < spectral.count(); ++k) {
        const double ak = es + spectral.eigenvalues[k] / op.lambda_star() * (1.0 - es);
        if (!(ak > 0.0)) {
            std::ostringstream os;
            os << "M(t) is not positive definite: A_" << k << " = " << ak;
            throw Error(ErrorCategory::SolverFailure, os.str());
        }
        const Matrix& p = spectral.projectors[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) inv(i, j) += p(i, j) / ak;
    }
    return inv;
}

std::vector<double> assemble_s(double t_rel, std::span<const double> left, std::span<const double> right,
                               const SchemeParams& params, const CollisionOperator& op, const VelocityGrid& grid) {
    const std::size_t n = grid.size();
    const double es = relaxation_factor(t_rel, params, op.lambda_star());
    const double ct = c_of_t(t_rel, params, op.lambda_star());
    const double gradient = (mean(right) - mean(left)) / params.dx;
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double upwind = j < grid.half_count ? right[j] : left[j];
        s[j] = es * upwind + ct * (params.epsilon / params.sigma) * gradient * grid.velocities[j];
    }
    return s;
}

InterfaceValue interface_value_oracle(double t_rel, std::span<const double> left, std::span<const double> right,
                                      const SchemeParams& params, const CollisionOperator& op,
                                      const VelocityGrid& grid, const SpectralDecomposition& spectral) {
    const std::size_t n = grid.size();
    const double lambda = op.lambda_star();
    const double es = relaxation_factor(t_rel, params, lambda);
    const double ct = c_of_t(t_rel, params, lambda);
    const HalfMoments ml = half_moments(left, grid);
    const HalfMoments mr = half_moments(right, grid);
    const double gradient = (mr.rho() - ml.rho()) / params.dx;
    const double equilibrium = ml.rho_plus + mr.rho_minus;
    const auto u = op.u_vector();

    InterfaceValue out;
    out.closed_form.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double upwind = j < grid.half_count ? right[j] : left[j];
        out.closed_form[j] = es * upwind + (1.0 - es) * equilibrium
                           + lambda * ct * (params.epsilon / params.sigma) * gradient * u[j];
    }
    const Matrix inv = assemble_m_inverse(t_rel, params, op, spectral);
    out.dense = inv.apply(assemble_s(t_rel, left, right, params, op, grid));
    return out;
}

double chapman_enskog_residual(const KineticState& state, const CollisionOperator& op, const SchemeParams& params) {
    const std::size_t nx = state.nx;
    const auto u = op.u_vector();
    const double scale = params.epsilon / params.sigma;
    double worst = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        const double dr = (state.rho[(i + 1) % nx] - state.rho[(i + nx - 1) % nx]) / (2.0 * params.dx);
        const auto row = state.row(i);
        for (std::size_t j = 0; j < state.nv; ++j) {
            worst = std::max(worst, std::abs(row[j] - state.rho[i] - scale * dr * u[j]));
        }
    }
    return worst;
}

KineticState upwind_transport_step(const KineticState& state, double dt, double dx, double eta,
                                   const VelocityGrid& grid) {
    const std::size_t nx = state.nx;
    const std::size_t nv = state.nv;
    double vmax = 0.0;
    for (double v : grid.velocities) vmax = std::max(vmax, std::abs(v));
    const double cfl = vmax * dt / (eta * dx);
    if (cfl > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "upwind step violates CFL: " << cfl << " > 1";
        throw Error(ErrorCategory::InvalidConfig, os.str());
    }
    KineticState next(nx, nv);
    for (std::size_t i = 0; i < nx; ++i) {
        const auto fl = state.row((i + nx - 1) % nx);
        const auto fc = state.row(i);
        const auto fr = state.row((i + 1) % nx);
        auto out = next.row(i);
        for (std::size_t j = 0; j < nv; ++j) {
            const double nu = grid.velocities[j] * dt / (eta * dx);
            out[j] = nu > 0.0 ? fc[j] - nu * (fc[j] - fl[j]) : fc[j] - nu * (fr[j] - fc[j]);
        }
        next.rho[i] = mean(out);
    }
    next.steps = state.steps + 1;
    next.t = state.t + dt;
    return next;
}

}  // namespace ugks::oracles
