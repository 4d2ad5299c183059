#include "ugks/ugks_core.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ugks/error.hpp"

namespace ugks {

namespace {

constexpr double kSeriesRadius = 2.0;
constexpr double kUnderflowExponent = -700.0;
constexpr double kCollisionResidualTol = 1e-10;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be positive and finite, got " << value;
        throw Error(ErrorCategory::InvalidConfig, os.str());
    }
}

}  // namespace

std::string_view to_string(Variant variant) noexcept {
    return variant == Variant::ExplicitDiffusion ? "explicit" : "implicit";
}

Variant parse_variant(std::string_view name) {
    if (name == "explicit") return Variant::ExplicitDiffusion;
    if (name == "implicit") return Variant::ImplicitDiffusion;
    throw Error(ErrorCategory::InvalidConfig,
                "unknown variant '" + std::string(name) + "' (expected explicit or implicit)");
}

void SchemeParams::validate() const {
    require_positive(eta, "eta");
    require_positive(epsilon, "epsilon");
    require_positive(sigma, "sigma");
    require_positive(dt, "dt");
    require_positive(dx, "dx");
    if (nx == 0) throw Error(ErrorCategory::InvalidConfig, "nx must be at least 1");
    if (std::abs(dx * static_cast<double>(nx) - 1.0) > 1e-14) {
        std::ostringstream os;
        os << "dx * nx must equal the domain length 1, got " << dx * static_cast<double>(nx);
        throw Error(ErrorCategory::InvalidConfig, os.str());
    }
}

FluxCoefficients flux_coefficients(double eta, double epsilon, double sigma, double dt, double lambda_star) {
    require_positive(eta, "eta");
    require_positive(epsilon, "epsilon");
    require_positive(sigma, "sigma");
    require_positive(dt, "dt");
    if (!(lambda_star < 0.0)) {
        throw Error(ErrorCategory::InvalidConfig, "pseudo-eigenvalue must be negative");
    }
    const double w = lambda_star * sigma * dt / (eta * epsilon);

    // phi1 = (e^w - 1)/w, one_minus = 1 - phi1, g = 1 + e^w - 2 phi1
    double phi1 = 0.0;
    double one_minus = 0.0;
    double g = 0.0;
    if (std::abs(w) < kSeriesRadius) {
        double term = 1.0;  // w^k / (k+1)!
        phi1 = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= w / static_cast<double>(k + 1);
            phi1 += term;
            one_minus -= term;
            if (k >= 2) g += static_cast<double>(k - 1) * term;
            if (std::abs(term) < 1e-18 * std::abs(one_minus)) break;
        }
    } else {
        const double ew = w < kUnderflowExponent ? 0.0 : std::exp(w);
        phi1 = w < kUnderflowExponent ? -1.0 / w : std::expm1(w) / w;
        one_minus = 1.0 - phi1;
        g = 1.0 + ew - 2.0 * phi1;
    }

    FluxCoefficients c;
    c.w = w;
    c.a_coef = phi1 / eta;
    c.c_coef = one_minus / eta;
    c.d_coef = epsilon / (eta * sigma * lambda_star) * g;
    return c;
}

FluxCoefficients flux_coefficients(const SchemeParams& params, double lambda_star) {
    return flux_coefficients(params.eta, params.epsilon, params.sigma, params.dt, lambda_star);
}

HalfMoments half_moments(std::span<const double> f_row, const VelocityGrid& grid) {
    const std::size_t n = grid.size();
    const std::size_t half = grid.half_count;
    const double weight = 1.0 / static_cast<double>(n);
    HalfMoments m;
    for (std::size_t j = 0; j < half; ++j) {
        m.rho_minus += f_row[j];
        m.j_minus += grid.velocities[j] * f_row[j];
    }
    for (std::size_t j = half; j < n; ++j) {
        m.rho_plus += f_row[j];
        m.j_plus += grid.velocities[j] * f_row[j];
    }
    m.rho_minus *= weight;
    m.rho_plus *= weight;
    m.j_minus *= weight;
    m.j_plus *= weight;
    return m;
}

double KineticState::mass() const noexcept {
    double s = 0.0;
    for (double r : rho) s += r;
    return nx == 0 ? 0.0 : s / static_cast<double>(nx);
}

void micro_flux(std::span<const double> left, std::span<const double> right, double half_density_sum,
                double gradient, const FluxCoefficients& coeffs, const CollisionOperator& op,
                const VelocityGrid& grid, std::span<double> out) {
    const std::size_t n = grid.size();
    const std::size_t half = grid.half_count;
    const auto u = op.u_vector();
    const double grad_term = coeffs.d_coef * gradient * op.lambda_star();
    const double eq_term = coeffs.c_coef * half_density_sum;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = grid.velocities[j];
        const double upwind = j < half ? right[j] : left[j];
        out[j] = v * (coeffs.a_coef * upwind + eq_term + grad_term * u[j]);
    }
}

void micro_flux(std::span<const double> left, std::span<const double> right, const FluxCoefficients& coeffs,
                const CollisionOperator& op, const VelocityGrid& grid, double dx, std::span<double> out) {
    const HalfMoments ml = half_moments(left, grid);
    const HalfMoments mr = half_moments(right, grid);
    micro_flux(left, right, ml.rho_plus + mr.rho_minus, (mr.rho() - ml.rho()) / dx, coeffs, op, grid, out);
}

double macro_flux(std::span<const double> left, std::span<const double> right, const FluxCoefficients& coeffs,
                  const CollisionOperator& /*op*/, const VelocityGrid& grid, double dx) {
    const HalfMoments ml = half_moments(left, grid);
    const HalfMoments mr = half_moments(right, grid);
    return coeffs.a_coef * (ml.j_plus + mr.j_minus)
         + coeffs.d_coef * grid.second_moment() * (mr.rho() - ml.rho()) / dx;
}

Scheme::Scheme(const SchemeParams& params, const CollisionOperator& op, const VelocityGrid& grid)
    : params_(params), op_(op), grid_(grid) {
    params_.validate();
    if (op_.size() != grid_.size()) {
        throw Error(ErrorCategory::InvalidConfig, "operator size does not match the velocity grid");
    }
    coeffs_ = flux_coefficients(params_, op_.lambda_star());
    relax_ = params_.sigma * params_.dt / (params_.epsilon * params_.eta);
    if (op_.solver_hint() == SolverHint::Tridiagonal) {
        collision_band_ = op_.tridiagonal();
        for (double& d : collision_band_.diag) d = 1.0 - relax_ * d;
        for (double& s : collision_band_.sub) s = -relax_ * s;
        for (double& s : collision_band_.super) s = -relax_ * s;
        collision_band_.top_right = -relax_ * collision_band_.top_right;
        collision_band_.bottom_left = -relax_ * collision_band_.bottom_left;
        lu_.emplace(collision_band_);
    }
}

void Scheme::check_state(const KineticState& state) const {
    if (state.nx != params_.nx || state.nv != grid_.size() || state.f.size() != state.nx * state.nv
        || state.rho.size() != state.nx) {
        throw Error(ErrorCategory::InvalidConfig, "state shape does not match the scheme");
    }
}

void Scheme::collision_solve(std::size_t cell, std::span<const double> rhs, std::span<double> out) const {
    const std::size_t n = rhs.size();
    switch (op_.solver_hint()) {
        case SolverHint::DiagonalTrick: {
            const double inv = 1.0 / (1.0 + relax_);
            for (std::size_t j = 0; j < n; ++j) out[j] = rhs[j] * inv;
            return;
        }
        case SolverHint::Tridiagonal: {
            lu_->solve(rhs, out);
            remove_mean(out);
            std::vector<double> check(n);
            collision_band_.apply(out, check);
            double rr = 0.0;
            for (std::size_t j = 0; j < n; ++j) rr += (check[j] - rhs[j]) * (check[j] - rhs[j]);
            const double bn = norm2(rhs);
            const double res = bn > 0.0 ? std::sqrt(rr) / bn : std::sqrt(rr);
            if (!(res <= kCollisionResidualTol)) {
                std::ostringstream os;
                os << "collision solve failed in cell " << cell << ": relative residual " << res;
                throw Error(ErrorCategory::SolverFailure, os.str());
            }
            return;
        }
        case SolverHint::GenericSpd: {
            const double c = relax_;
            const double scale = 1.0 / (1.0 - c * op_.lambda_star());
            for (std::size_t j = 0; j < n; ++j) out[j] = rhs[j] * scale;
            const LinearMap system = [this, c](std::span<const double> x, std::span<double> y) {
                op_.apply(x, y);
                for (std::size_t j = 0; j < x.size(); ++j) y[j] = x[j] - c * y[j];
            };
            CgOptions options;
            options.project_mean_zero = true;
            try {
                conjugate_gradient(system, rhs, out, options);
            } catch (const Error& e) {
                std::ostringstream os;
                os << "collision solve failed in cell " << cell << ": " << e.what();
                throw Error(ErrorCategory::SolverFailure, os.str());
            }
            remove_mean(out);
            return;
        }
    }
}

void Scheme::collide(const KineticState& state, KineticState& next, std::span<const double> rho_next,
                     std::span<const double> gradient) const {
    const std::size_t nx = state.nx;
    const std::size_t nv = state.nv;
    const double ratio = params_.dt / params_.dx;

    std::vector<HalfMoments> moments(nx);
    for (std::size_t i = 0; i < nx; ++i) moments[i] = half_moments(state.row(i), grid_);

    // phi holds the flux through the right interface of each cell.
    std::vector<double> phi(nx * nv);
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t r = (i + 1) % nx;
        micro_flux(state.row(i), state.row(r), moments[i].rho_plus + moments[r].rho_minus, gradient[i], coeffs_,
                   op_, grid_, std::span<double>(phi.data() + i * nv, nv));
    }

    std::vector<double> rhs(nv), g(nv);
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t l = (i + nx - 1) % nx;
        const auto fi = state.row(i);
        const double* right = phi.data() + i * nv;
        const double* left = phi.data() + l * nv;
        for (std::size_t j = 0; j < nv; ++j) {
            rhs[j] = fi[j] - ratio * (right[j] - left[j]) - rho_next[i];
        }
        remove_mean(rhs);
        collision_solve(i, rhs, g);
        auto out = next.row(i);
        for (std::size_t j = 0; j < nv; ++j) out[j] = rho_next[i] + g[j];
        next.rho[i] = rho_next[i];
    }
}

KineticState Scheme::step(const KineticState& state) const {
    return params_.variant == Variant::ExplicitDiffusion ? step_explicit(state) : step_implicit_diffusion(state);
}

KineticState Scheme::step_explicit(const KineticState& state) const {
    check_state(state);
    const std::size_t nx = state.nx;
    const double m2 = grid_.second_moment();
    const double ratio = params_.dt / params_.dx;

    std::vector<double> gradient(nx), macro(nx), rho_next(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t r = (i + 1) % nx;
        gradient[i] = (state.rho[r] - state.rho[i]) / params_.dx;
        const HalfMoments ml = half_moments(state.row(i), grid_);
        const HalfMoments mr = half_moments(state.row(r), grid_);
        macro[i] = coeffs_.a_coef * (ml.j_plus + mr.j_minus) + coeffs_.d_coef * m2 * gradient[i];
    }
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t l = (i + nx - 1) % nx;
        rho_next[i] = state.rho[i] - ratio * (macro[i] - macro[l]);
    }

    KineticState next(nx, state.nv);
    collide(state, next, rho_next, gradient);
    next.steps = state.steps + 1;
    next.t = static_cast<double>(next.steps) * params_.dt;
    return next;
}

KineticState Scheme::step_implicit_diffusion(const KineticState& state) const {
    check_state(state);
    const std::size_t nx = state.nx;
    if (nx < 3) {
        throw Error(ErrorCategory::InvalidConfig, "the implicit-diffusion variant needs nx >= 3");
    }
    const double m2 = grid_.second_moment();
    const double dx = params_.dx;
    const double ratio = params_.dt / dx;

    std::vector<double> current(nx), rhs(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t r = (i + 1) % nx;
        const HalfMoments ml = half_moments(state.row(i), grid_);
        const HalfMoments mr = half_moments(state.row(r), grid_);
        current[i] = ml.j_plus + mr.j_minus;
    }
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t l = (i + nx - 1) % nx;
        rhs[i] = state.rho[i] - coeffs_.a_coef * ratio * (current[i] - current[l]);
    }

    const double beta = -params_.dt / (dx * dx) * m2 * coeffs_.d_coef;
    TridiagonalSystem sys;
    sys.diag.assign(nx, 1.0 + 2.0 * beta);
    sys.sub.assign(nx - 1, -beta);
    sys.super.assign(nx - 1, -beta);
    sys.top_right = -beta;
    sys.bottom_left = -beta;
    sys.cyclic = true;
    std::vector<double> rho_next;
    try {
        rho_next = cyclic_thomas_solve(sys, rhs);
    } catch (const Error& e) {
        throw Error(ErrorCategory::SolverFailure, std::string("macro density solve failed: ") + e.what());
    }

    std::vector<double> gradient(nx);
    for (std::size_t i = 0; i < nx; ++i) gradient[i] = (rho_next[(i + 1) % nx] - rho_next[i]) / dx;

    KineticState next(nx, state.nv);
    collide(state, next, rho_next, gradient);
    next.steps = state.steps + 1;
    next.t = static_cast<double>(next.steps) * params_.dt;
    return next;
}

KineticState step_explicit(const KineticState& state, const SchemeParams& params, const CollisionOperator& op,
                           const VelocityGrid& grid) {
    return Scheme(params, op, grid).step_explicit(state);
}

KineticState step_implicit_diffusion(const KineticState& state, const SchemeParams& params,
                                     const CollisionOperator& op, const VelocityGrid& grid) {
    return Scheme(params, op, grid).step_implicit_diffusion(state);
}

std::size_t steps_to_reach(double t, double dt) {
    if (!(t > 0.0)) return 0;
    return static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
}

RunResult run(const Scheme& scheme, KineticState initial, std::span<const double> times,
              const std::function<void(const KineticState&)>& observer) {
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (times[k] < times[k - 1]) {
            throw Error(ErrorCategory::InvalidConfig, "snapshot times must be ascending");
        }
    }
    const double dt = scheme.params().dt;
    RunResult result;
    result.initial_mass = initial.mass();
    KineticState state = std::move(initial);

    std::size_t next_snapshot = 0;
    const auto take_snapshots = [&] {
        while (next_snapshot < times.size() && steps_to_reach(times[next_snapshot], dt) <= state.steps) {
            result.snapshots.push_back({times[next_snapshot], state});
            ++next_snapshot;
        }
    };
    take_snapshots();

    const std::size_t total = times.empty() ? 0 : steps_to_reach(times.back(), dt);
    const auto start = std::chrono::steady_clock::now();
    std::size_t taken = 0;
    while (state.steps < total) {
        state = scheme.step(state);
        ++taken;
        if (observer) observer(state);
        take_snapshots();
    }
    const auto stop = std::chrono::steady_clock::now();
    if (taken > 0) {
        result.seconds_per_step = std::chrono::duration<double>(stop - start).count() / static_cast<double>(taken);
    }
    result.final_state = std::move(state);
    return result;
}

double micro_macro_defect(const KineticState& state) {
    double worst = 0.0;
    for (std::size_t i = 0; i < state.nx; ++i) {
        worst = std::max(worst, std::abs(state.rho[i] - mean(state.row(i))));
    }
    return worst;
}

}  // namespace ugks
