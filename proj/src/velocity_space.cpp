#include "ugks/velocity_space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "ugks/error.hpp"

namespace ugks {

namespace {

std::string format_check(const char* name, double value, double limit) {
    std::ostringstream os;
    os << name << ": " << value << " exceeds " << limit;
    return os.str();
}

}  // namespace

double VelocityGrid::second_moment() const noexcept {
    double s = 0.0;
    for (double v : velocities) s += v * v;
    return velocities.empty() ? 0.0 : s / static_cast<double>(velocities.size());
}

VelocityGrid build_grid(std::size_t half_count) {
    if (half_count == 0) {
        throw Error(ErrorCategory::InvalidConfig, "velocity grid needs N >= 1");
    }
    VelocityGrid grid;
    grid.half_count = half_count;
    grid.delta_v = 1.0 / static_cast<double>(half_count);
    const std::size_t n = 2 * half_count;
    grid.velocities.resize(n);
    for (std::size_t j = 0; j < half_count; ++j) {
        const double v = -1.0 + grid.delta_v * (0.5 + static_cast<double>(j));
        grid.velocities[j] = v;
        grid.velocities[n - 1 - j] = -v;
    }
    return grid;
}

std::string_view to_string(OperatorKind kind) noexcept {
    switch (kind) {
        case OperatorKind::Bgk: return "bgk";
        case OperatorKind::FokkerPlanck: return "fp";
        case OperatorKind::ScatteringPeriodic: return "sc";
        case OperatorKind::Custom: return "custom";
    }
    return "custom";
}

std::string_view to_string(SolverHint hint) noexcept {
    switch (hint) {
        case SolverHint::DiagonalTrick: return "diagonal-trick";
        case SolverHint::Tridiagonal: return "tridiagonal";
        case SolverHint::GenericSpd: return "generic-spd";
    }
    return "generic-spd";
}

OperatorKind parse_operator_kind(std::string_view name) {
    if (name == "bgk" || name == "BGK") return OperatorKind::Bgk;
    if (name == "fp" || name == "fokker-planck" || name == "FP") return OperatorKind::FokkerPlanck;
    if (name == "sc" || name == "scattering" || name == "SC") return OperatorKind::ScatteringPeriodic;
    throw Error(ErrorCategory::InvalidConfig,
                "unknown operator '" + std::string(name) + "' (expected bgk, fp or sc)");
}

void CollisionOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    switch (kind_) {
        case OperatorKind::Bgk: {
            const double m = mean(x);
            for (std::size_t j = 0; j < n; ++j) y[j] = m - x[j];
            return;
        }
        case OperatorKind::FokkerPlanck: {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                if (j + 1 < n) s += edges_[j] * (x[j + 1] - x[j]);
                if (j > 0) s -= edges_[j - 1] * (x[j] - x[j - 1]);
                y[j] = s;
            }
            return;
        }
        case OperatorKind::ScatteringPeriodic: {
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t next = (j + 1) % n;
                const std::size_t prev = (j + n - 1) % n;
                y[j] = edges_[j] * (x[next] - x[j]) - edges_[prev] * (x[j] - x[prev]);
            }
            return;
        }
        case OperatorKind::Custom: dense_.apply(x, y); return;
    }
}

std::vector<double> CollisionOperator::apply(std::span<const double> x) const {
    std::vector<double> y(size());
    apply(x, y);
    return y;
}

LinearMap CollisionOperator::as_linear_map() const {
    return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

TridiagonalSystem CollisionOperator::tridiagonal() const {
    if (kind_ != OperatorKind::FokkerPlanck && kind_ != OperatorKind::ScatteringPeriodic) {
        throw Error(ErrorCategory::InvalidConfig,
                    "operator '" + std::string(to_string(kind_)) + "' has no tridiagonal form");
    }
    const std::size_t n = size();
    TridiagonalSystem sys;
    sys.diag.resize(n);
    sys.sub.resize(n - 1);
    sys.super.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) sys.diag[j] = dense_(j, j);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        sys.super[j] = dense_(j, j + 1);
        sys.sub[j] = dense_(j + 1, j);
    }
    if (kind_ == OperatorKind::ScatteringPeriodic) {
        sys.cyclic = true;
        sys.top_right = dense_(0, n - 1);
        sys.bottom_left = dense_(n - 1, 0);
    }
    return sys;
}

CollisionOperator build_bgk(const VelocityGrid& grid) {
    const std::size_t n = grid.size();
    CollisionOperator op;
    op.kind_ = OperatorKind::Bgk;
    op.hint_ = SolverHint::DiagonalTrick;
    op.lambda_star_ = -1.0;
    op.dense_ = Matrix(n, 1.0 / static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) op.dense_(j, j) -= 1.0;
    op.u_.resize(n);
    for (std::size_t j = 0; j < n; ++j) op.u_[j] = -grid.velocities[j];
    return op;
}

CollisionOperator build_fokker_planck(const VelocityGrid& grid) {
    const std::size_t n = grid.size();
    const std::size_t half = grid.half_count;
    const double dv = grid.delta_v;
    CollisionOperator op;
    op.kind_ = OperatorKind::FokkerPlanck;
    op.hint_ = SolverHint::Tridiagonal;
    op.lambda_star_ = -2.0;

    // Edge k sits between v[k] and v[k+1]; the two outer edges at -1 and +1
    // carry zero weight and are left out.
    op.edges_.assign(n - 1, 0.0);
    for (std::size_t k = 0; k + 1 < half + 1 && k + 1 < n; ++k) {
        const double e = -1.0 + static_cast<double>(k + 1) * dv;
        const double h = grid.velocities[k + 1] - grid.velocities[k];
        const double w = (1.0 - e * e) / (dv * h);
        op.edges_[k] = w;
        op.edges_[n - 2 - k] = w;
    }

    op.dense_ = Matrix(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double w = op.edges_[k];
        op.dense_(k, k + 1) = w;
        op.dense_(k + 1, k) = w;
        op.dense_(k, k) -= w;
        op.dense_(k + 1, k + 1) -= w;
    }
    op.u_.resize(n);
    for (std::size_t j = 0; j < n; ++j) op.u_[j] = -0.5 * grid.velocities[j];
    return op;
}

CollisionOperator build_scattering(const VelocityGrid& grid, double scale) {
    const std::size_t n = grid.size();
    if (n < 3) {
        throw Error(ErrorCategory::InvalidConfig, "periodic scattering operator needs at least 3 velocities");
    }
    if (!(scale > 0.0)) {
        throw Error(ErrorCategory::InvalidConfig, "scattering scale must be positive");
    }
    CollisionOperator op;
    op.kind_ = OperatorKind::ScatteringPeriodic;
    op.hint_ = SolverHint::GenericSpd;
    const double w = scale / (grid.delta_v * grid.delta_v);
    op.edges_.assign(n, w);
    op.dense_ = Matrix(n);
    for (std::size_t j = 0; j < n; ++j) {
        op.dense_(j, j) = -2.0 * w;
        op.dense_(j, (j + 1) % n) += w;
        op.dense_(j, (j + n - 1) % n) += w;
    }
    auto [u, lambda] = compute_u_and_lambda(op.as_linear_map(), grid.velocities);
    op.u_ = std::move(u);
    op.lambda_star_ = lambda;
    return op;
}

CollisionOperator build_operator(OperatorKind kind, const VelocityGrid& grid) {
    switch (kind) {
        case OperatorKind::Bgk: return build_bgk(grid);
        case OperatorKind::FokkerPlanck: return build_fokker_planck(grid);
        case OperatorKind::ScatteringPeriodic: return build_scattering(grid);
        case OperatorKind::Custom: break;
    }
    throw Error(ErrorCategory::InvalidConfig, "custom operators are built from a matrix");
}

CollisionOperator from_matrix(const VelocityGrid& grid, Matrix d) {
    if (d.size() != grid.size()) {
        throw Error(ErrorCategory::InvalidConfig,
                    "operator matrix is " + std::to_string(d.size()) + "x" + std::to_string(d.size())
                        + " but the grid has " + std::to_string(grid.size()) + " velocities");
    }
    const ValidationReport report = validate_operator(d);
    if (!report.ok()) {
        std::string msg = "operator matrix failed validation:";
        for (const auto& f : report.failures) msg += " [" + f + "]";
        throw Error(ErrorCategory::OperatorInvalid, msg);
    }
    CollisionOperator op;
    op.kind_ = OperatorKind::Custom;
    op.hint_ = SolverHint::GenericSpd;
    op.dense_ = std::move(d);
    auto [u, lambda] = compute_u_and_lambda(op.as_linear_map(), grid.velocities);
    op.u_ = std::move(u);
    op.lambda_star_ = lambda;
    return op;
}

std::pair<std::vector<double>, double> compute_u_and_lambda(const LinearMap& apply_d,
                                                            std::span<const double> velocities) {
    std::vector<double> u;
    try {
        u = projected_solve_mean_zero(apply_d, velocities, 1e-12, 10 * velocities.size());
    } catch (const Error& e) {
        throw Error(ErrorCategory::OperatorInvalid,
                    std::string("cannot solve D U = V on the mean-zero subspace: ") + e.what());
    }
    const double uv = dot(u, velocities);
    const double lambda = dot(velocities, velocities) / uv;
    if (!(lambda < 0.0) || !std::isfinite(lambda)) {
        std::ostringstream os;
        os << "pseudo-eigenvalue must be negative, got " << lambda;
        throw Error(ErrorCategory::OperatorInvalid, os.str());
    }
    return {std::move(u), lambda};
}

ValidationReport validate_operator(const Matrix& d) {
    ValidationReport report;
    const std::size_t n = d.size();
    if (n == 0) {
        report.failures.emplace_back("empty matrix");
        return report;
    }
    const double scale = d.max_abs();
    if (scale == 0.0) {
        report.kernel_dimension = n;
        report.failures.emplace_back("zero matrix");
        return report;
    }

    double asym = 0.0;
    double row_sum = 0.0;
    double min_off = 0.0;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0;
        double cs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            rs += d(i, j);
            cs += d(j, i);
            asym = std::max(asym, std::abs(d(i, j) - d(j, i)));
            if (i != j) min_off = std::min(min_off, d(i, j));
        }
        row_sum = std::max({row_sum, std::abs(rs), std::abs(cs)});
        max_diag = std::max(max_diag, std::abs(d(i, i)));
    }
    report.symmetric = asym <= 1e-14 * scale;
    if (!report.symmetric) report.failures.push_back(format_check("symmetry", asym, 1e-14 * scale));
    report.zero_row_sums = row_sum <= 1e-13 * scale;
    if (!report.zero_row_sums) report.failures.push_back(format_check("row sums", row_sum, 1e-13 * scale));
    report.nonnegative_off_diagonal = min_off >= 0.0;
    if (!report.nonnegative_off_diagonal) {
        std::ostringstream os;
        os << "negative off-diagonal entry " << min_off;
        report.failures.push_back(os.str());
    }
    report.delta_bound = max_diag > 0.0 ? 1.0 / max_diag : 0.0;

    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.5 * (d(i, j) + d(j, i));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        report.failures.emplace_back("eigensolver failed");
    } else {
        const auto& ev = solver.eigenvalues();
        report.max_eigenvalue = ev.maxCoeff();
        report.negative_semidefinite = report.max_eigenvalue <= 1e-12 * scale;
        if (!report.negative_semidefinite) {
            report.failures.push_back(format_check("largest eigenvalue", report.max_eigenvalue, 1e-12 * scale));
        }
        for (Eigen::Index k = 0; k < ev.size(); ++k)
            if (std::abs(ev(k)) <= 1e-10 * scale) ++report.kernel_dimension;
        report.kernel_is_constants = report.kernel_dimension == 1 && report.zero_row_sums;
        if (!report.kernel_is_constants) {
            report.failures.push_back("kernel is not span(1): dimension "
                                      + std::to_string(report.kernel_dimension));
        }
    }

    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && !seen[j] && (d(i, j) > 0.0 || d(j, i) > 0.0)) {
                seen[j] = true;
                ++reached;
                queue.push_back(j);
            }
        }
    }
    report.irreducible = reached == n;
    if (!report.irreducible) {
        report.failures.push_back("not irreducible: " + std::to_string(reached) + " of " + std::to_string(n)
                                  + " indices reachable from index 0");
    }
    return report;
}

std::vector<double> mean_projection(std::span<const double> f) {
    return std::vector<double>(f.size(), mean(f));
}

std::vector<double> pseudo_inverse_apply(const CollisionOperator& op, std::span<const double> phi) {
    const std::size_t n = op.size();
    if (phi.size() != n) {
        throw Error(ErrorCategory::InvalidConfig, "pseudo_inverse_apply: vector has wrong length");
    }
    double sum = 0.0;
    for (double v : phi) sum += v;
    const double limit = 1e-10 * norm2(phi) * std::sqrt(static_cast<double>(n));
    if (std::abs(sum) > limit) {
        std::ostringstream os;
        os << "pseudo_inverse_apply: input is not mean-zero (sum " << sum << ")";
        throw Error(ErrorCategory::InvalidConfig, os.str());
    }
    std::vector<double> rhs(phi.begin(), phi.end());
    remove_mean(rhs);

    switch (op.kind()) {
        case OperatorKind::Bgk: {
            for (double& v : rhs) v = -v;
            return rhs;
        }
        case OperatorKind::FokkerPlanck: {
            // Row j of D is the difference of the edge fluxes on either side,
            // so the fluxes are partial sums of phi.
            const auto w = op.edge_weights();
            std::vector<double> psi(n, 0.0);
            double flux = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                flux += rhs[k];
                psi[k + 1] = psi[k] + flux / w[k];
            }
            remove_mean(psi);
            return psi;
        }
        default: return projected_solve_mean_zero(op.as_linear_map(), rhs);
    }
}

double entropy_dissipation(const CollisionOperator& op, std::span<const double> f) {
    const std::size_t n = op.size();
    if (f.size() != n) {
        throw Error(ErrorCategory::InvalidConfig, "entropy_dissipation: vector has wrong length");
    }
    std::vector<double> logs(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (!(f[j] > 0.0)) {
            throw Error(ErrorCategory::InvalidConfig,
                        "entropy_dissipation: entry " + std::to_string(j) + " is not positive");
        }
        logs[j] = std::log(f[j]);
    }
    const Matrix& d = op.matrix();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = d(i, j);
            if (w != 0.0) s += w * (f[i] - f[j]) * (logs[j] - logs[i]);
        }
    }
    return s;
}

}  // namespace ugks
