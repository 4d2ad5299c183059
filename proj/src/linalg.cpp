#include "ugks/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ugks/error.hpp"

namespace ugks {

namespace {

constexpr double kDirectResidualTol = 1e-10;

std::string describe_residual(double residual, std::size_t iterations) {
    std::ostringstream os;
    os << "relative residual " << residual << " after " << iterations << " iterations";
    return os.str();
}

double relative_residual(const TridiagonalSystem& system, std::span<const double> x,
                         std::span<const double> b) {
    std::vector<double> ax(b.size());
    system.apply(x, ax);
    double rr = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double d = ax[i] - b[i];
        rr += d * d;
    }
    const double bn = norm2(b);
    return bn > 0.0 ? std::sqrt(rr) / bn : std::sqrt(rr);
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void Matrix::apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const double* a = data_.data() + i * n_;
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += a[j] * x[j];
        y[i] = s;
    }
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
    std::vector<double> y(n_);
    apply(x, y);
    return y;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

double mean(std::span<const double> a) noexcept {
    if (a.empty()) return 0.0;
    double s = 0.0;
    for (double v : a) s += v;
    return s / static_cast<double>(a.size());
}

void remove_mean(std::span<double> a) noexcept {
    const double m = mean(a);
    for (double& v : a) v -= m;
}

CgResult conjugate_gradient(const LinearMap& apply, std::span<const double> b, std::span<double> x,
                            const CgOptions& options) {
    const std::size_t n = b.size();
    if (x.size() != n) {
        throw Error(ErrorCategory::InvalidConfig, "conjugate_gradient: size mismatch between b and x");
    }
    const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : std::max<std::size_t>(10 * n, 1);
    const bool project = options.project_mean_zero;

    std::vector<double> rhs(b.begin(), b.end());
    if (project) {
        remove_mean(rhs);
        remove_mean(x);
    }
    const double bnorm = norm2(rhs);
    if (!std::isfinite(bnorm)) {
        throw Error(ErrorCategory::SolverFailure, "conjugate_gradient: right-hand side is not finite");
    }
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {0, 0.0};
    }

    std::vector<double> r(n), p(n), ap(n), best(x.begin(), x.end());
    const auto op = [&](std::span<const double> in, std::span<double> out) {
        apply(in, out);
        if (project) remove_mean(out);
    };
    const auto true_residual = [&] {
        op(x, ap);
        for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
        return norm2(r);
    };

    const double target = options.tol * bnorm;
    double rnorm = true_residual();
    double best_rnorm = rnorm;
    std::size_t total = 0;

    // Outer loop restarts from the true residual whenever the recursively
    // updated one claims convergence that the true one does not confirm.
    while (true) {
        if (!std::isfinite(rnorm)) {
            throw Error(ErrorCategory::SolverFailure, "conjugate_gradient: NaN detected in residual");
        }
        if (rnorm <= target) return {total, rnorm / bnorm};
        if (total >= max_iter) break;

        p = r;
        double rr = dot(r, r);
        while (total < max_iter) {
            op(p, ap);
            const double pap = dot(p, ap);
            if (!std::isfinite(pap)) {
                throw Error(ErrorCategory::SolverFailure, "conjugate_gradient: NaN detected in search direction");
            }
            if (pap <= 0.0) {
                std::copy(best.begin(), best.end(), x.begin());
                throw Error(ErrorCategory::SolverFailure,
                            "conjugate_gradient: breakdown, operator is not positive definite on the search space ("
                                + describe_residual(best_rnorm / bnorm, total) + ")");
            }
            const double alpha = rr / pap;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            ++total;
            const double rr_new = dot(r, r);
            const double recursive = std::sqrt(rr_new);
            if (recursive < best_rnorm) {
                best_rnorm = recursive;
                std::copy(x.begin(), x.end(), best.begin());
            }
            if (recursive <= target) break;
            const double beta = rr_new / rr;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
            rr = rr_new;
        }
        rnorm = true_residual();
    }

    std::copy(best.begin(), best.end(), x.begin());
    const double final_residual = true_residual() / bnorm;
    throw Error(ErrorCategory::SolverFailure,
                "conjugate_gradient: no convergence, " + describe_residual(final_residual, total));
}

void TridiagonalSystem::check_shape() const {
    const std::size_t n = diag.size();
    if (n == 0) throw Error(ErrorCategory::InvalidConfig, "tridiagonal system is empty");
    if (sub.size() != n - 1 || super.size() != n - 1) {
        throw Error(ErrorCategory::InvalidConfig, "tridiagonal system: sub/super must have length n-1");
    }
}

void TridiagonalSystem::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += sub[i - 1] * x[i - 1];
        if (i + 1 < n) s += super[i] * x[i + 1];
        y[i] = s;
    }
    if (cyclic && n > 1) {
        y[0] += top_right * x[n - 1];
        y[n - 1] += bottom_left * x[0];
    }
}

TridiagonalFactorization::TridiagonalFactorization(const TridiagonalSystem& system)
    : sub_(system.sub), diag_(system.diag.size()), upper_(system.super.size()) {
    system.check_shape();
    const std::size_t n = system.diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        double pivot = system.diag[i];
        if (i > 0) pivot -= sub_[i - 1] * upper_[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw Error(ErrorCategory::SolverFailure,
                        "thomas_solve: zero pivot at row " + std::to_string(i));
        }
        diag_[i] = pivot;
        if (i + 1 < n) upper_[i] = system.super[i] / pivot;
    }
}

void TridiagonalFactorization::solve(std::span<const double> b, std::span<double> x) const {
    const std::size_t n = diag_.size();
    x[0] = b[0] / diag_[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (b[i] - sub_[i - 1] * x[i - 1]) / diag_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_[i] * x[i + 1];
}

std::vector<double> thomas_solve(const TridiagonalSystem& system, std::span<const double> b) {
    if (b.size() != system.size()) {
        throw Error(ErrorCategory::InvalidConfig, "thomas_solve: right-hand side has wrong length");
    }
    const TridiagonalFactorization lu(system);
    std::vector<double> x(b.size());
    lu.solve(b, x);

    TridiagonalSystem plain = system;
    plain.cyclic = false;
    const double res = relative_residual(plain, x, b);
    if (!(res <= kDirectResidualTol)) {
        throw Error(ErrorCategory::SolverFailure,
                    "thomas_solve: residual check failed (" + std::to_string(res) + ")");
    }
    return x;
}

std::vector<double> cyclic_thomas_solve(const TridiagonalSystem& system, std::span<const double> b) {
    system.check_shape();
    const std::size_t n = system.size();
    if (n < 3) throw Error(ErrorCategory::InvalidConfig, "cyclic_thomas_solve: needs n >= 3");
    if (b.size() != n) {
        throw Error(ErrorCategory::InvalidConfig, "cyclic_thomas_solve: right-hand side has wrong length");
    }

    const double alpha = system.bottom_left;
    const double beta = system.top_right;
    const double gamma = system.diag[0] != 0.0 ? -system.diag[0] : 1.0;

    TridiagonalSystem reduced = system;
    reduced.cyclic = false;
    reduced.diag[0] -= gamma;
    reduced.diag[n - 1] -= alpha * beta / gamma;
    const TridiagonalFactorization lu(reduced);

    std::vector<double> x(n), z(n), u(n, 0.0);
    lu.solve(b, x);
    u[0] = gamma;
    u[n - 1] = alpha;
    lu.solve(u, z);

    const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    if (denom == 0.0 || !std::isfinite(denom)) {
        throw Error(ErrorCategory::SolverFailure, "cyclic_thomas_solve: singular reduced system");
    }
    const double factor = (x[0] + beta * x[n - 1] / gamma) / denom;
    for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];

    const double res = relative_residual(system, x, b);
    if (!(res <= kDirectResidualTol)) {
        throw Error(ErrorCategory::SolverFailure,
                    "cyclic_thomas_solve: residual check failed (" + std::to_string(res) + ")");
    }
    return x;
}

std::vector<double> projected_solve_mean_zero(const LinearMap& apply_d, std::span<const double> phi,
                                              double tol, std::size_t max_iter) {
    const std::size_t n = phi.size();
    std::vector<double> rhs(phi.begin(), phi.end());
    for (double& v : rhs) v = -v;
    std::vector<double> psi(n, 0.0);
    const LinearMap negated = [&](std::span<const double> in, std::span<double> out) {
        apply_d(in, out);
        for (double& v : out) v = -v;
    };
    CgOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    options.project_mean_zero = true;
    conjugate_gradient(negated, rhs, psi, options);
    remove_mean(psi);
    return psi;
}

}  // namespace ugks
