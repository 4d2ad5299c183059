#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ugks {

/// Dense square matrix, row-major. Small by construction (velocity-space
/// sized), used for operator storage, validation and oracles.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }
    std::span<const double> data() const noexcept { return data_; }

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// Largest absolute entry; the natural scale for structural tolerances.
    double max_abs() const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// y = A x for a linear map on R^n. Implementations must not alias x and y.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;
double mean(std::span<const double> a) noexcept;
/// a -= mean(a)
void remove_mean(std::span<double> a) noexcept;

struct CgOptions {
    double tol = 1e-12;
    /// 0 selects 10 * n.
    std::size_t max_iter = 0;
    /// Restrict iterates and residuals to the mean-zero subspace.
    bool project_mean_zero = false;
};

struct CgResult {
    std::size_t iterations = 0;
    /// True relative residual ||A x - b|| / ||b|| of the returned iterate.
    double residual = 0.0;
};

/// Unpreconditioned conjugate gradient for a symmetric positive (semi)definite
/// map. `x` carries the initial guess in and the solution out. Throws
/// Error(SolverFailure) on non-convergence within max_iter (x then holds the
/// best iterate seen), on breakdown, and on NaN.
CgResult conjugate_gradient(const LinearMap& apply, std::span<const double> b, std::span<double> x,
                            const CgOptions& options = {});

/// Tridiagonal matrix with optional periodic corners:
///   row 0 couples to column n-1 through top_right,
///   row n-1 couples to column 0 through bottom_left.
struct TridiagonalSystem {
    std::vector<double> sub;    // length n-1, sub[i] = A(i+1, i)
    std::vector<double> diag;   // length n
    std::vector<double> super;  // length n-1, super[i] = A(i, i+1)
    double top_right = 0.0;
    double bottom_left = 0.0;
    bool cyclic = false;

    std::size_t size() const noexcept { return diag.size(); }
    void apply(std::span<const double> x, std::span<double> y) const;
    /// Throws Error(InvalidConfig) on inconsistent lengths.
    void check_shape() const;
};

/// LU factors of a non-cyclic tridiagonal matrix, reusable across right-hand
/// sides. Construction throws Error(SolverFailure) naming the row of a zero pivot.
class TridiagonalFactorization {
public:
    explicit TridiagonalFactorization(const TridiagonalSystem& system);

    std::size_t size() const noexcept { return diag_.size(); }
    void solve(std::span<const double> b, std::span<double> x) const;

private:
    std::vector<double> sub_;
    std::vector<double> diag_;   // pivots
    std::vector<double> upper_;  // super / pivot
};

/// Thomas elimination. Ignores corners; the result is residual-checked.
std::vector<double> thomas_solve(const TridiagonalSystem& system, std::span<const double> b);

/// Periodic tridiagonal solve by a Sherman-Morrison correction of two
/// non-cyclic Thomas solves. Requires n >= 3.
std::vector<double> cyclic_thomas_solve(const TridiagonalSystem& system, std::span<const double> b);

/// Solves D psi = phi with <psi, 1> = 0 for a symmetric negative semidefinite D
/// whose kernel is the constants. Runs CG on -D restricted to the mean-zero
/// subspace; phi is projected before the solve.
std::vector<double> projected_solve_mean_zero(const LinearMap& apply_d, std::span<const double> phi,
                                              double tol = 1e-12, std::size_t max_iter = 0);

}  // namespace ugks
