#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ugks/linalg.hpp"

namespace ugks {

/// Symmetric velocity grid on (-1, 1): 2N cell-centred velocities with step 1/N.
/// Velocities are built so that v[j] == -v[2N-1-j] holds bitwise.
struct VelocityGrid {
    std::size_t half_count = 0;
    double delta_v = 0.0;
    std::vector<double> velocities;

    std::size_t size() const noexcept { return velocities.size(); }
    /// (1/2N) sum v_j^2, i.e. <V,V>/(2N).
    double second_moment() const noexcept;
};

/// Throws Error(InvalidConfig) for N == 0.
VelocityGrid build_grid(std::size_t half_count);

enum class OperatorKind { Bgk, FokkerPlanck, ScatteringPeriodic, Custom };
enum class SolverHint { DiagonalTrick, Tridiagonal, GenericSpd };

/// Short name used in file names and on the command line: bgk, fp, sc, custom.
std::string_view to_string(OperatorKind kind) noexcept;
std::string_view to_string(SolverHint hint) noexcept;
/// Accepts bgk, fp, sc and the long forms bgk, fokker-planck, scattering.
OperatorKind parse_operator_kind(std::string_view name);

/// Discrete collision operator D acting on velocity vectors of length 2N.
/// Immutable after construction. The structured `apply` is what the time
/// stepper uses; `matrix()` is a dense copy for validation and oracles.
class CollisionOperator {
public:
    OperatorKind kind() const noexcept { return kind_; }
    SolverHint solver_hint() const noexcept { return hint_; }
    std::size_t size() const noexcept { return dense_.size(); }
    double lambda_star() const noexcept { return lambda_star_; }
    /// U with DU = V and <U, 1> = 0.
    std::span<const double> u_vector() const noexcept { return u_; }
    const Matrix& matrix() const noexcept { return dense_; }

    /// y = D x. BGK, FP and scattering use their sparse forms; FP and
    /// scattering are applied in flux-difference form so D 1 = 0 exactly.
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;
    LinearMap as_linear_map() const;

    /// Band of D for FP (non-cyclic) and scattering (cyclic). Throws for other kinds.
    TridiagonalSystem tridiagonal() const;

    /// Edge weights of the flux-difference form, one per edge between
    /// neighbouring velocities (2N-1 entries, plus the wrap edge for scattering).
    std::span<const double> edge_weights() const noexcept { return edges_; }

private:
    friend CollisionOperator build_bgk(const VelocityGrid&);
    friend CollisionOperator build_fokker_planck(const VelocityGrid&);
    friend CollisionOperator build_scattering(const VelocityGrid&, double);
    friend CollisionOperator from_matrix(const VelocityGrid&, Matrix);

    OperatorKind kind_ = OperatorKind::Custom;
    SolverHint hint_ = SolverHint::GenericSpd;
    double lambda_star_ = 0.0;
    std::vector<double> u_;
    Matrix dense_;
    std::vector<double> edges_;
};

CollisionOperator build_bgk(const VelocityGrid& grid);
CollisionOperator build_fokker_planck(const VelocityGrid& grid);
/// scale * periodic Laplacian. Throws Error(InvalidConfig) when 2N < 3.
CollisionOperator build_scattering(const VelocityGrid& grid, double scale = 0.1);
CollisionOperator build_operator(OperatorKind kind, const VelocityGrid& grid);
/// Wraps a user matrix. The matrix must pass validate_operator, otherwise
/// Error(OperatorInvalid) lists the failed checks.
CollisionOperator from_matrix(const VelocityGrid& grid, Matrix d);

/// Solves DU = V on the mean-zero subspace and returns (U, <V,V>/<U,V>).
/// Failure of the solve or a non-negative ratio throws Error(OperatorInvalid).
std::pair<std::vector<double>, double> compute_u_and_lambda(const LinearMap& apply_d,
                                                            std::span<const double> velocities);

struct ValidationReport {
    bool symmetric = false;
    bool zero_row_sums = false;
    bool nonnegative_off_diagonal = false;
    bool negative_semidefinite = false;
    bool kernel_is_constants = false;
    bool irreducible = false;
    std::size_t kernel_dimension = 0;
    double max_eigenvalue = 0.0;
    /// I + delta D is bistochastic for 0 < delta < delta_bound.
    double delta_bound = 0.0;
    std::vector<std::string> failures;

    bool ok() const noexcept { return failures.empty(); }
};

/// Structural and spectral checks; tolerances are relative to max |D_ij|.
ValidationReport validate_operator(const Matrix& d);

/// m 1 with m the arithmetic mean of f.
std::vector<double> mean_projection(std::span<const double> f);

/// psi with D psi = phi and <psi, 1> = 0. Throws Error(InvalidConfig) when
/// phi is not mean-zero to 1e-10 relative.
std::vector<double> pseudo_inverse_apply(const CollisionOperator& op, std::span<const double> phi);

/// <DF, ln F>, evaluated in the symmetric pairwise form so it is exactly zero
/// on constants. Throws Error(InvalidConfig) for non-positive entries.
double entropy_dissipation(const CollisionOperator& op, std::span<const double> f);

}  // namespace ugks
