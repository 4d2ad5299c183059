#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "ugks/error.hpp"
#include "ugks/oracles.hpp"
#include "ugks/velocity_space.hpp"

namespace ugks {
namespace {

using testing::max_abs_diff;
using testing::random_mean_zero;
using testing::random_vector;

constexpr OperatorKind kKinds[] = {OperatorKind::Bgk, OperatorKind::FokkerPlanck, OperatorKind::ScatteringPeriodic};

TEST(VelocityGrid, SingleHalf) {
    const auto g = build_grid(1);
    EXPECT_EQ(g.delta_v, 1.0);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g.velocities[0], -0.5);
    EXPECT_EQ(g.velocities[1], 0.5);
}

TEST(VelocityGrid, TwoHalves) {
    const auto g = build_grid(2);
    const std::vector<double> expected{-0.75, -0.25, 0.25, 0.75};
    EXPECT_EQ(g.velocities, expected);
}

TEST(VelocityGrid, FiftyHalves) {
    const auto g = build_grid(50);
    ASSERT_EQ(g.size(), 100u);
    EXPECT_NEAR(g.velocities.front(), -0.99, 1e-15);
    EXPECT_NEAR(g.velocities.back(), 0.99, 1e-15);
    EXPECT_NEAR(g.velocities[49], -0.01, 1e-15);
}

TEST(VelocityGrid, RejectsEmpty) {
    try {
        build_grid(0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::InvalidConfig);
    }
}

TEST(VelocityGrid, Invariants) {
    for (std::size_t n : {1u, 3u, 7u, 50u, 200u}) {
        const auto g = build_grid(n);
        double sum = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            EXPECT_EQ(g.velocities[j], -g.velocities[g.size() - 1 - j]);
            EXPECT_NE(g.velocities[j], 0.0);
            EXPECT_LT(std::abs(g.velocities[j]), 1.0);
            if (j > 0) EXPECT_NEAR(g.velocities[j] - g.velocities[j - 1], g.delta_v, 1e-15);
            sum += g.velocities[j];
        }
        EXPECT_NEAR(sum, 0.0, 1e-14);
    }
}

TEST(VelocityGrid, SecondMomentApproachesOneThird) {
    EXPECT_NEAR(build_grid(1).second_moment(), 0.25, 1e-16);
    EXPECT_NEAR(build_grid(500).second_moment(), 1.0 / 3.0, 1e-6);
}

TEST(Bgk, TwoVelocityMatrix) {
    const auto op = build_bgk(build_grid(1));
    EXPECT_EQ(op.matrix()(0, 0), -0.5);
    EXPECT_EQ(op.matrix()(0, 1), 0.5);
    EXPECT_EQ(op.matrix()(1, 0), 0.5);
    EXPECT_EQ(op.matrix()(1, 1), -0.5);
}

TEST(Bgk, Identities) {
    const auto g = build_grid(20);
    const auto op = build_bgk(g);
    EXPECT_EQ(op.solver_hint(), SolverHint::DiagonalTrick);
    EXPECT_NEAR(op.lambda_star(), -1.0, 1e-15);
    const std::vector<double> ones(g.size(), 1.0);
    for (double v : op.apply(ones)) EXPECT_NEAR(v, 0.0, 1e-15);
    const auto dv = op.apply(g.velocities);
    for (std::size_t j = 0; j < g.size(); ++j) {
        EXPECT_NEAR(dv[j], -g.velocities[j], 1e-15);
        EXPECT_NEAR(op.u_vector()[j], -g.velocities[j], 1e-15);
    }
}

TEST(FokkerPlanck, TwoVelocityMatrix) {
    const auto op = build_fokker_planck(build_grid(1));
    EXPECT_EQ(op.matrix()(0, 0), -1.0);
    EXPECT_EQ(op.matrix()(0, 1), 1.0);
    EXPECT_EQ(op.matrix()(1, 0), 1.0);
    EXPECT_EQ(op.matrix()(1, 1), -1.0);
}

TEST(FokkerPlanck, Identities) {
    for (std::size_t n : {2u, 10u, 50u}) {
        const auto g = build_grid(n);
        const auto op = build_fokker_planck(g);
        EXPECT_EQ(op.solver_hint(), SolverHint::Tridiagonal);
        EXPECT_NEAR(op.lambda_star(), -2.0, 1e-13);
        const std::vector<double> ones(g.size(), 1.0);
        for (double v : op.apply(ones)) EXPECT_EQ(v, 0.0);
        const auto dv = op.apply(g.velocities);
        for (std::size_t j = 0; j < g.size(); ++j) {
            EXPECT_NEAR(dv[j], -2.0 * g.velocities[j], 1e-12);
            EXPECT_NEAR(op.u_vector()[j], -0.5 * g.velocities[j], 1e-12);
        }
        const auto w = op.edge_weights();
        for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(w[k], w[w.size() - 1 - k]);
    }
}

TEST(FokkerPlanck, StructuredApplyMatchesDense) {
    std::mt19937_64 rng(41);
    const auto g = build_grid(15);
    const auto op = build_fokker_planck(g);
    const auto x = random_vector(rng, g.size());
    EXPECT_LE(max_abs_diff(op.apply(x), op.matrix().apply(x)), 1e-12);
}

TEST(Scattering, Spectrum) {
    const auto g = build_grid(5);
    const auto op = build_scattering(g);
    const auto spectrum = oracles::dense_spectral(op);
    const std::size_t n = g.size();
    const double w = 0.1 / (g.delta_v * g.delta_v);
    EXPECT_NEAR(spectrum.eigenvalues[0], 0.0, 1e-12);
    EXPECT_EQ(spectrum.multiplicities[0], 1u);
    // Eigenvalues -4 w sin^2(pi k / n), k = 1..n/2, doubly degenerate except k = n/2.
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
        EXPECT_NEAR(spectrum.eigenvalues[k], -4.0 * w * s * s, 1e-10);
        EXPECT_EQ(spectrum.multiplicities[k], k == n / 2 ? 1u : 2u);
    }
}

TEST(Scattering, LambdaStarMatchesDenseSolve) {
    const auto g = build_grid(2);
    const auto op = build_scattering(g);
    const auto spectrum = oracles::dense_spectral(op);
    const auto u = oracles::spectral_pseudo_inverse(spectrum, g.velocities);
    EXPECT_LE(max_abs_diff(u, std::vector<double>(op.u_vector().begin(), op.u_vector().end())), 1e-12);
    const double lambda = dot(g.velocities, g.velocities) / dot(u, g.velocities);
    EXPECT_NEAR(op.lambda_star(), lambda, 1e-12);
}

TEST(Scattering, LambdaStarConvergesMonotonically) {
    double prev = 0.0;
    for (std::size_t n : {25u, 50u, 100u, 200u}) {
        const double l = build_scattering(build_grid(n)).lambda_star();
        EXPECT_NEAR(l, -1.5, 0.01);
        if (prev != 0.0) EXPECT_LT(std::abs(l + 1.5), std::abs(prev + 1.5));
        prev = l;
    }
}

TEST(Scattering, RejectsTwoVelocities) {
    EXPECT_THROW(build_scattering(build_grid(1)), Error);
}

TEST(Validate, BuiltInOperatorsPass) {
    for (auto kind : kKinds) {
        for (std::size_t n : {2u, 8u, 30u}) {
            const auto r = validate_operator(build_operator(kind, build_grid(n)).matrix());
            EXPECT_TRUE(r.ok()) << to_string(kind) << " n=" << n;
            EXPECT_EQ(r.kernel_dimension, 1u);
            EXPECT_GT(r.delta_bound, 0.0);
        }
    }
}

TEST(Validate, DecoupledBlocksFailKernelAndIrreducibility) {
    const auto block = build_bgk(build_grid(1)).matrix();
    Matrix d(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            d(i, j) = block(i, j);
            d(i + 2, j + 2) = block(i, j);
        }
    const auto r = validate_operator(d);
    EXPECT_FALSE(r.ok());
    EXPECT_FALSE(r.kernel_is_constants);
    EXPECT_FALSE(r.irreducible);
    EXPECT_EQ(r.kernel_dimension, 2u);
}

TEST(Validate, NegativeOffDiagonalFails) {
    Matrix d = build_bgk(build_grid(2)).matrix();
    d(0, 1) -= 0.35;
    d(1, 0) -= 0.35;
    d(0, 0) += 0.35;
    d(1, 1) += 0.35;
    const auto r = validate_operator(d);
    EXPECT_FALSE(r.nonnegative_off_diagonal);
    EXPECT_FALSE(r.ok());
}

TEST(Validate, AsymmetricFails) {
    Matrix d = build_bgk(build_grid(2)).matrix();
    d(0, 1) += 0.1;
    d(0, 0) -= 0.1;
    EXPECT_FALSE(validate_operator(d).symmetric);
}

TEST(FromMatrix, WrapsValidMatrix) {
    const auto g = build_grid(6);
    const auto op = from_matrix(g, build_bgk(g).matrix());
    EXPECT_EQ(op.kind(), OperatorKind::Custom);
    EXPECT_NEAR(op.lambda_star(), -1.0, 1e-12);
}

TEST(FromMatrix, RejectsInvalid) {
    const auto g = build_grid(2);
    Matrix d = build_bgk(g).matrix();
    d(0, 1) = -1.0;
    try {
        from_matrix(g, d);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::OperatorInvalid);
    }
}

TEST(FromMatrix, RejectsSizeMismatch) {
    EXPECT_THROW(from_matrix(build_grid(2), build_bgk(build_grid(3)).matrix()), Error);
}

TEST(ParseOperator, Names) {
    EXPECT_EQ(parse_operator_kind("bgk"), OperatorKind::Bgk);
    EXPECT_EQ(parse_operator_kind("fp"), OperatorKind::FokkerPlanck);
    EXPECT_EQ(parse_operator_kind("fokker-planck"), OperatorKind::FokkerPlanck);
    EXPECT_EQ(parse_operator_kind("sc"), OperatorKind::ScatteringPeriodic);
    EXPECT_EQ(parse_operator_kind("scattering"), OperatorKind::ScatteringPeriodic);
    EXPECT_THROW(parse_operator_kind("boltzmann"), Error);
}

TEST(MeanProjection, Examples) {
    const std::vector<double> a{1, 2, 3, 4};
    for (double v : mean_projection(a)) EXPECT_EQ(v, 2.5);
    const std::vector<double> b{-1, 1};
    for (double v : mean_projection(b)) EXPECT_EQ(v, 0.0);
}

TEST(MeanProjection, Idempotent) {
    std::mt19937_64 rng(43);
    const auto f = random_vector(rng, 30);
    const auto p = mean_projection(f);
    EXPECT_LE(max_abs_diff(mean_projection(p), p), 1e-16);
}

TEST(PseudoInverse, VelocityGivesU) {
    for (auto kind : kKinds) {
        const auto g = build_grid(20);
        const auto op = build_operator(kind, g);
        const auto u = pseudo_inverse_apply(op, g.velocities);
        for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(u[j], op.u_vector()[j], 1e-10);
    }
}

TEST(PseudoInverse, ZeroGivesZero) {
    for (auto kind : kKinds) {
        const auto g = build_grid(10);
        const std::vector<double> zero(g.size(), 0.0);
        for (double v : pseudo_inverse_apply(build_operator(kind, g), zero)) EXPECT_EQ(v, 0.0);
    }
}

TEST(PseudoInverse, RejectsNonzeroMean) {
    const auto g = build_grid(10);
    const std::vector<double> ones(g.size(), 1.0);
    try {
        pseudo_inverse_apply(build_fokker_planck(g), ones);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::InvalidConfig);
    }
}

TEST(PseudoInverse, RandomRoundTrip) {
    std::mt19937_64 rng(12345);
    for (auto kind : kKinds) {
        const auto g = build_grid(25);
        const auto op = build_operator(kind, g);
        for (int trial = 0; trial < 20; ++trial) {
            const auto phi = random_mean_zero(rng, g.size());
            const auto psi = pseudo_inverse_apply(op, phi);
            EXPECT_LE(max_abs_diff(op.apply(psi), phi), 1e-9 * std::max(1.0, op.matrix().max_abs()));
            EXPECT_LE(std::abs(mean(psi)), 1e-12);
        }
    }
}

TEST(PseudoInverse, MatchesSpectralOracle) {
    std::mt19937_64 rng(47);
    for (auto kind : kKinds) {
        const auto g = build_grid(12);
        const auto op = build_operator(kind, g);
        const auto spectrum = oracles::dense_spectral(op);
        const auto phi = random_mean_zero(rng, g.size());
        EXPECT_LE(max_abs_diff(pseudo_inverse_apply(op, phi), oracles::spectral_pseudo_inverse(spectrum, phi)), 1e-9);
    }
}

TEST(Entropy, ZeroOnConstants) {
    for (auto kind : kKinds) {
        const auto g = build_grid(10);
        const std::vector<double> f(g.size(), 3.0);
        EXPECT_EQ(entropy_dissipation(build_operator(kind, g), f), 0.0);
    }
}

TEST(Entropy, NegativeForBgkPerturbation) {
    const auto g = build_grid(10);
    std::vector<double> f(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) f[j] = 1.0 + 0.1 * g.velocities[j];
    EXPECT_LT(entropy_dissipation(build_bgk(g), f), 0.0);
}

TEST(Entropy, QuadraticInSmallAmplitude) {
    const auto g = build_grid(20);
    const auto op = build_fokker_planck(g);
    auto at = [&](double a) {
        std::vector<double> f(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::exp(a * g.velocities[j]);
        return entropy_dissipation(op, f);
    };
    const double ratio = at(0.1) / at(0.05);
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
}

TEST(Entropy, RejectsNonPositive) {
    const auto g = build_grid(2);
    const std::vector<double> f{1.0, 0.0, 1.0, 1.0};
    EXPECT_THROW(entropy_dissipation(build_bgk(g), f), Error);
}

TEST(Entropy, NonPositiveOnRandomStates) {
    std::mt19937_64 rng(12345);
    for (auto kind : kKinds) {
        const auto g = build_grid(15);
        const auto op = build_operator(kind, g);
        for (int trial = 0; trial < 50; ++trial) {
            const auto f = random_vector(rng, g.size(), 0.01, 10.0);
            EXPECT_LE(entropy_dissipation(op, f), 0.0);
        }
    }
}

TEST(ComputeU, RejectsDecoupledOperator) {
    const auto g = build_grid(2);
    const auto block = build_bgk(build_grid(1)).matrix();
    Matrix d(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            d(i, j) = block(i, j);
            d(i + 2, j + 2) = block(i, j);
        }
    const LinearMap map = [&d](std::span<const double> x, std::span<double> y) { d.apply(x, y); };
    // V = (-0.75, -0.25, 0.25, 0.75) has components in the extra kernel direction.
    EXPECT_THROW(compute_u_and_lambda(map, g.velocities), Error);
}

}  // namespace
}  // namespace ugks
