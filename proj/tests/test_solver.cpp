#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "wsvie/brownian.hpp"
#include "wsvie/problem.hpp"
#include "wsvie/solver.hpp"

using namespace wsvie;

namespace {

// Brute-force oracle for the deterministic linear case k1 = 1, beta(x) = x,
// x0 = 1: solve x_j = 1 + sum_{i<j} h x_i + (h/2) x_j block by block.
std::vector<double> midpoint_rectangle_recursion(std::size_t m) {
    const double h = 1.0 / static_cast<double>(m);
    std::vector<double> x(m);
    double running = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        x[j] = (1.0 + running) / (1.0 - 0.5 * h);
        running += h * x[j];
    }
    return x;
}

}  // namespace

TEST(AssembleH, ZeroCoefficients) {
    const auto cfg = BasisConfig(2);
    const auto K = project_kernel(Kernel::constant_value(3.0), cfg);
    const auto H = assemble_H(K, CoefficientVector(4), IntegrationMatrix(cfg), cfg);
    EXPECT_EQ(H, Matrix(4, 4));
}

TEST(AssembleH, ScalarChain) {
    const auto cfg = BasisConfig(0);
    const double c = -0.7, z = 2.5;
    const auto K = project_kernel(Kernel::constant_value(c), cfg);
    const auto H = assemble_H(K, CoefficientVector(std::vector<double>{z}), IntegrationMatrix(cfg),
                              cfg);
    EXPECT_DOUBLE_EQ(H(0, 0), c * z / 2.0);
}

TEST(AssembleH, DiagonalIdentityAndFastDiagonal) {
    const auto cfg = BasisConfig(3);
    const std::size_t m = cfg.resolution();
    const auto K = project_kernel([](double s, double t) { return 1.0 + s * t - s; }, cfg);
    CoefficientVector Z(m);
    for (std::size_t i = 0; i < m; ++i) Z[i] = std::sin(1.0 + i);
    const auto path = sample_path(cfg, 11);
    const StochasticMatrix PS(path, cfg);

    const Matrix H = assemble_H(K, Z, PS, cfg);
    const auto fast = assemble_H_diagonal(K, Z.values, PS);
    for (std::size_t j = 0; j < m; ++j) {
        double expected = 0.0;
        for (std::size_t i = 0; i < m; ++i) expected += K(i, j) * Z[i] * PS(i, j);
        EXPECT_NEAR(H(j, j), m * expected, 1e-15);
        EXPECT_NEAR(fast[j], H(j, j), 1e-15);
    }
    EXPECT_THROW(assemble_H(K, CoefficientVector(4), PS, cfg), std::invalid_argument);
}

TEST(CollocationValues, Examples) {
    const auto cfg = BasisConfig(2);
    const auto x = collocation_values(Matrix(4, 4), Matrix(4, 4), 0.7, cfg);
    for (double v : x) EXPECT_EQ(v, 0.7);

    const auto one = collocation_values(Matrix{{0.25}}, Matrix{{-0.5}}, 2.0, BasisConfig(0));
    EXPECT_DOUBLE_EQ(one[0], 1.75);
    EXPECT_THROW(collocation_values(Matrix(2, 2), Matrix(4, 4), 0.0, cfg), std::invalid_argument);
}

TEST(CollocationValues, DeterministicLinearRecursion) {
    // One substitution sweep with x fed back in, then compare the converged
    // solve to the explicit recursion.
    const auto cfg = BasisConfig(2);
    const auto p = deterministic_growth();
    const auto r = solve(p, BrownianPath::zero(cfg), cfg);
    const auto oracle = midpoint_rectangle_recursion(4);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(r.x_colloc[j], oracle[j], 1e-12);

    // Single application of the collocation map on the oracle is a fixed point.
    const auto K1 = project_kernel(p.k1, cfg);
    CoefficientVector z1(4);
    for (std::size_t j = 0; j < 4; ++j) z1[j] = cfg.block_width() * oracle[j];
    const auto H1 = assemble_H(K1, z1, IntegrationMatrix(cfg), cfg);
    const auto x = collocation_values(H1, Matrix(4, 4), 1.0, cfg);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(x[j], oracle[j], 1e-14);
}

TEST(Solve, ExampleOneOnZeroPath) {
    const auto cfg = BasisConfig(4);
    const auto r = solve(builtin_example(1), BrownianPath::zero(cfg), cfg);
    for (double v : r.x_colloc) EXPECT_LE(std::abs(v), 1e-12);
}

TEST(Solve, ExampleTwoWithoutNoise) {
    const auto cfg = BasisConfig(4);
    const auto r = solve(builtin_example(2, 0.0), sample_path(cfg, 3), cfg);
    for (double v : r.x_colloc) EXPECT_DOUBLE_EQ(v, 0.1);
}

TEST(Solve, DeterministicGrowthMatchesExponential) {
    const auto cfg = BasisConfig(5);
    const auto r = solve(deterministic_growth(), BrownianPath::zero(cfg), cfg);
    double worst = 0.0;
    for (std::size_t j = 0; j < 32; ++j)
        worst = std::max(worst, std::abs(r.x_colloc[j] - std::exp(cfg.midpoint(j))));
    EXPECT_LE(worst, 0.05);
}

TEST(Solve, SelfConsistency) {
    for (int id : {1, 2}) {
        const auto cfg = BasisConfig(5);
        const auto p = builtin_example(id);
        const auto r = solve(p, sample_path(cfg, 100 + id), cfg);
        const double m = 32.0;
        for (std::size_t j = 0; j < 32; ++j) {
            EXPECT_NEAR(m * r.z1[j], p.beta(r.x_colloc[j]), 1e-12);
            EXPECT_NEAR(m * r.z2[j], p.sigma(r.x_colloc[j]), 1e-12);
        }
        EXPECT_LE(r.residual, 1e-12);
        EXPECT_GE(r.iterations, 1u);
    }
}

TEST(Solve, CausalityUnderFuturePathPerturbation) {
    const auto cfg = BasisConfig(4);
    const auto p = builtin_example(2);
    const auto base = sample_path(cfg, 9);
    const auto r0 = solve(p, base, cfg);
    for (std::size_t j : {0u, 5u, 14u}) {
        std::vector<double> v(base.values().begin(), base.values().end());
        for (std::size_t k = 2 * j + 2; k < v.size(); ++k) v[k] += 0.3 * std::cos(static_cast<double>(k));
        const auto r1 = solve(p, BrownianPath(16, v), cfg);
        for (std::size_t i = 0; i <= j; ++i) EXPECT_EQ(r1.x_colloc[i], r0.x_colloc[i]) << j;
    }
}

TEST(Solve, CausalityUnderFutureKernelPerturbation) {
    const auto cfg = BasisConfig(3);
    auto p = deterministic_growth();
    const auto r0 = solve(p, BrownianPath::zero(cfg), cfg);
    // Change the kernel only where t >= 0.5, i.e. columns of blocks 4..7.
    p.k1 = Kernel::from_function([](double, double t) { return t < 0.5 ? 1.0 : 3.0; });
    const auto r1 = solve(p, BrownianPath::zero(cfg), cfg);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r1.x_colloc[i], r0.x_colloc[i], 1e-13);
    EXPECT_GT(r1.x_colloc[7], r0.x_colloc[7] + 0.1);
}

TEST(Solve, ReportsNonConvergence) {
    const auto cfg = BasisConfig(3);
    SolverOptions opts;
    opts.max_iter = 1;
    try {
        solve(builtin_example(2), sample_path(cfg, 1), cfg, opts);
        FAIL() << "expected NonConvergence";
    } catch (const NonConvergence& e) {
        EXPECT_GT(e.residual(), opts.tol);
        EXPECT_EQ(e.iterations(), 1u);
    }
}

TEST(Solve, ReportsNonFiniteIterate) {
    const auto cfg = BasisConfig(3);
    auto p = deterministic_growth();
    p.beta = [](double x) { return x > 1.05 ? std::nan("") : x; };
    EXPECT_THROW(solve(p, BrownianPath::zero(cfg), cfg), NonFiniteIterate);
}

TEST(Solve, RejectsMismatchedPath) {
    EXPECT_THROW(solve(builtin_example(1), sample_path(BasisConfig(3), 1), BasisConfig(4)),
                 std::invalid_argument);
}

TEST(Solve, DampingStillConverges) {
    // Strong negative feedback: plain substitution overshoots, damping rescues it.
    const auto cfg = BasisConfig(2);
    auto p = deterministic_growth();
    p.k1 = Kernel::constant_value(-9.0);
    const auto r = solve(p, BrownianPath::zero(cfg), cfg);
    const double h = 0.25;
    double running = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        const double expected = (1.0 + running) / (1.0 + 9.0 * h / 2);
        EXPECT_NEAR(r.x_colloc[j], expected, 1e-11);
        running += -9.0 * h * expected;
    }
}

TEST(Reconstruct, BlockConstant) {
    const auto cfg = BasisConfig(3);
    const auto r = solve(builtin_example(1), sample_path(cfg, 4), cfg);
    for (std::size_t j = 0; j < 8; ++j) {
        EXPECT_EQ(reconstruct(r, cfg.midpoint(j)), r.x_colloc[j]);
        EXPECT_EQ(reconstruct(r, j * cfg.block_width()), r.x_colloc[j]);
    }
    EXPECT_EQ(reconstruct(r, 0.0), r.x_colloc[0]);
    EXPECT_THROW(reconstruct(r, 1.0), std::domain_error);
}

TEST(BuiltinExample, ExactSolutions) {
    EXPECT_EQ((*builtin_example(1).exact)(0.5, 0.0), 0.0);
    EXPECT_DOUBLE_EQ((*builtin_example(2).exact)(0.5, 0.0), 0.1);
    EXPECT_NEAR((*builtin_example(1).exact)(0.5, 0.3), 0.00999983334, 1e-11);
    EXPECT_NEAR((*builtin_example(1).exact)(0.5, 0.3), std::asinh(0.01), 1e-17);
    EXPECT_THROW(builtin_example(3), std::invalid_argument);
}

TEST(BuiltinExample, Coefficients) {
    const double a = 1.0 / 30.0;
    const auto e1 = builtin_example(1);
    EXPECT_DOUBLE_EQ(*e1.k1.constant, -a * a / 2);
    EXPECT_DOUBLE_EQ(*e1.k2.constant, a);
    EXPECT_DOUBLE_EQ(e1.beta(0.4), std::tanh(0.4) / std::pow(std::cosh(0.4), 2));
    EXPECT_DOUBLE_EQ(e1.sigma(0.4), 1.0 / std::cosh(0.4));
    const auto e2 = builtin_example(2);
    EXPECT_EQ(e2.x0, 0.1);
    EXPECT_DOUBLE_EQ(*e2.k1.constant, -a * a);
    EXPECT_DOUBLE_EQ(e2.beta(0.5), 0.375);
    EXPECT_DOUBLE_EQ(e2.sigma(0.5), 0.75);
}
