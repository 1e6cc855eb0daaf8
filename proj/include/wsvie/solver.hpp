#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "brownian.hpp"
#include "matrix.hpp"
#include "operational.hpp"
#include "problem.hpp"
#include "walsh.hpp"

namespace wsvie {

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(double residual, std::size_t iterations)
        : std::runtime_error("collocation iteration did not converge: residual " +
                             std::to_string(residual) + " after " + std::to_string(iterations) +
                             " iterations"),
          residual_(residual),
          iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

class NonFiniteIterate : public std::runtime_error {
public:
    NonFiniteIterate(std::size_t block, std::size_t iteration)
        : std::runtime_error("non-finite value at block " + std::to_string(block) +
                             " in iteration " + std::to_string(iteration)),
          block_(block) {}

    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

struct SolverOptions {
    double tol = 1e-12;          ///< sup-norm bound on the last x update
    std::size_t max_iter = 200;
    bool auto_damping = true;    ///< switch to damped updates after a residual increase
    double damping = 0.5;
};

struct SolveResult {
    CoefficientVector z1;          ///< block integrals of beta(x_m)
    CoefficientVector z2;          ///< block integrals of sigma(x_m)
    std::vector<double> x_colloc;  ///< x_m(t_j)
    std::size_t iterations = 0;
    double residual = 0.0;

    std::size_t resolution() const noexcept { return x_colloc.size(); }
};

/// H = m K^T diag(Z) M for any upper-triangular operational matrix M.
template <typename OperationalMatrix>
Matrix assemble_H(const KernelMatrix& K, const CoefficientVector& Z, const OperationalMatrix& M,
                  const BasisConfig& cfg) {
    const std::size_t m = cfg.resolution();
    if (K.size() != m || Z.size() != m || M.size() != m)
        throw std::invalid_argument("assemble_H: dimension mismatch");
    const double scale = static_cast<double>(m);
    Matrix H(m, m);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) acc += K(i, r) * Z[i] * M(i, c);
            H(r, c) = scale * acc;
        }
    return H;
}

/// Diagonal of assemble_H only: m * sum_{i<=j} K(i,j) Z[i] M(i,j).
/// M must be upper-triangular (P and P_S are).
template <typename OperationalMatrix>
std::vector<double> assemble_H_diagonal(const KernelMatrix& K, std::span<const double> Z,
                                        const OperationalMatrix& M) {
    const std::size_t m = M.size();
    if (K.size() != m || Z.size() != m)
        throw std::invalid_argument("assemble_H_diagonal: dimension mismatch");
    const double scale = static_cast<double>(m);
    std::vector<double> d(m);
    for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= j; ++i) acc += K(i, j) * Z[i] * M(i, j);
        d[j] = scale * acc;
    }
    return d;
}

/// x_m(t_j) = x0 + m^2 (H1[j][j] + H2[j][j]), from T_W W(t_j) = m e_j.
inline std::vector<double> collocation_values(std::span<const double> h1_diag,
                                              std::span<const double> h2_diag, double x0) {
    if (h1_diag.size() != h2_diag.size())
        throw std::invalid_argument("collocation_values: dimension mismatch");
    const double m = static_cast<double>(h1_diag.size());
    const double m2 = m * m;
    std::vector<double> x(h1_diag.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = x0 + m2 * (h1_diag[j] + h2_diag[j]);
    return x;
}

inline std::vector<double> collocation_values(const Matrix& H1, const Matrix& H2, double x0,
                                              const BasisConfig& cfg) {
    const std::size_t m = cfg.resolution();
    if (H1.rows() != m || H1.cols() != m || H2.rows() != m || H2.cols() != m)
        throw std::invalid_argument("collocation_values: dimension mismatch");
    const auto d1 = diag_extract(H1);
    const auto d2 = diag_extract(H2);
    return collocation_values(d1, d2, x0);
}

namespace detail {
inline CoefficientVector block_integrals(const ScalarFunction& f, std::span<const double> x,
                                         double h, std::size_t iteration) {
    CoefficientVector z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double v = f(x[j]);
        if (!std::isfinite(v)) throw NonFiniteIterate(j, iteration);
        z[j] = h * v;
    }
    return z;
}
}  // namespace detail

/**
 * Solve the collocation system by successive substitution on x_m(t_j).
 *
 * Each sweep sets Z1 = h beta(x), Z2 = h sigma(x), builds the diagonals of
 * H1 = m K1^T diag(Z1) P and H2 = m K2^T diag(Z2) P_S, and updates
 * x_j = x0 + m^2 (H1[j][j] + H2[j][j]). Stops when the sup-norm update is
 * at most opts.tol. Once the residual grows, later updates are damped.
 */
inline SolveResult solve(const ProblemSpec& problem, const BrownianPath& path,
                         const BasisConfig& cfg, const SolverOptions& opts = {}) {
    const std::size_t m = cfg.resolution();
    const double h = cfg.block_width();
    if (path.resolution() != m)
        throw std::invalid_argument("solve: path resolution " + std::to_string(path.resolution()) +
                                    " does not match basis resolution " + std::to_string(m));

    const KernelMatrix K1 = project_kernel(problem.k1, cfg);
    const KernelMatrix K2 = project_kernel(problem.k2, cfg);
    const IntegrationMatrix P(cfg);
    const StochasticMatrix PS(path, cfg);

    std::vector<double> x(m, problem.x0);
    double previous = std::numeric_limits<double>::infinity();
    double relax = 1.0;

    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        const auto z1 = detail::block_integrals(problem.beta, x, h, it);
        const auto z2 = detail::block_integrals(problem.sigma, x, h, it);
        const auto d1 = assemble_H_diagonal(K1, z1.values, P);
        const auto d2 = assemble_H_diagonal(K2, z2.values, PS);
        const auto next = collocation_values(d1, d2, problem.x0);

        double residual = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (!std::isfinite(next[j])) throw NonFiniteIterate(j, it);
            residual = std::max(residual, std::abs(next[j] - x[j]));
        }
        if (opts.auto_damping && residual > previous) relax = opts.damping;
        for (std::size_t j = 0; j < m; ++j) x[j] += relax * (next[j] - x[j]);

        if (residual <= opts.tol) {
            SolveResult r;
            r.z1 = detail::block_integrals(problem.beta, x, h, it);
            r.z2 = detail::block_integrals(problem.sigma, x, h, it);
            r.x_colloc = std::move(x);
            r.iterations = it;
            r.residual = residual;
            return r;
        }
        previous = residual;
    }
    throw NonConvergence(previous, opts.max_iter);
}

/// Block-constant reconstruction: x_m(t) = x_m(t_j) for t in block j.
inline double reconstruct(const SolveResult& result, double t) {
    detail::require_unit_interval(t, "reconstruct");
    const std::size_t m = result.resolution();
    const auto j = static_cast<std::size_t>(std::floor(t * static_cast<double>(m)));
    return result.x_colloc[j];
}

/// X: block-integral coefficients of the solved x_m, i.e. h x_m(t_j).
inline CoefficientVector solution_coefficients(const SolveResult& result) {
    const double h = 1.0 / static_cast<double>(result.resolution());
    CoefficientVector X(result.resolution());
    for (std::size_t j = 0; j < X.size(); ++j) X[j] = h * result.x_colloc[j];
    return X;
}

}  // namespace wsvie
