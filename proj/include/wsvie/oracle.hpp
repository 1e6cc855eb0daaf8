#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "brownian.hpp"
#include "problem.hpp"
#include "solver.hpp"
#include "walsh.hpp"

namespace wsvie {

struct OracleResult {
    std::vector<double> grid;             ///< j h, j = 0 .. m
    std::vector<double> values;           ///< Euler-Maruyama iterates y_j
    std::vector<double> midpoint_values;  ///< (y_j + y_{j+1}) / 2, compared against x_m(t_j)
};

/// Explicit Euler-Maruyama on the block grid, driven by the block increments
/// of the same Brownian path the collocation solver sees:
///
///   y_{j+1} = y_j + k1(jh, (j+1)h) beta(y_j) h + k2(jh, (j+1)h) sigma(y_j) (B((j+1)h) - B(jh))
///
/// The kernel's second argument is frozen at the target step, which is exact
/// for constant kernels only.
inline OracleResult euler_maruyama(const ProblemSpec& problem, const BrownianPath& path,
                                   const BasisConfig& cfg) {
    const std::size_t m = cfg.resolution();
    const double h = cfg.block_width();
    if (path.resolution() != m)
        throw std::invalid_argument("euler_maruyama: path resolution does not match basis");
    const auto b = path.values();

    OracleResult r;
    r.grid.resize(m + 1);
    r.values.resize(m + 1);
    r.grid[0] = 0.0;
    r.values[0] = problem.x0;
    for (std::size_t j = 0; j < m; ++j) {
        const double s = static_cast<double>(j) * h;
        const double t = static_cast<double>(j + 1) * h;
        const double y = r.values[j];
        const double next = y + problem.k1(s, t) * problem.beta(y) * h +
                            problem.k2(s, t) * problem.sigma(y) * (b[2 * j + 2] - b[2 * j]);
        if (!std::isfinite(next)) throw NonFiniteIterate(j + 1, 0);
        r.grid[j + 1] = t;
        r.values[j + 1] = next;
    }
    r.midpoint_values.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        r.midpoint_values[j] = 0.5 * (r.values[j] + r.values[j + 1]);
    return r;
}

}  // namespace wsvie
