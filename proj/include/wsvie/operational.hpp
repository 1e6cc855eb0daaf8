#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "brownian.hpp"
#include "matrix.hpp"
#include "walsh.hpp"

namespace wsvie {

/**
 * Integration operational matrix P of the block pulse basis, evaluated at the
 * collocation midpoints:
 *
 *        h/2  h    h   ...  h
 *        0    h/2  h   ...  h
 *   P =  .          .       .
 *        0    0    0   ... h/2
 *
 * Entry (i, j) is the integral of phi_i over [0, t_j], so column j sums to t_j.
 * Entries are generated on demand; nothing is stored beyond m and h.
 */
class IntegrationMatrix {
public:
    explicit IntegrationMatrix(const BasisConfig& cfg)
        : m_(cfg.resolution()), h_(cfg.block_width()) {}

    std::size_t size() const noexcept { return m_; }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        if (i > j) return 0.0;
        return i == j ? 0.5 * h_ : h_;
    }

    Matrix to_matrix() const { return to_dense(*this); }

private:
    std::size_t m_;
    double h_;
};

/**
 * Stochastic (Ito) operational matrix P_S built from one Brownian path.
 *
 * Off-diagonal (i < j): B((i+1)h) - B(ih), the full increment over block i.
 * Diagonal:             B(t_j) - B(jh), the increment up to the midpoint.
 * Column j therefore telescopes to B(t_j).
 */
class StochasticMatrix {
public:
    StochasticMatrix(const BrownianPath& path, const BasisConfig& cfg)
        : m_(cfg.resolution()), full_(m_), half_(m_) {
        if (path.resolution() != m_)
            throw std::invalid_argument("StochasticMatrix: path sampled for m = " +
                                        std::to_string(path.resolution()) + ", basis has m = " +
                                        std::to_string(m_));
        const auto b = path.values();
        for (std::size_t i = 0; i < m_; ++i) {
            full_[i] = b[2 * i + 2] - b[2 * i];
            half_[i] = b[2 * i + 1] - b[2 * i];
        }
    }

    std::size_t size() const noexcept { return m_; }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        if (i > j) return 0.0;
        return i == j ? half_[i] : full_[i];
    }

    std::span<const double> block_increments() const noexcept { return full_; }
    std::span<const double> midpoint_increments() const noexcept { return half_; }

    Matrix to_matrix() const { return to_dense(*this); }

private:
    std::size_t m_;
    std::vector<double> full_;
    std::vector<double> half_;
};

/// (1/m) T_W M T_W: carries a block-pulse operational matrix into the Walsh
/// basis. Applying it twice returns M because T_W T_W = m I.
inline Matrix walsh_domain(const Matrix& M, const WalshMatrix& tw) {
    const std::size_t m = tw.size();
    if (M.rows() != m || M.cols() != m)
        throw std::invalid_argument("walsh_domain: matrix is " + std::to_string(M.rows()) + "x" +
                                    std::to_string(M.cols()) + ", T_W is " + std::to_string(m) +
                                    "x" + std::to_string(m));
    const Matrix T = tw.to_matrix();
    Matrix out = T * M * T;
    out *= 1.0 / static_cast<double>(m);
    return out;
}

inline Matrix diag_lift(std::span<const double> v) { return Matrix::diagonal(v); }
inline Matrix diag_lift(const CoefficientVector& v) { return Matrix::diagonal(v.values); }

inline std::vector<double> diag_extract(const Matrix& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("diag_extract: matrix is not square");
    return M.diagonal_values();
}

}  // namespace wsvie
