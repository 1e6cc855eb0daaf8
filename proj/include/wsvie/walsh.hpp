#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace wsvie {

/**
 * Resolution of the piecewise-constant basis on [0,1).
 *
 * m = 2^k blocks of width h = 1/m. Block j is the half-open interval
 * [j h, (j+1) h) and its collocation point is the midpoint (2j+1)/(2m).
 * Because h is a power of two, every grid and midpoint time is an exact
 * double.
 */
class BasisConfig {
public:
    static constexpr unsigned max_exponent = 24;

    explicit BasisConfig(unsigned k) : k_(k) {
        if (k > max_exponent)
            throw std::invalid_argument("BasisConfig: exponent " + std::to_string(k) +
                                        " exceeds " + std::to_string(max_exponent));
        m_ = std::size_t{1} << k;
        h_ = std::ldexp(1.0, -static_cast<int>(k));
    }

    /// Build from m directly; m must be a power of two.
    static BasisConfig from_resolution(std::size_t m) {
        if (m == 0 || (m & (m - 1)) != 0)
            throw std::invalid_argument("BasisConfig: resolution " + std::to_string(m) +
                                        " is not a power of two");
        unsigned k = 0;
        while ((std::size_t{1} << k) < m) ++k;
        return BasisConfig(k);
    }

    unsigned exponent() const noexcept { return k_; }
    std::size_t resolution() const noexcept { return m_; }
    double block_width() const noexcept { return h_; }

    double midpoint(std::size_t j) const noexcept {
        return (2.0 * static_cast<double>(j) + 1.0) * 0.5 * h_;
    }

    std::vector<double> midpoints() const {
        std::vector<double> t(m_);
        for (std::size_t j = 0; j < m_; ++j) t[j] = midpoint(j);
        return t;
    }

    /// Index of the block containing t, for t in [0,1).
    std::size_t block_of(double t) const {
        if (!(t >= 0.0 && t < 1.0))
            throw std::domain_error("BasisConfig::block_of: t = " + std::to_string(t) +
                                    " outside [0,1)");
        return static_cast<std::size_t>(std::floor(t * static_cast<double>(m_)));
    }

    friend bool operator==(const BasisConfig&, const BasisConfig&) = default;

private:
    unsigned k_ = 0;
    std::size_t m_ = 1;
    double h_ = 1.0;
};

namespace detail {
inline void require_unit_interval(double t, const char* who) {
    if (!(t >= 0.0 && t < 1.0))
        throw std::domain_error(std::string(who) + ": t = " + std::to_string(t) +
                                " outside [0,1)");
}
}  // namespace detail

/// Rademacher square wave r_i(t) = sgn(sin(2^i pi t)), r_0 = 1.
///
/// Evaluated from the dyadic position of t rather than a floating-point sine:
/// 2^i t is an exact scaling and fmod is exact, so breakpoints give 0 exactly.
inline int rademacher(unsigned i, double t) {
    detail::require_unit_interval(t, "rademacher");
    if (i == 0) return 1;
    const double phase = std::fmod(std::ldexp(t, static_cast<int>(i)), 2.0);
    if (phase == 0.0 || phase == 1.0) return 0;
    return phase < 1.0 ? 1 : -1;
}

/// Walsh function w_n(t): product of r_k(t) over the set bits of n, where
/// bit k-1 (counting from the least significant) selects r_k.
inline int walsh(std::uint64_t n, double t) {
    detail::require_unit_interval(t, "walsh");
    int value = 1;
    for (unsigned k = 1; n != 0; ++k, n >>= 1)
        if (n & 1u) value *= rademacher(k, t);
    return value;
}

/// T_W: Walsh values at block midpoints, entry (i, j) = w_i(t_j).
/// Symmetric, and T_W T_W = m I.
class WalshMatrix {
public:
    explicit WalshMatrix(const BasisConfig& cfg) : m_(cfg.resolution()), entries_(m_ * m_) {
        for (std::size_t j = 0; j < m_; ++j) {
            const double t = cfg.midpoint(j);
            for (std::size_t i = 0; i < m_; ++i)
                entries_[i * m_ + j] = static_cast<std::int8_t>(walsh(i, t));
        }
    }

    std::size_t size() const noexcept { return m_; }
    int operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * m_ + j]; }

    Matrix to_matrix() const { return to_dense(*this); }

    /// Integer product T_W T_W, used for the exact m I check.
    std::vector<std::int64_t> squared() const {
        std::vector<std::int64_t> out(m_ * m_, 0);
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t k = 0; k < m_; ++k) {
                const std::int64_t a = (*this)(i, k);
                for (std::size_t j = 0; j < m_; ++j) out[i * m_ + j] += a * (*this)(k, j);
            }
        return out;
    }

    /// (T_W v)_i = sum_j w_i(t_j) v_j
    std::vector<double> apply(std::span<const double> v) const {
        if (v.size() != m_) throw std::invalid_argument("WalshMatrix::apply: size mismatch");
        std::vector<double> out(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m_; ++j) acc += (*this)(i, j) * v[j];
            out[i] = acc;
        }
        return out;
    }

private:
    std::size_t m_;
    std::vector<std::int8_t> entries_;
};

/// Block-integral coefficients of a function: values[i] = integral over
/// block i. The function value on block i is recovered as m * values[i].
struct CoefficientVector {
    std::vector<double> values;

    CoefficientVector() = default;
    explicit CoefficientVector(std::vector<double> v) : values(std::move(v)) {}
    explicit CoefficientVector(std::size_t m, double fill = 0.0) : values(m, fill) {}

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
    double& operator[](std::size_t i) noexcept { return values[i]; }

    double block_value(std::size_t i) const noexcept {
        return static_cast<double>(values.size()) * values[i];
    }

    /// F^T T_W W(t), evaluated through the Walsh route. Equals m * values[block]
    /// because T_W W(t) = m e_block on the midpoint grid.
    double reconstruct_walsh(const WalshMatrix& tw, double t) const {
        const std::size_t m = values.size();
        if (tw.size() != m) throw std::invalid_argument("reconstruct_walsh: size mismatch");
        detail::require_unit_interval(t, "reconstruct_walsh");
        std::vector<double> w(m);
        for (std::size_t n = 0; n < m; ++n) w[n] = walsh(n, t);
        const auto tw_w = tw.apply(w);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += values[i] * tw_w[i];
        return acc;
    }

    friend bool operator==(const CoefficientVector&, const CoefficientVector&) = default;
};

/// Double block integrals of a kernel k(s, t): entry (i, j) integrates s over
/// block i and t over block j. Constant kernels are stored as a single value.
class KernelMatrix {
public:
    static KernelMatrix uniform(std::size_t m, double entry) {
        KernelMatrix K;
        K.m_ = m;
        K.uniform_ = entry;
        return K;
    }

    static KernelMatrix dense(Matrix entries) {
        if (entries.rows() != entries.cols())
            throw std::invalid_argument("KernelMatrix: not square");
        KernelMatrix K;
        K.m_ = entries.rows();
        K.dense_ = std::move(entries);
        return K;
    }

    std::size_t size() const noexcept { return m_; }
    bool is_uniform() const noexcept { return uniform_.has_value(); }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        return uniform_ ? *uniform_ : dense_(i, j);
    }

private:
    std::size_t m_ = 0;
    std::optional<double> uniform_;
    Matrix dense_;
};

/// 5-point Gauss-Legendre rule on [-1, 1].
namespace gauss_legendre5 {
inline constexpr std::array<double, 5> nodes{
    -0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
    0.5384693101056830910363144, 0.9061798459386639927976269};
inline constexpr std::array<double, 5> weights{
    0.2369268850561890875142640, 0.4786286704993664680412915, 0.5688888888888888888888889,
    0.4786286704993664680412915, 0.2369268850561890875142640};
}  // namespace gauss_legendre5

using ScalarFunction = std::function<double(double)>;
using BivariateFunction = std::function<double(double, double)>;

/// A kernel k(s, t), optionally flagged constant so projection is exact.
struct Kernel {
    BivariateFunction fn;
    std::optional<double> constant;

    static Kernel constant_value(double c) {
        return Kernel{[c](double, double) { return c; }, c};
    }
    static Kernel from_function(BivariateFunction f) { return Kernel{std::move(f), std::nullopt}; }

    double operator()(double s, double t) const { return fn(s, t); }
};

inline CoefficientVector project_function(const ScalarFunction& f, const BasisConfig& cfg) {
    namespace gl = gauss_legendre5;
    const std::size_t m = cfg.resolution();
    const double h = cfg.block_width();
    CoefficientVector F(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double mid = cfg.midpoint(i);
        double acc = 0.0;
        for (std::size_t q = 0; q < gl::nodes.size(); ++q)
            acc += gl::weights[q] * f(mid + 0.5 * h * gl::nodes[q]);
        if (!std::isfinite(acc))
            throw std::domain_error("project_function: non-finite integrand on block " +
                                    std::to_string(i));
        F[i] = 0.5 * h * acc;
    }
    return F;
}

inline KernelMatrix project_kernel(const Kernel& k, const BasisConfig& cfg) {
    namespace gl = gauss_legendre5;
    const std::size_t m = cfg.resolution();
    const double h = cfg.block_width();
    if (k.constant) return KernelMatrix::uniform(m, *k.constant * h * h);

    Matrix K(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const double s_mid = cfg.midpoint(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double t_mid = cfg.midpoint(j);
            double acc = 0.0;
            for (std::size_t p = 0; p < gl::nodes.size(); ++p) {
                const double s = s_mid + 0.5 * h * gl::nodes[p];
                for (std::size_t q = 0; q < gl::nodes.size(); ++q)
                    acc += gl::weights[p] * gl::weights[q] * k(s, t_mid + 0.5 * h * gl::nodes[q]);
            }
            if (!std::isfinite(acc))
                throw std::domain_error("project_kernel: non-finite integrand on block (" +
                                        std::to_string(i) + ", " + std::to_string(j) + ")");
            K(i, j) = 0.25 * h * h * acc;
        }
    }
    return KernelMatrix::dense(std::move(K));
}

inline KernelMatrix project_kernel(const BivariateFunction& k, const BasisConfig& cfg) {
    return project_kernel(Kernel::from_function(k), cfg);
}

}  // namespace wsvie
