#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "walsh.hpp"

namespace wsvie {

namespace rng {

/// SplitMix64 finalizer. Used as a stateless counter-based generator:
/// the n-th draw of a stream keyed by `key` is mix(key + n * gamma).
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t draw(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix(key + (counter + 1) * gamma);
}

/// Uniform on (0, 1]; never returns 0 so log() below is safe.
constexpr double uniform_open_closed(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Stream key for Monte Carlo trial `trial` of an experiment seeded by `base`.
/// Independent of the order in which trials are run.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial) noexcept {
    return mix(mix(base) ^ (trial * gamma + 0x632be59bd9b4e019ULL));
}

/// Fill `out` with standard normals from stream `key` (Box-Muller, pairs of
/// counters 2p and 2p+1 give draws 2p and 2p+1).
inline void standard_normals(std::uint64_t key, std::span<double> out) {
    for (std::size_t p = 0; 2 * p < out.size(); ++p) {
        const double u1 = uniform_open_closed(draw(key, 2 * p));
        const double u2 = uniform_open_closed(draw(key, 2 * p + 1));
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        out[2 * p] = r * std::cos(theta);
        if (2 * p + 1 < out.size()) out[2 * p + 1] = r * std::sin(theta);
    }
}

}  // namespace rng

/// Brownian motion sampled on the half-step grid {j h/2 : j = 0 .. 2m}.
class BrownianPath {
public:
    BrownianPath(std::size_t m, std::vector<double> values, std::uint64_t seed = 0)
        : m_(m), half_step_(0.5 / static_cast<double>(m)), values_(std::move(values)), seed_(seed) {
        if (values_.size() != 2 * m_ + 1)
            throw std::invalid_argument("BrownianPath: expected " + std::to_string(2 * m_ + 1) +
                                        " samples, got " + std::to_string(values_.size()));
        if (values_.front() != 0.0) throw std::invalid_argument("BrownianPath: B(0) must be 0");
    }

    /// The identically-zero path.
    static BrownianPath zero(const BasisConfig& cfg) {
        return BrownianPath(cfg.resolution(), std::vector<double>(2 * cfg.resolution() + 1, 0.0));
    }

    std::size_t resolution() const noexcept { return m_; }
    double half_step() const noexcept { return half_step_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const double> values() const noexcept { return values_; }

    double time(std::size_t j) const noexcept { return static_cast<double>(j) * half_step_; }

    /// B(t) for t exactly on the half-step grid. Off-grid times are a caller
    /// bug (mismatched basis and path) and are rejected.
    double value_at(double t) const {
        const double slots = t * static_cast<double>(2 * m_);
        if (!(slots >= 0.0) || slots > static_cast<double>(2 * m_) || slots != std::floor(slots))
            throw std::domain_error("BrownianPath::value_at: t = " + std::to_string(t) +
                                    " is not on the h/2 grid for m = " + std::to_string(m_));
        return values_[static_cast<std::size_t>(slots)];
    }

    /// B at the collocation midpoint of block j.
    double at_midpoint(std::size_t j) const noexcept { return values_[2 * j + 1]; }

    friend bool operator==(const BrownianPath&, const BrownianPath&) = default;

private:
    std::size_t m_;
    double half_step_;
    std::vector<double> values_;
    std::uint64_t seed_;
};

/// Cumulative sum of 2m independent N(0, h/2) increments drawn from the
/// counter-based stream keyed by `seed`. Paths for different m are drawn
/// independently; there is no refinement relation between them.
inline BrownianPath sample_path(const BasisConfig& cfg, std::uint64_t seed) {
    const std::size_t m = cfg.resolution();
    std::vector<double> z(2 * m);
    rng::standard_normals(rng::mix(seed ^ (static_cast<std::uint64_t>(cfg.exponent()) << 56)), z);
    const double scale = std::sqrt(0.5 * cfg.block_width());
    std::vector<double> b(2 * m + 1);
    b[0] = 0.0;
    for (std::size_t j = 0; j < 2 * m; ++j) b[j + 1] = b[j] + scale * z[j];
    return BrownianPath(m, std::move(b), seed);
}

/// Path for Monte Carlo trial `trial` of an experiment with base seed `base`.
inline BrownianPath sample_trial_path(const BasisConfig& cfg, std::uint64_t base,
                                      std::uint64_t trial) {
    return sample_path(cfg, rng::derive_seed(base, trial));
}

inline double value_at(const BrownianPath& path, double t) { return path.value_at(t); }

}  // namespace wsvie
