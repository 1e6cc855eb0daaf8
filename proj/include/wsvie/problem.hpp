#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "walsh.hpp"

namespace wsvie {

/// Closed-form solution x(t) given t and the Brownian value B(t).
using ExactSolution = std::function<double(double t, double b)>;

/**
 * x(t) = x0 + int_0^t k1(s,t) beta(x(s)) ds + int_0^t k2(s,t) sigma(x(s)) dB(s)
 */
struct ProblemSpec {
    double x0 = 0.0;
    Kernel k1;
    Kernel k2;
    ScalarFunction beta;
    ScalarFunction sigma;
    std::optional<ExactSolution> exact;
    std::string label;
};

inline constexpr double default_noise_intensity = 1.0 / 30.0;

namespace detail {
inline double sech(double x) { return 1.0 / std::cosh(x); }
}  // namespace detail

/// The two test problems with closed-form solutions.
///
/// Example 1: x0 = 0,   k1 = -a^2/2, beta = tanh(x) sech^2(x), k2 = a, sigma = sech(x),
///            x(t) = asinh(a B(t) + sinh(x0)).
/// Example 2: x0 = 0.1, k1 = -a^2,   beta = x (1 - x^2),       k2 = a, sigma = 1 - x^2,
///            x(t) = tanh(a B(t) + atanh(x0)).
///
/// The nonlinearities are written with std::pow for squares so that the same
/// problem read back from a problem file evaluates bit-identically.
inline ProblemSpec builtin_example(int id, double a = default_noise_intensity) {
    ProblemSpec p;
    switch (id) {
        case 1: {
            p.x0 = 0.0;
            p.k1 = Kernel::constant_value(-std::pow(a, 2.0) / 2.0);
            p.k2 = Kernel::constant_value(a);
            p.beta = [](double x) { return std::tanh(x) * std::pow(detail::sech(x), 2.0); };
            p.sigma = [](double x) { return detail::sech(x); };
            const double x0 = p.x0;
            p.exact = [a, x0](double, double b) { return std::asinh(a * b + std::sinh(x0)); };
            p.label = "ex1";
            break;
        }
        case 2: {
            p.x0 = 0.1;
            p.k1 = Kernel::constant_value(-std::pow(a, 2.0));
            p.k2 = Kernel::constant_value(a);
            p.beta = [](double x) { return x * (1.0 - std::pow(x, 2.0)); };
            p.sigma = [](double x) { return 1.0 - std::pow(x, 2.0); };
            const double x0 = p.x0;
            p.exact = [a, x0](double, double b) { return std::tanh(a * b + std::atanh(x0)); };
            p.label = "ex2";
            break;
        }
        default:
            throw std::invalid_argument("unknown example id " + std::to_string(id) +
                                        " (valid ids: 1, 2)");
    }
    return p;
}

/// x(t) = 1 + int_0^t x(s) ds, i.e. x(t) = e^t. No noise.
inline ProblemSpec deterministic_growth() {
    ProblemSpec p;
    p.x0 = 1.0;
    p.k1 = Kernel::constant_value(1.0);
    p.k2 = Kernel::constant_value(0.0);
    p.beta = [](double x) { return x; };
    p.sigma = [](double) { return 0.0; };
    p.exact = [](double t, double) { return std::exp(t); };
    p.label = "growth";
    return p;
}

}  // namespace wsvie
