#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>

#include "multisle/errors.hpp"

namespace multisle {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Gamma function (Lanczos, g = 7, 9 coefficients), with the reflection
// formula for negative arguments.  Relative error below 1e-13 on (0, 50),
// which is the range the weight prefactors draw from.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_coef[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double gamma_positive(double z) {
    // z >= 0.5
    double x = lanczos_coef[0];
    for (int k = 1; k < 9; ++k)
        x += lanczos_coef[k] / (z + k - 1.0);
    const double t = z + lanczos_g - 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z - 0.5) * std::exp(-t) * x;
}

} // namespace detail

inline double gamma_fn(double z) {
    if (z == std::floor(z) && z <= 0.0)
        throw std::domain_error("gamma_fn: pole at non-positive integer");
    if (z >= 0.5)
        return detail::gamma_positive(z);
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return pi / (std::sin(pi * z) * detail::gamma_positive(1.0 - z));
}

// ---------------------------------------------------------------------------
// O(n)-model fugacity, central charge, conformal weights, Catalan numbers
// ---------------------------------------------------------------------------

inline double fugacity(double kappa) {
    if (!(kappa > 0.0))
        throw std::domain_error("fugacity: kappa must be positive");
    return -2.0 * std::cos(4.0 * pi / kappa);
}

inline double central_charge(double kappa) {
    if (!(kappa > 0.0))
        throw std::domain_error("central_charge: kappa must be positive");
    return (6.0 - kappa) * (3.0 * kappa - 8.0) / (2.0 * kappa);
}

// Conformal weight of the s-leg boundary operator: s(2s+4-kappa)/2kappa.
inline double theta_s(int s, double kappa) {
    if (s < 0)
        throw std::domain_error("theta_s: s must be non-negative");
    if (!(kappa > 0.0))
        throw std::domain_error("theta_s: kappa must be positive");
    return s * (2.0 * s + 4.0 - kappa) / (2.0 * kappa);
}

inline std::uint64_t catalan(int n) {
    if (n < 1)
        throw std::domain_error("catalan: N must be >= 1");
    if (n > 33)
        throw std::domain_error("catalan: N too large for 64-bit result");
    unsigned __int128 c = 1;
    for (int k = 1; k <= n; ++k)
        c = c * 2 * (2 * k - 1) / (k + 1);
    return static_cast<std::uint64_t>(c);
}

// ---------------------------------------------------------------------------
// KappaContext: the SLE speed with its derived quantities.  Exceptional
// speeds kappa = 4q/q' (q, q' coprime, q > 1) are detected by rational
// reconstruction of kappa/4 with denominator cap 64 and tolerance 1e-12.
// ---------------------------------------------------------------------------

struct KappaContext {
    double kappa;
    double fugacity;
    double central_charge;
    std::optional<std::pair<int, int>> exceptional; // (q, q')

    explicit KappaContext(double k)
        : kappa(k), fugacity(multisle::fugacity(validate(k))),
          central_charge(multisle::central_charge(k)),
          exceptional(detect_exceptional(k)) {}

    static double validate(double k) {
        if (!(k > 0.0) || !(k < 8.0))
            throw std::domain_error("KappaContext: kappa must lie in (0, 8)");
        return k;
    }

    static std::optional<std::pair<int, int>> detect_exceptional(double k) {
        // Continued-fraction reconstruction of kappa/4 = q/q'.
        const double target = k / 4.0;
        long p_prev = 1, p_cur = static_cast<long>(std::floor(target));
        long q_prev = 0, q_cur = 1;
        double frac = target - std::floor(target);
        for (int iter = 0; iter < 32; ++iter) {
            if (q_cur > 0 && q_cur <= 64) {
                const double approx = static_cast<double>(p_cur) / q_cur;
                if (std::abs(k - 4.0 * approx) <= 1e-12 * std::max(1.0, k)) {
                    if (p_cur > 1)
                        return std::make_pair(static_cast<int>(p_cur),
                                              static_cast<int>(q_cur));
                    return std::nullopt;
                }
            }
            if (frac < 1e-15 || q_cur > 64)
                break;
            const double inv = 1.0 / frac;
            const long a = static_cast<long>(std::floor(inv));
            frac = inv - std::floor(inv);
            const long p_next = a * p_cur + p_prev;
            const long q_next = a * q_cur + q_prev;
            p_prev = p_cur; p_cur = p_next;
            q_prev = q_cur; q_cur = q_next;
        }
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Gauss hypergeometric function 2F1(a, b; c; z) for real parameters and
// z in [0, 1).  Power series for z <= 0.7; the z -> 1-z linear
// transformation otherwise, falling back to a long direct series when
// c-a-b is too close to an integer for the transformation to be stable.
// ---------------------------------------------------------------------------

namespace detail {

inline double hyp2f1_series(double a, double b, double c, double z,
                            int max_terms) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < max_terms; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && k > 2)
            return sum;
    }
    if (std::abs(term) > 1e-12 * std::abs(sum))
        throw NumericalError("hyp2f1: series did not converge", sum,
                             std::abs(term));
    return sum;
}

} // namespace detail

inline double hyp2f1(double a, double b, double c, double z) {
    if (c <= 0.0 && c == std::floor(c))
        throw std::domain_error("hyp2f1: c is a non-positive integer");
    if (!(z >= 0.0) || !(z < 1.0))
        throw std::domain_error("hyp2f1: z must lie in [0, 1)");
    if (z == 0.0)
        return 1.0;
    // Terminating polynomial cases.
    if ((a <= 0.0 && a == std::floor(a)) || (b <= 0.0 && b == std::floor(b)))
        return detail::hyp2f1_series(a, b, c, z, 100000);
    if (z <= 0.7)
        return detail::hyp2f1_series(a, b, c, z, 10000);
    const double s = c - a - b;
    if (std::abs(s - std::round(s)) > 0.02) {
        // 2F1(a,b;c;z) in terms of series at 1-z.
        const double w = 1.0 - z;
        const double t1 = gamma_fn(c) * gamma_fn(s) /
                          (gamma_fn(c - a) * gamma_fn(c - b)) *
                          detail::hyp2f1_series(a, b, 1.0 - s, w, 10000);
        const double t2 = gamma_fn(c) * gamma_fn(-s) /
                          (gamma_fn(a) * gamma_fn(b)) * std::pow(w, s) *
                          detail::hyp2f1_series(c - a, c - b, 1.0 + s, w, 10000);
        return t1 + t2;
    }
    // Near-integer c-a-b: the transformation degenerates; the direct series
    // still converges for z < 1, just slowly.
    return detail::hyp2f1_series(a, b, c, z, 200000);
}

// ---------------------------------------------------------------------------
// Complete elliptic integral of the first kind, parameter convention:
//   K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt,   via the AGM.
// Aspect-ratio conversion uses R = K(1-lambda)/K(lambda).  (The text uses
// both this convention and its reciprocal in different places; this library
// fixes the former throughout.)
// ---------------------------------------------------------------------------

namespace detail {

// K as a function of the complementary parameter: K(1 - mc) = pi/(2 AGM(1, sqrt(mc))).
inline double elliptic_k_from_complement(double mc) {
    double a = 1.0, b = std::sqrt(mc);
    for (int i = 0; i < 60; ++i) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        a = an; b = bn;
        if (std::abs(a - b) <= 1e-17 * a)
            break;
    }
    return pi / (2.0 * a);
}

} // namespace detail

inline double elliptic_k(double m) {
    if (!(m > 0.0) || !(m < 1.0))
        throw std::domain_error("elliptic_k: m must lie in (0, 1)");
    return detail::elliptic_k_from_complement(1.0 - m);
}

inline double aspect_from_lambda(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::domain_error("aspect_from_lambda: lambda must lie in (0,1)");
    // K(1-lambda) evaluated straight from lambda so no precision is lost to
    // the subtraction when lambda is tiny.
    return detail::elliptic_k_from_complement(lambda) / elliptic_k(lambda);
}

// Cardy's crossing formula as a function of the cross-ratio.
inline double cardy_probability(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::domain_error("cardy_probability: lambda must lie in (0,1)");
    return gamma_fn(2.0 / 3.0) / (gamma_fn(4.0 / 3.0) * gamma_fn(1.0 / 3.0)) *
           std::pow(lambda, 1.0 / 3.0) *
           hyp2f1(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, lambda);
}

inline double lambda_from_aspect(double r) {
    if (!(r > 0.0))
        throw std::domain_error("lambda_from_aspect: R must be positive");
    // K(1-l)/K(l) decreases from +inf to 0 on (0,1).  lambda approaches the
    // endpoints exponentially fast in R, so bisect in logit space to keep
    // relative precision at both ends.
    auto from_logit = [](double w) { return 1.0 / (1.0 + std::exp(-w)); };
    double lo = -44.0, hi = 44.0; // lambda from ~8e-20 to 1-8e-20
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (aspect_from_lambda(from_logit(mid)) > r)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12)
            break;
    }
    return from_logit(0.5 * (lo + hi));
}

} // namespace multisle
