#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>
#include <utility>
#include <vector>

#include "multisle/errors.hpp"
#include "multisle/specfun.hpp"

namespace multisle {

using cdouble = std::complex<double>;

struct QuadResult {
    double value = 0.0;
    double err = 0.0;
};

struct QuadResultC {
    cdouble value{0.0, 0.0};
    double err = 0.0;
};

struct QuadOptions {
    double tol = 1e-10;     // relative
    int max_level = 8;      // tanh-sinh halving levels
    double s_max = 12.0;    // hard cap on the tanh-sinh parameter
    double eps_frac = 1e-3; // circle radius as a fraction of the local gap
    bool throw_on_failure = false;
};

namespace detail {

// One tanh-sinh node on (0,1): t = 1/(1+exp(-pi sinh s)).  Returns t, 1-t and
// their logs without cancellation, plus the plain Jacobian factor pi cosh s
// (the t(1-t) part of the Jacobian is folded into the endpoint powers).
struct TsNode {
    double t, omt;      // t and 1-t
    double log_t, log_omt;
    double jac;         // pi cosh s
};

inline TsNode ts_node(double s) {
    const double sigma = pi * std::sinh(s);
    TsNode n;
    if (sigma >= 0.0) {
        const double e = std::exp(-sigma);
        n.omt = e / (1.0 + e);
        n.t = 1.0 / (1.0 + e);
        n.log_omt = -sigma - std::log1p(e);
        n.log_t = -std::log1p(e);
    } else {
        const double e = std::exp(sigma);
        n.t = e / (1.0 + e);
        n.omt = 1.0 / (1.0 + e);
        n.log_t = sigma - std::log1p(e);
        n.log_omt = -std::log1p(e);
    }
    n.jac = pi * std::cosh(s);
    return n;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Tanh-sinh (double-exponential) quadrature of
//     int_0^1 t^beta_a (1-t)^beta_b g(t, 1-t) dt,     beta_a, beta_b > -1,
// with the endpoint powers applied in log space so that exponents arbitrarily
// close to -1 are handled without under/overflow.  g must be smooth on (0,1)
// and bounded at the endpoints.
// ---------------------------------------------------------------------------

template <typename G>
QuadResult tanh_sinh_weighted_01(G&& g, double beta_a, double beta_b,
                                 const QuadOptions& opt = {}) {
    const double pa = 1.0 + beta_a, pb = 1.0 + beta_b;
    // Node value including all weights except the step h.
    auto node_val = [&](double s) -> double {
        const auto n = detail::ts_node(s);
        const double w = std::exp(pa * n.log_t + pb * n.log_omt) * n.jac;
        if (w == 0.0)
            return 0.0;
        return w * g(n.t, n.omt);
    };

    double h = 0.5;
    double smax_pos = 0.0, smax_neg = 0.0; // extents actually used
    double total = node_val(0.0);

    // Expand a tail at the given level until contributions are negligible.
    auto extend = [&](double s_from, double dir, double step,
                      double& smax) -> double {
        double acc = 0.0;
        int small_run = 0;
        double scale = std::abs(total) + 1e-300;
        for (double s = s_from;; s += step) {
            if (s > opt.s_max) { smax = std::max(smax, opt.s_max); break; }
            const double v = node_val(dir * s);
            acc += v;
            scale = std::max(scale, std::abs(acc));
            if (std::abs(v) < 1e-17 * scale) {
                if (++small_run >= 3) { smax = std::max(smax, s); break; }
            } else
                small_run = 0;
        }
        return acc;
    };

    total += extend(h, +1.0, h, smax_pos);
    total += extend(h, -1.0, h, smax_neg);
    double value = h * total;
    double err = std::abs(value);

    for (int level = 1; level <= opt.max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double s = h; s <= smax_pos; s += 2.0 * h)
            add += node_val(s);
        for (double s = h; s <= smax_neg; s += 2.0 * h)
            add += node_val(-s);
        // The finer grid may need longer tails.
        add += extend(smax_pos + h, +1.0, h, smax_pos);
        add += extend(smax_neg + h, -1.0, h, smax_neg);
        total += add;
        const double next = h * total;
        err = std::abs(next - value);
        value = next;
        if (err <= opt.tol * std::max(std::abs(value), 1e-300) && level >= 2)
            return {value, err};
    }
    if (opt.throw_on_failure &&
        err > 100.0 * opt.tol * std::max(std::abs(value), 1e-300))
        throw NumericalError("tanh_sinh: tolerance not met", value, err);
    return {value, err};
}

// Complex-valued variant (same nodes, complex g).
template <typename G>
QuadResultC tanh_sinh_weighted_01_c(G&& g, double beta_a, double beta_b,
                                    const QuadOptions& opt = {}) {
    const double pa = 1.0 + beta_a, pb = 1.0 + beta_b;
    auto node_val = [&](double s) -> cdouble {
        const auto n = detail::ts_node(s);
        const double w = std::exp(pa * n.log_t + pb * n.log_omt) * n.jac;
        if (w == 0.0)
            return {0.0, 0.0};
        return w * g(cdouble(n.t), cdouble(n.omt));
    };
    double h = 0.5;
    cdouble total = node_val(0.0);
    double smax_pos = 0.0, smax_neg = 0.0;
    auto extend = [&](double s_from, double dir, double step,
                      double& smax) -> cdouble {
        cdouble acc = 0.0;
        int small_run = 0;
        double scale = std::abs(total) + 1e-300;
        for (double s = s_from;; s += step) {
            if (s > opt.s_max) { smax = std::max(smax, opt.s_max); break; }
            const cdouble v = node_val(dir * s);
            acc += v;
            scale = std::max(scale, std::abs(acc));
            if (std::abs(v) < 1e-17 * scale) {
                if (++small_run >= 3) { smax = std::max(smax, s); break; }
            } else
                small_run = 0;
        }
        return acc;
    };
    total += extend(h, +1.0, h, smax_pos);
    total += extend(h, -1.0, h, smax_neg);
    cdouble value = h * total;
    double err = std::abs(value);
    for (int level = 1; level <= opt.max_level; ++level) {
        h *= 0.5;
        cdouble add = 0.0;
        for (double s = h; s <= smax_pos; s += 2.0 * h)
            add += node_val(s);
        for (double s = h; s <= smax_neg; s += 2.0 * h)
            add += node_val(-s);
        add += extend(smax_pos + h, +1.0, h, smax_pos);
        add += extend(smax_neg + h, -1.0, h, smax_neg);
        total += add;
        const cdouble next = h * total;
        err = std::abs(next - value);
        value = next;
        if (err <= opt.tol * std::max(std::abs(value), 1e-300) && level >= 2)
            return {value, err};
    }
    return {value, err};
}

// ---------------------------------------------------------------------------
// int_a^b (u-a)^beta_a (b-u)^beta_b f(u) du  with beta_a, beta_b > -1.
// The smooth part f receives (u, u-a, b-u); the latter two are computed
// without cancellation near the endpoints.
// ---------------------------------------------------------------------------

template <typename F>
QuadResult integrate_segment_singular(F&& f, double a, double b, double beta_a,
                                      double beta_b, const QuadOptions& opt = {}) {
    if (!(a < b))
        throw std::domain_error("integrate_segment_singular: need a < b");
    if (!(beta_a > -1.0) || !(beta_b > -1.0))
        throw std::domain_error(
            "integrate_segment_singular: endpoint exponents must exceed -1");
    const double len = b - a;
    auto g = [&](double t, double omt) {
        return f(a + t * len, t * len, omt * len);
    };
    QuadResult r = tanh_sinh_weighted_01(g, beta_a, beta_b, opt);
    const double scale = std::pow(len, 1.0 + beta_a + beta_b);
    r.value *= scale;
    r.err *= std::abs(scale);
    return r;
}

// ---------------------------------------------------------------------------
// Winding circle integrals.  For a 2pi-periodic sample p(theta) (analytic in
// a neighbourhood of the circle) this returns
//     int_0^{2pi} e^{i beta theta} p(theta) dtheta
// by Fourier-expanding p and integrating each harmonic in closed form.
// ---------------------------------------------------------------------------

namespace detail {

inline cdouble harmonic_weight(double beta_plus_k) {
    // int_0^{2pi} e^{i x theta} dtheta = 2pi e^{i pi x} sin(pi x)/(pi x)
    const double x = pi * beta_plus_k;
    const double s = (std::abs(x) < 1e-8) ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return 2.0 * pi * std::polar(s, x);
}

template <typename P>
cdouble winding_circle_integral(P&& p, double beta, double* err_out = nullptr) {
    cdouble prev{0.0, 0.0};
    double err = 1.0;
    std::vector<cdouble> samples;
    for (int m = 32; m <= 512; m *= 2) {
        if (samples.empty()) {
            samples.resize(m);
            for (int j = 0; j < m; ++j)
                samples[j] = p(2.0 * pi * j / m);
        } else {
            std::vector<cdouble> next(m);
            for (int j = 0; j < m / 2; ++j)
                next[2 * j] = samples[j];
            for (int j = 1; j < m; j += 2)
                next[j] = p(2.0 * pi * j / m);
            samples.swap(next);
        }
        cdouble acc{0.0, 0.0};
        for (int k = -m / 2; k < m / 2; ++k) {
            cdouble coef{0.0, 0.0};
            for (int j = 0; j < m; ++j)
                coef += samples[j] *
                        std::polar(1.0, -2.0 * pi * k * j / static_cast<double>(m));
            coef /= static_cast<double>(m);
            acc += coef * harmonic_weight(beta + k);
        }
        err = std::abs(acc - prev);
        if (m > 32 && err <= 1e-12 * std::max(std::abs(acc), 1e-300)) {
            if (err_out) *err_out = err;
            return acc;
        }
        prev = acc;
    }
    if (err_out) *err_out = err;
    return prev;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Analytic continuation of int_0^1 t^beta_a (1-t)^beta_b g(t, 1-t) dt to
// endpoint exponents at or below -1 (Hadamard finite part): a truncated
// segment plus winding circle integrals at each divergent endpoint,
//     I = S_eps - [i e^{-i pi b_a}/(2 sin pi b_a)] C_a
//               + [i e^{-i pi b_b}/(2 sin pi b_b)] C_b.
// The identity is exact for every circle radius, so no eps -> 0 limit is
// taken.  g must be evaluable at complex t near a divergent endpoint and
// analytic there.  Exponents at negative integers are poles of the
// correction coefficients (callers route near-singular kappa through the
// averaging policy).  T is double or cdouble.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T, typename G>
std::pair<T, double> continued_01_core(G&& g, double beta_a, double beta_b,
                                       const QuadOptions& opt) {
    const bool corr_a = beta_a < -0.9;
    const bool corr_b = beta_b < -0.9;
    if (beta_a <= -2.0 || beta_b <= -2.0)
        throw std::domain_error(
            "continued integral: exponents at or below -2 unsupported");

    const double eps = opt.eps_frac;
    const double lo = corr_a ? eps : 0.0;
    const double hi = corr_b ? 1.0 - eps : 1.0;

    // Truncated segment in t-space, remapped to tau in (0,1).  At an
    // un-truncated endpoint t and tau are proportional, so its weight stays
    // with the engine; a truncated endpoint's power is regular on the
    // sub-interval and moves into the integrand.
    const double width = hi - lo;
    const double ba_eng = corr_a ? 0.0 : beta_a;
    const double bb_eng = corr_b ? 0.0 : beta_b;
    auto g_eng = [&](auto tau, auto omtau) -> T {
        const auto t = lo + tau * width;
        const auto omt = (1.0 - hi) + omtau * width;
        T w = T(1.0);
        if (corr_a) w *= std::pow(t, beta_a);
        if (corr_b) w *= std::pow(omt, beta_b);
        return w * g(t, omt);
    };
    T seg_value;
    double seg_err;
    if constexpr (std::is_same_v<T, double>) {
        const QuadResult r = tanh_sinh_weighted_01(g_eng, ba_eng, bb_eng, opt);
        seg_value = r.value;
        seg_err = r.err;
    } else {
        const QuadResultC r = tanh_sinh_weighted_01_c(g_eng, ba_eng, bb_eng, opt);
        seg_value = r.value;
        seg_err = r.err;
    }
    const double seg_scale = width * std::pow(width, ba_eng + bb_eng);
    seg_value *= seg_scale;
    seg_err *= seg_scale;

    cdouble corr{0.0, 0.0};
    double cerr = 0.0;
    if (corr_a) {
        auto p = [&](double theta) -> cdouble {
            const cdouble t = std::polar(eps, theta);
            const cdouble omt = 1.0 - t;
            return cdouble(std::pow(omt, beta_b) * g(t, omt)) *
                   cdouble(0.0, 1.0) * std::polar(std::pow(eps, 1.0 + beta_a), theta);
        };
        double e1 = 0.0;
        const cdouble ca = detail::winding_circle_integral(p, beta_a, &e1);
        const cdouble coef = cdouble(0.0, -1.0) * std::polar(1.0, -pi * beta_a) /
                             (2.0 * std::sin(pi * beta_a));
        corr += coef * ca;
        cerr += std::abs(coef) * e1;
    }
    if (corr_b) {
        auto p = [&](double theta) -> cdouble {
            const cdouble omt = std::polar(eps, theta);
            const cdouble t = 1.0 - omt;
            return cdouble(std::pow(t, beta_a) * g(t, omt)) *
                   cdouble(0.0, -1.0) * std::polar(std::pow(eps, 1.0 + beta_b), theta);
        };
        double e2 = 0.0;
        const cdouble cb = detail::winding_circle_integral(p, beta_b, &e2);
        const cdouble coef = cdouble(0.0, 1.0) * std::polar(1.0, -pi * beta_b) /
                             (2.0 * std::sin(pi * beta_b));
        corr += coef * cb;
        cerr += std::abs(coef) * e2;
    }

    if constexpr (std::is_same_v<T, double>) {
        const double imag_leak = std::abs(corr.imag());
        return {seg_value + corr.real(), seg_err + cerr + imag_leak};
    } else {
        return {seg_value + corr, seg_err + cerr};
    }
}

} // namespace detail

template <typename F>
QuadResult integrate_segment_continued(F&& f, double a, double b, double beta_a,
                                       double beta_b,
                                       const QuadOptions& opt = {}) {
    if (!(a < b))
        throw std::domain_error("integrate_segment_continued: need a < b");
    if (beta_a > -0.9 && beta_b > -0.9)
        return integrate_segment_singular(f, a, b, beta_a, beta_b, opt);
    const double len = b - a;
    auto g = [&](auto t, auto omt) { return f(a + t * len, t * len, omt * len); };
    auto [val, err] = detail::continued_01_core<double>(g, beta_a, beta_b, opt);
    const double scale = std::pow(len, 1.0 + beta_a + beta_b);
    return {val * scale, err * std::abs(scale)};
}

// Dispatch on convergence: direct tanh-sinh when both exponents are safely
// above -1, the finite-part form otherwise.
template <typename F>
QuadResult integrate_segment_auto(F&& f, double a, double b, double beta_a,
                                  double beta_b, const QuadOptions& opt = {}) {
    if (beta_a > -0.9 && beta_b > -0.9)
        return integrate_segment_singular(f, a, b, beta_a, beta_b, opt);
    return integrate_segment_continued(f, a, b, beta_a, beta_b, opt);
}

// ---------------------------------------------------------------------------
// Elementary Pochhammer contour integral
//     oint_{P(x_i, x_j)} (u-x_i)^{beta_i} (x_j-u)^{beta_j} f(u) du.
// For Re beta > -1 at both endpoints the closed form
//     4 e^{i pi (beta_i - beta_j)} sin(pi beta_i) sin(pi beta_j) * segment
// is used; otherwise the loop decomposition with two winding circle
// integrals plus the truncated segment.
// ---------------------------------------------------------------------------

template <typename F>
QuadResultC pochhammer_elementary(F&& f, double xi, double xj, double beta_i,
                                  double beta_j, const QuadOptions& opt = {}) {
    if (!(xi < xj))
        throw std::domain_error("pochhammer_elementary: need xi < xj");
    const cdouble phase =
        4.0 * std::polar(1.0, pi * (beta_i - beta_j)) * std::sin(pi * beta_i) *
        std::sin(pi * beta_j);
    if (beta_i > -0.9 && beta_j > -0.9) {
        const QuadResult seg =
            integrate_segment_singular(f, xi, xj, beta_i, beta_j, opt);
        return {phase * seg.value, std::abs(phase) * seg.err};
    }
    const double len = xj - xi;
    const double eps = opt.eps_frac;
    const double scale = std::pow(len, 1.0 + beta_i + beta_j);

    // Truncated segment in t-space.
    const double lo = eps, hi = 1.0 - eps, width = hi - lo;
    auto g_eng = [&](double tau, double omtau) -> double {
        const double t = lo + tau * width;
        const double omt = (1.0 - hi) + omtau * width;
        return std::pow(t, beta_i) * std::pow(omt, beta_j) *
               f(xi + t * len, t * len, omt * len);
    };
    QuadResult seg = tanh_sinh_weighted_01(g_eng, 0.0, 0.0, opt);
    seg.value *= width;
    seg.err *= width;

    auto pa = [&](double theta) -> cdouble {
        const cdouble t = std::polar(eps, theta);
        const cdouble omt = 1.0 - t;
        return std::pow(omt, beta_j) * f(xi + t * len, t * len, omt * len) *
               cdouble(0.0, 1.0) * std::polar(std::pow(eps, 1.0 + beta_i), theta);
    };
    auto pb = [&](double theta) -> cdouble {
        const cdouble omt = std::polar(eps, theta);
        const cdouble t = 1.0 - omt;
        return std::pow(t, beta_i) * f(xi + t * len, t * len, omt * len) *
               cdouble(0.0, -1.0) * std::polar(std::pow(eps, 1.0 + beta_j), theta);
    };
    double e1 = 0.0, e2 = 0.0;
    const cdouble ci = detail::winding_circle_integral(pa, beta_i, &e1);
    const cdouble cj = detail::winding_circle_integral(pb, beta_j, &e2);

    const cdouble ci_coef = std::polar(1.0, -2.0 * pi * beta_j) - 1.0;
    const cdouble cj_coef = -std::polar(1.0, 2.0 * pi * (beta_i - beta_j)) *
                            (std::polar(1.0, -2.0 * pi * beta_i) - 1.0);
    const cdouble value = ci_coef * ci + cj_coef * cj + phase * seg.value;
    const double err =
        std::abs(ci_coef) * e1 + std::abs(cj_coef) * e2 + std::abs(phase) * seg.err;
    return {value * scale, err * std::abs(scale)};
}

} // namespace multisle
