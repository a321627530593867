#pragma once

#include <functional>
#include <map>
#include <vector>

#include "multisle/coulomb.hpp"
#include "multisle/diagrams.hpp"

namespace multisle {

enum class KappaPolicy { direct, averaged_near_singular };

struct WeightValue {
    double value = 0.0;
    double err_est = 0.0;
    KappaPolicy policy = KappaPolicy::direct;
};

enum class WeightFamily { n1, rect, hex, oct, rainbow };

struct WeightId {
    int n_pairs;
    int sigma; // 1..C_N; for the rainbow family, rotation index + 1
    WeightFamily family;
};

inline WeightFamily family_for(int n_pairs) {
    switch (n_pairs) {
        case 1: return WeightFamily::n1;
        case 2: return WeightFamily::rect;
        case 3: return WeightFamily::hex;
        case 4: return WeightFamily::oct;
        default: return WeightFamily::rainbow;
    }
}

namespace detail {

// prod_{i<j, i,j != c} (x_j - x_i)^{2/kappa} * prod_{k != c} |x_c - x_k|^{1 - 6/kappa}
inline double algebraic_prefactor(const PointConfig& cfg, int conj, double kappa) {
    const auto& x = cfg.x;
    double logp = 0.0;
    for (int i = 0; i < cfg.size(); ++i)
        for (int j = i + 1; j < cfg.size(); ++j) {
            if (i == conj || j == conj)
                continue;
            logp += (2.0 / kappa) * std::log(x[j] - x[i]);
        }
    for (int k = 0; k < cfg.size(); ++k)
        if (k != conj)
            logp += (1.0 - 6.0 / kappa) * std::log(std::abs(x[conj] - x[k]));
    return std::exp(logp);
}

// (Gamma(2-8/kappa)/Gamma(1-4/kappa)^2)^power
inline double gamma_prefactor(double kappa, int power) {
    const double g = gamma_fn(2.0 - 8.0 / kappa) /
                     (gamma_fn(1.0 - 4.0 / kappa) * gamma_fn(1.0 - 4.0 / kappa));
    double out = 1.0;
    for (int i = 0; i < power; ++i)
        out *= g;
    return out;
}

// ---- raw (no kappa policy) weight formulas --------------------------------

inline WeightValue n1_raw(const KappaContext& kc, const PointConfig& cfg) {
    if (cfg.n_pairs != 1)
        throw std::domain_error("weight_n1: config must have 2 points");
    const double v = std::pow(cfg.x[1] - cfg.x[0], 1.0 - 6.0 / kc.kappa);
    return {v, 1e-15 * std::abs(v), KappaPolicy::direct};
}

inline WeightValue rect_pi1_raw(const KappaContext& kc, const PointConfig& cfg,
                                const QuadOptions& opt) {
    const QuadResult i3 = coulomb_I3(kc, cfg, opt);
    const double pref = kc.fugacity * gamma_prefactor(kc.kappa, 1) *
                        algebraic_prefactor(cfg, 2, kc.kappa);
    return {pref * i3.value, std::abs(pref) * i3.err, KappaPolicy::direct};
}

inline WeightValue hex_pi1_raw(const KappaContext& kc, const PointConfig& cfg,
                               const QuadOptions& opt) {
    const double n = kc.fugacity;
    const QuadResult i15 = coulomb_Iij(kc, 1, 5, cfg, opt);
    const QuadResult i25 = coulomb_Iij(kc, 2, 5, cfg, opt);
    const QuadResult i35 = coulomb_Iij(kc, 3, 5, cfg, opt);
    const double bracket = n * i25.value - i15.value - i35.value;
    const double bracket_err = std::abs(n) * i25.err + i15.err + i35.err;
    const double pref = n * n / (n * n - 2.0) * gamma_prefactor(kc.kappa, 2) *
                        algebraic_prefactor(cfg, 4, kc.kappa);
    return {pref * bracket, std::abs(pref) * bracket_err, KappaPolicy::direct};
}

inline WeightValue hex_pi2_raw(const KappaContext& kc, const PointConfig& cfg,
                               const QuadOptions& opt) {
    const double n = kc.fugacity;
    const QuadResult i45 = coulomb_Iij(kc, 4, 5, cfg, opt);
    const double pref = n * n * gamma_prefactor(kc.kappa, 2) *
                        algebraic_prefactor(cfg, 4, kc.kappa);
    return {pref * i45.value, std::abs(pref) * i45.err, KappaPolicy::direct};
}

// Shared I_{ijk} evaluations for the octagon brackets.
struct OctIntegrals {
    std::map<int, QuadResult> cache;
    const KappaContext& kc;
    const PointConfig& cfg;
    QuadOptions opt;
    OctIntegrals(const KappaContext& k, const PointConfig& c, QuadOptions o)
        : kc(k), cfg(c), opt(o) {}
    QuadResult get(int i, int j, int k) {
        const int key = i * 100 + j * 10 + k;
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
        const QuadResult r = coulomb_Iijk(kc, i, j, k, cfg, opt);
        cache.emplace(key, r);
        return r;
    }
};

inline std::pair<double, double> oct_pi0_bracket(OctIntegrals& I, double n) {
    const std::pair<double, std::array<int, 3>> terms[] = {
        {1.0, {3, 5, 7}},      {-n, {3, 4, 7}},     {n * n, {3, 3, 7}},
        {-2.0 * n, {2, 3, 7}}, {2.0, {1, 3, 7}},    {-n, {2, 5, 7}},
        {n * n, {2, 4, 7}},    {n * n, {2, 2, 7}},  {-n, {1, 2, 7}},
        {1.0, {1, 5, 7}},      {-n, {1, 4, 7}}};
    double v = 0.0, e = 0.0;
    for (const auto& [coef, idx] : terms) {
        const QuadResult r = I.get(idx[0], idx[1], idx[2]);
        v += coef * r.value;
        e += std::abs(coef) * r.err;
    }
    return {v, e};
}

inline WeightValue oct_pi2_raw(const KappaContext& kc, const PointConfig& cfg,
                               const QuadOptions& opt) {
    const double n = kc.fugacity;
    OctIntegrals I(kc, cfg, opt);
    const QuadResult i167 = I.get(1, 6, 7), i267 = I.get(2, 6, 7),
                     i367 = I.get(3, 6, 7), i467 = I.get(4, 6, 7);
    const double bracket = n * (i167.value - n * i267.value) +
                           (n * n - 1.0) * (n * i367.value - i467.value);
    const double err = std::abs(n) * (i167.err + std::abs(n) * i267.err) +
                       std::abs(n * n - 1.0) * (std::abs(n) * i367.err + i467.err);
    const double denom = n * n * n * n - 3.0 * n * n + 1.0;
    const double pref = n * n * n / denom * gamma_prefactor(kc.kappa, 3) *
                        algebraic_prefactor(cfg, 6, kc.kappa);
    return {pref * bracket, std::abs(pref) * err, KappaPolicy::direct};
}

inline WeightValue oct_pi3_raw(const KappaContext& kc, const PointConfig& cfg,
                               const QuadOptions& opt) {
    const double n = kc.fugacity;
    OctIntegrals I(kc, cfg, opt);
    const QuadResult i567 = I.get(5, 6, 7), i667 = I.get(6, 6, 7);
    const double bracket = i567.value - n * i667.value;
    const double err = i567.err + std::abs(n) * i667.err;
    const double pref = n * n * n * gamma_prefactor(kc.kappa, 3) *
                        algebraic_prefactor(cfg, 6, kc.kappa);
    return {pref * bracket, std::abs(pref) * err, KappaPolicy::direct};
}

inline WeightValue oct_pi0_raw(const KappaContext& kc, const PointConfig& cfg,
                               const QuadOptions& opt) {
    const double n = kc.fugacity;
    OctIntegrals I(kc, cfg, opt);
    const auto [v, e] = oct_pi0_bracket(I, n);
    const double d = n * n - 2.0;
    const double pref = n * n * n / (d * d) * gamma_prefactor(kc.kappa, 3) *
                        algebraic_prefactor(cfg, 6, kc.kappa);
    return {pref * v, std::abs(pref) * e, KappaPolicy::direct};
}

inline WeightValue oct_pi1_raw(const KappaContext& kc, const PointConfig& cfg,
                               const QuadOptions& opt) {
    const double n = kc.fugacity;
    OctIntegrals I(kc, cfg, opt);
    auto [v, e] = oct_pi0_bracket(I, n);
    const QuadResult i567 = I.get(5, 6, 7), i667 = I.get(6, 6, 7);
    const double d = n * n - 2.0;
    v -= d * (n * i567.value - n * n * i667.value);
    e += std::abs(d) * (std::abs(n) * i567.err + n * n * i667.err);
    const double pref = n * n * n / (d * d) * gamma_prefactor(kc.kappa, 3) *
                        algebraic_prefactor(cfg, 6, kc.kappa);
    return {pref * v, std::abs(pref) * e, KappaPolicy::direct};
}

// Rainbow weight, rotation 0, in the c = 2N-1 convention: the reduction of
// the nested contour chain into assignment integrals (see
// rainbow_reduction_terms), normalized level by level like the rectangle,
// hexagon-Pi_2 and octagon-Pi_3 formulas it specializes to for N <= 4.
inline WeightValue rainbow_raw(const KappaContext& kc, const PointConfig& cfg,
                               const QuadOptions& opt) {
    const int two_n = cfg.size();
    const auto terms = rainbow_reduction_terms(cfg.n_pairs, kc.kappa);
    double bracket = 0.0, bracket_err = 0.0;
    for (const auto& term : terms) {
        const QuadResult t = rainbow_assignment_integral(kc, cfg, term.counts, opt);
        double fact = 1.0;
        for (int k : term.counts)
            for (int i = 2; i <= k; ++i)
                fact *= i;
        bracket += term.coeff * t.value / fact;
        bracket_err += std::abs(term.coeff) * t.err / fact;
    }
    double pref = algebraic_prefactor(cfg, two_n - 2, kc.kappa);
    const double per_level = kc.fugacity * gamma_prefactor(kc.kappa, 1);
    for (int m = 0; m < cfg.n_pairs - 1; ++m)
        pref *= per_level;
    return {pref * bracket, std::abs(pref) * bracket_err, KappaPolicy::direct};
}

// ---- near-singular kappa policy -------------------------------------------

// Genuine singular kappa of the evaluation paths above: poles of
// Gamma(2-8/kappa) (which also cover the finite-part sine poles), the
// 1/(n^2-2) and 1/(n^4-3n^2+1) factors of the specific brackets, and for
// the rainbow the sin(4 pi (m+2)/kappa) denominators of the reduction.
inline std::vector<double> singular_kappas(WeightFamily fam, int base_sigma,
                                           int n_pairs = 0) {
    std::vector<double> s;
    for (int m = 2; m <= 16; ++m)
        s.push_back(8.0 / m);
    const bool n2 = (fam == WeightFamily::hex && base_sigma == 1) ||
                    (fam == WeightFamily::oct && base_sigma == 1);
    const bool n4 = fam == WeightFamily::oct && base_sigma == 2;
    if (n2)
        for (int q = 3; q <= 31; q += 2)
            s.push_back(16.0 / q);
    if (n4)
        for (int q = 3; q <= 39; ++q)
            if (q % 5 != 0 && 20.0 / q < 8.0)
                s.push_back(20.0 / q);
    if (fam == WeightFamily::rainbow)
        for (int m = 2; m <= std::max(2, n_pairs - 1); ++m)
            for (int j = 1; j <= 8 * (m + 2); ++j) {
                const double k = 4.0 * (m + 2) / j;
                if (k < 8.0 && k > 0.4)
                    s.push_back(k);
            }
    return s;
}

inline double singular_distance(double kappa, const std::vector<double>& set) {
    double d = 1e30;
    for (double k : set)
        d = std::min(d, std::abs(kappa - k));
    return d;
}

// Evaluate directly, or as the even-extrapolated average over kappa +/- h
// when within delta of a singular speed (the weights are analytic there, so
// the average converges to the removable-singularity value).
template <typename Eval>
WeightValue with_kappa_policy(const KappaContext& kc,
                              const std::vector<double>& singular, Eval&& ev) {
    constexpr double delta = 1e-4, h = 1e-3;
    if (singular_distance(kc.kappa, singular) >= delta)
        return ev(kc);
    const WeightValue lo = ev(KappaContext(kc.kappa - h));
    const WeightValue hi = ev(KappaContext(kc.kappa + h));
    WeightValue out;
    out.value = 0.5 * (lo.value + hi.value);
    out.err_est = std::max(lo.err_est, hi.err_est) +
                  h * h * std::abs(out.value) * 10.0;
    out.policy = KappaPolicy::averaged_near_singular;
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Moebius rotation of a weight: evaluate the base weight on the image of x
// under an increasing Moebius map realizing an s-vertex cyclic shift, times
// the covariance factor prod_k |g'(x_k)|^{theta_1}.
// ---------------------------------------------------------------------------

namespace detail {

struct RotatedConfig {
    PointConfig cfg;
    double log_jacobian_sum; // sum_k log g'(x_k)
};

inline RotatedConfig rotate_config(const PointConfig& in, int steps,
                                   double pole_frac) {
    const int m = in.size();
    const int s = ((steps % m) + m) % m;
    if (s == 0)
        throw std::logic_error("rotate_config: zero shift");
    const double p = in.x[s - 1] + pole_frac * (in.x[s] - in.x[s - 1]);
    std::vector<double> y(m);
    double logjac = 0.0;
    for (int k = 0; k < m; ++k)
        logjac += -2.0 * std::log(std::abs(in.x[k] - p));
    for (int idx = 0; idx < m; ++idx) {
        const int src = (idx + s) % m;
        y[idx] = -1.0 / (in.x[src] - p);
    }
    // Affine renormalization back to the original scale keeps the image
    // well-conditioned; its Jacobian joins the covariance factor.
    const double y0 = y.front();
    const double spread = y.back() - y0;
    const double scale = in.diameter() / spread;
    for (double& v : y)
        v = (v - y0) * scale;
    logjac += m * std::log(scale);
    return {PointConfig(y), logjac};
}

} // namespace detail

// Forward declaration for the rotation dispatch.
inline WeightValue evaluate_weight(const KappaContext& kc, const WeightId& id,
                                   const PointConfig& cfg, const QuadOptions& opt);

// Rotated weight: the polygon diagram of the result is the base diagram
// rotated by `steps` vertices.
inline WeightValue rotate_weight(const WeightId& base, int steps,
                                 const KappaContext& kc, const PointConfig& cfg,
                                 const QuadOptions& opt) {
    const int m = cfg.size();
    const int s = ((steps % m) + m) % m;
    if (s == 0)
        return evaluate_weight(kc, base, cfg, opt);
    const double theta1 = theta_s(1, kc.kappa);
    for (double frac : {0.5, 0.25, 0.75}) {
        try {
            const auto rot = detail::rotate_config(cfg, s, frac);
            const WeightValue b = evaluate_weight(kc, base, rot.cfg, opt);
            const double cov = std::exp(theta1 * rot.log_jacobian_sum);
            return {cov * b.value, cov * b.err_est, b.policy};
        } catch (const std::domain_error&) {
            continue; // image too degenerate: re-gauge the pole and retry
        }
    }
    throw NumericalError("rotate_weight: no admissible pole location found",
                         0.0, 0.0);
}

// ---------------------------------------------------------------------------
// Public weight evaluators.
// ---------------------------------------------------------------------------

inline WeightValue weight_n1(const KappaContext& kc, const PointConfig& cfg) {
    return detail::n1_raw(kc, cfg);
}

inline WeightValue weight_rect(const KappaContext& kc, int sigma,
                               const PointConfig& cfg,
                               const QuadOptions& opt = default_quad_options(2)) {
    if (cfg.n_pairs != 2 || sigma < 1 || sigma > 2)
        throw std::domain_error("weight_rect: need 4 points and sigma in {1,2}");
    return detail::with_kappa_policy(
        kc, detail::singular_kappas(WeightFamily::rect, 1),
        [&](const KappaContext& k) {
            if (sigma == 1)
                return detail::rect_pi1_raw(k, cfg, opt);
            return rotate_weight({2, 1, WeightFamily::rect}, 1, k, cfg, opt);
        });
}

// Closed hypergeometric form of the rectangle weights; regular at every
// kappa in (0,8), so no averaging policy is attached.
inline WeightValue weight_rect_hyp(const KappaContext& kc, int sigma,
                                   const PointConfig& cfg) {
    if (cfg.n_pairs != 2 || sigma < 1 || sigma > 2)
        throw std::domain_error("weight_rect_hyp: need 4 points, sigma in {1,2}");
    const double kappa = kc.kappa;
    const auto& x = cfg.x;
    const double lambda = ((x[1] - x[0]) * (x[3] - x[2])) /
                          ((x[2] - x[0]) * (x[3] - x[1]));
    const double z = sigma == 1 ? lambda : 1.0 - lambda;
    const double pref = gamma_fn(12.0 / kappa - 1.0) * gamma_fn(4.0 / kappa) /
                        (gamma_fn(8.0 / kappa) * gamma_fn(8.0 / kappa - 1.0));
    const double xpow = std::pow(x[2] - x[0], 1.0 - 6.0 / kappa) *
                        std::pow(x[3] - x[1], 1.0 - 6.0 / kappa);
    const double lpow = std::pow(z, 2.0 / kappa) *
                        std::pow(1.0 - z, 1.0 - 6.0 / kappa);
    const double f = hyp2f1(4.0 / kappa, 1.0 - 4.0 / kappa, 8.0 / kappa, z);
    const double v = pref * xpow * lpow * f;
    return {v, 1e-12 * std::abs(v), KappaPolicy::direct};
}

inline WeightValue weight_hex(const KappaContext& kc, int sigma,
                              const PointConfig& cfg,
                              const QuadOptions& opt = default_quad_options(3)) {
    if (cfg.n_pairs != 3 || sigma < 1 || sigma > 5)
        throw std::domain_error("weight_hex: need 6 points and sigma in 1..5");
    const auto table = enumerate_diagrams(3);
    const PolygonDiagram& target = table[sigma - 1];
    // Base diagrams: Pi_1 at sigma = 1, the rainbow (= Pi_2 of the text) at 2.
    for (int base_sigma : {1, 2}) {
        const PolygonDiagram base =
            base_sigma == 1 ? hex_pi1_diagram() : rainbow_diagram(3);
        const auto steps = rotation_steps(base, target);
        if (!steps)
            continue;
        return detail::with_kappa_policy(
            kc, detail::singular_kappas(WeightFamily::hex, base_sigma),
            [&](const KappaContext& k) {
                if (*steps == 0)
                    return base_sigma == 1 ? detail::hex_pi1_raw(k, cfg, opt)
                                           : detail::hex_pi2_raw(k, cfg, opt);
                return rotate_weight({3, base_sigma, WeightFamily::hex}, *steps,
                                     k, cfg, opt);
            });
    }
    throw std::logic_error("weight_hex: diagram not reachable by rotation");
}

inline WeightValue weight_oct(const KappaContext& kc, int sigma,
                              const PointConfig& cfg,
                              const QuadOptions& opt = default_quad_options(4)) {
    if (cfg.n_pairs != 4 || sigma < 1 || sigma > 14)
        throw std::domain_error("weight_oct: need 8 points and sigma in 1..14");
    const auto table = enumerate_diagrams(4);
    const PolygonDiagram& target = table[sigma - 1];
    for (int base_sigma : {1, 2, 3}) {
        const PolygonDiagram base = base_sigma == 1   ? oct_pi1_diagram()
                                    : base_sigma == 2 ? oct_pi2_diagram()
                                                      : rainbow_diagram(4);
        const auto steps = rotation_steps(base, target);
        if (!steps)
            continue;
        return detail::with_kappa_policy(
            kc, detail::singular_kappas(WeightFamily::oct, base_sigma),
            [&](const KappaContext& k) {
                if (*steps == 0) {
                    if (base_sigma == 1) return detail::oct_pi1_raw(k, cfg, opt);
                    if (base_sigma == 2) return detail::oct_pi2_raw(k, cfg, opt);
                    return detail::oct_pi3_raw(k, cfg, opt);
                }
                return rotate_weight({4, base_sigma, WeightFamily::oct}, *steps,
                                     k, cfg, opt);
            });
    }
    throw std::logic_error("weight_oct: diagram not reachable by rotation");
}

// The auxiliary function Pi_0 (not a connectivity weight: it decomposes as
// Pi_1 + n/(n^2-2) Pi_3).
inline WeightValue weight_oct_pi0(const KappaContext& kc, const PointConfig& cfg,
                                  const QuadOptions& opt = default_quad_options(4)) {
    if (cfg.n_pairs != 4)
        throw std::domain_error("weight_oct_pi0: need 8 points");
    return detail::with_kappa_policy(
        kc, detail::singular_kappas(WeightFamily::oct, 1),
        [&](const KappaContext& k) { return detail::oct_pi0_raw(k, cfg, opt); });
}

inline WeightValue weight_rainbow(const KappaContext& kc, int rotation,
                                  const PointConfig& cfg,
                                  const QuadOptions& opt = default_quad_options(5)) {
    if (cfg.n_pairs < 2)
        throw std::domain_error("weight_rainbow: need N >= 2");
    const int n = cfg.n_pairs;
    const int r = ((rotation % (2 * n)) + 2 * n) % (2 * n);
    return detail::with_kappa_policy(
        kc, detail::singular_kappas(WeightFamily::rainbow, 0, n),
        [&](const KappaContext& k) {
            if (r == 0)
                return detail::rainbow_raw(k, cfg, opt);
            return rotate_weight({n, 1, WeightFamily::rainbow}, r, k, cfg, opt);
        });
}

inline WeightValue evaluate_weight(const KappaContext& kc, const WeightId& id,
                                   const PointConfig& cfg, const QuadOptions& opt) {
    switch (id.family) {
        case WeightFamily::n1: return weight_n1(kc, cfg);
        case WeightFamily::rect: return weight_rect(kc, id.sigma, cfg, opt);
        case WeightFamily::hex: return weight_hex(kc, id.sigma, cfg, opt);
        case WeightFamily::oct: return weight_oct(kc, id.sigma, cfg, opt);
        case WeightFamily::rainbow:
            return weight_rainbow(kc, id.sigma - 1, cfg, opt);
    }
    throw std::logic_error("evaluate_weight: bad family");
}

// Weight for the canonical diagram index sigma of an N <= 4 configuration.
inline WeightValue weight_by_sigma(const KappaContext& kc, int sigma,
                                   const PointConfig& cfg,
                                   const QuadOptions& opt) {
    const WeightId id{cfg.n_pairs, sigma, family_for(cfg.n_pairs)};
    if (cfg.n_pairs > 4)
        throw std::domain_error(
            "weight_by_sigma: only rainbow weights exist for N > 4");
    return evaluate_weight(kc, id, cfg, opt);
}

// ---------------------------------------------------------------------------
// Crossing probabilities P_s = a_s Pi_s / sum_t a_t Pi_t.
// ---------------------------------------------------------------------------

inline std::vector<double> crossing_probabilities(
    const std::vector<double>& a, const KappaContext& kc, const PointConfig& cfg,
    const QuadOptions& opt = QuadOptions{}) {
    const int n = cfg.n_pairs;
    if (n > 4)
        throw std::domain_error(
            "crossing_probabilities: full weight basis requires N <= 4");
    const auto cn = static_cast<size_t>(catalan(n));
    if (a.size() != cn)
        throw std::domain_error("crossing_probabilities: need C_N coefficients");
    bool any = false;
    for (double c : a) {
        if (c < 0.0)
            throw std::domain_error("crossing_probabilities: coefficients >= 0");
        any = any || c > 0.0;
    }
    if (!any)
        throw std::domain_error("crossing_probabilities: all coefficients zero");
    QuadOptions o = opt;
    if (o.tol == QuadOptions{}.tol)
        o = default_quad_options(n);
    std::vector<double> w(cn, 0.0);
    double denom = 0.0;
    for (size_t s = 0; s < cn; ++s) {
        if (a[s] == 0.0)
            continue;
        w[s] = a[s] * weight_by_sigma(kc, static_cast<int>(s) + 1, cfg, o).value;
        denom += w[s];
    }
    if (!(denom > 0.0))
        throw std::runtime_error(
            "crossing_probabilities: non-positive partition function");
    for (double& v : w)
        v /= denom;
    return w;
}

} // namespace multisle
