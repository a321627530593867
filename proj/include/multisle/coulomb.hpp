#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <vector>

#include "multisle/quadrature.hpp"
#include "multisle/specfun.hpp"

namespace multisle {

// ---------------------------------------------------------------------------
// Marked boundary points x_1 < x_2 < ... < x_{2N}.
// ---------------------------------------------------------------------------

struct PointConfig {
    std::vector<double> x;
    int n_pairs;

    explicit PointConfig(std::vector<double> pts) : x(std::move(pts)) {
        if (x.size() < 2 || x.size() % 2 != 0)
            throw std::domain_error("PointConfig: need an even number >= 2 of points");
        n_pairs = static_cast<int>(x.size()) / 2;
        const double diam = x.back() - x.front();
        for (size_t i = 0; i + 1 < x.size(); ++i)
            if (!(x[i + 1] - x[i] > 1e-12 * diam))
                throw std::domain_error(
                    "PointConfig: points must be strictly increasing with "
                    "gaps above 1e-12 of the diameter");
    }

    double diameter() const { return x.back() - x.front(); }
    int size() const { return static_cast<int>(x.size()); }
};

// ---------------------------------------------------------------------------
// Contour plans.  Every integral this library evaluates is an iterated
// integral over line segments [x_i, x_{i+1}] (Pochhammer contours reduced to
// segments, with finite-part regularization supplying the kappa <= 4
// continuation).  A plan records one piece per screening variable, innermost
// first; a dependent piece's right endpoint is the next variable.
// ---------------------------------------------------------------------------

struct ContourPiece {
    enum class Kind { segment, elementary_pochhammer, loop, dependent_segment };
    Kind kind;
    int lo;             // 0-based index of the left endpoint x_lo
    double coefficient; // real; all phase factors are pre-folded
};

struct ContourPlan {
    std::vector<ContourPiece> pieces;  // innermost first
    std::vector<int> evaluation_order; // outermost-first variable indices
    int conjugate;                     // 0-based index of x_c
};

inline QuadOptions default_quad_options(int n_pairs) {
    QuadOptions opt;
    opt.tol = n_pairs <= 2 ? 1e-10 : (n_pairs == 3 ? 1e-8 : 1e-6);
    return opt;
}

// ---------------------------------------------------------------------------
// Iterated evaluation of the Coulomb gas integrand
//   prod_{l != c} |x_l - u_m|^{-4/kappa} |x_c - u_m|^{12/kappa - 2}
//   prod_{p<q} |u_p - u_q|^{8/kappa}
// over the plan's segments, all differences ordered positive.  For kappa <= 4
// the -4/kappa endpoint exponents dip below -1 and each level switches to the
// finite-part continuation, which is where the elementary-Pochhammer
// replacement lands after the real phase folding.
// ---------------------------------------------------------------------------

namespace detail {

template <typename V>
V scalar_cast(const cdouble& z) {
    if constexpr (std::is_same_v<V, double>)
        return z.real();
    else
        return z;
}

class CoulombEvaluator {
  public:
    CoulombEvaluator(const PointConfig& cfg, double kappa, int conj,
                     std::vector<ContourPiece> pieces, QuadOptions opt)
        : x_(cfg.x), kappa_(kappa), conj_(conj), pieces_(std::move(pieces)),
          opt_(opt) {
        b4_ = -4.0 / kappa_;
        bc_ = 12.0 / kappa_ - 2.0;
        b8_ = 8.0 / kappa_;
    }

    QuadResult run() const {
        std::array<cdouble, 8> frozen{};
        double outer_err = 0.0;
        const double v =
            level_real(static_cast<int>(pieces_.size()) - 1, frozen, &outer_err);
        // Inner levels run at the same tolerance; their contribution is
        // estimated rather than threaded through every node.
        const double err =
            outer_err + std::abs(v) * opt_.tol * 2.0 *
                            static_cast<double>(pieces_.size());
        return {v, err};
    }

  private:
    const std::vector<double>& x_;
    double kappa_;
    int conj_;
    std::vector<ContourPiece> pieces_;
    QuadOptions opt_;
    double b4_, bc_, b8_;

    double beta_at(int l) const { return l == conj_ ? bc_ : b4_; }

    // Smooth part of the level-m integrand at u (x-endpoint powers of the
    // current interval excluded; the dependent pair power excluded).
    template <typename V>
    V smooth_part(int m, V u, const std::array<cdouble, 8>& frozen) const {
        const auto& piece = pieces_[m];
        const bool dep = piece.kind == ContourPiece::Kind::dependent_segment;
        const int skip_lo = piece.lo;
        const int skip_hi = dep ? -1 : piece.lo + 1;

        V prod4 = V(1.0);
        V prodc = V(1.0);
        bool have_c = false;
        for (int l = 0; l < static_cast<int>(x_.size()); ++l) {
            if (l == skip_lo || l == skip_hi)
                continue;
            const V d = (l <= piece.lo) ? V(u - x_[l]) : V(x_[l] - u);
            if (l == conj_) {
                prodc = d;
                have_c = true;
            } else {
                prod4 *= d;
            }
        }
        V prod8 = V(1.0);
        bool have_8 = false;
        V same_seg = V(1.0);
        bool have_same = false;
        const int nlev = static_cast<int>(pieces_.size());
        for (int q = m + 1; q < nlev; ++q) {
            if (dep && q == m + 1)
                continue; // consumed as the dependent endpoint weight
            const V uq = scalar_cast<V>(frozen[q]);
            if (pieces_[q].lo == piece.lo && !dep) {
                // Same-segment (box) pair: the ordering varies over the
                // domain, so take the symmetric square root of d^2.
                const V d = uq - u;
                same_seg *= d * d;
                have_same = true;
                continue;
            }
            const V d = (pieces_[q].lo > piece.lo) ? V(uq - u) : V(u - uq);
            prod8 *= d;
            have_8 = true;
        }
        V out = std::pow(prod4, b4_);
        if (have_c)
            out *= std::pow(prodc, bc_);
        if (have_8)
            out *= std::pow(prod8, b8_);
        if (have_same)
            out *= std::pow(same_seg, 0.5 * b8_);
        return out;
    }

    // Level integration with all frozen outer variables real.
    double level_real(int m, std::array<cdouble, 8>& frozen,
                      double* err_out = nullptr) const {
        if (m < 0)
            return 1.0;
        const auto& piece = pieces_[m];
        const bool dep = piece.kind == ContourPiece::Kind::dependent_segment;
        const double a = x_[piece.lo];
        const double b = dep ? frozen[m + 1].real() : x_[piece.lo + 1];
        const double beta_a = beta_at(piece.lo);
        const double beta_b = dep ? b8_ : beta_at(piece.lo + 1);
        // A dependent interval collapses when the outer variable sits at the
        // shared endpoint; its contribution scales as (b-a)^{1-4/k+8/k} -> 0.
        if (dep && !(b - a > 0.0))
            return 0.0;

        auto f = [&](auto u, auto, auto) {
            using V = decltype(u);
            std::array<cdouble, 8> fr = frozen;
            fr[m] = u;
            if constexpr (std::is_same_v<V, double>) {
                return smooth_part<double>(m, u, frozen) * level_real(m - 1, fr);
            } else {
                return smooth_part<cdouble>(m, u, frozen) *
                       level_complex(m - 1, fr);
            }
        };
        QuadResult r;
        if (beta_a > -0.9 && beta_b > -0.9)
            r = integrate_segment_singular(f, a, b, beta_a, beta_b, opt_);
        else
            r = integrate_segment_continued(f, a, b, beta_a, beta_b, opt_);
        if (err_out)
            *err_out = r.err;
        return r.value;
    }

    // Level integration with at least one complex frozen outer variable (we
    // are inside a winding-circle correction of some outer level).
    cdouble level_complex(int m, std::array<cdouble, 8>& frozen) const {
        if (m < 0)
            return {1.0, 0.0};
        const auto& piece = pieces_[m];
        const bool dep = piece.kind == ContourPiece::Kind::dependent_segment;
        const double a = x_[piece.lo];
        const cdouble b = dep ? frozen[m + 1] : cdouble(x_[piece.lo + 1]);
        const double beta_a = beta_at(piece.lo);
        const double beta_b = dep ? b8_ : beta_at(piece.lo + 1);
        const cdouble len = b - a;
        if (dep && !(std::abs(len) > 0.0))
            return {0.0, 0.0};

        auto g = [&](auto t, auto /*omt*/) -> cdouble {
            const cdouble u = a + cdouble(t) * len;
            std::array<cdouble, 8> fr = frozen;
            fr[m] = u;
            return smooth_part<cdouble>(m, u, frozen) * level_complex(m - 1, fr);
        };
        cdouble val;
        if (beta_a > -0.9 && beta_b > -0.9) {
            val = tanh_sinh_weighted_01_c(g, beta_a, beta_b, opt_).value;
        } else {
            auto [v, e] = multisle::detail::continued_01_core<cdouble>(
                g, beta_a, beta_b, opt_);
            (void)e;
            val = v;
        }
        return val * std::pow(len, 1.0 + beta_a + beta_b);
    }
};

} // namespace detail

inline QuadResult evaluate_plan(const PointConfig& cfg, double kappa,
                                const ContourPlan& plan, const QuadOptions& opt) {
    detail::CoulombEvaluator ev(cfg, kappa, plan.conjugate, plan.pieces, opt);
    return ev.run();
}

// ---------------------------------------------------------------------------
// The specific contour systems used by the connectivity weights.
// All index arguments are 1-based to match the I_{ij}/I_{ijk} labels.
// ---------------------------------------------------------------------------

namespace detail {

inline ContourPiece::Kind seg_kind(double kappa) {
    return kappa > 4.0 ? ContourPiece::Kind::segment
                       : ContourPiece::Kind::elementary_pochhammer;
}

} // namespace detail

// N = 2, c = 3: single integration along [x_3, x_4].
inline ContourPlan plan_I3(double kappa) {
    ContourPlan p;
    p.pieces = {{detail::seg_kind(kappa), 2, 1.0}};
    p.evaluation_order = {0};
    p.conjugate = 2;
    return p;
}

inline QuadResult coulomb_I3(const KappaContext& kc, const PointConfig& cfg,
                             const QuadOptions& opt = default_quad_options(2)) {
    if (cfg.n_pairs != 2)
        throw std::domain_error("coulomb_I3: config must have 4 points");
    return evaluate_plan(cfg, kc.kappa, plan_I3(kc.kappa), opt);
}

// N = 3, c = 5: double integral over [x_i, x_{i+1}] x [x_j, x_{j+1}].
inline ContourPlan plan_Iij(double kappa, int i, int j) {
    if (i == j || i < 1 || j < 1 || i >= 6 || j >= 6)
        throw std::domain_error("plan_Iij: need distinct i, j in 1..5");
    ContourPlan p;
    p.pieces = {{detail::seg_kind(kappa), i - 1, 1.0},
                {detail::seg_kind(kappa), j - 1, 1.0}};
    p.evaluation_order = {1, 0};
    p.conjugate = 4;
    return p;
}

inline QuadResult coulomb_Iij(const KappaContext& kc, int i, int j,
                              const PointConfig& cfg,
                              const QuadOptions& opt = default_quad_options(3)) {
    if (cfg.n_pairs != 3)
        throw std::domain_error("coulomb_Iij: config must have 6 points");
    return evaluate_plan(cfg, kc.kappa, plan_Iij(kc.kappa, i, j), opt);
}

// N = 4, c = 7: triple integral; i == j selects the dependent-endpoint
// variant with the innermost variable on [x_i, u_2].
inline ContourPlan plan_Iijk(double kappa, int i, int j, int k) {
    if (i < 1 || j < 1 || k < 1 || i >= 8 || j >= 8 || k >= 8 || j == k || i == k)
        throw std::domain_error("plan_Iijk: invalid indices");
    ContourPlan p;
    if (i == j)
        p.pieces = {{ContourPiece::Kind::dependent_segment, i - 1, 1.0},
                    {detail::seg_kind(kappa), j - 1, 1.0},
                    {detail::seg_kind(kappa), k - 1, 1.0}};
    else
        p.pieces = {{detail::seg_kind(kappa), i - 1, 1.0},
                    {detail::seg_kind(kappa), j - 1, 1.0},
                    {detail::seg_kind(kappa), k - 1, 1.0}};
    p.evaluation_order = {2, 1, 0};
    p.conjugate = 6;
    return p;
}

inline QuadResult coulomb_Iijk(const KappaContext& kc, int i, int j, int k,
                               const PointConfig& cfg,
                               const QuadOptions& opt = default_quad_options(4)) {
    if (cfg.n_pairs != 4)
        throw std::domain_error("coulomb_Iijk: config must have 8 points");
    return evaluate_plan(cfg, kc.kappa, plan_Iijk(kc.kappa, i, j, k), opt);
}

// ---------------------------------------------------------------------------
// Rainbow chain (c = 2N-1).  The nested Pochhammer chain reduces to a sum of
// "assignment" integrals: counts[j-1] screening variables integrated over the
// segment S_j = [x_{2N-j}, x_{2N-j+1}] (S_1 rightmost, holding the conjugate
// charge at its left endpoint x_{2N-1}).  rainbow_assignment_integral
// evaluates one assignment as a plain box integral; the reduction
// coefficients live in rainbow_reduction_terms.
// ---------------------------------------------------------------------------

inline ContourPlan plan_rainbow_assignment(double kappa, int n_pairs,
                                           const std::vector<int>& counts) {
    if (n_pairs < 2)
        throw std::domain_error("plan_rainbow_assignment: need N >= 2");
    if (static_cast<int>(counts.size()) != n_pairs - 1)
        throw std::domain_error("plan_rainbow_assignment: need N-1 counts");
    ContourPlan p;
    const int two_n = 2 * n_pairs;
    for (int j = 1; j <= n_pairs - 1; ++j)
        for (int r = 0; r < counts[j - 1]; ++r)
            p.pieces.push_back({detail::seg_kind(kappa), two_n - j - 1, 1.0});
    for (int m = static_cast<int>(p.pieces.size()) - 1; m >= 0; --m)
        p.evaluation_order.push_back(m);
    p.conjugate = two_n - 2;
    return p;
}

inline QuadResult rainbow_assignment_integral(
    const KappaContext& kc, const PointConfig& cfg, const std::vector<int>& counts,
    const QuadOptions& opt = default_quad_options(5)) {
    return evaluate_plan(cfg, kc.kappa,
                         plan_rainbow_assignment(kc.kappa, cfg.n_pairs, counts),
                         opt);
}

// The main chain: one variable per segment.
inline QuadResult rainbow_chain_integral(
    const KappaContext& kc, const PointConfig& cfg,
    const QuadOptions& opt = default_quad_options(5)) {
    return rainbow_assignment_integral(
        kc, cfg, std::vector<int>(cfg.n_pairs - 1, 1), opt);
}

// Reduction of the nested rainbow contour chain into assignment integrals.
// Built level by level: the variable added at level m either starts its own
// segment S_m (coefficient 1) or is inserted into an occupied segment S_j to
// the right, at ordered position p, with coefficient
//     sin(pi (B_m - A_{j,p})) / sin(pi B_m),
// where A walks the accumulated branch exponents from the left edge of S_m
// and B_m = (4/kappa)(m+2) - 2 is the full blob exponent.  Insertion sums
// that cancel (all positions of S_1, for instance) are pruned.  The result
// reproduces the printed reductions for N = 2, 3, 4.
struct RainbowTerm {
    std::vector<int> counts; // counts[j-1] = variables in S_j
    double coeff;
};

inline std::vector<RainbowTerm> rainbow_reduction_terms(int n_pairs,
                                                        double kappa) {
    const int levels = n_pairs - 1;
    std::map<std::vector<int>, double> state;
    {
        std::vector<int> k0(levels, 0);
        k0[0] = 1;
        state[k0] = 1.0;
    }
    const double b4 = -4.0 / kappa, b8 = 8.0 / kappa, bc = 12.0 / kappa - 2.0;
    for (int m = 2; m <= levels; ++m) {
        const double big_b = (4.0 / kappa) * (m + 2) - 2.0;
        const double denom = std::sin(pi * big_b);
        std::map<std::vector<int>, double> next;
        for (const auto& [k, c] : state) {
            // Start segment S_m.
            {
                std::vector<int> nk = k;
                nk[m - 1] = 1;
                next[nk] += c;
            }
            // Insert into an occupied segment to the right.
            double a = 0.0;
            for (int j = m - 1; j >= 1; --j) {
                a += (j == 1) ? bc : b4; // crossing x_{2N-j}
                double csum = 0.0;
                for (int p = 0; p <= k[j - 1]; ++p)
                    csum += std::sin(pi * (big_b - a - p * b8)) / denom;
                a += k[j - 1] * b8;
                if (std::abs(csum) < 1e-12)
                    continue;
                std::vector<int> nk = k;
                nk[j - 1] += 1;
                next[nk] += c * csum;
            }
        }
        state.swap(next);
    }
    std::vector<RainbowTerm> out;
    for (const auto& [k, c] : state)
        if (std::abs(c) > 1e-12)
            out.push_back({k, c});
    return out;
}

} // namespace multisle
