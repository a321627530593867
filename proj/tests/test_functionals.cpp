#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "multisle/functionals.hpp"

using namespace multisle;
using Catch::Approx;

TEST_CASE("richardson ladder on synthetic power-law data", "[functionals]") {
    // v_k = A + B eps^delta + C eps at eps_k = eps0 2^{-k}.
    const double A = 2.5, B = -1.3, C = 0.7, delta = 1.0 / 3.0;
    std::vector<double> v;
    for (int k = 0; k < 8; ++k) {
        const double eps = 0.1 * std::pow(2.0, -k);
        v.push_back(A + B * std::pow(eps, delta) + C * eps);
    }
    const LimitResult r = richardson_ladder(v, delta);
    CHECK(r.value == Approx(A).epsilon(1e-7));
    CHECK(std::abs(r.value - A) <= 10.0 * r.err_est + 1e-12);

    // Misfitting assumed exponent: the fitted one takes over.
    const LimitResult r2 = richardson_ladder(v, 2.0);
    CHECK(r2.value == Approx(A).epsilon(3e-4));
}

TEST_CASE("collapse limit normalizations", "[functionals]") {
    const KappaContext kc(5.0);
    // N = 1: the defining normalization l1 Pi_1 = 1, exactly at any gap.
    const WeightFn n1 = [&](const PointConfig& c) {
        return weight_n1(kc, c).value;
    };
    const LimitResult r = limit_collapse(n1, 1, kc, PointConfig({0.0, 1.7}));
    CHECK(r.value == Approx(1.0).epsilon(1e-10));

    // Rectangle: the infinity limit reduces to the two-point weight.
    const WeightFn rect1 = [&](const PointConfig& c) {
        return weight_rect_hyp(kc, 1, c).value;
    };
    const PointConfig cfg({0.0, 0.9, 2.1, 3.2});
    const LimitResult rinf = limit_to_infinity(rect1, kc, cfg);
    const double expected =
        weight_n1(kc, PointConfig({cfg.x[1], cfg.x[2]})).value;
    CHECK(rinf.value == Approx(expected).epsilon(1e-3));
}

TEST_CASE("two-leg intervals annihilate, joined intervals reduce",
          "[functionals]") {
    const KappaContext kc(6.0);
    QuadOptions qo = default_quad_options(3);
    const PointConfig hexc({0.0, 1.0, 2.2, 3.1, 4.4, 5.6});

    const WeightFn hex1 = [&](const PointConfig& c) {
        return weight_hex(kc, 1, c, qo).value;
    };
    const WeightFn hex2 = [&](const PointConfig& c) {
        return weight_hex(kc, 2, c, qo).value;
    };

    // (x3, x4) is a two-leg interval of Pi_1: the rescaled limit vanishes.
    const LimitResult z = limit_collapse(hex1, 3, kc, hexc);
    const double pre = std::pow(0.05 * (hexc.x[4] - hexc.x[2]),
                                6.0 / kc.kappa - 1.0) *
                       hex1(hexc);
    CHECK(std::abs(z.value) <= 1e-4 * std::abs(pre));

    // Pi_2 collapses at i = 3 onto the rectangle weight with
    // (x3, x4) -> (x5, x6).
    const LimitResult red = limit_collapse(hex2, 3, kc, hexc);
    const double rect = weight_rect_hyp(
        kc, 1, PointConfig({hexc.x[0], hexc.x[1], hexc.x[4], hexc.x[5]})).value;
    CHECK(red.value == Approx(rect).epsilon(1e-3));
}

TEST_CASE("limit order independence on the rectangle", "[functionals]") {
    const KappaContext kc(5.0);
    const WeightFn rect1 = [&](const PointConfig& c) {
        return weight_rect_hyp(kc, 1, c).value;
    };
    const PointConfig cfg({0.0, 0.9, 2.1, 3.2});
    // Infinity limit first, then the trivial pair.
    const LimitResult rinf = limit_to_infinity(rect1, kc, cfg);
    const double v1 =
        rinf.value / weight_n1(kc, PointConfig({cfg.x[1], cfg.x[2]})).value;
    // Collapse (x2, x3) first: lands on the N = 1 weight of (x1, x4).
    const WeightFn f23 = [&](const PointConfig& c) { return rect1(c); };
    const LimitResult rc = limit_collapse(f23, 2, kc, cfg);
    const double v2 =
        rc.value / weight_n1(kc, PointConfig({cfg.x[0], cfg.x[3]})).value;
    CHECK(v1 == Approx(v2).epsilon(2e-3));
}

TEST_CASE("duality matrix N=1 and N=2", "[functionals]") {
    const PointConfig b1({0.0, 1.0});
    const auto m1 = duality_matrix(1, KappaContext(5.0), b1,
                                   default_quad_options(2));
    CHECK(m1.entry[0][0] == Approx(1.0).margin(5e-3));

    const PointConfig b2({0.0, 1.0, 2.0, 3.0});
    const auto m2 = duality_matrix(2, KappaContext(5.0), b2,
                                   default_quad_options(2));
    CHECK(m2.max_diag_deviation() <= 5e-3);
    CHECK(m2.max_offdiag() <= 5e-3);
}

TEST_CASE("duality matrix N=3 at kappa=6", "[functionals]") {
    const PointConfig b3({0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
    QuadOptions qo = default_quad_options(3);
    qo.tol = 1e-7;
    LimitOptions lo;
    lo.ladder = 7;
    const auto m3 = duality_matrix(3, KappaContext(6.0), b3, qo, lo);
    INFO("max offdiag " << m3.max_offdiag() << " diag dev "
                        << m3.max_diag_deviation());
    CHECK(m3.max_diag_deviation() <= 5e-3);
    CHECK(m3.max_offdiag() <= 5e-3);
}

TEST_CASE("pde residuals", "[functionals]") {
    // Closed-form solutions satisfy the system to finite-difference accuracy.
    const KappaContext k5(5.0);
    const WeightFn n1 = [&](const PointConfig& c) {
        return weight_n1(k5, c).value;
    };
    const PointConfig c1({0.0, 1.3});
    const auto r1 = pde_residual(n1, k5, c1, 1e-4 * c1.diameter());
    for (double v : r1.nullstate)
        CHECK(v <= 1e-7);
    for (double v : r1.ward)
        CHECK(v <= 1e-7);

    const WeightFn rect1 = [&](const PointConfig& c) {
        return weight_rect_hyp(k5, 1, c).value;
    };
    const PointConfig c2({0.0, 0.8, 1.9, 3.0});
    const auto r2 = pde_residual(rect1, k5, c2, 1e-4 * c2.diameter());
    for (double v : r2.nullstate)
        CHECK(v <= 1e-6);
    for (double v : r2.ward)
        CHECK(v <= 1e-6);

    // The constant solves the kappa = 6 system (theta_1 = 0).
    const KappaContext k6(6.0);
    const WeightFn one = [](const PointConfig&) { return 1.0; };
    const auto r3 = pde_residual(one, k6, c2, 1e-4);
    for (double v : r3.nullstate)
        CHECK(v <= 1e-10);
    for (double v : r3.ward)
        CHECK(v <= 1e-10);
}

TEST_CASE("log-singularity verdicts at kappa=8/3 and kappa=6",
          "[functionals]") {
    const KappaContext k83(8.0 / 3.0);
    const PointConfig cfg({0.0, 1.0, 2.3, 3.4});
    const WeightFn pi1 = [&](const PointConfig& c) {
        return weight_rect_hyp(k83, 1, c).value;
    };
    const WeightFn pi2 = [&](const PointConfig& c) {
        return weight_rect_hyp(k83, 2, c).value;
    };
    const auto f1 = frobenius_log_fit_pair(pi1, 1, k83, cfg);
    CHECK_FALSE(f1.log_present);
    const auto f2 = frobenius_log_fit_pair(pi2, 1, k83, cfg);
    CHECK(f2.log_present);

    // Triple collapse at kappa = 6: no logarithm for either basis weight.
    const KappaContext k6(6.0);
    const WeightFn q1 = [&](const PointConfig& c) {
        return weight_rect_hyp(k6, 1, c).value;
    };
    const WeightFn q2 = [&](const PointConfig& c) {
        return weight_rect_hyp(k6, 2, c).value;
    };
    const auto t1 = frobenius_log_fit_triple(q1, 1, 0.4, k6, cfg);
    CHECK_FALSE(t1.log_present);
    const auto t2 = frobenius_log_fit_triple(q2, 1, 0.4, k6, cfg);
    CHECK_FALSE(t2.log_present);
}
