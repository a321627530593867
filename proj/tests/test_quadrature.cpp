#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "multisle/quadrature.hpp"

using namespace multisle;
using Catch::Approx;

namespace {

// Beta-function oracle via the C library gamma (independent of gamma_fn).
double beta_oracle(double x, double y) {
    return std::tgamma(x) * std::tgamma(y) / std::tgamma(x + y);
}

constexpr auto one = [](auto u, auto, auto) {
    return decltype(u)(1.0) + (u - u);
};

} // namespace

TEST_CASE("segment quadrature: plain and Beta cases", "[quadrature]") {
    QuadOptions opt;
    opt.tol = 1e-12;

    auto r1 = integrate_segment_singular(one, 0.0, 1.0, 0.0, 0.0, opt);
    CHECK(r1.value == Approx(1.0).epsilon(1e-12));

    auto r2 = integrate_segment_singular(one, 0.0, 1.0, -0.5, -0.5, opt);
    CHECK(r2.value == Approx(pi).epsilon(1e-12));
    CHECK(r2.err <= 1e-8);

    // f == 1, beta_a = -4/6, beta_b = 12/6 - 2: B(1/3, 1) = 3.
    auto r3 = integrate_segment_singular(one, 0.0, 1.0, -4.0 / 6, 12.0 / 6 - 2, opt);
    CHECK(r3.value == Approx(3.0).epsilon(1e-12));

    // General interval scaling.
    auto r4 = integrate_segment_singular(one, 2.0, 5.0, -0.25, -0.75, opt);
    CHECK(r4.value == Approx(beta_oracle(0.75, 0.25)).epsilon(1e-11));

    // Smooth factor: int_0^1 u^{-1/2} e^u du (frozen Beta-series oracle).
    auto r5 = integrate_segment_singular(
        [](double u, double, double) { return std::exp(u); }, 0.0, 1.0, -0.5,
        0.0, opt);
    CHECK(r5.value == Approx(2.9253034918143632176).epsilon(1e-12));
}

TEST_CASE("segment quadrature: exponents near -1", "[quadrature]") {
    QuadOptions opt;
    opt.tol = 1e-11;
    for (double ba : {-0.9, -0.99, -0.999}) {
        auto r = integrate_segment_singular(one, 0.0, 1.0, ba, -0.5, opt);
        CHECK(r.value == Approx(beta_oracle(1.0 + ba, 0.5)).epsilon(1e-9));
    }
}

TEST_CASE("error estimate is conservative under tolerance halving",
          "[quadrature]") {
    auto f = [](double u, double, double) { return std::cos(3.0 * u) + 2.0; };
    int ok = 0, total = 0;
    for (double ba : {-0.7, -0.3, 0.25})
        for (double bb : {-0.6, 0.0, 1.5}) {
            QuadOptions loose, tight;
            loose.tol = 1e-7;
            tight.tol = 5e-8;
            auto rl = integrate_segment_singular(f, 0.0, 2.0, ba, bb, loose);
            auto rt = integrate_segment_singular(f, 0.0, 2.0, ba, bb, tight);
            ++total;
            if (std::abs(rl.value - rt.value) <= std::max(rl.err, 1e-15))
                ++ok;
        }
    CHECK(ok >= total - 1);
}

TEST_CASE("finite-part continuation reproduces the Beta continuation",
          "[quadrature]") {
    QuadOptions opt;
    opt.tol = 1e-12;

    // B(-0.5, 1) = -2.
    auto r1 = integrate_segment_continued(one, 0.0, 1.0, -1.5, 0.0, opt);
    CHECK(r1.value == Approx(-2.0).epsilon(1e-10));

    // One divergent endpoint, one merely singular: B(-0.2, 0.4).
    auto r2 = integrate_segment_continued(one, 0.0, 1.0, -1.2, -0.6, opt);
    CHECK(r2.value == Approx(beta_oracle(-0.2, 0.4)).epsilon(1e-10));

    // Both endpoints divergent: B(-0.2, -0.6).
    auto r3 = integrate_segment_continued(one, 0.0, 1.0, -1.2, -1.6, opt);
    CHECK(r3.value == Approx(-3.7501418223357374443).epsilon(1e-9));

    // Interval scaling: int_1^3 (u-1)^{-1.5} du continued = len^{-0.5} B(-0.5,1).
    auto r4 = integrate_segment_continued(one, 1.0, 3.0, -1.5, 0.0, opt);
    CHECK(r4.value == Approx(-2.0 / std::sqrt(2.0)).epsilon(1e-10));

    // Smooth part f = exp(u): frozen from the Beta-series oracle.
    auto fexp = [](auto u, auto, auto) { return std::exp(u); };
    auto r5 = integrate_segment_continued(fexp, 0.0, 1.0, -1.5, -0.25, opt);
    CHECK(r5.value == Approx(1.8083020916616409737).epsilon(1e-9));
    auto r6 = integrate_segment_continued(fexp, 0.0, 1.0, -1.2, -1.6, opt);
    CHECK(r6.value == Approx(-7.8854178264016237742).epsilon(1e-9));
}

TEST_CASE("finite-part value is independent of the circle radius",
          "[quadrature]") {
    auto fexp = [](auto u, auto, auto) { return std::exp(-u); };
    QuadOptions o1, o2;
    o1.tol = o2.tol = 1e-12;
    o1.eps_frac = 1e-3;
    o2.eps_frac = 2e-3;
    auto r1 = integrate_segment_continued(fexp, 0.0, 2.0, -1.4, -0.5, o1);
    auto r2 = integrate_segment_continued(fexp, 0.0, 2.0, -1.4, -0.5, o2);
    CHECK(r1.value == Approx(r2.value).epsilon(1e-10));
}

TEST_CASE("continuation matches direct quadrature where both converge",
          "[quadrature]") {
    // Just above -1 the direct path works; the corrected path must agree.
    auto f = [](auto u, auto, auto) { return std::cos(u); };
    QuadOptions opt;
    opt.tol = 1e-12;
    const double ba = -0.95, bb = -0.3;
    auto direct = integrate_segment_singular(f, 0.0, 1.5, ba, bb, opt);
    auto cont = integrate_segment_continued(f, 0.0, 1.5, ba, bb, opt);
    CHECK(cont.value == Approx(direct.value).epsilon(1e-9));
}

TEST_CASE("elementary Pochhammer: closed form and zeros", "[quadrature]") {
    QuadOptions opt;
    opt.tol = 1e-12;

    // beta_i = beta_j = -1/2 on (0,1): 4 sin^2(-pi/2) * pi = 4 pi.
    auto r = pochhammer_elementary(one, 0.0, 1.0, -0.5, -0.5, opt);
    CHECK(r.value.real() == Approx(4.0 * pi).epsilon(1e-11));
    CHECK(std::abs(r.value.imag()) <= 1e-10);

    // Non-negative integer exponents annihilate the contour.
    auto z1 = pochhammer_elementary(one, 0.0, 1.0, 1.0, 2.0, opt);
    CHECK(std::abs(z1.value) <= 1e-12);
    auto z2 = pochhammer_elementary(one, 0.0, 1.0, 0.0, -0.5, opt);
    CHECK(std::abs(z2.value) <= 1e-12);
}

TEST_CASE("Pochhammer loop branch continues the segment formula",
          "[quadrature]") {
    QuadOptions opt;
    opt.tol = 1e-12;
    // kappa = 3 exponents: beta_i = -4/3 at one end, 12/kappa - 2 = 2 at the
    // other.  The loop-decomposition value divided by the phase-sine factor
    // must equal the Beta continuation B(-1/3, 3) = -5.4 exactly.
    const double bi = -4.0 / 3.0, bj = 2.0;
    auto r = pochhammer_elementary(one, 0.0, 1.0, bi, bj, opt);
    const cdouble phase = 4.0 * std::polar(1.0, pi * (bi - bj)) *
                          std::sin(pi * bi) * std::sin(pi * bj);
    // sin(pi*bj) = 0: the contour value itself must vanish...
    CHECK(std::abs(phase) <= 1e-12);
    // ...so check against the finite-part continuation instead.
    auto cont = integrate_segment_continued(one, 0.0, 1.0, bi, bj, opt);
    CHECK(cont.value == Approx(-5.4).epsilon(1e-9));

    // A generic non-integer pair: loop branch vs closed form scaled by the
    // Beta continuation.
    const double bi2 = -1.25, bj2 = -0.4;
    auto r2 = pochhammer_elementary(one, 0.0, 1.0, bi2, bj2, opt);
    const cdouble phase2 = 4.0 * std::polar(1.0, pi * (bi2 - bj2)) *
                           std::sin(pi * bi2) * std::sin(pi * bj2);
    const cdouble expected = phase2 * beta_oracle(1.0 + bi2, 1.0 + bj2);
    CHECK(std::abs(r2.value - expected) <= 1e-9 * std::abs(expected));
    (void)r;
}

TEST_CASE("kappa-grid continuity of the regularized segment across 4",
          "[quadrature]") {
    // The exponent -4/kappa crosses -1 at kappa = 4; direct and finite-part
    // evaluations must agree just above, and the value must vary smoothly
    // through the switch.
    auto f = [](auto u, auto, auto) { return 1.0 / (u + 2.0); };
    QuadOptions opt;
    opt.tol = 1e-12;
    std::vector<double> grid = {3.6, 3.8, 3.999, 4.001, 4.2, 4.4};
    std::vector<double> vals;
    for (double kappa : grid) {
        const double ba = -4.0 / kappa;
        // The bare integral has a simple pole at kappa = 4 (where ba crosses
        // -1); strip it so the smoothness of the continuation is visible.
        vals.push_back((1.0 + ba) *
                       integrate_segment_continued(f, 0.0, 1.0, ba, 0.25, opt).value);
    }
    // Direct vs continued at 4.001.
    auto direct = integrate_segment_singular(f, 0.0, 1.0, -4.0 / 4.001, 0.25, opt);
    CHECK(vals[3] == Approx((1.0 - 4.0 / 4.001) * direct.value).epsilon(1e-8));
    // Bounded second divided differences across the grid.
    for (size_t i = 0; i + 2 < vals.size(); ++i) {
        const double d1 = (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]);
        const double d2 = (vals[i + 2] - vals[i + 1]) / (grid[i + 2] - grid[i + 1]);
        const double dd = std::abs(d2 - d1) / (grid[i + 2] - grid[i]);
        CHECK(dd <= 50.0 * std::max(1.0, std::abs(vals[i + 1])));
    }
}
