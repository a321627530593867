#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "multisle/weights.hpp"

using namespace multisle;
using Catch::Approx;

namespace {

PointConfig random_config(int n_pairs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> gap(0.4, 1.6);
    std::vector<double> x;
    double v = 0.0;
    for (int i = 0; i < 2 * n_pairs; ++i) {
        v += gap(rng);
        x.push_back(v);
    }
    return PointConfig(x);
}

} // namespace

TEST_CASE("two-point weight", "[weights]") {
    CHECK(weight_n1(KappaContext(6.0), PointConfig({0.3, 5.2})).value ==
          Approx(1.0).epsilon(1e-14));
    CHECK(weight_n1(KappaContext(4.0), PointConfig({0.0, 4.0})).value ==
          Approx(0.5).epsilon(1e-14));
    CHECK(weight_n1(KappaContext(3.0), PointConfig({0.0, 1.0})).value ==
          Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rectangle weight reproduces Cardy's formula at kappa=6",
          "[weights]") {
    const KappaContext kc(6.0);
    // x = (0,1,2,3) has lambda = 1/4; frozen high-precision Cardy value.
    const PointConfig cfg({0.0, 1.0, 2.0, 3.0});
    const WeightValue hyp = weight_rect_hyp(kc, 1, cfg);
    CHECK(hyp.value == Approx(0.37354879133423045443).epsilon(1e-12));
    const WeightValue contour = weight_rect(kc, 1, cfg);
    CHECK(contour.value == Approx(hyp.value).epsilon(1e-9));

    // lambda = 1/2 -> crossing probability exactly 1/2.
    const double c = std::sqrt(2.0) - 1.0;
    const PointConfig sym({0.0, 1.0, 1.0 + c, 2.0 + c});
    CHECK(weight_rect_hyp(kc, 1, sym).value == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("contour and hypergeometric paths agree", "[weights]") {
    const PointConfig cfg({0.0, 0.3, 1.0, 2.0});
    for (double kappa : {4.7, 5.5, 6.0, 7.2}) {
        const KappaContext kc(kappa);
        const double a = weight_rect(kc, 1, cfg).value;
        const double b = weight_rect_hyp(kc, 1, cfg).value;
        CHECK(a == Approx(b).epsilon(1e-8));
    }
    // Below the regularization switch the finite-part path takes over.
    for (double kappa : {3.0, 3.6}) {
        const KappaContext kc(kappa);
        const double a = weight_rect(kc, 1, cfg).value;
        const double b = weight_rect_hyp(kc, 1, cfg).value;
        CHECK(a == Approx(b).epsilon(1e-8));
    }
}

TEST_CASE("Cardy complementarity at kappa=6", "[weights]") {
    const KappaContext kc(6.0);
    for (auto pts : {std::vector<double>{0.0, 1.0, 2.0, 3.0},
                     std::vector<double>{0.0, 0.4, 1.1, 3.7}}) {
        const PointConfig cfg(pts);
        const double p1 = weight_rect(kc, 1, cfg).value;
        const double p2 = weight_rect(kc, 2, cfg).value;
        CHECK(p1 + p2 == Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("rotation identities", "[weights]") {
    const KappaContext kc(5.3);
    const PointConfig cfg({0.0, 0.8, 1.9, 3.1});
    const WeightId rect1{2, 1, WeightFamily::rect};
    const QuadOptions opt = default_quad_options(2);

    const double base = weight_rect(kc, 1, cfg).value;
    CHECK(rotate_weight(rect1, 0, kc, cfg, opt).value ==
          Approx(base).epsilon(1e-12));

    // One step gives Pi_2, pinned by the lambda -> 1-lambda closed form.
    const double rot = rotate_weight(rect1, 1, kc, cfg, opt).value;
    const double hyp2 = weight_rect_hyp(kc, 2, cfg).value;
    CHECK(rot == Approx(hyp2).epsilon(1e-8));

    // A full cycle through two half-turns is the identity.
    const auto img = detail::rotate_config(cfg, 2, 0.5);
    const double theta1 = theta_s(1, kc.kappa);
    const double half = std::exp(theta1 * img.log_jacobian_sum) *
                        rotate_weight(rect1, 2, kc, img.cfg, opt).value;
    CHECK(half == Approx(base).epsilon(1e-8));
}

TEST_CASE("hexagon weights: rainbow identity and reductions", "[weights]") {
    const KappaContext kc(6.0);
    const PointConfig cfg({0.0, 1.0, 2.2, 3.1, 4.4, 5.6});
    // sigma = 2 is the N = 3 rainbow: the chain formula must match the I_45
    // assembly.
    const double direct = weight_hex(kc, 2, cfg).value;
    const double chain = weight_rainbow(kc, 0, cfg).value;
    CHECK(chain == Approx(direct).epsilon(1e-6));
    // All five weights evaluate finite and positive here.
    for (int s = 1; s <= 5; ++s) {
        const double v = weight_hex(kc, s, cfg).value;
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
    }
}

TEST_CASE("rainbow reproduces the rectangle weight at N=2", "[weights]") {
    for (double kappa : {4.6, 6.0, 7.0}) {
        const KappaContext kc(kappa);
        const PointConfig cfg({0.0, 0.9, 2.0, 3.4});
        const double rect = weight_rect_hyp(kc, 1, cfg).value;
        const double rb = weight_rainbow(kc, 0, cfg).value;
        CHECK(rb == Approx(rect).epsilon(1e-6));
    }
    // And below the regularization switch.
    const KappaContext kc(3.5);
    const PointConfig cfg({0.0, 0.9, 2.0, 3.4});
    CHECK(weight_rainbow(kc, 0, cfg).value ==
          Approx(weight_rect_hyp(kc, 1, cfg).value).epsilon(1e-6));
}

TEST_CASE("rainbow reduction term structure", "[weights]") {
    const double kappa = 5.7;
    const double n = fugacity(kappa);
    // N = 3: the insertions cancel, leaving the bare chain.
    const auto t3 = rainbow_reduction_terms(3, kappa);
    REQUIRE(t3.size() == 1);
    CHECK(t3[0].counts == std::vector<int>{1, 1});
    CHECK(t3[0].coeff == Approx(1.0).epsilon(1e-12));
    // N = 4: main chain plus the doubled-segment term with coefficient -n.
    const auto t4 = rainbow_reduction_terms(4, kappa);
    REQUIRE(t4.size() == 2);
    for (const auto& t : t4) {
        if (t.counts == std::vector<int>{1, 1, 1})
            CHECK(t.coeff == Approx(1.0).epsilon(1e-12));
        else {
            CHECK(t.counts == std::vector<int>{1, 2, 0});
            CHECK(t.coeff == Approx(-n).epsilon(1e-10));
        }
    }
}

TEST_CASE("rainbow reproduces the octagon Pi_3 weight at N=4", "[weights]") {
    const KappaContext kc(6.0);
    const PointConfig cfg({0.0, 1.0, 2.1, 3.3, 4.2, 5.0, 6.1, 7.4});
    QuadOptions opt = default_quad_options(4);
    const double oct3 = weight_oct(kc, 3, cfg, opt).value;
    const double rb = weight_rainbow(kc, 0, cfg, opt).value;
    CHECK(rb == Approx(oct3).epsilon(1e-5));
}

TEST_CASE("rainbow chain matches hexagon Pi_2 below kappa=4", "[weights]") {
    const KappaContext kc(3.8);
    const PointConfig cfg({0.0, 1.0, 2.2, 3.1, 4.4, 5.6});
    QuadOptions opt = default_quad_options(3);
    const double direct = weight_hex(kc, 2, cfg, opt).value;
    const double chain = weight_rainbow(kc, 0, cfg, opt).value;
    CHECK(chain == Approx(direct).epsilon(1e-5));
}

TEST_CASE("translation and scaling covariance", "[weights]") {
    std::mt19937_64 rng(42);
    for (double kappa : {4.5, 6.0}) {
        const KappaContext kc(kappa);
        // Rectangle.
        {
            const PointConfig cfg = random_config(2, rng);
            std::vector<double> shifted = cfg.x, scaled = cfg.x;
            for (double& v : shifted) v += 3.7;
            for (double& v : scaled) v *= 2.3;
            const double w0 = weight_rect(kc, 1, cfg).value;
            const double wt = weight_rect(kc, 1, PointConfig(shifted)).value;
            const double ws = weight_rect(kc, 1, PointConfig(scaled)).value;
            CHECK(wt == Approx(w0).epsilon(1e-9));
            const double expo = 2.0 * (kappa - 6.0) / kappa;
            CHECK(ws == Approx(std::pow(2.3, expo) * w0).epsilon(1e-9));
        }
        // Hexagon (both base families).
        {
            const PointConfig cfg = random_config(3, rng);
            std::vector<double> shifted = cfg.x, scaled = cfg.x;
            for (double& v : shifted) v -= 1.4;
            for (double& v : scaled) v *= 0.6;
            for (int s : {1, 2}) {
                const double w0 = weight_hex(kc, s, cfg).value;
                const double wt =
                    weight_hex(kc, s, PointConfig(shifted)).value;
                const double ws = weight_hex(kc, s, PointConfig(scaled)).value;
                CHECK(wt == Approx(w0).epsilon(1e-9));
                const double expo = 3.0 * (kappa - 6.0) / kappa;
                CHECK(ws == Approx(std::pow(0.6, expo) * w0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("removable singularities are crossed smoothly", "[weights]") {
    // Hexagon Pi_1 prefactor has 1/(n^2-2), singular at kappa = 16/3.
    const PointConfig cfg({0.0, 1.0, 2.2, 3.1, 4.4, 5.6});
    const double km = 16.0 / 3.0 - 1e-3, kp = 16.0 / 3.0 + 1e-3;
    const double wm = weight_hex(KappaContext(km), 1, cfg).value;
    const double wp = weight_hex(KappaContext(kp), 1, cfg).value;
    CHECK(std::abs(wp - wm) / std::abs(wm) <= 1e-3);
    // At kappa = 16/3 itself the averaging policy engages.
    const WeightValue at = weight_hex(KappaContext(16.0 / 3.0), 1, cfg);
    CHECK(at.policy == KappaPolicy::averaged_near_singular);
    CHECK(at.value == Approx(0.5 * (wm + wp)).epsilon(1e-6));
}

TEST_CASE("crossing probabilities", "[weights]") {
    const KappaContext kc(6.0);
    const PointConfig cfg({0.0, 0.7, 1.9, 3.0});
    // One-hot coefficients pick out that connectivity almost surely.
    const auto onehot = crossing_probabilities({1.0, 0.0}, kc, cfg);
    CHECK(onehot[0] == Approx(1.0).margin(1e-12));
    CHECK(onehot[1] == Approx(0.0).margin(1e-12));
    // F = 1 decomposition at kappa = 6: P_s = Pi_s.
    const auto p = crossing_probabilities({1.0, 1.0}, kc, cfg);
    CHECK(p[0] + p[1] == Approx(1.0).margin(1e-12));
    CHECK(p[0] == Approx(weight_rect(kc, 1, cfg).value).epsilon(1e-7));
    CHECK_THROWS_AS(crossing_probabilities({0.0, 0.0}, kc, cfg),
                    std::domain_error);
}

TEST_CASE("positivity spot checks (reported, non-fatal)", "[weights]") {
    std::mt19937_64 rng(7);
    int violations = 0;
    for (double kappa : {3.0, 4.0, 5.0, 6.0, 7.0}) {
        const KappaContext kc(kappa);
        const PointConfig cfg = random_config(2, rng);
        for (int s : {1, 2})
            if (!(weight_rect(kc, s, cfg).value > 0.0))
                ++violations;
    }
    if (violations > 0)
        WARN("positivity violations observed: " << violations);
    SUCCEED();
}
