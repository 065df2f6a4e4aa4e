#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "loewner/analysis.hpp"
#include "loewner/mminus.hpp"
#include "loewner/shear.hpp"
#include "test_support.hpp"

using namespace loewner;
using namespace loewner::testing;

namespace {

SamplingConfig fast_config() {
    SamplingConfig cfg;
    cfg.random_samples = 20000;
    return cfg;
}

}  // namespace

TEST_CASE("coefficient functional reads the z2^2 slot of the first component") {
    const auto phi = shear_series(Complex{1.25, -0.5});
    CHECK(functional_L102(phi) == Complex{1.25, -0.5});
    CHECK(functional_L102(PowerSeriesMap2::identity(4)) == Complex{0.0});
    CHECK_THROWS_AS(functional_L102(make_map(4, {{0, 0, 0.5}}, {{0, 1, 1.0}})),
                    std::invalid_argument);
}

TEST_CASE("coefficient functional is linear") {
    std::mt19937_64 rng(83);
    const auto f = random_origin_fixed(rng, 6, 5);
    const auto g = random_origin_fixed(rng, 6, 5);
    CHECK(functional_L102(add(f, g)) == functional_L102(f) + functional_L102(g));
    const Complex c{0.75, 0.25};
    CHECK(functional_L102(scale(c, f)) == c * functional_L102(f));
}

TEST_CASE("coefficient functional transforms covariantly under torus rotations") {
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
        const double alpha = u(rng), beta = u(rng);
        const Complex ea = std::polar(1.0, alpha), eb = std::polar(1.0, beta);
        const auto f = random_origin_fixed(rng, 6, 6);
        const auto D = make_map(6, {{1, 0, ea}}, {{0, 1, eb}});
        const auto Dinv = make_map(6, {{1, 0, std::conj(ea)}}, {{0, 1, std::conj(eb)}});
        const auto conjugated = compose(Dinv, compose(f, D));
        const Complex expect = std::conj(ea) * eb * eb * functional_L102(f);
        CHECK(std::abs(functional_L102(conjugated) - expect) <= 1e-12);
        CHECK(std::abs(std::abs(functional_L102(conjugated)) -
                       std::abs(functional_L102(f))) <= 1e-12);
    }
}

TEST_CASE("starlike defect closed form for shear maps") {
    // For f = (z1 + a z2^2, z2): (df)^{-1} f = (z1 - a z2^2, z2), so the
    // margin is |z1|^2 + |z2|^2 - Re(a z2^2 conj(z1)).
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 15; ++trial) {
        const Complex a = random_complex(rng, 3.0);
        const auto f = shear_series(a);
        const Point2 z = random_ball_point(rng, 0.95);
        const double closed =
            z.norm_sq() - (a * z.z2 * z.z2 * std::conj(z.z1)).real();
        CHECK(std::abs(starlike_defect(f, z) - closed) <= 1e-13);
    }
}

TEST_CASE("starlike defect validates its inputs") {
    const auto f = shear_series(1.0);
    CHECK_THROWS_AS(starlike_defect(f, Point2{0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(starlike_defect(f, Point2{1.0, 0.0}), std::invalid_argument);

    // Singular Jacobian raises the dedicated error carrying the point.
    const auto g = make_map(4, {{1, 0, 1.0}, {2, 0, 1.0}}, {{0, 1, 1.0}});
    try {
        starlike_defect(g, Point2{-0.5, 0.1});
        CHECK(false);
    } catch (const singular_jacobian_error& e) {
        CHECK(e.at().z1 == Complex{-0.5});
    }
}

TEST_CASE("real-positive slices of the extremal map keep the predicted margin") {
    const auto phi = shear_series(kExtremalShearCoefficient);
    for (double r : {0.2, 0.5, 0.9, 0.99, 0.999}) {
        double min_margin = 1e9;
        for (int i = 0; i <= 200; ++i) {
            const double x = r * i / 200.0;
            // max() guards the i == 200 endpoint, where x can round a hair above r
            const double y = std::sqrt(std::max(0.0, r * r - x * x));
            min_margin = std::min(min_margin, starlike_defect(phi, {x, y}));
        }
        CHECK(min_margin >= r * r * (1.0 - r) - 1e-10);
    }
}

TEST_CASE("starlike check accepts the extremal map and rejects a = 3") {
    const SamplingConfig cfg = fast_config();
    const StarlikeReport ok = check_starlike(shear_series(kExtremalShearCoefficient), cfg);
    CHECK(ok.accepted);
    CHECK(ok.min_margin >= -cfg.defect_tolerance);

    const StarlikeReport bad = check_starlike(shear_series(3.0), cfg);
    CHECK_FALSE(bad.accepted);
    CHECK(bad.min_margin < -0.1);
    CHECK(bad.witness.inside_ball());
    // The witness reproduces a genuine violation when re-evaluated.
    CHECK(starlike_defect(shear_series(3.0), bad.witness) == bad.min_margin);
}

TEST_CASE("starlike check requires an identity linear part") {
    CHECK_THROWS_AS(check_starlike(shear_field_series(1.0), fast_config()),
                    std::invalid_argument);
}

TEST_CASE("starlikeness of shears is dual to field membership") {
    const SamplingConfig cfg = fast_config();
    for (double a : {0.0, 1.0, 2.59}) {
        CAPTURE(a);
        CHECK(check_starlike(shear_series(a), cfg).accepted);
        CHECK(shear_membership_threshold(a));
    }
    for (double a : {2.61, 3.0}) {
        CAPTURE(a);
        CHECK_FALSE(check_starlike(shear_series(a), cfg).accepted);
        CHECK_FALSE(shear_membership_threshold(a));
    }
}

TEST_CASE("minimum starlike margin decreases in the shear coefficient") {
    const SamplingConfig cfg = fast_config();
    double prev = 1e9;
    for (double a : {0.0, 1.0, 2.0, 2.59, 2.61, 3.0}) {
        CAPTURE(a);
        const double m = check_starlike(shear_series(a), cfg).min_margin;
        CHECK(m <= prev + 1e-6);
        prev = m;
    }
}

TEST_CASE("growth screening separates the extremal map from a fast-growing shear") {
    const SamplingConfig cfg = fast_config();
    const MembershipReport ok = growth_check(shear_series(kExtremalShearCoefficient), cfg);
    CHECK(ok.accepted);
    CHECK(ok.max_defect <= cfg.defect_tolerance);

    const double big = 2.0 * std::sqrt(15.0);
    const MembershipReport bad = growth_check(shear_series(big), cfg);
    CHECK_FALSE(bad.accepted);
    CHECK(bad.max_defect > 0.1);
    // Witness exceeds the envelope when re-evaluated by hand.
    const Point2 w = bad.witness;
    const Point2 img = eval(shear_series(big), w);
    const double r = w.norm();
    CHECK(std::sqrt(img.norm_sq()) - r / ((1.0 - r) * (1.0 - r)) == bad.max_defect);

    CHECK_THROWS_AS(growth_check(shear_field_series(1.0), cfg), std::invalid_argument);
}

TEST_CASE("end-to-end reproduction accepts the defaults") {
    const ReproductionReport rep = reproduce_extremal_bound(fast_config());
    CHECK(rep.sharpness_ok);
    CHECK(rep.mminus_ok);
    CHECK(rep.starlike_ok);
    CHECK(rep.chain_ok);
    CHECK(rep.envelope_ok);
    CHECK_FALSE(rep.low_confidence);
    CHECK(rep.all_ok());
    CHECK(std::abs(rep.bound.bound - 2.598076211353316) <= 1e-9);
    CHECK(std::abs(rep.functional_at_candidate - Complex{kExtremalShearCoefficient}) == 0.0);
    CHECK(rep.chain_recovery_error <= 1e-7);
    CHECK(rep.envelope_limit_error <= 1e-7);

    const std::string text = render_text(rep);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("overall") != std::string::npos);
    CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("tiny sampling budgets are flagged low confidence") {
    SamplingConfig cfg;
    cfg.grid_radii = 1;
    cfg.grid_angles = 1;
    cfg.random_samples = 9;
    const ReproductionReport rep = reproduce_extremal_bound(cfg);
    CHECK(rep.low_confidence);
    CHECK(rep.field_membership.samples_used == 10);
    CHECK(rep.starlikeness.samples_used == 10);
    const std::string text = render_text(rep);
    CHECK(text.find("low confidence") != std::string::npos);
}

TEST_CASE("an off-extremal candidate fails sharpness and membership") {
    const ReproductionReport rep =
        reproduce_extremal_bound(fast_config(), shear_series(2.7));
    CHECK_FALSE(rep.sharpness_ok);
    CHECK_FALSE(rep.mminus_ok);
    CHECK_FALSE(rep.starlike_ok);
    CHECK_FALSE(rep.all_ok());
    // The chain integration itself still reproduces the candidate it was fed.
    CHECK(rep.chain_ok);
    const std::string text = render_text(rep);
    CHECK(text.find("FAIL") != std::string::npos);
}
