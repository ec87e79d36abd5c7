#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "postsel/engine.hpp"
#include "postsel/explicit_wigner.hpp"
#include "postsel/fock_oracle.hpp"
#include "postsel/wigner.hpp"
#include "support.hpp"

using namespace postsel;
constexpr double pi = std::numbers::pi;

namespace {

const ModelParams strong{1.3, 1.0, 0.5, 0.0};

std::vector<complex> random_points(int count, double radius, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-radius, radius);
    std::vector<complex> pts;
    while (static_cast<int>(pts.size()) < count) {
        const complex a(u(rng), u(rng));
        if (std::abs(a) <= radius) pts.push_back(a);
    }
    return pts;
}

} // namespace

TEST(GaussianPrefactor, Examples) {
    const auto c = derive_coeffs_scaled(strong, pi / 2);
    EXPECT_NEAR(gaussian_prefactor(c, 0.0), 2.0 / (pi * std::sqrt(c.Theta)), 1e-15);
    for (const auto a : random_points(20, 3.0, 1)) {
        EXPECT_EQ(gaussian_prefactor(c, a), gaussian_prefactor(c, -a));
    }
    // Omega = 0: vacuum Wigner function
    const auto b = derive_coeffs_scaled(strong, 0.0);
    for (const auto a : random_points(20, 3.0, 2)) {
        EXPECT_NEAR(gaussian_prefactor(b, a), 2.0 / pi * std::exp(-2.0 * std::norm(a)), 1e-15);
    }
}

TEST(GaussianPrefactor, RejectsNonPositiveTheta) {
    auto c = derive_coeffs_scaled(strong, pi / 2);
    c.Theta = 0.0;
    EXPECT_THROW((void)gaussian_prefactor(c, 0.5), std::domain_error);
}

TEST(Wigner, VacuumOutcomeIsPositiveGaussian) {
    testing_support::Lattice lat;
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = lat.draw();
        const auto ps = make_post_state(0, c);
        const WignerEvaluator w(ps);
        for (const auto a : random_points(50, 4.0, 10 + trial)) {
            EXPECT_GT(w(a), 0.0);
            EXPECT_NEAR(w(a), gaussian_prefactor(c, a) / ps.norm_i0, 1e-15);
        }
    }
}

TEST(Wigner, MatchesHandExpandedLowOrders) {
    testing_support::Lattice lat;
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = lat.draw();
        for (int n = 0; n <= 3; ++n) {
            const WignerEvaluator w(make_post_state(n, c));
            for (const auto a : random_points(50, 3.0, 100 + trial)) {
                const double ref = explicit_wigner(n, c, a);
                EXPECT_LE(std::fabs(w(a) - ref), 1e-10 * std::fabs(ref) + 1e-300) << "n=" << n << " a=" << a;
            }
        }
    }
}

TEST(Wigner, MatchesOracle) {
    testing_support::Lattice lat;
    for (int trial = 0; trial < 6; ++trial) {
        const auto c = lat.draw();
        const auto& p = c.params;
        const auto st = oracle::evolve_scaled(oracle::build_initial(p, oracle::default_n_max(p.r, 8)), p, c.tau_scaled);
        for (int n = 0; n <= 8; ++n) {
            const WignerEvaluator w(make_post_state(n, c));
            const auto v = oracle::normalized(oracle::project_b(st, n));
            for (const auto a : random_points(40, 4.0, 200 + trial)) {
                EXPECT_NEAR(w(a), oracle::fock_wigner(v, a), 1e-8) << "n=" << n << " a=" << a;
            }
        }
    }
}

TEST(Wigner, BoundaryIsFockWigner) {
    const auto b = derive_coeffs_scaled(strong, 0.0);
    EXPECT_NEAR(wigner_eval(make_post_state(0, b), 0.0), 2.0 / pi, 1e-15);
    EXPECT_NEAR(wigner_eval(make_post_state(1, b), 0.0), -2.0 / pi, 1e-15);
    for (const auto a : random_points(20, 3.0, 3)) {
        const double x = 4.0 * std::norm(a);
        // |2>: (2/pi) e^{-x/2} L_2(x), L_2(x) = 1 - 2x + x^2/2
        EXPECT_NEAR(wigner_eval(make_post_state(2, b), a), 2.0 / pi * std::exp(-x / 2) * (1 - 2 * x + x * x / 2),
                    1e-14);
    }
}

TEST(Wigner, ParityExactToRounding) {
    const auto c = derive_coeffs_scaled(strong, pi / 2);
    for (int n = 0; n <= 8; ++n) {
        const WignerEvaluator w(make_post_state(n, c));
        for (const auto a : random_points(1000, 4.0, 4)) {
            const double v = w(a);
            EXPECT_NEAR(w(-a), v, 4e-15 * std::max(1.0, std::fabs(v)));
        }
    }
}

TEST(Wigner, OddOutcomeOnNullOmegaLocusIsDegenerate) {
    const auto s = derive_coeffs_scaled({1.0, 1.0, 0.5, 0.0}, pi / 2);
    ASSERT_TRUE(s.small_omega);
    EXPECT_THROW(WignerEvaluator(make_post_state(3, s)), DegenerateState);
    // exactly on the locus odd outcomes have zero probability
    Engine on({1.0, 1.0, 0.5, 0.0}, pi / 2);
    EXPECT_THROW((void)on.wigner(3), DegenerateState);
    // just off it the oracle answers
    Engine e({1.0, 1.0, 0.5, 0.0}, pi / 2 + 3e-3);
    ASSERT_TRUE(e.coeffs().small_omega);
    EXPECT_EQ(e.route(3), Source::oracle);
    auto w = e.wigner(3);
    EXPECT_EQ(w.source, Source::oracle);
    EXPECT_TRUE(std::isfinite(w.value(0.3)));
    EXPECT_NEAR(w.value(0.3), w.value(-0.3), 1e-13);
}

TEST(WignerGrid, VacuumPeakAtOrigin) {
    const auto b = derive_coeffs_scaled(strong, 0.0);
    const auto g = wigner_grid(make_post_state(0, b), {-3, 3, -3, 3}, 61, 61);
    double best = -1.0;
    int bx = -1;
    int by = -1;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            if (g.at(ix, iy) > best) {
                best = g.at(ix, iy);
                bx = ix;
                by = iy;
            }
        }
    }
    EXPECT_EQ(bx, 30);
    EXPECT_EQ(by, 30);
    EXPECT_NEAR(best, 2.0 / pi, 1e-15);
}

TEST(WignerGrid, PointSymmetricAndNormalized) {
    const auto c = derive_coeffs_scaled(strong, pi / 2);
    for (int n : {0, 5, 6}) {
        const auto g = wigner_grid(make_post_state(n, c), {-7, 7, -7, 7}, 281, 281);
        for (int iy = 0; iy < g.ny; ++iy) {
            for (int ix = 0; ix < g.nx; ++ix) {
                const double v = g.at(ix, iy);
                EXPECT_NEAR(g.at(g.nx - 1 - ix, g.ny - 1 - iy), v, 4e-15 * std::max(1.0, std::fabs(v)));
            }
        }
        const double adaptive = wigner_normalization_of(WignerEvaluator(make_post_state(n, c)), c, n, 1e-6);
        EXPECT_NEAR(grid_integral(g), adaptive, 1e-3) << n;
        EXPECT_NEAR(grid_integral(g), 1.0, 1e-3) << n;
    }
}

TEST(WignerGrid, CsvRoundTripIsBitExact) {
    const auto c = derive_coeffs_scaled(strong, 0.8);
    auto g = wigner_grid(make_post_state(5, c), {-2.5, 3.0, -1.0, 4.0}, 17, 9);
    std::stringstream ss;
    write_grid_csv(ss, g);
    const std::string first = ss.str().substr(0, ss.str().find('\n'));
    EXPECT_EQ(first, "# re_min re_max im_min im_max nx ny");
    const auto back = read_grid_csv(ss);
    EXPECT_EQ(back.nx, g.nx);
    EXPECT_EQ(back.ny, g.ny);
    EXPECT_EQ(back.re_min, g.re_min);
    EXPECT_EQ(back.im_max, g.im_max);
    ASSERT_EQ(back.values.size(), g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) EXPECT_EQ(back.values[i], g.values[i]);
}

TEST(WignerGrid, CsvRowCountAndFormat) {
    const auto b = derive_coeffs_scaled(strong, 0.0);
    const auto g = wigner_grid(make_post_state(1, b), {-1, 1, -1, 1}, 4, 3);
    std::stringstream ss;
    write_grid_csv(ss, g);
    int rows = 0;
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line[0] != '#') {
            ++rows;
            EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
        }
    }
    EXPECT_EQ(rows, 12);
    EXPECT_EQ(detail::format_double(0.1), "0.10000000000000001");
}

TEST(Negativity, ReferenceValues) {
    const auto c = derive_coeffs_scaled(strong, pi / 2);
    const double expect[] = {0.4261, 0.0033, 0.4261, 0.0113};
    for (int n = 5; n <= 8; ++n) {
        const auto r = negativity(make_post_state(n, c), 1e-4);
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.delta_w, expect[n - 5], 2e-3) << n;
        EXPECT_NEAR(r.integral, 1.0, 1e-4) << n;
        EXPECT_NEAR(r.negative_volume, r.delta_w / 2, 1e-15);
        EXPECT_NEAR(r.delta_w, r.abs_integral - 1.0, 1e-15);
    }
}

TEST(Negativity, GaussianStatesHaveNone) {
    testing_support::Lattice lat;
    for (int trial = 0; trial < 3; ++trial) {
        const auto r = negativity(make_post_state(0, lat.draw()), 1e-4);
        EXPECT_LE(std::fabs(r.delta_w), r.est_error);
    }
    // even n on the omega = 0 locus reduces to a squeezed vacuum
    const auto s = derive_coeffs_scaled({1.0, 1.0, 0.5, 0.0}, pi / 2);
    for (int n : {2, 4, 6}) {
        const auto r = negativity(make_post_state(n, s), 1e-4);
        EXPECT_LE(std::fabs(r.delta_w), r.est_error) << n;
    }
}

TEST(Negativity, FockStatesAndEngineRoutes) {
    Engine e(strong, 0.0);
    const auto r = e.negativity(1, {});
    EXPECT_EQ(r.source, Source::boundary_limit);
    // |1>: int|W| = 4/sqrt(e) - 1
    EXPECT_NEAR(r.value.delta_w, 4.0 / std::sqrt(std::exp(1.0)) - 2.0, 2e-4);
    EXPECT_THROW((void)negativity(make_post_state(5, derive_coeffs_scaled(strong, 1.0)), 1e-8), std::domain_error);
}

TEST(Negativity, PanelBudgetExhaustionCarriesEstimate) {
    const auto c = derive_coeffs_scaled(strong, pi / 2);
    NegativityOptions opt;
    opt.max_panels = 16;
    try {
        (void)negativity_of(WignerEvaluator(make_post_state(5, c)), c, 5, opt);
        FAIL() << "expected QuadratureFailure";
    } catch (const QuadratureFailure& e) {
        EXPECT_FALSE(e.best_estimate.converged);
        EXPECT_GT(e.best_estimate.abs_integral, 1.0);
    }
    opt.throw_on_failure = false;
    EXPECT_FALSE(negativity_of(WignerEvaluator(make_post_state(5, c)), c, 5, opt).converged);
}

TEST(Negativity, NonNegativeAcrossTimes) {
    for (double jt : {0.3, 1.0, 2.0, 2.9}) {
        const auto c = derive_coeffs_scaled(strong, jt);
        for (int n = 1; n <= 4; ++n) {
            const auto r = negativity(make_post_state(n, c), 1e-4);
            EXPECT_GE(r.delta_w, -r.est_error) << jt << ' ' << n;
        }
    }
}

TEST(HsDistance, OppositeParityIsMaximal) {
    for (double jt : {0.4, pi / 2, 2.5}) {
        const auto c = derive_coeffs_scaled(strong, jt);
        const auto h = hs_distance(make_post_state(6, c), make_post_state(7, c));
        EXPECT_NEAR(h.distance, std::sqrt(2.0), 1e-6) << jt;
        EXPECT_EQ(hs_distance(make_post_state(4, c), make_post_state(4, c)).distance, 0.0);
    }
}

TEST(HsDistance, ParityOrbitSeparation) {
    Engine e(strong, pi / 2);
    EXPECT_LT(e.hs_distance(5, 7), 0.2);
    EXPECT_LT(e.hs_distance(6, 8), 0.2);
    EXPECT_LT(e.hs_distance(0, 6), 0.5);
    EXPECT_NEAR(e.hs_distance(6, 7), std::sqrt(2.0), 1e-6);
    EXPECT_EQ(e.hs_distance(3, 3), 0.0);
}

TEST(HsDistance, PhaseSpaceRouteAgrees) {
    const auto c = derive_coeffs_scaled(strong, 1.2);
    HsOptions opt;
    opt.verify = true;
    for (int a = 0; a <= 4; ++a) {
        for (int b = a + 1; b <= 4; ++b) {
            const auto h = hs_distance(make_post_state(a, c), make_post_state(b, c), opt);
            ASSERT_TRUE(h.phase_space.has_value());
            EXPECT_NEAR(*h.phase_space, h.distance, 1e-4) << a << ' ' << b;
        }
    }
}

TEST(HsDistance, RejectsMismatchedStates) {
    const auto c1 = derive_coeffs_scaled(strong, 1.0);
    const auto c2 = derive_coeffs_scaled(strong, 1.5);
    EXPECT_THROW((void)hs_distance(make_post_state(1, c1), make_post_state(2, c2)), std::invalid_argument);
}
