#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "portloss/fixtures.hpp"
#include "portloss/jump.hpp"

#include "oracles.hpp"

using namespace portloss;

namespace {

JumpLossLaw table_law(double gamma) {
    return JumpLossLaw(fixtures::unimodal_contract(), fixtures::table_jump(gamma));
}

ContractParams zero_loading_contract() {
    ContractParams p = fixtures::unimodal_contract();
    p.sigma = p.beta = 0.15;
    p.rho = p.theta = 0.4;
    return p;
}

} // namespace

TEST_CASE("conditional default probability with jumps") {
    const JumpLossLaw law = table_law(1.0);
    const DerivedParams& d = law.derived();

    SECTION("at the origin") {
        const double expect = std_normal_cdf(d.Sigma * std_normal_quantile(d.pTilde) / d.zeta);
        CHECK(law.conditional_default_prob(0.0, 0.0) == Approx(expect).epsilon(0).margin(1e-15));
    }
    SECTION("reduces to the continuous conditional probability when idle") {
        const JumpLossLaw idle(fixtures::unimodal_contract(), JumpSpec::exponential(0.0, 1.0));
        const ContinuousLossLaw cont(fixtures::unimodal_contract());
        for (double y : {-2.0, -0.3, 0.0, 1.4})
            CHECK(idle.conditional_default_prob(y, 0.0) ==
                  Approx(cont.conditional_default_prob(y)).epsilon(0).margin(1e-15));
    }
    SECTION("a systemic crash forces default") {
        const double big = 10.0 * d.Sigma * std::sqrt(d.T);
        CHECK(law.conditional_default_prob(0.0, big) > 0.999);
    }
    SECTION("nondecreasing in the jump burden") {
        double prev = 0.0;
        for (double j = 0.0; j <= 2.0; j += 0.05) {
            const double v = law.conditional_default_prob(0.3, j);
            CHECK(v >= prev);
            prev = v;
        }
    }
    CHECK_THROWS_AS(law.conditional_default_prob(0.0, -0.1), validation_error);
}

TEST_CASE("jump-size convolutions") {
    SECTION("single exponential jump") {
        const JumpConvolution c = convolution_density(JumpSpec::exponential(0.02, 1.0), 1);
        REQUIRE(c.kind == JumpConvolution::Kind::GammaDensity);
        for (double u : {0.1, 0.7, 2.5})
            CHECK(c.pdf(u) == Approx(std::exp(-u)).epsilon(0).margin(1e-12));
    }
    SECTION("three-fold exponential is Gamma(3, rate)") {
        const JumpConvolution c = convolution_density(JumpSpec::exponential(0.02, 2.0), 3);
        CHECK(c.pdf(1.0) == Approx(2.0 * std::exp(-2.0) * 4.0 / 2.0).epsilon(0).margin(1e-12));
        const double mass =
            integrate_adaptive([&](double u) { return c.pdf(u); }, 0.0, c.upper_quantile(1e-13), 1e-12);
        CHECK(mass == Approx(1.0).epsilon(0).margin(1e-10));
        CHECK(c.cdf(0.0) == 0.0);
        CHECK(c.cdf(1e9) == 1.0);
    }
    SECTION("constant jumps convolve to an atom") {
        const JumpConvolution c = convolution_density(JumpSpec::constant(0.02, 0.1), 4);
        REQUIRE(c.kind == JumpConvolution::Kind::Atom);
        CHECK(c.atom_at == Approx(0.4).epsilon(0).margin(1e-15));
        CHECK(c.cdf(0.39) == 0.0);
        CHECK(c.cdf(0.4) == 1.0);
        CHECK_THROWS_AS(c.pdf(0.4), validation_error);
    }
    CHECK_THROWS_AS(convolution_density(JumpSpec::none(), 1), validation_error);
    CHECK_THROWS_AS(convolution_density(JumpSpec::exponential(0.02, 1.0), 0), validation_error);
}

TEST_CASE("mixture weights close to unity") {
    const double lt = fixtures::kTableLambda * 1.0;
    const SeriesSpec series{1e-12};
    const int K = poisson_truncation(lt, series);
    const std::vector<double> w = poisson_weights(lt, K);
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(std::abs(1.0 - sum) <= series.tail_bound);
}

TEST_CASE("limiting cdf with jumps") {
    SECTION("idle jump component reduces exactly to the continuous law") {
        const JumpLossLaw idle(fixtures::unimodal_contract(), JumpSpec::exponential(0.0, 1.0));
        const ContinuousLossLaw cont(fixtures::unimodal_contract());
        for (double x = 0.02; x < 1.0; x += 0.02)
            CHECK(idle.limiting_cdf(x) == Approx(cont.limiting_cdf(x)).epsilon(0).margin(1e-12));
    }
    SECTION("vanishing jump sizes converge to the continuous law") {
        const JumpLossLaw tiny = table_law(1e6);
        const ContinuousLossLaw cont(fixtures::unimodal_contract());
        for (double x : {0.1, 0.4, 0.7397, 0.9})
            CHECK(tiny.limiting_cdf(x) == Approx(cont.limiting_cdf(x)).epsilon(0).margin(1e-3));
    }
    SECTION("pinned upper-tail values") {
        CHECK(table_law(1.0).limiting_cdf(0.8001) == Approx(0.975).epsilon(0).margin(3e-3));
    }
    SECTION("strictly increasing on a fine grid") {
        const JumpLossLaw law = table_law(0.2);
        double prev = -1.0;
        for (int i = 1; i < 1000; ++i) {
            const double v = law.limiting_cdf(i / 1000.0);
            CHECK(v > prev);
            prev = v;
        }
    }
    SECTION("oracle cross-check of the mixture integral") {
        // rebuild the gamma=1 CDF at one point from first principles with the
        // test-side Simpson rule
        const JumpLossLaw law = table_law(1.0);
        const DerivedParams& d = law.derived();
        const double x = 0.75;
        const double zx = oracle::std_normal_quantile(x);
        const double zp = oracle::std_normal_quantile(d.pTilde);
        const double lt = 0.02;
        auto H = [&](double u) {
            return (d.zeta * zx - d.Sigma * zp - u) / std::abs(d.Lambda);
        };
        double expect = std::exp(-lt) * oracle::std_normal_cdf(H(0.0));
        double w = std::exp(-lt);
        for (int k = 1; k <= 6; ++k) {
            w *= lt / k;
            const double integral = oracle::simpson(
                [&](double u) {
                    double lg = -u + (k - 1) * std::log(u) - std::lgamma(double(k));
                    return oracle::std_normal_cdf(H(u)) * std::exp(lg);
                },
                1e-9, 60.0, 6000);
            expect += w * integral;
        }
        CHECK(law.limiting_cdf(x) == Approx(expect).epsilon(0).margin(1e-9));
    }
    CHECK_THROWS_AS(table_law(1.0).limiting_cdf(0.0), std::domain_error);
}

TEST_CASE("zero-loading jump mixture is atomic") {
    const JumpLossLaw law(zero_loading_contract(), JumpSpec::exponential(0.5, 2.0));
    const DerivedParams& d = law.derived();
    REQUIRE(law.degenerate());

    const double atom0 = std_normal_cdf(d.Sigma * std_normal_quantile(d.pTilde) / d.zeta);
    const double w0 = std::exp(-0.5 * d.T);

    SECTION("no mass below the no-jump loss, an atom of weight e^{-lambda T} at it") {
        CHECK(law.limiting_cdf(atom0 - 1e-9) == Approx(0.0).epsilon(0).margin(1e-12));
        CHECK(law.limiting_cdf(atom0 + 1e-9) >= w0);
        CHECK(law.limiting_cdf(atom0 + 1e-9) - law.limiting_cdf(atom0 - 1e-9) >=
              w0 * (1.0 - 1e-12));
    }
    SECTION("cdf matches the direct atomic sum and stays a cdf") {
        // near x = 1 the remaining mass is exactly the jump-sum tail above
        // M(x); it vanishes only as x -> 1 beyond double resolution
        const double x = 1.0 - 1e-9;
        const double m =
            std::sqrt(d.T) * (d.zeta * std_normal_quantile(x) - d.Sigma * std_normal_quantile(d.pTilde));
        const int K = poisson_truncation(0.5, SeriesSpec{});
        const std::vector<double> w = poisson_weights(0.5, K);
        double expect = w[0];
        for (int k = 1; k <= K; ++k) expect += w[k] * erlang_cdf(k, 2.0, m);
        CHECK(law.limiting_cdf(x) == Approx(expect).epsilon(0).margin(1e-12));
        CHECK(law.limiting_cdf(x) <= 1.0);

        double prev = -1.0;
        for (double t = 0.05; t < 1.0; t += 0.05) {
            const double v = law.limiting_cdf(t);
            CHECK(v >= prev);
            prev = v;
        }
    }
    SECTION("density and quantile operations are refused") {
        CHECK_THROWS_AS(law.limiting_density(0.5), degenerate_error);
        CHECK_THROWS_AS(law.percentile(0.9), degenerate_error);
        CHECK_THROWS_AS(law.expected_shortfall(0.9), degenerate_error);
    }
}

TEST_CASE("limiting density with jumps") {
    SECTION("normalizes to one for all three table rates") {
        // A single sizable jump parks conditional losses within 1e-13 of 1,
        // where x-space cannot resolve the density; that sliver of mass is
        // accounted for through the CDF tail above the last grid point.
        for (double gamma : {fixtures::kGammaInfProxy, 1.0, 0.2}) {
            const JumpLossLaw law = table_law(gamma);
            const double grid_mass = oracle::simpson(
                [&](double z) {
                    return law.limiting_density(std_normal_cdf(z)) * std_normal_pdf(z);
                },
                -7.0, 7.0, 4000);
            const double tail_mass = 1.0 - law.limiting_cdf(std_normal_cdf(7.0));
            CHECK(grid_mass + tail_mass == Approx(1.0).epsilon(0).margin(1e-5));
        }
    }
    SECTION("idle jump component reduces pointwise to the continuous density") {
        const JumpLossLaw idle(fixtures::unimodal_contract(), JumpSpec::exponential(0.0, 3.0));
        const ContinuousLossLaw cont(fixtures::unimodal_contract());
        for (double x = 0.05; x < 1.0; x += 0.05)
            CHECK(idle.limiting_density(x) ==
                  Approx(cont.limiting_density(x)).epsilon(0).margin(1e-12));
    }
    SECTION("matches the numerical derivative of the cdf") {
        const JumpLossLaw law = table_law(1.0);
        const double h = 1e-6;
        for (double x = 0.1; x <= 0.91; x += 0.1) {
            const double fd = (law.limiting_cdf(x + h) - law.limiting_cdf(x - h)) / (2.0 * h);
            CHECK(law.limiting_density(x) == Approx(fd).epsilon(1e-5));
        }
    }
}

namespace {

int grid_mode_count(const JumpLossLaw& law, bool* interior = nullptr) {
    const int n = 10000;
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        const double z = -7.0 + 14.0 * i / (n - 1.0);
        f[i] = law.limiting_density(std_normal_cdf(z));
    }
    int modes = 0;
    if (interior) *interior = false;
    for (int i = 0; i < n; ++i) {
        const bool up = i == 0 || f[i] > f[i - 1];
        const bool down = i == n - 1 || f[i] > f[i + 1];
        if (up && down) {
            ++modes;
            if (interior && i > 0 && i < n - 1) *interior = true;
        }
    }
    return modes;
}

} // namespace

TEST_CASE("constant jumps can multiply the modes") {
    SECTION("well-separated mixture components show three or more modes") {
        const JumpLossLaw law(fixtures::multimodal_contract(), fixtures::multimodal_jump());
        const DerivedParams& d = law.derived();
        REQUIRE(d.Lambda * d.Lambda < d.zeta * d.zeta);
        CHECK(grid_mode_count(law) >= 3);
    }
    SECTION("with a dominant aggregate loading the mixture stays boundary-bimodal") {
        // Every component density is exp(convex in z) when Lambda^2 > zeta^2,
        // so the sum is convex in z and interior maxima are impossible: the
        // grid sees exactly the two boundary modes.
        ContractParams p = fixtures::unimodal_contract();
        p.beta = 0.0;
        p.rho = 0.95;
        const JumpLossLaw law(p, fixtures::multimodal_jump());
        const DerivedParams& d = law.derived();
        REQUIRE(d.Lambda * d.Lambda > d.zeta * d.zeta);
        bool interior = false;
        CHECK(grid_mode_count(law, &interior) == 2);
        CHECK_FALSE(interior);
    }
}

TEST_CASE("percentiles under jump risk") {
    SECTION("pinned table values") {
        CHECK(100.0 * table_law(1.0).percentile(0.975) == Approx(80.01).epsilon(0).margin(0.3));
        CHECK(100.0 * table_law(0.2).percentile(0.975) == Approx(81.02).epsilon(0).margin(0.3));
        const JumpLossLaw borderline(fixtures::monotone_contract(), fixtures::table_jump(0.2));
        CHECK(100.0 * borderline.percentile(0.975) == Approx(92.84).epsilon(0).margin(0.3));
    }
    SECTION("round trips through the cdf") {
        const JumpLossLaw law = table_law(1.0);
        for (double nu : {0.05, 0.25, 0.5, 0.9, 0.975, 0.99})
            CHECK(law.limiting_cdf(law.percentile(nu)) == Approx(nu).epsilon(0).margin(1e-8));
    }
    SECTION("levels beyond the representable loss range report a bracket error") {
        // with gamma = 1 jumps the 99.99% quantile lies closer to 1 than the
        // clamped bracket endpoint can express
        CHECK_THROWS_AS(table_law(1.0).percentile(0.9999), bracket_error);
    }
    SECTION("idle jump component matches the closed form") {
        const JumpLossLaw idle(fixtures::unimodal_contract(), JumpSpec::exponential(0.0, 1.0));
        const ContinuousLossLaw cont(fixtures::unimodal_contract());
        for (double nu : {0.5, 0.9, 0.975})
            CHECK(idle.percentile(nu) == Approx(cont.percentile(nu)).epsilon(0).margin(1e-9));
    }
    SECTION("raising the intensity at fixed pTilde thickens the upper tail") {
        const DerivedParams d = derive(fixtures::unimodal_contract(), fixtures::table_jump(1.0));
        double prev = 0.0;
        for (double lambda : {0.005, 0.01, 0.02, 0.04}) {
            const JumpLossLaw law(d, JumpSpec::exponential(lambda, 1.0));
            const double q = law.percentile(0.96);
            CHECK(q > prev);
            prev = q;
        }
    }
    SECTION("jump rows dominate the no-jump row high in the tail") {
        const ContinuousLossLaw cont(fixtures::unimodal_contract());
        for (double nu : {0.96, 0.975}) {
            CHECK(table_law(1.0).percentile(nu) > cont.percentile(nu));
            CHECK(table_law(0.2).percentile(nu) > cont.percentile(nu));
        }
    }
}

TEST_CASE("expected shortfall under jump risk") {
    SECTION("pinned table values") {
        CHECK(100.0 * table_law(1.0).expected_shortfall(0.975) ==
              Approx(94.05).epsilon(0).margin(0.5));
        CHECK(100.0 * table_law(0.2).expected_shortfall(0.90) ==
              Approx(72.35).epsilon(0).margin(0.5));
    }
    SECTION("idle jump component matches the continuous shortfall") {
        const JumpLossLaw idle(fixtures::unimodal_contract(), JumpSpec::exponential(0.0, 1.0));
        const ContinuousLossLaw cont(fixtures::unimodal_contract());
        for (double nu : {0.9, 0.975})
            CHECK(idle.expected_shortfall(nu) ==
                  Approx(cont.expected_shortfall(nu)).epsilon(0).margin(1e-6));
    }
    SECTION("dominates the percentile") {
        const JumpLossLaw law = table_law(0.2);
        for (double nu : {0.5, 0.9, 0.975})
            CHECK(law.expected_shortfall(nu) >= law.percentile(nu));
    }
}
