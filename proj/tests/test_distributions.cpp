#include <cmath>
#include <vector>

#include "doctest.h"

#include "cvtag/distributions.hpp"
#include "cvtag/errors.hpp"
#include "cvtag/rng.hpp"
#include "oracles.hpp"

using cvtag::Distribution;
using cvtag::RngStream;

namespace {

std::vector<double> draw(const Distribution& d, std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> out(n);
    for (double& x : out)
        x = d.sample(rng);
    return out;
}

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

} // namespace

TEST_SUITE("distributions") {

TEST_CASE("construction rejects invalid parameters") {
    CHECK_THROWS_AS(Distribution::gaussian(0.0, -1e-12), cvtag::config_error);
    CHECK_THROWS_AS(Distribution::uniform(1.0, 1.0), cvtag::config_error);
    CHECK_THROWS_AS(Distribution::uniform(2.0, 1.0), cvtag::config_error);
    CHECK_THROWS_AS(Distribution::gaussian(std::nan(""), 1.0), cvtag::config_error);
    CHECK_THROWS_AS(Distribution::degenerate(std::numeric_limits<double>::infinity()),
                    cvtag::config_error);
    CHECK_NOTHROW(Distribution::gaussian(1.0, 0.0)); // point mass is allowed
}

TEST_CASE("closed-form moments") {
    const Distribution g = Distribution::gaussian(std::sqrt(0.6), 0.0015);
    CHECK(g.mean() == std::sqrt(0.6));
    CHECK(g.variance() == 0.0015);

    const Distribution d = Distribution::degenerate(-2.5);
    CHECK(d.mean() == -2.5);
    CHECK(d.variance() == 0.0);

    const Distribution u = Distribution::uniform(0.0, 2.0);
    CHECK(u.mean() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(u.variance() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(u.second_moment() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

    // algebraic identity, exactly as computed
    for (const Distribution& dist : {g, d, u})
        CHECK(dist.second_moment() == dist.mean() * dist.mean() + dist.variance());
}

TEST_CASE("cdf fixed points") {
    const Distribution g = Distribution::gaussian(1.0, 0.0025);
    CHECK(g.cdf(1.0) == 0.5); // z = 0 is exact through erfc(0)
    CHECK(g.cdf(1.05) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(std::abs(g.cdf(1.05) - 0.841345) < 1e-6);

    const Distribution d = Distribution::degenerate(0.0);
    CHECK(d.cdf(0.5) == 1.0);
    CHECK(d.cdf(0.0) == 1.0); // right-continuous at the atom
    CHECK(d.cdf(-1e-300) == 0.0);

    const Distribution flat = Distribution::gaussian(1.0, 0.0); // variance-0 Gaussian
    CHECK(flat.cdf(0.999) == 0.0);
    CHECK(flat.cdf(1.0) == 1.0);

    const Distribution u = Distribution::uniform(-1.0, 3.0);
    CHECK(u.cdf(-1.0) == 0.0);
    CHECK(u.cdf(3.0) == 1.0);
    CHECK(u.cdf(0.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cdf limits and monotonicity") {
    const Distribution kinds[] = {Distribution::gaussian(0.3, 2.0),
                                  Distribution::uniform(-2.0, 5.0),
                                  Distribution::degenerate(0.7)};
    for (const Distribution& d : kinds) {
        CHECK(d.cdf(-1e300) == 0.0);
        CHECK(d.cdf(1e300) == 1.0);
        double prev = -1.0;
        for (int i = -60; i <= 60; ++i) {
            const double f = d.cdf(0.25 * i);
            CHECK(f >= prev);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            prev = f;
        }
    }
}

TEST_CASE("pdf integrates to cdf differences") {
    const Distribution g = Distribution::gaussian(0.4, 0.81);
    const Distribution u = Distribution::uniform(-1.0, 2.0);
    struct Bracket {
        double a, b;
    };
    for (const Distribution& d : {g, u}) {
        for (const Bracket br : {Bracket{-0.5, 0.5}, Bracket{-0.9, 1.9}, Bracket{0.1, 3.0}}) {
            const double byquad =
                oracles::adaptive_simpson([&](double x) { return d.pdf(x); }, br.a, br.b, 1e-13);
            CHECK(byquad == doctest::Approx(d.cdf(br.b) - d.cdf(br.a)).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(Distribution::degenerate(1.0).pdf(1.0), cvtag::config_error);
    CHECK_THROWS_AS(Distribution::gaussian(1.0, 0.0).pdf(1.0), cvtag::config_error);
}

TEST_CASE("sampling moments") {
    RngStream rng(99);
    const Distribution point = Distribution::degenerate(3.0);
    for (int i = 0; i < 10; ++i)
        CHECK(point.sample(rng) == 3.0);

    const std::size_t n = 1000000;
    const auto gs = draw(Distribution::gaussian(0.0, 1.0), n, 1234);
    CHECK(std::abs(sample_mean(gs)) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(sample_variance(gs) == doctest::Approx(1.0).epsilon(0.01));

    const auto us = draw(Distribution::uniform(0.0, 1.0), n, 5678);
    CHECK(std::abs(sample_variance(us) - 1.0 / 12.0) < 5e-4);
}

TEST_CASE("empirical cdf agrees with analytic cdf (KS)") {
    const std::size_t n = 1000000;
    const Distribution g = Distribution::gaussian(0.5, 4.0);
    const double ks_g =
        oracles::ks_statistic(draw(g, n, 2024), [&](double x) { return g.cdf(x); });
    CHECK(ks_g < 0.002);

    const Distribution u = Distribution::uniform(-3.0, 1.0);
    const double ks_u =
        oracles::ks_statistic(draw(u, n, 2025), [&](double x) { return u.cdf(x); });
    CHECK(ks_u < 0.002);
}

TEST_CASE("mass outside the unit interval") {
    CHECK(Distribution::degenerate(0.5).mass_outside_unit() == 0.0);
    CHECK(Distribution::degenerate(1.5).mass_outside_unit() == 1.0);
    CHECK(Distribution::uniform(-0.5, 0.5).mass_outside_unit() == 0.0);
    CHECK(Distribution::uniform(0.0, 2.0).mass_outside_unit() ==
          doctest::Approx(0.5).epsilon(1e-15));
    // Gaussian(1, v): exactly half the mass sits above 1
    CHECK(Distribution::gaussian(1.0, 0.0025).mass_outside_unit() ==
          doctest::Approx(0.5).epsilon(1e-12));
    // tightly confined detector gain: far tails only
    CHECK(Distribution::gaussian(std::sqrt(0.6), 0.0015).mass_outside_unit() < 1e-6);
}

TEST_CASE("sampling is reproducible per seed") {
    const Distribution g = Distribution::gaussian(0.0, 1.0);
    const auto a = draw(g, 64, 7);
    const auto b = draw(g, 64, 7);
    const auto c = draw(g, 64, 8);
    CHECK(a == b);
    CHECK(a != c);
}

} // TEST_SUITE
