#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "tdt/discrepancy.hpp"
#include "tdt/error.hpp"

using namespace tdt;

TEST_CASE("centered input gives zeros") {
    const std::vector<double> lp = {-1.0, -2.5, -0.3};
    const std::vector<LogprobStat> st = {{-1.0, 0.4}, {-2.5, 2.0}, {-0.3, 0.1}};
    const auto z = normalize_t(lp, st);
    for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("single token hand value") {
    const std::vector<double> lp = {1.0};
    const std::vector<LogprobStat> st = {{0.0, 1.0}};
    CHECK(normalize_t(lp, st)[0] == doctest::Approx(0.7745966692414834).epsilon(1e-15));
}

TEST_CASE("zero variance uses the floor") {
    const std::vector<double> lp = {-1.0};
    const std::vector<LogprobStat> st = {{-2.0, 0.0}};
    const double z = normalize_t(lp, st)[0];
    CHECK(std::isfinite(z));
    CHECK(z == doctest::Approx(1.0 / std::sqrt(1e-8 * 5.0 / 3.0)));
}

TEST_CASE("normalization validates inputs") {
    const std::vector<double> lp = {-1.0, -2.0};
    const std::vector<LogprobStat> one = {{0.0, 1.0}};
    CHECK_THROWS_AS(normalize_t(lp, one), DataError);
    const std::vector<LogprobStat> two = {{0.0, 1.0}, {0.0, 1.0}};
    CHECK_THROWS(normalize_t(lp, two, NormalizationConfig{2.0, 1e-8}));
}

TEST_CASE("location equivariance and scale homogeneity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5, 0), v(0.1, 3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> lp(9), lp_shift(9);
        std::vector<LogprobStat> st(9), st_shift(9), st_scaled(9);
        std::vector<double> lp_scaled(9);
        const double c = u(rng), k = v(rng);
        for (int i = 0; i < 9; ++i) {
            lp[i] = u(rng);
            st[i] = {u(rng), v(rng)};
            lp_shift[i] = lp[i] + c;
            st_shift[i] = {st[i].mean + c, st[i].variance};
            lp_scaled[i] = k * lp[i];
            st_scaled[i] = {k * st[i].mean, k * k * st[i].variance};
        }
        const auto a = normalize_t(lp, st), b = normalize_t(lp_shift, st_shift), s = normalize_t(lp_scaled, st_scaled);
        for (int i = 0; i < 9; ++i) {
            CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
            CHECK(s[i] == doctest::Approx(a[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("passthrough") {
    const std::vector<double> v = {0.1, 0.2};
    const auto s = passthrough(v);
    CHECK(s.size() == 2);
    CHECK(s[0] == 0.1);
    CHECK(s[1] == 0.2);
    CHECK_THROWS_AS(passthrough(std::vector<double>{}), DataError);
    CHECK_THROWS_AS(passthrough(std::vector<double>{std::nan("")}), DataError);
    CHECK_THROWS_AS(passthrough(std::vector<double>{std::numeric_limits<double>::infinity()}), DataError);
}

TEST_CASE("scalar score") {
    CHECK(scalar_score(passthrough(std::vector<double>{1, 1, 1, 1}), ScalarMode::Mean) == 1.0);
    CHECK(scalar_score(passthrough(std::vector<double>{1, -1}), ScalarMode::Sum) == 0.0);
    const std::vector<double> v = {0.3, -1.7, 2.25, 0.125, -0.5, 4.0, -3.3};
    double sum = 0.0;
    for (double x : v) sum += x;
    CHECK(scalar_score(passthrough(v), ScalarMode::Sum) == doctest::Approx(sum).epsilon(1e-15));
    CHECK(scalar_score(passthrough(v), ScalarMode::Mean) == doctest::Approx(sum / 7.0).epsilon(1e-15));
}
