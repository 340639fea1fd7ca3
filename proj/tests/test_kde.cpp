#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdt/kde.hpp"

using namespace tdt;

namespace {

double population_sd(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<double> grid_of(const SmoothedSignal& s) {
    std::vector<double> g;
    for (std::size_t j = 0; j < s.size(); ++j) g.push_back(s.grid_at(j));
    return g;
}

} // namespace

TEST_CASE("Scott bandwidth") {
    CHECK(scott_bandwidth(passthrough(std::vector<double>{0.7})) == kBandwidthFallback);
    CHECK(scott_bandwidth(passthrough(std::vector<double>{5, 5, 5, 5})) == kBandwidthFallback);
    CHECK(scott_bandwidth(passthrough(std::vector<double>{-1, 1})) == doctest::Approx(std::pow(2.0, -0.2)));

    std::mt19937_64 rng(3);
    const auto v = oracle::gaussian_vector(rng, 32, 2.0);
    CHECK(std::pow(32.0, -0.2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(scott_bandwidth(passthrough(v)) == doctest::Approx(0.5 * population_sd(v)).epsilon(1e-13));
}

TEST_CASE("constant signal stays constant") {
    const auto s = smooth(passthrough(std::vector<double>(17, 2.5)), 3);
    CHECK(s.size() == 51);
    for (double v : s.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("single token") {
    const auto s = smooth(passthrough(std::vector<double>{-0.8}), 4);
    REQUIRE(s.size() >= 1);
    for (double v : s.values) CHECK(v == -0.8);
}

TEST_CASE("grid spans the token positions") {
    const auto s = smooth(passthrough(std::vector<double>{1, 2, 3, 4, 5}), 3);
    CHECK(s.size() == 15);
    CHECK(s.grid_at(0) == 1.0);
    CHECK(s.grid_at(14) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(s.source_n == 5);
    CHECK_THROWS(smooth(passthrough(std::vector<double>{1, 2}), 0));
}

TEST_CASE("matches the brute-force double loop") {
    std::mt19937_64 rng(50);
    for (std::size_t oversample : {1, 2, 3}) {
        const auto z = oracle::gaussian_vector(rng, 50);
        const auto s = smooth(passthrough(z), oversample);
        const auto ref = oracle::brute_kde(z, grid_of(s), s.bandwidth);
        for (std::size_t j = 0; j < ref.size(); ++j) CHECK(std::abs(s.values[j] - ref[j]) < 1e-12);
    }
}

TEST_CASE("bandwidth override") {
    const std::vector<double> z = {0, 0, 0, 10, 0, 0, 0};
    const auto narrow = smooth(passthrough(z), 1, 0.1);
    const auto wide = smooth(passthrough(z), 1, 5.0);
    CHECK(narrow.bandwidth == 0.1);
    CHECK(narrow.values[3] == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(wide.values[3] < 5.0);
}

TEST_CASE("range containment, linearity and reversal symmetry") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        const auto x = oracle::gaussian_vector(rng, n);
        const auto y = oracle::gaussian_vector(rng, n);
        const double h = 0.3 + static_cast<double>(rng() % 100) / 40.0;
        const auto sx = smooth(passthrough(x), 2, h);
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        for (double v : sx.values) {
            CHECK(v >= *lo - 1e-12);
            CHECK(v <= *hi + 1e-12);
        }

        std::vector<double> comb(n), rev(x.rbegin(), x.rend());
        for (std::size_t i = 0; i < n; ++i) comb[i] = 2.0 * x[i] - 0.5 * y[i];
        const auto sy = smooth(passthrough(y), 2, h);
        const auto sc = smooth(passthrough(comb), 2, h);
        const auto sr = smooth(passthrough(rev), 2, h);
        for (std::size_t j = 0; j < sc.size(); ++j) {
            CHECK(std::abs(sc.values[j] - (2.0 * sx.values[j] - 0.5 * sy.values[j])) < 1e-10);
            CHECK(std::abs(sr.values[j] - sx.values[sx.size() - 1 - j]) < 1e-10);
        }
    }
}
