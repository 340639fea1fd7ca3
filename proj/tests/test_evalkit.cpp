#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdt/error.hpp"
#include "tdt/evalkit.hpp"

using namespace tdt;

namespace {

std::vector<Label> to_labels(const std::vector<int>& y) {
    std::vector<Label> out;
    for (int v : y) out.push_back(v ? Label::Machine : Label::Human);
    return out;
}

} // namespace

TEST_CASE("AUROC") {
    const std::vector<int> y = {0, 0, 1, 1};
    CHECK(auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, to_labels(y)) == 1.0);
    CHECK(auroc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, to_labels(y)) == 0.5);
    CHECK_THROWS_AS(auroc(std::vector<double>{0.1, 0.2}, to_labels({1, 1})), DataError);

    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(15);
        std::vector<int> yi(15);
        for (int i = 0; i < 15; ++i) {
            s[i] = static_cast<double>(rng() % 6);
            yi[i] = i % 3 == 0;
        }
        const double a = auroc(s, to_labels(yi));
        CHECK(a == oracle::pairwise_auroc(s, yi));
        std::vector<double> neg(s), mono(s);
        for (int i = 0; i < 15; ++i) {
            neg[i] = -s[i];
            mono[i] = std::exp(0.7 * s[i]) - 3.0;
        }
        CHECK(auroc(neg, to_labels(yi)) == doctest::Approx(1.0 - a).epsilon(1e-15));
        CHECK(auroc(mono, to_labels(yi)) == a);
    }
}

TEST_CASE("TPR at fixed FPR") {
    const std::vector<int> y = {0, 0, 0, 1, 1};
    CHECK(tpr_at_fpr(std::vector<double>{0, 1, 2, 3, 4}, to_labels(y), 0.05) == 1.0);
    CHECK(tpr_at_fpr(std::vector<double>{1, 1, 1, 1, 1}, to_labels(y), 0.05) == 0.0);
    CHECK_THROWS_AS(tpr_at_fpr(std::vector<double>{0, 1, 2, 3, 4}, to_labels(y), 1.5), UsageError);

    std::mt19937_64 rng(2);
    std::normal_distribution<double> tiny(0.0, 1e-3);
    std::vector<double> s;
    std::vector<int> yi;
    for (int i = 0; i < 20; ++i) {
        yi.push_back(0);
        s.push_back(tiny(rng));
    }
    for (int i = 0; i < 10; ++i) {
        yi.push_back(1);
        s.push_back(1.0 + tiny(rng));
    }
    s[3] = 1.0005; // one negative among the positives
    const double got = tpr_at_fpr(s, to_labels(yi), 0.05);
    CHECK(got == oracle::enumerate_tpr_at_fpr(s, yi, 0.05));

    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> r(25);
        std::vector<int> ry(25);
        for (int i = 0; i < 25; ++i) {
            r[i] = static_cast<double>(rng() % 10);
            ry[i] = i % 2;
        }
        double prev = 0.0;
        for (double target : {0.05, 0.1, 0.2, 0.5, 0.9}) {
            const double v = tpr_at_fpr(r, to_labels(ry), target);
            CHECK(v == oracle::enumerate_tpr_at_fpr(r, ry, target));
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("F1") {
    const std::vector<int> y = {1, 0, 1, 0};
    CHECK(f1_score(to_labels(y), to_labels(y)) == 1.0);
    CHECK(f1_score(to_labels({0, 1, 0, 1}), to_labels(y)) == 0.0);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<int> p(10), t(10);
        for (int i = 0; i < 10; ++i) {
            p[i] = static_cast<int>(rng() % 2);
            t[i] = static_cast<int>(rng() % 2);
        }
        CHECK(f1_score(to_labels(p), to_labels(t)) == doctest::Approx(oracle::confusion_f1(p, t)).epsilon(1e-15));
    }
}

TEST_CASE("mutual information") {
    std::mt19937_64 rng(404);
    SUBCASE("independent features") {
        std::vector<FeaturePoint> x;
        std::vector<Label> y;
        for (int i = 0; i < 2000; ++i) {
            x.push_back(oracle::gaussian_vector(rng, 3));
            y.push_back(i % 2 ? Label::Machine : Label::Human);
        }
        const auto mi = mi_knn(x, y);
        CHECK(std::abs(mi.raw_bits) <= 0.03);
        CHECK(mi.bits >= 0.0);
        CHECK(mi.n == 2000);
    }
    SUBCASE("label is the sign of the feature") {
        std::vector<FeaturePoint> x;
        std::vector<Label> y;
        for (int i = 0; i < 2000; ++i) {
            const double v = std::abs(oracle::gaussian_vector(rng, 1)[0]) * (i % 2 ? 1.0 : -1.0);
            x.push_back({v});
            y.push_back(v > 0 ? Label::Machine : Label::Human);
        }
        CHECK(mi_knn(x, y).bits == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("permuted labels carry no information") {
        std::vector<FeaturePoint> x;
        std::vector<Label> y;
        for (int i = 0; i < 1000; ++i) {
            const double v = oracle::gaussian_vector(rng, 1)[0];
            x.push_back({v, v * v});
            y.push_back(v > 0 ? Label::Machine : Label::Human);
        }
        double mean = 0.0;
        for (int p = 0; p < 20; ++p) {
            std::shuffle(y.begin(), y.end(), rng);
            mean += mi_knn(x, y).raw_bits / 20.0;
        }
        CHECK(std::abs(mean) <= 0.03);
    }
    SUBCASE("too few samples per class") {
        std::vector<FeaturePoint> x = {{0.0}, {1.0}, {2.0}, {3.0}, {4.0}};
        CHECK_THROWS_AS(mi_knn(x, to_labels({0, 0, 0, 1, 1})), DataError);
    }
}

TEST_CASE("evaluate bundles the metrics") {
    const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
    const auto y = to_labels({0, 0, 1, 1});
    const auto pred = to_labels({0, 1, 1, 1});
    const auto r = evaluate(s, y, pred);
    CHECK(r.auroc == 0.75);
    CHECK(r.f1 == doctest::Approx(0.8));
    CHECK(r.n_pos == 2);
    CHECK(r.n_neg == 2);
    CHECK(r.tpr_at_fpr == 0.5);
    CHECK(to_json(r)["auroc"] == 0.75);
}

TEST_CASE("threshold path orients scores by the fitted direction") {
    const std::vector<double> dev = {0.9, 0.8, 0.2, 0.1}, test = {0.95, 0.7, 0.3, 0.05};
    const auto dl = to_labels({0, 0, 1, 1}), tl = to_labels({0, 0, 1, 1});
    const auto r = evaluate_threshold_path(dev, dl, test, tl);
    CHECK(r.auroc == 1.0);
    CHECK(r.f1 == 1.0);
}
