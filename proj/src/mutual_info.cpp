#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "tdt/error.hpp"
#include "tdt/evalkit.hpp"

namespace tdt {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// psi(n) = -gamma + H_{n-1} for n = 1..size-1.
std::vector<double> digamma_table(std::size_t size) {
    std::vector<double> psi(size, 0.0);
    if (size > 1) psi[1] = -kEulerGamma;
    for (std::size_t n = 2; n < size; ++n) psi[n] = psi[n - 1] + 1.0 / static_cast<double>(n - 1);
    return psi;
}

} // namespace

MiEstimate mi_knn(std::span<const FeaturePoint> features, std::span<const Label> labels, std::size_t k) {
    const std::size_t n = features.size();
    if (labels.size() != n) throw DataError("mi_knn: features and labels differ in length");
    if (k < 1) throw UsageError("mi_knn: k must be >= 1");
    if (n <= k) throw DataError("mi_knn: need more than k samples");
    const std::size_t n_pos = static_cast<std::size_t>(std::ranges::count(labels, Label::Machine));
    if (n_pos == 0 || n_pos == n) throw DataError("mi_knn: both classes must be present");
    if (n_pos <= k || n - n_pos <= k) throw DataError("mi_knn: each class needs more than k samples");

    const Standardizer scaler = Standardizer::fit(features);
    std::vector<FeaturePoint> x;
    x.reserve(n);
    for (const auto& p : features) x.push_back(scaler.apply(p));

    const auto psi = digamma_table(n + 1);
    std::vector<double> dist(n);
    std::vector<std::size_t> same;
    double sum_psi_class = 0.0;
    double sum_psi_m = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        same.clear();
        for (std::size_t j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < x[i].size(); ++c) d2 += (x[i][c] - x[j][c]) * (x[i][c] - x[j][c]);
            dist[j] = std::sqrt(d2);
            if (j != i && labels[j] == labels[i]) same.push_back(j);
        }
        // Neighbors ordered by (distance, index).
        auto closer = [&](std::size_t a, std::size_t b) {
            return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
        };
        std::nth_element(same.begin(), same.begin() + static_cast<std::ptrdiff_t>(k - 1), same.end(), closer);
        const std::size_t kth = same[k - 1];

        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && !closer(kth, j)) ++m;
        }
        const std::size_t class_count = labels[i] == Label::Machine ? n_pos : n - n_pos;
        sum_psi_class += psi[class_count];
        sum_psi_m += psi[m];
    }

    const double nn = static_cast<double>(n);
    const double nats = psi[n] - sum_psi_class / nn + psi[k] - sum_psi_m / nn;
    MiEstimate est;
    est.raw_bits = nats / std::numbers::ln2;
    est.bits = std::max(0.0, est.raw_bits);
    est.k = k;
    est.n = n;
    return est;
}

} // namespace tdt
