#include "tdt/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdt/error.hpp"

namespace tdt {

namespace {

// exp(-x^2/2) is exactly zero in double precision beyond this many bandwidths.
constexpr double kKernelCutoff = 39.0;

} // namespace

double scott_bandwidth(const DiscrepancySignal& z) {
    const auto v = z.values();
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sigma = std::sqrt(ss / n);
    if (sigma < 1e-12) return kBandwidthFallback;
    return std::pow(n, -0.2) * sigma;
}

SmoothedSignal smooth(const DiscrepancySignal& z, std::size_t oversample, std::optional<double> bandwidth) {
    if (oversample == 0) throw UsageError("oversample must be >= 1");
    const double h = bandwidth ? *bandwidth : scott_bandwidth(z);
    if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("bandwidth must be a finite value > 0");

    const auto v = z.values();
    const std::size_t n = v.size();

    SmoothedSignal out;
    out.bandwidth = h;
    out.source_n = n;
    out.grid_start = 1.0;
    if (n == 1) {
        out.grid_step = 1.0;
        out.values.assign(1, v[0]);
        return out;
    }

    const std::size_t m = oversample * n;
    out.grid_step = static_cast<double>(n - 1) / static_cast<double>(m - 1);
    out.values.resize(m);

    const double radius = kKernelCutoff * h;
    if (oversample == 1) {
        // Grid coincides with token positions: offsets are integers.
        const std::size_t reach = static_cast<std::size_t>(std::min(radius, static_cast<double>(n)));
        std::vector<double> weight(reach + 1);
        for (std::size_t k = 0; k <= reach; ++k) {
            const double u = static_cast<double>(k) / h;
            weight[k] = std::exp(-0.5 * u * u);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t lo = j > reach ? j - reach : 0;
            const std::size_t hi = std::min(n - 1, j + reach);
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = lo; i <= hi; ++i) {
                const double w = weight[i > j ? i - j : j - i];
                num += w * v[i];
                den += w;
            }
            out.values[j] = num / den;
        }
        return out;
    }

    for (std::size_t j = 0; j < m; ++j) {
        const double t = out.grid_at(j);
        // Distance to the nearest token position; weights are rescaled by it
        // so that a tiny bandwidth cannot underflow the denominator.
        const double nearest = std::clamp(std::round(t), 1.0, static_cast<double>(n));
        const double dmin = std::abs(t - nearest);
        const double span = dmin + radius;
        const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(t - span)));
        const auto hi = static_cast<std::size_t>(std::min(static_cast<double>(n), std::floor(t + span)));
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            const double u = (t - static_cast<double>(i)) / h;
            const double u0 = dmin / h;
            const double w = std::exp(-0.5 * (u * u - u0 * u0));
            num += w * v[i - 1];
            den += w;
        }
        out.values[j] = num / den;
    }
    return out;
}

} // namespace tdt
