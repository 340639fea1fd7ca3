#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tdt/discrepancy.hpp"

namespace tdt {

// Kernel-smoothed series on a uniform grid spanning token positions [1, n].
struct SmoothedSignal {
    std::vector<double> values;
    double grid_start = 1.0;
    double grid_step = 1.0;
    double bandwidth = 1.0;
    std::size_t source_n = 0;

    std::size_t size() const { return values.size(); }
    double grid_at(std::size_t j) const { return grid_start + grid_step * static_cast<double>(j); }
};

inline constexpr double kBandwidthFallback = 1e-3;

// h = n^(-1/5) * sigma (population sigma); 1e-3 when sigma < 1e-12.
double scott_bandwidth(const DiscrepancySignal& z);

// Nadaraya-Watson smoothing with a Gaussian kernel, evaluated on
// oversample * n uniform points. `bandwidth` overrides Scott's rule.
SmoothedSignal smooth(const DiscrepancySignal& z, std::size_t oversample = 1,
                      std::optional<double> bandwidth = std::nullopt);

} // namespace tdt
