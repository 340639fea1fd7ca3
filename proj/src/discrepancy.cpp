#include "tdt/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tdt/error.hpp"

namespace tdt {

DiscrepancySignal::DiscrepancySignal(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DataError("discrepancy signal is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DataError("discrepancy signal has a non-finite value at position " + std::to_string(i + 1));
        }
    }
}

DiscrepancySignal normalize_t(std::span<const double> logprobs,
                              std::span<const LogprobStat> stats,
                              const NormalizationConfig& cfg) {
    if (!(cfg.nu > 2.0) || !std::isfinite(cfg.nu)) throw UsageError("nu must be a finite value > 2");
    if (!(cfg.epsilon_var > 0.0)) throw UsageError("epsilon_var must be > 0");
    if (logprobs.size() != stats.size()) {
        throw DataError("normalize_t: logprobs has " + std::to_string(logprobs.size()) +
                        " entries but stats has " + std::to_string(stats.size()));
    }
    if (logprobs.empty()) throw DataError("normalize_t: empty input");

    const double correction = cfg.nu / (cfg.nu - 2.0);
    std::vector<double> z(logprobs.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double l = logprobs[i];
        const auto [mu, var] = stats[i];
        if (!std::isfinite(l) || !std::isfinite(mu) || !std::isfinite(var)) {
            throw DataError("normalize_t: non-finite input at position " + std::to_string(i + 1));
        }
        if (var < 0.0) throw DataError("normalize_t: negative variance at position " + std::to_string(i + 1));
        z[i] = (l - mu) / std::sqrt(std::max(var, cfg.epsilon_var) * correction);
    }
    return DiscrepancySignal(std::move(z));
}

DiscrepancySignal passthrough(std::span<const double> z) {
    return DiscrepancySignal(std::vector<double>(z.begin(), z.end()));
}

double scalar_score(const DiscrepancySignal& signal, ScalarMode mode) {
    const auto v = signal.values();
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    return mode == ScalarMode::Sum ? sum : sum / static_cast<double>(v.size());
}

} // namespace tdt
