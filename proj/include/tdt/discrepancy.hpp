#pragma once

#include <span>
#include <vector>

#include "tdt/ingest.hpp"

namespace tdt {

// Token-indexed discrepancy series z_1..z_n (position i is token i).
class DiscrepancySignal {
public:
    // Throws DataError when empty or when any value is non-finite.
    explicit DiscrepancySignal(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

struct NormalizationConfig {
    double nu = 5.0;            // t degrees of freedom, must exceed 2
    double epsilon_var = 1e-8;  // variance floor
};

// z_i = (l_i - mu_i) / sqrt(max(var_i, eps) * nu / (nu - 2))
DiscrepancySignal normalize_t(std::span<const double> logprobs,
                              std::span<const LogprobStat> stats,
                              const NormalizationConfig& cfg = {});

DiscrepancySignal passthrough(std::span<const double> z);

enum class ScalarMode { Mean, Sum };

// Baseline collapse of the whole series to a single number.
double scalar_score(const DiscrepancySignal& signal, ScalarMode mode = ScalarMode::Mean);

} // namespace tdt
