#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdt/discrepancy.hpp"
#include "tdt/ingest.hpp"

namespace tdt {

struct WindowStat {
    std::size_t offset = 0;
    double mean = 0.0;
    double variance = 0.0; // sample variance (divisor window - 1)
};

// Windows start every (window - overlap) positions; a trailing partial window is dropped.
std::vector<WindowStat> sliding_windows(const DiscrepancySignal& z, std::size_t window, std::size_t overlap);

struct AdfResult {
    double statistic = 0.0;
    std::size_t lags_used = 0;
    std::size_t max_lags = 0;
    std::size_t nobs = 0;
    double alpha = 0.05;
    double critical_value = 0.0;
    bool reject_unit_root = false;
};

// MacKinnon (2010) approximate critical value, constant-only regression,
// for alpha in {0.01, 0.05, 0.10} and `nobs` regression observations.
double adf_critical_value(double alpha, std::size_t nobs);

// Regression of dy_t on (1, y_{t-1}, dy_{t-1..p}). The lag count is chosen by
// AIC over 0..pmax with pmax = min(floor(12 (T/100)^(1/4)), T/2 - 2).
AdfResult adf_test(std::span<const double> series, double alpha = 0.05);

// |mean(first floor(n/2)) - mean(rest)|
double halves_shift(const DiscrepancySignal& z);

struct DocumentStationarity {
    std::string id;
    Label label = Label::Human;
    std::size_t n = 0;
    AdfResult adf;
    bool is_nonstationary = false;
    double halves_shift = 0.0;
    std::size_t n_windows = 0;
    double window_mean_sd = 0.0;     // spread of window means over time
    double window_variance_sd = 0.0; // spread of window variances over time
};

struct StationarityReport {
    std::vector<DocumentStationarity> documents;
    double frac_nonstationary_ai = 0.0;
    double frac_nonstationary_human = 0.0;
    double mean_shift_ai = 0.0;
    double mean_shift_human = 0.0;
    std::optional<double> shift_ratio_pct; // absent when mean_shift_human == 0
    std::size_t n_ai = 0;
    std::size_t n_human = 0;
};

struct StationarityConfig {
    std::size_t window = 50;
    std::size_t overlap = 25;
    double alpha = 0.05;
};

// Per-document ADF on the raw z series plus class-level aggregates.
// Documents shorter than one window report n_windows = 0.
StationarityReport analyze_corpus(const Corpus& corpus, const StationarityConfig& cfg,
                                  const std::function<DiscrepancySignal(const DocumentRecord&)>& signal_of);

nlohmann::json to_json(const StationarityReport& report);
void write_stationarity_csv(std::ostream& out, const StationarityReport& report);

} // namespace tdt
