#include "tdt/stationarity.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "tdt/error.hpp"

namespace tdt {

using nlohmann::json;

namespace {

double population_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / n);
}

} // namespace

std::vector<WindowStat> sliding_windows(const DiscrepancySignal& z, std::size_t window, std::size_t overlap) {
    if (window < 2) throw UsageError("sliding_windows: window must be >= 2");
    if (overlap >= window) throw UsageError("sliding_windows: overlap must be smaller than the window");
    if (z.size() < window) {
        throw DataError("sliding_windows: signal of length " + std::to_string(z.size()) +
                        " is shorter than one window of " + std::to_string(window));
    }
    const std::size_t stride = window - overlap;
    const auto v = z.values();
    std::vector<WindowStat> out;
    for (std::size_t off = 0; off + window <= v.size(); off += stride) {
        double m = 0.0;
        for (std::size_t i = off; i < off + window; ++i) m += v[i];
        m /= static_cast<double>(window);
        double ss = 0.0;
        for (std::size_t i = off; i < off + window; ++i) ss += (v[i] - m) * (v[i] - m);
        out.push_back({off, m, ss / static_cast<double>(window - 1)});
    }
    return out;
}

double halves_shift(const DiscrepancySignal& z) {
    const std::size_t n = z.size();
    if (n < 2) throw DataError("halves_shift: need at least 2 values");
    const std::size_t half = n / 2;
    const auto v = z.values();
    const double first = std::accumulate(v.begin(), v.begin() + half, 0.0) / static_cast<double>(half);
    const double second = std::accumulate(v.begin() + half, v.end(), 0.0) / static_cast<double>(n - half);
    return std::abs(first - second);
}

StationarityReport analyze_corpus(const Corpus& corpus, const StationarityConfig& cfg,
                                  const std::function<DiscrepancySignal(const DocumentRecord&)>& signal_of) {
    StationarityReport report;
    double shift_ai = 0.0, shift_human = 0.0;
    std::size_t ns_ai = 0, ns_human = 0;

    for (const auto& rec : corpus.records) {
        if (!rec.label) throw DataError("stationarity analysis needs labels; record '" + rec.id + "' has none");
        const DiscrepancySignal z = signal_of(rec);

        DocumentStationarity doc;
        doc.id = rec.id;
        doc.label = *rec.label;
        doc.n = z.size();
        try {
            doc.adf = adf_test(z.values(), cfg.alpha);
            doc.halves_shift = halves_shift(z);
        } catch (const Error& e) {
            rethrow_in_stage("document '" + rec.id + "'", e);
        }
        doc.is_nonstationary = !doc.adf.reject_unit_root;
        if (z.size() >= cfg.window) {
            const auto windows = sliding_windows(z, cfg.window, cfg.overlap);
            std::vector<double> means, vars;
            for (const auto& w : windows) {
                means.push_back(w.mean);
                vars.push_back(w.variance);
            }
            doc.n_windows = windows.size();
            doc.window_mean_sd = population_sd(means);
            doc.window_variance_sd = population_sd(vars);
        } else if (cfg.window < 2 || cfg.overlap >= cfg.window) {
            throw UsageError("invalid window/overlap");
        }

        if (doc.label == Label::Machine) {
            ++report.n_ai;
            ns_ai += doc.is_nonstationary;
            shift_ai += doc.halves_shift;
        } else {
            ++report.n_human;
            ns_human += doc.is_nonstationary;
            shift_human += doc.halves_shift;
        }
        report.documents.push_back(std::move(doc));
    }
    if (report.n_ai == 0 || report.n_human == 0) {
        throw DataError("stationarity analysis needs both human and machine documents");
    }
    report.frac_nonstationary_ai = static_cast<double>(ns_ai) / static_cast<double>(report.n_ai);
    report.frac_nonstationary_human = static_cast<double>(ns_human) / static_cast<double>(report.n_human);
    report.mean_shift_ai = shift_ai / static_cast<double>(report.n_ai);
    report.mean_shift_human = shift_human / static_cast<double>(report.n_human);
    if (report.mean_shift_human > 0.0) {
        report.shift_ratio_pct = 100.0 * (report.mean_shift_ai - report.mean_shift_human) / report.mean_shift_human;
    }
    return report;
}

json to_json(const StationarityReport& report) {
    json j;
    j["n_ai"] = report.n_ai;
    j["n_human"] = report.n_human;
    j["frac_nonstationary_ai"] = report.frac_nonstationary_ai;
    j["frac_nonstationary_human"] = report.frac_nonstationary_human;
    j["mean_shift_ai"] = report.mean_shift_ai;
    j["mean_shift_human"] = report.mean_shift_human;
    j["shift_ratio_pct"] = report.shift_ratio_pct ? json(*report.shift_ratio_pct) : json(nullptr);
    return j;
}

void write_stationarity_csv(std::ostream& out, const StationarityReport& report) {
    out.precision(17);
    out << "id,label,n,adf_statistic,adf_lags,adf_critical,is_nonstationary,halves_shift,n_windows,"
           "window_mean_sd,window_variance_sd\n";
    for (const auto& d : report.documents) {
        out << d.id << ',' << static_cast<int>(d.label) << ',' << d.n << ',' << d.adf.statistic << ','
            << d.adf.lags_used << ',' << d.adf.critical_value << ',' << (d.is_nonstationary ? 1 : 0) << ','
            << d.halves_shift << ',' << d.n_windows << ',' << d.window_mean_sd << ',' << d.window_variance_sd
            << '\n';
    }
}

} // namespace tdt
