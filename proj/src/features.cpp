#include "tdt/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "tdt/error.hpp"
#include "tdt/kde.hpp"

namespace tdt {

std::string to_string(EnergyMetric metric) {
    switch (metric) {
    case EnergyMetric::Frobenius: return "frobenius";
    case EnergyMetric::L1: return "l1";
    case EnergyMetric::MaxAbs: return "max_abs";
    case EnergyMetric::MeanAbs: return "mean_abs";
    }
    return "frobenius";
}

EnergyMetric parse_energy_metric(const std::string& text) {
    if (text == "frobenius") return EnergyMetric::Frobenius;
    if (text == "l1") return EnergyMetric::L1;
    if (text == "max_abs") return EnergyMetric::MaxAbs;
    if (text == "mean_abs") return EnergyMetric::MeanAbs;
    throw UsageError("unknown energy metric '" + text + "'");
}

std::string to_string(NormalizeMode mode) {
    switch (mode) {
    case NormalizeMode::Auto: return "auto";
    case NormalizeMode::T: return "t";
    case NormalizeMode::Passthrough: return "passthrough";
    }
    return "auto";
}

NormalizeMode parse_normalize_mode(const std::string& text) {
    if (text == "auto") return NormalizeMode::Auto;
    if (text == "t") return NormalizeMode::T;
    if (text == "passthrough") return NormalizeMode::Passthrough;
    throw UsageError("unknown normalization mode '" + text + "'");
}

double band_energy(const Scalogram& scalogram, BandRange band, EnergyMetric metric) {
    if (band.size() == 0 || band.begin >= band.end) throw UsageError("empty scale band");
    if (band.end > scalogram.rows()) throw UsageError("scale band exceeds the scalogram");

    double acc = 0.0;
    for (std::size_t r = band.begin; r < band.end; ++r) {
        for (std::size_t c = 0; c < scalogram.cols(); ++c) {
            const Complex& w = scalogram.at(r, c);
            switch (metric) {
            case EnergyMetric::Frobenius: acc += std::norm(w); break;
            case EnergyMetric::L1:
            case EnergyMetric::MeanAbs: acc += std::abs(w); break;
            case EnergyMetric::MaxAbs: acc = std::max(acc, std::abs(w)); break;
            }
        }
    }
    switch (metric) {
    case EnergyMetric::Frobenius: return std::sqrt(acc);
    case EnergyMetric::MeanAbs: return acc / static_cast<double>(band.size() * scalogram.cols());
    default: return acc;
    }
}

TdtFeatureVector extract(const Scalogram& scalogram, EnergyMetric metric) {
    const ScaleBands bands = scale_band_slices(scalogram.rows());
    TdtFeatureVector out;
    out.morph_energy = band_energy(scalogram, bands.morph, metric);
    out.syn_energy = band_energy(scalogram, bands.syn, metric);
    out.disc_energy = band_energy(scalogram, bands.disc, metric);
    return out;
}

DiscrepancySignal discrepancy_of(const DocumentRecord& record, const PipelineConfig& cfg) {
    NormalizeMode mode = cfg.normalize;
    if (mode == NormalizeMode::Auto) mode = record.z ? NormalizeMode::Passthrough : NormalizeMode::T;
    if (mode == NormalizeMode::Passthrough) {
        if (!record.z) throw DataError("record '" + record.id + "' has no z for passthrough");
        return passthrough(*record.z);
    }
    if (!record.logprobs || !record.sampled_logprob_stats) {
        throw DataError("record '" + record.id + "' lacks logprobs/sampled_logprob_stats for t-normalization");
    }
    return normalize_t(*record.logprobs, *record.sampled_logprob_stats, cfg.normalization);
}

TdtFeatureVector featurize_document(const DocumentRecord& record, const PipelineConfig& cfg) {
    const std::string doc = "document '" + record.id + "'";
    std::optional<DiscrepancySignal> signal;
    try {
        signal.emplace(discrepancy_of(record, cfg));
    } catch (const Error& e) {
        rethrow_in_stage(doc + ": discrepancy", e);
    }
    std::optional<SmoothedSignal> smoothed;
    try {
        smoothed.emplace(smooth(*signal, cfg.oversample, cfg.bandwidth_override));
    } catch (const Error& e) {
        rethrow_in_stage(doc + ": kde", e);
    }
    std::optional<Scalogram> scalogram;
    try {
        scalogram.emplace(transform(*smoothed, cfg.morlet));
    } catch (const Error& e) {
        rethrow_in_stage(doc + ": cwt", e);
    }
    try {
        TdtFeatureVector fv = extract(*scalogram, cfg.energy);
        fv.n_tokens = signal->size();
        return fv;
    } catch (const Error& e) {
        rethrow_in_stage(doc + ": features", e);
    }
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
    out.precision(17);
    out << "id,morph,syn,disc,n_tokens,label\n";
    for (const auto& row : rows) {
        if (row.id.find_first_of(",\"\n") != std::string::npos) {
            throw DataError("record id '" + row.id + "' cannot be written to CSV");
        }
        out << row.id << ',' << row.features.morph_energy << ',' << row.features.syn_energy << ','
            << row.features.disc_energy << ',' << row.features.n_tokens << ',';
        if (row.label) out << static_cast<int>(*row.label);
        out << '\n';
    }
}

std::vector<FeatureRow> read_feature_csv(std::istream& in) {
    std::vector<FeatureRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "id,morph,syn,disc,n_tokens,label") {
                throw DataError("feature CSV line " + std::to_string(line_no) + ": unexpected header");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (cells.size() != 6) {
            throw DataError("feature CSV line " + std::to_string(line_no) + ": expected 6 columns");
        }
        FeatureRow row;
        row.id = cells[0];
        try {
            row.features.morph_energy = std::stod(cells[1]);
            row.features.syn_energy = std::stod(cells[2]);
            row.features.disc_energy = std::stod(cells[3]);
            row.features.n_tokens = std::stoul(cells[4]);
        } catch (const std::exception&) {
            throw DataError("feature CSV line " + std::to_string(line_no) + ": malformed number");
        }
        if (cells[5] == "0") row.label = Label::Human;
        else if (cells[5] == "1") row.label = Label::Machine;
        else if (!cells[5].empty()) throw DataError("feature CSV line " + std::to_string(line_no) + ": bad label");
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw DataError("feature CSV is empty");
    return rows;
}

} // namespace tdt
