#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tdt/cwt.hpp"
#include "tdt/discrepancy.hpp"
#include "tdt/ingest.hpp"

namespace tdt {

// Energies of the fine (morph), medium (syn) and coarse (disc) scale bands.
struct TdtFeatureVector {
    double morph_energy = 0.0;
    double syn_energy = 0.0;
    double disc_energy = 0.0;
    std::size_t n_tokens = 0;

    std::array<double, 3> as_array() const { return {morph_energy, syn_energy, disc_energy}; }
    bool operator==(const TdtFeatureVector&) const = default;
};

enum class EnergyMetric { Frobenius, L1, MaxAbs, MeanAbs };

std::string to_string(EnergyMetric metric);
EnergyMetric parse_energy_metric(const std::string& text);

double band_energy(const Scalogram& scalogram, BandRange band, EnergyMetric metric = EnergyMetric::Frobenius);

TdtFeatureVector extract(const Scalogram& scalogram, EnergyMetric metric = EnergyMetric::Frobenius);

enum class NormalizeMode { Auto, T, Passthrough };

std::string to_string(NormalizeMode mode);
NormalizeMode parse_normalize_mode(const std::string& text);

struct PipelineConfig {
    // Auto uses z when the record has it, otherwise t-normalization.
    NormalizeMode normalize = NormalizeMode::Auto;
    NormalizationConfig normalization;
    std::size_t oversample = 1;
    std::optional<double> bandwidth_override;
    MorletConfig morlet;
    EnergyMetric energy = EnergyMetric::Frobenius;
};

DiscrepancySignal discrepancy_of(const DocumentRecord& record, const PipelineConfig& cfg);

// normalize -> smooth -> transform -> extract. Errors name the failing stage.
TdtFeatureVector featurize_document(const DocumentRecord& record, const PipelineConfig& cfg);

struct FeatureRow {
    std::string id;
    TdtFeatureVector features;
    std::optional<Label> label;
};

// Header: id,morph,syn,disc,n_tokens,label. Lines starting with '#' are comments.
void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(std::istream& in);

} // namespace tdt
