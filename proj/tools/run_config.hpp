#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "tdt/classifier.hpp"
#include "tdt/features.hpp"
#include "tdt/stationarity.hpp"
#include "tdt/synthbench.hpp"

namespace tdt::app {

inline constexpr const char* kToolName = "tdt";
inline constexpr const char* kToolVersion = "0.1.0";

// Every knob of every subcommand. Config files use the long flag names
// (with '-' replaced by '_') as keys.
struct RunConfig {
    std::string subcommand;

    std::string input;
    std::string model;
    std::string output;
    std::string json_output;
    std::string features;
    std::string dataset;

    std::size_t max_tokens = kDefaultMaxTokens;

    std::string normalize = "auto";
    double nu = 5.0;
    double epsilon_var = 1e-8;
    std::size_t oversample = 1;
    std::optional<double> bandwidth_override;
    double omega0 = 6.0;
    std::size_t scales = 12;
    double truncation_radius = 4.0;
    std::string energy = "frobenius";

    double C = 1.0;
    std::string gamma = "scale";
    double svm_tolerance = 1e-3;
    std::uint64_t seed = 0;

    std::size_t window = 50;
    std::size_t overlap = 25;
    double alpha = 0.05;
    double fpr_target = 0.05;
    std::size_t mi_k = 3;

    std::string kind = "insertion-vs-human";
    std::size_t n_docs = 100;
    std::size_t doc_length = 512;
    double shift_magnitude = 1.5;
    double shift_location = 0.5;
    double noise_sigma = 1.0;
    double span_fraction = 0.2;

    std::size_t bench_docs = 100;
    std::size_t bench_repeats = 5;
    std::string bench_format = "scored";

    // Not part of the provenance record: outputs never depend on it.
    std::size_t jobs = 1;

    PipelineConfig pipeline() const;
    SvmParams svm_params() const;
    StationarityConfig stationarity() const;
    SynthConfig synth() const;
};

// Provenance form: all knobs except output paths and jobs.
nlohmann::json to_json(const RunConfig& cfg);

// Overlays keys from a config file; unknown keys are usage errors.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
void load_config_file(RunConfig& cfg, const std::string& path);

} // namespace tdt::app
