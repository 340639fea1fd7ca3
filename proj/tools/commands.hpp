#pragma once

#include <string>

#include <json.hpp>

#include "run_config.hpp"

namespace tdt::app {

void cmd_synth(const RunConfig& cfg);
void cmd_featurize(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_detect(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_stationarity(const RunConfig& cfg);
void cmd_ablate(const RunConfig& cfg);

struct BenchReport {
    std::size_t n_docs = 0;
    std::size_t doc_length = 0;
    std::size_t samples_per_path = 0;
    double scalar_median_ms = 0.0;
    double tdt_median_ms = 0.0;
    double overhead_pct = 0.0;
    std::size_t flagged_scalar = 0;
    std::size_t flagged_tdt = 0;
};

BenchReport run_bench(const RunConfig& cfg);
void cmd_bench(const RunConfig& cfg);

nlohmann::json to_json(const BenchReport& report);

} // namespace tdt::app
