#include "run_config.hpp"

#include <fstream>
#include <set>

#include "tdt/error.hpp"

namespace tdt::app {

using nlohmann::json;

namespace {

// Calls v(key, member) for every persisted field.
template <typename Visitor>
void visit_fields(RunConfig& c, Visitor&& v) {
    v("subcommand", c.subcommand);
    v("input", c.input);
    v("model", c.model);
    v("features", c.features);
    v("dataset", c.dataset);
    v("max_tokens", c.max_tokens);
    v("normalize", c.normalize);
    v("nu", c.nu);
    v("epsilon_var", c.epsilon_var);
    v("oversample", c.oversample);
    v("bandwidth_override", c.bandwidth_override);
    v("omega0", c.omega0);
    v("scales", c.scales);
    v("truncation_radius", c.truncation_radius);
    v("energy", c.energy);
    v("C", c.C);
    v("gamma", c.gamma);
    v("svm_tolerance", c.svm_tolerance);
    v("seed", c.seed);
    v("window", c.window);
    v("overlap", c.overlap);
    v("alpha", c.alpha);
    v("fpr_target", c.fpr_target);
    v("mi_k", c.mi_k);
    v("kind", c.kind);
    v("n_docs", c.n_docs);
    v("doc_length", c.doc_length);
    v("shift_magnitude", c.shift_magnitude);
    v("shift_location", c.shift_location);
    v("noise_sigma", c.noise_sigma);
    v("span_fraction", c.span_fraction);
    v("bench_docs", c.bench_docs);
    v("bench_repeats", c.bench_repeats);
    v("bench_format", c.bench_format);
}

// Keys accepted in config files but excluded from provenance.
const std::set<std::string> kTransientKeys = {"output", "json_output", "jobs"};

} // namespace

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig p;
    p.normalize = parse_normalize_mode(normalize);
    p.normalization.nu = nu;
    p.normalization.epsilon_var = epsilon_var;
    if (oversample == 0) throw UsageError("--oversample must be >= 1");
    p.oversample = oversample;
    p.bandwidth_override = bandwidth_override;
    if (scales < 3) throw UsageError("--scales must be at least 3");
    p.morlet = MorletConfig::with_scale_count(scales);
    p.morlet.omega0 = omega0;
    p.morlet.truncation_radius_sigmas = truncation_radius;
    p.morlet.validate();
    p.energy = parse_energy_metric(energy);
    return p;
}

SvmParams RunConfig::svm_params() const {
    SvmParams s;
    s.C = C;
    s.tolerance = svm_tolerance;
    s.seed = seed;
    if (gamma != "scale") {
        try {
            std::size_t used = 0;
            s.gamma = std::stod(gamma, &used);
            if (used != gamma.size()) throw std::invalid_argument(gamma);
        } catch (const std::exception&) {
            throw UsageError("--gamma must be 'scale' or a positive number");
        }
        if (!(*s.gamma > 0.0)) throw UsageError("--gamma must be positive");
    }
    if (!(C > 0.0)) throw UsageError("--C must be positive");
    return s;
}

StationarityConfig RunConfig::stationarity() const {
    if (window < 2) throw UsageError("--window must be >= 2");
    if (overlap >= window) throw UsageError("--overlap must be smaller than --window");
    return {window, overlap, alpha};
}

SynthConfig RunConfig::synth() const {
    SynthConfig s;
    s.n_docs = n_docs;
    s.doc_length = doc_length;
    s.shift_magnitude = shift_magnitude;
    s.shift_location = shift_location;
    s.noise_sigma = noise_sigma;
    s.seed = seed;
    s.validate();
    return s;
}

json to_json(const RunConfig& cfg) {
    RunConfig copy = cfg;
    json j = json::object();
    visit_fields(copy, [&](const char* key, auto& value) {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, std::optional<double>>) {
            j[key] = value ? json(*value) : json(nullptr);
        } else {
            j[key] = value;
        }
    });
    return j;
}

void apply_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    std::set<std::string> seen;
    visit_fields(cfg, [&](const char* key, auto& value) {
        if (!j.contains(key)) return;
        seen.insert(key);
        using T = std::decay_t<decltype(value)>;
        try {
            if constexpr (std::is_same_v<T, std::optional<double>>) {
                value = j[key].is_null() ? std::nullopt : std::optional<double>(j[key].get<double>());
            } else {
                value = j[key].get<T>();
            }
        } catch (const json::exception&) {
            throw UsageError(std::string("config key '") + key + "' has the wrong type");
        }
    });
    try {
        if (j.contains("output")) cfg.output = j["output"].get<std::string>();
        if (j.contains("json_output")) cfg.json_output = j["json_output"].get<std::string>();
        if (j.contains("jobs")) cfg.jobs = j["jobs"].get<std::size_t>();
    } catch (const json::exception&) {
        throw UsageError("config keys output/json_output/jobs have the wrong type");
    }
    for (const auto& item : j.items()) {
        if (!seen.count(item.key()) && !kTransientKeys.count(item.key())) {
            throw UsageError("unknown config key '" + item.key() + "'");
        }
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    apply_json(cfg, j);
}

} // namespace tdt::app
