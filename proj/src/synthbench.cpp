#include "tdt/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "tdt/error.hpp"
#include "tdt/rng.hpp"

namespace tdt {

namespace {

enum Generator : unsigned { kStationary = 0, kRegime = 1, kInsertion = 2 };

std::string doc_id(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%05zu", prefix, i);
    return buf;
}

std::vector<double> noise(Xoshiro256& rng, const SynthConfig& cfg) {
    std::vector<double> z(cfg.doc_length);
    for (auto& v : z) v = rng.normal(0.0, cfg.noise_sigma);
    return z;
}

DocumentRecord make_record(std::string id, std::vector<double> z, Label label, const char* generator,
                           const SynthConfig& cfg) {
    DocumentRecord rec;
    rec.id = std::move(id);
    rec.z = std::move(z);
    rec.label = label;
    rec.meta["generator"] = generator;
    rec.meta["domain"] = "synthetic";
    rec.meta["seed"] = std::to_string(cfg.seed);
    return rec;
}

} // namespace

void SynthConfig::validate() const {
    if (n_docs == 0) throw UsageError("synth: n_docs must be positive");
    if (doc_length == 0) throw UsageError("synth: doc_length must be positive");
    if (!(noise_sigma > 0.0)) throw UsageError("synth: noise_sigma must be positive");
    if (!(shift_magnitude >= 0.0) || !std::isfinite(shift_magnitude)) {
        throw UsageError("synth: shift_magnitude must be finite and non-negative");
    }
    if (!(shift_location > 0.0 && shift_location < 1.0)) throw UsageError("synth: shift_location must lie in (0, 1)");
}

std::uint64_t document_seed(std::uint64_t seed, unsigned generator, std::size_t index) {
    return seed ^ ((static_cast<std::uint64_t>(generator) << 32) | static_cast<std::uint64_t>(index));
}

Split synth_split(std::size_t index) {
    return index % 2 == 0 ? Split::Dev : Split::Test;
}

Corpus gen_stationary(const SynthConfig& cfg) {
    cfg.validate();
    Corpus corpus;
    for (std::size_t i = 0; i < cfg.n_docs; ++i) {
        Xoshiro256 rng(document_seed(cfg.seed, kStationary, i));
        corpus.add(make_record(doc_id("human", i), noise(rng, cfg), Label::Human, "stationary", cfg),
                   synth_split(i));
    }
    return corpus;
}

Corpus gen_regime_shift(const SynthConfig& cfg) {
    cfg.validate();
    const auto change = static_cast<std::size_t>(std::llround(cfg.shift_location * static_cast<double>(cfg.doc_length)));
    Corpus corpus;
    for (std::size_t i = 0; i < cfg.n_docs; ++i) {
        Xoshiro256 rng(document_seed(cfg.seed, kRegime, i));
        auto z = noise(rng, cfg);
        for (std::size_t t = change; t < z.size(); ++t) z[t] += cfg.shift_magnitude;
        corpus.add(make_record(doc_id("machine", i), std::move(z), Label::Machine, "regime_shift", cfg),
                   synth_split(i));
    }
    return corpus;
}

std::size_t insertion_start(const SynthConfig& cfg, std::size_t span_len) {
    const double centre = cfg.shift_location * static_cast<double>(cfg.doc_length);
    const double start = std::floor(centre - 0.5 * static_cast<double>(span_len));
    const double last = static_cast<double>(cfg.doc_length - span_len);
    return static_cast<std::size_t>(std::clamp(start, 0.0, last));
}

Corpus gen_localized_insertion(const SynthConfig& cfg, double span_fraction) {
    cfg.validate();
    if (!(span_fraction > 0.0 && span_fraction <= 1.0)) throw UsageError("synth: span_fraction must lie in (0, 1]");
    const auto span_len = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(span_fraction * static_cast<double>(cfg.doc_length))), 1,
        cfg.doc_length);
    const std::size_t start = insertion_start(cfg, span_len);
    Corpus corpus;
    for (std::size_t i = 0; i < cfg.n_docs; ++i) {
        Xoshiro256 rng(document_seed(cfg.seed, kInsertion, i));
        auto z = noise(rng, cfg);
        for (std::size_t t = start; t < start + span_len; ++t) z[t] += cfg.shift_magnitude;
        auto rec = make_record(doc_id("machine", i), std::move(z), Label::Machine, "localized_insertion", cfg);
        rec.meta["span_start"] = std::to_string(start);
        rec.meta["span_length"] = std::to_string(span_len);
        corpus.add(std::move(rec), synth_split(i));
    }
    return corpus;
}

Corpus concat(const Corpus& a, const Corpus& b) {
    Corpus out = a;
    std::unordered_set<std::string> ids;
    for (const auto& r : a.records) ids.insert(r.id);
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!ids.insert(b.records[i].id).second) throw DataError("duplicate record id '" + b.records[i].id + "'");
        out.add(b.records[i], b.splits[i]);
    }
    return out;
}

} // namespace tdt
