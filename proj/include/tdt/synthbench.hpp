#pragma once

#include <cstdint>
#include <string>

#include "tdt/ingest.hpp"

namespace tdt {

struct SynthConfig {
    std::size_t n_docs = 100;       // per class
    std::size_t doc_length = 512;
    double shift_magnitude = 1.5;
    double shift_location = 0.5;    // fraction of doc_length, strictly inside (0, 1)
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Document i of generator g draws from xoshiro256** seeded with
// seed ^ (g << 32 | i), g = 0 stationary, 1 regime shift, 2 localized insertion.
std::uint64_t document_seed(std::uint64_t seed, unsigned generator, std::size_t index);

// Even document indices go to the dev split, odd ones to test.
Split synth_split(std::size_t index);

// i.i.d. N(0, noise_sigma^2), label human.
Corpus gen_stationary(const SynthConfig& cfg);

// Mean steps from 0 to shift_magnitude at round(shift_location * doc_length), label machine.
Corpus gen_regime_shift(const SynthConfig& cfg);

// Stationary series with one contiguous span of round(span_fraction * doc_length)
// tokens raised by shift_magnitude, centred on shift_location, label machine.
Corpus gen_localized_insertion(const SynthConfig& cfg, double span_fraction);

// First index of the inserted span for the given configuration.
std::size_t insertion_start(const SynthConfig& cfg, std::size_t span_len);

// Concatenation preserving order; ids must not collide.
Corpus concat(const Corpus& a, const Corpus& b);

} // namespace tdt
