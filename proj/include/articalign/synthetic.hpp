#pragma once

#include <cstdint>
#include <vector>

#include "articalign/corpus_model.hpp"

namespace articalign {

struct ValueRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct CountRange {
    int lo = 1;
    int hi = 1;
};

// Deterministic generator spec for a parallel corpus pair with known warp.
struct SyntheticSpec {
    std::uint64_t seed = 1;
    int n_sentences = 10;
    CountRange words_per_sentence{2, 5};
    CountRange phones_per_word{1, 4};
    ValueRange phone_duration_s{0.05, 0.25};
    ValueRange warp{0.5, 2.0};      // per-phone clean/MRI duration multiplier
    double error_rate = 0.0;        // probability a clean sentence is perturbed
    ValueRange silence_gap_s{0.1, 0.3};
    double mri_rate_hz = 20.0;
    double clean_rate_hz = 50.0;
    bool shuffle_sentences = true;  // reorder sentences in the clean corpus
    bool reuse_gaps = false;        // reuse MRI gap durations in the clean layout

    void validate() const;
};

struct SyntheticCorpus {
    UtteranceSet mri;
    UtteranceSet clean;
    FrameMapping truth;                        // analytic mapping from the known warp
    std::vector<std::int32_t> clean_order;     // mri sentence id -> clean sentence id
    std::vector<std::int32_t> perturbed;       // mri ids whose clean copy was perturbed
};

// Clean corpus = per-phone duration-warped copy of the MRI corpus with
// shuffled sentence order and optional word substitutions. The truth mapping
// applies the time-stretching arithmetic to the generator's own interval
// records; frames of perturbed sentences are UNMAPPED in the truth.
SyntheticCorpus gen_synthetic(const SyntheticSpec& spec);

// Per-phone distinguishable features for a sentence: each frame (sentence-
// local grid) carries an embedding keyed by the phone label containing its
// mid-time, plus Gaussian noise. Frames outside phones get the zero vector.
// ramp_scale > 0 blends toward a second label-keyed vector by the frame's
// intra-phone relative position, giving DTW an intra-phone cue the way real
// spectra drift through a phone.
FeatureSequence synth_sentence_features(const SentenceInterval& sentence, const FrameClock& clock,
                                        std::size_t dim, double noise_sigma, std::uint64_t seed,
                                        double ramp_scale = 1.0);

}  // namespace articalign
