#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "articalign/corpus_model.hpp"
#include "articalign/phonetic_aligner.hpp"

namespace articalign {

struct WarpingPath {
    // Monotone steps from (0,0) to (n-1, m-1); each step advances i, j, or both by 1.
    std::vector<std::pair<std::int64_t, std::int64_t>> steps;
    double total_cost = 0.0;
};

struct MelConfig {
    double window_s = 0.025;
    double hop_s = 0.020;
    int n_mels = 40;
    double sample_rate_hz = 16000.0;
    double floor = 1e-10;  // added to filterbank energies before log
};

// Log mel-filterbank energies over Hann-windowed power spectra.
// Frame count = floor((n_samples - window) / hop) + 1; frame rate = 1/hop_s.
FeatureSequence extract_logmel(std::span<const double> audio, const MelConfig& cfg = {});

// Dynamic time warping with steps (1,0), (0,1), (1,1) and Euclidean local
// distance; optional Sakoe-Chiba band |i*m/n - j| <= band_radius. Ties in the
// backtrack prefer the diagonal, then the (1,0) step.
WarpingPath dtw(const FeatureSequence& x, const FeatureSequence& y,
                std::optional<std::int64_t> band_radius = std::nullopt);

// Collapses a path to a total, non-decreasing frame mapping: each source
// index maps to the median target index among its path steps.
FrameMapping path_to_frame_mapping(const WarpingPath& path, double src_rate_hz, double tgt_rate_hz);

struct SentenceFeatures {
    std::int32_t sentence_id = -1;
    FeatureSequence features;
};

// Per-sentence DTW reusing the phonetic sentence pairing; per-sentence
// mappings are concatenated with global frame offsets (cumulative frame
// counts in ascending sentence-id order). Frames of unmatched MRI sentences
// are UNMAPPED. MRI features must cover every sentence in the pairing; clean
// features every paired clean sentence.
FrameMapping align_corpus_dtw(const std::vector<SentenceFeatures>& mri_features,
                              const std::vector<SentenceFeatures>& clean_features,
                              const SentencePairing& pairing,
                              std::optional<std::int64_t> band_radius = std::nullopt);

}  // namespace articalign
