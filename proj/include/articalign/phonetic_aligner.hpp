#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "articalign/corpus_model.hpp"

namespace articalign {

struct SentencePair {
    std::int32_t mri_id = -1;
    std::int32_t clean_id = -1;
    double similarity = 0.0;
};

struct SentencePairing {
    std::vector<SentencePair> pairs;        // ordered by mri_id
    std::vector<std::int32_t> unmatched_mri;
    double threshold = 0.75;
};

struct WordPairing {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (mri word idx, clean word idx)
    std::vector<std::size_t> unmatched_mri_words;
};

// One MRI phone paired with its clean counterpart (equal normalized labels).
struct PhonePair {
    PhoneInterval mri;
    PhoneInterval clean;
    std::int32_t mri_sentence_id = -1;
};

struct PhonePairing {
    std::vector<PhonePair> pairs;
    std::size_t n_demoted_word_pairs = 0;
    std::vector<std::string> warnings;
};

struct AlignmentReport {
    std::size_t n_mri_sentences = 0;
    std::size_t n_clean_sentences = 0;
    std::size_t n_paired_sentences = 0;
    std::size_t n_unmatched_sentences = 0;
    std::size_t n_mri_words = 0;
    std::size_t n_paired_words = 0;
    std::size_t n_unmatched_words = 0;
    std::size_t n_demoted_word_pairs = 0;
    std::size_t n_paired_phones = 0;
    std::size_t n_frames = 0;
    std::size_t n_mapped_frames = 0;
    std::size_t n_unmapped_frames = 0;
    std::size_t n_clamped_frames = 0;
    std::vector<std::string> warnings;

    std::string render_text() const;
};

struct AlignConfig {
    double threshold = 0.75;
    bool one_to_one = false;  // strict greedy one-to-one sentence pairing
    FrameClock mri_clock = FrameClock::make(20.0);
    FrameClock clean_clock = FrameClock::make(50.0);
    // Overrides for frame counts; derived from total durations when absent.
    std::optional<std::int64_t> mri_n_frames;
    std::optional<std::int64_t> clean_n_frames;
};

struct AlignResult {
    FrameMapping mapping;
    AlignmentReport report;
    SentencePairing sentence_pairing;
};

// For each MRI sentence, the clean sentence maximizing Gestalt similarity
// of normalized text; pairs under the threshold become unmatched. Ties break
// toward the smaller clean sentence id. With one_to_one, clean sentences are
// consumed greedily in descending similarity order.
SentencePairing pair_sentences(const UtteranceSet& mri, const UtteranceSet& clean,
                               double threshold = 0.75, bool one_to_one = false);

// (t_start,word - t_start,sentence) / sentence duration, clamped to [0, 1].
double relative_position(const WordInterval& word, const SentenceInterval& sentence);

// Textual-equality candidates disambiguated by closest relative position;
// each clean word is consumed at most once.
WordPairing pair_words(const SentenceInterval& mri_sentence, const SentenceInterval& clean_sentence);

// Index pairing when phone counts and labels agree; otherwise the word pair
// is demoted (0 pairs, warning recorded).
PhonePairing pair_phones(const WordInterval& mri_word, const WordInterval& clean_word,
                         std::int32_t mri_sentence_id = -1);

// Phoneme-by-phoneme time stretching. For each source frame whose mid-time
// lies in a paired MRI phone [start, end):
//   duration = max(end - start, 1 ms)
//   r_intra = (mid - start) / duration, clamped to [0, 1]
//   t_target = clean_start + r_intra * (clean_end - clean_start)
//   target_idx = floor(t_target * target frame rate), clamped to the target
//   range with the clamped flag set.
// Frames outside every paired phone map to UNMAPPED.
FrameMapping map_frames(const PhonePairing& pairing, const FrameClock& mri_clock,
                        const FrameClock& clean_clock, std::int64_t clean_n_frames,
                        std::int64_t mri_n_frames);

// Full hierarchy: pair_sentences -> pair_words -> pair_phones -> map_frames.
AlignResult align_corpus(const UtteranceSet& mri, const UtteranceSet& clean, const AlignConfig& config);

// Sentence pairing CSV (header mri_sentence_id,clean_sentence_id,similarity;
// clean id -1 for unmatched), consumed by the DTW aligner CLI.
void write_sentence_pairing(std::ostream& out, const SentencePairing& pairing);
SentencePairing parse_sentence_pairing(std::istream& in);

}  // namespace articalign
