#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "articalign/error.hpp"

namespace articalign {

// Time tolerance (seconds) used by every interval comparison; absorbs the
// rounding forced aligners apply when exporting times.
inline constexpr double kTimeTolS = 1e-3;

// ε for phone durations (seconds); prevents division by zero when a phone
// interval has collapsed.
inline constexpr double kMinPhoneDurationS = 1e-3;

inline constexpr std::int64_t kUnmappedFrame = -1;

// ---------------------------------------------------------------------------
// Segmentation types
// ---------------------------------------------------------------------------

struct PhoneInterval {
    std::string label;  // normalized, non-empty in parsed input
    double start_s = 0.0;
    double end_s = 0.0;

    double duration_s() const { return end_s - start_s; }
};

struct WordInterval {
    std::string text;  // normalized
    double start_s = 0.0;
    double end_s = 0.0;
    std::vector<PhoneInterval> phones;  // time-ordered, contained in the word
};

struct SentenceInterval {
    std::string text;  // normalized
    double start_s = 0.0;
    double end_s = 0.0;
    std::vector<WordInterval> words;  // time-ordered, contained in the sentence

    double duration_s() const { return end_s - start_s; }
};

struct UtteranceSet {
    std::vector<SentenceInterval> sentences;  // time-ordered, non-overlapping
    std::set<std::string> silence_labels = {"sil", "sp", "#", ""};
    double total_duration_s = 0.0;
};

// ---------------------------------------------------------------------------
// Frame clock
// ---------------------------------------------------------------------------

struct FrameClock {
    double frame_rate_hz = 0.0;
    double sample_rate_hz = 0.0;
    std::int64_t frame_period_samples = 0;

    // Validates frame_period_samples = round(sample_rate/frame_rate) and that
    // sample_rate/period stays within 0.1% of frame_rate; throws INVALID_CLOCK.
    static FrameClock make(double frame_rate_hz, double sample_rate_hz = 16000.0);

    void validate() const;
};

// Mid-time of a frame: (idx + 0.5) / frame_rate. The 0.5 offset is the
// project-wide frame-center convention.
double frame_mid_time(std::int64_t idx, const FrameClock& clock);

// Number of frames whose mid-time lies in [0, duration_s).
std::int64_t frames_covering(double duration_s, const FrameClock& clock);

// ---------------------------------------------------------------------------
// Frame mapping
// ---------------------------------------------------------------------------

enum class AlignMethod { phonetic, dtw };

const char* to_string(AlignMethod m);
AlignMethod align_method_from_string(const std::string& s);

struct MappingEntry {
    std::int64_t source_idx = 0;
    std::int64_t target_idx = kUnmappedFrame;  // -1 encodes UNMAPPED
    AlignMethod method = AlignMethod::phonetic;
    std::string phone;           // label of the source phone containing the frame mid-time
    std::int32_t sentence_id = -1;
    bool clamped = false;

    bool mapped() const { return target_idx != kUnmappedFrame; }
};

struct FrameMapping {
    double source_frame_rate_hz = 0.0;
    double target_frame_rate_hz = 0.0;
    std::vector<MappingEntry> entries;  // source_idx strictly increasing

    void validate() const;
};

// ---------------------------------------------------------------------------
// Feature sequences and contours
// ---------------------------------------------------------------------------

struct FeatureSequence {
    double frame_rate_hz = 0.0;
    std::size_t dim = 0;
    std::vector<double> values;  // n_frames * dim, row-major

    std::size_t n_frames() const { return dim == 0 ? 0 : values.size() / dim; }
    const double* frame(std::size_t i) const { return values.data() + i * dim; }
    double* frame(std::size_t i) { return values.data() + i * dim; }

    void validate() const;  // finite values, n >= 1, dim >= 1
};

enum class ContourUnits { normalized, pixels, mm };

const char* to_string(ContourUnits u);
ContourUnits contour_units_from_string(const std::string& s);

// The eight articulators tracked in each frame, in canonical (table) order.
const std::vector<std::string>& canonical_articulators();

inline constexpr std::size_t kPointsPerArticulator = 50;

struct ContourTrack {
    double frame_rate_hz = 20.0;
    std::vector<std::string> articulators;  // canonical 8 by default
    std::size_t points_per_articulator = kPointsPerArticulator;
    ContourUnits units = ContourUnits::normalized;
    std::vector<double> coords;  // n_frames * n_art * points * 2, (x, y)

    std::size_t n_articulators() const { return articulators.size(); }
    std::size_t frame_stride() const { return n_articulators() * points_per_articulator * 2; }
    std::size_t n_frames() const {
        const std::size_t s = frame_stride();
        return s == 0 ? 0 : coords.size() / s;
    }
    std::size_t offset(std::size_t frame, std::size_t art, std::size_t point) const {
        return frame * frame_stride() + (art * points_per_articulator + point) * 2;
    }
    double x(std::size_t frame, std::size_t art, std::size_t point) const {
        return coords[offset(frame, art, point)];
    }
    double y(std::size_t frame, std::size_t art, std::size_t point) const {
        return coords[offset(frame, art, point) + 1];
    }

    static ContourTrack zeros(std::size_t n_frames, double frame_rate_hz = 20.0,
                              ContourUnits units = ContourUnits::normalized);

    void validate() const;  // finite coordinates, consistent sizes
};

struct AxisStats {
    double mean = 0.0;
    double std = 1.0;
};

struct NormStats {
    double pixel_size_mm = 1.62;
    // articulator -> {x stats, y stats}
    std::map<std::string, std::array<AxisStats, 2>> per_articulator;

    void validate() const;  // std > 0, pixel_size_mm > 0
};

// ---------------------------------------------------------------------------
// Text normalization
// ---------------------------------------------------------------------------

// NFC (Latin precompositions), lowercase, collapse whitespace, trim;
// punctuation stripped except intra-word apostrophes and hyphens.
std::string normalize_text(const std::string& raw);

// ---------------------------------------------------------------------------
// Parsers / writers
// ---------------------------------------------------------------------------

enum class SegmentationFormat { tsv, textgrid_subset };

UtteranceSet parse_segmentation(std::istream& in, SegmentationFormat format,
                                const std::set<std::string>& silence_labels = {"sil", "sp", "#", ""});
void write_segmentation(std::ostream& out, const UtteranceSet& set);

ContourTrack parse_contours(std::istream& in, double frame_rate_hz = 20.0,
                            ContourUnits units = ContourUnits::normalized);
void write_contours(std::ostream& out, const ContourTrack& track);

NormStats parse_norm_stats(std::istream& in);
void write_norm_stats(std::ostream& out, const NormStats& stats);

FeatureSequence parse_features(std::istream& in);
void write_features(std::ostream& out, const FeatureSequence& seq);

FrameMapping parse_frame_mapping(std::istream& in);
void write_frame_mapping(std::ostream& out, const FrameMapping& mapping);

// File-path conveniences (throw io_error when the file cannot be opened).
UtteranceSet load_segmentation(const std::string& path, SegmentationFormat format,
                               const std::set<std::string>& silence_labels = {"sil", "sp", "#", ""});
FrameMapping load_frame_mapping(const std::string& path);
FeatureSequence load_features(const std::string& path);
ContourTrack load_contours(const std::string& path, double frame_rate_hz = 20.0,
                           ContourUnits units = ContourUnits::normalized);
NormStats load_norm_stats(const std::string& path);

}  // namespace articalign
