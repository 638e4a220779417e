#include "articalign/corpus_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace articalign {

namespace {

std::string fmt_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    return buf;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool parse_double_strict(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool parse_int_strict(const std::string& s, long long& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtoll(s.c_str(), &end, 10);
    return end == s.c_str() + s.size();
}

[[noreturn]] void fail_line(ErrorCode code, std::size_t line_no, const std::string& msg) {
    fail(code, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// FrameClock
// ---------------------------------------------------------------------------

FrameClock FrameClock::make(double frame_rate_hz, double sample_rate_hz) {
    FrameClock c;
    c.frame_rate_hz = frame_rate_hz;
    c.sample_rate_hz = sample_rate_hz;
    if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz) ||
        !(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        fail(ErrorCode::invalid_clock, "rates must be finite and positive");
    }
    c.frame_period_samples = std::llround(sample_rate_hz / frame_rate_hz);
    c.validate();
    return c;
}

void FrameClock::validate() const {
    if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz) ||
        !(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz) ||
        frame_period_samples < 1) {
        fail(ErrorCode::invalid_clock, "rates must be finite and positive");
    }
    const double implied = sample_rate_hz / static_cast<double>(frame_period_samples);
    if (std::abs(implied - frame_rate_hz) > 1e-3 * frame_rate_hz) {
        fail(ErrorCode::invalid_clock,
             "frame_period_samples inconsistent with frame rate (implied " +
                 std::to_string(implied) + " Hz vs " + std::to_string(frame_rate_hz) + " Hz)");
    }
}

double frame_mid_time(std::int64_t idx, const FrameClock& clock) {
    return (static_cast<double>(idx) + 0.5) / clock.frame_rate_hz;
}

std::int64_t frames_covering(double duration_s, const FrameClock& clock) {
    if (!(duration_s > 0.0)) return 0;
    const double n = std::ceil(duration_s * clock.frame_rate_hz - 0.5);
    return n <= 0.0 ? 0 : static_cast<std::int64_t>(n);
}

// ---------------------------------------------------------------------------
// Enum <-> string
// ---------------------------------------------------------------------------

const char* to_string(AlignMethod m) {
    return m == AlignMethod::phonetic ? "PHONETIC" : "DTW";
}

AlignMethod align_method_from_string(const std::string& s) {
    if (s == "PHONETIC") return AlignMethod::phonetic;
    if (s == "DTW") return AlignMethod::dtw;
    fail(ErrorCode::malformed_line, "unknown alignment method '" + s + "'");
}

const char* to_string(ContourUnits u) {
    switch (u) {
        case ContourUnits::normalized: return "normalized";
        case ContourUnits::pixels: return "pixels";
        case ContourUnits::mm: return "mm";
    }
    return "normalized";
}

ContourUnits contour_units_from_string(const std::string& s) {
    if (s == "normalized") return ContourUnits::normalized;
    if (s == "pixels") return ContourUnits::pixels;
    if (s == "mm") return ContourUnits::mm;
    fail(ErrorCode::malformed_line, "unknown contour units '" + s + "'");
}

const std::vector<std::string>& canonical_articulators() {
    static const std::vector<std::string> names = {
        "arytenoid_cartilage", "epiglottis",  "lower_lip", "pharyngeal_wall",
        "velum",               "tongue",      "upper_lip", "vocal_folds",
    };
    return names;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void FrameMapping::validate() const {
    std::int64_t prev = -1;
    for (const MappingEntry& e : entries) {
        if (e.source_idx <= prev) {
            fail(ErrorCode::non_monotone_times,
                 "source_idx not strictly increasing at " + std::to_string(e.source_idx));
        }
        if (e.target_idx < kUnmappedFrame) {
            fail(ErrorCode::malformed_line,
                 "target_idx below -1 at source " + std::to_string(e.source_idx));
        }
        prev = e.source_idx;
    }
}

void FeatureSequence::validate() const {
    if (dim < 1) fail(ErrorCode::dimension_mismatch, "feature dim must be >= 1");
    if (values.empty() || values.size() % dim != 0) {
        fail(ErrorCode::dimension_mismatch, "feature matrix size not a multiple of dim");
    }
    for (double v : values) {
        if (!std::isfinite(v)) fail(ErrorCode::non_finite_value, "non-finite feature value");
    }
}

void ContourTrack::validate() const {
    if (articulators.empty() || points_per_articulator == 0) {
        fail(ErrorCode::dimension_mismatch, "contour layout is empty");
    }
    if (coords.size() % frame_stride() != 0) {
        fail(ErrorCode::dimension_mismatch, "coordinate count not a multiple of the frame stride");
    }
    for (double v : coords) {
        if (!std::isfinite(v)) fail(ErrorCode::non_finite_value, "non-finite contour coordinate");
    }
}

ContourTrack ContourTrack::zeros(std::size_t n_frames, double frame_rate_hz, ContourUnits units) {
    ContourTrack t;
    t.frame_rate_hz = frame_rate_hz;
    t.articulators = canonical_articulators();
    t.units = units;
    t.coords.assign(n_frames * t.frame_stride(), 0.0);
    return t;
}

void NormStats::validate() const {
    if (!(pixel_size_mm > 0.0) || !std::isfinite(pixel_size_mm)) {
        fail(ErrorCode::malformed_line, "pixel_size_mm must be positive");
    }
    for (const auto& [name, axes] : per_articulator) {
        for (const AxisStats& a : axes) {
            if (!(a.std > 0.0) || !std::isfinite(a.std) || !std::isfinite(a.mean)) {
                fail(ErrorCode::malformed_line, "invalid stats for articulator '" + name + "'");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Segmentation parsing
// ---------------------------------------------------------------------------

namespace {

enum class Tier { sentence, word, phone };

struct RawInterval {
    Tier tier;
    double start = 0.0;
    double end = 0.0;
    std::string label;      // normalized
    std::size_t line_no = 0;
};

bool tier_from_name(const std::string& name, Tier& out) {
    std::string n;
    for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (n == "sentence" || n == "sentences" || n == "utterance" || n == "utterances") {
        out = Tier::sentence;
        return true;
    }
    if (n == "word" || n == "words") {
        out = Tier::word;
        return true;
    }
    if (n == "phone" || n == "phones" || n == "phoneme" || n == "phonemes") {
        out = Tier::phone;
        return true;
    }
    return false;
}

// Assembles the nested UtteranceSet from flat tiers. Intervals with empty
// normalized labels have already been dropped by the callers.
UtteranceSet build_utterance_set(std::vector<RawInterval> intervals,
                                 const std::set<std::string>& silence_labels,
                                 double declared_duration) {
    std::stable_sort(intervals.begin(), intervals.end(), [](const RawInterval& a, const RawInterval& b) {
        if (a.tier != b.tier) return static_cast<int>(a.tier) < static_cast<int>(b.tier);
        return a.start < b.start;
    });

    std::vector<RawInterval> sents, words, phones;
    for (RawInterval& iv : intervals) {
        switch (iv.tier) {
            case Tier::sentence: sents.push_back(std::move(iv)); break;
            case Tier::word: words.push_back(std::move(iv)); break;
            case Tier::phone: phones.push_back(std::move(iv)); break;
        }
    }

    auto check_tier = [](const std::vector<RawInterval>& tier, const char* name) {
        for (std::size_t i = 1; i < tier.size(); ++i) {
            if (tier[i].start < tier[i - 1].end - kTimeTolS) {
                fail(ErrorCode::overlapping_intervals,
                     std::string(name) + " intervals overlap near " + fmt_time(tier[i].start) +
                         " s (line " + std::to_string(tier[i].line_no) + ")");
            }
        }
    };
    check_tier(sents, "sentence");
    check_tier(words, "word");
    check_tier(phones, "phone");

    UtteranceSet set;
    set.silence_labels = silence_labels;
    for (const RawInterval& s : sents) {
        SentenceInterval si;
        si.text = s.label;
        si.start_s = s.start;
        si.end_s = s.end;
        set.sentences.push_back(std::move(si));
    }

    auto contains = [](double outer_start, double outer_end, double start, double end) {
        return start >= outer_start - kTimeTolS && end <= outer_end + kTimeTolS;
    };

    // Words into sentences. Silence-labeled words act as separators and are
    // dropped; a non-silence word outside every sentence is a structure error.
    for (const RawInterval& w : words) {
        bool placed = false;
        for (SentenceInterval& s : set.sentences) {
            if (contains(s.start_s, s.end_s, w.start, w.end)) {
                WordInterval wi;
                wi.text = w.label;
                wi.start_s = w.start;
                wi.end_s = w.end;
                s.words.push_back(std::move(wi));
                placed = true;
                break;
            }
        }
        if (!placed) {
            if (silence_labels.count(w.label)) continue;
            fail(ErrorCode::overlapping_intervals,
                 "word '" + w.label + "' at [" + fmt_time(w.start) + ", " + fmt_time(w.end) +
                     "] not contained in any sentence (line " + std::to_string(w.line_no) + ")");
        }
    }

    for (const RawInterval& p : phones) {
        bool placed = false;
        for (SentenceInterval& s : set.sentences) {
            if (!contains(s.start_s, s.end_s, p.start, p.end)) continue;
            for (WordInterval& w : s.words) {
                if (contains(w.start_s, w.end_s, p.start, p.end)) {
                    PhoneInterval pi;
                    pi.label = p.label;
                    pi.start_s = p.start;
                    pi.end_s = p.end;
                    w.phones.push_back(std::move(pi));
                    placed = true;
                    break;
                }
            }
            break;
        }
        if (!placed) {
            if (silence_labels.count(p.label)) continue;
            fail(ErrorCode::overlapping_intervals,
                 "phone '" + p.label + "' at [" + fmt_time(p.start) + ", " + fmt_time(p.end) +
                     "] not contained in any word (line " + std::to_string(p.line_no) + ")");
        }
    }

    if (set.sentences.empty()) fail(ErrorCode::empty_corpus, "no sentences found");

    double max_end = 0.0;
    for (const SentenceInterval& s : set.sentences) max_end = std::max(max_end, s.end_s);
    set.total_duration_s = std::max(declared_duration, max_end);
    return set;
}

UtteranceSet parse_segmentation_tsv(std::istream& in, const std::set<std::string>& silence_labels) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) fail(ErrorCode::empty_corpus, "empty stream");
    ++line_no;
    if (strip_cr(line) != "tier\tstart_s\tend_s\tlabel") {
        fail_line(ErrorCode::malformed_line, line_no, "bad header, expected tier<TAB>start_s<TAB>end_s<TAB>label");
    }

    std::vector<RawInterval> intervals;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, '\t');
        if (f.size() != 4) fail_line(ErrorCode::malformed_line, line_no, "expected 4 tab-separated fields");

        RawInterval iv;
        iv.line_no = line_no;
        if (!tier_from_name(f[0], iv.tier) || (f[0] != "sentence" && f[0] != "word" && f[0] != "phone")) {
            fail_line(ErrorCode::malformed_line, line_no, "tier must be sentence|word|phone, got '" + f[0] + "'");
        }
        if (!parse_double_strict(f[1], iv.start) || !parse_double_strict(f[2], iv.end) ||
            !std::isfinite(iv.start) || !std::isfinite(iv.end)) {
            fail_line(ErrorCode::malformed_line, line_no, "times must be finite decimal seconds");
        }
        if (iv.start < 0.0 || !(iv.start < iv.end)) {
            fail_line(ErrorCode::non_monotone_times, line_no,
                      "interval [" + f[1] + ", " + f[2] + "] requires 0 <= start < end");
        }
        iv.label = normalize_text(f[3]);
        if (iv.label.empty()) continue;  // unlabeled gap
        intervals.push_back(std::move(iv));
    }
    return build_utterance_set(std::move(intervals), silence_labels, 0.0);
}

std::string unquote_praat(const std::string& s) {
    const std::size_t first = s.find('"');
    const std::size_t last = s.rfind('"');
    if (first == std::string::npos || last <= first) return s;
    std::string body = s.substr(first + 1, last - first - 1);
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '"' && i + 1 < body.size() && body[i + 1] == '"') ++i;
        out.push_back(body[i]);
    }
    return out;
}

// Restricted long-format TextGrid reader: interval tiers named
// sentence(s)/word(s)/phone(me)(s); everything else is skipped.
UtteranceSet parse_segmentation_textgrid(std::istream& in, const std::set<std::string>& silence_labels) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<RawInterval> intervals;

    bool saw_textgrid = false;
    bool in_interval_tier = false;
    bool tier_wanted = false;
    Tier current_tier = Tier::sentence;
    bool in_interval = false;
    RawInterval cur;
    double file_xmax = 0.0;
    bool at_file_header = true;

    auto value_after_eq = [](const std::string& l) -> std::string {
        const std::size_t eq = l.find('=');
        if (eq == std::string::npos) return {};
        std::size_t b = eq + 1;
        while (b < l.size() && std::isspace(static_cast<unsigned char>(l[b]))) ++b;
        std::size_t e = l.size();
        while (e > b && std::isspace(static_cast<unsigned char>(l[e - 1]))) --e;
        return l.substr(b, e - b);
    };

    auto flush_interval = [&]() {
        if (!in_interval) return;
        in_interval = false;
        if (!tier_wanted) return;
        if (cur.start < 0.0 || !(cur.start < cur.end)) {
            // Praat emits zero-width padding intervals at tier edges; only
            // labeled ones are structural errors.
            if (cur.label.empty()) return;
            fail_line(ErrorCode::non_monotone_times, cur.line_no, "interval requires 0 <= xmin < xmax");
        }
        if (cur.label.empty()) return;
        cur.tier = current_tier;
        intervals.push_back(cur);
    };

    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        std::string trimmed = line;
        const std::size_t b = trimmed.find_first_not_of(" \t");
        trimmed = b == std::string::npos ? std::string() : trimmed.substr(b);
        if (trimmed.empty()) continue;

        if (line_no <= 2 && trimmed.find("\"TextGrid\"") != std::string::npos) saw_textgrid = true;

        if (trimmed.rfind("item [", 0) == 0 || trimmed.rfind("item[", 0) == 0) {
            flush_interval();
            in_interval_tier = false;
            tier_wanted = false;
            at_file_header = false;
            continue;
        }
        if (trimmed.rfind("class", 0) == 0 && trimmed.find('=') != std::string::npos) {
            in_interval_tier = unquote_praat(value_after_eq(trimmed)) == "IntervalTier";
            continue;
        }
        if (trimmed.rfind("name", 0) == 0 && trimmed.find('=') != std::string::npos) {
            Tier t;
            tier_wanted = in_interval_tier && tier_from_name(unquote_praat(value_after_eq(trimmed)), t);
            if (tier_wanted) current_tier = t;
            continue;
        }
        if (trimmed.rfind("intervals [", 0) == 0 || trimmed.rfind("intervals[", 0) == 0) {
            flush_interval();
            in_interval = true;
            cur = RawInterval{};
            cur.line_no = line_no;
            continue;
        }
        if (trimmed.rfind("xmin", 0) == 0) {
            double v = 0.0;
            if (!parse_double_strict(value_after_eq(trimmed), v)) {
                fail_line(ErrorCode::malformed_line, line_no, "bad xmin");
            }
            if (in_interval) cur.start = v;
            continue;
        }
        if (trimmed.rfind("xmax", 0) == 0) {
            double v = 0.0;
            if (!parse_double_strict(value_after_eq(trimmed), v)) {
                fail_line(ErrorCode::malformed_line, line_no, "bad xmax");
            }
            if (in_interval) {
                cur.end = v;
            } else if (at_file_header) {
                file_xmax = std::max(file_xmax, v);
            }
            continue;
        }
        if (trimmed.rfind("text", 0) == 0 && trimmed.find('=') != std::string::npos) {
            if (in_interval) cur.label = normalize_text(unquote_praat(value_after_eq(trimmed)));
            continue;
        }
    }
    flush_interval();

    if (!saw_textgrid) fail_line(ErrorCode::malformed_line, 1, "not a long-format TextGrid file");
    return build_utterance_set(std::move(intervals), silence_labels, file_xmax);
}

}  // namespace

UtteranceSet parse_segmentation(std::istream& in, SegmentationFormat format,
                                const std::set<std::string>& silence_labels) {
    switch (format) {
        case SegmentationFormat::tsv: return parse_segmentation_tsv(in, silence_labels);
        case SegmentationFormat::textgrid_subset: return parse_segmentation_textgrid(in, silence_labels);
    }
    fail(ErrorCode::malformed_header, "unknown segmentation format");
}

void write_segmentation(std::ostream& out, const UtteranceSet& set) {
    out << "tier\tstart_s\tend_s\tlabel\n";
    for (const SentenceInterval& s : set.sentences) {
        out << "sentence\t" << fmt_time(s.start_s) << '\t' << fmt_time(s.end_s) << '\t' << s.text << '\n';
        for (const WordInterval& w : s.words) {
            out << "word\t" << fmt_time(w.start_s) << '\t' << fmt_time(w.end_s) << '\t' << w.text << '\n';
            for (const PhoneInterval& p : w.phones) {
                out << "phone\t" << fmt_time(p.start_s) << '\t' << fmt_time(p.end_s) << '\t' << p.label << '\n';
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Contours
// ---------------------------------------------------------------------------

ContourTrack parse_contours(std::istream& in, double frame_rate_hz, ContourUnits units) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || strip_cr(line) != "frame,articulator,point,x,y") {
        fail(ErrorCode::malformed_header, "expected header frame,articulator,point,x,y");
    }
    ++line_no;

    ContourTrack track;
    track.frame_rate_hz = frame_rate_hz;
    track.units = units;
    track.articulators = canonical_articulators();
    const std::size_t n_art = track.articulators.size();
    const std::size_t n_pts = track.points_per_articulator;

    std::size_t row = 0;  // running index into the exhaustive (frame, art, point) order
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 5) fail_line(ErrorCode::malformed_line, line_no, "expected 5 comma-separated fields");

        const std::size_t exp_frame = row / (n_art * n_pts);
        const std::size_t exp_art = (row / n_pts) % n_art;
        const std::size_t exp_pt = row % n_pts;

        long long frame = 0, point = 0;
        if (!parse_int_strict(f[0], frame) || !parse_int_strict(f[2], point)) {
            fail_line(ErrorCode::malformed_line, line_no, "frame and point must be integers");
        }
        if (static_cast<std::size_t>(frame) != exp_frame || f[1] != track.articulators[exp_art] ||
            static_cast<std::size_t>(point) != exp_pt) {
            fail_line(ErrorCode::dimension_mismatch, line_no,
                      "expected row (" + std::to_string(exp_frame) + "," + track.articulators[exp_art] +
                          "," + std::to_string(exp_pt) + "), got (" + f[0] + "," + f[1] + "," + f[2] +
                          "); rows must be exhaustive and sorted");
        }
        double x = 0.0, y = 0.0;
        if (!parse_double_strict(f[3], x) || !parse_double_strict(f[4], y)) {
            fail_line(ErrorCode::malformed_line, line_no, "x and y must be decimal values");
        }
        if (!std::isfinite(x) || !std::isfinite(y)) {
            fail_line(ErrorCode::non_finite_value, line_no, "non-finite coordinate");
        }
        track.coords.push_back(x);
        track.coords.push_back(y);
        ++row;
    }
    if (row % (n_art * n_pts) != 0) {
        fail(ErrorCode::dimension_mismatch,
             "last frame incomplete: " + std::to_string(2 * (row % (n_art * n_pts))) +
                 " of " + std::to_string(2 * n_art * n_pts) + " coordinate values");
    }
    return track;
}

void write_contours(std::ostream& out, const ContourTrack& track) {
    out << "frame,articulator,point,x,y\n";
    const std::size_t n = track.n_frames();
    for (std::size_t fidx = 0; fidx < n; ++fidx) {
        for (std::size_t a = 0; a < track.n_articulators(); ++a) {
            for (std::size_t p = 0; p < track.points_per_articulator; ++p) {
                out << fidx << ',' << track.articulators[a] << ',' << p << ','
                    << fmt_double(track.x(fidx, a, p)) << ',' << fmt_double(track.y(fidx, a, p)) << '\n';
            }
        }
    }
}

// ---------------------------------------------------------------------------
// NormStats
// ---------------------------------------------------------------------------

NormStats parse_norm_stats(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || strip_cr(line) != "articulator,axis,mean,std") {
        fail(ErrorCode::malformed_header, "expected header articulator,axis,mean,std");
    }
    ++line_no;

    NormStats stats;
    stats.pixel_size_mm = 0.0;
    bool saw_pixel = false;
    std::set<std::pair<std::string, int>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() == 2 && f[0] == "pixel_size_mm") {
            double v = 0.0;
            if (!parse_double_strict(f[1], v) || !(v > 0.0) || !std::isfinite(v)) {
                fail_line(ErrorCode::malformed_line, line_no, "pixel_size_mm must be positive");
            }
            if (saw_pixel) fail_line(ErrorCode::malformed_line, line_no, "duplicate pixel_size_mm");
            stats.pixel_size_mm = v;
            saw_pixel = true;
            continue;
        }
        if (f.size() != 4) fail_line(ErrorCode::malformed_line, line_no, "expected articulator,axis,mean,std");
        int axis = -1;
        if (f[1] == "x") axis = 0;
        if (f[1] == "y") axis = 1;
        if (axis < 0) fail_line(ErrorCode::malformed_line, line_no, "axis must be x or y");
        double mean = 0.0, sd = 0.0;
        if (!parse_double_strict(f[2], mean) || !parse_double_strict(f[3], sd) ||
            !std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
            fail_line(ErrorCode::malformed_line, line_no, "mean must be finite, std positive");
        }
        if (!seen.insert({f[0], axis}).second) {
            fail_line(ErrorCode::malformed_line, line_no, "duplicate stats for " + f[0] + "/" + f[1]);
        }
        stats.per_articulator[f[0]][axis] = AxisStats{mean, sd};
    }
    if (!saw_pixel) fail(ErrorCode::malformed_header, "missing pixel_size_mm line");
    return stats;
}

void write_norm_stats(std::ostream& out, const NormStats& stats) {
    out << "articulator,axis,mean,std\n";
    for (const auto& [name, axes] : stats.per_articulator) {
        out << name << ",x," << fmt_double(axes[0].mean) << ',' << fmt_double(axes[0].std) << '\n';
        out << name << ",y," << fmt_double(axes[1].mean) << ',' << fmt_double(axes[1].std) << '\n';
    }
    out << "pixel_size_mm," << fmt_double(stats.pixel_size_mm) << '\n';
}

// ---------------------------------------------------------------------------
// FeatureSequence
// ---------------------------------------------------------------------------

FeatureSequence parse_features(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::malformed_header, "empty feature file");
    line = strip_cr(line);

    long long n = 0, d = 0;
    double rate = 0.0;
    {
        std::istringstream hs(line);
        std::string tf, td, tr;
        hs >> tf >> td >> tr;
        if (tf.rfind("frames=", 0) != 0 || td.rfind("dim=", 0) != 0 || tr.rfind("rate_hz=", 0) != 0 ||
            !parse_int_strict(tf.substr(7), n) || !parse_int_strict(td.substr(4), d) ||
            !parse_double_strict(tr.substr(8), rate)) {
            fail(ErrorCode::malformed_header, "expected header frames=<n> dim=<d> rate_hz=<r>");
        }
    }
    if (n < 1 || d < 1 || !(rate > 0.0)) {
        fail(ErrorCode::malformed_header, "frames and dim must be >= 1 and rate_hz positive");
    }

    FeatureSequence seq;
    seq.frame_rate_hz = rate;
    seq.dim = static_cast<std::size_t>(d);
    seq.values.reserve(static_cast<std::size_t>(n * d));

    std::size_t line_no = 1;
    long long rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (rows >= n) fail_line(ErrorCode::dimension_mismatch, line_no, "more rows than declared frames");
        std::istringstream ls(line);
        std::string tok;
        long long count = 0;
        while (ls >> tok) {
            double v = 0.0;
            if (!parse_double_strict(tok, v)) {
                fail_line(ErrorCode::malformed_line, line_no, "bad value '" + tok + "'");
            }
            if (!std::isfinite(v)) fail_line(ErrorCode::non_finite_value, line_no, "non-finite value");
            seq.values.push_back(v);
            ++count;
        }
        if (count != d) {
            fail_line(ErrorCode::dimension_mismatch, line_no,
                      "row has " + std::to_string(count) + " values, dim=" + std::to_string(d));
        }
        ++rows;
    }
    if (rows != n) {
        fail(ErrorCode::dimension_mismatch,
             "declared frames=" + std::to_string(n) + " but found " + std::to_string(rows) + " rows");
    }
    return seq;
}

void write_features(std::ostream& out, const FeatureSequence& seq) {
    out << "frames=" << seq.n_frames() << " dim=" << seq.dim << " rate_hz=" << fmt_double(seq.frame_rate_hz)
        << '\n';
    for (std::size_t i = 0; i < seq.n_frames(); ++i) {
        const double* row = seq.frame(i);
        for (std::size_t j = 0; j < seq.dim; ++j) {
            if (j) out << ' ';
            out << fmt_double(row[j]);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// FrameMapping
// ---------------------------------------------------------------------------

FrameMapping parse_frame_mapping(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || strip_cr(line) != "source_idx,target_idx,method,phone,sentence_id,clamped") {
        fail(ErrorCode::malformed_header, "expected header source_idx,target_idx,method,phone,sentence_id,clamped");
    }
    ++line_no;

    FrameMapping mapping;
    std::int64_t prev = -1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 6) fail_line(ErrorCode::malformed_line, line_no, "expected 6 comma-separated fields");
        MappingEntry e;
        long long src = 0, tgt = 0, sid = 0, clamped = 0;
        if (!parse_int_strict(f[0], src) || !parse_int_strict(f[1], tgt) ||
            !parse_int_strict(f[4], sid) || !parse_int_strict(f[5], clamped) ||
            (clamped != 0 && clamped != 1)) {
            fail_line(ErrorCode::malformed_line, line_no, "bad numeric field");
        }
        if (src < 0 || tgt < kUnmappedFrame) {
            fail_line(ErrorCode::malformed_line, line_no, "source_idx must be >= 0 and target_idx >= -1");
        }
        if (src <= prev) {
            fail_line(ErrorCode::non_monotone_times, line_no, "source_idx must be strictly increasing");
        }
        prev = src;
        e.source_idx = src;
        e.target_idx = tgt;
        try {
            e.method = align_method_from_string(f[2]);
        } catch (const Error&) {
            fail_line(ErrorCode::malformed_line, line_no, "method must be PHONETIC or DTW");
        }
        e.phone = f[3];
        e.sentence_id = static_cast<std::int32_t>(sid);
        e.clamped = clamped == 1;
        mapping.entries.push_back(std::move(e));
    }
    return mapping;
}

void write_frame_mapping(std::ostream& out, const FrameMapping& mapping) {
    out << "source_idx,target_idx,method,phone,sentence_id,clamped\n";
    for (const MappingEntry& e : mapping.entries) {
        out << e.source_idx << ',' << e.target_idx << ',' << to_string(e.method) << ',' << e.phone << ','
            << e.sentence_id << ',' << (e.clamped ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

namespace {

std::ifstream open_or_fail(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
    return in;
}

}  // namespace

UtteranceSet load_segmentation(const std::string& path, SegmentationFormat format,
                               const std::set<std::string>& silence_labels) {
    std::ifstream in = open_or_fail(path);
    return parse_segmentation(in, format, silence_labels);
}

FrameMapping load_frame_mapping(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    return parse_frame_mapping(in);
}

FeatureSequence load_features(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    return parse_features(in);
}

ContourTrack load_contours(const std::string& path, double frame_rate_hz, ContourUnits units) {
    std::ifstream in = open_or_fail(path);
    return parse_contours(in, frame_rate_hz, units);
}

NormStats load_norm_stats(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    return parse_norm_stats(in);
}

}  // namespace articalign
