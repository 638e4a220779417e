// artic: align parallel speech corpora at the frame level and evaluate
// predicted articulator contours in millimeters.
//
// Subcommands: align phonetic | align dtw | features logmel | eval |
// compare | synth. File formats are documented in the README.

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "articalign/corpus_model.hpp"
#include "articalign/dtw_aligner.hpp"
#include "articalign/evaluation.hpp"
#include "articalign/phonetic_aligner.hpp"
#include "articalign/synthetic.hpp"
#include "articalign/text_similarity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace articalign;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

// All output files are written atomically: temp file in the target directory,
// then rename.
void write_file_atomic(const std::string& path, const std::string& contents) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(ErrorCode::io_error, "cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out.good()) fail(ErrorCode::io_error, "short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

template <typename WriteFn>
void write_with(const std::string& path, WriteFn&& fn) {
    std::ostringstream os;
    fn(os);
    write_file_atomic(path, os.str());
}

std::set<std::string> parse_silence_labels(const std::string& csv) {
    std::set<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            out.insert(normalize_text(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.insert(normalize_text(cur));
    out.insert("");
    return out;
}

SegmentationFormat sniff_format(const std::string& path, const std::string& declared) {
    if (declared == "tsv") return SegmentationFormat::tsv;
    if (declared == "textgrid") return SegmentationFormat::textgrid_subset;
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
    std::string first;
    std::getline(in, first);
    if (first.find("ooTextFile") != std::string::npos) return SegmentationFormat::textgrid_subset;
    return SegmentationFormat::tsv;
}

// Minimal RIFF/WAVE reader: 16-bit little-endian PCM, mono.
std::vector<double> read_wav_pcm16(const std::string& path, double& sample_rate_hz) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
    auto read_u32 = [&in]() {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        return static_cast<std::uint32_t>(b[0]) | (b[1] << 8) | (b[2] << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    };
    auto read_u16 = [&in]() {
        unsigned char b[2];
        in.read(reinterpret_cast<char*>(b), 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    };
    char tag[5] = {0};
    in.read(tag, 4);
    read_u32();  // riff size
    char wave[5] = {0};
    in.read(wave, 4);
    if (std::string(tag, 4) != "RIFF" || std::string(wave, 4) != "WAVE") {
        fail(ErrorCode::malformed_header, "'" + path + "' is not a RIFF/WAVE file");
    }
    std::uint16_t channels = 0, bits = 0, format = 0;
    std::uint32_t rate = 0;
    std::vector<double> samples;
    bool got_fmt = false, got_data = false;
    while (in && !(got_fmt && got_data)) {
        in.read(tag, 4);
        if (!in) break;
        const std::uint32_t size = read_u32();
        if (std::string(tag, 4) == "fmt ") {
            format = read_u16();
            channels = read_u16();
            rate = read_u32();
            read_u32();  // byte rate
            read_u16();  // block align
            bits = read_u16();
            if (size > 16) in.seekg(size - 16, std::ios::cur);
            got_fmt = true;
        } else if (std::string(tag, 4) == "data") {
            if (!got_fmt) fail(ErrorCode::malformed_header, "data chunk before fmt chunk");
            if (format != 1 || bits != 16) {
                fail(ErrorCode::malformed_header, "only 16-bit PCM supported");
            }
            if (channels != 1) fail(ErrorCode::malformed_header, "only mono audio supported");
            const std::size_t n = size / 2;
            samples.resize(n);
            std::vector<char> raw(size);
            in.read(raw.data(), size);
            for (std::size_t i = 0; i < n; ++i) {
                const std::int16_t v = static_cast<std::int16_t>(
                    static_cast<unsigned char>(raw[2 * i]) |
                    (static_cast<unsigned char>(raw[2 * i + 1]) << 8));
                samples[i] = static_cast<double>(v) / 32768.0;
            }
            got_data = true;
        } else {
            in.seekg(size + (size % 2), std::ios::cur);
        }
    }
    if (!got_data) fail(ErrorCode::malformed_header, "no data chunk in '" + path + "'");
    sample_rate_hz = static_cast<double>(rate);
    return samples;
}

std::vector<SentenceFeatures> load_feature_dir(const std::string& dir) {
    std::vector<SentenceFeatures> out;
    if (!fs::is_directory(dir)) fail(ErrorCode::io_error, "'" + dir + "' is not a directory");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".feat") continue;
        const std::string stem = entry.path().stem().string();
        char* end = nullptr;
        const long id = std::strtol(stem.c_str(), &end, 10);
        if (end != stem.c_str() + stem.size()) continue;  // not <sentence_id>.feat
        SentenceFeatures sf;
        sf.sentence_id = static_cast<std::int32_t>(id);
        sf.features = load_features(entry.path().string());
        out.push_back(std::move(sf));
    }
    std::sort(out.begin(), out.end(),
              [](const SentenceFeatures& a, const SentenceFeatures& b) {
                  return a.sentence_id < b.sentence_id;
              });
    return out;
}

json report_to_json(const AlignmentReport& r) {
    return json{{"sentences",
                 {{"mri", r.n_mri_sentences},
                  {"clean", r.n_clean_sentences},
                  {"paired", r.n_paired_sentences},
                  {"unmatched", r.n_unmatched_sentences}}},
                {"words",
                 {{"total", r.n_mri_words},
                  {"paired", r.n_paired_words},
                  {"unmatched", r.n_unmatched_words},
                  {"demoted", r.n_demoted_word_pairs}}},
                {"phones", {{"paired", r.n_paired_phones}}},
                {"frames",
                 {{"total", r.n_frames},
                  {"mapped", r.n_mapped_frames},
                  {"unmapped", r.n_unmapped_frames},
                  {"clamped", r.n_clamped_frames}}},
                {"warnings", r.warnings}};
}

json summary_to_json(const ArticulatorSummary& s) {
    return json{{"articulator", s.name},
                {"n", s.n},
                {"mean_rmse_mm", s.mean_rmse_mm},
                {"std_rmse_mm", s.std_rmse_mm},
                {"median_rmse_mm", s.median_rmse_mm}};
}

json eval_report_to_json(const EvalReport& r) {
    json arts = json::array();
    for (const ArticulatorSummary& s : r.per_articulator) arts.push_back(summary_to_json(s));
    return json{{"articulators", arts}, {"global", summary_to_json(r.global)}};
}

// ---------------------------------------------------------------------------
// Subcommand state
// ---------------------------------------------------------------------------

struct AlignPhoneticOpts {
    std::string mri, clean, out, format = "auto";
    std::string pairing_out, report_out;
    std::string silence = "sil,sp,#";
    double threshold = 0.75;
    double mri_rate = 20.0, clean_rate = 50.0;
    std::int64_t mri_frames = -1, clean_frames = -1;
    bool one_to_one = false;
    bool as_json = false;
};

int run_align_phonetic(const AlignPhoneticOpts& o) {
    const std::set<std::string> silence = parse_silence_labels(o.silence);
    const UtteranceSet mri = load_segmentation(o.mri, sniff_format(o.mri, o.format), silence);
    const UtteranceSet clean = load_segmentation(o.clean, sniff_format(o.clean, o.format), silence);

    AlignConfig cfg;
    cfg.threshold = o.threshold;
    cfg.one_to_one = o.one_to_one;
    cfg.mri_clock = FrameClock::make(o.mri_rate);
    cfg.clean_clock = FrameClock::make(o.clean_rate);
    if (o.mri_frames >= 0) cfg.mri_n_frames = o.mri_frames;
    if (o.clean_frames >= 0) cfg.clean_n_frames = o.clean_frames;

    const AlignResult result = align_corpus(mri, clean, cfg);
    write_with(o.out, [&](std::ostream& os) { write_frame_mapping(os, result.mapping); });
    if (!o.pairing_out.empty()) {
        write_with(o.pairing_out, [&](std::ostream& os) {
            write_sentence_pairing(os, result.sentence_pairing);
        });
    }
    if (!o.report_out.empty()) {
        write_file_atomic(o.report_out, result.report.render_text());
    }
    if (o.as_json) {
        std::cout << report_to_json(result.report).dump(2) << '\n';
    } else {
        std::cout << result.report.render_text();
    }
    return 0;
}

struct AlignDtwOpts {
    std::string pairing, mri_feats, clean_feats, out;
    std::int64_t band = -1;
    bool as_json = false;
};

int run_align_dtw(const AlignDtwOpts& o) {
    std::ifstream pin(o.pairing, std::ios::binary);
    if (!pin) fail(ErrorCode::io_error, "cannot open '" + o.pairing + "'");
    const SentencePairing pairing = parse_sentence_pairing(pin);
    const auto mri = load_feature_dir(o.mri_feats);
    const auto clean = load_feature_dir(o.clean_feats);
    std::optional<std::int64_t> band;
    if (o.band >= 0) band = o.band;
    const FrameMapping mapping = align_corpus_dtw(mri, clean, pairing, band);
    write_with(o.out, [&](std::ostream& os) { write_frame_mapping(os, mapping); });

    std::size_t mapped = 0;
    for (const MappingEntry& e : mapping.entries) mapped += e.mapped() ? 1 : 0;
    if (o.as_json) {
        std::cout << json{{"frames", {{"total", mapping.entries.size()},
                                      {"mapped", mapped},
                                      {"unmapped", mapping.entries.size() - mapped}}},
                          {"method", "DTW"}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "dtw alignment: " << mapped << " mapped / " << mapping.entries.size()
                  << " frames\n";
    }
    return 0;
}

struct FeaturesOpts {
    std::string audio, out;
    double window = 0.025, hop = 0.020;
    int mels = 40;
};

int run_features_logmel(const FeaturesOpts& o) {
    MelConfig cfg;
    cfg.window_s = o.window;
    cfg.hop_s = o.hop;
    cfg.n_mels = o.mels;
    double rate = 0.0;
    const std::vector<double> audio = read_wav_pcm16(o.audio, rate);
    cfg.sample_rate_hz = rate;
    const FeatureSequence seq = extract_logmel(audio, cfg);
    write_with(o.out, [&](std::ostream& os) { write_features(os, seq); });
    std::cout << "wrote " << seq.n_frames() << " frames x " << seq.dim << " mels at "
              << seq.frame_rate_hz << " Hz\n";
    return 0;
}

struct EvalOpts {
    std::string ref, pred, stats, seg, mapping, out;
    std::string frame_table_out;
    std::string units = "normalized";
    std::string format = "auto";
    std::string silence = "sil,sp,#";
    double rate = 20.0;
    bool as_json = false;
};

int run_eval(const EvalOpts& o) {
    const ContourUnits units = contour_units_from_string(o.units);
    ContourTrack ref = load_contours(o.ref, o.rate, units);
    ContourTrack pred = load_contours(o.pred, o.rate, units);
    if (units == ContourUnits::normalized) {
        if (o.stats.empty()) fail(ErrorCode::missing_stats, "--stats is required for normalized contours");
        const NormStats stats = load_norm_stats(o.stats);
        ref = denormalize(ref, stats);
        pred = denormalize(pred, stats);
    } else if (units != ContourUnits::mm) {
        fail(ErrorCode::units_not_mm, "eval requires normalized or mm contours");
    }
    const UtteranceSet seg =
        load_segmentation(o.seg, sniff_format(o.seg, o.format), parse_silence_labels(o.silence));
    const FrameMapping mapping = load_frame_mapping(o.mapping);
    const FrameClock clock = FrameClock::make(o.rate);

    FrameErrorTable table = frame_rmse(ref, pred);
    const std::size_t n = table.n_frames();

    // Evaluated frames: mapped in the frame mapping AND non-silent.
    std::vector<bool> is_mapped(n, false);
    for (const MappingEntry& e : mapping.entries) {
        if (e.mapped() && e.source_idx >= 0 && static_cast<std::size_t>(e.source_idx) < n) {
            is_mapped[static_cast<std::size_t>(e.source_idx)] = true;
        }
    }
    std::vector<std::int64_t> all_frames;
    for (std::size_t f = 0; f < n; ++f) all_frames.push_back(static_cast<std::int64_t>(f));
    const std::vector<std::int64_t> non_silent = filter_silence(all_frames, seg, clock);
    std::vector<bool> is_voiced(n, false);
    for (std::int64_t f : non_silent) is_voiced[static_cast<std::size_t>(f)] = true;

    std::vector<std::int64_t> keep;
    for (std::size_t f = 0; f < n; ++f) {
        table.mapped[f] = is_mapped[f];
        table.silent[f] = !is_voiced[f];
        if (is_mapped[f] && is_voiced[f]) keep.push_back(static_cast<std::int64_t>(f));
    }

    const EvalReport report = aggregate(table, keep);
    write_with(o.out, [&](std::ostream& os) { write_eval_report(os, report); });
    if (!o.frame_table_out.empty()) {
        write_with(o.frame_table_out, [&](std::ostream& os) { write_frame_error_table(os, table); });
    }
    if (o.as_json) {
        std::cout << eval_report_to_json(report).dump(2) << '\n';
    } else {
        std::cout << render_report_table(report, "");
    }
    return 0;
}

struct CompareOpts {
    std::string report_a, report_b, out;
    std::string table_a, table_b;
    std::string label_a = "A", label_b = "B";
    bool paired = false;
    bool as_json = false;
};

std::vector<double> kept_column(const FrameErrorTable& t, std::size_t art,
                                const std::vector<std::int64_t>& frames) {
    std::vector<double> out;
    out.reserve(frames.size());
    for (std::int64_t f : frames) out.push_back(t.at(static_cast<std::size_t>(f), art));
    return out;
}

int run_compare(const CompareOpts& o) {
    std::ifstream ia(o.report_a, std::ios::binary), ib(o.report_b, std::ios::binary);
    if (!ia) fail(ErrorCode::io_error, "cannot open '" + o.report_a + "'");
    if (!ib) fail(ErrorCode::io_error, "cannot open '" + o.report_b + "'");
    const EvalReport ra = parse_eval_report(ia);
    const EvalReport rb = parse_eval_report(ib);
    if (ra.per_articulator.size() != rb.per_articulator.size()) {
        fail(ErrorCode::shape_mismatch, "reports list different articulator sets");
    }
    for (std::size_t i = 0; i < ra.per_articulator.size(); ++i) {
        if (ra.per_articulator[i].name != rb.per_articulator[i].name) {
            fail(ErrorCode::shape_mismatch, "reports list different articulator sets");
        }
    }

    std::vector<TTestResult> tests;
    auto add_test = [&tests](const std::string& label, const WelchResult& w) {
        tests.push_back({label, w.t, w.p, w.significant});
    };

    if (!o.paired) {
        auto welch_row = [&](const ArticulatorSummary& a, const ArticulatorSummary& b) {
            const double var_a = a.n > 1 ? a.std_rmse_mm * a.std_rmse_mm * static_cast<double>(a.n) /
                                               static_cast<double>(a.n - 1)
                                         : 0.0;
            const double var_b = b.n > 1 ? b.std_rmse_mm * b.std_rmse_mm * static_cast<double>(b.n) /
                                               static_cast<double>(b.n - 1)
                                         : 0.0;
            return welch_t_test_from_summary(a.n, a.mean_rmse_mm, var_a, b.n, b.mean_rmse_mm, var_b);
        };
        for (std::size_t i = 0; i < ra.per_articulator.size(); ++i) {
            add_test(ra.per_articulator[i].name, welch_row(ra.per_articulator[i], rb.per_articulator[i]));
        }
        add_test("GLOBAL", welch_row(ra.global, rb.global));
    } else {
        if (o.table_a.empty() || o.table_b.empty()) {
            fail(ErrorCode::missing_features, "--paired requires --table-a and --table-b");
        }
        std::ifstream ta(o.table_a, std::ios::binary), tb(o.table_b, std::ios::binary);
        if (!ta) fail(ErrorCode::io_error, "cannot open '" + o.table_a + "'");
        if (!tb) fail(ErrorCode::io_error, "cannot open '" + o.table_b + "'");
        const FrameErrorTable fa = parse_frame_error_table(ta);
        const FrameErrorTable fb = parse_frame_error_table(tb);
        if (fa.articulators != fb.articulators) {
            fail(ErrorCode::shape_mismatch, "frame tables list different articulator sets");
        }
        // Pairing over frames kept (mapped, non-silent) in both tables.
        std::vector<std::int64_t> common;
        const std::size_t n = std::min(fa.n_frames(), fb.n_frames());
        for (std::size_t f = 0; f < n; ++f) {
            if (fa.mapped[f] && !fa.silent[f] && fb.mapped[f] && !fb.silent[f]) {
                common.push_back(static_cast<std::int64_t>(f));
            }
        }
        if (common.size() < 2) fail(ErrorCode::sample_too_small, "fewer than 2 common frames");
        std::vector<double> all_a, all_b;
        for (std::size_t art = 0; art < fa.articulators.size(); ++art) {
            const std::vector<double> va = kept_column(fa, art, common);
            const std::vector<double> vb = kept_column(fb, art, common);
            add_test(fa.articulators[art], paired_t_test(va, vb));
            all_a.insert(all_a.end(), va.begin(), va.end());
            all_b.insert(all_b.end(), vb.begin(), vb.end());
        }
        add_test("GLOBAL", paired_t_test(all_a, all_b));
    }

    if (!o.out.empty()) {
        write_with(o.out, [&](std::ostream& os) {
            os << "articulator,t,p,significant\n";
            char buf[64];
            for (const TTestResult& t : tests) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g", t.t, t.p);
                os << t.label << ',' << buf << ',' << (t.significant ? 1 : 0) << '\n';
            }
        });
    }
    if (o.as_json) {
        json jt = json::array();
        for (const TTestResult& t : tests) {
            jt.push_back({{"articulator", t.label},
                          {"t", t.t},
                          {"p", t.p},
                          {"significant", t.significant}});
        }
        std::cout << json{{"report_a", eval_report_to_json(ra)},
                          {"report_b", eval_report_to_json(rb)},
                          {"variant", o.paired ? "paired" : "welch"},
                          {"tests", jt}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << render_comparison_table(ra, rb, o.label_a, o.label_b, tests);
        std::cout << "* significant difference vs " << o.label_a << " (p < 0.05, "
                  << (o.paired ? "paired t-test" : "Welch t-test") << ")\n";
    }
    return 0;
}

struct SynthOpts {
    std::string spec, out;
    int feature_dim = 0;
};

SyntheticSpec parse_synth_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
    SyntheticSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key, eq;
        double value = 0.0;
        if (!(ls >> key)) continue;  // blank
        if (!(ls >> eq >> value) || eq != "=") {
            fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": expected key = value");
        }
        if (key == "seed") spec.seed = static_cast<std::uint64_t>(value);
        else if (key == "n_sentences") spec.n_sentences = static_cast<int>(value);
        else if (key == "words_min") spec.words_per_sentence.lo = static_cast<int>(value);
        else if (key == "words_max") spec.words_per_sentence.hi = static_cast<int>(value);
        else if (key == "phones_min") spec.phones_per_word.lo = static_cast<int>(value);
        else if (key == "phones_max") spec.phones_per_word.hi = static_cast<int>(value);
        else if (key == "phone_dur_min") spec.phone_duration_s.lo = value;
        else if (key == "phone_dur_max") spec.phone_duration_s.hi = value;
        else if (key == "warp_min") spec.warp.lo = value;
        else if (key == "warp_max") spec.warp.hi = value;
        else if (key == "error_rate") spec.error_rate = value;
        else if (key == "gap_min") spec.silence_gap_s.lo = value;
        else if (key == "gap_max") spec.silence_gap_s.hi = value;
        else if (key == "mri_rate_hz") spec.mri_rate_hz = value;
        else if (key == "clean_rate_hz") spec.clean_rate_hz = value;
        else if (key == "shuffle_sentences") spec.shuffle_sentences = value != 0.0;
        else if (key == "reuse_gaps") spec.reuse_gaps = value != 0.0;
        else fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return spec;
}

int run_synth(const SynthOpts& o) {
    const SyntheticSpec spec = parse_synth_spec(o.spec);
    const SyntheticCorpus corpus = gen_synthetic(spec);
    fs::create_directories(o.out);
    write_with((fs::path(o.out) / "mri.tsv").string(),
               [&](std::ostream& os) { write_segmentation(os, corpus.mri); });
    write_with((fs::path(o.out) / "clean.tsv").string(),
               [&](std::ostream& os) { write_segmentation(os, corpus.clean); });
    write_with((fs::path(o.out) / "truth.csv").string(),
               [&](std::ostream& os) { write_frame_mapping(os, corpus.truth); });

    if (o.feature_dim > 0) {
        const FrameClock mri_clock = FrameClock::make(spec.mri_rate_hz);
        const FrameClock clean_clock = FrameClock::make(spec.clean_rate_hz);
        for (std::size_t i = 0; i < corpus.mri.sentences.size(); ++i) {
            const FeatureSequence f = synth_sentence_features(
                corpus.mri.sentences[i], mri_clock, static_cast<std::size_t>(o.feature_dim), 0.05,
                spec.seed * 2654435761u + i);
            write_with((fs::path(o.out) / "mri_feats" / (std::to_string(i) + ".feat")).string(),
                       [&](std::ostream& os) { write_features(os, f); });
        }
        for (std::size_t i = 0; i < corpus.clean.sentences.size(); ++i) {
            const FeatureSequence f = synth_sentence_features(
                corpus.clean.sentences[i], clean_clock, static_cast<std::size_t>(o.feature_dim), 0.05,
                spec.seed * 2654435761u + 0x9e3779b9u + i);
            write_with((fs::path(o.out) / "clean_feats" / (std::to_string(i) + ".feat")).string(),
                       [&](std::ostream& os) { write_features(os, f); });
        }
    }
    std::cout << "wrote synthetic corpus (" << corpus.mri.sentences.size() << " sentences, "
              << corpus.truth.entries.size() << " truth frames, " << corpus.perturbed.size()
              << " perturbed) to " << o.out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frame-level alignment and articulatory contour evaluation"};
    app.require_subcommand(1);

    // align
    CLI::App* align = app.add_subcommand("align", "align two corpora at the frame level");
    align->require_subcommand(1);

    AlignPhoneticOpts ap;
    CLI::App* phon = align->add_subcommand("phonetic", "hierarchical phonetic alignment");
    phon->add_option("--mri", ap.mri, "MRI-side segmentation file")->required();
    phon->add_option("--clean", ap.clean, "clean-side segmentation file")->required();
    phon->add_option("--threshold", ap.threshold, "sentence similarity threshold (default 0.75)");
    phon->add_option("--mri-rate", ap.mri_rate, "MRI frame rate in Hz (default 20)");
    phon->add_option("--clean-rate", ap.clean_rate, "clean frame rate in Hz (default 50)");
    phon->add_option("--mri-frames", ap.mri_frames, "override MRI frame count");
    phon->add_option("--clean-frames", ap.clean_frames, "override clean frame count");
    phon->add_option("--format", ap.format, "segmentation format: auto|tsv|textgrid");
    phon->add_option("--silence-labels", ap.silence, "comma-separated silence labels (default sil,sp,#)");
    phon->add_flag("--one-to-one", ap.one_to_one, "strict one-to-one sentence pairing");
    phon->add_option("--pairing-out", ap.pairing_out, "write sentence pairing CSV");
    phon->add_option("--report", ap.report_out, "write alignment report text file");
    phon->add_flag("--json", ap.as_json, "print the report as JSON");
    phon->add_option("-o,--out", ap.out, "output frame-mapping CSV")->required();

    AlignDtwOpts ad;
    CLI::App* dtw_cmd = align->add_subcommand("dtw", "DTW baseline alignment over features");
    dtw_cmd->add_option("--pairing", ad.pairing, "sentence pairing CSV")->required();
    dtw_cmd->add_option("--mri-feats", ad.mri_feats, "directory of <sentence_id>.feat files")->required();
    dtw_cmd->add_option("--clean-feats", ad.clean_feats, "directory of <sentence_id>.feat files")->required();
    dtw_cmd->add_option("--band", ad.band, "Sakoe-Chiba band radius in frames");
    dtw_cmd->add_flag("--json", ad.as_json, "print the summary as JSON");
    dtw_cmd->add_option("-o,--out", ad.out, "output frame-mapping CSV")->required();

    // features
    CLI::App* features = app.add_subcommand("features", "feature extraction");
    features->require_subcommand(1);
    FeaturesOpts fo;
    CLI::App* logmel = features->add_subcommand("logmel", "log-mel filterbank energies from PCM audio");
    logmel->add_option("--audio", fo.audio, "WAV file (16-bit LE PCM, mono)")->required();
    logmel->add_option("--window", fo.window, "window length in seconds (default 0.025)");
    logmel->add_option("--hop", fo.hop, "hop length in seconds (default 0.020)");
    logmel->add_option("--mels", fo.mels, "number of mel bands (default 40)");
    logmel->add_option("-o,--out", fo.out, "output feature file")->required();

    // eval
    EvalOpts eo;
    CLI::App* eval_cmd = app.add_subcommand("eval", "contour error evaluation in mm");
    eval_cmd->add_option("--ref", eo.ref, "reference contour CSV")->required();
    eval_cmd->add_option("--pred", eo.pred, "predicted contour CSV")->required();
    eval_cmd->add_option("--stats", eo.stats, "normalization stats CSV (required for normalized units)");
    eval_cmd->add_option("--seg", eo.seg, "segmentation for silence filtering")->required();
    eval_cmd->add_option("--mapping", eo.mapping, "frame-mapping CSV selecting evaluated frames")->required();
    eval_cmd->add_option("--rate", eo.rate, "contour frame rate in Hz (default 20)");
    eval_cmd->add_option("--units", eo.units, "contour units: normalized|mm (default normalized)");
    eval_cmd->add_option("--format", eo.format, "segmentation format: auto|tsv|textgrid");
    eval_cmd->add_option("--silence-labels", eo.silence, "comma-separated silence labels (default sil,sp,#)");
    eval_cmd->add_option("--frame-table", eo.frame_table_out, "write per-frame error table CSV");
    eval_cmd->add_flag("--json", eo.as_json, "print the report as JSON");
    eval_cmd->add_option("-o,--out", eo.out, "output report CSV")->required();

    // compare
    CompareOpts co;
    CLI::App* compare = app.add_subcommand("compare", "significance tests between two reports");
    compare->add_option("--report-a", co.report_a, "first eval report CSV")->required();
    compare->add_option("--report-b", co.report_b, "second eval report CSV")->required();
    compare->add_option("--label-a", co.label_a, "display label for the first condition");
    compare->add_option("--label-b", co.label_b, "display label for the second condition");
    compare->add_flag("--paired", co.paired, "paired t-test over per-frame tables");
    compare->add_option("--table-a", co.table_a, "frame table for report A (paired mode)");
    compare->add_option("--table-b", co.table_b, "frame table for report B (paired mode)");
    compare->add_flag("--json", co.as_json, "print results as JSON");
    compare->add_option("-o,--out", co.out, "write t-test results CSV");

    // synth
    SynthOpts so;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic parallel corpus with ground truth");
    synth->add_option("--spec", so.spec, "key = value spec file")->required();
    synth->add_option("--features", so.feature_dim, "also write per-sentence feature dirs with this dim");
    synth->add_option("-o,--out", so.out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (phon->parsed()) return run_align_phonetic(ap);
        if (dtw_cmd->parsed()) return run_align_dtw(ad);
        if (logmel->parsed()) return run_features_logmel(fo);
        if (eval_cmd->parsed()) return run_eval(eo);
        if (compare->parsed()) return run_compare(co);
        if (synth->parsed()) return run_synth(so);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
