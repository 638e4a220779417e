#include <random>
#include <sstream>

#include "doctest.h"

#include "articalign/corpus_model.hpp"

using namespace articalign;

namespace {

UtteranceSet parse_tsv(const std::string& text) {
    std::istringstream in(text);
    return parse_segmentation(in, SegmentationFormat::tsv);
}

std::string write_tsv(const UtteranceSet& set) {
    std::ostringstream out;
    write_segmentation(out, set);
    return out.str();
}

// Hand-written canonical fixture: "après une heure", 3 words, 8 phones.
const char* kFixture =
    "tier\tstart_s\tend_s\tlabel\n"
    "sentence\t1.000000\t2.200000\taprès une heure\n"
    "word\t1.000000\t1.350000\taprès\n"
    "phone\t1.000000\t1.100000\ta\n"
    "phone\t1.100000\t1.200000\tp\n"
    "phone\t1.200000\t1.280000\tʁ\n"
    "phone\t1.280000\t1.350000\tɛ\n"
    "word\t1.400000\t1.600000\tune\n"
    "phone\t1.400000\t1.500000\ty\n"
    "phone\t1.500000\t1.600000\tn\n"
    "word\t1.650000\t2.200000\theure\n"
    "phone\t1.650000\t1.900000\tœ\n"
    "phone\t1.900000\t2.200000\tʁ\n";

}  // namespace

TEST_CASE("normalize_text definition cases") {
    CHECK(normalize_text("Après  une HEURE.") == "après une heure");
    CHECK(normalize_text("") == "");
    CHECK(normalize_text("l'heure") == "l'heure");
    CHECK(normalize_text("l’heure") == "l'heure");  // typographic apostrophe
    CHECK(normalize_text("  a\tb\nc ") == "a b c");
    CHECK(normalize_text("#") == "");
    CHECK(normalize_text("rendez-vous") == "rendez-vous");
    CHECK(normalize_text("- tiret -") == "tiret");
    CHECK(normalize_text("Après") == "après");  // combining grave composes
    CHECK(normalize_text("Ça, «dit-elle»!") == "ça dit-elle");
}

TEST_CASE("frame_mid_time from the frame-center convention") {
    const FrameClock mri = FrameClock::make(20.0);
    const FrameClock ssl = FrameClock::make(50.0);
    CHECK(frame_mid_time(0, mri) == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(frame_mid_time(99, mri) == doctest::Approx(4.975).epsilon(1e-12));
    CHECK(frame_mid_time(7, ssl) == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("frame_mid_time strictly increasing") {
    const FrameClock clock = FrameClock::make(20.0);
    for (std::int64_t i = 0; i < 1000; ++i) {
        CHECK(frame_mid_time(i, clock) < frame_mid_time(i + 1, clock));
    }
}

TEST_CASE("FrameClock invariants") {
    const FrameClock c = FrameClock::make(50.0, 16000.0);
    CHECK(c.frame_period_samples == 320);
    const FrameClock m = FrameClock::make(20.0, 16000.0);
    CHECK(m.frame_period_samples == 800);
    CHECK_THROWS_AS(FrameClock::make(0.0), Error);
    CHECK_THROWS_AS(FrameClock::make(-5.0), Error);
}

TEST_CASE("frames_covering counts frames with mid-time inside the duration") {
    const FrameClock c = FrameClock::make(20.0);
    CHECK(frames_covering(1.0, c) == 20);
    CHECK(frames_covering(0.0, c) == 0);
    CHECK(frames_covering(0.024, c) == 0);   // first mid at 0.025
    CHECK(frames_covering(0.026, c) == 1);
    CHECK(frames_covering(1.03, c) == 21);   // frame 20 mid at 1.025
}

TEST_CASE("TSV fixture parses into the expected structure") {
    const UtteranceSet set = parse_tsv(kFixture);
    REQUIRE(set.sentences.size() == 1);
    const SentenceInterval& s = set.sentences[0];
    CHECK(s.text == "après une heure");
    REQUIRE(s.words.size() == 3);
    std::size_t phones = 0;
    for (const WordInterval& w : s.words) phones += w.phones.size();
    CHECK(phones == 8);
    CHECK(s.words[0].text == "après");
    CHECK(s.words[0].phones[2].label == "ʁ");
    CHECK(set.total_duration_s == doctest::Approx(2.2));
}

TEST_CASE("non-monotone interval rejected") {
    const std::string bad =
        "tier\tstart_s\tend_s\tlabel\n"
        "sentence\t1.000000\t2.000000\tabc\n"
        "word\t1.500000\t1.400000\tabc\n";
    CHECK_THROWS_WITH_AS(parse_tsv(bad), doctest::Contains("NON_MONOTONE_TIMES"), Error);
}

TEST_CASE("parse rejects structural errors") {
    CHECK_THROWS_WITH_AS(parse_tsv("tier\tstart_s\tend_s\tlabel\n"),
                         doctest::Contains("EMPTY_CORPUS"), Error);
    CHECK_THROWS_WITH_AS(parse_tsv("bogus header\n"), doctest::Contains("MALFORMED_LINE"), Error);
    // overlapping sentences
    CHECK_THROWS_WITH_AS(parse_tsv("tier\tstart_s\tend_s\tlabel\n"
                                   "sentence\t0.000000\t2.000000\taa\n"
                                   "sentence\t1.000000\t3.000000\tbb\n"),
                         doctest::Contains("OVERLAPPING_INTERVALS"), Error);
    // non-silence phone outside every word
    CHECK_THROWS_WITH_AS(parse_tsv("tier\tstart_s\tend_s\tlabel\n"
                                   "sentence\t0.000000\t2.000000\taa\n"
                                   "word\t0.000000\t1.000000\taa\n"
                                   "phone\t0.000000\t1.000000\ta\n"
                                   "phone\t1.200000\t1.500000\tb\n"),
                         doctest::Contains("OVERLAPPING_INTERVALS"), Error);
    // malformed field count
    CHECK_THROWS_WITH_AS(parse_tsv("tier\tstart_s\tend_s\tlabel\n"
                                   "sentence\t0.000000\t2.000000\n"),
                         doctest::Contains("line 2"), Error);
}

TEST_CASE("silence phones between words are dropped, not errors") {
    const UtteranceSet set = parse_tsv(
        "tier\tstart_s\tend_s\tlabel\n"
        "sentence\t0.000000\t2.000000\tun deux\n"
        "word\t0.000000\t0.900000\tun\n"
        "phone\t0.000000\t0.900000\ta\n"
        "phone\t0.900000\t1.100000\tsil\n"
        "word\t1.100000\t2.000000\tdeux\n"
        "phone\t1.100000\t2.000000\tb\n");
    REQUIRE(set.sentences.size() == 1);
    CHECK(set.sentences[0].words.size() == 2);
    CHECK(set.sentences[0].words[0].phones.size() == 1);
}

TEST_CASE("write then parse is the identity on the canonical fixture") {
    const UtteranceSet set = parse_tsv(kFixture);
    CHECK(write_tsv(set) == kFixture);
    const UtteranceSet again = parse_tsv(write_tsv(set));
    CHECK(write_tsv(again) == kFixture);
}

TEST_CASE("segmentation round-trip property on generated sets") {
    std::mt19937 rng(42);
    auto us = [&rng](double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(rng);
    };
    // every time lands on the microsecond grid, like the writer's 6 decimals
    auto q = [](double t) { return std::round(t * 1e6) / 1e6; };
    for (int iter = 0; iter < 25; ++iter) {
        UtteranceSet set;
        double cursor = 0.0;
        const int n_sentences = 1 + static_cast<int>(rng() % 5);
        for (int s = 0; s < n_sentences; ++s) {
            SentenceInterval si;
            cursor = q(cursor + us(0.05, 0.2));
            si.start_s = cursor;
            const int n_words = 1 + static_cast<int>(rng() % 4);
            std::string text;
            for (int w = 0; w < n_words; ++w) {
                WordInterval wi;
                wi.start_s = cursor;
                wi.text = std::string(1, static_cast<char>('a' + rng() % 26)) +
                          std::string(1, static_cast<char>('a' + rng() % 26));
                const int n_phones = 1 + static_cast<int>(rng() % 3);
                for (int p = 0; p < n_phones; ++p) {
                    PhoneInterval pi;
                    pi.start_s = cursor;
                    cursor = q(cursor + us(0.03, 0.2));
                    pi.end_s = cursor;
                    pi.label = std::string(1, static_cast<char>('a' + rng() % 26));
                    wi.phones.push_back(pi);
                }
                wi.end_s = cursor;
                if (!text.empty()) text += ' ';
                text += wi.text;
                si.words.push_back(wi);
                cursor = q(cursor + us(0.01, 0.05));
            }
            si.end_s = si.words.back().end_s;
            si.text = text;
            cursor = si.end_s;
            set.sentences.push_back(si);
            set.total_duration_s = cursor;
            cursor = q(cursor + us(0.1, 0.3));
        }
        const std::string once = write_tsv(set);
        const UtteranceSet parsed = parse_tsv(once);
        CHECK(write_tsv(parsed) == once);
        REQUIRE(parsed.sentences.size() == set.sentences.size());
        for (std::size_t s = 0; s < set.sentences.size(); ++s) {
            CHECK(parsed.sentences[s].start_s == set.sentences[s].start_s);
            CHECK(parsed.sentences[s].words.size() == set.sentences[s].words.size());
        }
    }
}

TEST_CASE("TextGrid subset reader matches the TSV structure") {
    const std::string grid =
        "File type = \"ooTextFile\"\n"
        "Object class = \"TextGrid\"\n"
        "\n"
        "xmin = 0\n"
        "xmax = 2.5\n"
        "tiers? <exists>\n"
        "size = 3\n"
        "item []:\n"
        "    item [1]:\n"
        "        class = \"IntervalTier\"\n"
        "        name = \"sentence\"\n"
        "        xmin = 0\n"
        "        xmax = 2.5\n"
        "        intervals: size = 2\n"
        "        intervals [1]:\n"
        "            xmin = 0\n"
        "            xmax = 1.0\n"
        "            text = \"\"\n"
        "        intervals [2]:\n"
        "            xmin = 1.0\n"
        "            xmax = 2.2\n"
        "            text = \"Après une heure.\"\n"
        "    item [2]:\n"
        "        class = \"IntervalTier\"\n"
        "        name = \"words\"\n"
        "        xmin = 0\n"
        "        xmax = 2.5\n"
        "        intervals: size = 2\n"
        "        intervals [1]:\n"
        "            xmin = 1.0\n"
        "            xmax = 1.35\n"
        "            text = \"après\"\n"
        "        intervals [2]:\n"
        "            xmin = 1.4\n"
        "            xmax = 1.6\n"
        "            text = \"une\"\n"
        "    item [3]:\n"
        "        class = \"IntervalTier\"\n"
        "        name = \"phones\"\n"
        "        xmin = 0\n"
        "        xmax = 2.5\n"
        "        intervals: size = 2\n"
        "        intervals [1]:\n"
        "            xmin = 1.0\n"
        "            xmax = 1.35\n"
        "            text = \"a\"\n"
        "        intervals [2]:\n"
        "            xmin = 1.4\n"
        "            xmax = 1.6\n"
        "            text = \"y\"\n";
    std::istringstream in(grid);
    const UtteranceSet set = parse_segmentation(in, SegmentationFormat::textgrid_subset);
    REQUIRE(set.sentences.size() == 1);
    CHECK(set.sentences[0].text == "après une heure");
    CHECK(set.sentences[0].words.size() == 2);
    CHECK(set.sentences[0].words[0].phones.size() == 1);
    CHECK(set.total_duration_s == doctest::Approx(2.5));  // file xmax
}

TEST_CASE("contour CSV structural round-trip") {
    ContourTrack track = ContourTrack::zeros(2);
    std::mt19937 rng(7);
    for (double& v : track.coords) v = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    std::ostringstream out;
    write_contours(out, track);
    std::istringstream in(out.str());
    const ContourTrack parsed = parse_contours(in);
    CHECK(parsed.n_frames() == 2);
    CHECK(parsed.coords == track.coords);  // %.17g serialization is lossless
    std::ostringstream out2;
    write_contours(out2, parsed);
    CHECK(out2.str() == out.str());
}

TEST_CASE("contour CSV rejects bad structure") {
    ContourTrack track = ContourTrack::zeros(1);
    std::ostringstream out;
    write_contours(out, track);
    std::string text = out.str();
    // drop the last row: frame has != 400 coordinate values
    text.erase(text.rfind("0,vocal_folds,49"));
    std::istringstream in(text);
    CHECK_THROWS_WITH_AS(parse_contours(in), doctest::Contains("DIMENSION_MISMATCH"), Error);

    std::istringstream bad_header("frame,art,point,x,y\n");
    CHECK_THROWS_WITH_AS(parse_contours(bad_header), doctest::Contains("MALFORMED_HEADER"), Error);

    std::string nan_text = out.str();
    const std::size_t pos = nan_text.find("0,arytenoid_cartilage,0,0,0");
    nan_text.replace(pos, std::string("0,arytenoid_cartilage,0,0,0").size(),
                     "0,arytenoid_cartilage,0,nan,0");
    std::istringstream nan_in(nan_text);
    CHECK_THROWS_WITH_AS(parse_contours(nan_in), doctest::Contains("NON_FINITE_VALUE"), Error);
}

TEST_CASE("norm stats round-trip and validation") {
    NormStats stats;
    for (const std::string& name : canonical_articulators()) {
        stats.per_articulator[name] = {AxisStats{60.0, 7.5}, AxisStats{70.25, 3.125}};
    }
    std::ostringstream out;
    write_norm_stats(out, stats);
    std::istringstream in(out.str());
    const NormStats parsed = parse_norm_stats(in);
    CHECK(parsed.pixel_size_mm == stats.pixel_size_mm);
    CHECK(parsed.per_articulator.size() == 8);
    CHECK(parsed.per_articulator.at("tongue")[1].std == 3.125);

    std::istringstream missing("articulator,axis,mean,std\ntongue,x,1,2\n");
    CHECK_THROWS_WITH_AS(parse_norm_stats(missing), doctest::Contains("pixel_size_mm"), Error);
    std::istringstream bad_std("articulator,axis,mean,std\ntongue,x,1,0\npixel_size_mm,1.62\n");
    CHECK_THROWS_WITH_AS(parse_norm_stats(bad_std), doctest::Contains("MALFORMED_LINE"), Error);
}

TEST_CASE("feature file round-trip and errors") {
    FeatureSequence seq;
    seq.frame_rate_hz = 50.0;
    seq.dim = 4;
    seq.values = {0.5, -1.25, 3.0, 0.0625, 1e-3, 2.0, -7.0, 0.1};
    std::ostringstream out;
    write_features(out, seq);
    std::istringstream in(out.str());
    const FeatureSequence parsed = parse_features(in);
    CHECK(parsed.dim == 4);
    CHECK(parsed.n_frames() == 2);
    CHECK(parsed.frame_rate_hz == 50.0);
    CHECK(parsed.values == seq.values);

    // row with dim-1 values
    std::istringstream short_row("frames=1 dim=4 rate_hz=50\n1 2 3\n");
    CHECK_THROWS_WITH_AS(parse_features(short_row), doctest::Contains("DIMENSION_MISMATCH"), Error);
    std::istringstream bad_header("frames=x dim=4 rate_hz=50\n");
    CHECK_THROWS_WITH_AS(parse_features(bad_header), doctest::Contains("MALFORMED_HEADER"), Error);
    std::istringstream nan_row("frames=1 dim=2 rate_hz=50\n1 nan\n");
    CHECK_THROWS_WITH_AS(parse_features(nan_row), doctest::Contains("NON_FINITE_VALUE"), Error);
}

TEST_CASE("frame mapping round-trip on random mappings") {
    std::mt19937 rng(99);
    for (int iter = 0; iter < 50; ++iter) {
        FrameMapping mapping;
        mapping.source_frame_rate_hz = 20.0;
        mapping.target_frame_rate_hz = 50.0;
        std::int64_t src = 0;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            MappingEntry e;
            e.source_idx = src;
            src += 1 + static_cast<std::int64_t>(rng() % 3);
            e.target_idx = (rng() % 4 == 0) ? kUnmappedFrame : static_cast<std::int64_t>(rng() % 500);
            e.method = (rng() % 2 == 0) ? AlignMethod::phonetic : AlignMethod::dtw;
            e.phone = (rng() % 3 == 0) ? "" : std::string(1, static_cast<char>('a' + rng() % 26));
            e.sentence_id = static_cast<std::int32_t>(rng() % 20) - 1;
            e.clamped = rng() % 5 == 0;
            mapping.entries.push_back(e);
        }
        std::ostringstream out;
        write_frame_mapping(out, mapping);
        std::istringstream in(out.str());
        const FrameMapping parsed = parse_frame_mapping(in);
        parsed.validate();
        REQUIRE(parsed.entries.size() == mapping.entries.size());
        std::ostringstream out2;
        write_frame_mapping(out2, parsed);
        CHECK(out2.str() == out.str());
        for (std::size_t i = 0; i < mapping.entries.size(); ++i) {
            CHECK(parsed.entries[i].source_idx == mapping.entries[i].source_idx);
            CHECK(parsed.entries[i].target_idx == mapping.entries[i].target_idx);
            CHECK(parsed.entries[i].phone == mapping.entries[i].phone);
            CHECK(parsed.entries[i].clamped == mapping.entries[i].clamped);
        }
    }
}

TEST_CASE("frame mapping parser rejects non-monotone sources") {
    std::istringstream in(
        "source_idx,target_idx,method,phone,sentence_id,clamped\n"
        "3,1,PHONETIC,a,0,0\n"
        "2,2,PHONETIC,a,0,0\n");
    CHECK_THROWS_WITH_AS(parse_frame_mapping(in), doctest::Contains("NON_MONOTONE_TIMES"), Error);
}
