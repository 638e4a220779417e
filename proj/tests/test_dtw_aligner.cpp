#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "articalign/dtw_aligner.hpp"
#include "oracles.hpp"

using namespace articalign;

namespace {

FeatureSequence seq_1d(const std::vector<double>& values, double rate = 50.0) {
    FeatureSequence s;
    s.frame_rate_hz = rate;
    s.dim = 1;
    s.values = values;
    return s;
}

std::vector<double> sine(double freq_hz, double amplitude, double seconds, double rate) {
    std::vector<double> out(static_cast<std::size_t>(seconds * rate));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate);
    }
    return out;
}

}  // namespace

TEST_CASE("logmel on silence yields log(floor) everywhere") {
    const std::vector<double> zeros(16000, 0.0);
    const MelConfig cfg;
    const FeatureSequence seq = extract_logmel(zeros, cfg);
    CHECK(seq.n_frames() == 49);  // floor((16000-400)/320)+1
    CHECK(seq.dim == 40);
    CHECK(seq.frame_rate_hz == doctest::Approx(50.0));
    for (double v : seq.values) CHECK(v == doctest::Approx(std::log(cfg.floor)).epsilon(1e-12));
}

TEST_CASE("logmel peak band matches a direct DFT oracle on a pure tone") {
    const MelConfig cfg;
    const std::vector<double> audio = sine(1000.0, 0.5, 1.0, cfg.sample_rate_hz);
    const FeatureSequence seq = extract_logmel(audio, cfg);

    // oracle: naive DFT power of one Hann-windowed frame + its own filterbank
    const std::size_t window = 400, hop = 320, n_fft = 512;
    const std::size_t check_frame = 5;
    std::vector<double> frame(window);
    for (std::size_t i = 0; i < window; ++i) {
        const double hann =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / window));
        frame[i] = audio[check_frame * hop + i] * hann;
    }
    const std::vector<double> power = oracles::dft_power(frame, n_fft);

    auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
    auto mel_to_hz = [](double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); };
    const double mel_max = hz_to_mel(8000.0);
    std::vector<double> oracle_band(40, 0.0);
    for (int m = 0; m < 40; ++m) {
        const double lo = mel_to_hz(mel_max * m / 41.0);
        const double center = mel_to_hz(mel_max * (m + 1) / 41.0);
        const double hi = mel_to_hz(mel_max * (m + 2) / 41.0);
        for (std::size_t k = 0; k < power.size(); ++k) {
            const double f = static_cast<double>(k) * 16000.0 / n_fft;
            if (f <= lo || f >= hi) continue;
            const double w = f <= center ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
            oracle_band[m] += w * power[k];
        }
    }
    int oracle_argmax = 0;
    for (int m = 1; m < 40; ++m) {
        if (oracle_band[m] > oracle_band[oracle_argmax]) oracle_argmax = m;
    }
    // the oracle band must bracket 1 kHz
    CHECK(mel_to_hz(mel_max * oracle_argmax / 41.0) < 1000.0);
    CHECK(mel_to_hz(mel_max * (oracle_argmax + 2) / 41.0) > 1000.0);

    // every interior frame peaks in the same band, and the checked frame's
    // energies match the oracle closely
    for (std::size_t f = 1; f + 1 < seq.n_frames(); ++f) {
        const double* row = seq.frame(f);
        int argmax = 0;
        for (int m = 1; m < 40; ++m) {
            if (row[m] > row[argmax]) argmax = m;
        }
        CHECK(argmax == oracle_argmax);
    }
    const double* row = seq.frame(check_frame);
    for (int m = 0; m < 40; ++m) {
        CHECK(row[m] == doctest::Approx(std::log(oracle_band[m] + cfg.floor)).epsilon(1e-6));
    }
}

TEST_CASE("scaling audio by 2 adds log 4 to every band energy") {
    // broadband noise keeps every band's energy far above the log floor
    const MelConfig cfg;
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> d(-0.25, 0.25);
    std::vector<double> audio(8000);
    for (double& v : audio) v = d(rng);
    std::vector<double> doubled = audio;
    for (double& v : doubled) v *= 2.0;
    const FeatureSequence a = extract_logmel(audio, cfg);
    const FeatureSequence b = extract_logmel(doubled, cfg);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(b.values[i] - a.values[i] == doctest::Approx(std::log(4.0)).epsilon(1e-6));
    }
}

TEST_CASE("logmel rejects too-short audio") {
    const std::vector<double> tiny(100, 0.0);
    CHECK_THROWS_WITH_AS(extract_logmel(tiny, MelConfig{}), doctest::Contains("AUDIO_TOO_SHORT"), Error);
}

TEST_CASE("dtw identity gives zero cost and a pure diagonal") {
    std::mt19937 rng(4);
    std::vector<double> v(20);
    for (double& x : v) x = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const FeatureSequence x = seq_1d(v);
    const WarpingPath path = dtw(x, x);
    CHECK(path.total_cost == 0.0);
    REQUIRE(path.steps.size() == 20);
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        CHECK(path.steps[i].first == static_cast<std::int64_t>(i));
        CHECK(path.steps[i].second == static_cast<std::int64_t>(i));
    }
}

TEST_CASE("dtw matches the enumerated example path") {
    const WarpingPath path = dtw(seq_1d({0, 1, 2}), seq_1d({0, 1, 1, 2}));
    CHECK(path.total_cost == 0.0);
    const std::vector<std::pair<std::int64_t, std::int64_t>> expected = {{0, 0}, {1, 1}, {1, 2}, {2, 3}};
    CHECK(path.steps == expected);
}

TEST_CASE("dtw cost equals brute-force enumeration on small sequences") {
    std::mt19937 rng(17);
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<double> xv(1 + rng() % 6), yv(1 + rng() % 6);
        for (double& v : xv) v = static_cast<double>(rng() % 3);
        for (double& v : yv) v = static_cast<double>(rng() % 3);
        const double brute = oracles::dtw_min_cost_bruteforce(xv, yv);
        const WarpingPath path = dtw(seq_1d(xv), seq_1d(yv));
        CHECK(path.total_cost == doctest::Approx(brute).epsilon(1e-12));
        CHECK(path.total_cost == dtw(seq_1d(yv), seq_1d(xv)).total_cost);
    }
}

TEST_CASE("path obeys boundary and step constraints") {
    std::mt19937 rng(23);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> xv(1 + rng() % 10), yv(1 + rng() % 10);
        for (double& v : xv) v = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        for (double& v : yv) v = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        const WarpingPath path = dtw(seq_1d(xv), seq_1d(yv));
        REQUIRE(!path.steps.empty());
        CHECK(path.steps.front() == std::pair<std::int64_t, std::int64_t>{0, 0});
        CHECK(path.steps.back() ==
              std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(xv.size() - 1),
                                                    static_cast<std::int64_t>(yv.size() - 1)});
        for (std::size_t k = 1; k < path.steps.size(); ++k) {
            const auto di = path.steps[k].first - path.steps[k - 1].first;
            const auto dj = path.steps[k].second - path.steps[k - 1].second;
            CHECK(di >= 0);
            CHECK(dj >= 0);
            CHECK(di <= 1);
            CHECK(dj <= 1);
            CHECK(di + dj >= 1);
        }
        CHECK(path.total_cost >= 0.0);
    }
}

TEST_CASE("cost is non-increasing as the band radius grows") {
    std::mt19937 rng(31);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<double> xv(8 + rng() % 8), yv(8 + rng() % 8);
        for (double& v : xv) v = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        for (double& v : yv) v = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        double prev = std::numeric_limits<double>::infinity();
        for (std::int64_t radius : {2, 4, 8, 16}) {
            double cost;
            try {
                cost = dtw(seq_1d(xv), seq_1d(yv), radius).total_cost;
            } catch (const Error&) {
                continue;  // infeasible at this radius
            }
            CHECK(cost <= prev + 1e-12);
            prev = cost;
        }
        CHECK(dtw(seq_1d(xv), seq_1d(yv)).total_cost <= prev + 1e-12);
    }
}

TEST_CASE("dtw reports contract violations") {
    FeatureSequence x = seq_1d({0, 1});
    FeatureSequence y;
    y.frame_rate_hz = 50.0;
    y.dim = 2;
    y.values = {0, 1};
    CHECK_THROWS_WITH_AS(dtw(x, y), doctest::Contains("DIMENSION_MISMATCH"), Error);
    // band radius 1 cannot bridge lengths 2 vs 10
    CHECK_THROWS_WITH_AS(dtw(seq_1d({0, 1}), seq_1d({0, 1, 2, 0, 1, 2, 0, 1, 2, 0}), 1),
                         doctest::Contains("BAND_INFEASIBLE"), Error);
}

TEST_CASE("path_to_frame_mapping collapses by median") {
    WarpingPath diag;
    for (std::int64_t i = 0; i < 5; ++i) diag.steps.emplace_back(i, i);
    const FrameMapping identity = path_to_frame_mapping(diag, 50.0, 50.0);
    REQUIRE(identity.entries.size() == 5);
    for (const MappingEntry& e : identity.entries) CHECK(e.target_idx == e.source_idx);

    WarpingPath staircase;
    staircase.steps = {{0, 0}, {0, 1}, {0, 2}, {1, 3}};
    const FrameMapping collapsed = path_to_frame_mapping(staircase, 50.0, 50.0);
    REQUIRE(collapsed.entries.size() == 2);
    CHECK(collapsed.entries[0].target_idx == 1);  // median of {0,1,2}
    CHECK(collapsed.entries[1].target_idx == 3);
    CHECK(collapsed.entries[0].method == AlignMethod::dtw);
}

TEST_CASE("path_to_frame_mapping is total and non-decreasing on random paths") {
    std::mt19937 rng(41);
    for (int iter = 0; iter < 200; ++iter) {
        const std::int64_t n = 1 + rng() % 12, m = 1 + rng() % 12;
        WarpingPath path;
        std::int64_t i = 0, j = 0;
        path.steps.emplace_back(0, 0);
        while (i < n - 1 || j < m - 1) {
            const bool can_i = i < n - 1, can_j = j < m - 1;
            const int move = static_cast<int>(rng() % 3);
            if (can_i && can_j && move == 0) {
                ++i;
                ++j;
            } else if (can_i && (move == 1 || !can_j)) {
                ++i;
            } else if (can_j) {
                ++j;
            } else {
                ++i;
            }
            path.steps.emplace_back(i, j);
        }
        const FrameMapping mapping = path_to_frame_mapping(path, 50.0, 50.0);
        REQUIRE(mapping.entries.size() == static_cast<std::size_t>(n));
        std::int64_t prev = -1;
        for (std::int64_t src = 0; src < n; ++src) {
            const MappingEntry& e = mapping.entries[static_cast<std::size_t>(src)];
            CHECK(e.source_idx == src);
            CHECK(e.mapped());
            CHECK(e.target_idx >= prev);
            prev = e.target_idx;
        }
    }
}

TEST_CASE("align_corpus_dtw on identical corpora is the identity") {
    std::mt19937 rng(51);
    std::vector<SentenceFeatures> corpus;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> v(10 + rng() % 10);
        for (double& x : v) x = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        corpus.push_back({s, seq_1d(v)});
    }
    SentencePairing pairing;
    for (int s = 0; s < 3; ++s) pairing.pairs.push_back({s, s, 1.0});
    const FrameMapping mapping = align_corpus_dtw(corpus, corpus, pairing);
    std::size_t total = 0;
    for (const SentenceFeatures& f : corpus) total += f.features.n_frames();
    REQUIRE(mapping.entries.size() == total);
    for (const MappingEntry& e : mapping.entries) {
        CHECK(e.mapped());
        CHECK(e.target_idx == e.source_idx);
    }
}

TEST_CASE("align_corpus_dtw recovers a frame-duplication warp within one frame") {
    std::vector<double> base(30);
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = static_cast<double>(i);
    std::vector<double> doubled;
    for (double v : base) {
        doubled.push_back(v);
        doubled.push_back(v);
    }
    const std::vector<SentenceFeatures> mri = {{0, seq_1d(base)}};
    const std::vector<SentenceFeatures> clean = {{0, seq_1d(doubled, 100.0)}};
    SentencePairing pairing;
    pairing.pairs.push_back({0, 0, 1.0});
    const FrameMapping mapping = align_corpus_dtw(mri, clean, pairing);
    for (const MappingEntry& e : mapping.entries) {
        REQUIRE(e.mapped());
        CHECK(std::llabs(e.target_idx - 2 * e.source_idx) <= 1);
    }
}

TEST_CASE("align_corpus_dtw handles unmatched sentences and missing features") {
    const std::vector<SentenceFeatures> mri = {{0, seq_1d({0, 1, 2})}, {1, seq_1d({2, 1, 0})}};
    const std::vector<SentenceFeatures> clean = {{0, seq_1d({0, 1, 2})}};
    SentencePairing pairing;
    pairing.pairs.push_back({0, 0, 1.0});
    pairing.unmatched_mri.push_back(1);
    const FrameMapping mapping = align_corpus_dtw(mri, clean, pairing);
    REQUIRE(mapping.entries.size() == 6);
    for (const MappingEntry& e : mapping.entries) {
        if (e.source_idx < 3) {
            CHECK(e.mapped());
        } else {
            CHECK(!e.mapped());
            CHECK(e.sentence_id == 1);
        }
    }

    SentencePairing both;
    both.pairs = {{0, 0, 1.0}, {1, 1, 1.0}};
    CHECK_THROWS_WITH_AS(align_corpus_dtw(mri, clean, both),
                         doctest::Contains("MISSING_FEATURES"), Error);
}
