#include "articalign/dtw_aligner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>

namespace articalign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fft_inplace(std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    // bit-reversal permutation
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j > i) std::swap(x[i], x[j]);
        std::size_t m = n >> 1;
        while (m >= 1 && j >= m) {
            j -= m;
            m >>= 1;
        }
        j += m;
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filterbank as bin weights; filters span 0..Nyquist.
std::vector<std::vector<double>> mel_filterbank(int n_mels, std::size_t n_bins, double sample_rate_hz,
                                                std::size_t n_fft) {
    const double nyquist = sample_rate_hz / 2.0;
    const double mel_max = hz_to_mel(nyquist);
    std::vector<double> edges(n_mels + 2);
    for (int i = 0; i < n_mels + 2; ++i) {
        edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(n_mels + 1));
    }
    std::vector<std::vector<double>> filters(n_mels, std::vector<double>(n_bins, 0.0));
    for (int m = 0; m < n_mels; ++m) {
        const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n_fft);
            if (f <= lo || f >= hi) continue;
            filters[m][k] = f <= center ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
        }
    }
    return filters;
}

}  // namespace

FeatureSequence extract_logmel(std::span<const double> audio, const MelConfig& cfg) {
    if (!(cfg.hop_s > 0.0) || cfg.hop_s > cfg.window_s || cfg.n_mels < 1) {
        fail(ErrorCode::invalid_clock, "mel config requires 0 < hop_s <= window_s and n_mels >= 1");
    }
    const std::size_t window = static_cast<std::size_t>(std::llround(cfg.window_s * cfg.sample_rate_hz));
    const std::size_t hop = static_cast<std::size_t>(std::llround(cfg.hop_s * cfg.sample_rate_hz));
    if (audio.size() < window || window == 0 || hop == 0) {
        fail(ErrorCode::audio_too_short,
             "need at least " + std::to_string(window) + " samples, got " + std::to_string(audio.size()));
    }
    for (double s : audio) {
        if (!std::isfinite(s)) fail(ErrorCode::non_finite_value, "non-finite audio sample");
    }

    std::size_t n_fft = 1;
    while (n_fft < window) n_fft <<= 1;
    const std::size_t n_bins = n_fft / 2 + 1;

    std::vector<double> hann(window);
    for (std::size_t i = 0; i < window; ++i) {
        hann[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(window)));
    }
    const auto filters = mel_filterbank(cfg.n_mels, n_bins, cfg.sample_rate_hz, n_fft);

    const std::size_t n_frames = (audio.size() - window) / hop + 1;
    FeatureSequence seq;
    seq.frame_rate_hz = 1.0 / cfg.hop_s;
    seq.dim = static_cast<std::size_t>(cfg.n_mels);
    seq.values.resize(n_frames * seq.dim);

    std::vector<std::complex<double>> buf(n_fft);
    std::vector<double> power(n_bins);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const double* src = audio.data() + f * hop;
        for (std::size_t i = 0; i < window; ++i) buf[i] = src[i] * hann[i];
        std::fill(buf.begin() + window, buf.end(), std::complex<double>(0.0, 0.0));
        fft_inplace(buf);
        for (std::size_t k = 0; k < n_bins; ++k) power[k] = std::norm(buf[k]);
        double* out = seq.frame(f);
        for (int m = 0; m < cfg.n_mels; ++m) {
            double e = 0.0;
            const std::vector<double>& w = filters[m];
            for (std::size_t k = 0; k < n_bins; ++k) e += w[k] * power[k];
            out[m] = std::log(e + cfg.floor);
        }
    }
    return seq;
}

WarpingPath dtw(const FeatureSequence& x, const FeatureSequence& y,
                std::optional<std::int64_t> band_radius) {
    if (x.dim != y.dim) {
        fail(ErrorCode::dimension_mismatch, "feature dims differ: " + std::to_string(x.dim) + " vs " +
                                                std::to_string(y.dim));
    }
    const std::size_t n = x.n_frames();
    const std::size_t m = y.n_frames();
    if (n == 0 || m == 0) fail(ErrorCode::dimension_mismatch, "empty feature sequence");

    auto in_band = [&](std::size_t i, std::size_t j) {
        if (!band_radius) return true;
        const double center = static_cast<double>(i) * static_cast<double>(m) / static_cast<double>(n);
        return std::abs(center - static_cast<double>(j)) <= static_cast<double>(*band_radius);
    };
    auto local = [&](std::size_t i, std::size_t j) {
        const double* xi = x.frame(i);
        const double* yj = y.frame(j);
        double acc = 0.0;
        for (std::size_t d = 0; d < x.dim; ++d) {
            const double diff = xi[d] - yj[d];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    };

    std::vector<double> cost(n * m, kInf);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return cost[i * m + j]; };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!in_band(i, j)) continue;
            double best = kInf;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
                if (i > 0) best = std::min(best, at(i - 1, j));
                if (j > 0) best = std::min(best, at(i, j - 1));
            }
            if (best < kInf) at(i, j) = best + local(i, j);
        }
    }

    if (!(at(n - 1, m - 1) < kInf)) {
        fail(ErrorCode::band_infeasible,
             "band radius " + std::to_string(band_radius.value_or(-1)) + " admits no path for lengths " +
                 std::to_string(n) + " x " + std::to_string(m));
    }

    WarpingPath path;
    path.total_cost = at(n - 1, m - 1);
    std::size_t i = n - 1, j = m - 1;
    path.steps.emplace_back(i, j);
    while (i > 0 || j > 0) {
        // tie-break: diagonal, then (1,0) (advance i), then (0,1)
        double diag = (i > 0 && j > 0) ? at(i - 1, j - 1) : kInf;
        double up = i > 0 ? at(i - 1, j) : kInf;
        double left = j > 0 ? at(i, j - 1) : kInf;
        if (diag <= up && diag <= left) {
            --i;
            --j;
        } else if (up <= left) {
            --i;
        } else {
            --j;
        }
        path.steps.emplace_back(i, j);
    }
    std::reverse(path.steps.begin(), path.steps.end());
    return path;
}

FrameMapping path_to_frame_mapping(const WarpingPath& path, double src_rate_hz, double tgt_rate_hz) {
    FrameMapping mapping;
    mapping.source_frame_rate_hz = src_rate_hz;
    mapping.target_frame_rate_hz = tgt_rate_hz;
    std::size_t k = 0;
    while (k < path.steps.size()) {
        const std::int64_t i = path.steps[k].first;
        std::size_t end = k;
        while (end < path.steps.size() && path.steps[end].first == i) ++end;
        // lower median of the consecutive target run for this source index
        const std::size_t mid = k + (end - k - 1) / 2;
        MappingEntry e;
        e.source_idx = i;
        e.target_idx = path.steps[mid].second;
        e.method = AlignMethod::dtw;
        mapping.entries.push_back(std::move(e));
        k = end;
    }
    return mapping;
}

FrameMapping align_corpus_dtw(const std::vector<SentenceFeatures>& mri_features,
                              const std::vector<SentenceFeatures>& clean_features,
                              const SentencePairing& pairing,
                              std::optional<std::int64_t> band_radius) {
    std::map<std::int32_t, const FeatureSequence*> mri_by_id, clean_by_id;
    for (const SentenceFeatures& f : mri_features) mri_by_id[f.sentence_id] = &f.features;
    for (const SentenceFeatures& f : clean_features) clean_by_id[f.sentence_id] = &f.features;

    std::map<std::int32_t, std::int32_t> paired;  // mri id -> clean id
    for (const SentencePair& p : pairing.pairs) paired[p.mri_id] = p.clean_id;

    std::vector<std::int32_t> mri_ids;
    for (const SentencePair& p : pairing.pairs) mri_ids.push_back(p.mri_id);
    for (std::int32_t id : pairing.unmatched_mri) mri_ids.push_back(id);
    std::sort(mri_ids.begin(), mri_ids.end());

    for (std::int32_t id : mri_ids) {
        if (!mri_by_id.count(id)) {
            fail(ErrorCode::missing_features, "no MRI features for sentence " + std::to_string(id));
        }
        auto it = paired.find(id);
        if (it != paired.end() && !clean_by_id.count(it->second)) {
            fail(ErrorCode::missing_features, "no clean features for sentence " + std::to_string(it->second));
        }
    }

    // Global offsets: cumulative frame counts in ascending sentence-id order.
    std::map<std::int32_t, std::int64_t> clean_offsets;
    {
        std::int64_t off = 0;
        for (const auto& [id, feats] : clean_by_id) {
            clean_offsets[id] = off;
            off += static_cast<std::int64_t>(feats->n_frames());
        }
    }

    FrameMapping mapping;
    std::int64_t src_off = 0;
    for (std::int32_t id : mri_ids) {
        const FeatureSequence& mf = *mri_by_id.at(id);
        if (mapping.source_frame_rate_hz == 0.0) mapping.source_frame_rate_hz = mf.frame_rate_hz;
        const std::int64_t n = static_cast<std::int64_t>(mf.n_frames());
        auto it = paired.find(id);
        if (it == paired.end()) {
            for (std::int64_t i = 0; i < n; ++i) {
                MappingEntry e;
                e.source_idx = src_off + i;
                e.method = AlignMethod::dtw;
                e.sentence_id = id;
                mapping.entries.push_back(std::move(e));
            }
        } else {
            const FeatureSequence& cf = *clean_by_id.at(it->second);
            if (mapping.target_frame_rate_hz == 0.0) mapping.target_frame_rate_hz = cf.frame_rate_hz;
            const std::int64_t tgt_off = clean_offsets.at(it->second);
            const WarpingPath path = dtw(mf, cf, band_radius);
            const FrameMapping local = path_to_frame_mapping(path, mf.frame_rate_hz, cf.frame_rate_hz);
            for (const MappingEntry& le : local.entries) {
                MappingEntry e = le;
                e.source_idx += src_off;
                e.target_idx += tgt_off;
                e.sentence_id = id;
                mapping.entries.push_back(std::move(e));
            }
        }
        src_off += n;
    }
    return mapping;
}

}  // namespace articalign
