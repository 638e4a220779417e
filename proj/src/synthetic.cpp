#include "articalign/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

namespace articalign {

namespace {

// Portable draws: mt19937_64 output is specified by the standard; the
// distribution helpers below avoid the implementation-defined std ones.
double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

// Times are kept on a 1 microsecond grid so the 6-decimal TSV serialization
// round-trips losslessly.
double quantize_us(double t) { return std::round(t * 1e6) / 1e6; }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    const int span = hi - lo + 1;
    const int v = lo + static_cast<int>(uniform_real(rng, 0.0, 1.0) * span);
    return std::min(v, hi);
}

double normal(std::mt19937_64& rng) {
    const double u1 = std::max(uniform_real(rng, 0.0, 1.0), 1e-300);
    const double u2 = uniform_real(rng, 0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string random_word(std::mt19937_64& rng, int min_len, int max_len) {
    const int len = uniform_int(rng, min_len, max_len);
    std::string w;
    for (int i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + uniform_int(rng, 0, 25)));
    return w;
}

const std::vector<std::string>& phone_inventory() {
    static const std::vector<std::string> inv = {
        "a", "e", "i", "o", "u", "y", "b", "d", "f", "g",
        "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
    };
    return inv;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct GenPhone {
    std::string label;
    double mri_dur = 0.0;
    double warp = 1.0;
};

struct GenWord {
    std::string text;
    std::vector<GenPhone> phones;
};

struct GenSentence {
    std::vector<GenWord> words;
    std::string text() const {
        std::string t;
        for (const GenWord& w : words) {
            if (!t.empty()) t.push_back(' ');
            t += w.text;
        }
        return t;
    }
};

}  // namespace

void SyntheticSpec::validate() const {
    if (n_sentences < 1 || words_per_sentence.lo < 1 || words_per_sentence.lo > words_per_sentence.hi ||
        phones_per_word.lo < 1 || phones_per_word.lo > phones_per_word.hi ||
        !(phone_duration_s.lo > 0.0) || phone_duration_s.lo > phone_duration_s.hi ||
        !(warp.lo > 0.0) || warp.lo > warp.hi || error_rate < 0.0 || error_rate > 1.0 ||
        silence_gap_s.lo < 0.0 || silence_gap_s.lo > silence_gap_s.hi ||
        !(mri_rate_hz > 0.0) || !(clean_rate_hz > 0.0)) {
        fail(ErrorCode::malformed_header, "invalid synthetic spec");
    }
}

SyntheticCorpus gen_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const FrameClock mri_clock = FrameClock::make(spec.mri_rate_hz);
    const FrameClock clean_clock = FrameClock::make(spec.clean_rate_hz);

    // Sentence skeletons with per-phone warp multipliers. Sentence texts are
    // kept unique so self- and cross-pairing are unambiguous.
    std::vector<GenSentence> gen(spec.n_sentences);
    std::set<std::string> seen_texts;
    for (GenSentence& gs : gen) {
        while (true) {
            gs.words.clear();
            const int n_words = uniform_int(rng, spec.words_per_sentence.lo, spec.words_per_sentence.hi);
            for (int w = 0; w < n_words; ++w) {
                GenWord gw;
                gw.text = random_word(rng, 2, 6);
                const int n_phones = uniform_int(rng, spec.phones_per_word.lo, spec.phones_per_word.hi);
                for (int p = 0; p < n_phones; ++p) {
                    GenPhone gp;
                    gp.label = phone_inventory()[static_cast<std::size_t>(
                        uniform_int(rng, 0, static_cast<int>(phone_inventory().size()) - 1))];
                    gp.mri_dur = uniform_real(rng, spec.phone_duration_s.lo, spec.phone_duration_s.hi);
                    gp.warp = uniform_real(rng, spec.warp.lo, spec.warp.hi);
                    gw.phones.push_back(std::move(gp));
                }
                gs.words.push_back(std::move(gw));
            }
            if (seen_texts.insert(gs.text()).second) break;
        }
    }

    // Clean sentence order: shuffled permutation (Fisher-Yates).
    std::vector<std::int32_t> order(spec.n_sentences);
    for (int i = 0; i < spec.n_sentences; ++i) order[i] = i;
    if (spec.shuffle_sentences) {
        for (int i = spec.n_sentences - 1; i > 0; --i) {
            std::swap(order[i], order[uniform_int(rng, 0, i)]);
        }
    }
    // clean_order[mri_id] = clean sentence index holding that sentence
    std::vector<std::int32_t> clean_order(spec.n_sentences, -1);
    for (int pos = 0; pos < spec.n_sentences; ++pos) clean_order[order[pos]] = pos;

    // Perturbations: word substitutions on the clean copy.
    std::vector<bool> perturbed(spec.n_sentences, false);
    std::vector<std::vector<std::string>> clean_word_texts(spec.n_sentences);
    for (int i = 0; i < spec.n_sentences; ++i) {
        for (const GenWord& w : gen[i].words) clean_word_texts[i].push_back(w.text);
        if (uniform_real(rng, 0.0, 1.0) < spec.error_rate) {
            perturbed[i] = true;
            bool any = false;
            for (std::string& t : clean_word_texts[i]) {
                if (uniform_real(rng, 0.0, 1.0) < 0.5) {
                    t = random_word(rng, 7, 9);
                    any = true;
                }
            }
            if (!any) clean_word_texts[i].back() = random_word(rng, 7, 9);
        }
    }

    SyntheticCorpus out;
    out.clean_order = clean_order;
    for (int i = 0; i < spec.n_sentences; ++i) {
        if (perturbed[i]) out.perturbed.push_back(i);
    }

    // Gap draws. Gaps between words and sentences are unlabeled silence;
    // gap[i][0] precedes sentence i, gap[i][w] precedes word w.
    auto draw_gaps = [&rng, &gen, &spec]() {
        std::vector<std::vector<double>> gaps(gen.size());
        for (std::size_t i = 0; i < gen.size(); ++i) {
            gaps[i].resize(gen[i].words.size());
            for (std::size_t w = 0; w < gen[i].words.size(); ++w) {
                gaps[i][w] = uniform_real(rng, spec.silence_gap_s.lo, spec.silence_gap_s.hi);
            }
        }
        return gaps;
    };
    const std::vector<std::vector<double>> mri_gaps = draw_gaps();
    const std::vector<std::vector<double>> clean_gaps = spec.reuse_gaps ? mri_gaps : draw_gaps();

    struct CleanPhoneRef {
        double start = 0.0, end = 0.0;
    };
    // [mri sentence][word][phone] -> clean interval, filled by the clean layout
    std::vector<std::vector<std::vector<CleanPhoneRef>>> clean_ref(spec.n_sentences);

    {
        double cursor = 0.0;
        for (int i = 0; i < spec.n_sentences; ++i) {
            SentenceInterval si;
            cursor = quantize_us(cursor + mri_gaps[i][0]);
            si.start_s = cursor;
            clean_ref[i].resize(gen[i].words.size());
            for (std::size_t w = 0; w < gen[i].words.size(); ++w) {
                if (w > 0) cursor = quantize_us(cursor + mri_gaps[i][w]);
                WordInterval wi;
                wi.text = gen[i].words[w].text;
                wi.start_s = cursor;
                clean_ref[i][w].resize(gen[i].words[w].phones.size());
                for (const GenPhone& gp : gen[i].words[w].phones) {
                    PhoneInterval pi;
                    pi.label = gp.label;
                    pi.start_s = cursor;
                    cursor = quantize_us(cursor + gp.mri_dur);
                    pi.end_s = cursor;
                    wi.phones.push_back(std::move(pi));
                }
                wi.end_s = cursor;
                si.words.push_back(std::move(wi));
            }
            si.end_s = cursor;
            si.text = gen[i].text();
            out.mri.sentences.push_back(std::move(si));
            out.mri.total_duration_s = cursor;
        }
    }

    // Clean layout in (possibly shuffled) order with warped phone durations.
    {
        out.clean.sentences.resize(spec.n_sentences);
        double cursor = 0.0;
        for (int pos = 0; pos < spec.n_sentences; ++pos) {
            const int i = order[pos];
            SentenceInterval si;
            cursor = quantize_us(cursor + clean_gaps[i][0]);
            si.start_s = cursor;
            for (std::size_t w = 0; w < gen[i].words.size(); ++w) {
                if (w > 0) cursor = quantize_us(cursor + clean_gaps[i][w]);
                WordInterval wi;
                wi.text = clean_word_texts[i][w];
                wi.start_s = cursor;
                for (std::size_t p = 0; p < gen[i].words[w].phones.size(); ++p) {
                    const GenPhone& gp = gen[i].words[w].phones[p];
                    PhoneInterval pi;
                    pi.label = gp.label;
                    pi.start_s = cursor;
                    cursor = quantize_us(cursor + gp.mri_dur * gp.warp);
                    pi.end_s = cursor;
                    clean_ref[i][w][p] = {pi.start_s, pi.end_s};
                    wi.phones.push_back(std::move(pi));
                }
                wi.end_s = cursor;
                si.words.push_back(std::move(wi));
            }
            si.end_s = cursor;
            std::string text;
            for (const std::string& t : clean_word_texts[i]) {
                if (!text.empty()) text.push_back(' ');
                text += t;
            }
            si.text = text;
            out.clean.sentences[pos] = std::move(si);
            out.clean.total_duration_s = cursor;
        }
    }

    // Analytic truth: the time-stretching arithmetic applied to the
    // generator's own interval records. Perturbed sentences are UNMAPPED.
    {
        const std::int64_t mri_n = frames_covering(out.mri.total_duration_s, mri_clock);
        const std::int64_t clean_n = std::max<std::int64_t>(
            frames_covering(out.clean.total_duration_s, clean_clock), 1);

        struct PhoneRef {
            double start, end, clean_start, clean_end;
            const std::string* label;
            std::int32_t sentence_id;
            bool perturbed;
        };
        std::vector<PhoneRef> phones;
        for (int i = 0; i < spec.n_sentences; ++i) {
            const SentenceInterval& si = out.mri.sentences[i];
            for (std::size_t w = 0; w < si.words.size(); ++w) {
                for (std::size_t p = 0; p < si.words[w].phones.size(); ++p) {
                    const PhoneInterval& pi = si.words[w].phones[p];
                    const CleanPhoneRef& cr = clean_ref[i][w][p];
                    phones.push_back({pi.start_s, pi.end_s, cr.start, cr.end, &pi.label,
                                      static_cast<std::int32_t>(i), perturbed[i]});
                }
            }
        }
        std::sort(phones.begin(), phones.end(),
                  [](const PhoneRef& a, const PhoneRef& b) { return a.start < b.start; });

        out.truth.source_frame_rate_hz = mri_clock.frame_rate_hz;
        out.truth.target_frame_rate_hz = clean_clock.frame_rate_hz;
        std::size_t cursor = 0;
        for (std::int64_t idx = 0; idx < mri_n; ++idx) {
            const double mid = frame_mid_time(idx, mri_clock);
            while (cursor < phones.size() && phones[cursor].end <= mid) ++cursor;
            MappingEntry e;
            e.source_idx = idx;
            for (std::size_t k = cursor; k < phones.size() && phones[k].start <= mid; ++k) {
                const PhoneRef& ph = phones[k];
                if (mid < ph.start || mid >= ph.end) continue;
                e.phone = *ph.label;
                e.sentence_id = ph.sentence_id;
                if (!ph.perturbed) {
                    const double duration = std::max(ph.end - ph.start, kMinPhoneDurationS);
                    const double r = std::clamp((mid - ph.start) / duration, 0.0, 1.0);
                    const double t_target = ph.clean_start + r * (ph.clean_end - ph.clean_start);
                    const std::int64_t tgt =
                        static_cast<std::int64_t>(std::floor(t_target * clean_clock.frame_rate_hz));
                    e.target_idx = std::clamp<std::int64_t>(tgt, 0, clean_n - 1);
                    e.clamped = e.target_idx != tgt;
                }
                break;
            }
            out.truth.entries.push_back(std::move(e));
        }
    }

    return out;
}

FeatureSequence synth_sentence_features(const SentenceInterval& sentence, const FrameClock& clock,
                                        std::size_t dim, double noise_sigma, std::uint64_t seed,
                                        double ramp_scale) {
    const std::int64_t n = std::max<std::int64_t>(frames_covering(sentence.duration_s(), clock), 1);
    FeatureSequence seq;
    seq.frame_rate_hz = clock.frame_rate_hz;
    seq.dim = dim;
    seq.values.assign(static_cast<std::size_t>(n) * dim, 0.0);

    std::mt19937_64 noise_rng(seed);
    for (std::int64_t f = 0; f < n; ++f) {
        const double mid = sentence.start_s + frame_mid_time(f, clock);
        double* row = seq.frame(static_cast<std::size_t>(f));
        for (const WordInterval& w : sentence.words) {
            for (const PhoneInterval& p : w.phones) {
                if (mid >= p.start_s && mid < p.end_s) {
                    std::mt19937_64 onset_rng(fnv1a(p.label));
                    std::mt19937_64 offset_rng(fnv1a(p.label + "\x01"));
                    const double r =
                        ramp_scale * std::clamp((mid - p.start_s) / p.duration_s(), 0.0, 1.0);
                    for (std::size_t d = 0; d < dim; ++d) {
                        const double onset = uniform_real(onset_rng, -1.0, 1.0);
                        const double offset = uniform_real(offset_rng, -1.0, 1.0);
                        row[d] = (1.0 - r) * onset + r * offset;
                    }
                    break;
                }
            }
        }
        if (noise_sigma > 0.0) {
            for (std::size_t d = 0; d < dim; ++d) row[d] += noise_sigma * normal(noise_rng);
        }
    }
    return seq;
}

}  // namespace articalign
