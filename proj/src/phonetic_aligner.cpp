#include "articalign/phonetic_aligner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "articalign/text_similarity.hpp"

namespace articalign {

namespace {

std::string sentence_pair_label(std::int32_t mri_id, std::int32_t clean_id) {
    return "mri sentence " + std::to_string(mri_id) + " / clean sentence " + std::to_string(clean_id);
}

}  // namespace

SentencePairing pair_sentences(const UtteranceSet& mri, const UtteranceSet& clean,
                               double threshold, bool one_to_one) {
    SentencePairing result;
    result.threshold = threshold;

    const std::size_t n_mri = mri.sentences.size();
    const std::size_t n_clean = clean.sentences.size();

    // Best clean candidate per MRI sentence; ties toward the smaller clean id.
    std::vector<std::int32_t> best_id(n_mri, -1);
    std::vector<double> best_sim(n_mri, -1.0);
    for (std::size_t i = 0; i < n_mri; ++i) {
        for (std::size_t j = 0; j < n_clean; ++j) {
            const double s = similarity(mri.sentences[i].text, clean.sentences[j].text);
            if (s > best_sim[i]) {
                best_sim[i] = s;
                best_id[i] = static_cast<std::int32_t>(j);
            }
        }
    }

    if (!one_to_one) {
        for (std::size_t i = 0; i < n_mri; ++i) {
            if (best_id[i] >= 0 && best_sim[i] >= threshold) {
                result.pairs.push_back({static_cast<std::int32_t>(i), best_id[i], best_sim[i]});
            } else {
                result.unmatched_mri.push_back(static_cast<std::int32_t>(i));
            }
        }
        return result;
    }

    // Strict mode: greedy assignment in descending similarity, each clean
    // sentence consumed once. Candidate list is (sim, mri, clean) over all
    // pairs meeting the threshold.
    struct Cand {
        double sim;
        std::int32_t mri_id;
        std::int32_t clean_id;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < n_mri; ++i) {
        for (std::size_t j = 0; j < n_clean; ++j) {
            const double s = similarity(mri.sentences[i].text, clean.sentences[j].text);
            if (s >= threshold) {
                cands.push_back({s, static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
            }
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        if (a.mri_id != b.mri_id) return a.mri_id < b.mri_id;
        return a.clean_id < b.clean_id;
    });
    std::vector<bool> mri_used(n_mri, false), clean_used(n_clean, false);
    for (const Cand& c : cands) {
        if (mri_used[c.mri_id] || clean_used[c.clean_id]) continue;
        mri_used[c.mri_id] = true;
        clean_used[c.clean_id] = true;
        result.pairs.push_back({c.mri_id, c.clean_id, c.sim});
    }
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const SentencePair& a, const SentencePair& b) { return a.mri_id < b.mri_id; });
    for (std::size_t i = 0; i < n_mri; ++i) {
        if (!mri_used[i]) result.unmatched_mri.push_back(static_cast<std::int32_t>(i));
    }
    return result;
}

double relative_position(const WordInterval& word, const SentenceInterval& sentence) {
    const double dur = sentence.duration_s();
    if (!(dur > 0.0)) {
        fail(ErrorCode::zero_duration_sentence,
             "sentence '" + sentence.text + "' has zero duration");
    }
    const double r = (word.start_s - sentence.start_s) / dur;
    return std::clamp(r, 0.0, 1.0);
}

WordPairing pair_words(const SentenceInterval& mri_sentence, const SentenceInterval& clean_sentence) {
    WordPairing result;
    std::vector<bool> consumed(clean_sentence.words.size(), false);
    for (std::size_t i = 0; i < mri_sentence.words.size(); ++i) {
        const WordInterval& mw = mri_sentence.words[i];
        const double r_mri = relative_position(mw, mri_sentence);
        std::size_t best_j = clean_sentence.words.size();
        double best_d = 0.0;
        for (std::size_t j = 0; j < clean_sentence.words.size(); ++j) {
            if (consumed[j] || clean_sentence.words[j].text != mw.text) continue;
            const double d = std::abs(relative_position(clean_sentence.words[j], clean_sentence) - r_mri);
            if (best_j == clean_sentence.words.size() || d < best_d) {
                best_j = j;
                best_d = d;
            }
        }
        if (best_j == clean_sentence.words.size()) {
            result.unmatched_mri_words.push_back(i);
        } else {
            consumed[best_j] = true;
            result.pairs.emplace_back(i, best_j);
        }
    }
    return result;
}

PhonePairing pair_phones(const WordInterval& mri_word, const WordInterval& clean_word,
                         std::int32_t mri_sentence_id) {
    PhonePairing result;
    bool match = mri_word.phones.size() == clean_word.phones.size();
    if (match) {
        for (std::size_t i = 0; i < mri_word.phones.size(); ++i) {
            if (mri_word.phones[i].label != clean_word.phones[i].label) {
                match = false;
                break;
            }
        }
    }
    if (!match) {
        result.n_demoted_word_pairs = 1;
        std::ostringstream msg;
        msg << "word pair '" << mri_word.text << "' demoted: phone sequences differ ("
            << mri_word.phones.size() << " vs " << clean_word.phones.size() << " phones)";
        result.warnings.push_back(msg.str());
        return result;
    }
    for (std::size_t i = 0; i < mri_word.phones.size(); ++i) {
        result.pairs.push_back({mri_word.phones[i], clean_word.phones[i], mri_sentence_id});
    }
    return result;
}

FrameMapping map_frames(const PhonePairing& pairing, const FrameClock& mri_clock,
                        const FrameClock& clean_clock, std::int64_t clean_n_frames,
                        std::int64_t mri_n_frames) {
    mri_clock.validate();
    clean_clock.validate();
    if (clean_n_frames < 1) fail(ErrorCode::invalid_clock, "clean_n_frames must be >= 1");

    // Paired phones sorted by MRI start time; frame attribution walks them
    // with mid-time containment over [start, end).
    std::vector<const PhonePair*> phones;
    phones.reserve(pairing.pairs.size());
    for (const PhonePair& p : pairing.pairs) phones.push_back(&p);
    std::sort(phones.begin(), phones.end(),
              [](const PhonePair* a, const PhonePair* b) { return a->mri.start_s < b->mri.start_s; });

    FrameMapping mapping;
    mapping.source_frame_rate_hz = mri_clock.frame_rate_hz;
    mapping.target_frame_rate_hz = clean_clock.frame_rate_hz;
    mapping.entries.reserve(static_cast<std::size_t>(std::max<std::int64_t>(mri_n_frames, 0)));

    auto effective_end = [](const PhonePair& p) {
        return p.mri.end_s > p.mri.start_s ? p.mri.end_s : p.mri.start_s + kMinPhoneDurationS;
    };
    std::size_t cursor = 0;
    for (std::int64_t idx = 0; idx < mri_n_frames; ++idx) {
        const double mid = frame_mid_time(idx, mri_clock);
        while (cursor < phones.size() && effective_end(*phones[cursor]) <= mid) ++cursor;

        MappingEntry e;
        e.source_idx = idx;
        e.method = AlignMethod::phonetic;

        const PhonePair* hit = nullptr;
        for (std::size_t k = cursor; k < phones.size() && phones[k]->mri.start_s <= mid; ++k) {
            // Degenerate (zero-duration) phones are widened to [start, start+eps)
            // for attribution only; duration stays epsilon-clamped below.
            if (mid >= phones[k]->mri.start_s && mid < effective_end(*phones[k])) {
                hit = phones[k];
                break;
            }
        }
        if (hit != nullptr) {
            const double duration = std::max(hit->mri.duration_s(), kMinPhoneDurationS);
            const double r_intra = std::clamp((mid - hit->mri.start_s) / duration, 0.0, 1.0);
            const double t_target = hit->clean.start_s + r_intra * (hit->clean.end_s - hit->clean.start_s);
            std::int64_t target = static_cast<std::int64_t>(
                std::floor(t_target * clean_clock.frame_rate_hz));
            const std::int64_t clamped_target = std::clamp<std::int64_t>(target, 0, clean_n_frames - 1);
            e.target_idx = clamped_target;
            e.clamped = clamped_target != target;
            e.phone = hit->mri.label;
            e.sentence_id = hit->mri_sentence_id;
        }
        mapping.entries.push_back(std::move(e));
    }
    return mapping;
}

AlignResult align_corpus(const UtteranceSet& mri, const UtteranceSet& clean, const AlignConfig& config) {
    AlignResult result;
    AlignmentReport& report = result.report;
    report.n_mri_sentences = mri.sentences.size();
    report.n_clean_sentences = clean.sentences.size();

    result.sentence_pairing = pair_sentences(mri, clean, config.threshold, config.one_to_one);
    report.n_paired_sentences = result.sentence_pairing.pairs.size();
    report.n_unmatched_sentences = result.sentence_pairing.unmatched_mri.size();
    for (std::int32_t id : result.sentence_pairing.unmatched_mri) {
        report.warnings.push_back("mri sentence " + std::to_string(id) + " ('" +
                                  mri.sentences[id].text + "') unmatched below threshold");
    }

    for (const SentenceInterval& s : mri.sentences) report.n_mri_words += s.words.size();

    PhonePairing corpus_pairing;
    for (const SentencePair& sp : result.sentence_pairing.pairs) {
        const SentenceInterval& ms = mri.sentences[sp.mri_id];
        const SentenceInterval& cs = clean.sentences[sp.clean_id];
        const WordPairing wp = pair_words(ms, cs);
        for (std::size_t wi : wp.unmatched_mri_words) {
            ++report.n_unmatched_words;
            report.warnings.push_back("word '" + ms.words[wi].text + "' in " +
                                      sentence_pair_label(sp.mri_id, sp.clean_id) + " unmatched");
        }
        for (const auto& [mi, ci] : wp.pairs) {
            PhonePairing pp = pair_phones(ms.words[mi], cs.words[ci], sp.mri_id);
            if (pp.n_demoted_word_pairs > 0) {
                report.n_demoted_word_pairs += pp.n_demoted_word_pairs;
                ++report.n_unmatched_words;
                for (std::string& w : pp.warnings) {
                    report.warnings.push_back(w + " in " + sentence_pair_label(sp.mri_id, sp.clean_id));
                }
            } else {
                ++report.n_paired_words;
                report.n_paired_phones += pp.pairs.size();
                corpus_pairing.pairs.insert(corpus_pairing.pairs.end(), pp.pairs.begin(), pp.pairs.end());
            }
        }
    }

    const std::int64_t mri_n_frames =
        config.mri_n_frames.value_or(frames_covering(mri.total_duration_s, config.mri_clock));
    const std::int64_t clean_n_frames =
        config.clean_n_frames.value_or(frames_covering(clean.total_duration_s, config.clean_clock));

    result.mapping = map_frames(corpus_pairing, config.mri_clock, config.clean_clock,
                                std::max<std::int64_t>(clean_n_frames, 1), mri_n_frames);

    // Fill provenance on unmapped frames that still lie inside an MRI phone
    // (unmatched sentence/word or demoted pair): report which phone/sentence.
    {
        struct PhoneRef {
            double start, end;
            const std::string* label;
            std::int32_t sentence_id;
        };
        std::vector<PhoneRef> all_phones;
        for (std::size_t si = 0; si < mri.sentences.size(); ++si) {
            for (const WordInterval& w : mri.sentences[si].words) {
                for (const PhoneInterval& p : w.phones) {
                    all_phones.push_back({p.start_s, p.end_s, &p.label, static_cast<std::int32_t>(si)});
                }
            }
        }
        std::sort(all_phones.begin(), all_phones.end(),
                  [](const PhoneRef& a, const PhoneRef& b) { return a.start < b.start; });
        std::size_t cursor = 0;
        for (MappingEntry& e : result.mapping.entries) {
            if (e.mapped()) continue;
            const double mid = frame_mid_time(e.source_idx, config.mri_clock);
            while (cursor < all_phones.size() && all_phones[cursor].end <= mid) ++cursor;
            for (std::size_t k = cursor; k < all_phones.size() && all_phones[k].start <= mid; ++k) {
                if (mid >= all_phones[k].start && mid < all_phones[k].end) {
                    e.phone = *all_phones[k].label;
                    e.sentence_id = all_phones[k].sentence_id;
                    break;
                }
            }
        }
    }

    report.n_frames = result.mapping.entries.size();
    for (const MappingEntry& e : result.mapping.entries) {
        if (e.mapped()) {
            ++report.n_mapped_frames;
            if (e.clamped) ++report.n_clamped_frames;
        } else {
            ++report.n_unmapped_frames;
        }
    }
    return result;
}

std::string AlignmentReport::render_text() const {
    std::ostringstream os;
    os << "alignment report\n";
    os << "  sentences: " << n_paired_sentences << " paired, " << n_unmatched_sentences
       << " unmatched (mri " << n_mri_sentences << ", clean " << n_clean_sentences << ")\n";
    os << "  words:     " << n_paired_words << " paired, " << n_unmatched_words << " unmatched, "
       << n_demoted_word_pairs << " demoted (mri total " << n_mri_words << ")\n";
    os << "  phones:    " << n_paired_phones << " paired\n";
    os << "  frames:    " << n_mapped_frames << " mapped, " << n_unmapped_frames << " unmapped, "
       << n_clamped_frames << " clamped (total " << n_frames << ")\n";
    if (!warnings.empty()) {
        os << "warnings:\n";
        for (const std::string& w : warnings) os << "  - " << w << '\n';
    }
    return os.str();
}

void write_sentence_pairing(std::ostream& out, const SentencePairing& pairing) {
    out << "mri_sentence_id,clean_sentence_id,similarity\n";
    std::vector<std::pair<std::int32_t, std::pair<std::int32_t, double>>> rows;
    for (const SentencePair& p : pairing.pairs) rows.push_back({p.mri_id, {p.clean_id, p.similarity}});
    for (std::int32_t id : pairing.unmatched_mri) rows.push_back({id, {-1, 0.0}});
    std::sort(rows.begin(), rows.end());
    char buf[64];
    for (const auto& [mri_id, rest] : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", rest.second);
        out << mri_id << ',' << rest.first << ',' << buf << '\n';
    }
}

SentencePairing parse_sentence_pairing(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::malformed_header, "empty pairing file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "mri_sentence_id,clean_sentence_id,similarity") {
        fail(ErrorCode::malformed_header, "expected header mri_sentence_id,clean_sentence_id,similarity");
    }
    SentencePairing pairing;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::int32_t mri_id = 0, clean_id = 0;
        double sim = 0.0;
        char extra = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf%c", &mri_id, &clean_id, &sim, &extra) != 3) {
            fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": bad pairing row");
        }
        if (clean_id < 0) {
            pairing.unmatched_mri.push_back(mri_id);
        } else {
            pairing.pairs.push_back({mri_id, clean_id, sim});
        }
    }
    return pairing;
}

}  // namespace articalign
