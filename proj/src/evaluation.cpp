#include "articalign/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

namespace articalign {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_same_shape(const ContourTrack& y, const ContourTrack& y_hat) {
    if (y.articulators != y_hat.articulators || y.points_per_articulator != y_hat.points_per_articulator ||
        y.n_frames() != y_hat.n_frames()) {
        fail(ErrorCode::shape_mismatch,
             "contour tracks differ in shape (" + std::to_string(y.n_frames()) + " vs " +
                 std::to_string(y_hat.n_frames()) + " frames)");
    }
    if (y.units != y_hat.units) {
        fail(ErrorCode::shape_mismatch, "contour tracks differ in units");
    }
}

const std::array<AxisStats, 2>& stats_for(const NormStats& stats, const std::string& articulator) {
    auto it = stats.per_articulator.find(articulator);
    if (it == stats.per_articulator.end()) {
        fail(ErrorCode::missing_stats, "no normalization stats for articulator '" + articulator + "'");
    }
    return it->second;
}

double sample_mean(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ArticulatorSummary summarize(const std::string& name, std::vector<double> values) {
    ArticulatorSummary s;
    s.name = name;
    s.n = values.size();
    double acc = 0.0;
    for (double v : values) acc += v;
    s.mean_rmse_mm = acc / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - s.mean_rmse_mm) * (v - s.mean_rmse_mm);
    s.std_rmse_mm = std::sqrt(var / static_cast<double>(values.size()));  // population std
    s.median_rmse_mm = median_of(std::move(values));
    return s;
}

}  // namespace

ContourTrack denormalize(const ContourTrack& track, const NormStats& stats) {
    if (track.units != ContourUnits::normalized) {
        fail(ErrorCode::units_not_mm, "denormalize expects NORMALIZED input units");
    }
    stats.validate();
    ContourTrack out = track;
    out.units = ContourUnits::mm;
    const std::size_t n = track.n_frames();
    for (std::size_t a = 0; a < track.n_articulators(); ++a) {
        const auto& axes = stats_for(stats, track.articulators[a]);
        for (std::size_t f = 0; f < n; ++f) {
            for (std::size_t p = 0; p < track.points_per_articulator; ++p) {
                const std::size_t off = track.offset(f, a, p);
                out.coords[off] = (track.coords[off] * axes[0].std + axes[0].mean) * stats.pixel_size_mm;
                out.coords[off + 1] =
                    (track.coords[off + 1] * axes[1].std + axes[1].mean) * stats.pixel_size_mm;
            }
        }
    }
    return out;
}

ContourTrack renormalize(const ContourTrack& track, const NormStats& stats) {
    if (track.units != ContourUnits::mm) {
        fail(ErrorCode::units_not_mm, "renormalize expects MM input units");
    }
    stats.validate();
    ContourTrack out = track;
    out.units = ContourUnits::normalized;
    const std::size_t n = track.n_frames();
    for (std::size_t a = 0; a < track.n_articulators(); ++a) {
        const auto& axes = stats_for(stats, track.articulators[a]);
        for (std::size_t f = 0; f < n; ++f) {
            for (std::size_t p = 0; p < track.points_per_articulator; ++p) {
                const std::size_t off = track.offset(f, a, p);
                out.coords[off] = (track.coords[off] / stats.pixel_size_mm - axes[0].mean) / axes[0].std;
                out.coords[off + 1] =
                    (track.coords[off + 1] / stats.pixel_size_mm - axes[1].mean) / axes[1].std;
            }
        }
    }
    return out;
}

std::vector<std::int64_t> filter_silence(std::span<const std::int64_t> frames, const UtteranceSet& seg,
                                         const FrameClock& clock) {
    clock.validate();
    struct PhoneRef {
        double start, end;
        bool silent;
    };
    std::vector<PhoneRef> phones;
    for (const SentenceInterval& s : seg.sentences) {
        for (const WordInterval& w : s.words) {
            for (const PhoneInterval& p : w.phones) {
                phones.push_back({p.start_s, p.end_s, seg.silence_labels.count(p.label) > 0});
            }
        }
    }
    std::sort(phones.begin(), phones.end(),
              [](const PhoneRef& a, const PhoneRef& b) { return a.start < b.start; });

    std::vector<std::int64_t> sorted(frames.begin(), frames.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::int64_t> kept;
    std::size_t cursor = 0;
    for (std::int64_t idx : sorted) {
        const double mid = frame_mid_time(idx, clock);
        while (cursor < phones.size() && phones[cursor].end <= mid) ++cursor;
        for (std::size_t k = cursor; k < phones.size() && phones[k].start <= mid; ++k) {
            if (mid >= phones[k].start && mid < phones[k].end) {
                if (!phones[k].silent) kept.push_back(idx);
                break;
            }
        }
    }
    return kept;
}

double mse(const ContourTrack& y, const ContourTrack& y_hat) {
    check_same_shape(y, y_hat);
    if (y.coords.empty()) fail(ErrorCode::shape_mismatch, "empty contour tracks");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.coords.size(); ++i) {
        const double d = y.coords[i] - y_hat.coords[i];
        acc += d * d;
    }
    return acc / static_cast<double>(y.coords.size());
}

FrameErrorTable frame_rmse(const ContourTrack& y, const ContourTrack& y_hat) {
    if (y.units != ContourUnits::mm || y_hat.units != ContourUnits::mm) {
        fail(ErrorCode::units_not_mm, "frame_rmse requires both tracks in mm");
    }
    check_same_shape(y, y_hat);

    FrameErrorTable table;
    table.articulators = y.articulators;
    const std::size_t n = y.n_frames();
    const std::size_t n_art = y.n_articulators();
    const std::size_t n_pts = y.points_per_articulator;
    table.rmse_mm.resize(n * n_art);
    table.silent.assign(n, false);
    table.mapped.assign(n, true);
    for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t a = 0; a < n_art; ++a) {
            // mean over points of squared Euclidean point error
            const std::size_t base = y.offset(f, a, 0);
            double acc = 0.0;
            for (std::size_t i = 0; i < n_pts * 2; ++i) {
                const double d = y.coords[base + i] - y_hat.coords[base + i];
                acc += d * d;
            }
            table.rmse_mm[f * n_art + a] = std::sqrt(acc / static_cast<double>(n_pts));
        }
    }
    return table;
}

EvalReport aggregate(const FrameErrorTable& table, std::span<const std::int64_t> keep) {
    if (keep.empty()) fail(ErrorCode::empty_selection, "no frames kept for aggregation");
    const std::size_t n = table.n_frames();
    for (std::int64_t idx : keep) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
            fail(ErrorCode::shape_mismatch, "keep index " + std::to_string(idx) + " outside the table");
        }
    }
    const std::size_t n_art = table.articulators.size();

    EvalReport report;
    std::vector<double> all_cells;
    all_cells.reserve(keep.size() * n_art);
    for (std::size_t a = 0; a < n_art; ++a) {
        std::vector<double> vals;
        vals.reserve(keep.size());
        for (std::int64_t f : keep) vals.push_back(table.at(static_cast<std::size_t>(f), a));
        report.per_articulator.push_back(summarize(table.articulators[a], vals));
    }
    // deterministic cell order: frame-major, articulator-minor
    for (std::int64_t f : keep) {
        for (std::size_t a = 0; a < n_art; ++a) all_cells.push_back(table.at(static_cast<std::size_t>(f), a));
    }
    report.global = summarize("GLOBAL", std::move(all_cells));
    return report;
}

WelchResult welch_t_test_from_summary(std::size_t na, double mean_a, double sample_var_a,
                                      std::size_t nb, double mean_b, double sample_var_b) {
    if (na < 2 || nb < 2) {
        fail(ErrorCode::sample_too_small, "each sample needs at least 2 values");
    }
    WelchResult r;
    if (sample_var_a == 0.0 && sample_var_b == 0.0) {
        if (mean_a == mean_b) {
            r.t = 0.0;
            r.p = 1.0;
            r.df = static_cast<double>(na + nb - 2);
            r.significant = false;
            return r;
        }
        fail(ErrorCode::singular, "both samples have zero variance with unequal means");
    }
    const double se_a = sample_var_a / static_cast<double>(na);
    const double se_b = sample_var_b / static_cast<double>(nb);
    const double se2 = se_a + se_b;
    r.t = (mean_a - mean_b) / std::sqrt(se2);
    r.df = se2 * se2 /
           (se_a * se_a / static_cast<double>(na - 1) + se_b * se_b / static_cast<double>(nb - 1));
    const boost::math::students_t_distribution<double> dist(r.df);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    r.significant = r.p < 0.05;
    return r;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        fail(ErrorCode::sample_too_small, "each sample needs at least 2 values");
    }
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    return welch_t_test_from_summary(a.size(), ma, sample_variance(a, ma), b.size(), mb,
                                     sample_variance(b, mb));
}

WelchResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        fail(ErrorCode::shape_mismatch, "paired test requires equal sample sizes");
    }
    if (a.size() < 2) fail(ErrorCode::sample_too_small, "paired test needs at least 2 pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double md = sample_mean(d);
    const double vd = sample_variance(d, md);
    WelchResult r;
    r.df = static_cast<double>(a.size() - 1);
    if (vd == 0.0) {
        if (md == 0.0) {
            r.t = 0.0;
            r.p = 1.0;
            return r;
        }
        fail(ErrorCode::singular, "zero-variance differences with nonzero mean");
    }
    r.t = md / std::sqrt(vd / static_cast<double>(a.size()));
    const boost::math::students_t_distribution<double> dist(r.df);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    r.significant = r.p < 0.05;
    return r;
}

// ---------------------------------------------------------------------------
// Report IO
// ---------------------------------------------------------------------------

void write_eval_report(std::ostream& out, const EvalReport& report) {
    out << "articulator,n,mean_rmse_mm,std_rmse_mm,median_rmse_mm\n";
    auto row = [&out](const ArticulatorSummary& s) {
        out << s.name << ',' << s.n << ',' << fmt_double(s.mean_rmse_mm) << ','
            << fmt_double(s.std_rmse_mm) << ',' << fmt_double(s.median_rmse_mm) << '\n';
    };
    for (const ArticulatorSummary& s : report.per_articulator) row(s);
    row(report.global);
}

EvalReport parse_eval_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        (!line.empty() && line.back() == '\r' ? line.substr(0, line.size() - 1) : line) !=
            "articulator,n,mean_rmse_mm,std_rmse_mm,median_rmse_mm") {
        fail(ErrorCode::malformed_header, "expected header articulator,n,mean_rmse_mm,std_rmse_mm,median_rmse_mm");
    }
    EvalReport report;
    bool saw_global = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string name, tok;
        if (!std::getline(ls, name, ',')) {
            fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": bad report row");
        }
        ArticulatorSummary s;
        s.name = name;
        double fields[4];
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ls, tok, ',')) {
                fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": bad report row");
            }
            char* end = nullptr;
            fields[i] = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size()) {
                fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": bad number '" + tok + "'");
            }
        }
        s.n = static_cast<std::size_t>(fields[0]);
        s.mean_rmse_mm = fields[1];
        s.std_rmse_mm = fields[2];
        s.median_rmse_mm = fields[3];
        if (name == "GLOBAL") {
            report.global = s;
            saw_global = true;
        } else {
            report.per_articulator.push_back(s);
        }
    }
    if (!saw_global) fail(ErrorCode::malformed_header, "report is missing the GLOBAL row");
    return report;
}

void write_frame_error_table(std::ostream& out, const FrameErrorTable& table) {
    out << "frame,articulator,rmse_mm,silent,mapped\n";
    const std::size_t n = table.n_frames();
    for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t a = 0; a < table.articulators.size(); ++a) {
            out << f << ',' << table.articulators[a] << ',' << fmt_double(table.at(f, a)) << ','
                << (table.silent[f] ? 1 : 0) << ',' << (table.mapped[f] ? 1 : 0) << '\n';
        }
    }
}

FrameErrorTable parse_frame_error_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        (!line.empty() && line.back() == '\r' ? line.substr(0, line.size() - 1) : line) !=
            "frame,articulator,rmse_mm,silent,mapped") {
        fail(ErrorCode::malformed_header, "expected header frame,articulator,rmse_mm,silent,mapped");
    }
    FrameErrorTable table;
    std::size_t line_no = 1;
    std::size_t row = 0;
    bool first_frame_done = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok[5];
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(ls, tok[i], ',')) {
                fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": expected 5 fields");
            }
        }
        const std::size_t frame = static_cast<std::size_t>(std::strtoull(tok[0].c_str(), nullptr, 10));
        if (!first_frame_done && frame == 0) {
            table.articulators.push_back(tok[1]);
        } else if (!first_frame_done) {
            first_frame_done = true;
        }
        if (frame > 0) first_frame_done = true;
        const std::size_t n_art = table.articulators.size();
        if (n_art == 0) fail(ErrorCode::malformed_header, "no articulators in frame table");
        const std::size_t exp_frame = row / n_art;
        const std::size_t exp_art = row % n_art;
        if (frame != exp_frame || (first_frame_done && tok[1] != table.articulators[exp_art])) {
            fail(ErrorCode::dimension_mismatch,
                 "line " + std::to_string(line_no) + ": rows must be exhaustive and sorted");
        }
        char* end = nullptr;
        const double v = std::strtod(tok[2].c_str(), &end);
        if (end != tok[2].c_str() + tok[2].size() || !std::isfinite(v)) {
            fail(ErrorCode::malformed_line, "line " + std::to_string(line_no) + ": bad rmse value");
        }
        table.rmse_mm.push_back(v);
        if (exp_art == 0) {
            table.silent.push_back(tok[3] == "1");
            table.mapped.push_back(tok[4] == "1");
        }
        ++row;
    }
    if (!table.articulators.empty() && row % table.articulators.size() != 0) {
        fail(ErrorCode::dimension_mismatch, "incomplete final frame in frame table");
    }
    return table;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string fmt_cell(double mean, double std_dev) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, std_dev);
    return buf;
}

std::string fmt_median(double median) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", median);
    return buf;
}

void pad(std::ostream& os, const std::string& s, std::size_t width) {
    os << s;
    for (std::size_t i = s.size(); i < width; ++i) os << ' ';
}

}  // namespace

std::string render_report_table(const EvalReport& report, const std::string& condition_name) {
    std::ostringstream os;
    pad(os, "Articulator", 22);
    pad(os, condition_name + " RMSE (mm)", 22);
    os << "Median (mm)\n";
    auto row = [&os](const std::string& name, const ArticulatorSummary& s) {
        pad(os, name, 22);
        pad(os, fmt_cell(s.mean_rmse_mm, s.std_rmse_mm), 23);  // the +- sign is 2 bytes
        os << fmt_median(s.median_rmse_mm) << '\n';
    };
    for (const ArticulatorSummary& s : report.per_articulator) row(s.name, s);
    row("Mean", report.global);
    return os.str();
}

std::string render_comparison_table(const EvalReport& a, const EvalReport& b,
                                    const std::string& name_a, const std::string& name_b,
                                    const std::vector<TTestResult>& tests) {
    std::ostringstream os;
    pad(os, "Articulator", 22);
    pad(os, name_a + " RMSE (mm)", 22);
    pad(os, "Median", 10);
    pad(os, name_b + " RMSE (mm)", 22);
    os << "Median\n";
    auto star_for = [&tests](const std::string& label) -> std::string {
        for (const TTestResult& t : tests) {
            if (t.label == label) return t.significant ? "*" : "";
        }
        return "";
    };
    auto row = [&](const std::string& name, const ArticulatorSummary& sa, const ArticulatorSummary& sb,
                   const std::string& label) {
        pad(os, name, 22);
        pad(os, fmt_cell(sa.mean_rmse_mm, sa.std_rmse_mm), 23);
        pad(os, fmt_median(sa.median_rmse_mm), 10);
        pad(os, fmt_cell(sb.mean_rmse_mm, sb.std_rmse_mm) + star_for(label), 23);
        os << fmt_median(sb.median_rmse_mm) << '\n';
    };
    for (std::size_t i = 0; i < a.per_articulator.size() && i < b.per_articulator.size(); ++i) {
        row(a.per_articulator[i].name, a.per_articulator[i], b.per_articulator[i],
            a.per_articulator[i].name);
    }
    row("Mean", a.global, b.global, "GLOBAL");
    return os.str();
}

}  // namespace articalign
