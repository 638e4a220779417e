#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "articalign/corpus_model.hpp"

namespace articalign {

// Per-frame, per-articulator RMSE in millimeters, with the frame flags the
// evaluation pipeline uses to select cells.
struct FrameErrorTable {
    std::vector<std::string> articulators;
    std::vector<double> rmse_mm;   // n_frames * n_articulators, row-major
    std::vector<bool> silent;      // per frame
    std::vector<bool> mapped;      // per frame

    std::size_t n_frames() const {
        return articulators.empty() ? 0 : rmse_mm.size() / articulators.size();
    }
    double at(std::size_t frame, std::size_t art) const {
        return rmse_mm[frame * articulators.size() + art];
    }
};

struct ArticulatorSummary {
    std::string name;
    std::size_t n = 0;
    double mean_rmse_mm = 0.0;
    double std_rmse_mm = 0.0;     // population std
    double median_rmse_mm = 0.0;
};

struct TTestResult {
    std::string label;
    double t = 0.0;
    double p = 1.0;
    bool significant = false;  // at alpha = 0.05
};

struct EvalReport {
    std::vector<ArticulatorSummary> per_articulator;
    ArticulatorSummary global;  // over all kept (frame, articulator) cells
    std::vector<TTestResult> tests;
};

struct WelchResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
    bool significant = false;
};

// normalized -> mm: value * std + mean (pixels), then * pixel_size_mm.
ContourTrack denormalize(const ContourTrack& track, const NormStats& stats);
// mm -> normalized; inverse of denormalize.
ContourTrack renormalize(const ContourTrack& track, const NormStats& stats);

// Keeps a frame iff its mid-time lies inside a phone whose label is not a
// silence label; frames outside every phone are removed.
std::vector<std::int64_t> filter_silence(std::span<const std::int64_t> frames, const UtteranceSet& seg,
                                         const FrameClock& clock);

// Mean of squared coordinate differences over every frame/articulator/point/axis.
double mse(const ContourTrack& y, const ContourTrack& y_hat);

// Per (frame, articulator): sqrt(mean over points x axes of squared diffs).
// Both tracks must be in mm.
FrameErrorTable frame_rmse(const ContourTrack& y, const ContourTrack& y_hat);

// Per-articulator and global mean/std/median over the kept frames.
EvalReport aggregate(const FrameErrorTable& table, std::span<const std::int64_t> keep);

// Welch's unequal-variance two-sample t-test, two-sided.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);
WelchResult welch_t_test_from_summary(std::size_t na, double mean_a, double sample_var_a,
                                      std::size_t nb, double mean_b, double sample_var_b);
// Paired two-sided t-test on per-frame differences (requires equal sizes).
WelchResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Report CSV: articulator,n,mean_rmse_mm,std_rmse_mm,median_rmse_mm with a
// trailing GLOBAL row.
void write_eval_report(std::ostream& out, const EvalReport& report);
EvalReport parse_eval_report(std::istream& in);

// Frame table CSV: frame,articulator,rmse_mm,silent,mapped (for paired tests).
void write_frame_error_table(std::ostream& out, const FrameErrorTable& table);
FrameErrorTable parse_frame_error_table(std::istream& in);

// Human-readable table: one row per articulator plus Mean, columns RMSE+-std
// and Median, mirroring the results-table layout.
std::string render_report_table(const EvalReport& report, const std::string& condition_name);

// Side-by-side table for two conditions with significance stars (p < 0.05)
// on condition B.
std::string render_comparison_table(const EvalReport& a, const EvalReport& b,
                                    const std::string& name_a, const std::string& name_b,
                                    const std::vector<TTestResult>& tests);

}  // namespace articalign
