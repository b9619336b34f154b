#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "namecard/dataset.hpp"
#include "namecard/postprocess.hpp"

namespace namecard {

struct MatchResult {
    struct PredMatch {
        bool matched = false;
        std::optional<std::size_t> gt_index;
        std::optional<double> iou_value;
    };
    std::vector<PredMatch> preds;       // aligned with the prediction input
    std::vector<std::uint8_t> gt_covered;  // aligned with the ground-truth input
};

/// Greedy correctness matching: predictions in descending confidence (ties
/// keep input order) each claim the not-yet-claimed same-label ground truth
/// of highest overlap, provided that overlap is strictly greater than
/// iou_threshold. Each ground truth is claimed at most once.
MatchResult match_detections(std::span<const Detection> preds,
                             std::span<const LabeledBox> gts,
                             double iou_threshold = 0.8);

struct AverageIou {
    double value = 0.0;   // 0 when no prediction matched
    bool has_matches = false;
};

/// Mean overlap of matched predictions only.
AverageIou average_iou(const MatchResult& m);

enum class ApInterpolation { all_points, eleven_point };

/// Area under the precision-recall curve for one class over one collection
/// of predictions and ground truths (single ranking pass). Precision at each
/// recall is taken as the maximum precision at any recall at least as large.
/// Returns nullopt when the class has no ground-truth boxes.
std::optional<double> average_precision(std::span<const Detection> preds,
                                        std::span<const LabeledBox> gts,
                                        ClassId class_id,
                                        double iou_threshold = 0.8,
                                        ApInterpolation interp = ApInterpolation::all_points);

enum class F1Denominator {
    sum,      // 2a / (r + g), the harmonic mean of precision and recall
    product,  // 2a / (r * g), diagnostics only; not a mean
};

/// 0 when the denominator is 0. Throws std::invalid_argument when n_accurate
/// exceeds either count.
double f1_score(std::size_t n_accurate, std::size_t n_report, std::size_t n_gt,
                F1Denominator form = F1Denominator::sum);

struct EvalConfig {
    double iou_threshold = 0.8;  // correctness threshold for all three scores
    ApInterpolation ap_interpolation = ApInterpolation::all_points;
    /// Rank within each image and average per-image APs instead of ranking
    /// the whole dataset at once.
    bool per_image_ap = false;
    F1Denominator f1_denominator = F1Denominator::sum;
};

struct ClassScore {
    double avg_iou = 0.0;
    double ap = 0.0;
    double f1 = 0.0;
    std::size_t n_report = 0;
    std::size_t n_gt = 0;
    std::size_t n_accurate = 0;
    bool has_matches = false;    // avg_iou is a real mean, not the 0 default
    bool present_in_gt = false;  // class participates in the mAP mean
    /// No ground truths and no predictions: nothing to get wrong, so the
    /// report shows a perfect score for the class.
    bool vacuous = false;
};

struct ScoreReport {
    std::array<ClassScore, kNumClasses> per_class{};
    double total_avg_iou = 0.0;  // pooled over matched boxes of all classes
    bool total_has_matches = false;
    double map = 0.0;      // mean AP over classes present in the ground truth
    double total_f1 = 0.0;  // counts pooled across classes
    std::size_t n_images = 0;
    std::vector<std::string> warnings;
};

/// Predictions and ground truths for one image, already paired.
struct ImageSample {
    std::string image_id;
    std::vector<Detection> preds;
    std::vector<LabeledBox> gts;
};

ScoreReport evaluate_dataset(std::span<const ImageSample> samples,
                             const EvalConfig& cfg = {});

/// Pairs prediction and ground-truth annotations by image id, warning about
/// (and skipping) ids present on only one side. Prediction boxes without a
/// confidence default to 1.
ScoreReport evaluate_annotations(std::span<const Annotation> preds,
                                 std::span<const Annotation> gts,
                                 const EvalConfig& cfg = {});

std::vector<Detection> detections_from_annotation(const Annotation& a);

/// Aligned four-column table (Chinese / English / Numer / Total; the header
/// spelling matches the established report layout) with rows IoU, mAP, F-1
/// as percentages with two decimals.
std::string format_score_table(const ScoreReport& report);

/// JSON rendering of every report field, for machine consumption.
std::string score_report_json(const ScoreReport& report);

}  // namespace namecard
