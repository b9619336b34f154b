#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "namecard/dataset.hpp"
#include "namecard/geometry.hpp"

namespace namecard {

struct AssignmentConfig {
    double pos_iou_threshold = 0.8;
    double neg_iou_threshold = 0.3;
    /// Drop boundary-crossing anchors from assignment (they become ignore).
    bool ignore_cross_boundary = false;
};

enum class AnchorLabelKind { negative, positive, ignore };

struct AnchorLabel {
    AnchorLabelKind label = AnchorLabelKind::negative;
    /// Set iff positive: lowest-index ground truth attaining this anchor's
    /// best overlap, and the regression target toward it.
    std::optional<std::size_t> matched_gt;
    std::optional<BoxDelta> target_delta;
};

/// Anchor-to-ground-truth assignment. An anchor is positive when its best
/// overlap exceeds pos_iou_threshold or when it attains the best overlap any
/// anchor reaches for some ground truth (ties all count); negative when its
/// best overlap is below neg_iou_threshold; ignore otherwise. No ground
/// truths makes every eligible anchor negative.
std::vector<AnchorLabel> assign_anchors(std::span<const Box> candidates,
                                        std::span<const LabeledBox> gts,
                                        const AssignmentConfig& cfg = {},
                                        std::span<const std::uint8_t> cross_boundary = {});

std::vector<AnchorLabel> assign_anchors(const AnchorSet& anchors,
                                        std::span<const LabeledBox> gts,
                                        const AssignmentConfig& cfg = {});

/// -ln of the probability assigned to the true class. Inputs below 1e-12 are
/// clamped before the log; p outside [0, 1] throws std::domain_error.
double cls_loss(double p_correct);
double cls_loss_derivative(double p_correct);

enum class SmoothL1Form {
    /// |d| for |d| <= 1, d^2 beyond (default).
    abs_inside,
    /// 0.5 d^2 for |d| <= 1, |d| - 0.5 beyond.
    huber,
};

double smooth_l1(double d, SmoothL1Form form = SmoothL1Form::abs_inside);
/// Derivative where defined (away from |d| = 1, and 0 for abs_inside).
double smooth_l1_derivative(double d, SmoothL1Form form = SmoothL1Form::abs_inside);

struct AnchorPrediction {
    /// Probability the model assigns to this anchor's true class
    /// (objectness for the proposal stage). Callers softmax upstream.
    double p_correct = 1.0;
    BoxDelta delta;
};

struct LossBreakdown {
    double cls_term = 0.0;  // (1 / n_cls) * sum of classification losses
    double reg_term = 0.0;  // (lambda / n_reg) * sum of regression losses
    double total = 0.0;
    std::size_t n_cls = 0;
    std::size_t n_reg = 0;
    double lambda = 0.0;
};

/// Classification summed over non-ignored anchors, regression over the four
/// delta components of positive anchors. Sums run left to right so repeated
/// evaluations reproduce bit-identical totals. Throws std::invalid_argument
/// when predictions and labels differ in length or a count is zero.
LossBreakdown rpn_loss(std::span<const AnchorLabel> labels,
                       std::span<const AnchorPrediction> predictions,
                       double lambda, std::size_t n_cls, std::size_t n_reg,
                       SmoothL1Form form = SmoothL1Form::abs_inside);

/// Same reduction with region proposals standing in for anchors; `labels`
/// must come from assign_anchors over those proposals.
LossBreakdown fast_rcnn_loss(std::span<const Box> proposals,
                             std::span<const AnchorLabel> labels,
                             std::span<const AnchorPrediction> predictions,
                             double lambda, std::size_t n_cls, std::size_t n_reg,
                             SmoothL1Form form = SmoothL1Form::abs_inside);

}  // namespace namecard
