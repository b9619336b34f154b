#include "namecard/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace namecard {

std::vector<AnchorLabel> assign_anchors(std::span<const Box> candidates,
                                        std::span<const LabeledBox> gts,
                                        const AssignmentConfig& cfg,
                                        std::span<const std::uint8_t> cross_boundary) {
    if (candidates.empty()) {
        throw std::invalid_argument("assignment needs at least one candidate box");
    }
    if (cfg.neg_iou_threshold < 0.0 || cfg.pos_iou_threshold > 1.0 ||
        cfg.neg_iou_threshold > cfg.pos_iou_threshold) {
        throw std::invalid_argument("need 0 <= neg_iou_threshold <= pos_iou_threshold <= 1");
    }
    if (!cross_boundary.empty() && cross_boundary.size() != candidates.size()) {
        throw std::invalid_argument("cross_boundary flags must align with candidates");
    }

    const std::size_t n = candidates.size();
    const std::size_t g = gts.size();

    auto eligible = [&](std::size_t i) {
        return !(cfg.ignore_cross_boundary && !cross_boundary.empty() &&
                 cross_boundary[i] != 0);
    };

    std::vector<AnchorLabel> labels(n);

    // Full overlap matrix; instances are desk-scale.
    std::vector<double> overlap(n * g, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            overlap[i * g + j] = iou(candidates[i], gts[j].box);
        }
    }

    // Best overlap any eligible anchor reaches per ground truth.
    std::vector<double> gt_best(g, -1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!eligible(i)) continue;
        for (std::size_t j = 0; j < g; ++j) {
            gt_best[j] = std::max(gt_best[j], overlap[i * g + j]);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!eligible(i)) {
            labels[i].label = AnchorLabelKind::ignore;
            continue;
        }
        if (g == 0) {
            labels[i].label = AnchorLabelKind::negative;
            continue;
        }

        double best = -1.0;
        std::size_t best_gt = 0;
        bool is_argmax = false;
        for (std::size_t j = 0; j < g; ++j) {
            const double v = overlap[i * g + j];
            if (v > best) {
                best = v;
                best_gt = j;
            }
            if (v == gt_best[j]) is_argmax = true;
        }

        if (best > cfg.pos_iou_threshold || is_argmax) {
            labels[i].label = AnchorLabelKind::positive;
            labels[i].matched_gt = best_gt;
            labels[i].target_delta = encode_box(gts[best_gt].box, candidates[i]);
        } else if (best < cfg.neg_iou_threshold) {
            labels[i].label = AnchorLabelKind::negative;
        } else {
            labels[i].label = AnchorLabelKind::ignore;
        }
    }
    return labels;
}

std::vector<AnchorLabel> assign_anchors(const AnchorSet& anchors,
                                        std::span<const LabeledBox> gts,
                                        const AssignmentConfig& cfg) {
    return assign_anchors(std::span<const Box>(anchors.anchors), gts, cfg,
                          std::span<const std::uint8_t>(anchors.cross_boundary));
}

namespace {
constexpr double kProbabilityFloor = 1e-12;
}

double cls_loss(double p_correct) {
    if (p_correct < 0.0 || p_correct > 1.0) {
        throw std::domain_error("probability must lie in [0, 1]");
    }
    return -std::log(std::max(p_correct, kProbabilityFloor));
}

double cls_loss_derivative(double p_correct) {
    if (p_correct < 0.0 || p_correct > 1.0) {
        throw std::domain_error("probability must lie in [0, 1]");
    }
    return -1.0 / std::max(p_correct, kProbabilityFloor);
}

double smooth_l1(double d, SmoothL1Form form) {
    const double a = std::abs(d);
    if (form == SmoothL1Form::abs_inside) {
        return a <= 1.0 ? a : d * d;
    }
    return a <= 1.0 ? 0.5 * d * d : a - 0.5;
}

double smooth_l1_derivative(double d, SmoothL1Form form) {
    const double sign = d < 0.0 ? -1.0 : (d > 0.0 ? 1.0 : 0.0);
    if (form == SmoothL1Form::abs_inside) {
        return std::abs(d) <= 1.0 ? sign : 2.0 * d;
    }
    return std::abs(d) <= 1.0 ? d : sign;
}

namespace {

LossBreakdown reduce_loss(std::span<const AnchorLabel> labels,
                          std::span<const AnchorPrediction> predictions,
                          double lambda, std::size_t n_cls, std::size_t n_reg,
                          SmoothL1Form form) {
    if (labels.size() != predictions.size()) {
        throw std::invalid_argument("predictions must align 1:1 with labels");
    }
    if (n_cls == 0 || n_reg == 0) {
        throw std::invalid_argument("normalizer counts must be positive");
    }

    double cls_sum = 0.0;
    double reg_sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& lab = labels[i];
        if (lab.label == AnchorLabelKind::ignore) continue;
        cls_sum += cls_loss(predictions[i].p_correct);
        if (lab.label != AnchorLabelKind::positive) continue;

        const BoxDelta& t = predictions[i].delta;
        const BoxDelta& target = *lab.target_delta;
        reg_sum += smooth_l1(t.tx - target.tx, form);
        reg_sum += smooth_l1(t.ty - target.ty, form);
        reg_sum += smooth_l1(t.tw - target.tw, form);
        reg_sum += smooth_l1(t.th - target.th, form);
    }

    LossBreakdown out;
    out.cls_term = cls_sum / static_cast<double>(n_cls);
    out.reg_term = lambda * reg_sum / static_cast<double>(n_reg);
    out.total = out.cls_term + out.reg_term;
    out.n_cls = n_cls;
    out.n_reg = n_reg;
    out.lambda = lambda;
    return out;
}

}  // namespace

LossBreakdown rpn_loss(std::span<const AnchorLabel> labels,
                       std::span<const AnchorPrediction> predictions,
                       double lambda, std::size_t n_cls, std::size_t n_reg,
                       SmoothL1Form form) {
    return reduce_loss(labels, predictions, lambda, n_cls, n_reg, form);
}

LossBreakdown fast_rcnn_loss(std::span<const Box> proposals,
                             std::span<const AnchorLabel> labels,
                             std::span<const AnchorPrediction> predictions,
                             double lambda, std::size_t n_cls, std::size_t n_reg,
                             SmoothL1Form form) {
    if (proposals.size() != labels.size()) {
        throw std::invalid_argument("labels must align 1:1 with proposals");
    }
    return reduce_loss(labels, predictions, lambda, n_cls, n_reg, form);
}

}  // namespace namecard
