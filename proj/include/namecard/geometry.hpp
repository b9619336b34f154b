#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace namecard {

/// Axis-aligned box: top-left corner plus size, in pixels. Coordinates are
/// real-valued, so sub-pixel positions and sizes are legal. Width and height
/// must be positive for the box to be valid.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }
};

bool is_valid_box(const Box& b);

/// Scale-normalized offsets of a box relative to an anchor: tx/ty shift the
/// corner in units of the anchor size, tw/th are log size ratios.
struct BoxDelta {
    double tx = 0.0;
    double ty = 0.0;
    double tw = 0.0;
    double th = 0.0;
};

/// Intersection area over union area, in [0, 1]. Symmetric, 0 for disjoint
/// boxes, 1 for identical ones. Throws std::invalid_argument when either box
/// has non-positive width or height.
double iou(const Box& a, const Box& b);

/// Regression target of `gt` relative to `anchor`:
///   tx = (x - xa) / wa, ty = (y - ya) / ha, tw = ln(w / wa), th = ln(h / ha).
/// Throws std::invalid_argument when either box has non-positive size.
BoxDelta encode_box(const Box& gt, const Box& anchor);

/// Inverse of encode_box. The output always has positive area. Width and
/// height are clamped to `max_side` so extreme deltas cannot overflow; when
/// clamping fires and `saturated` is non-null it is set to true.
Box decode_box(const BoxDelta& delta, const Box& anchor, double max_side = 1e8,
               bool* saturated = nullptr);

/// Anchor shape configuration: every (scale, ratio) pair yields one anchor
/// per feature-map cell. A scale is the side length of the ratio-1 square;
/// other ratios keep the area and set h/w = ratio.
struct AnchorSpec {
    std::vector<double> scales = {128.0, 256.0, 512.0};
    std::vector<double> aspect_ratios = {0.5, 1.0, 2.0};
    double stride = 16.0;

    std::size_t anchors_per_cell() const {
        return scales.size() * aspect_ratios.size();
    }
};

/// Dense anchor grid over an m x n feature map: anchors_per_cell() * m * n
/// boxes, ordered row-major over (row, col, anchor) with
/// anchor = scale_index * |ratios| + ratio_index.
struct AnchorSet {
    std::vector<Box> anchors;
    /// Per anchor: reaches outside the (n*stride) x (m*stride) pixel area.
    std::vector<std::uint8_t> cross_boundary;
    std::size_t feature_height = 0;
    std::size_t feature_width = 0;
    AnchorSpec spec;
};

/// Anchors are centered at ((col + 0.5) * stride, (row + 0.5) * stride) and
/// stored in corner form. Out-of-image anchors are kept but flagged.
/// Throws std::invalid_argument for empty grids or an empty spec.
AnchorSet generate_anchors(std::size_t feature_height, std::size_t feature_width,
                           const AnchorSpec& spec);

}  // namespace namecard
