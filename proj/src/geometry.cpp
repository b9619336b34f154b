#include "namecard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace namecard {

bool is_valid_box(const Box& b) {
    return std::isfinite(b.x) && std::isfinite(b.y) && b.w > 0.0 && b.h > 0.0;
}

static void require_valid(const Box& b, const char* role) {
    if (!is_valid_box(b)) {
        throw std::invalid_argument(std::string(role) +
                                    " box must have positive width and height");
    }
}

double iou(const Box& a, const Box& b) {
    require_valid(a, "first");
    require_valid(b, "second");

    const double ix = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;

    const double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

BoxDelta encode_box(const Box& gt, const Box& anchor) {
    require_valid(gt, "ground-truth");
    require_valid(anchor, "anchor");
    return BoxDelta{
        (gt.x - anchor.x) / anchor.w,
        (gt.y - anchor.y) / anchor.h,
        std::log(gt.w / anchor.w),
        std::log(gt.h / anchor.h),
    };
}

Box decode_box(const BoxDelta& delta, const Box& anchor, double max_side,
               bool* saturated) {
    require_valid(anchor, "anchor");
    double w = anchor.w * std::exp(delta.tw);
    double h = anchor.h * std::exp(delta.th);
    if (w > max_side || h > max_side || !std::isfinite(w) || !std::isfinite(h)) {
        w = std::min(w, max_side);
        h = std::min(h, max_side);
        if (saturated) *saturated = true;
    }
    return Box{
        delta.tx * anchor.w + anchor.x,
        delta.ty * anchor.h + anchor.y,
        w,
        h,
    };
}

AnchorSet generate_anchors(std::size_t feature_height, std::size_t feature_width,
                           const AnchorSpec& spec) {
    if (feature_height < 1 || feature_width < 1) {
        throw std::invalid_argument("feature map must be at least 1x1");
    }
    if (spec.scales.empty() || spec.aspect_ratios.empty()) {
        throw std::invalid_argument("anchor spec needs at least one scale and one ratio");
    }
    if (spec.stride <= 0.0) {
        throw std::invalid_argument("stride must be positive");
    }

    // Shapes are shared by every cell; precompute per (scale, ratio).
    std::vector<double> widths, heights;
    widths.reserve(spec.anchors_per_cell());
    heights.reserve(spec.anchors_per_cell());
    for (double scale : spec.scales) {
        for (double ratio : spec.aspect_ratios) {
            if (scale <= 0.0 || ratio <= 0.0) {
                throw std::invalid_argument("scales and ratios must be positive");
            }
            const double root = std::sqrt(ratio);
            widths.push_back(scale / root);
            heights.push_back(scale * root);
        }
    }

    const double image_w = static_cast<double>(feature_width) * spec.stride;
    const double image_h = static_cast<double>(feature_height) * spec.stride;

    AnchorSet set;
    set.feature_height = feature_height;
    set.feature_width = feature_width;
    set.spec = spec;
    set.anchors.reserve(spec.anchors_per_cell() * feature_height * feature_width);
    set.cross_boundary.reserve(set.anchors.capacity());

    for (std::size_t row = 0; row < feature_height; ++row) {
        const double cy = (static_cast<double>(row) + 0.5) * spec.stride;
        for (std::size_t col = 0; col < feature_width; ++col) {
            const double cx = (static_cast<double>(col) + 0.5) * spec.stride;
            for (std::size_t k = 0; k < widths.size(); ++k) {
                Box b{cx - widths[k] / 2.0, cy - heights[k] / 2.0, widths[k], heights[k]};
                const bool crosses =
                    b.x < 0.0 || b.y < 0.0 || b.right() > image_w || b.bottom() > image_h;
                set.anchors.push_back(b);
                set.cross_boundary.push_back(crosses ? 1 : 0);
            }
        }
    }
    return set;
}

}  // namespace namecard
