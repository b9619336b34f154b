#include "namecard/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace namecard {

std::vector<Detection> filter_by_confidence(std::span<const Detection> dets,
                                            double threshold) {
    std::vector<Detection> out;
    out.reserve(dets.size());
    for (const auto& d : dets) {
        if (d.confidence > threshold) out.push_back(d);
    }
    return out;
}

std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold,
                           bool class_aware) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].confidence > dets[b].confidence;
    });

    std::vector<Detection> kept;
    kept.reserve(dets.size());
    for (std::size_t idx : order) {
        const Detection& cand = dets[idx];
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (class_aware && k.class_id != cand.class_id) continue;
            if (iou(k.box, cand.box) > iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(cand);
    }
    return kept;
}

FeatureMap roi_pool(const FeatureMap& fm, const Box& roi, std::size_t out_size,
                    bool* clipped) {
    if (fm.height == 0 || fm.width == 0 || fm.channels == 0) {
        throw std::invalid_argument("feature map must be non-empty");
    }
    if (out_size == 0) {
        throw std::invalid_argument("output size must be positive");
    }

    const auto m = static_cast<double>(fm.height);
    const auto n = static_cast<double>(fm.width);

    // floor for the origin, ceil for the extent, then clip to the map
    long r0 = static_cast<long>(std::floor(roi.y));
    long c0 = static_cast<long>(std::floor(roi.x));
    long r1 = static_cast<long>(std::ceil(roi.bottom()));
    long c1 = static_cast<long>(std::ceil(roi.right()));

    const bool was_clipped = r0 < 0 || c0 < 0 || r1 > static_cast<long>(m) ||
                             c1 > static_cast<long>(n);
    r0 = std::clamp(r0, 0L, static_cast<long>(fm.height));
    c0 = std::clamp(c0, 0L, static_cast<long>(fm.width));
    r1 = std::clamp(r1, 0L, static_cast<long>(fm.height));
    c1 = std::clamp(c1, 0L, static_cast<long>(fm.width));
    if (r1 <= r0 || c1 <= c0) {
        throw std::invalid_argument("region lies outside the feature map");
    }
    if (clipped) *clipped = was_clipped;

    const std::size_t rows = static_cast<std::size_t>(r1 - r0);
    const std::size_t cols = static_cast<std::size_t>(c1 - c0);

    // Bin edge for index i over `extent` cells; clamped so no bin is empty.
    auto lo_edge = [out_size](std::size_t i, std::size_t extent) {
        std::size_t e = (i * extent) / out_size;  // floor(i*extent/out)
        return std::min(e, extent - 1);
    };
    auto hi_edge = [out_size](std::size_t i, std::size_t extent) {
        std::size_t e = ((i + 1) * extent + out_size - 1) / out_size;  // ceil
        return std::max<std::size_t>(e, 1);
    };

    FeatureMap out(out_size, out_size, fm.channels);
    for (std::size_t i = 0; i < out_size; ++i) {
        std::size_t br0 = lo_edge(i, rows);
        std::size_t br1 = std::max(hi_edge(i, rows), br0 + 1);
        for (std::size_t j = 0; j < out_size; ++j) {
            std::size_t bc0 = lo_edge(j, cols);
            std::size_t bc1 = std::max(hi_edge(j, cols), bc0 + 1);
            for (std::size_t ch = 0; ch < fm.channels; ++ch) {
                float best = fm.at(static_cast<std::size_t>(r0) + br0,
                                   static_cast<std::size_t>(c0) + bc0, ch);
                for (std::size_t r = br0; r < br1; ++r) {
                    for (std::size_t c = bc0; c < bc1; ++c) {
                        best = std::max(best, fm.at(static_cast<std::size_t>(r0) + r,
                                                    static_cast<std::size_t>(c0) + c, ch));
                    }
                }
                out.at(i, j, ch) = best;
            }
        }
    }
    return out;
}

Box map_box_to_feature(const Box& image_box, double stride) {
    if (stride <= 0.0) {
        throw std::invalid_argument("stride must be positive");
    }
    return Box{image_box.x / stride, image_box.y / stride, image_box.w / stride,
               image_box.h / stride};
}

}  // namespace namecard
