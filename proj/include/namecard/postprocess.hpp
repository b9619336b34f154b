#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "namecard/dataset.hpp"
#include "namecard/geometry.hpp"

namespace namecard {

struct Detection {
    Box box;
    ClassId class_id = ClassId::Chinese;
    double confidence = 0.0;  // in [0, 1]
};

/// Keeps detections with confidence strictly greater than the threshold,
/// preserving input order.
std::vector<Detection> filter_by_confidence(std::span<const Detection> dets,
                                            double threshold = 0.8);

/// Greedy non-maximum suppression: sort by confidence descending (ties keep
/// input order), keep the top, drop remaining detections whose overlap with a
/// kept box exceeds iou_threshold. With class_aware set, only same-class
/// boxes suppress each other. Output stays sorted by confidence descending.
std::vector<Detection> nms(std::span<const Detection> dets,
                           double iou_threshold = 0.3, bool class_aware = true);

/// Dense m x n x c tensor, row-major over (row, col, channel).
struct FeatureMap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<float> data;

    FeatureMap() = default;
    FeatureMap(std::size_t h, std::size_t w, std::size_t c)
        : height(h), width(w), channels(c), data(h * w * c, 0.0f) {}

    float& at(std::size_t row, std::size_t col, std::size_t ch) {
        return data[(row * width + col) * channels + ch];
    }
    float at(std::size_t row, std::size_t col, std::size_t ch) const {
        return data[(row * width + col) * channels + ch];
    }
};

/// Per-channel max pooling of a region into a fixed out_size x out_size grid.
/// The region is clipped to the map (floor for the origin, ceil for the
/// extent, at least one cell per axis); bin (i, j) then covers rows
/// [floor(i*m/out), ceil((i+1)*m/out)) of the clipped region and the
/// analogous columns, so every bin holds at least one cell. A region that
/// misses the map entirely throws std::invalid_argument. When `clipped` is
/// non-null it reports whether clipping changed the region.
FeatureMap roi_pool(const FeatureMap& fm, const Box& roi, std::size_t out_size = 7,
                    bool* clipped = nullptr);

/// Image-space box to feature-map coordinates: all four fields divided by
/// the stride. Cell rounding happens inside roi_pool.
Box map_box_to_feature(const Box& image_box, double stride);

}  // namespace namecard
