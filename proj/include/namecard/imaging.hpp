#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "namecard/dataset.hpp"

namespace namecard {

/// 8-bit RGB raster, row-major triples. Every transform below re-quantizes
/// to 8 bits (round half away from zero, clamp to [0, 255]) so outputs are
/// the same bytes on every platform.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // 3 * height * width

    ImageBuffer() = default;
    ImageBuffer(int h, int w, std::array<std::uint8_t, 3> fill = {0, 0, 0});

    std::uint8_t& at(int row, int col, int channel) {
        return pixels[static_cast<std::size_t>(3) * (static_cast<std::size_t>(row) * width + col) + channel];
    }
    std::uint8_t at(int row, int col, int channel) const {
        return pixels[static_cast<std::size_t>(3) * (static_cast<std::size_t>(row) * width + col) + channel];
    }
    bool operator==(const ImageBuffer&) const = default;
};

/// Rec. 601 luma of one pixel, rounded half away from zero.
int pixel_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Each channel scaled by the factor. Factor 1 is the identity; factor 0 is
/// black. Negative factors throw std::domain_error (all four enhancers).
ImageBuffer enhance_brightness(const ImageBuffer& img, double factor);

/// Per-pixel blend between the grayscale image (factor 0) and the original
/// (factor 1); larger factors push colors apart.
ImageBuffer enhance_color(const ImageBuffer& img, double factor);

/// Per-pixel blend between the image's mean gray (factor 0) and the
/// original (factor 1).
ImageBuffer enhance_contrast(const ImageBuffer& img, double factor);

/// Blend between a 3x3 smoothed copy (factor 0, kernel center 5 edge 1
/// corner 1 over 13, border rows copied) and the original (factor 1).
ImageBuffer enhance_sharpness(const ImageBuffer& img, double factor);

struct AugmentationGrid {
    std::vector<double> brightness_factors = {0.5, 0.8, 1.2, 1.5};
    std::vector<double> color_factors = {0.5, 0.8, 1.2, 1.5};
    std::vector<double> contrast_factors = {0.5, 0.8, 1.2, 1.5};
    std::vector<double> sharpness_factors = {0.2, 0.5, 2.0, 3.0};

    std::size_t variant_count() const {
        return brightness_factors.size() * color_factors.size() *
               contrast_factors.size() * sharpness_factors.size();
    }
};

/// Applies brightness, color, contrast, sharpness in that order for every
/// factor combination and hands each result to `sink` together with the
/// unchanged annotation and a variant id "b<i>c<j>k<l>s<m>" built from the
/// four factor indices. Intermediate results are shared across the nest, so
/// a full default grid costs 340 enhancer passes rather than 1024.
void enumerate_augmentations(
    const ImageBuffer& img, const Annotation& annotation, const AugmentationGrid& grid,
    const std::function<void(const ImageBuffer&, const Annotation&, const std::string&)>& sink);

}  // namespace namecard
