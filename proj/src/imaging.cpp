#include "namecard/imaging.hpp"

#include <cmath>
#include <stdexcept>

namespace namecard {

ImageBuffer::ImageBuffer(int h, int w, std::array<std::uint8_t, 3> fill)
    : height(h), width(w) {
    if (h <= 0 || w <= 0) {
        throw std::invalid_argument("image dimensions must be positive");
    }
    pixels.resize(static_cast<std::size_t>(3) * h * w);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = fill[0];
        pixels[i + 1] = fill[1];
        pixels[i + 2] = fill[2];
    }
}

namespace {

std::uint8_t quantize(double v) {
    const double r = std::round(v);  // halfway cases go away from zero
    if (r <= 0.0) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

void require_factor(double factor) {
    if (factor < 0.0 || !std::isfinite(factor)) {
        throw std::domain_error("enhancement factor must be non-negative");
    }
}

}  // namespace

int pixel_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<int>(std::round(0.299 * r + 0.587 * g + 0.114 * b));
}

ImageBuffer enhance_brightness(const ImageBuffer& img, double factor) {
    require_factor(factor);
    ImageBuffer out = img;
    for (auto& v : out.pixels) v = quantize(v * factor);
    return out;
}

ImageBuffer enhance_color(const ImageBuffer& img, double factor) {
    require_factor(factor);
    ImageBuffer out = img;
    for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
        const double gray = pixel_gray(img.pixels[i], img.pixels[i + 1], img.pixels[i + 2]);
        for (int ch = 0; ch < 3; ++ch) {
            out.pixels[i + ch] = quantize(gray + factor * (img.pixels[i + ch] - gray));
        }
    }
    return out;
}

ImageBuffer enhance_contrast(const ImageBuffer& img, double factor) {
    require_factor(factor);
    double gray_sum = 0.0;
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        gray_sum += pixel_gray(img.pixels[i], img.pixels[i + 1], img.pixels[i + 2]);
    }
    const double pixel_count = static_cast<double>(img.pixels.size() / 3);
    const double mean = std::round(gray_sum / pixel_count);

    ImageBuffer out = img;
    for (auto& v : out.pixels) v = quantize(mean + factor * (v - mean));
    return out;
}

ImageBuffer enhance_sharpness(const ImageBuffer& img, double factor) {
    require_factor(factor);
    ImageBuffer out = img;
    // Border pixels keep their original values; the kernel only runs where
    // the full 3x3 neighborhood exists.
    for (int row = 1; row + 1 < img.height; ++row) {
        for (int col = 1; col + 1 < img.width; ++col) {
            for (int ch = 0; ch < 3; ++ch) {
                int weighted = 5 * img.at(row, col, ch);
                weighted += img.at(row - 1, col, ch) + img.at(row + 1, col, ch) +
                            img.at(row, col - 1, ch) + img.at(row, col + 1, ch);
                weighted += img.at(row - 1, col - 1, ch) + img.at(row - 1, col + 1, ch) +
                            img.at(row + 1, col - 1, ch) + img.at(row + 1, col + 1, ch);
                const double smooth = weighted / 13.0;
                out.at(row, col, ch) =
                    quantize(smooth + factor * (img.at(row, col, ch) - smooth));
            }
        }
    }
    return out;
}

void enumerate_augmentations(
    const ImageBuffer& img, const Annotation& annotation, const AugmentationGrid& grid,
    const std::function<void(const ImageBuffer&, const Annotation&, const std::string&)>& sink) {
    for (std::size_t bi = 0; bi < grid.brightness_factors.size(); ++bi) {
        const ImageBuffer b = enhance_brightness(img, grid.brightness_factors[bi]);
        for (std::size_t cj = 0; cj < grid.color_factors.size(); ++cj) {
            const ImageBuffer c = enhance_color(b, grid.color_factors[cj]);
            for (std::size_t kl = 0; kl < grid.contrast_factors.size(); ++kl) {
                const ImageBuffer k = enhance_contrast(c, grid.contrast_factors[kl]);
                for (std::size_t sm = 0; sm < grid.sharpness_factors.size(); ++sm) {
                    const ImageBuffer s = enhance_sharpness(k, grid.sharpness_factors[sm]);
                    const std::string variant_id =
                        "b" + std::to_string(bi) + "c" + std::to_string(cj) + "k" +
                        std::to_string(kl) + "s" + std::to_string(sm);
                    sink(s, annotation, variant_id);
                }
            }
        }
    }
}

}  // namespace namecard
