#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "namecard/dataset.hpp"
#include "namecard/imaging.hpp"

namespace namecard {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
/// One blank column between characters.
inline constexpr int kGlyphAdvance = 6;

/// 5x7 bitmap; each byte is one column, bit 0 the top row. Digits and both
/// letter cases are covered; nullptr for anything else.
const std::array<std::uint8_t, 5>* find_glyph(char c);

struct FakeCardSpec {
    int width = 640;
    int height = 400;
    int n_items = 8;
    std::uint64_t seed = 0;
    /// Which string kinds to draw; only English and Number make sense here.
    std::vector<ClassId> classes = {ClassId::English, ClassId::Number};
    int min_font_scale = 1;
    int max_font_scale = 3;
    /// Light background tint, drawn per card and per channel.
    std::uint8_t background_min = 200;
    std::uint8_t background_max = 255;
    int max_placement_attempts = 100;
};

struct FakeCard {
    ImageBuffer image;
    Annotation annotation;
    /// Items that found no overlap-free spot and were skipped.
    int dropped_items = 0;
};

/// Deterministic in the seed: strings of 1-12 characters are placed at
/// uniformly random positions and scales, rejected until their tight pixel
/// bounds overlap nothing already placed (zero overlap required, touching
/// edges allowed). Each annotation box is the tight bound of the glyph
/// pixels it contains. Throws std::invalid_argument for an impossible spec.
FakeCard generate_card(const FakeCardSpec& spec, const std::string& image_id = "card");

struct BatchCardInfo {
    std::string image_id;
    std::uint64_t seed = 0;
    std::size_t n_boxes = 0;
    int dropped_items = 0;
};

struct BatchSummary {
    std::vector<BatchCardInfo> cards;
    std::array<std::size_t, kNumClasses> class_box_counts{};
    std::filesystem::path manifest_path;
    std::filesystem::path index_path;
};

/// Writes `count` cards seeded seed, seed+1, ... into out_dir as PNG plus
/// sibling annotation, an index.txt of image paths, and manifest.json with
/// per-card seeds and per-class box counts.
BatchSummary generate_batch(const FakeCardSpec& spec, std::size_t count,
                            const std::filesystem::path& out_dir);

}  // namespace namecard
