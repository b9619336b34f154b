#include "namecard/fakegen.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "namecard/image_io.hpp"
#include "namecard/rng.hpp"

namespace namecard {

namespace {

struct FontEntry {
    char c;
    std::array<std::uint8_t, 5> columns;
};

// Classic 5x7 terminal font; column bytes, LSB at the top.
constexpr FontEntry kFont[] = {
    {'0', {0x3E, 0x51, 0x49, 0x45, 0x3E}}, {'1', {0x00, 0x42, 0x7F, 0x40, 0x00}},
    {'2', {0x42, 0x61, 0x51, 0x49, 0x46}}, {'3', {0x21, 0x41, 0x45, 0x4B, 0x31}},
    {'4', {0x18, 0x14, 0x12, 0x7F, 0x10}}, {'5', {0x27, 0x45, 0x45, 0x45, 0x39}},
    {'6', {0x3C, 0x4A, 0x49, 0x49, 0x30}}, {'7', {0x01, 0x71, 0x09, 0x05, 0x03}},
    {'8', {0x36, 0x49, 0x49, 0x49, 0x36}}, {'9', {0x06, 0x49, 0x49, 0x29, 0x1E}},
    {'A', {0x7E, 0x11, 0x11, 0x11, 0x7E}}, {'B', {0x7F, 0x49, 0x49, 0x49, 0x36}},
    {'C', {0x3E, 0x41, 0x41, 0x41, 0x22}}, {'D', {0x7F, 0x41, 0x41, 0x22, 0x1C}},
    {'E', {0x7F, 0x49, 0x49, 0x49, 0x41}}, {'F', {0x7F, 0x09, 0x09, 0x09, 0x01}},
    {'G', {0x3E, 0x41, 0x49, 0x49, 0x7A}}, {'H', {0x7F, 0x08, 0x08, 0x08, 0x7F}},
    {'I', {0x00, 0x41, 0x7F, 0x41, 0x00}}, {'J', {0x20, 0x40, 0x41, 0x3F, 0x01}},
    {'K', {0x7F, 0x08, 0x14, 0x22, 0x41}}, {'L', {0x7F, 0x40, 0x40, 0x40, 0x40}},
    {'M', {0x7F, 0x02, 0x0C, 0x02, 0x7F}}, {'N', {0x7F, 0x04, 0x08, 0x10, 0x7F}},
    {'O', {0x3E, 0x41, 0x41, 0x41, 0x3E}}, {'P', {0x7F, 0x09, 0x09, 0x09, 0x06}},
    {'Q', {0x3E, 0x41, 0x51, 0x21, 0x5E}}, {'R', {0x7F, 0x09, 0x19, 0x29, 0x46}},
    {'S', {0x46, 0x49, 0x49, 0x49, 0x31}}, {'T', {0x01, 0x01, 0x7F, 0x01, 0x01}},
    {'U', {0x3F, 0x40, 0x40, 0x40, 0x3F}}, {'V', {0x1F, 0x20, 0x40, 0x20, 0x1F}},
    {'W', {0x3F, 0x40, 0x38, 0x40, 0x3F}}, {'X', {0x63, 0x14, 0x08, 0x14, 0x63}},
    {'Y', {0x07, 0x08, 0x70, 0x08, 0x07}}, {'Z', {0x61, 0x51, 0x49, 0x45, 0x43}},
    {'a', {0x20, 0x54, 0x54, 0x54, 0x78}}, {'b', {0x7F, 0x48, 0x44, 0x44, 0x38}},
    {'c', {0x38, 0x44, 0x44, 0x44, 0x20}}, {'d', {0x38, 0x44, 0x44, 0x48, 0x7F}},
    {'e', {0x38, 0x54, 0x54, 0x54, 0x18}}, {'f', {0x08, 0x7E, 0x09, 0x01, 0x02}},
    {'g', {0x0C, 0x52, 0x52, 0x52, 0x3E}}, {'h', {0x7F, 0x08, 0x04, 0x04, 0x78}},
    {'i', {0x00, 0x44, 0x7D, 0x40, 0x00}}, {'j', {0x20, 0x40, 0x44, 0x3D, 0x00}},
    {'k', {0x7F, 0x10, 0x28, 0x44, 0x00}}, {'l', {0x00, 0x41, 0x7F, 0x40, 0x00}},
    {'m', {0x7C, 0x04, 0x18, 0x04, 0x78}}, {'n', {0x7C, 0x08, 0x04, 0x04, 0x78}},
    {'o', {0x38, 0x44, 0x44, 0x44, 0x38}}, {'p', {0x7C, 0x14, 0x14, 0x14, 0x08}},
    {'q', {0x08, 0x14, 0x14, 0x18, 0x7C}}, {'r', {0x7C, 0x08, 0x04, 0x04, 0x08}},
    {'s', {0x48, 0x54, 0x54, 0x54, 0x20}}, {'t', {0x04, 0x3F, 0x44, 0x40, 0x20}},
    {'u', {0x3C, 0x40, 0x40, 0x20, 0x7C}}, {'v', {0x1C, 0x20, 0x40, 0x20, 0x1C}},
    {'w', {0x3C, 0x40, 0x30, 0x40, 0x3C}}, {'x', {0x44, 0x28, 0x10, 0x28, 0x44}},
    {'y', {0x0C, 0x50, 0x50, 0x50, 0x3C}}, {'z', {0x44, 0x64, 0x54, 0x4C, 0x44}},
};

constexpr char kDigits[] = "0123456789";
constexpr char kLetters[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

constexpr int kMinStringLength = 1;
constexpr int kMaxStringLength = 12;

// Tight bitmap bounds of a rendered string, in unscaled font cells.
struct CellBounds {
    int min_row, max_row, min_col, max_col;  // inclusive
};

CellBounds string_bounds(const std::string& text) {
    CellBounds b{kGlyphHeight, -1, kGlyphWidth * kGlyphAdvance * kMaxStringLength, -1};
    for (std::size_t k = 0; k < text.size(); ++k) {
        const auto* glyph = find_glyph(text[k]);
        const int origin = static_cast<int>(k) * kGlyphAdvance;
        for (int col = 0; col < kGlyphWidth; ++col) {
            const std::uint8_t bits = (*glyph)[col];
            if (bits == 0) continue;
            for (int row = 0; row < kGlyphHeight; ++row) {
                if (!(bits & (1u << row))) continue;
                b.min_row = std::min(b.min_row, row);
                b.max_row = std::max(b.max_row, row);
                b.min_col = std::min(b.min_col, origin + col);
                b.max_col = std::max(b.max_col, origin + col);
            }
        }
    }
    return b;
}

bool boxes_overlap(const Box& a, const Box& b) {
    return std::min(a.right(), b.right()) > std::max(a.x, b.x) &&
           std::min(a.bottom(), b.bottom()) > std::max(a.y, b.y);
}

void validate(const FakeCardSpec& spec) {
    if (spec.n_items < 0) throw std::invalid_argument("n_items must be non-negative");
    if (spec.classes.empty()) throw std::invalid_argument("need at least one class");
    for (ClassId c : spec.classes) {
        if (c != ClassId::English && c != ClassId::Number) {
            throw std::invalid_argument("fake cards render only English and Number");
        }
    }
    if (spec.min_font_scale < 1 || spec.min_font_scale > spec.max_font_scale) {
        throw std::invalid_argument("need 1 <= min_font_scale <= max_font_scale");
    }
    if (spec.background_min > spec.background_max) {
        throw std::invalid_argument("background range is inverted");
    }
    if (spec.width < kGlyphWidth * spec.min_font_scale ||
        spec.height < kGlyphHeight * spec.min_font_scale) {
        throw std::invalid_argument("card too small for a single glyph at min scale");
    }
    if (spec.max_placement_attempts < 1) {
        throw std::invalid_argument("max_placement_attempts must be positive");
    }
}

}  // namespace

const std::array<std::uint8_t, 5>* find_glyph(char c) {
    for (const auto& entry : kFont) {
        if (entry.c == c) return &entry.columns;
    }
    return nullptr;
}

FakeCard generate_card(const FakeCardSpec& spec, const std::string& image_id) {
    validate(spec);
    Pcg32 rng(spec.seed);

    FakeCard card;
    card.image = ImageBuffer(
        spec.height, spec.width,
        {static_cast<std::uint8_t>(spec.background_min +
                                   rng.bounded(spec.background_max - spec.background_min + 1u)),
         static_cast<std::uint8_t>(spec.background_min +
                                   rng.bounded(spec.background_max - spec.background_min + 1u)),
         static_cast<std::uint8_t>(spec.background_min +
                                   rng.bounded(spec.background_max - spec.background_min + 1u))});
    card.annotation.image_id = image_id;
    card.annotation.image_width = spec.width;
    card.annotation.image_height = spec.height;

    std::vector<Box> placed;

    for (int item = 0; item < spec.n_items; ++item) {
        const ClassId cls = spec.classes[rng.bounded(static_cast<std::uint32_t>(spec.classes.size()))];
        const int length = rng.range(kMinStringLength, kMaxStringLength);
        const int scale = rng.range(spec.min_font_scale, spec.max_font_scale);

        std::string text(static_cast<std::size_t>(length), '?');
        for (auto& ch : text) {
            ch = cls == ClassId::Number ? kDigits[rng.bounded(10)]
                                        : kLetters[rng.bounded(52)];
        }
        const std::array<std::uint8_t, 3> ink = {
            static_cast<std::uint8_t>(rng.bounded(81)),
            static_cast<std::uint8_t>(rng.bounded(81)),
            static_cast<std::uint8_t>(rng.bounded(81))};

        // Nominal cell footprint used for positioning; the annotation uses
        // the tight bound of actual glyph pixels.
        const int cell_w = scale * (kGlyphAdvance * length - 1);
        const int cell_h = scale * kGlyphHeight;
        if (cell_w > spec.width || cell_h > spec.height) {
            ++card.dropped_items;
            continue;
        }

        const CellBounds bounds = string_bounds(text);
        bool placed_ok = false;
        for (int attempt = 0; attempt < spec.max_placement_attempts; ++attempt) {
            const int pos_x = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(spec.width - cell_w + 1)));
            const int pos_y = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(spec.height - cell_h + 1)));

            const Box tight{static_cast<double>(pos_x + bounds.min_col * scale),
                            static_cast<double>(pos_y + bounds.min_row * scale),
                            static_cast<double>((bounds.max_col - bounds.min_col + 1) * scale),
                            static_cast<double>((bounds.max_row - bounds.min_row + 1) * scale)};

            bool collides = false;
            for (const Box& other : placed) {
                if (boxes_overlap(tight, other)) {
                    collides = true;
                    break;
                }
            }
            if (collides) continue;

            for (std::size_t k = 0; k < text.size(); ++k) {
                const auto* glyph = find_glyph(text[k]);
                const int origin_x = pos_x + static_cast<int>(k) * kGlyphAdvance * scale;
                for (int col = 0; col < kGlyphWidth; ++col) {
                    const std::uint8_t bits = (*glyph)[col];
                    for (int row = 0; row < kGlyphHeight; ++row) {
                        if (!(bits & (1u << row))) continue;
                        for (int dy = 0; dy < scale; ++dy) {
                            for (int dx = 0; dx < scale; ++dx) {
                                const int py = pos_y + row * scale + dy;
                                const int px = origin_x + col * scale + dx;
                                card.image.at(py, px, 0) = ink[0];
                                card.image.at(py, px, 1) = ink[1];
                                card.image.at(py, px, 2) = ink[2];
                            }
                        }
                    }
                }
            }

            placed.push_back(tight);
            card.annotation.boxes.push_back({tight, cls, std::nullopt});
            placed_ok = true;
            break;
        }
        if (!placed_ok) ++card.dropped_items;
    }
    return card;
}

BatchSummary generate_batch(const FakeCardSpec& spec, std::size_t count,
                            const std::filesystem::path& out_dir) {
    validate(spec);
    std::filesystem::create_directories(out_dir);

    BatchSummary summary;
    std::string index_text;

    for (std::size_t i = 0; i < count; ++i) {
        FakeCardSpec card_spec = spec;
        card_spec.seed = spec.seed + i;

        char name[32];
        std::snprintf(name, sizeof(name), "fake_%05zu", i);

        const FakeCard card = generate_card(card_spec, name);
        write_png(out_dir / (std::string(name) + ".png"), card.image);
        save_annotation_file(out_dir / (std::string(name) + ".txt"), card.annotation);
        index_text += std::string(name) + ".png\n";

        BatchCardInfo info;
        info.image_id = name;
        info.seed = card_spec.seed;
        info.n_boxes = card.annotation.boxes.size();
        info.dropped_items = card.dropped_items;
        summary.cards.push_back(info);
        for (const auto& b : card.annotation.boxes) {
            ++summary.class_box_counts[static_cast<std::size_t>(b.class_id)];
        }
    }

    summary.index_path = out_dir / "index.txt";
    {
        std::ofstream out(summary.index_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + summary.index_path.string());
        out << index_text;
    }

    nlohmann::json manifest;
    manifest["count"] = count;
    manifest["base_seed"] = spec.seed;
    for (std::size_t ci = 0; ci < kNumClasses; ++ci) {
        manifest["class_box_counts"][class_name(static_cast<ClassId>(ci))] =
            summary.class_box_counts[ci];
    }
    for (const auto& c : summary.cards) {
        manifest["cards"].push_back({{"image_id", c.image_id},
                                     {"seed", c.seed},
                                     {"n_boxes", c.n_boxes},
                                     {"dropped_items", c.dropped_items}});
    }
    if (summary.cards.empty()) manifest["cards"] = nlohmann::json::array();

    summary.manifest_path = out_dir / "manifest.json";
    {
        std::ofstream out(summary.manifest_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + summary.manifest_path.string());
        out << manifest.dump(2) << "\n";
    }
    return summary;
}

}  // namespace namecard
