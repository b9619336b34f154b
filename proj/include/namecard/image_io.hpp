#pragma once

#include <filesystem>

#include "namecard/imaging.hpp"

namespace namecard {

/// Decodes PNG or JPEG into RGB. Throws std::runtime_error on missing or
/// undecodable files.
ImageBuffer read_image(const std::filesystem::path& path);

/// Lossless PNG with fixed encoder settings: re-reading returns the same
/// pixels, and identical buffers produce identical files.
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace namecard
