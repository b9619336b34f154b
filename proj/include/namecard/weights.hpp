#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace namecard {

/// binary32 -> binary16, round to nearest even. Finite magnitudes beyond
/// 65504 saturate to +-65504 rather than overflowing to infinity (weights
/// should never become infinite); infinities themselves stay infinite so
/// re-quantizing an already-16-bit value is always a no-op. NaN becomes a
/// quiet NaN that keeps the sign and the top payload bits.
std::uint16_t f32_to_f16(float x);

/// Exact widening; every binary16 value is representable in binary32.
float f16_to_f32(std::uint16_t h);

enum class TensorDtype : std::uint8_t { f32 = 0, f16 = 1 };

std::size_t dtype_size(TensorDtype d);

struct TensorRecord {
    std::string name;
    TensorDtype dtype = TensorDtype::f32;
    std::vector<std::uint32_t> shape;
    std::vector<std::uint8_t> payload;  // little-endian elements

    std::size_t element_count() const;
};

/// Container layout, all integers little-endian:
///   magic "CKTF", u32 version = 1, u32 tensor count, then per tensor:
///   u32 name length, name bytes, u8 dtype (0 = f32, 1 = f16), u8 rank,
///   u32 extents..., payload bytes.
struct TensorFile {
    std::uint32_t version = 1;
    std::vector<TensorRecord> tensors;
};

class TensorFileError : public std::runtime_error {
public:
    TensorFileError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

TensorFile read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const std::filesystem::path& path, const TensorFile& file);

struct TensorConversion {
    std::string name;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    std::size_t bytes_before = 0;
    std::size_t bytes_after = 0;
    std::size_t saturated = 0;  // finite values clamped to +-65504
    bool skipped = false;       // was already f16; copied through
};

struct QuantizeReport {
    std::vector<TensorConversion> tensors;
    std::size_t payload_bytes_before = 0;
    std::size_t payload_bytes_after = 0;
    std::vector<std::string> warnings;
};

/// Converts every f32 tensor in `in` to f16 and writes the result to `out`.
/// Error statistics compare each source value against its widened
/// quantization. Tensors already stored as f16 pass through with a warning.
QuantizeReport quantize_file(const std::filesystem::path& in,
                             const std::filesystem::path& out);

}  // namespace namecard
