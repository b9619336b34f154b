#include "namecard/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

namespace namecard {

namespace {

constexpr std::uint32_t kF32ExponentMask = 0x7F800000u;
constexpr std::uint16_t kF16MaxFinite = 0x7BFFu;  // 65504
constexpr std::uint16_t kF16Infinity = 0x7C00u;

}  // namespace

std::uint16_t f32_to_f16(float x) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(x);
    const std::uint16_t sign = static_cast<std::uint16_t>((bits >> 16) & 0x8000u);
    const std::uint32_t exponent = (bits >> 23) & 0xFFu;
    const std::uint32_t mantissa = bits & 0x7FFFFFu;

    if (exponent == 0xFF) {
        if (mantissa == 0) return sign | kF16Infinity;
        // Quiet NaN, sign and top payload bits preserved.
        return sign | kF16Infinity | 0x0200u | static_cast<std::uint16_t>(mantissa >> 13);
    }

    const int unbiased = static_cast<int>(exponent) - 127;
    if (unbiased >= 16) return sign | kF16MaxFinite;  // saturate, stay finite

    if (unbiased >= -14) {
        // Normal range: drop 13 mantissa bits with round to nearest even.
        std::uint32_t half = (static_cast<std::uint32_t>(unbiased + 15) << 10) |
                             (mantissa >> 13);
        const std::uint32_t rest = mantissa & 0x1FFFu;
        if (rest > 0x1000u || (rest == 0x1000u && (half & 1u))) ++half;
        if (half >= kF16Infinity) return sign | kF16MaxFinite;  // rounded past max
        return sign | static_cast<std::uint16_t>(half);
    }

    // Subnormal half (or zero): shift the full significand into place.
    if (unbiased < -25) return sign;  // below half the smallest subnormal
    const std::uint32_t full = mantissa | 0x800000u;
    const int shift = 13 + (-14 - unbiased);
    std::uint32_t half = full >> shift;
    const std::uint32_t rest = full & ((1u << shift) - 1u);
    const std::uint32_t halfway = 1u << (shift - 1);
    if (rest > halfway || (rest == halfway && (half & 1u))) ++half;
    return sign | static_cast<std::uint16_t>(half);  // may carry into a normal
}

float f16_to_f32(std::uint16_t h) {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t exponent = (h >> 10) & 0x1Fu;
    std::uint32_t mantissa = h & 0x3FFu;

    if (exponent == 0x1F) {
        return std::bit_cast<float>(sign | kF32ExponentMask | (mantissa << 13));
    }
    if (exponent == 0) {
        if (mantissa == 0) return std::bit_cast<float>(sign);
        // Normalize the subnormal significand.
        int e = -15;
        while (!(mantissa & 0x400u)) {
            mantissa <<= 1;
            --e;
        }
        mantissa &= 0x3FFu;
        return std::bit_cast<float>(sign | (static_cast<std::uint32_t>(e + 127) << 23) |
                                    (mantissa << 13));
    }
    return std::bit_cast<float>(
        sign | ((exponent - 15 + 127) << 23) | (mantissa << 13));
}

std::size_t dtype_size(TensorDtype d) {
    return d == TensorDtype::f32 ? 4 : 2;
}

std::size_t TensorRecord::element_count() const {
    std::size_t n = 1;
    for (auto extent : shape) n *= extent;
    return n;
}

namespace {

constexpr char kMagic[4] = {'C', 'K', 'T', 'F'};

class Reader {
public:
    explicit Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    std::size_t offset() const { return offset_; }

    std::uint8_t u8(const char* what) {
        need(1, what);
        return bytes_[offset_++];
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[offset_ + i];
        offset_ += 4;
        return v;
    }
    std::vector<std::uint8_t> blob(std::size_t n, const char* what) {
        need(n, what);
        std::vector<std::uint8_t> out(bytes_.begin() + static_cast<long>(offset_),
                                      bytes_.begin() + static_cast<long>(offset_ + n));
        offset_ += n;
        return out;
    }
    bool at_end() const { return offset_ == bytes_.size(); }

private:
    void need(std::size_t n, const char* what) {
        if (offset_ + n > bytes_.size()) {
            throw TensorFileError(std::string("truncated while reading ") + what,
                                  offset_);
        }
    }
    std::vector<std::uint8_t> bytes_;
    std::size_t offset_ = 0;
};

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

}  // namespace

TensorFile read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    Reader r(std::move(bytes));
    const auto magic = r.blob(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw TensorFileError("bad magic, expected CKTF", 0);
    }

    TensorFile file;
    file.version = r.u32("version");
    if (file.version != 1) {
        throw TensorFileError("unsupported version " + std::to_string(file.version), 4);
    }

    const std::uint32_t count = r.u32("tensor count");
    std::set<std::string> seen;
    for (std::uint32_t t = 0; t < count; ++t) {
        TensorRecord rec;
        const std::uint32_t name_len = r.u32("name length");
        const auto name_bytes = r.blob(name_len, "tensor name");
        rec.name.assign(name_bytes.begin(), name_bytes.end());
        if (!seen.insert(rec.name).second) {
            throw TensorFileError("duplicate tensor name '" + rec.name + "'",
                                  r.offset());
        }

        const std::uint8_t dtype = r.u8("dtype");
        if (dtype > 1) {
            throw TensorFileError("unknown dtype code " + std::to_string(dtype),
                                  r.offset() - 1);
        }
        rec.dtype = static_cast<TensorDtype>(dtype);

        const std::uint8_t rank = r.u8("rank");
        rec.shape.reserve(rank);
        for (std::uint8_t d = 0; d < rank; ++d) rec.shape.push_back(r.u32("extent"));

        rec.payload = r.blob(rec.element_count() * dtype_size(rec.dtype), "payload");
        file.tensors.push_back(std::move(rec));
    }
    if (!r.at_end()) {
        throw TensorFileError("trailing bytes after last tensor", r.offset());
    }
    return file;
}

void write_tensor_file(const std::filesystem::path& path, const TensorFile& file) {
    std::set<std::string> seen;
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    append_u32(out, file.version);
    append_u32(out, static_cast<std::uint32_t>(file.tensors.size()));

    for (const auto& rec : file.tensors) {
        if (!seen.insert(rec.name).second) {
            throw std::invalid_argument("duplicate tensor name '" + rec.name + "'");
        }
        if (rec.payload.size() != rec.element_count() * dtype_size(rec.dtype)) {
            throw std::invalid_argument("payload size mismatch for '" + rec.name + "'");
        }
        if (rec.shape.size() > 255) {
            throw std::invalid_argument("rank above 255 for '" + rec.name + "'");
        }
        append_u32(out, static_cast<std::uint32_t>(rec.name.size()));
        out.insert(out.end(), rec.name.begin(), rec.name.end());
        out.push_back(static_cast<std::uint8_t>(rec.dtype));
        out.push_back(static_cast<std::uint8_t>(rec.shape.size()));
        for (auto extent : rec.shape) append_u32(out, extent);
        out.insert(out.end(), rec.payload.begin(), rec.payload.end());
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write tensor file: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

QuantizeReport quantize_file(const std::filesystem::path& in,
                             const std::filesystem::path& out) {
    const TensorFile src = read_tensor_file(in);
    TensorFile dst;
    dst.version = src.version;
    QuantizeReport report;

    for (const auto& rec : src.tensors) {
        TensorConversion conv;
        conv.name = rec.name;
        conv.bytes_before = rec.payload.size();
        report.payload_bytes_before += rec.payload.size();

        if (rec.dtype == TensorDtype::f16) {
            conv.skipped = true;
            conv.bytes_after = rec.payload.size();
            report.payload_bytes_after += rec.payload.size();
            report.warnings.push_back("tensor '" + rec.name + "' is already f16");
            report.tensors.push_back(std::move(conv));
            dst.tensors.push_back(rec);
            continue;
        }

        TensorRecord half;
        half.name = rec.name;
        half.dtype = TensorDtype::f16;
        half.shape = rec.shape;
        half.payload.reserve(rec.payload.size() / 2);

        for (std::size_t i = 0; i < rec.payload.size(); i += 4) {
            float v;
            std::memcpy(&v, rec.payload.data() + i, 4);
            const std::uint16_t h = f32_to_f16(v);
            half.payload.push_back(static_cast<std::uint8_t>(h & 0xFF));
            half.payload.push_back(static_cast<std::uint8_t>(h >> 8));

            const float back = f16_to_f32(h);
            if (std::isfinite(v)) {
                const double abs_err = std::abs(static_cast<double>(back) - v);
                conv.max_abs_error = std::max(conv.max_abs_error, abs_err);
                if (v != 0.0f) {
                    conv.max_rel_error =
                        std::max(conv.max_rel_error, abs_err / std::abs(static_cast<double>(v)));
                }
                if (std::abs(v) > 65504.0f) ++conv.saturated;
            }
        }

        conv.bytes_after = half.payload.size();
        report.payload_bytes_after += half.payload.size();
        report.tensors.push_back(std::move(conv));
        dst.tensors.push_back(std::move(half));
    }

    write_tensor_file(out, dst);
    return report;
}

}  // namespace namecard
