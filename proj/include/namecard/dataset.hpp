#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "namecard/geometry.hpp"

namespace namecard {

enum class ClassId : int { Chinese = 0, English = 1, Number = 2 };

inline constexpr std::size_t kNumClasses = 3;

const char* class_name(ClassId id);
std::optional<ClassId> class_from_name(std::string_view name);

struct LabeledBox {
    Box box;
    ClassId class_id = ClassId::Chinese;
    /// Present only in prediction files.
    std::optional<double> confidence;
};

/// One image's boxes. Ground-truth annotations carry no confidences;
/// prediction files carry one per box.
struct Annotation {
    std::string image_id;
    int image_width = 0;
    int image_height = 0;
    std::vector<LabeledBox> boxes;
    bool is_prediction = false;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
          line_number(line) {}
    std::size_t line_number;
};

/// Text format, one annotation per file:
///   # image <id> <width> <height>
///   <ClassName> <x> <y> <w> <h> [<confidence>]
/// Whitespace-separated, UTF-8, LF line endings. Boxes reaching outside the
/// image are clamped into bounds; boxes left without area are dropped. Both
/// cases append to `warnings` when given.
Annotation parse_annotation(std::string_view text,
                            std::vector<std::string>* warnings = nullptr);

/// Canonical form: header line, then boxes sorted by (y, x, class), numbers
/// printed with the fewest digits that round-trip.
std::string serialize_annotation(const Annotation& a);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_number(double v);

Annotation load_annotation_file(const std::filesystem::path& path,
                                std::vector<std::string>* warnings = nullptr);
void save_annotation_file(const std::filesystem::path& path, const Annotation& a);

/// Sibling annotation file: same path with the extension replaced by .txt.
std::filesystem::path annotation_path_for(const std::filesystem::path& image_path);

struct DatasetEntry {
    std::filesystem::path image_path;
    Annotation annotation;
};

struct Dataset {
    std::vector<DatasetEntry> entries;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

/// Index file: one image path per line (relative paths resolve against the
/// index file's directory). Each image needs a sibling .txt annotation; a
/// missing or malformed one is recorded in `errors` and the entry skipped.
Dataset load_dataset(const std::filesystem::path& index_file);

struct AnnotationSet {
    std::vector<Annotation> annotations;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

/// Index of annotations for evaluation. Lines naming an image file (.png,
/// .jpg, .jpeg) are redirected to the sibling .txt; all other lines are read
/// as annotation files directly.
AnnotationSet load_annotation_index(const std::filesystem::path& index_file);

}  // namespace namecard
