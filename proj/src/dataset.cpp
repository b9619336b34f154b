#include "namecard/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace namecard {

const char* class_name(ClassId id) {
    switch (id) {
        case ClassId::Chinese: return "Chinese";
        case ClassId::English: return "English";
        case ClassId::Number: return "Number";
    }
    return "?";
}

std::optional<ClassId> class_from_name(std::string_view name) {
    if (name == "Chinese") return ClassId::Chinese;
    if (name == "English") return ClassId::English;
    if (name == "Number") return ClassId::Number;
    return std::nullopt;
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

double parse_double(std::string_view tok, std::size_t line_no) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw ParseError("expected a number, got '" + std::string(tok) + "'", line_no);
    }
    return v;
}

int parse_dim(std::string_view tok, std::size_t line_no) {
    int v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || v <= 0) {
        throw ParseError("expected a positive image dimension, got '" +
                             std::string(tok) + "'",
                         line_no);
    }
    return v;
}

// Clamp into [0,w]x[0,h]. Returns false when nothing with area remains.
bool clamp_box(Box& b, double w, double h) {
    const double x0 = std::clamp(b.x, 0.0, w);
    const double y0 = std::clamp(b.y, 0.0, h);
    const double x1 = std::clamp(b.right(), 0.0, w);
    const double y1 = std::clamp(b.bottom(), 0.0, h);
    b = Box{x0, y0, x1 - x0, y1 - y0};
    return b.w > 0.0 && b.h > 0.0;
}

}  // namespace

Annotation parse_annotation(std::string_view text, std::vector<std::string>* warnings) {
    Annotation ann;
    bool have_header = false;
    bool have_boxes = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto toks = split_ws(line);
        if (toks.empty()) continue;

        if (!have_header) {
            if (toks.size() != 5 || toks[0] != "#" || toks[1] != "image") {
                throw ParseError("expected header '# image <id> <width> <height>'",
                                 line_no);
            }
            ann.image_id = std::string(toks[2]);
            ann.image_width = parse_dim(toks[3], line_no);
            ann.image_height = parse_dim(toks[4], line_no);
            have_header = true;
            continue;
        }
        if (toks[0] == "#") continue;  // comment

        if (toks.size() < 5 || toks.size() > 6) {
            throw ParseError("expected '<Class> <x> <y> <w> <h> [<confidence>]'",
                             line_no);
        }
        auto cls = class_from_name(toks[0]);
        if (!cls) {
            throw ParseError("unknown class name '" + std::string(toks[0]) + "'",
                             line_no);
        }

        LabeledBox lb;
        lb.class_id = *cls;
        lb.box = Box{parse_double(toks[1], line_no), parse_double(toks[2], line_no),
                     parse_double(toks[3], line_no), parse_double(toks[4], line_no)};
        const bool has_conf = toks.size() == 6;
        if (has_conf) lb.confidence = parse_double(toks[5], line_no);

        if (!have_boxes) {
            ann.is_prediction = has_conf;
            have_boxes = true;
        } else if (has_conf != ann.is_prediction) {
            throw ParseError("mixed confidence columns within one file", line_no);
        }

        Box original = lb.box;
        if (!is_valid_box(lb.box)) {
            throw ParseError("box must have positive width and height", line_no);
        }
        if (!clamp_box(lb.box, ann.image_width, ann.image_height)) {
            if (warnings) {
                warnings->push_back("dropped box fully outside image '" + ann.image_id +
                                    "' (line " + std::to_string(line_no) + ")");
            }
            continue;
        }
        if (lb.box.x != original.x || lb.box.y != original.y ||
            lb.box.w != original.w || lb.box.h != original.h) {
            if (warnings) {
                warnings->push_back("clamped out-of-bounds box in '" + ann.image_id +
                                    "' (line " + std::to_string(line_no) + ")");
            }
        }
        ann.boxes.push_back(std::move(lb));
    }

    if (!have_header) throw ParseError("missing header line", line_no);
    return ann;
}

std::string serialize_annotation(const Annotation& a) {
    std::vector<const LabeledBox*> order;
    order.reserve(a.boxes.size());
    for (const auto& b : a.boxes) order.push_back(&b);
    std::sort(order.begin(), order.end(), [](const LabeledBox* l, const LabeledBox* r) {
        return std::tie(l->box.y, l->box.x, l->class_id) <
               std::tie(r->box.y, r->box.x, r->class_id);
    });

    std::string out = "# image " + a.image_id + " " + std::to_string(a.image_width) +
                      " " + std::to_string(a.image_height) + "\n";
    for (const auto* b : order) {
        out += class_name(b->class_id);
        out += ' ';
        out += format_number(b->box.x);
        out += ' ';
        out += format_number(b->box.y);
        out += ' ';
        out += format_number(b->box.w);
        out += ' ';
        out += format_number(b->box.h);
        if (b->confidence) {
            out += ' ';
            out += format_number(*b->confidence);
        }
        out += '\n';
    }
    return out;
}

Annotation load_annotation_file(const std::filesystem::path& path,
                                std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open annotation file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_annotation(buf.str(), warnings);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line_number);
    }
}

void save_annotation_file(const std::filesystem::path& path, const Annotation& a) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write annotation file: " + path.string());
    out << serialize_annotation(a);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::filesystem::path annotation_path_for(const std::filesystem::path& image_path) {
    std::filesystem::path p = image_path;
    p.replace_extension(".txt");
    return p;
}

namespace {

std::vector<std::string> read_index_lines(const std::filesystem::path& index_file) {
    std::ifstream in(index_file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index file: " + index_file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // trim
        const auto b = line.find_first_not_of(" \t");
        const auto e = line.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        lines.push_back(line.substr(b, e - b + 1));
    }
    return lines;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& line) {
    std::filesystem::path p(line);
    return p.is_absolute() ? p : base / p;
}

bool looks_like_image(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& index_file) {
    Dataset ds;
    const auto base = index_file.parent_path();
    for (const auto& line : read_index_lines(index_file)) {
        const auto image_path = resolve(base, line);
        const auto ann_path = annotation_path_for(image_path);
        try {
            DatasetEntry entry;
            entry.image_path = image_path;
            entry.annotation = load_annotation_file(ann_path, &ds.warnings);
            ds.entries.push_back(std::move(entry));
        } catch (const std::exception& e) {
            ds.errors.push_back(e.what());
        }
    }
    return ds;
}

AnnotationSet load_annotation_index(const std::filesystem::path& index_file) {
    AnnotationSet set;
    const auto base = index_file.parent_path();
    for (const auto& line : read_index_lines(index_file)) {
        auto path = resolve(base, line);
        if (looks_like_image(path)) path = annotation_path_for(path);
        try {
            set.annotations.push_back(load_annotation_file(path, &set.warnings));
        } catch (const std::exception& e) {
            set.errors.push_back(e.what());
        }
    }
    return set;
}

}  // namespace namecard
