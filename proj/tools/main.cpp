// Command-line front end: augment, generate, evaluate, nms, quantize,
// visualize. Batch inputs are index files with one image path per line;
// formats are the annotation text files and CKTF tensor containers handled
// by the library.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "namecard/dataset.hpp"
#include "namecard/fakegen.hpp"
#include "namecard/image_io.hpp"
#include "namecard/imaging.hpp"
#include "namecard/metrics.hpp"
#include "namecard/postprocess.hpp"
#include "namecard/weights.hpp"

namespace fs = std::filesystem;
using namespace namecard;

namespace {

struct RunConfig {
    double confidence_threshold = 0.8;
    double correctness_iou = 0.8;
    double nms_iou = 0.3;
    double pos_iou = 0.8;
    double neg_iou = 0.3;
    double lambda = 10.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
};

void echo_config(const RunConfig& cfg, std::FILE* to) {
    std::fprintf(to, "config: confidence_threshold = %g\n", cfg.confidence_threshold);
    std::fprintf(to, "config: correctness_iou = %g\n", cfg.correctness_iou);
    std::fprintf(to, "config: nms_iou = %g\n", cfg.nms_iou);
    std::fprintf(to, "config: pos_iou = %g\n", cfg.pos_iou);
    std::fprintf(to, "config: neg_iou = %g\n", cfg.neg_iou);
    std::fprintf(to, "config: lambda = %g\n", cfg.lambda);
    std::fprintf(to, "config: seed = %llu\n", static_cast<unsigned long long>(cfg.seed));
    std::fprintf(to, "config: threads = %u\n", cfg.threads);
}

nlohmann::json config_json(const RunConfig& cfg) {
    return {{"confidence_threshold", cfg.confidence_threshold},
            {"correctness_iou", cfg.correctness_iou},
            {"nms_iou", cfg.nms_iou},
            {"pos_iou", cfg.pos_iou},
            {"neg_iou", cfg.neg_iou},
            {"lambda", cfg.lambda},
            {"seed", cfg.seed},
            {"threads", cfg.threads}};
}

void print_errors(const std::vector<std::string>& errors) {
    for (const auto& e : errors) std::fprintf(stderr, "error: %s\n", e.c_str());
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

// ---------------------------------------------------------------- augment

int run_augment(const RunConfig& cfg, const std::string& index_file,
                const AugmentationGrid& grid) {
    if (cfg.out.empty()) {
        std::fprintf(stderr, "error: augment needs --out <dir>\n");
        return 1;
    }
    Dataset ds = load_dataset(index_file);
    print_warnings(ds.warnings);

    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);

    std::vector<std::string> errors = ds.errors;
    std::vector<std::vector<std::string>> written(ds.entries.size());
    std::atomic<std::size_t> variants{0};
    std::mutex error_mutex;

    const unsigned threads = std::max(1u, cfg.threads);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= ds.entries.size()) return;
            const auto& entry = ds.entries[i];
            try {
                const ImageBuffer img = read_image(entry.image_path);
                const std::string stem = entry.image_path.stem().string();
                enumerate_augmentations(
                    img, entry.annotation, grid,
                    [&](const ImageBuffer& out_img, const Annotation& ann,
                        const std::string& variant_id) {
                        const std::string name = stem + "_" + variant_id;
                        write_png(out_dir / (name + ".png"), out_img);
                        Annotation out_ann = ann;
                        out_ann.image_id = name;
                        save_annotation_file(out_dir / (name + ".txt"), out_ann);
                        written[i].push_back(name + ".png");
                        ++variants;
                    });
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                errors.push_back(e.what());
            }
        }
    };
    std::vector<std::future<void>> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.push_back(std::async(std::launch::async, worker));
    }
    worker();
    for (auto& f : pool) f.get();

    // Index order follows the input dataset regardless of thread timing.
    std::ofstream index_out(out_dir / "index.txt", std::ios::binary);
    for (const auto& names : written) {
        for (const auto& n : names) index_out << n << "\n";
    }

    echo_config(cfg, stdout);
    std::printf("inputs=%zu variants_per_input=%zu outputs=%zu errors=%zu\n",
                ds.entries.size(), grid.variant_count(),
                variants.load(), errors.size());
    print_errors(errors);
    return errors.empty() ? 0 : 1;
}

// --------------------------------------------------------------- generate

int run_generate(const RunConfig& cfg, const FakeCardSpec& spec, std::size_t count) {
    if (cfg.out.empty()) {
        std::fprintf(stderr, "error: generate needs --out <dir>\n");
        return 1;
    }
    try {
        const BatchSummary summary = generate_batch(spec, count, cfg.out);
        echo_config(cfg, stdout);
        std::printf("cards=%zu english_boxes=%zu number_boxes=%zu manifest=%s\n",
                    summary.cards.size(),
                    summary.class_box_counts[static_cast<std::size_t>(ClassId::English)],
                    summary.class_box_counts[static_cast<std::size_t>(ClassId::Number)],
                    summary.manifest_path.string().c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

// --------------------------------------------------------------- evaluate

int run_evaluate(const RunConfig& cfg, const std::string& pred_index,
                 const std::string& gt_index) {
    AnnotationSet preds = load_annotation_index(pred_index);
    AnnotationSet gts = load_annotation_index(gt_index);
    print_warnings(preds.warnings);
    print_warnings(gts.warnings);
    std::vector<std::string> errors = preds.errors;
    errors.insert(errors.end(), gts.errors.begin(), gts.errors.end());

    EvalConfig eval_cfg;
    eval_cfg.iou_threshold = cfg.correctness_iou;
    const ScoreReport report =
        evaluate_annotations(preds.annotations, gts.annotations, eval_cfg);
    print_warnings(report.warnings);

    echo_config(cfg, stdout);
    std::fputs(format_score_table(report).c_str(), stdout);

    if (!cfg.out.empty()) {
        fs::path out_path(cfg.out);
        if (fs::is_directory(out_path) || out_path.extension().empty()) {
            fs::create_directories(out_path);
            out_path /= "report.json";
        }
        nlohmann::json j = nlohmann::json::parse(score_report_json(report));
        j["config"] = config_json(cfg);
        std::ofstream out(out_path, std::ios::binary);
        out << j.dump(2) << "\n";
        if (!out) errors.push_back("cannot write report: " + out_path.string());
    }

    const bool all_unpaired = report.n_images == 0 &&
                              !(preds.annotations.empty() && gts.annotations.empty());
    if (all_unpaired) {
        std::fprintf(stderr, "error: no image id pairs between predictions and ground truth\n");
    }
    print_errors(errors);
    return (errors.empty() && !all_unpaired) ? 0 : 1;
}

// -------------------------------------------------------------------- nms

int run_nms(const RunConfig& cfg, const std::string& pred_file, bool class_aware) {
    try {
        std::vector<std::string> warnings;
        const Annotation ann = load_annotation_file(pred_file, &warnings);
        print_warnings(warnings);

        const std::vector<Detection> dets = detections_from_annotation(ann);
        const std::vector<Detection> kept =
            nms(filter_by_confidence(dets, cfg.confidence_threshold), cfg.nms_iou,
                class_aware);

        Annotation out_ann;
        out_ann.image_id = ann.image_id;
        out_ann.image_width = ann.image_width;
        out_ann.image_height = ann.image_height;
        out_ann.is_prediction = true;
        for (const auto& d : kept) {
            out_ann.boxes.push_back({d.box, d.class_id, d.confidence});
        }

        echo_config(cfg, stdout);
        std::printf("input_boxes=%zu kept_boxes=%zu\n", ann.boxes.size(),
                    out_ann.boxes.size());
        if (cfg.out.empty()) {
            std::fputs(serialize_annotation(out_ann).c_str(), stdout);
        } else {
            save_annotation_file(cfg.out, out_ann);
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

// --------------------------------------------------------------- quantize

int run_quantize(const std::string& in, const std::string& out) {
    try {
        const QuantizeReport report = quantize_file(in, out);
        print_warnings(report.warnings);
        for (const auto& t : report.tensors) {
            std::printf("tensor %s: %zu -> %zu bytes, max_abs_err=%.3g, "
                        "max_rel_err=%.3g, saturated=%zu%s\n",
                        t.name.c_str(), t.bytes_before, t.bytes_after,
                        t.max_abs_error, t.max_rel_error, t.saturated,
                        t.skipped ? " (already f16, copied)" : "");
        }
        std::printf("payload_bytes: %zu -> %zu\n", report.payload_bytes_before,
                    report.payload_bytes_after);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

// -------------------------------------------------------------- visualize

void draw_box_outline(ImageBuffer& img, const Box& box,
                      const std::array<std::uint8_t, 3>& color) {
    const int x0 = std::clamp(static_cast<int>(std::lround(box.x)), 0, img.width - 1);
    const int y0 = std::clamp(static_cast<int>(std::lround(box.y)), 0, img.height - 1);
    const int x1 = std::clamp(static_cast<int>(std::lround(box.right())) - 1, 0, img.width - 1);
    const int y1 = std::clamp(static_cast<int>(std::lround(box.bottom())) - 1, 0, img.height - 1);

    auto paint = [&](int row, int col) {
        img.at(row, col, 0) = color[0];
        img.at(row, col, 1) = color[1];
        img.at(row, col, 2) = color[2];
    };
    // 2-pixel stroke just inside the box edge.
    for (int inset = 0; inset < 2; ++inset) {
        const int top = std::min(y0 + inset, y1);
        const int bottom = std::max(y1 - inset, y0);
        const int left = std::min(x0 + inset, x1);
        const int right = std::max(x1 - inset, x0);
        for (int col = x0; col <= x1; ++col) {
            paint(top, col);
            paint(bottom, col);
        }
        for (int row = y0; row <= y1; ++row) {
            paint(row, left);
            paint(row, right);
        }
    }
}

std::array<std::uint8_t, 3> class_color(ClassId id) {
    switch (id) {
        case ClassId::Chinese: return {255, 0, 0};
        case ClassId::English: return {0, 0, 255};
        case ClassId::Number: return {0, 0, 0};
    }
    return {0, 255, 0};
}

int run_visualize(const RunConfig& cfg, const std::string& image_file,
                  const std::string& annotation_file) {
    try {
        ImageBuffer img = read_image(image_file);
        std::vector<std::string> warnings;
        const Annotation ann = load_annotation_file(annotation_file, &warnings);
        print_warnings(warnings);

        for (const auto& b : ann.boxes) {
            draw_box_outline(img, b.box, class_color(b.class_id));
        }
        const fs::path out_path = cfg.out.empty()
                                      ? fs::path(image_file).replace_extension(".boxes.png")
                                      : fs::path(cfg.out);
        write_png(out_path, img);
        std::printf("wrote %s (%zu boxes)\n", out_path.string().c_str(),
                    ann.boxes.size());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Namecard character-detection toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    app.set_config("--config", "", "Flat key = value configuration file");
    app.add_option("--confidence-threshold", cfg.confidence_threshold,
                   "Keep detections with confidence strictly above this")
        ->capture_default_str();
    app.add_option("--correctness-iou", cfg.correctness_iou,
                   "Overlap a prediction needs to count as correct")
        ->capture_default_str();
    app.add_option("--nms-iou", cfg.nms_iou, "Suppression overlap threshold")
        ->capture_default_str();
    app.add_option("--pos-iou", cfg.pos_iou, "Positive-anchor overlap threshold")
        ->capture_default_str();
    app.add_option("--neg-iou", cfg.neg_iou, "Negative-anchor overlap threshold")
        ->capture_default_str();
    app.add_option("--lambda", cfg.lambda, "Regression loss weight")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Base seed for generated data")
        ->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads for per-file work")
        ->capture_default_str();
    app.add_option("--out", cfg.out, "Output file or directory");

    // augment
    auto* augment = app.add_subcommand("augment", "Write the photometric variant grid");
    std::string index_file;
    AugmentationGrid grid;
    augment->add_option("index", index_file, "Index file, one image path per line")
        ->required();
    augment->add_option("--brightness", grid.brightness_factors, "Brightness factors");
    augment->add_option("--color", grid.color_factors, "Color factors");
    augment->add_option("--contrast", grid.contrast_factors, "Contrast factors");
    augment->add_option("--sharpness", grid.sharpness_factors, "Sharpness factors");

    // generate
    auto* generate = app.add_subcommand("generate", "Write synthetic namecards");
    FakeCardSpec spec;
    std::size_t count = 0;
    std::vector<std::string> class_names = {"English", "Number"};
    generate->add_option("--count", count, "Number of cards")->required();
    generate->add_option("--width", spec.width)->capture_default_str();
    generate->add_option("--height", spec.height)->capture_default_str();
    generate->add_option("--items", spec.n_items, "Strings per card")
        ->capture_default_str();
    generate->add_option("--scale-min", spec.min_font_scale)->capture_default_str();
    generate->add_option("--scale-max", spec.max_font_scale)->capture_default_str();
    generate->add_option("--classes", class_names, "Subset of English, Number");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
    std::string pred_index, gt_index;
    evaluate->add_option("predictions", pred_index, "Prediction index or annotation list")
        ->required();
    evaluate->add_option("ground_truth", gt_index, "Ground-truth index")->required();

    // nms
    auto* nms_cmd = app.add_subcommand("nms", "Confidence-filter and suppress one prediction file");
    std::string pred_file;
    bool class_blind = false;
    nms_cmd->add_option("predictions", pred_file, "Prediction annotation file")
        ->required();
    nms_cmd->add_flag("--class-blind", class_blind,
                      "Let boxes of different classes suppress each other");

    // quantize
    auto* quantize = app.add_subcommand("quantize", "Convert a CKTF tensor file to f16");
    std::string tensor_in, tensor_out;
    quantize->add_option("input", tensor_in, "Source tensor file")->required();
    quantize->add_option("output", tensor_out, "Destination tensor file")->required();

    // visualize
    auto* visualize = app.add_subcommand("visualize", "Draw class-colored boxes onto an image");
    std::string image_file, annotation_file;
    visualize->add_option("image", image_file, "PNG or JPEG image")->required();
    visualize->add_option("annotation", annotation_file, "Annotation file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*augment) return run_augment(cfg, index_file, grid);
        if (*generate) {
            spec.seed = cfg.seed;
            spec.classes.clear();
            for (const auto& name : class_names) {
                auto id = class_from_name(name);
                if (!id) {
                    std::fprintf(stderr, "error: unknown class '%s'\n", name.c_str());
                    return 1;
                }
                spec.classes.push_back(*id);
            }
            return run_generate(cfg, spec, count);
        }
        if (*evaluate) return run_evaluate(cfg, pred_index, gt_index);
        if (*nms_cmd) return run_nms(cfg, pred_file, !class_blind);
        if (*quantize) return run_quantize(tensor_in, tensor_out);
        if (*visualize) return run_visualize(cfg, image_file, annotation_file);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
