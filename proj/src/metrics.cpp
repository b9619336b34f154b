#include "namecard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace namecard {

MatchResult match_detections(std::span<const Detection> preds,
                             std::span<const LabeledBox> gts,
                             double iou_threshold) {
    MatchResult result;
    result.preds.resize(preds.size());
    result.gt_covered.assign(gts.size(), 0);

    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].confidence > preds[b].confidence;
    });

    for (std::size_t idx : order) {
        const Detection& p = preds[idx];
        double best = -1.0;
        std::size_t best_gt = 0;
        bool found = false;
        for (std::size_t j = 0; j < gts.size(); ++j) {
            if (result.gt_covered[j]) continue;
            if (gts[j].class_id != p.class_id) continue;
            const double v = iou(p.box, gts[j].box);
            if (v > best) {
                best = v;
                best_gt = j;
                found = true;
            }
        }
        if (found && best > iou_threshold) {
            result.preds[idx].matched = true;
            result.preds[idx].gt_index = best_gt;
            result.preds[idx].iou_value = best;
            result.gt_covered[best_gt] = 1;
        }
    }
    return result;
}

AverageIou average_iou(const MatchResult& m) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& p : m.preds) {
        if (!p.matched) continue;
        sum += *p.iou_value;
        ++count;
    }
    if (count == 0) return {0.0, false};
    return {sum / static_cast<double>(count), true};
}

namespace {

// One ranked prediction outcome: confidence plus whether it claimed a gt.
struct RankedFlag {
    double confidence;
    bool correct;
};

double ap_from_flags(std::vector<RankedFlag> flags, std::size_t n_gt,
                     ApInterpolation interp) {
    // Ranking is by confidence only; stable sort keeps insertion order on
    // ties so the result depends on the ordering, never the raw values.
    std::stable_sort(flags.begin(), flags.end(),
                     [](const RankedFlag& a, const RankedFlag& b) {
                         return a.confidence > b.confidence;
                     });

    std::vector<double> precision(flags.size());
    std::vector<double> recall(flags.size());
    std::size_t tp = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i].correct) ++tp;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
    }

    // Precision envelope: max precision at any recall >= r.
    std::vector<double> envelope(precision);
    for (std::size_t i = envelope.size(); i-- > 1;) {
        envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
    }

    if (interp == ApInterpolation::eleven_point) {
        double sum = 0.0;
        for (int step = 0; step <= 10; ++step) {
            const double r = step / 10.0;
            double best = 0.0;
            for (std::size_t i = 0; i < flags.size(); ++i) {
                if (recall[i] >= r) {
                    best = envelope[i];
                    break;
                }
            }
            sum += best;
        }
        return sum / 11.0;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (recall[i] > prev_recall) {
            ap += (recall[i] - prev_recall) * envelope[i];
            prev_recall = recall[i];
        }
    }
    return ap;
}

std::size_t count_class(std::span<const LabeledBox> gts, ClassId id) {
    return static_cast<std::size_t>(
        std::count_if(gts.begin(), gts.end(),
                      [&](const LabeledBox& g) { return g.class_id == id; }));
}

}  // namespace

std::optional<double> average_precision(std::span<const Detection> preds,
                                        std::span<const LabeledBox> gts,
                                        ClassId class_id, double iou_threshold,
                                        ApInterpolation interp) {
    const std::size_t n_gt = count_class(gts, class_id);
    if (n_gt == 0) return std::nullopt;

    const MatchResult m = match_detections(preds, gts, iou_threshold);
    std::vector<RankedFlag> flags;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].class_id != class_id) continue;
        flags.push_back({preds[i].confidence, m.preds[i].matched});
    }
    return ap_from_flags(std::move(flags), n_gt, interp);
}

double f1_score(std::size_t n_accurate, std::size_t n_report, std::size_t n_gt,
                F1Denominator form) {
    if (n_accurate > n_report || n_accurate > n_gt) {
        throw std::invalid_argument(
            "accurate count cannot exceed reported or ground-truth counts");
    }
    const double denom = form == F1Denominator::sum
                             ? static_cast<double>(n_report + n_gt)
                             : static_cast<double>(n_report) * static_cast<double>(n_gt);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(n_accurate) / denom;
}

std::vector<Detection> detections_from_annotation(const Annotation& a) {
    std::vector<Detection> out;
    out.reserve(a.boxes.size());
    for (const auto& b : a.boxes) {
        out.push_back({b.box, b.class_id, b.confidence.value_or(1.0)});
    }
    return out;
}

ScoreReport evaluate_dataset(std::span<const ImageSample> samples,
                             const EvalConfig& cfg) {
    ScoreReport report;
    report.n_images = samples.size();

    // Per-image matching; everything else aggregates the outcomes.
    std::vector<MatchResult> matches;
    matches.reserve(samples.size());
    for (const auto& s : samples) {
        matches.push_back(match_detections(s.preds, s.gts, cfg.iou_threshold));
    }

    double total_iou_sum = 0.0;
    std::size_t total_matched = 0;

    std::array<std::vector<RankedFlag>, kNumClasses> ranked;  // dataset-wide
    std::array<double, kNumClasses> iou_sum{};
    std::array<std::vector<double>, kNumClasses> per_image_aps;

    for (std::size_t si = 0; si < samples.size(); ++si) {
        const auto& s = samples[si];
        const auto& m = matches[si];
        for (std::size_t i = 0; i < s.preds.size(); ++i) {
            const auto ci = static_cast<std::size_t>(s.preds[i].class_id);
            auto& cs = report.per_class[ci];
            ++cs.n_report;
            ranked[ci].push_back({s.preds[i].confidence, m.preds[i].matched});
            if (m.preds[i].matched) {
                ++cs.n_accurate;
                iou_sum[ci] += *m.preds[i].iou_value;
                total_iou_sum += *m.preds[i].iou_value;
                ++total_matched;
            }
        }
        for (const auto& g : s.gts) {
            ++report.per_class[static_cast<std::size_t>(g.class_id)].n_gt;
        }
        if (cfg.per_image_ap) {
            for (std::size_t ci = 0; ci < kNumClasses; ++ci) {
                auto ap = average_precision(s.preds, s.gts, static_cast<ClassId>(ci),
                                            cfg.iou_threshold, cfg.ap_interpolation);
                if (ap) per_image_aps[ci].push_back(*ap);
            }
        }
    }

    double map_sum = 0.0;
    std::size_t map_classes = 0;
    std::size_t pooled_accurate = 0, pooled_report = 0, pooled_gt = 0;

    for (std::size_t ci = 0; ci < kNumClasses; ++ci) {
        auto& cs = report.per_class[ci];
        cs.present_in_gt = cs.n_gt > 0;
        cs.has_matches = cs.n_accurate > 0;
        cs.vacuous = cs.n_gt == 0 && cs.n_report == 0;

        if (cs.has_matches) {
            cs.avg_iou = iou_sum[ci] / static_cast<double>(cs.n_accurate);
        }
        cs.f1 = f1_score(cs.n_accurate, cs.n_report, cs.n_gt, cfg.f1_denominator);

        if (cs.present_in_gt) {
            if (cfg.per_image_ap) {
                const auto& aps = per_image_aps[ci];
                cs.ap = aps.empty() ? 0.0
                                    : std::accumulate(aps.begin(), aps.end(), 0.0) /
                                          static_cast<double>(aps.size());
            } else {
                cs.ap = ap_from_flags(ranked[ci], cs.n_gt, cfg.ap_interpolation);
            }
            map_sum += cs.ap;
            ++map_classes;
        }
        if (cs.vacuous) {
            cs.avg_iou = 1.0;
            cs.ap = 1.0;
            cs.f1 = 1.0;
        }

        pooled_accurate += cs.n_accurate;
        pooled_report += cs.n_report;
        pooled_gt += cs.n_gt;
    }

    report.map = map_classes > 0 ? map_sum / static_cast<double>(map_classes) : 0.0;
    report.total_has_matches = total_matched > 0;
    report.total_avg_iou =
        total_matched > 0 ? total_iou_sum / static_cast<double>(total_matched) : 0.0;
    report.total_f1 =
        f1_score(pooled_accurate, pooled_report, pooled_gt, cfg.f1_denominator);
    if (pooled_gt == 0 && pooled_report == 0) {
        report.total_avg_iou = 1.0;
        report.map = 1.0;
        report.total_f1 = 1.0;
    }
    return report;
}

ScoreReport evaluate_annotations(std::span<const Annotation> preds,
                                 std::span<const Annotation> gts,
                                 const EvalConfig& cfg) {
    std::map<std::string, const Annotation*> gt_by_id;
    for (const auto& g : gts) gt_by_id[g.image_id] = &g;

    std::vector<std::string> warnings;
    std::vector<ImageSample> samples;
    std::map<std::string, bool> gt_used;

    for (const auto& p : preds) {
        auto it = gt_by_id.find(p.image_id);
        if (it == gt_by_id.end()) {
            warnings.push_back("prediction image id '" + p.image_id +
                               "' has no ground truth; skipped");
            continue;
        }
        ImageSample s;
        s.image_id = p.image_id;
        s.preds = detections_from_annotation(p);
        s.gts = it->second->boxes;
        samples.push_back(std::move(s));
        gt_used[p.image_id] = true;
    }
    for (const auto& g : gts) {
        if (!gt_used.count(g.image_id)) {
            warnings.push_back("ground-truth image id '" + g.image_id +
                               "' has no prediction file; skipped");
        }
    }

    // Deterministic aggregation order regardless of input file order.
    std::sort(samples.begin(), samples.end(),
              [](const ImageSample& a, const ImageSample& b) {
                  return a.image_id < b.image_id;
              });

    ScoreReport report = evaluate_dataset(samples, cfg);
    report.warnings = std::move(warnings);
    return report;
}

namespace {

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return buf;
}

void append_row(std::string& out, const std::string& label,
                const std::array<std::string, 4>& cells) {
    constexpr int kWidth = 10;
    out += label;
    for (int pad = static_cast<int>(label.size()); pad < kWidth; ++pad) out += ' ';
    for (const auto& c : cells) {
        out += c;
        for (int pad = static_cast<int>(c.size()); pad < kWidth; ++pad) out += ' ';
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
}

}  // namespace

std::string format_score_table(const ScoreReport& r) {
    std::string out;
    append_row(out, "Score", {"Chinese", "English", "Numer", "Total"});
    append_row(out, "IoU",
               {percent(r.per_class[0].avg_iou), percent(r.per_class[1].avg_iou),
                percent(r.per_class[2].avg_iou), percent(r.total_avg_iou)});
    append_row(out, "mAP",
               {percent(r.per_class[0].ap), percent(r.per_class[1].ap),
                percent(r.per_class[2].ap), percent(r.map)});
    append_row(out, "F-1",
               {percent(r.per_class[0].f1), percent(r.per_class[1].f1),
                percent(r.per_class[2].f1), percent(r.total_f1)});
    return out;
}

std::string score_report_json(const ScoreReport& r) {
    nlohmann::json j;
    for (std::size_t ci = 0; ci < kNumClasses; ++ci) {
        const auto& cs = r.per_class[ci];
        j["classes"][class_name(static_cast<ClassId>(ci))] = {
            {"avg_iou", cs.avg_iou},
            {"ap", cs.ap},
            {"f1", cs.f1},
            {"n_report", cs.n_report},
            {"n_gt", cs.n_gt},
            {"n_accurate", cs.n_accurate},
            {"has_matches", cs.has_matches},
            {"present_in_gt", cs.present_in_gt},
            {"vacuous", cs.vacuous},
        };
    }
    j["total"] = {
        {"avg_iou", r.total_avg_iou},
        {"map", r.map},
        {"f1", r.total_f1},
        {"has_matches", r.total_has_matches},
    };
    j["n_images"] = r.n_images;
    j["warnings"] = r.warnings;
    return j.dump(2);
}

}  // namespace namecard
