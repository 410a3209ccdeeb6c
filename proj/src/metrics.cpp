#include <xraysegkit/metrics.hpp>
#include <xraysegkit/parallel.hpp>

#include <algorithm>
#include <numeric>

namespace xraysegkit {

std::array<double, kNumIouThresholds> iou_thresholds()
{
    std::array<double, kNumIouThresholds> t{};
    for (int i = 0; i < kNumIouThresholds; ++i) {
        t[i] = (50 + 5 * i) / 100.0;
    }
    return t;
}

double curve_threshold(int k) { return k / static_cast<double>(kCurvePoints - 1); }

double iou_box(const BoundingBox& a, const BoundingBox& b)
{
    const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    const double inter = iw > 0.0 && ih > 0.0 ? iw * ih : 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double iou_mask(const BinaryMask& a, const BinaryMask& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("iou_mask: dimension mismatch");
    }
    const auto inter = (a && b).count();
    const auto uni = (a || b).count();
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t MatchResult::true_positives() const
{
    return static_cast<std::size_t>(
        std::count_if(predictions.begin(), predictions.end(), [](const auto& p) { return p.matched; }));
}

namespace {

std::vector<std::size_t> confidence_order(const std::vector<double>& confidence)
{
    std::vector<std::size_t> order(confidence.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return confidence[a] > confidence[b]; });
    return order;
}

}  // namespace

std::vector<int> greedy_match(const std::vector<double>& confidence, const IouMatrix& iou, double threshold)
{
    std::vector<int> assigned(confidence.size(), -1);
    std::vector<bool> taken(static_cast<std::size_t>(iou.cols()), false);
    for (const std::size_t p : confidence_order(confidence)) {
        int best = -1;
        double best_iou = threshold;
        for (Eigen::Index g = 0; g < iou.cols(); ++g) {
            const double v = iou(static_cast<Eigen::Index>(p), g);
            if (taken[g] || v < threshold) {
                continue;
            }
            if (best < 0 || v > best_iou) {
                best = static_cast<int>(g);
                best_iou = v;
            }
        }
        if (best >= 0) {
            taken[best] = true;
            assigned[p] = best;
        }
    }
    return assigned;
}

IouMatrix iou_matrix(const std::vector<Detection>& preds, const std::vector<PolygonAnnotation>& gts,
                     MatchKind kind, int width, int height)
{
    IouMatrix m = IouMatrix::Zero(static_cast<Eigen::Index>(preds.size()), static_cast<Eigen::Index>(gts.size()));
    if (kind == MatchKind::Box) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const BoundingBox gb = polygon_bbox(gts[g].vertices);
            for (std::size_t p = 0; p < preds.size(); ++p) {
                m(p, g) = iou_box(preds[p].box, gb);
            }
        }
        return m;
    }
    std::vector<MaskPatch> gt_patches;
    gt_patches.reserve(gts.size());
    for (const auto& g : gts) {
        gt_patches.push_back(rasterize_patch_normalized(g.vertices, width, height));
    }
    for (std::size_t p = 0; p < preds.size(); ++p) {
        if (!preds[p].mask_polygon) {
            continue;
        }
        const MaskPatch pp = rasterize_patch_normalized(*preds[p].mask_polygon, width, height);
        for (std::size_t g = 0; g < gts.size(); ++g) {
            m(p, g) = iou_patch(pp, gt_patches[g]);
        }
    }
    return m;
}

MatchResult match_detections(const std::vector<Detection>& preds, const std::vector<PolygonAnnotation>& gts,
                             double iou_threshold, MatchKind kind, int width, int height)
{
    int cls = -1;
    const auto check = [&](int c) {
        if (cls >= 0 && c != cls) {
            throw InvalidArgument("match_detections: mixed classes");
        }
        cls = c;
    };
    for (const auto& p : preds) {
        check(p.class_id);
    }
    for (const auto& g : gts) {
        check(g.class_id);
    }
    const IouMatrix iou = iou_matrix(preds, gts, kind, width, height);
    std::vector<double> conf;
    for (const auto& p : preds) {
        conf.push_back(p.confidence);
    }
    const auto assigned = greedy_match(conf, iou, iou_threshold);
    MatchResult r;
    for (const auto& g : gts) {
        r.ground_truths.push_back({g.class_id, false});
    }
    for (std::size_t p = 0; p < preds.size(); ++p) {
        PredictionRecord rec{preds[p].class_id, preds[p].confidence, false, 0.0, assigned[p]};
        if (assigned[p] >= 0) {
            rec.matched = true;
            rec.iou = iou(static_cast<Eigen::Index>(p), assigned[p]);
            r.ground_truths[assigned[p]].matched = true;
        }
        r.predictions.push_back(rec);
    }
    return r;
}

double average_precision(std::vector<ScoredMatch> matches, std::size_t total_gt)
{
    if (total_gt == 0) {
        return 0.0;
    }
    std::stable_sort(matches.begin(), matches.end(),
                     [](const ScoredMatch& a, const ScoredMatch& b) { return a.confidence > b.confidence; });
    const std::size_t n = matches.size();
    std::vector<double> recall(n), precision(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        tp += matches[i].true_positive ? 1 : 0;
        recall[i] = static_cast<double>(tp) / static_cast<double>(total_gt);
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    for (std::size_t i = n; i-- > 1;) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double sum = 0.0;
    std::size_t idx = 0;
    for (int k = 0; k <= 100; ++k) {
        const double r = k / 100.0;
        while (idx < n && recall[idx] < r) {
            ++idx;
        }
        if (idx == n) {
            break;
        }
        sum += precision[idx];
    }
    return sum / 101.0;
}

namespace {

struct ImageClassResult {
    std::vector<ScoredPrediction> box;
    std::vector<ScoredPrediction> mask;
};

std::vector<ScoredPrediction> score(const std::vector<double>& conf, const IouMatrix& iou)
{
    std::vector<ScoredPrediction> out(conf.size());
    for (std::size_t p = 0; p < conf.size(); ++p) {
        out[p].confidence = conf[p];
    }
    const auto thresholds = iou_thresholds();
    for (int t = 0; t < kNumIouThresholds; ++t) {
        const auto assigned = greedy_match(conf, iou, thresholds[t]);
        for (std::size_t p = 0; p < conf.size(); ++p) {
            out[p].tp[t] = assigned[p] >= 0;
        }
    }
    return out;
}

}  // namespace

Evaluation evaluate(const std::vector<EvalImage>& images, int num_classes, unsigned jobs)
{
    Evaluation eval;
    eval.num_classes = num_classes;
    eval.num_images = images.size();
    eval.box.resize(num_classes);
    eval.mask.resize(num_classes);

    std::vector<std::vector<ImageClassResult>> per_image(images.size());
    parallel_for(images.size(), jobs, [&](std::size_t i) {
        const EvalImage& img = images[i];
        auto& results = per_image[i];
        results.resize(num_classes);
        for (int c = 0; c < num_classes; ++c) {
            std::vector<Detection> preds;
            std::vector<PolygonAnnotation> gts;
            std::vector<double> conf;
            for (const auto& d : img.predictions) {
                if (d.class_id == c) {
                    preds.push_back(d);
                    conf.push_back(d.confidence);
                }
            }
            for (const auto& g : img.ground_truth) {
                if (g.class_id == c) {
                    gts.push_back(g);
                }
            }
            if (preds.empty()) {
                continue;
            }
            results[c].box = score(conf, iou_matrix(preds, gts, MatchKind::Box, img.width, img.height));
            results[c].mask = score(conf, iou_matrix(preds, gts, MatchKind::Mask, img.width, img.height));
        }
    });

    for (std::size_t i = 0; i < images.size(); ++i) {
        std::vector<std::size_t> gt_per_class(num_classes, 0);
        for (const auto& g : images[i].ground_truth) {
            if (g.class_id < 0 || g.class_id >= num_classes) {
                throw InvalidArgument("evaluate: ground-truth class out of range");
            }
            ++gt_per_class[g.class_id];
        }
        for (int c = 0; c < num_classes; ++c) {
            for (auto* records : {&eval.box[c], &eval.mask[c]}) {
                records->num_gt += gt_per_class[c];
                records->num_images += gt_per_class[c] > 0 ? 1 : 0;
            }
            auto& r = per_image[i][c];
            eval.box[c].predictions.insert(eval.box[c].predictions.end(), r.box.begin(), r.box.end());
            eval.mask[c].predictions.insert(eval.mask[c].predictions.end(), r.mask.begin(), r.mask.end());
        }
    }
    for (auto* kind : {&eval.box, &eval.mask}) {
        for (auto& records : *kind) {
            std::stable_sort(records.predictions.begin(), records.predictions.end(),
                             [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
        }
    }
    return eval;
}

namespace {

// Precision, recall and F1 of every class at every swept threshold.
struct Sweep {
    std::vector<std::vector<double>> precision, recall, f1;       // [class][k], sweep convention
    std::vector<std::vector<double>> summary_precision;           // [class][k], 0 when nothing retained
    std::vector<double> all_precision, all_recall, all_f1;        // mean over classes with GT
    std::vector<int> counted;                                     // classes with GT
};

double f1_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

Sweep sweep(const std::vector<ClassRecords>& classes)
{
    Sweep s;
    const std::size_t nc = classes.size();
    s.precision.assign(nc, std::vector<double>(kCurvePoints));
    s.recall.assign(nc, std::vector<double>(kCurvePoints));
    s.f1.assign(nc, std::vector<double>(kCurvePoints));
    s.summary_precision.assign(nc, std::vector<double>(kCurvePoints));
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& preds = classes[c].predictions;
        std::vector<std::size_t> cum_tp(preds.size() + 1, 0);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            cum_tp[i + 1] = cum_tp[i] + (preds[i].tp[0] ? 1 : 0);
        }
        for (int k = 0; k < kCurvePoints; ++k) {
            const double t = curve_threshold(k);
            // Predictions are sorted by descending confidence.
            const auto retained = static_cast<std::size_t>(
                std::partition_point(preds.begin(), preds.end(), [&](const auto& p) { return p.confidence >= t; }) -
                preds.begin());
            const double tp = static_cast<double>(cum_tp[retained]);
            const double p = retained > 0 ? tp / static_cast<double>(retained) : 1.0;
            const double r = classes[c].num_gt > 0 ? tp / static_cast<double>(classes[c].num_gt) : 0.0;
            s.precision[c][k] = p;
            s.recall[c][k] = r;
            s.f1[c][k] = f1_score(p, r);
            s.summary_precision[c][k] = retained > 0 ? p : 0.0;
        }
        if (classes[c].num_gt > 0) {
            s.counted.push_back(static_cast<int>(c));
        }
    }
    s.all_precision.assign(kCurvePoints, 0.0);
    s.all_recall.assign(kCurvePoints, 0.0);
    s.all_f1.assign(kCurvePoints, 0.0);
    if (!s.counted.empty()) {
        const double m = static_cast<double>(s.counted.size());
        for (int k = 0; k < kCurvePoints; ++k) {
            for (const int c : s.counted) {
                s.all_precision[k] += s.precision[c][k];
                s.all_recall[k] += s.recall[c][k];
                s.all_f1[k] += s.f1[c][k];
            }
            s.all_precision[k] /= m;
            s.all_recall[k] /= m;
            s.all_f1[k] /= m;
        }
    }
    return s;
}

std::vector<CurveSample> pr_samples(const std::vector<double>& recall, const std::vector<double>& precision)
{
    std::vector<CurveSample> pts;
    for (std::size_t k = 0; k < recall.size(); ++k) {
        pts.push_back({recall[k], precision[k]});
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x < b.x || (a.x == b.x && a.y > b.y);
    });
    std::vector<CurveSample> out;
    for (const auto& p : pts) {
        if (out.empty() || p.x > out.back().x) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<CurveSample> conf_samples(const std::vector<double>& y)
{
    std::vector<CurveSample> out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        out[k] = {curve_threshold(static_cast<int>(k)), y[k]};
    }
    return out;
}

MetricValues all_row(const std::vector<MetricValues>& per_class, const std::vector<int>& counted)
{
    MetricValues all;
    if (counted.empty()) {
        return all;
    }
    for (const int c : counted) {
        all.precision += per_class[c].precision;
        all.recall += per_class[c].recall;
        all.map50 += per_class[c].map50;
        all.map50_95 += per_class[c].map50_95;
    }
    const double m = static_cast<double>(counted.size());
    all.precision /= m;
    all.recall /= m;
    all.map50 /= m;
    all.map50_95 /= m;
    return all;
}

std::pair<std::vector<MetricValues>, double> kind_summary(const std::vector<ClassRecords>& classes,
                                                          std::vector<int>& counted)
{
    const Sweep s = sweep(classes);
    counted = s.counted;
    const int best_k = static_cast<int>(std::max_element(s.all_f1.begin(), s.all_f1.end()) - s.all_f1.begin());
    std::vector<MetricValues> values(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (classes[c].num_gt == 0) {
            continue;
        }
        std::array<double, kNumIouThresholds> ap{};
        for (int t = 0; t < kNumIouThresholds; ++t) {
            std::vector<ScoredMatch> matches;
            matches.reserve(classes[c].predictions.size());
            for (const auto& p : classes[c].predictions) {
                matches.push_back({p.confidence, p.tp[t]});
            }
            ap[t] = average_precision(std::move(matches), classes[c].num_gt);
        }
        // Mean taken as an offset from AP50 so that AP50-95 <= AP50 holds
        // in floating point whenever it holds per threshold.
        double offset = 0.0;
        for (int t = 1; t < kNumIouThresholds; ++t) {
            offset += ap[t] - ap[0];
        }
        values[c].map50 = ap[0];
        values[c].map50_95 = ap[0] + offset / kNumIouThresholds;
        values[c].precision = s.summary_precision[c][best_k];
        values[c].recall = s.recall[c][best_k];
    }
    return {values, curve_threshold(best_k)};
}

}  // namespace

MetricsReport map_summary(const Evaluation& eval, const std::vector<std::string>& class_names)
{
    MetricsReport report;
    if (eval.num_images == 0) {
        return report;
    }
    std::vector<int> counted;
    auto [box, box_conf] = kind_summary(eval.box, counted);
    auto [mask, mask_conf] = kind_summary(eval.mask, counted);
    report.box_confidence = box_conf;
    report.mask_confidence = mask_conf;

    ReportRow all;
    all.name = "all";
    all.images = eval.num_images;
    for (int c = 0; c < eval.num_classes; ++c) {
        all.instances += eval.box[c].num_gt;
    }
    all.box = all_row(box, counted);
    all.mask = all_row(mask, counted);
    report.rows.push_back(all);
    for (int c = 0; c < eval.num_classes; ++c) {
        ReportRow row;
        row.name = c < static_cast<int>(class_names.size()) ? class_names[c] : std::to_string(c);
        row.images = eval.box[c].num_images;
        row.instances = eval.box[c].num_gt;
        row.box = box[c];
        row.mask = mask[c];
        report.rows.push_back(row);
    }
    return report;
}

std::string curve_name(CurveKind kind)
{
    switch (kind) {
    case CurveKind::F1Confidence:
        return "f1_confidence";
    case CurveKind::PrecisionConfidence:
        return "precision_confidence";
    case CurveKind::RecallConfidence:
        return "recall_confidence";
    case CurveKind::PrecisionRecall:
        return "precision_recall";
    }
    return "unknown";
}

std::vector<CurveSeries> confidence_curves(const Evaluation& eval, MatchKind kind,
                                           const std::vector<std::string>& class_names)
{
    const auto& classes = eval.of(kind);
    const Sweep s = sweep(classes);
    const auto name = [&](std::size_t c) {
        return c < class_names.size() ? class_names[c] : std::to_string(c);
    };
    std::vector<CurveSeries> out;
    for (const CurveKind ck : {CurveKind::F1Confidence, CurveKind::PrecisionConfidence, CurveKind::RecallConfidence,
                               CurveKind::PrecisionRecall}) {
        CurveSeries cs;
        cs.kind = ck;
        if (eval.num_images == 0) {
            out.push_back(cs);
            continue;
        }
        for (std::size_t c = 0; c <= classes.size(); ++c) {
            const bool all = c == classes.size();
            const auto& p = all ? s.all_precision : s.precision[c];
            const auto& r = all ? s.all_recall : s.recall[c];
            const auto& f = all ? s.all_f1 : s.f1[c];
            Series series;
            series.name = all ? "all" : name(c);
            switch (ck) {
            case CurveKind::F1Confidence:
                series.samples = conf_samples(f);
                break;
            case CurveKind::PrecisionConfidence:
                series.samples = conf_samples(p);
                break;
            case CurveKind::RecallConfidence:
                series.samples = conf_samples(r);
                break;
            case CurveKind::PrecisionRecall:
                series.samples = pr_samples(r, p);
                break;
            }
            cs.series.push_back(std::move(series));
        }
        out.push_back(std::move(cs));
    }
    return out;
}

ConfusionMatrix confusion_matrix(const std::vector<EvalImage>& images, int num_classes, double conf_threshold,
                                 double iou_threshold, MatchKind kind)
{
    ConfusionMatrix cm;
    cm.conf_threshold = conf_threshold;
    cm.iou_threshold = iou_threshold;
    if (images.empty()) {
        cm.counts.resize(0, 0);
        return cm;
    }
    cm.counts.setZero(num_classes + 1, num_classes + 1);
    const int bg = num_classes;
    for (const auto& img : images) {
        std::vector<Detection> preds;
        std::vector<double> conf;
        for (const auto& d : img.predictions) {
            if (d.confidence >= conf_threshold) {
                preds.push_back(d);
                conf.push_back(d.confidence);
            }
        }
        const IouMatrix iou = iou_matrix(preds, img.ground_truth, kind, img.width, img.height);
        const auto assigned = greedy_match(conf, iou, iou_threshold);
        std::vector<bool> gt_matched(img.ground_truth.size(), false);
        for (std::size_t p = 0; p < preds.size(); ++p) {
            if (assigned[p] >= 0) {
                gt_matched[assigned[p]] = true;
                ++cm.counts(img.ground_truth[assigned[p]].class_id, preds[p].class_id);
            } else {
                ++cm.counts(bg, preds[p].class_id);
            }
        }
        for (std::size_t g = 0; g < img.ground_truth.size(); ++g) {
            if (!gt_matched[g]) {
                ++cm.counts(img.ground_truth[g].class_id, bg);
            }
        }
    }
    return cm;
}

}  // namespace xraysegkit
