#include <xraysegkit/report.hpp>

#include <fmt/format.h>

#include <array>
#include <fstream>

namespace xraysegkit {

namespace fs = std::filesystem;

std::string report_csv_header()
{
    return "Class,Images,Instances,Box(P),Box(R),Box(mAP50),Box(mAP50-95),"
           "Mask(P),Mask(R),Mask(mAP50),Mask(mAP50-95)";
}

std::string report_csv(const MetricsReport& report)
{
    std::string out = report_csv_header() + "\n";
    for (const auto& row : report.rows) {
        out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", row.name, row.images,
                           row.instances, row.box.precision, row.box.recall, row.box.map50, row.box.map50_95,
                           row.mask.precision, row.mask.recall, row.mask.map50, row.mask.map50_95);
    }
    return out;
}

std::string format_report_table(const MetricsReport& report)
{
    std::string out = fmt::format("{:>12} {:>7} {:>9} {:>8} {:>6} {:>6} {:>9} {:>8} {:>6} {:>6} {:>9}\n", "Class",
                                  "Images", "Instances", "Box(P", "R", "mAP50", "mAP50-95)", "Mask(P", "R", "mAP50",
                                  "mAP50-95)");
    for (const auto& row : report.rows) {
        out += fmt::format("{:>12} {:>7} {:>9} {:>8.3f} {:>6.3f} {:>6.3f} {:>9.3f} {:>8.3f} {:>6.3f} {:>6.3f} {:>9.3f}\n",
                           row.name, row.images, row.instances, row.box.precision, row.box.recall, row.box.map50,
                           row.box.map50_95, row.mask.precision, row.mask.recall, row.mask.map50,
                           row.mask.map50_95);
    }
    out += fmt::format("P/R at confidence: box {:.3f}, mask {:.3f} (max mean F1)\n", report.box_confidence,
                       report.mask_confidence);
    return out;
}

std::string confusion_matrix_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names)
{
    const auto label = [&](Eigen::Index i) {
        return i < static_cast<Eigen::Index>(class_names.size()) ? class_names[i] : std::string("background");
    };
    std::string out = "true\\predicted";
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        out += "," + class_names[c];
    }
    out += ",background";
    out += "\n";
    for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
        out += label(r);
        for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) {
            out += fmt::format(",{}", cm.counts(r, c));
        }
        out += "\n";
    }
    return out;
}

std::string curve_csv(const CurveSeries& curve)
{
    std::string out = "series,x,y\n";
    for (const auto& s : curve.series) {
        for (const auto& p : s.samples) {
            out += fmt::format("{},{:.6f},{:.6f}\n", s.name, p.x, p.y);
        }
    }
    return out;
}

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::pair<std::string, std::string> axis_labels(CurveKind kind)
{
    switch (kind) {
    case CurveKind::F1Confidence:
        return {"Confidence", "F1"};
    case CurveKind::PrecisionConfidence:
        return {"Confidence", "Precision"};
    case CurveKind::RecallConfidence:
        return {"Confidence", "Recall"};
    case CurveKind::PrecisionRecall:
        return {"Recall", "Precision"};
    }
    return {"x", "y"};
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

}  // namespace

std::string curve_svg(const CurveSeries& curve, const std::string& title)
{
    constexpr double kW = 640, kH = 480, kLeft = 60, kRight = 160, kTop = 40, kBottom = 50;
    const double pw = kW - kLeft - kRight;
    const double ph = kH - kTop - kBottom;
    const auto sx = [&](double x) { return kLeft + x * pw; };
    const auto sy = [&](double y) { return kTop + (1.0 - y) * ph; };
    const auto [xlabel, ylabel] = axis_labels(curve.kind);

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        kW, kH, kW, kH);
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       kLeft + pw / 2, escape_xml(title));
    for (int i = 0; i <= 10; ++i) {
        const double v = i / 10.0;
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n",
                           sx(v), sy(0), sx(v), sy(1));
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n",
                           sx(0), sy(v), sx(1), sy(v));
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.1f}</text>\n", sx(v),
                           sy(0) + 16, v);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n", sx(0) - 6,
                           sy(v) + 4, v);
    }
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
                       "stroke=\"black\"/>\n",
                       kLeft, kTop, pw, ph);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                       kH - 12, xlabel);
    out += fmt::format("<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}"
                       "</text>\n",
                       kTop + ph / 2, kTop + ph / 2, ylabel);
    for (std::size_t i = 0; i < curve.series.size(); ++i) {
        const auto& s = curve.series[i];
        const bool all = s.name == "all";
        const std::string color = all ? "#000000" : kPalette[i % kPalette.size()];
        std::string points;
        for (const auto& p : s.samples) {
            points += fmt::format("{:.2f},{:.2f} ", sx(p.x), sy(p.y));
        }
        if (!points.empty()) {
            points.pop_back();
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>\n", color,
                           all ? 3 : 1.5, points);
        const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
                           "stroke-width=\"3\"/>\n",
                           kW - kRight + 12, ly - 4, kW - kRight + 32, ly - 4, color);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kW - kRight + 38, ly, escape_xml(s.name));
    }
    out += "</svg>\n";
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& content)
{
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot replace " + path.string());
    }
}

void write_report(const MetricsReport& report, const ConfusionMatrix& matrix,
                  const std::vector<std::pair<std::string, std::vector<CurveSeries>>>& curve_sets,
                  const std::vector<std::string>& class_names, const fs::path& out_dir)
{
    if (!fs::is_directory(out_dir)) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) {
            throw IoError("cannot create output directory " + out_dir.string());
        }
    }
    write_file_atomic(out_dir / "report.csv", report_csv(report));
    write_file_atomic(out_dir / "report.txt",
                      format_report_table(report) +
                          fmt::format("confusion matrix: conf >= {:.3f}, IoU >= {:.3f}\n", matrix.conf_threshold,
                                      matrix.iou_threshold));
    write_file_atomic(out_dir / "confusion_matrix.csv", confusion_matrix_csv(matrix, class_names));
    for (const auto& [prefix, curves] : curve_sets) {
        for (const auto& curve : curves) {
            const std::string stem = prefix + "curve_" + curve_name(curve.kind);
            write_file_atomic(out_dir / (stem + ".csv"), curve_csv(curve));
            write_file_atomic(out_dir / (stem + ".svg"), curve_svg(curve, stem));
        }
    }
}

}  // namespace xraysegkit
