#include "commands.hpp"

#include <xraysegkit/cli.hpp>
#include <xraysegkit/dataset.hpp>
#include <xraysegkit/labels.hpp>
#include <xraysegkit/metrics.hpp>
#include <xraysegkit/parallel.hpp>
#include <xraysegkit/report.hpp>

#include <spdlog/spdlog.h>

#include <filesystem>
#include <memory>
#include <ostream>
#include <set>

namespace xraysegkit::cli {

namespace fs = std::filesystem;

namespace {

struct EvalOptions {
    std::string descriptor;
    std::string predictions;
    std::string out_dir = "eval";
    double conf = 0.25;
    double iou = 0.45;
    unsigned jobs = default_jobs();
};

int run(const EvalOptions& opt, std::ostream& out)
{
    if (opt.conf < 0.0 || opt.conf > 1.0) {
        throw UsageError("--conf must lie in [0, 1]");
    }
    if (opt.iou <= 0.0 || opt.iou > 1.0) {
        throw UsageError("--iou must lie in (0, 1]");
    }
    if (opt.jobs == 0) {
        throw UsageError("--jobs must be at least 1");
    }
    const fs::path pred_dir(opt.predictions);
    if (!fs::is_directory(pred_dir)) {
        throw IoError("predictions directory not found: " + pred_dir.string());
    }

    Dataset ds = load_dataset(opt.descriptor, opt.jobs);
    const int num_classes = ds.descriptor.num_classes();
    std::vector<EvalImage> images(ds.images.size());
    std::vector<char> missing(ds.images.size(), 0);
    std::vector<std::string> errors(ds.images.size());
    parallel_for(ds.images.size(), opt.jobs, [&](std::size_t i) {
        auto& src = ds.images[i];
        EvalImage& img = images[i];
        img.stem = src.stem;
        img.width = src.width;
        img.height = src.height;
        img.ground_truth = std::move(src.annotations);
        const fs::path path = pred_dir / (src.stem + ".txt");
        if (!fs::exists(path)) {
            missing[i] = 1;
            return;
        }
        try {
            img.predictions = parse_prediction_file(read_text_file(path), num_classes);
        } catch (const std::exception& e) {
            errors[i] = path.filename().string() + ": " + e.what();
        }
    });

    std::vector<std::string> problems;
    std::size_t missing_count = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (!errors[i].empty()) {
            problems.push_back(errors[i]);
        }
        if (missing[i]) {
            ++missing_count;
            spdlog::warn("no prediction file for {} (treated as no detections)", images[i].stem);
        }
    }
    if (!problems.empty()) {
        throw DatasetError("invalid prediction files", problems);
    }
    if (missing_count > 0) {
        spdlog::warn("{} of {} images have no prediction file", missing_count, images.size());
    }

    std::set<std::string> stems;
    for (const auto& img : images) {
        stems.insert(img.stem);
    }
    for (const auto& entry : fs::directory_iterator(pred_dir)) {
        if (entry.path().extension() == ".txt" && !stems.count(entry.path().stem().string())) {
            spdlog::warn("ignoring {}: no such image in the dataset", entry.path().filename().string());
        }
    }

    const auto& names = ds.descriptor.class_names;
    const Evaluation eval = evaluate(images, num_classes, opt.jobs);
    const MetricsReport report = map_summary(eval, names);
    const ConfusionMatrix matrix = confusion_matrix(images, num_classes, opt.conf, opt.iou);
    write_report(report, matrix,
                 {{"", confidence_curves(eval, MatchKind::Mask, names)},
                  {"box_", confidence_curves(eval, MatchKind::Box, names)}},
                 names, opt.out_dir);
    out << format_report_table(report);
    spdlog::info("report written to {}", opt.out_dir);
    return kExitOk;
}

}  // namespace

void add_eval_command(CLI::App& app, std::ostream& out, std::vector<Command>& commands)
{
    auto opt = std::make_shared<EvalOptions>();
    CLI::App* sub = app.add_subcommand("eval", "Score prediction files against a dataset's labels");
    sub->add_option("--dataset", opt->descriptor, "Dataset descriptor file")->required();
    sub->add_option("--predictions", opt->predictions, "Directory of <stem>.txt prediction files")->required();
    sub->add_option("--out", opt->out_dir, "Directory for report and curve files")->capture_default_str();
    sub->add_option("--conf", opt->conf, "Confusion matrix confidence threshold")->capture_default_str();
    sub->add_option("--iou", opt->iou, "Confusion matrix IoU threshold")->capture_default_str();
    sub->add_option("--jobs", opt->jobs, "Parallel images")->capture_default_str();
    commands.push_back({sub, [opt, &out] { return run(*opt, out); }});
}

}  // namespace xraysegkit::cli
