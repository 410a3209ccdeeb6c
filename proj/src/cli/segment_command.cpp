#include "commands.hpp"

#include <xraysegkit/cli.hpp>
#include <xraysegkit/dataset.hpp>
#include <xraysegkit/image_io.hpp>
#include <xraysegkit/parallel.hpp>
#include <xraysegkit/pipeline.hpp>

#include <spdlog/spdlog.h>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

namespace xraysegkit::cli {

namespace fs = std::filesystem;

namespace {

struct SegmentOptions {
    std::map<std::string, std::string> params;
    std::string input;
    std::string output;
    std::string format;
    bool overlay = false;
    unsigned jobs = default_jobs();
};

fs::path overlay_path(const fs::path& output)
{
    return output.parent_path() / (output.stem().string() + "_overlay.png");
}

// Returns the chosen Otsu threshold, if any.
std::optional<int> segment_file(const fs::path& input, const fs::path& output, const SegmentParams& params,
                                ImageFormat format, bool overlay)
{
    const GrayImage img = load_image(input);
    const SegmentOutput result = run_segment(img, params);
    save_image(result.image, output, format);
    if (overlay) {
        save_png(tint_overlay(img, *result.mask), overlay_path(output));
    }
    return result.threshold;
}

bool produces_mask(const SegmentParams& p)
{
    switch (p.method) {
    case SegmentMethod::Sobel:
    case SegmentMethod::Prewitt:
    case SegmentMethod::Roberts:
        return p.edge_threshold.has_value();
    default:
        return true;
    }
}

int run(const SegmentOptions& opt, std::ostream& out)
{
    SegmentParams params;
    try {
        params = parse_segment_params(opt.params);
        validate(params);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (opt.overlay && !produces_mask(params)) {
        throw UsageError("--overlay needs a binary output (set --edge-threshold for gradient methods)");
    }
    if (opt.jobs == 0) {
        throw UsageError("--jobs must be at least 1");
    }

    const fs::path input(opt.input);
    const fs::path output(opt.output);
    if (!fs::is_directory(input)) {
        const ImageFormat format = opt.format.empty() ? format_for_path(output)
                                   : opt.format == "pgm" ? ImageFormat::Pgm
                                                         : ImageFormat::Png;
        if (const auto t = segment_file(input, output, params, format, opt.overlay)) {
            out << "otsu threshold: " << *t << "\n";
        }
        return kExitOk;
    }

    const ImageFormat format = opt.format == "pgm" ? ImageFormat::Pgm : ImageFormat::Png;
    const std::string ext = format == ImageFormat::Pgm ? ".pgm" : ".png";
    const auto files = list_image_files(input);
    std::error_code ec;
    fs::create_directories(output, ec);
    if (!fs::is_directory(output)) {
        throw IoError("cannot create output directory " + output.string());
    }

    std::vector<std::string> errors(files.size());
    std::vector<std::optional<int>> thresholds(files.size());
    parallel_for(files.size(), opt.jobs, [&](std::size_t i) {
        try {
            thresholds[i] = segment_file(files[i], output / (files[i].stem().string() + ext), params, format,
                                         opt.overlay);
        } catch (const std::exception& e) {
            errors[i] = files[i].filename().string() + ": " + e.what();
        }
    });

    int failures = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!errors[i].empty()) {
            spdlog::error("{}", errors[i]);
            ++failures;
        } else if (thresholds[i]) {
            out << files[i].stem().string() << ": otsu threshold " << *thresholds[i] << "\n";
        }
    }
    spdlog::info("segmented {} of {} images", files.size() - failures, files.size());
    return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace

void add_segment_command(CLI::App& app, std::ostream& out, std::vector<Command>& commands)
{
    auto opt = std::make_shared<SegmentOptions>();
    CLI::App* sub = app.add_subcommand("segment", "Segment an image, or every image of a directory");
    for (const auto& spec : segment_param_specs()) {
        opt->params[spec.name] = spec.default_value;
        sub->add_option("--" + spec.name, opt->params[spec.name], spec.help)->capture_default_str();
    }
    sub->add_option("input", opt->input, "Input PNG/PGM image or directory of images")->required();
    sub->add_option("output", opt->output, "Output image, or output directory when the input is a directory")
        ->required();
    sub->add_option("--format", opt->format, "Output format: png or pgm (default: from the output extension)")
        ->check(CLI::IsMember({"png", "pgm"}));
    sub->add_flag("--overlay", opt->overlay, "Also write <output>_overlay.png with the mask tinted red");
    sub->add_option("--jobs", opt->jobs, "Parallel images when segmenting a directory")->capture_default_str();
    commands.push_back({sub, [opt, &out] { return run(*opt, out); }});
}

}  // namespace xraysegkit::cli
