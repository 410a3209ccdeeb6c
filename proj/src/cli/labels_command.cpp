#include "commands.hpp"

#include <xraysegkit/cli.hpp>
#include <xraysegkit/dataset.hpp>
#include <xraysegkit/image_io.hpp>
#include <xraysegkit/labels.hpp>
#include <xraysegkit/parallel.hpp>
#include <xraysegkit/raster.hpp>
#include <xraysegkit/report.hpp>

#include <spdlog/spdlog.h>

#include <filesystem>
#include <memory>
#include <ostream>

namespace xraysegkit::cli {

namespace fs = std::filesystem;

namespace {

struct ValidateOptions {
    std::string descriptor;
    unsigned jobs = default_jobs();
};

struct RasterizeOptions {
    std::string descriptor;
    std::string stem;
    std::string out_dir = ".";
};

struct TraceOptions {
    std::string mask;
    int class_id = 0;
    int min_area = 1;
    std::string output;
};

int run_validate(const ValidateOptions& opt, std::ostream& out)
{
    const Dataset ds = load_dataset(opt.descriptor, std::max(1u, opt.jobs));
    const auto unlabelled = ds.unlabelled_stems();
    for (const auto& stem : unlabelled) {
        spdlog::info("no labels for {}", stem);
    }
    out << "OK, " << ds.images.size() << " images, " << ds.instance_count() << " instances";
    if (!unlabelled.empty()) {
        out << " (" << unlabelled.size() << " without labels)";
    }
    out << "\n";
    return kExitOk;
}

int run_rasterize(const RasterizeOptions& opt, std::ostream& out)
{
    const DatasetDescriptor desc = load_descriptor(opt.descriptor);
    fs::path image_path;
    for (const auto& p : list_image_files(desc.images_dir)) {
        if (p.stem().string() == opt.stem) {
            image_path = p;
        }
    }
    if (image_path.empty()) {
        throw IoError("no image with stem '" + opt.stem + "' in " + desc.images_dir.string());
    }
    const ImageSize size = probe_image(image_path);
    const fs::path label_path = label_path_for(desc, opt.stem);
    std::vector<PolygonAnnotation> annotations;
    try {
        annotations = read_labels(label_path, desc.num_classes());
    } catch (const ParseError& e) {
        throw IoError(label_path.filename().string() + ": " + e.what());
    }

    const fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    for (int c = 0; c < desc.num_classes(); ++c) {
        const BinaryMask mask = rasterize_class(annotations, c, size.width, size.height);
        const fs::path path = dir / (opt.stem + "_" + desc.class_names[c] + ".png");
        save_image(mask, path, ImageFormat::Png);
        out << path.string() << " " << mask.count() << "\n";
    }
    return kExitOk;
}

int run_trace(const TraceOptions& opt, std::ostream& out)
{
    if (opt.class_id < 0) {
        throw UsageError("--class must be non-negative");
    }
    if (opt.min_area < 1) {
        throw UsageError("--min-area must be at least 1");
    }
    const GrayImage img = load_image(opt.mask);
    const BinaryMask mask = img > 0;
    std::vector<PolygonAnnotation> annotations;
    for (auto& poly : mask_to_polygons(mask, opt.min_area)) {
        annotations.push_back({opt.class_id, std::move(poly)});
    }
    const std::string text = serialize_label_file(annotations);
    if (opt.output.empty()) {
        out << text;
    } else {
        write_file_atomic(opt.output, text);
    }
    spdlog::info("traced {} polygons", annotations.size());
    return kExitOk;
}

}  // namespace

void add_labels_commands(CLI::App& app, std::ostream& out, std::vector<Command>& commands)
{
    CLI::App* labels = app.add_subcommand("labels", "Validate, rasterize and trace YOLO polygon labels");
    labels->require_subcommand(1);

    auto v = std::make_shared<ValidateOptions>();
    CLI::App* validate = labels->add_subcommand("validate", "Check every image and label file of a dataset");
    validate->add_option("descriptor", v->descriptor, "Dataset descriptor file")->required();
    validate->add_option("--jobs", v->jobs, "Parallel files")->capture_default_str();
    commands.push_back({validate, [v, &out] { return run_validate(*v, out); }});

    auto r = std::make_shared<RasterizeOptions>();
    CLI::App* rasterize = labels->add_subcommand("rasterize", "Write one mask PNG per class for an image");
    rasterize->add_option("stem", r->stem, "Image stem")->required();
    rasterize->add_option("--dataset", r->descriptor, "Dataset descriptor file")->required();
    rasterize->add_option("--out", r->out_dir, "Output directory")->capture_default_str();
    commands.push_back({rasterize, [r, &out] { return run_rasterize(*r, out); }});

    auto t = std::make_shared<TraceOptions>();
    CLI::App* trace = labels->add_subcommand("trace", "Convert a mask image (non-zero = foreground) to label lines");
    trace->add_option("mask", t->mask, "Mask image")->required();
    trace->add_option("--class", t->class_id, "Class index of the traced polygons")->capture_default_str();
    trace->add_option("--min-area", t->min_area, "Skip components with fewer pixels")->capture_default_str();
    trace->add_option("--out", t->output, "Label file to write (default: standard output)");
    commands.push_back({trace, [t, &out] { return run_trace(*t, out); }});
}

}  // namespace xraysegkit::cli
