#include <xraysegkit/dataset.hpp>
#include <xraysegkit/image_io.hpp>
#include <xraysegkit/parallel.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace xraysegkit {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t Dataset::instance_count() const
{
    std::size_t n = 0;
    for (const auto& img : images) {
        n += img.annotations.size();
    }
    return n;
}

std::vector<std::string> Dataset::unlabelled_stems() const
{
    std::vector<std::string> out;
    for (const auto& img : images) {
        if (img.annotations.empty()) {
            out.push_back(img.stem);
        }
    }
    return out;
}

DatasetDescriptor parse_descriptor(std::string_view text, const fs::path& base_dir)
{
    DatasetDescriptor d;
    std::vector<std::pair<int, std::string>> classes;
    std::vector<std::string> errors;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string directive;
        if (!(ls >> directive)) {
            continue;
        }
        std::string rest;
        std::getline(ls, rest);
        const auto first = rest.find_first_not_of(" \t\r");
        const auto last = rest.find_last_not_of(" \t\r");
        rest = first == std::string::npos ? std::string() : rest.substr(first, last - first + 1);
        if (directive == "class") {
            std::istringstream cs(rest);
            int index = -1;
            std::string name;
            if (!(cs >> index >> name) || index < 0) {
                errors.push_back(fmt::format("line {}: expected 'class <index> <name>'", line_no));
                continue;
            }
            std::string extra;
            if (cs >> extra) {
                errors.push_back(fmt::format("line {}: class name must be a single token", line_no));
                continue;
            }
            classes.emplace_back(index, name);
        } else if (directive == "images_dir" || directive == "labels_dir") {
            if (rest.empty()) {
                errors.push_back(fmt::format("line {}: missing path for {}", line_no, directive));
                continue;
            }
            fs::path p(rest);
            if (p.is_relative()) {
                p = base_dir / p;
            }
            (directive == "images_dir" ? d.images_dir : d.labels_dir) = p.lexically_normal();
        } else {
            errors.push_back(fmt::format("line {}: unknown directive '{}'", line_no, directive));
        }
    }
    std::sort(classes.begin(), classes.end());
    std::set<std::string> names;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].first != static_cast<int>(i)) {
            errors.push_back(fmt::format("class indices must be 0..N-1 without gaps or duplicates (found {})",
                                         classes[i].first));
            break;
        }
        if (!names.insert(classes[i].second).second) {
            errors.push_back("duplicate class name '" + classes[i].second + "'");
        }
        d.class_names.push_back(classes[i].second);
    }
    if (classes.empty()) {
        errors.emplace_back("no classes declared");
    }
    if (d.images_dir.empty()) {
        errors.emplace_back("missing images_dir");
    }
    if (d.labels_dir.empty()) {
        errors.emplace_back("missing labels_dir");
    }
    if (!errors.empty()) {
        throw DatasetError("malformed dataset descriptor", errors);
    }
    return d;
}

DatasetDescriptor load_descriptor(const fs::path& path)
{
    const std::string text = read_text_file(path);
    try {
        return parse_descriptor(text, path.parent_path());
    } catch (const DatasetError& e) {
        std::vector<std::string> details;
        for (const auto& msg : e.details()) {
            details.push_back(path.filename().string() + ": " + msg);
        }
        throw DatasetError(e.what(), details);
    }
}

std::vector<fs::path> list_image_files(const fs::path& images_dir)
{
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(images_dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".pgm") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.stem().string() < b.stem().string() ||
               (a.stem() == b.stem() && a.filename().string() < b.filename().string());
    });
    return files;
}

fs::path label_path_for(const DatasetDescriptor& descriptor, const std::string& stem)
{
    return descriptor.labels_dir / (stem + ".txt");
}

std::vector<PolygonAnnotation> read_labels(const fs::path& path, int num_classes)
{
    if (!fs::exists(path)) {
        return {};
    }
    return parse_label_file(read_text_file(path), num_classes);
}

Dataset load_dataset(const fs::path& descriptor_path, unsigned jobs)
{
    Dataset ds;
    ds.descriptor = load_descriptor(descriptor_path);
    std::vector<std::string> errors;
    if (!fs::is_directory(ds.descriptor.images_dir)) {
        errors.push_back("images_dir not found: " + ds.descriptor.images_dir.string());
    }
    if (!fs::is_directory(ds.descriptor.labels_dir)) {
        errors.push_back("labels_dir not found: " + ds.descriptor.labels_dir.string());
    }
    if (!errors.empty()) {
        throw DatasetError("dataset directories missing", errors);
    }

    const auto files = list_image_files(ds.descriptor.images_dir);
    std::set<std::string> seen;
    for (const auto& f : files) {
        if (!seen.insert(f.stem().string()).second) {
            errors.push_back("duplicate image stem: " + f.stem().string());
        }
    }
    ds.images.resize(files.size());
    std::vector<std::string> per_image_error(files.size());
    const int num_classes = ds.descriptor.num_classes();
    parallel_for(files.size(), jobs, [&](std::size_t i) {
        DatasetImage& img = ds.images[i];
        img.stem = files[i].stem().string();
        img.image_path = files[i];
        img.label_path = label_path_for(ds.descriptor, img.stem);
        try {
            const ImageSize size = probe_image(img.image_path);
            img.width = size.width;
            img.height = size.height;
        } catch (const std::exception& e) {
            per_image_error[i] = img.image_path.filename().string() + ": " + e.what();
            return;
        }
        try {
            img.annotations = read_labels(img.label_path, num_classes);
        } catch (const std::exception& e) {
            per_image_error[i] = img.label_path.filename().string() + ": " + e.what();
        }
    });
    for (auto& e : per_image_error) {
        if (!e.empty()) {
            errors.push_back(std::move(e));
        }
    }
    if (!errors.empty()) {
        throw DatasetError(fmt::format("dataset has {} error(s)", errors.size()), errors);
    }
    return ds;
}

}  // namespace xraysegkit
