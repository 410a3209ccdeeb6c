#ifndef XRAYSEGKIT_DATASET_HPP_
#define XRAYSEGKIT_DATASET_HPP_

#include <xraysegkit/labels.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace xraysegkit {

/**
 * Parsed dataset descriptor. The descriptor is plain text, one directive
 * per line:
 *
 *     class <index> <name>
 *     images_dir <path>
 *     labels_dir <path>
 *
 * `#` starts a comment. Relative paths resolve against the descriptor's
 * directory. Class indices must cover 0..N-1 exactly once.
 */
struct DatasetDescriptor {
    std::vector<std::string> class_names;
    std::filesystem::path images_dir;
    std::filesystem::path labels_dir;

    int num_classes() const { return static_cast<int>(class_names.size()); }
};

struct DatasetImage {
    std::string stem;
    std::filesystem::path image_path;
    std::filesystem::path label_path;  ///< may not exist: zero instances
    int width = 0;
    int height = 0;
    std::vector<PolygonAnnotation> annotations;
};

struct Dataset {
    DatasetDescriptor descriptor;
    std::vector<DatasetImage> images;  ///< sorted by stem

    std::size_t instance_count() const;
    std::vector<std::string> unlabelled_stems() const;
};

/// Aggregated failures; `details()` holds one message per problem,
/// prefixed with the file name (and line where applicable).
class DatasetError : public std::runtime_error {
  public:
    DatasetError(const std::string& what, std::vector<std::string> details)
        : std::runtime_error(what), details_(std::move(details))
    {
    }
    const std::vector<std::string>& details() const { return details_; }

  private:
    std::vector<std::string> details_;
};

DatasetDescriptor parse_descriptor(std::string_view text, const std::filesystem::path& base_dir);
DatasetDescriptor load_descriptor(const std::filesystem::path& path);

/// Image files (.png, .pgm) of the images directory, sorted by stem.
std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& images_dir);

std::filesystem::path label_path_for(const DatasetDescriptor& descriptor, const std::string& stem);

/// Reads `<labels_dir>/<stem>.txt`; a missing file is an empty list.
std::vector<PolygonAnnotation> read_labels(const std::filesystem::path& path, int num_classes);

/// Loads the descriptor, header-validates every image and parses every
/// label file. All problems are collected before throwing DatasetError.
Dataset load_dataset(const std::filesystem::path& descriptor_path, unsigned jobs = 1);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_DATASET_HPP_
