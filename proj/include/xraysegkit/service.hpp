#ifndef XRAYSEGKIT_SERVICE_HPP_
#define XRAYSEGKIT_SERVICE_HPP_

#include <xraysegkit/dataset.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace xraysegkit {

class NotFound : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class StaleRevision : public std::runtime_error {
  public:
    StaleRevision(std::uint64_t current)
        : std::runtime_error("stale revision (current " + std::to_string(current) + ")"), current_(current)
    {
    }
    std::uint64_t current() const { return current_; }

  private:
    std::uint64_t current_;
};

/// Rejected annotations, one reason per offending annotation.
class ValidationError : public std::runtime_error {
  public:
    ValidationError(const std::string& what, std::vector<std::string> details)
        : std::runtime_error(what), details_(std::move(details))
    {
    }
    const std::vector<std::string>& details() const { return details_; }

  private:
    std::vector<std::string> details_;
};

/**
 * Annotation state of a dataset. The YOLO label files are the only
 * persistent store; each image also carries an in-memory revision that
 * starts at 0 and grows by one per accepted save.
 *
 * Saves to one image are serialized and use optimistic concurrency: a
 * save whose base revision is not the current one is refused. Label files
 * are replaced by writing a temporary sibling and renaming it.
 */
class AnnotationStore {
  public:
    struct ImageInfo {
        std::string stem;
        int width = 0;
        int height = 0;
        std::size_t instance_count = 0;
        std::uint64_t revision = 0;
    };

    struct Snapshot {
        std::uint64_t revision = 0;
        std::vector<PolygonAnnotation> annotations;
    };

    /// Called with the temporary path after it is written and before the
    /// rename. Throwing from it aborts the save (used to simulate crashes).
    using FaultHook = std::function<void(const std::filesystem::path&)>;

    explicit AnnotationStore(const std::filesystem::path& descriptor_path);

    const DatasetDescriptor& descriptor() const { return descriptor_; }

    /// Sorted by stem. Instance counts come from the label files on disk;
    /// throws IoError when the labels directory has gone.
    std::vector<ImageInfo> list_images() const;

    Snapshot get(const std::string& stem) const;

    /// Returns the new revision.
    std::uint64_t put(const std::string& stem, std::uint64_t base_revision,
                      const std::vector<PolygonAnnotation>& annotations);

    std::filesystem::path image_path(const std::string& stem) const;
    GrayImage load_image(const std::string& stem) const;

    void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

  private:
    struct Entry {
        std::string stem;
        std::filesystem::path image_path;
        int width = 0;
        int height = 0;
        std::mutex write_mutex;
        mutable std::mutex snapshot_mutex;
        std::shared_ptr<const Snapshot> snapshot;
    };

    Entry& entry(const std::string& stem) const;
    std::shared_ptr<const Snapshot> snapshot_of(const Entry& e) const;

    DatasetDescriptor descriptor_;
    std::map<std::string, std::unique_ptr<Entry>> entries_;
    FaultHook fault_hook_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  ///< 0 picks a free port
    std::filesystem::path ui_dir;  ///< served at '/', optional
    unsigned threads = 8;
};

/// HTTP/JSON front end of an AnnotationStore.
class AnnotationServer {
  public:
    AnnotationServer(AnnotationStore& store, ServerOptions options);
    ~AnnotationServer();
    AnnotationServer(const AnnotationServer&) = delete;
    AnnotationServer& operator=(const AnnotationServer&) = delete;

    /// Returns false when the address cannot be bound.
    bool bind();
    int port() const { return port_; }
    /// Blocks until stop(); in-flight requests finish first.
    void listen();
    /// Safe from any thread, also before listen() (which then returns at once).
    void stop();

  private:
    void routes();

    AnnotationStore& store_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
    int port_ = -1;
    std::atomic<bool> listening_{false};
    std::atomic<bool> stop_requested_{false};
};

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_SERVICE_HPP_
