#include <xraysegkit/image_io.hpp>
#include <xraysegkit/pipeline.hpp>
#include <xraysegkit/service.hpp>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <thread>

namespace xraysegkit {

namespace fs = std::filesystem;
using nlohmann::json;

AnnotationStore::AnnotationStore(const fs::path& descriptor_path)
{
    Dataset ds = load_dataset(descriptor_path);
    descriptor_ = ds.descriptor;
    for (auto& img : ds.images) {
        auto e = std::make_unique<Entry>();
        e->stem = img.stem;
        e->image_path = img.image_path;
        e->width = img.width;
        e->height = img.height;
        e->snapshot = std::make_shared<const Snapshot>(Snapshot{0, std::move(img.annotations)});
        entries_.emplace(img.stem, std::move(e));
    }
}

AnnotationStore::Entry& AnnotationStore::entry(const std::string& stem) const
{
    const auto it = entries_.find(stem);
    if (it == entries_.end()) {
        throw NotFound("unknown image '" + stem + "'");
    }
    return *it->second;
}

std::shared_ptr<const AnnotationStore::Snapshot> AnnotationStore::snapshot_of(const Entry& e) const
{
    std::lock_guard lock(e.snapshot_mutex);
    return e.snapshot;
}

std::vector<AnnotationStore::ImageInfo> AnnotationStore::list_images() const
{
    if (!fs::is_directory(descriptor_.labels_dir)) {
        throw IoError("labels directory missing: " + descriptor_.labels_dir.string());
    }
    std::vector<ImageInfo> out;
    for (const auto& [stem, e] : entries_) {
        ImageInfo info{stem, e->width, e->height, 0, snapshot_of(*e)->revision};
        info.instance_count = read_labels(label_path_for(descriptor_, stem), descriptor_.num_classes()).size();
        out.push_back(info);
    }
    return out;
}

AnnotationStore::Snapshot AnnotationStore::get(const std::string& stem) const
{
    return *snapshot_of(entry(stem));
}

std::uint64_t AnnotationStore::put(const std::string& stem, std::uint64_t base_revision,
                                   const std::vector<PolygonAnnotation>& annotations)
{
    Entry& e = entry(stem);
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        try {
            validate_annotation(annotations[i], descriptor_.num_classes());
        } catch (const InvalidArgument& ex) {
            problems.push_back("annotation " + std::to_string(i) + ": " + ex.what());
        }
    }
    if (!problems.empty()) {
        throw ValidationError("invalid annotations", problems);
    }

    std::lock_guard lock(e.write_mutex);
    const auto current = snapshot_of(e);
    if (current->revision != base_revision) {
        throw StaleRevision(current->revision);
    }
    const std::string text = serialize_label_file(annotations);
    const fs::path target = label_path_for(descriptor_, stem);
    const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << text;
        out.flush();
        if (!out) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    if (fault_hook_) {
        try {
            fault_hook_(tmp);
        } catch (...) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw;
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw IoError("cannot replace " + target.string() + ": " + ec.message());
    }
    auto next = std::make_shared<const Snapshot>(
        Snapshot{current->revision + 1, parse_label_file(text, descriptor_.num_classes())});
    {
        std::lock_guard snap_lock(e.snapshot_mutex);
        e.snapshot = next;
    }
    spdlog::info("saved {} ({} annotations, revision {})", stem, annotations.size(), next->revision);
    return next->revision;
}

fs::path AnnotationStore::image_path(const std::string& stem) const { return entry(stem).image_path; }

GrayImage AnnotationStore::load_image(const std::string& stem) const
{
    return xraysegkit::load_image(entry(stem).image_path);
}

namespace {

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::vector<std::string>& details = {})
{
    json body{{"error", message}};
    if (!details.empty()) {
        body["details"] = details;
    }
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_json(httplib::Response& res, const json& body)
{
    res.status = 200;
    res.set_content(body.dump(), "application/json");
}

json annotations_to_json(const std::vector<PolygonAnnotation>& annotations)
{
    json list = json::array();
    for (const auto& a : annotations) {
        json vertices = json::array();
        for (const auto& v : a.vertices) {
            vertices.push_back({v.x(), v.y()});
        }
        list.push_back({{"class_id", a.class_id}, {"vertices", vertices}});
    }
    return list;
}

// Structural decoding only; value invariants are checked by the store.
std::vector<PolygonAnnotation> annotations_from_json(const json& list)
{
    if (!list.is_array()) {
        throw ValidationError("annotations must be an array", {});
    }
    std::vector<PolygonAnnotation> out;
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const json& item = list[i];
        const std::string where = "annotation " + std::to_string(i) + ": ";
        if (!item.is_object() || !item.contains("class_id") || !item["class_id"].is_number_integer() ||
            !item.contains("vertices") || !item["vertices"].is_array()) {
            problems.push_back(where + "expected {class_id: integer, vertices: [[x, y], ...]}");
            continue;
        }
        PolygonAnnotation a;
        a.class_id = item["class_id"].get<int>();
        bool ok = true;
        for (const auto& v : item["vertices"]) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
                problems.push_back(where + "vertex must be [x, y]");
                ok = false;
                break;
            }
            a.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        if (ok) {
            out.push_back(std::move(a));
        }
    }
    if (!problems.empty()) {
        throw ValidationError("invalid annotations", problems);
    }
    return out;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>xraysegkit annotator</title></head>"
    "<body><h1>xraysegkit annotation service</h1>"
    "<p>The annotator UI bundle is not installed. Start the service with <code>--ui-dir</code> "
    "pointing at the built bundle. The JSON API is available under <code>/api/</code>.</p></body></html>";

}  // namespace

AnnotationServer::AnnotationServer(AnnotationStore& store, ServerOptions options)
    : store_(store), options_(std::move(options)), server_(std::make_unique<httplib::Server>())
{
    const unsigned threads = std::max(1u, options_.threads);
    server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    // No SO_REUSEPORT, so a port that is already taken fails to bind.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
}

AnnotationServer::~AnnotationServer() { stop(); }

bool AnnotationServer::bind()
{
    if (options_.port == 0) {
        port_ = server_->bind_to_any_port(options_.host);
        return port_ > 0;
    }
    if (!server_->bind_to_port(options_.host, options_.port)) {
        return false;
    }
    port_ = options_.port;
    return true;
}

void AnnotationServer::listen()
{
    listening_ = true;
    if (!stop_requested_) {
        server_->listen_after_bind();
    }
    listening_ = false;
}

void AnnotationServer::stop()
{
    stop_requested_ = true;
    while (listening_ && !server_->is_running()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    server_->stop();
}

void AnnotationServer::routes()
{
    auto& svr = *server_;

    svr.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, {{"status", "ok"}});
    });

    svr.Get("/api/dataset", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, {{"classes", store_.descriptor().class_names}});
    });

    svr.Get("/api/images", [this](const httplib::Request&, httplib::Response& res) {
        try {
            json list = json::array();
            for (const auto& info : store_.list_images()) {
                list.push_back({{"stem", info.stem},
                                {"width", info.width},
                                {"height", info.height},
                                {"instance_count", info.instance_count},
                                {"revision", info.revision}});
            }
            send_json(res, list);
        } catch (const std::exception& e) {
            send_error(res, 500, "cannot read dataset", {e.what()});
        }
    });

    svr.Get(R"(/api/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string stem = req.matches[1];
        try {
            const fs::path path = store_.image_path(stem);
            std::vector<std::uint8_t> bytes = read_bytes(path);
            if (format_for_path(path) != ImageFormat::Png) {
                bytes = encode_png(decode_image(bytes));
            }
            res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    svr.Get(R"(/api/annotations/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto snap = store_.get(req.matches[1]);
            send_json(res, {{"revision", snap.revision}, {"annotations", annotations_to_json(snap.annotations)}});
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        }
    });

    svr.Put(R"(/api/annotations/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string stem = req.matches[1];
        try {
            const json body = json::parse(req.body);
            if (!body.is_object() || !body.contains("base_revision") || !body["base_revision"].is_number_unsigned() ||
                !body.contains("annotations")) {
                send_error(res, 400, "body must be {base_revision: integer >= 0, annotations: [...]}");
                return;
            }
            const auto annotations = annotations_from_json(body["annotations"]);
            const auto revision = store_.put(stem, body["base_revision"].get<std::uint64_t>(), annotations);
            send_json(res, {{"revision", revision}});
        } catch (const json::exception& e) {
            send_error(res, 400, "malformed JSON", {e.what()});
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what(), e.details());
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        } catch (const StaleRevision& e) {
            send_error(res, 409, e.what());
        } catch (const std::exception& e) {
            spdlog::error("save {} failed: {}", stem, e.what());
            send_error(res, 500, e.what());
        }
    });

    svr.Get(R"(/api/preview/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            std::map<std::string, std::string> values;
            for (const auto& [key, value] : req.params) {
                values[key] = value;
            }
            const SegmentParams params = parse_segment_params(values);
            const GrayImage img = store_.load_image(req.matches[1]);
            const auto bytes = encode_png(run_segment(img, params).image);
            res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        } catch (const NotFound& e) {
            send_error(res, 404, e.what());
        } catch (const InvalidArgument& e) {
            send_error(res, 400, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    if (!options_.ui_dir.empty() && fs::is_directory(options_.ui_dir)) {
        svr.set_mount_point("/", options_.ui_dir.string());
    } else {
        svr.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

}  // namespace xraysegkit
