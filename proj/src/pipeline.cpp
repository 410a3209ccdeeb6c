#include <xraysegkit/filter.hpp>
#include <xraysegkit/pipeline.hpp>
#include <xraysegkit/raster.hpp>

#include <charconv>

namespace xraysegkit {

namespace {

const std::vector<std::pair<std::string, SegmentMethod>>& method_table()
{
    static const std::vector<std::pair<std::string, SegmentMethod>> table{
        {"fixed", SegmentMethod::Fixed},     {"otsu", SegmentMethod::Otsu},
        {"region-grow", SegmentMethod::RegionGrow}, {"sobel", SegmentMethod::Sobel},
        {"prewitt", SegmentMethod::Prewitt}, {"roberts", SegmentMethod::Roberts},
        {"canny", SegmentMethod::Canny},     {"snake", SegmentMethod::Snake},
    };
    return table;
}

double to_real(const std::string& key, const std::string& s)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw InvalidArgument("invalid value for " + key + ": '" + s + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& s)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidArgument("invalid value for " + key + ": '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_commas(const std::string& s)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        parts.push_back(s.substr(start, comma - start));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return parts;
}

template <typename Fn>
void require(bool ok, Fn message)
{
    if (!ok) {
        throw InvalidArgument(message());
    }
}

}  // namespace

std::vector<std::string> segment_method_names()
{
    std::vector<std::string> names;
    for (const auto& [name, m] : method_table()) {
        names.push_back(name);
    }
    return names;
}

SegmentMethod parse_segment_method(const std::string& name)
{
    for (const auto& [n, m] : method_table()) {
        if (n == name) {
            return m;
        }
    }
    throw InvalidArgument("unknown method '" + name + "'");
}

const std::vector<ParamSpec>& segment_param_specs()
{
    static const std::vector<ParamSpec> specs{
        {"method", "fixed", "fixed, otsu, region-grow, sobel, prewitt, roberts, canny or snake"},
        {"t", "177", "fixed threshold: foreground iff intensity > t (0..255)"},
        {"seed", "640,790", "region growing seed as x,y"},
        {"tau", "60", "region growing tolerance (intensity difference)"},
        {"mode", "seed-ref", "region growing reference: seed-ref or running-mean"},
        {"connectivity", "4", "region growing connectivity: 4 or 8"},
        {"border", "replicate", "convolution border: replicate or zero"},
        {"edge-threshold", "", "binarize gradient magnitude at this level (sobel/prewitt/roberts)"},
        {"sigma", "1.4", "canny Gaussian sigma"},
        {"low", "20", "canny low hysteresis threshold"},
        {"high", "60", "canny high hysteresis threshold"},
        {"alpha", "0.05", "snake elasticity weight"},
        {"beta", "0.1", "snake rigidity weight"},
        {"gamma-ext", "1.0", "snake edge-attraction weight"},
        {"radius", "1", "snake search window half-size"},
        {"max-iters", "500", "snake iteration limit"},
        {"epsilon", "0.01", "snake stops when fewer than this fraction of points move"},
        {"snake-sigma", "1.0", "smoothing before the snake's gradient field"},
        {"points", "12", "snake contour points"},
        {"init", "", "snake initial circle cx,cy,r (default: centred, 0.45 * min side)"},
        {"gamma", "", "gamma correction applied first"},
        {"sharpen-amount", "0", "unsharp-mask amount (0 disables)"},
        {"sharpen-sigma", "1.0", "unsharp-mask Gaussian sigma"},
        {"morph", "", "post-processing: erode, dilate, open or close"},
        {"morph-size", "3", "odd square structuring element size"},
    };
    return specs;
}

SegmentParams parse_segment_params(const std::map<std::string, std::string>& values)
{
    std::map<std::string, std::string> v;
    for (const auto& spec : segment_param_specs()) {
        v[spec.name] = spec.default_value;
    }
    for (const auto& [key, value] : values) {
        if (!v.count(key)) {
            throw InvalidArgument("unknown parameter '" + key + "'");
        }
        v[key] = value;
    }

    SegmentParams p;
    p.method = parse_segment_method(v["method"]);
    p.threshold = to_int("t", v["t"]);
    {
        const auto parts = split_commas(v["seed"]);
        require(parts.size() == 2, [] { return std::string("seed must be x,y"); });
        p.seed = {to_int("seed", parts[0]), to_int("seed", parts[1])};
    }
    p.tau = to_int("tau", v["tau"]);
    if (v["mode"] == "seed-ref") {
        p.grow_mode = GrowMode::SeedReference;
    } else if (v["mode"] == "running-mean") {
        p.grow_mode = GrowMode::RunningMean;
    } else {
        throw InvalidArgument("mode must be seed-ref or running-mean");
    }
    const int conn = to_int("connectivity", v["connectivity"]);
    require(conn == 4 || conn == 8, [] { return std::string("connectivity must be 4 or 8"); });
    p.connectivity = conn == 4 ? Connectivity::Four : Connectivity::Eight;
    if (v["border"] == "replicate") {
        p.border = BorderPolicy::Replicate;
    } else if (v["border"] == "zero") {
        p.border = BorderPolicy::ZeroPad;
    } else {
        throw InvalidArgument("border must be replicate or zero");
    }
    if (!v["edge-threshold"].empty()) {
        p.edge_threshold = to_real("edge-threshold", v["edge-threshold"]);
    }
    p.canny.sigma = to_real("sigma", v["sigma"]);
    p.canny.t_low = to_real("low", v["low"]);
    p.canny.t_high = to_real("high", v["high"]);
    p.snake.alpha = to_real("alpha", v["alpha"]);
    p.snake.beta = to_real("beta", v["beta"]);
    p.snake.gamma_ext = to_real("gamma-ext", v["gamma-ext"]);
    p.snake.search_radius = to_int("radius", v["radius"]);
    p.snake.max_iters = to_int("max-iters", v["max-iters"]);
    p.snake.move_epsilon = to_real("epsilon", v["epsilon"]);
    p.snake_sigma = to_real("snake-sigma", v["snake-sigma"]);
    p.snake_points = to_int("points", v["points"]);
    if (!v["init"].empty()) {
        const auto parts = split_commas(v["init"]);
        require(parts.size() == 3, [] { return std::string("init must be cx,cy,r"); });
        p.snake_init = Circle{to_real("init", parts[0]), to_real("init", parts[1]), to_real("init", parts[2])};
    }
    if (!v["gamma"].empty()) {
        p.gamma = to_real("gamma", v["gamma"]);
    }
    p.sharpen_amount = to_real("sharpen-amount", v["sharpen-amount"]);
    p.sharpen_sigma = to_real("sharpen-sigma", v["sharpen-sigma"]);
    if (const auto& m = v["morph"]; !m.empty()) {
        if (m == "erode") {
            p.morph = MorphOp::Erode;
        } else if (m == "dilate") {
            p.morph = MorphOp::Dilate;
        } else if (m == "open") {
            p.morph = MorphOp::Open;
        } else if (m == "close") {
            p.morph = MorphOp::Close;
        } else {
            throw InvalidArgument("morph must be erode, dilate, open or close");
        }
    }
    p.morph_size = to_int("morph-size", v["morph-size"]);
    validate(p);
    return p;
}

void validate(const SegmentParams& p)
{
    require(p.threshold >= 0 && p.threshold <= 255, [] { return std::string("t must be in 0..255"); });
    require(p.tau >= 0, [] { return std::string("tau must be >= 0"); });
    require(!p.gamma || *p.gamma > 0.0, [] { return std::string("gamma must be > 0"); });
    require(p.sharpen_amount >= 0.0, [] { return std::string("sharpen-amount must be >= 0"); });
    require(p.sharpen_sigma > 0.0, [] { return std::string("sharpen-sigma must be > 0"); });
    require(p.canny.sigma > 0.0, [] { return std::string("sigma must be > 0"); });
    require(p.canny.t_low >= 0.0 && p.canny.t_high >= p.canny.t_low,
            [] { return std::string("canny thresholds must satisfy 0 <= low <= high"); });
    require(!p.edge_threshold || *p.edge_threshold >= 0.0, [] { return std::string("edge-threshold must be >= 0"); });
    xraysegkit::validate(p.snake);
    require(p.snake_sigma > 0.0, [] { return std::string("snake-sigma must be > 0"); });
    require(p.snake_points >= 3, [] { return std::string("points must be >= 3"); });
    require(!p.snake_init || p.snake_init->radius > 0.0, [] { return std::string("init radius must be > 0"); });
    require(p.morph_size >= 3 && p.morph_size % 2 == 1,
            [] { return std::string("morph-size must be odd and >= 3"); });
}

SegmentOutput run_segment(const GrayImage& input, const SegmentParams& p)
{
    validate(p);
    GrayImage img = input;
    if (p.gamma) {
        img = gamma_correct(img, *p.gamma);
    }
    if (p.sharpen_amount > 0.0) {
        img = unsharp_sharpen(img, p.sharpen_sigma, p.sharpen_amount);
    }

    SegmentOutput out;
    const auto gradient_output = [&](GradientKind kind) {
        const GradientField field = gradient_operator(img, kind, p.border);
        if (p.edge_threshold) {
            out.mask = field.magnitude >= *p.edge_threshold;
        } else {
            out.image = to_gray(field.magnitude);
        }
    };
    switch (p.method) {
    case SegmentMethod::Fixed:
        out.mask = threshold_fixed(img, p.threshold);
        break;
    case SegmentMethod::Otsu: {
        auto r = threshold_otsu(img);
        out.threshold = r.threshold;
        out.mask = std::move(r.mask);
        break;
    }
    case SegmentMethod::RegionGrow:
        if (!in_bounds(img, p.seed.x, p.seed.y)) {
            throw InvalidArgument("seed (" + std::to_string(p.seed.x) + "," + std::to_string(p.seed.y) +
                                  ") outside the image");
        }
        out.mask = region_grow(img, p.seed, p.tau, p.grow_mode, p.connectivity);
        break;
    case SegmentMethod::Sobel:
        gradient_output(GradientKind::Sobel);
        break;
    case SegmentMethod::Prewitt:
        gradient_output(GradientKind::Prewitt);
        break;
    case SegmentMethod::Roberts:
        gradient_output(GradientKind::Roberts);
        break;
    case SegmentMethod::Canny:
        out.mask = canny(img, p.canny);
        break;
    case SegmentMethod::Snake: {
        const GradientField field = gradient_operator(gaussian_blur(img, p.snake_sigma), GradientKind::Sobel);
        const int w = width(img);
        const int h = height(img);
        const Circle c = p.snake_init.value_or(Circle{(w - 1) / 2.0, (h - 1) / 2.0, 0.45 * std::min(w, h)});
        Contour init = circle_contour(c.cx, c.cy, c.radius, p.snake_points);
        for (auto& q : init.points) {
            q = Point2d(std::clamp(q.x(), 0.0, w - 1.0), std::clamp(q.y(), 0.0, h - 1.0));
        }
        out.snake = snake_evolve(field, init, p.snake);
        Polygon poly;
        // Contour points are pixel centres; the fill samples at centres too.
        for (const auto& q : out.snake->contour.points) {
            poly.emplace_back(q.x() + 0.5, q.y() + 0.5);
        }
        out.mask = rasterize_pixel_polygon(poly, w, h);
        break;
    }
    }
    if (p.morph) {
        if (!out.mask) {
            throw InvalidArgument("morph needs a binary output (set edge-threshold for gradient methods)");
        }
        out.mask = morph(*out.mask, *p.morph, p.morph_size);
    }
    if (out.mask) {
        out.image = mask_to_gray(*out.mask);
    }
    return out;
}

}  // namespace xraysegkit
