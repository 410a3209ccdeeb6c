#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

IntMatrix sobel_x() { return {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}}; }
IntMatrix sobel_y() { return {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}}; }
IntMatrix prewitt_x() { return {{-1, 0, 1}, {-1, 0, 1}, {-1, 0, 1}}; }
IntMatrix prewitt_y() { return {{-1, -1, -1}, {0, 0, 0}, {1, 1, 1}}; }
IntMatrix roberts_x() { return {{1, 0}, {0, -1}}; }
IntMatrix roberts_y() { return {{0, 1}, {-1, 0}}; }

IntMatrix correlate(const GrayImage& img, const IntMatrix& kernel, bool zero_pad)
{
    const int h = static_cast<int>(img.rows());
    const int w = static_cast<int>(img.cols());
    const int kh = static_cast<int>(kernel.size());
    const int kw = static_cast<int>(kernel[0].size());
    const int ay = kh % 2 ? kh / 2 : 0;
    const int ax = kw % 2 ? kw / 2 : 0;
    IntMatrix out(h, std::vector<long long>(w, 0));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            long long sum = 0;
            for (int i = 0; i < kh; ++i) {
                for (int j = 0; j < kw; ++j) {
                    int yy = y + i - ay;
                    int xx = x + j - ax;
                    const bool outside = yy < 0 || yy >= h || xx < 0 || xx >= w;
                    if (outside && zero_pad) {
                        continue;
                    }
                    yy = std::min(std::max(yy, 0), h - 1);
                    xx = std::min(std::max(xx, 0), w - 1);
                    sum += kernel[i][j] * static_cast<long long>(img(yy, xx));
                }
            }
            out[y][x] = sum;
        }
    }
    return out;
}

int otsu(const GrayImage& img)
{
    using u128 = unsigned __int128;
    const long long n = img.size();
    long long total = 0;
    for (Eigen::Index i = 0; i < img.size(); ++i) {
        total += img.data()[i];
    }
    // w0 w1 (mu0 - mu1)^2 = (S0 N - S n0)^2 / (N^2 n0 n1); compare the
    // fractions (S0 N - S n0)^2 / (n0 n1) exactly.
    int best_t = -1;
    u128 best_num = 0, best_den = 1;
    for (int t = 0; t < 256; ++t) {
        long long n0 = 0, s0 = 0;
        for (Eigen::Index i = 0; i < img.size(); ++i) {
            if (img.data()[i] <= t) {
                ++n0;
                s0 += img.data()[i];
            }
        }
        const long long n1 = n - n0;
        if (n0 == 0 || n1 == 0) {
            continue;
        }
        const long long d = s0 * n - total * n0;
        const u128 num = static_cast<u128>(d < 0 ? -d : d) * static_cast<u128>(d < 0 ? -d : d);
        const u128 den = static_cast<u128>(n0) * static_cast<u128>(n1);
        if (best_t < 0 || num * best_den > best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    return best_t;
}

namespace {

std::vector<std::array<int, 2>> offsets(int connectivity)
{
    if (connectivity == 4) {
        return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    }
    return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
}

}  // namespace

BinaryMask flood_fill(const GrayImage& img, int sx, int sy, int tau, int connectivity)
{
    const int h = static_cast<int>(img.rows());
    const int w = static_cast<int>(img.cols());
    BinaryMask out = BinaryMask::Constant(h, w, false);
    const int ref = img(sy, sx);
    std::vector<std::array<int, 2>> stack{{sx, sy}};
    out(sy, sx) = true;
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (const auto& [dx, dy] : offsets(connectivity)) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || out(ny, nx)) {
                continue;
            }
            if (std::abs(static_cast<int>(img(ny, nx)) - ref) <= tau) {
                out(ny, nx) = true;
                stack.push_back({nx, ny});
            }
        }
    }
    return out;
}

int count_components(const BinaryMask& mask, int connectivity)
{
    const int h = static_cast<int>(mask.rows());
    const int w = static_cast<int>(mask.cols());
    std::vector<char> seen(static_cast<std::size_t>(h) * w, 0);
    int count = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask(y, x) || seen[y * w + x]) {
                continue;
            }
            ++count;
            std::vector<std::array<int, 2>> stack{{x, y}};
            seen[y * w + x] = 1;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (const auto& [dx, dy] : offsets(connectivity)) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (nx >= 0 && ny >= 0 && nx < w && ny < h && mask(ny, nx) && !seen[ny * w + nx]) {
                        seen[ny * w + nx] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
        }
    }
    return count;
}

BinaryMask raster_pixels(const std::vector<std::array<double, 2>>& poly, int width, int height)
{
    BinaryMask out = BinaryMask::Constant(height, width, false);
    double minx = poly[0][0], maxx = minx, miny = poly[0][1], maxy = miny;
    for (const auto& v : poly) {
        minx = std::min(minx, v[0]);
        maxx = std::max(maxx, v[0]);
        miny = std::min(miny, v[1]);
        maxy = std::max(maxy, v[1]);
    }
    const int y_lo = std::max(0, static_cast<int>(std::floor(miny)) - 1);
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(maxy)) + 1);
    const int x_lo = std::max(0, static_cast<int>(std::floor(minx)) - 1);
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(maxx)) + 1);
    const std::size_t n = poly.size();
    for (int py = y_lo; py <= y_hi; ++py) {
        const double yc = py + 0.5;
        for (int px = x_lo; px <= x_hi; ++px) {
            const double xc = px + 0.5;
            bool inside = false;
            for (std::size_t i = 0; i < n; ++i) {
                // Lower endpoint first so the crossing is computed the
                // same way for both orientations of an edge.
                auto a = poly[i];
                auto b = poly[(i + 1) % n];
                if (b[1] < a[1]) {
                    std::swap(a, b);
                }
                if (!(a[1] <= yc && yc < b[1])) {
                    continue;
                }
                const double xi = a[0] + (yc - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if (xi <= xc) {
                    inside = !inside;
                }
            }
            out(py, px) = inside;
        }
    }
    return out;
}

BinaryMask raster_normalized(const xraysegkit::Polygon& poly, int width, int height)
{
    std::vector<std::array<double, 2>> px;
    for (const auto& v : poly) {
        px.push_back({v.x() * width, v.y() * height});
    }
    return raster_pixels(px, width, height);
}

double mask_iou(const BinaryMask& a, const BinaryMask& b)
{
    long long inter = 0, uni = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        inter += a.data()[i] && b.data()[i];
        uni += a.data()[i] || b.data()[i];
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double snake_energy(const xraysegkit::FloatImage& magnitude, const std::vector<std::array<double, 2>>& pts,
                    double alpha, double beta, double gamma_ext)
{
    const std::size_t n = pts.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& prev = pts[(i + n - 1) % n];
        const auto& cur = pts[i];
        const auto& next = pts[(i + 1) % n];
        const double dx = cur[0] - prev[0], dy = cur[1] - prev[1];
        const double cx = prev[0] - 2 * cur[0] + next[0], cy = prev[1] - 2 * cur[1] + next[1];
        const int px = static_cast<int>(std::lround(cur[0]));
        const int py = static_cast<int>(std::lround(cur[1]));
        const double m = magnitude(py, px);
        e += alpha * (dx * dx + dy * dy) + beta * (cx * cx + cy * cy) - gamma_ext * m * m;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Detection metrics.

namespace {

constexpr int kThresholds = 10;
constexpr int kSweep = 1000;

double box_iou(const std::array<double, 4>& a, const std::array<double, 4>& b)
{
    const double ix = std::max(0.0, std::min(a[2], b[2]) - std::max(a[0], b[0]));
    const double iy = std::max(0.0, std::min(a[3], b[3]) - std::max(a[1], b[1]));
    const double inter = ix * iy;
    const double area_a = (a[2] - a[0]) * (a[3] - a[1]);
    const double area_b = (b[2] - b[0]) * (b[3] - b[1]);
    const double uni = area_a + area_b - inter;
    return uni > 0 ? inter / uni : 0.0;
}

std::array<double, 4> poly_box(const std::vector<std::array<double, 2>>& poly)
{
    std::array<double, 4> b{poly[0][0], poly[0][1], poly[0][0], poly[0][1]};
    for (const auto& v : poly) {
        b[0] = std::min(b[0], v[0]);
        b[1] = std::min(b[1], v[1]);
        b[2] = std::max(b[2], v[0]);
        b[3] = std::max(b[3], v[1]);
    }
    return b;
}

BinaryMask raster(const std::vector<std::array<double, 2>>& poly, int w, int h)
{
    std::vector<std::array<double, 2>> px;
    for (const auto& v : poly) {
        px.push_back({v[0] * w, v[1] * h});
    }
    return raster_pixels(px, w, h);
}

// Pred indices in matching order: confidence descending, earlier first on ties.
std::vector<std::size_t> by_confidence(const std::vector<double>& conf)
{
    std::vector<std::size_t> order(conf.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return conf[a] != conf[b] ? conf[a] > conf[b] : a < b;
    });
    return order;
}

// Which predictions are matched (greedy, best IoU, lowest GT index on ties).
std::vector<bool> greedy(const std::vector<double>& conf, const std::vector<std::vector<double>>& iou,
                         std::size_t num_gt, double thr)
{
    std::vector<bool> tp(conf.size(), false);
    std::vector<bool> used(num_gt, false);
    for (const std::size_t p : by_confidence(conf)) {
        int best = -1;
        for (std::size_t g = 0; g < num_gt; ++g) {
            if (used[g] || iou[p][g] < thr) {
                continue;
            }
            if (best < 0 || iou[p][g] > iou[p][best]) {
                best = static_cast<int>(g);
            }
        }
        if (best >= 0) {
            used[best] = true;
            tp[p] = true;
        }
    }
    return tp;
}

struct Ranked {
    double conf;
    std::size_t image;
    std::size_t index;
    std::array<bool, kThresholds> tp;
};

struct KindResult {
    std::vector<Values> values;
    double conf = 0.0;
    Curves curves;
};

double f1(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

KindResult summarize(const std::vector<std::vector<Ranked>>& per_class, const std::vector<std::size_t>& num_gt)
{
    const int nc = static_cast<int>(per_class.size());
    KindResult out;
    out.values.resize(nc);
    out.curves.precision.assign(nc + 1, std::vector<double>(kSweep, 0.0));
    out.curves.recall.assign(nc + 1, std::vector<double>(kSweep, 0.0));
    out.curves.f1.assign(nc + 1, std::vector<double>(kSweep, 0.0));
    std::vector<std::vector<double>> summary_p(nc, std::vector<double>(kSweep, 0.0));
    std::vector<int> counted;
    for (int c = 0; c < nc; ++c) {
        if (num_gt[c] > 0) {
            counted.push_back(c);
        }
        for (int k = 0; k < kSweep; ++k) {
            const double t = k / 999.0;
            std::size_t kept = 0, tp = 0;
            for (const auto& r : per_class[c]) {
                if (r.conf >= t) {
                    ++kept;
                    tp += r.tp[0];
                }
            }
            const double p = kept ? static_cast<double>(tp) / kept : 1.0;
            const double rec = num_gt[c] ? static_cast<double>(tp) / num_gt[c] : 0.0;
            out.curves.precision[c][k] = p;
            out.curves.recall[c][k] = rec;
            out.curves.f1[c][k] = f1(p, rec);
            summary_p[c][k] = kept ? p : 0.0;
        }
    }
    if (!counted.empty()) {
        for (int k = 0; k < kSweep; ++k) {
            double sp = 0, sr = 0, sf = 0;
            for (const int c : counted) {
                sp += out.curves.precision[c][k];
                sr += out.curves.recall[c][k];
                sf += out.curves.f1[c][k];
            }
            out.curves.precision[nc][k] = sp / counted.size();
            out.curves.recall[nc][k] = sr / counted.size();
            out.curves.f1[nc][k] = sf / counted.size();
        }
    }
    int best = 0;
    for (int k = 1; k < kSweep; ++k) {
        if (out.curves.f1[nc][k] > out.curves.f1[nc][best]) {
            best = k;
        }
    }
    out.conf = best / 999.0;
    for (int c = 0; c < nc; ++c) {
        if (num_gt[c] == 0) {
            continue;
        }
        double sum = 0.0;
        for (int t = 0; t < kThresholds; ++t) {
            std::vector<bool> tp;
            for (const auto& r : per_class[c]) {
                tp.push_back(r.tp[t]);
            }
            const double ap = ap101(tp, num_gt[c]);
            if (t == 0) {
                out.values[c].map50 = ap;
            }
            sum += ap;
        }
        out.values[c].map50_95 = sum / kThresholds;
        out.values[c].p = summary_p[c][best];
        out.values[c].r = out.curves.recall[c][best];
    }
    for (int s = 0; s <= nc; ++s) {
        std::vector<std::array<double, 2>> pts;
        for (int k = 0; k < kSweep; ++k) {
            const double r = out.curves.recall[s][k];
            const double p = out.curves.precision[s][k];
            auto it = std::find_if(pts.begin(), pts.end(), [&](const auto& q) { return q[0] == r; });
            if (it == pts.end()) {
                pts.push_back({r, p});
            } else {
                (*it)[1] = std::max((*it)[1], p);
            }
        }
        std::sort(pts.begin(), pts.end());
        out.curves.pr.push_back(pts);
    }
    return out;
}

}  // namespace

double ap101(const std::vector<bool>& tp, std::size_t num_gt)
{
    if (num_gt == 0) {
        return 0.0;
    }
    std::vector<std::array<double, 2>> points;  // (recall, precision)
    std::size_t hits = 0;
    for (std::size_t i = 0; i < tp.size(); ++i) {
        hits += tp[i];
        points.push_back({static_cast<double>(hits) / num_gt, static_cast<double>(hits) / (i + 1)});
    }
    double sum = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double r = k / 100.0;
        double best = 0.0;
        for (const auto& pt : points) {
            if (pt[0] >= r) {
                best = std::max(best, pt[1]);
            }
        }
        sum += best;
    }
    return sum / 101.0;
}

Evaluation evaluate(const std::vector<Image>& images, int num_classes)
{
    std::array<double, kThresholds> thresholds{};
    for (int t = 0; t < kThresholds; ++t) {
        thresholds[t] = (50 + 5 * t) / 100.0;
    }
    std::vector<std::vector<Ranked>> box(num_classes), mask(num_classes);
    std::vector<std::size_t> num_gt(num_classes, 0), num_images(num_classes, 0);

    for (std::size_t i = 0; i < images.size(); ++i) {
        const Image& img = images[i];
        for (int c = 0; c < num_classes; ++c) {
            std::vector<std::size_t> gi, pi;
            for (std::size_t g = 0; g < img.gts.size(); ++g) {
                if (img.gts[g].cls == c) {
                    gi.push_back(g);
                }
            }
            for (std::size_t p = 0; p < img.preds.size(); ++p) {
                if (img.preds[p].cls == c) {
                    pi.push_back(p);
                }
            }
            num_gt[c] += gi.size();
            num_images[c] += gi.empty() ? 0 : 1;
            std::vector<BinaryMask> gmask;
            for (const auto g : gi) {
                gmask.push_back(raster(img.gts[g].poly, img.width, img.height));
            }
            std::vector<std::vector<double>> biou(pi.size(), std::vector<double>(gi.size(), 0.0));
            std::vector<std::vector<double>> miou = biou;
            std::vector<double> conf;
            for (std::size_t a = 0; a < pi.size(); ++a) {
                const Prediction& p = img.preds[pi[a]];
                conf.push_back(p.conf);
                const BinaryMask pm = p.poly.empty() ? BinaryMask() : raster(p.poly, img.width, img.height);
                for (std::size_t b = 0; b < gi.size(); ++b) {
                    biou[a][b] = box_iou(p.box, poly_box(img.gts[gi[b]].poly));
                    miou[a][b] = p.poly.empty() ? 0.0 : mask_iou(pm, gmask[b]);
                }
            }
            for (std::size_t a = 0; a < pi.size(); ++a) {
                box[c].push_back({conf[a], i, pi[a], {}});
                mask[c].push_back({conf[a], i, pi[a], {}});
            }
            for (int t = 0; t < kThresholds; ++t) {
                const auto bt = greedy(conf, biou, gi.size(), thresholds[t]);
                const auto mt = greedy(conf, miou, gi.size(), thresholds[t]);
                for (std::size_t a = 0; a < pi.size(); ++a) {
                    box[c][box[c].size() - pi.size() + a].tp[t] = bt[a];
                    mask[c][mask[c].size() - pi.size() + a].tp[t] = mt[a];
                }
            }
        }
    }
    const auto rank = [](std::vector<Ranked>& v) {
        std::sort(v.begin(), v.end(), [](const Ranked& a, const Ranked& b) {
            if (a.conf != b.conf) {
                return a.conf > b.conf;
            }
            return a.image != b.image ? a.image < b.image : a.index < b.index;
        });
    };
    for (int c = 0; c < num_classes; ++c) {
        rank(box[c]);
        rank(mask[c]);
    }

    const KindResult b = summarize(box, num_gt);
    const KindResult m = summarize(mask, num_gt);
    Evaluation out;
    out.box_curves = b.curves;
    out.mask_curves = m.curves;
    if (images.empty()) {
        return out;
    }
    out.report.box_conf = b.conf;
    out.report.mask_conf = m.conf;
    Row all;
    all.images = images.size();
    std::size_t counted = 0;
    for (int c = 0; c < num_classes; ++c) {
        all.instances += num_gt[c];
        if (num_gt[c] == 0) {
            continue;
        }
        ++counted;
        for (auto [dst, src] : {std::pair{&all.box, &b.values[c]}, std::pair{&all.mask, &m.values[c]}}) {
            dst->p += src->p;
            dst->r += src->r;
            dst->map50 += src->map50;
            dst->map50_95 += src->map50_95;
        }
    }
    if (counted > 0) {
        for (auto* v : {&all.box, &all.mask}) {
            v->p /= counted;
            v->r /= counted;
            v->map50 /= counted;
            v->map50_95 /= counted;
        }
    }
    out.report.rows.push_back(all);
    for (int c = 0; c < num_classes; ++c) {
        out.report.rows.push_back({num_images[c], num_gt[c], b.values[c], m.values[c]});
    }
    return out;
}

std::vector<std::vector<long long>> confusion(const std::vector<Image>& images, int num_classes, double conf,
                                              double iou)
{
    std::vector<std::vector<long long>> m(num_classes + 1, std::vector<long long>(num_classes + 1, 0));
    for (const Image& img : images) {
        std::vector<std::size_t> kept;
        std::vector<double> confs;
        for (std::size_t p = 0; p < img.preds.size(); ++p) {
            if (img.preds[p].conf >= conf) {
                kept.push_back(p);
                confs.push_back(img.preds[p].conf);
            }
        }
        std::vector<bool> gt_used(img.gts.size(), false);
        std::vector<bool> pred_used(kept.size(), false);
        for (const std::size_t a : by_confidence(confs)) {
            const Prediction& p = img.preds[kept[a]];
            int best = -1;
            double best_iou = 0.0;
            for (std::size_t g = 0; g < img.gts.size(); ++g) {
                const double v = box_iou(p.box, poly_box(img.gts[g].poly));
                if (!gt_used[g] && v >= iou && (best < 0 || v > best_iou)) {
                    best = static_cast<int>(g);
                    best_iou = v;
                }
            }
            if (best >= 0) {
                gt_used[best] = true;
                pred_used[a] = true;
                ++m[img.gts[best].cls][p.cls];
            }
        }
        for (std::size_t g = 0; g < img.gts.size(); ++g) {
            if (!gt_used[g]) {
                ++m[img.gts[g].cls][num_classes];
            }
        }
        for (std::size_t a = 0; a < kept.size(); ++a) {
            if (!pred_used[a]) {
                ++m[num_classes][img.preds[kept[a]].cls];
            }
        }
    }
    return m;
}

}  // namespace oracle
