#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <xraysegkit/segment.hpp>

#include <doctest.h>

using namespace xraysegkit;

namespace {

GrayImage ramp()
{
    GrayImage img(1, 256);
    for (int v = 0; v < 256; ++v) {
        img(0, v) = static_cast<std::uint8_t>(v);
    }
    return img;
}

// Literal definition: a pixel survives erosion iff every pixel of the
// window lies inside the image and is set; dilation sets a pixel iff any
// in-image window pixel is set.
BinaryMask erode_oracle(const BinaryMask& m, int size)
{
    const int r = size / 2;
    BinaryMask out = BinaryMask::Constant(m.rows(), m.cols(), false);
    for (int y = 0; y < m.rows(); ++y) {
        for (int x = 0; x < m.cols(); ++x) {
            bool all = true;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    all = all && yy >= 0 && xx >= 0 && yy < m.rows() && xx < m.cols() && m(yy, xx);
                }
            }
            out(y, x) = all;
        }
    }
    return out;
}

BinaryMask dilate_oracle(const BinaryMask& m, int size)
{
    const int r = size / 2;
    BinaryMask out = BinaryMask::Constant(m.rows(), m.cols(), false);
    for (int y = 0; y < m.rows(); ++y) {
        for (int x = 0; x < m.cols(); ++x) {
            bool any = false;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    any = any || (yy >= 0 && xx >= 0 && yy < m.rows() && xx < m.cols() && m(yy, xx));
                }
            }
            out(y, x) = any;
        }
    }
    return out;
}

bool subset(const BinaryMask& a, const BinaryMask& b) { return (!a || b).all(); }

}  // namespace

TEST_CASE("fixed threshold is strict")
{
    const GrayImage r = ramp();
    CHECK(threshold_fixed(r, 0).count() == 255);
    CHECK(threshold_fixed(r, 100).count() == 155);
    CHECK(threshold_fixed(r, 177).count() == 78);
    CHECK(threshold_fixed(r, 255).count() == 0);
    const BinaryMask m = threshold_fixed(r, 177);
    CHECK_FALSE(m(0, 177));
    CHECK(m(0, 178));
    CHECK(threshold_fixed(GrayImage::Zero(5, 5), 0).count() == 0);
}

TEST_CASE("raising the threshold never adds foreground")
{
    testgen::Rng rng(10);
    const GrayImage img = testgen::random_image(rng, 40, 30);
    BinaryMask prev = threshold_fixed(img, 0);
    for (int t = 1; t < 256; ++t) {
        const BinaryMask cur = threshold_fixed(img, t);
        CHECK(subset(cur, prev));
        prev = cur;
    }
}

TEST_CASE("Otsu on two levels picks the lowest maximizer")
{
    GrayImage img(10, 10);
    img.topRows(5).setConstant(50);
    img.bottomRows(5).setConstant(200);
    const OtsuResult r = threshold_otsu(img);
    CHECK(r.threshold == 50);
    CHECK(r.mask.count() == 50);
    CHECK((r.mask == threshold_fixed(img, 50)).all());
}

TEST_CASE("Otsu separates two clusters")
{
    testgen::Rng rng(11);
    GrayImage img(40, 40);
    for (Eigen::Index i = 0; i < img.size(); ++i) {
        const int centre = i % 2 ? 60 : 190;
        img.data()[i] = static_cast<std::uint8_t>(centre + testgen::uniform_int(rng, -5, 5));
    }
    const int t = threshold_otsu(img).threshold;
    CHECK(t >= 65);
    CHECK(t < 185);
    CHECK(t == oracle::otsu(img));
}

TEST_CASE("Otsu equals the exhaustive oracle")
{
    testgen::Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const GrayImage img = trial % 2 ? testgen::random_image(rng, 24, 24) : testgen::blocky_image(rng, 24, 24);
        if ((img == img(0, 0)).all()) {
            continue;
        }
        CHECK(threshold_otsu(img).threshold == oracle::otsu(img));
    }
}

TEST_CASE("Otsu rejects a constant image")
{
    try {
        threshold_otsu(GrayImage::Constant(8, 8, 7));
        FAIL("expected an error");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("degenerate histogram") != std::string::npos);
    }
}

TEST_CASE("region growing on simple images")
{
    const GrayImage flat = GrayImage::Constant(12, 9, 77);
    for (const auto mode : {GrowMode::SeedReference, GrowMode::RunningMean}) {
        CHECK(region_grow(flat, {3, 4}, 0, mode).all());

        GrayImage halves(10, 20);
        halves.leftCols(10).setConstant(100);
        halves.rightCols(10).setConstant(200);
        for (const auto conn : {Connectivity::Four, Connectivity::Eight}) {
            const BinaryMask m = region_grow(halves, {4, 5}, 50, mode, conn);
            CHECK(m.leftCols(10).all());
            CHECK_FALSE(m.rightCols(10).any());
        }
    }
}

TEST_CASE("running mean differs from the seed reference")
{
    GrayImage row(1, 4);
    row << 100, 110, 125, 135;
    // Mean after admitting 110 is 105, so 125 is within 20 of the mean
    // but not of the seed; the mean then moves to 111.67 and 135 fails.
    const BinaryMask mean = region_grow(row, {0, 0}, 20, GrowMode::RunningMean);
    const BinaryMask seed = region_grow(row, {0, 0}, 20, GrowMode::SeedReference);
    CHECK(mean(0, 0));
    CHECK(mean(0, 1));
    CHECK(mean(0, 2));
    CHECK_FALSE(mean(0, 3));
    CHECK(seed.count() == 2);
}

TEST_CASE("seed-referenced growing equals flood fill")
{
    testgen::Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = testgen::blocky_image(rng, 32, 32);
        const int sx = testgen::uniform_int(rng, 0, 31), sy = testgen::uniform_int(rng, 0, 31);
        for (const int tau : {0, 10, 60}) {
            for (const int conn : {4, 8}) {
                const BinaryMask got =
                    region_grow(img, {sx, sy}, tau, GrowMode::SeedReference, static_cast<Connectivity>(conn));
                CHECK((got == oracle::flood_fill(img, sx, sy, tau, conn)).all());
            }
        }
    }
}

TEST_CASE("running-mean growing yields one component containing the seed")
{
    testgen::Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = testgen::blocky_image(rng, 32, 32);
        const int sx = testgen::uniform_int(rng, 0, 31), sy = testgen::uniform_int(rng, 0, 31);
        for (const int conn : {4, 8}) {
            const BinaryMask m = region_grow(img, {sx, sy}, 25, GrowMode::RunningMean, static_cast<Connectivity>(conn));
            CHECK(m(sy, sx));
            CHECK(oracle::count_components(m, conn) == 1);
        }
    }
}

TEST_CASE("region growing rejects bad arguments")
{
    const GrayImage img = GrayImage::Zero(5, 5);
    CHECK_THROWS_AS(region_grow(img, {5, 0}, 3), InvalidArgument);
    CHECK_THROWS_AS(region_grow(img, {0, -1}, 3), InvalidArgument);
    CHECK_THROWS_AS(region_grow(img, {0, 0}, -1), InvalidArgument);
}

TEST_CASE("erosion of a full mask clears the border")
{
    const BinaryMask full = BinaryMask::Constant(10, 10, true);
    const BinaryMask e = erode(full, 3);
    CHECK(e.count() == 64);
    CHECK(e.block(1, 1, 8, 8).all());
}

TEST_CASE("morphology on an empty mask")
{
    const BinaryMask empty = BinaryMask::Constant(7, 9, false);
    for (const auto op : {MorphOp::Erode, MorphOp::Dilate, MorphOp::Open, MorphOp::Close}) {
        CHECK_FALSE(morph(empty, op, 3).any());
    }
}

TEST_CASE("morphology matches the definition and its algebra")
{
    testgen::Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = testgen::random_mask(rng, 32, 32, testgen::uniform(rng, 0.2, 0.8));
        const BinaryMask bigger = m || testgen::random_mask(rng, 32, 32, 0.1);
        for (const int size : {3, 5}) {
            const BinaryMask e = erode(m, size), d = dilate(m, size);
            CHECK((e == erode_oracle(m, size)).all());
            CHECK((d == dilate_oracle(m, size)).all());
            CHECK(subset(e, m));
            CHECK(subset(m, d));
            CHECK(subset(e, erode(bigger, size)));
            CHECK(subset(d, dilate(bigger, size)));
            const BinaryMask closed = morph(m, MorphOp::Close, size);
            const BinaryMask opened = morph(m, MorphOp::Open, size);
            CHECK((closed == erode(dilate(m, size), size)).all());
            CHECK((opened == dilate(erode(m, size), size)).all());
            CHECK((morph(closed, MorphOp::Close, size) == closed).all());
            CHECK((morph(opened, MorphOp::Open, size) == opened).all());
        }
    }
}

TEST_CASE("even structuring sizes are rejected")
{
    const BinaryMask m = BinaryMask::Constant(5, 5, true);
    CHECK_THROWS_AS(morph(m, MorphOp::Erode, 4), InvalidArgument);
    CHECK_THROWS_AS(morph(m, MorphOp::Dilate, 1), InvalidArgument);
}
