#include "fdpl/image_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "test_util.hpp"

using namespace fdpl;

namespace {

TEST(PngIo, OnePixelWhiteRoundTrip) {
    testutil::TempDir tmp("png1");
    ImagePlane white(1, 1, 1.0);
    save_image(white, tmp.str("w.png"));
    RgbImage img = load_image(tmp.str("w.png"));
    EXPECT_EQ(img.width, 1);
    EXPECT_EQ(img.height, 1);
    EXPECT_EQ(img.pixels[0], 1.0);
    EXPECT_EQ(img.pixels[1], 1.0);
    EXPECT_EQ(img.pixels[2], 1.0);
}

TEST(PngIo, BlackPixelIsZero) {
    testutil::TempDir tmp("png2");
    ImagePlane p(2, 2, 0.5);
    p.at(0, 0) = 0.0;
    save_image(p, tmp.str("p.png"));
    RgbImage img = load_image(tmp.str("p.png"));
    EXPECT_EQ(img.pixels[0], 0.0);
    EXPECT_EQ(img.pixels[1], 0.0);
    EXPECT_EQ(img.pixels[2], 0.0);
}

TEST(PngIo, MidGrayQuantizesTo128) {
    testutil::TempDir tmp("png3");
    ImagePlane p(3, 3, 0.5);
    save_image(p, tmp.str("g.png"));
    RgbImage img = load_image(tmp.str("g.png"));
    for (double v : img.pixels) EXPECT_EQ(v, 128.0 / 255.0);
}

TEST(PngIo, OutOfRangeSamplesAreClamped) {
    testutil::TempDir tmp("png4");
    ImagePlane p(2, 1);
    p.at(0, 0) = 1.3;
    p.at(0, 1) = -0.2;
    save_image(p, tmp.str("c.png"));
    RgbImage img = load_image(tmp.str("c.png"));
    EXPECT_EQ(img.pixels[0], 1.0);
    EXPECT_EQ(img.pixels[3], 0.0);
}

TEST(PngIo, SaveLoadWithinHalfQuantizationStep) {
    testutil::TempDir tmp("png5");
    Rng rng(41);
    ImagePlane p = testutil::random_plane(rng, 23, 17);
    save_image(p, tmp.str("r.png"));
    auto [y, cb, cr] = rgb_to_ycbcr(load_image(tmp.str("r.png")));
    for (size_t i = 0; i < p.size(); ++i)
        EXPECT_LE(std::abs(y.samples[i] - p.samples[i]), 1.0 / 510.0 + 1e-12);
}

TEST(PngIo, ColorRoundTrip) {
    testutil::TempDir tmp("png6");
    RgbImage img(5, 4);
    Rng rng(42);
    for (double& v : img.pixels) v = std::round(rng.u01() * 255.0) / 255.0;
    save_rgb_image(img, tmp.str("c.png"));
    RgbImage back = load_image(tmp.str("c.png"));
    for (size_t i = 0; i < img.pixels.size(); ++i) EXPECT_NEAR(back.pixels[i], img.pixels[i], 1e-12);
}

TEST(PngIo, MissingFileIsDescriptiveError) {
    try {
        load_image("/nonexistent/path/img.png");
        FAIL() << "expected Error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("img.png"), std::string::npos);
    }
}

TEST(PngIo, NonPngFileRejected) {
    testutil::TempDir tmp("png7");
    std::ofstream f(tmp.str("fake.png"), std::ios::binary);
    f << "definitely not a png";
    f.close();
    EXPECT_THROW(load_image(tmp.str("fake.png")), Error);
}

TEST(PngIo, SixteenBitDepthRejected) {
    // Hand-rolled 16-bit grayscale PNG via libpng to confirm the loader
    // refuses non-8-bit inputs with a clear message.
    testutil::TempDir tmp("png8");
    std::string path = tmp.str("deep.png");
    FILE* fp = fopen(path.c_str(), "wb");
    ASSERT_NE(fp, nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    ASSERT_EQ(setjmp(png_jmpbuf(png)), 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, 2, 2, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_byte row[4] = {0, 0, 255, 255};
    for (int y = 0; y < 2; ++y) png_write_row(png, row);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    fclose(fp);

    try {
        load_image(path);
        FAIL() << "expected Error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("bit depth"), std::string::npos);
    }
}

TEST(ColorTransform, WhiteAndBlack) {
    RgbImage img(2, 1);
    img.px(0, 0)[0] = img.px(0, 0)[1] = img.px(0, 0)[2] = 1.0;
    auto [y, cb, cr] = rgb_to_ycbcr(img);
    EXPECT_NEAR(y.at(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(cb.at(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(cr.at(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(y.at(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(cb.at(0, 1), 0.5, 1e-12);
    EXPECT_NEAR(cr.at(0, 1), 0.5, 1e-12);
}

TEST(ColorTransform, PureRedLuminanceIsBt601Coefficient) {
    RgbImage img(1, 1);
    img.pixels = {1.0, 0.0, 0.0};
    auto [y, cb, cr] = rgb_to_ycbcr(img);
    EXPECT_NEAR(y.at(0, 0), 0.299, 1e-12);
    RgbImage back = ycbcr_to_rgb(y, cb, cr);
    EXPECT_NEAR(back.pixels[0], 1.0, 1e-6);
    EXPECT_NEAR(back.pixels[1], 0.0, 1e-6);
    EXPECT_NEAR(back.pixels[2], 0.0, 1e-6);
}

TEST(ColorTransform, RoundTripIsIdentity) {
    Rng rng(43);
    RgbImage img(9, 6);
    for (double& v : img.pixels) v = rng.u01();
    auto [y, cb, cr] = rgb_to_ycbcr(img);
    RgbImage back = ycbcr_to_rgb(y, cb, cr);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        EXPECT_NEAR(back.pixels[i], img.pixels[i], 1e-6);
}

TEST(ColorTransform, AchromaticLuminanceEqualsValue) {
    for (double v : {0.0, 0.123, 0.5, 0.875, 1.0}) {
        RgbImage img(1, 1);
        img.pixels = {v, v, v};
        auto [y, cb, cr] = rgb_to_ycbcr(img);
        EXPECT_NEAR(y.at(0, 0), v, 1e-9);
        EXPECT_NEAR(cb.at(0, 0), 0.5, 1e-9);
        EXPECT_NEAR(cr.at(0, 0), 0.5, 1e-9);
    }
}

TEST(ColorTransform, DimensionMismatchThrows) {
    ImagePlane y(4, 4, 0.5), cb(4, 4, 0.5), cr(4, 3, 0.5);
    EXPECT_THROW(ycbcr_to_rgb(y, cb, cr), Error);
}

TEST(ColorTransform, GrayscalePngReplicatesChannels) {
    testutil::TempDir tmp("png9");
    ImagePlane p(4, 4, 0.25);
    save_image(p, tmp.str("g.png"));
    RgbImage img = load_image(tmp.str("g.png"));
    for (int i = 0; i < 16; ++i) {
        EXPECT_EQ(img.pixels[3 * i], img.pixels[3 * i + 1]);
        EXPECT_EQ(img.pixels[3 * i], img.pixels[3 * i + 2]);
    }
}

}  // namespace
