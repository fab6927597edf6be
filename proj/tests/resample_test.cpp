#include "fdpl/resample.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace fdpl;
using testutil::random_plane;

namespace {

// Direct, non-separable evaluation of the Keys kernel at the mapped source
// coordinates; the reference for the two-pass implementation.
double keys(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

ImagePlane oracle_bicubic(const ImagePlane& src, int ow, int oh) {
    ImagePlane out(ow, oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double sy = (y + 0.5) * src.height / oh - 0.5;
            double sx = (x + 0.5) * src.width / ow - 0.5;
            int by = static_cast<int>(std::floor(sy));
            int bx = static_cast<int>(std::floor(sx));
            double acc = 0.0;
            for (int ty = -1; ty <= 2; ++ty)
                for (int tx = -1; tx <= 2; ++tx) {
                    int yy = std::clamp(by + ty, 0, src.height - 1);
                    int xx = std::clamp(bx + tx, 0, src.width - 1);
                    acc += keys(sy - (by + ty)) * keys(sx - (bx + tx)) * src.at(yy, xx);
                }
            out.at(y, x) = acc;
        }
    return out;
}

TEST(Bicubic, ConstantPlaneStaysConstant) {
    ImagePlane p(17, 11, 0.42);
    for (auto [w, h] : {std::pair{5, 3}, {34, 22}, {17, 11}, {50, 7}}) {
        ImagePlane r = bicubic_resize(p, w, h);
        EXPECT_EQ(r.width, w);
        EXPECT_EQ(r.height, h);
        for (double v : r.samples) EXPECT_NEAR(v, 0.42, 1e-9);
    }
}

TEST(Bicubic, IdentityResizeIsExact) {
    Rng rng(31);
    ImagePlane p = random_plane(rng, 13, 9);
    ImagePlane r = bicubic_resize(p, 13, 9);
    for (size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(r.samples[i], p.samples[i], 1e-12);
}

TEST(Bicubic, RampDownsampleMatchesDirectKernelEvaluation) {
    ImagePlane ramp(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) ramp.at(y, x) = (x + 4.0 * y) / 16.0;
    ImagePlane got = bicubic_resize(ramp, 2, 2);
    ImagePlane want = oracle_bicubic(ramp, 2, 2);
    for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got.samples[i], want.samples[i], 1e-9);
}

TEST(Bicubic, MatchesOracleOnRandomPlanes) {
    Rng rng(32);
    for (auto [sw, sh, ow, oh] :
         {std::tuple{16, 12, 5, 7}, {9, 9, 27, 27}, {21, 6, 7, 2}, {8, 8, 24, 24}}) {
        ImagePlane src = random_plane(rng, sw, sh);
        ImagePlane got = bicubic_resize(src, ow, oh);
        ImagePlane want = oracle_bicubic(src, ow, oh);
        for (size_t i = 0; i < got.size(); ++i)
            EXPECT_NEAR(got.samples[i], want.samples[i], 1e-9) << sw << "x" << sh << "->" << ow;
    }
}

TEST(Bicubic, RejectsEmptyOutput) {
    ImagePlane p(4, 4, 0.0);
    EXPECT_THROW(bicubic_resize(p, 0, 4), Error);
}

TEST(GaussianBlur, TapsMatchDefinition) {
    auto taps = gaussian_taps(1.0, 2);
    ASSERT_EQ(taps.size(), 5u);
    double raw[5];
    double total = 0.0;
    for (int k = -2; k <= 2; ++k) total += raw[k + 2] = std::exp(-0.5 * k * k);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(taps[i], raw[i] / total, 1e-12);
    double sum = 0.0;
    for (double t : taps) sum += t;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(GaussianBlur, ConstantPlaneUnchanged) {
    ImagePlane p(20, 14, 0.77);
    ImagePlane b = gaussian_blur(p, 1.0, 2);
    for (double v : b.samples) EXPECT_NEAR(v, 0.77, 1e-9);
}

TEST(GaussianBlur, ImpulseResponseIsTapOuterProduct) {
    ImagePlane p(15, 15, 0.0);
    p.at(7, 7) = 1.0;
    ImagePlane b = gaussian_blur(p, 1.0, 2);
    auto taps = gaussian_taps(1.0, 2);
    for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
            EXPECT_NEAR(b.at(7 + dy, 7 + dx), taps[dy + 2] * taps[dx + 2], 1e-12);
    EXPECT_NEAR(b.at(7, 7), taps[2] * taps[2], 1e-12);
    EXPECT_EQ(b.at(0, 0), 0.0);
}

TEST(GaussianBlur, RejectsBadParameters) {
    ImagePlane p(8, 8, 0.0);
    EXPECT_THROW(gaussian_blur(p, 0.0, 2), Error);
    EXPECT_THROW(gaussian_blur(p, 1.0, 0), Error);
}

TEST(CropToGrid, HundredByHundredAtScaleThree) {
    ImagePlane p(100, 100, 0.0);
    ImagePlane c = crop_to_grid(p, 3);
    EXPECT_EQ(c.width, 96);
    EXPECT_EQ(c.height, 96);
}

TEST(CropToGrid, CenterOffset) {
    ImagePlane p(26, 26);
    for (int y = 0; y < 26; ++y)
        for (int x = 0; x < 26; ++x) p.at(y, x) = x + 100.0 * y;
    ImagePlane c = crop_to_grid(p, 3);  // lcm(3,8)=24, offset (26-24)/2 = 1
    EXPECT_EQ(c.width, 24);
    EXPECT_EQ(c.at(0, 0), p.at(1, 1));
    EXPECT_EQ(c.at(23, 23), p.at(24, 24));
}

TEST(Degrade, ConstantPlaneSurvives) {
    DegradeConfig cfg;
    ImagePlane p(48, 48, 0.61);
    ImagePlane d = degrade(p, cfg);
    EXPECT_EQ(d.width, 48);
    EXPECT_EQ(d.height, 48);
    for (double v : d.samples) EXPECT_NEAR(v, 0.61, 1e-9);
}

TEST(Degrade, OutputDimsMatchCroppedGroundTruth) {
    DegradeConfig cfg;
    ImagePlane p(100, 75, 0.5);
    ImagePlane d = degrade(p, cfg);
    EXPECT_EQ(d.width, 96);
    EXPECT_EQ(d.height, 72);
    EXPECT_EQ(d.width % 8, 0);
    EXPECT_EQ(d.width % cfg.scale, 0);
}

TEST(Degrade, RemovesHighFrequencyEnergy) {
    ImagePlane img = testutil::synthetic_image(5, 96, 96);
    DegradeConfig cfg;
    ImagePlane deg = degrade(img, cfg);
    double err = 0.0;
    for (size_t i = 0; i < img.size(); ++i) {
        double diff = img.samples[i] - deg.samples[i];
        err += diff * diff;
    }
    EXPECT_GT(err / img.size(), 1e-5);  // detail was actually lost
}

TEST(Degrade, TooSmallImageThrows) {
    ImagePlane p(16, 16, 0.0);  // smaller than one lcm(3,8) grid step
    EXPECT_THROW(degrade(p, DegradeConfig{}), Error);
}

}  // namespace
