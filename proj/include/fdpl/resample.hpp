#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "fdpl/core.hpp"

namespace fdpl {

// Degradation protocol: bicubic downsample by `scale`, Gaussian blur, bicubic
// upsample back. Defaults follow the x3 / sigma 1 experimental setup.
struct DegradeConfig {
    int scale = 3;
    double blur_sigma = 1.0;
    int blur_kernel_radius = 2;

    void validate() const {
        if (scale < 2) throw Error("degrade: scale must be >= 2");
        if (!(blur_sigma > 0.0)) throw Error("degrade: blur_sigma must be > 0");
        if (blur_kernel_radius < 1) throw Error("degrade: blur_kernel_radius must be >= 1");
    }
};

namespace detail {

// Keys cubic convolution kernel, a = -0.5.
inline double keys_weight(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

struct TapSet {
    int idx[4];
    double w[4];
};

// Per-output-coordinate source taps under half-pixel-center mapping with
// edge clamp. Kernel weights at any phase sum to 1.
inline std::vector<TapSet> bicubic_taps(int src_n, int dst_n) {
    std::vector<TapSet> taps(dst_n);
    const double step = static_cast<double>(src_n) / dst_n;
    for (int i = 0; i < dst_n; ++i) {
        double x = (i + 0.5) * step - 0.5;
        int base = static_cast<int>(std::floor(x));
        double frac = x - base;
        for (int t = 0; t < 4; ++t) {
            int src = base - 1 + t;
            taps[i].idx[t] = std::clamp(src, 0, src_n - 1);
            taps[i].w[t] = keys_weight(frac - (t - 1));
        }
    }
    return taps;
}

}  // namespace detail

// Separable cubic-convolution resampling (Keys a = -0.5), half-pixel-center
// coordinate mapping, edge clamp.
inline ImagePlane bicubic_resize(const ImagePlane& plane, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw Error("bicubic_resize: output dims must be >= 1");
    const auto col_taps = detail::bicubic_taps(plane.width, out_w);
    const auto row_taps = detail::bicubic_taps(plane.height, out_h);

    // horizontal pass
    ImagePlane mid(out_w, plane.height);
    for (int y = 0; y < plane.height; ++y) {
        const double* src = &plane.samples[static_cast<size_t>(y) * plane.width];
        double* dst = &mid.samples[static_cast<size_t>(y) * out_w];
        for (int x = 0; x < out_w; ++x) {
            const auto& t = col_taps[x];
            dst[x] = t.w[0] * src[t.idx[0]] + t.w[1] * src[t.idx[1]] + t.w[2] * src[t.idx[2]] +
                     t.w[3] * src[t.idx[3]];
        }
    }
    // vertical pass
    ImagePlane out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const auto& t = row_taps[y];
        const double* r0 = &mid.samples[static_cast<size_t>(t.idx[0]) * out_w];
        const double* r1 = &mid.samples[static_cast<size_t>(t.idx[1]) * out_w];
        const double* r2 = &mid.samples[static_cast<size_t>(t.idx[2]) * out_w];
        const double* r3 = &mid.samples[static_cast<size_t>(t.idx[3]) * out_w];
        double* dst = &out.samples[static_cast<size_t>(y) * out_w];
        for (int x = 0; x < out_w; ++x)
            dst[x] = t.w[0] * r0[x] + t.w[1] * r1[x] + t.w[2] * r2[x] + t.w[3] * r3[x];
    }
    return out;
}

// Discretely sampled Gaussian taps over [-radius, radius], renormalized to
// sum 1 so truncation cannot shift constants.
inline std::vector<double> gaussian_taps(double sigma, int radius) {
    if (!(sigma > 0.0)) throw Error("gaussian_blur: sigma must be > 0");
    if (radius < 1) throw Error("gaussian_blur: radius must be >= 1");
    std::vector<double> taps(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k)
        taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    double total = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& w : taps) w /= total;
    return taps;
}

// Separable Gaussian blur with replicate-border handling.
inline ImagePlane gaussian_blur(const ImagePlane& plane, double sigma, int radius) {
    const auto taps = gaussian_taps(sigma, radius);
    ImagePlane mid(plane.width, plane.height);
    for (int y = 0; y < plane.height; ++y)
        for (int x = 0; x < plane.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += taps[k + radius] * plane.at(y, std::clamp(x + k, 0, plane.width - 1));
            mid.at(y, x) = acc;
        }
    ImagePlane out(plane.width, plane.height);
    for (int y = 0; y < plane.height; ++y)
        for (int x = 0; x < plane.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += taps[k + radius] * mid.at(std::clamp(y + k, 0, plane.height - 1), x);
            out.at(y, x) = acc;
        }
    return out;
}

// Largest center crop whose dims are divisible by both `scale` and 8, so the
// degraded/ground-truth pair stays aligned for blockwise losses.
inline ImagePlane crop_to_grid(const ImagePlane& plane, int scale) {
    int grid = std::lcm(scale, 8);
    int cw = plane.width / grid * grid;
    int ch = plane.height / grid * grid;
    if (cw < 1 || ch < 1)
        throw Error("crop_to_grid: image " + std::to_string(plane.width) + "x" +
                    std::to_string(plane.height) + " smaller than one " + std::to_string(grid) +
                    "-pixel grid step");
    int ox = (plane.width - cw) / 2;
    int oy = (plane.height - ch) / 2;
    ImagePlane out(cw, ch);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x) out.at(y, x) = plane.at(y + oy, x + ox);
    return out;
}

// Full degradation: center-crop to the loss-aligned grid, downsample by the
// super-resolution factor, blur, upsample back. Output dims equal the
// cropped ground truth's.
inline ImagePlane degrade(const ImagePlane& plane, const DegradeConfig& cfg) {
    cfg.validate();
    ImagePlane cropped = crop_to_grid(plane, cfg.scale);
    ImagePlane low = bicubic_resize(cropped, cropped.width / cfg.scale, cropped.height / cfg.scale);
    ImagePlane blurred = gaussian_blur(low, cfg.blur_sigma, cfg.blur_kernel_radius);
    return bicubic_resize(blurred, cropped.width, cropped.height);
}

}  // namespace fdpl
