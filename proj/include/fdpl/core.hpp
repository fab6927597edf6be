#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fdpl {

// Raised for invalid inputs and file-level failures. The CLI maps it to
// exit code 2; anything else is treated as an internal error (exit 1).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Single-channel plane of real-valued samples, row-major. Nominal range is
// [0,1]; values may drift outside that inside the model pipeline and are
// clamped only at file boundaries.
struct ImagePlane {
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    ImagePlane() = default;
    ImagePlane(int w, int h, double fill = 0.0)
        : width(w), height(h), samples(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw Error("ImagePlane: dimensions must be >= 1");
    }

    double& at(int y, int x) { return samples[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return samples[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return samples.size(); }
};

// Interleaved r,g,b triples in [0,1], row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // 3 * width * height

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, 0.0) {
        if (w < 1 || h < 1) throw Error("RgbImage: dimensions must be >= 1");
    }

    double* px(int y, int x) { return &pixels[(static_cast<size_t>(y) * width + x) * 3]; }
    const double* px(int y, int x) const { return &pixels[(static_cast<size_t>(y) * width + x) * 3]; }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline ImagePlane clamp_plane(ImagePlane p) {
    for (double& v : p.samples) v = clamp01(v);
    return p;
}

inline void require_same_dims(const ImagePlane& a, const ImagePlane& b, const char* what) {
    if (a.width != b.width || a.height != b.height)
        throw Error(std::string(what) + ": dimension mismatch (" + std::to_string(a.width) + "x" +
                    std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                    std::to_string(b.height) + ")");
}

// Worker-thread cap: FDPL_THREADS if set, hardware concurrency otherwise.
inline int thread_count() {
    static const int cached = [] {
        if (const char* env = std::getenv("FDPL_THREADS")) {
            int n = std::atoi(env);
            if (n >= 1) return n;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }();
    return cached;
}

}  // namespace fdpl
