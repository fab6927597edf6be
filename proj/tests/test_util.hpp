#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <utility>

#include "fdpl/core.hpp"
#include "fdpl/dct.hpp"
#include "fdpl/rng.hpp"

namespace testutil {

// Naive O(64^2) evaluation of the orthonormal 2D DCT-II definition; the
// correctness reference for the separable implementation.
inline fdpl::CoeffBlock naive_dct(const fdpl::Block8& x) {
    const double pi = 3.14159265358979323846;
    auto alpha = [&](int t) { return t == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0); };
    fdpl::CoeffBlock out;
    for (int j = 0; j < 8; ++j)
        for (int k = 0; k < 8; ++k) {
            double acc = 0.0;
            for (int m = 0; m < 8; ++m)
                for (int n = 0; n < 8; ++n)
                    acc += x.at(m, n) * std::cos(pi * j * (2 * m + 1) / 16.0) *
                           std::cos(pi * k * (2 * n + 1) / 16.0);
            out.at(j, k) = alpha(j) * alpha(k) * acc;
        }
    return out;
}

inline fdpl::Block8 naive_idct(const fdpl::CoeffBlock& c) {
    const double pi = 3.14159265358979323846;
    auto alpha = [&](int t) { return t == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0); };
    fdpl::Block8 out;
    for (int m = 0; m < 8; ++m)
        for (int n = 0; n < 8; ++n) {
            double acc = 0.0;
            for (int j = 0; j < 8; ++j)
                for (int k = 0; k < 8; ++k)
                    acc += alpha(j) * alpha(k) * c.at(j, k) * std::cos(pi * j * (2 * m + 1) / 16.0) *
                           std::cos(pi * k * (2 * n + 1) / 16.0);
            out.at(m, n) = acc;
        }
    return out;
}

inline fdpl::Block8 random_block(fdpl::Rng& rng, double lo = 0.0, double hi = 1.0) {
    fdpl::Block8 b;
    for (double& v : b.s) v = lo + (hi - lo) * rng.u01();
    return b;
}

inline fdpl::ImagePlane random_plane(fdpl::Rng& rng, int w, int h, double lo = 0.0, double hi = 1.0) {
    fdpl::ImagePlane p(w, h);
    for (double& v : p.samples) v = lo + (hi - lo) * rng.u01();
    return p;
}

// Natural-looking synthetic test image: smooth background, oriented
// sinusoidal textures, and sharp-edged shapes, so degradation actually
// removes mid/high frequencies the way it does on photographs.
inline fdpl::ImagePlane synthetic_image(uint64_t seed, int w, int h) {
    fdpl::Rng rng(seed);
    fdpl::ImagePlane img(w, h);
    const double pi = 3.14159265358979323846;

    double gx = 0.2 + 0.6 * rng.u01(), gy = 0.2 + 0.6 * rng.u01();
    struct Wave {
        double fx, fy, phase, amp;
    };
    Wave waves[5];
    for (auto& wv : waves) {
        double freq = 0.04 + 0.38 * rng.u01();  // cycles per pixel
        double theta = 2.0 * pi * rng.u01();
        wv = {freq * std::cos(theta), freq * std::sin(theta), 2.0 * pi * rng.u01(),
              0.03 + 0.10 * rng.u01()};
    }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = 0.45 + 0.25 * std::sin(pi * (gx * x / w + gy * y / h));
            for (const auto& wv : waves)
                v += wv.amp * std::sin(2.0 * pi * (wv.fx * x + wv.fy * y) + wv.phase);
            img.at(y, x) = v;
        }

    int shapes = 4 + static_cast<int>(rng.below(5));
    for (int s = 0; s < shapes; ++s) {
        int cx = static_cast<int>(rng.below(static_cast<uint64_t>(w)));
        int cy = static_cast<int>(rng.below(static_cast<uint64_t>(h)));
        int rad = 3 + static_cast<int>(rng.below(static_cast<uint64_t>(std::max(4, w / 6))));
        double level = 0.1 + 0.8 * rng.u01();
        bool disk = rng.u01() < 0.5;
        for (int y = std::max(0, cy - rad); y < std::min(h, cy + rad); ++y)
            for (int x = std::max(0, cx - rad); x < std::min(w, cx + rad); ++x) {
                if (disk && (x - cx) * (x - cx) + (y - cy) * (y - cy) > rad * rad) continue;
                img.at(y, x) = level;
            }
    }
    for (double& v : img.samples) v = 0.02 + 0.96 * fdpl::clamp01(v);
    return img;
}

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            auto candidate = base / ("fdpl_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                break;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& child = "") const {
        return child.empty() ? path_.string() : (path_ / child).string();
    }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
