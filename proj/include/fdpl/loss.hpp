#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fdpl/core.hpp"
#include "fdpl/dct.hpp"

namespace fdpl {

// 8x8 per-frequency weights. Instances: the JPEG luminance quantization
// table q, the mean relative difference matrix d, and their combination.
struct WeightMatrix {
    std::array<double, 64> w{};

    double& at(int j, int k) { return w[j * kBlock + k]; }
    double at(int j, int k) const { return w[j * kBlock + k]; }

    static WeightMatrix ones() {
        WeightMatrix m;
        m.w.fill(1.0);
        return m;
    }
};

// JPEG Annex K luminance quantization table. Larger entries mark frequencies
// JPEG deems less perceptually important.
inline WeightMatrix jpeg_luminance_qtable() {
    static constexpr std::array<double, 64> k = {
        16, 11, 10, 16, 24,  40,  51,  61,   //
        12, 12, 14, 19, 26,  58,  60,  55,   //
        14, 13, 16, 24, 40,  57,  69,  56,   //
        14, 17, 22, 29, 51,  87,  80,  62,   //
        18, 22, 37, 56, 68,  109, 103, 77,   //
        24, 35, 55, 64, 81,  104, 113, 92,   //
        49, 64, 78, 87, 103, 121, 120, 101,  //
        72, 92, 95, 98, 112, 100, 103, 99};
    WeightMatrix m;
    m.w = k;
    return m;
}

// Reflection across the anti-diagonal: out[j][k] = in[7-k][7-j]. Used by the
// FDPL-AT ablation to invert the assumed frequency-importance ordering.
inline WeightMatrix antidiagonal_transpose(const WeightMatrix& in) {
    WeightMatrix out;
    for (int j = 0; j < kBlock; ++j)
        for (int k = 0; k < kBlock; ++k) out.at(j, k) = in.at(kBlock - 1 - k, kBlock - 1 - j);
    return out;
}

struct DiffMatrixStats {
    WeightMatrix d;
    uint64_t num_blocks = 0;
    double epsilon = 0.0;
};

// Accumulates the mean relative per-frequency difference between ground
// truth and degraded planes over aligned 8x8 tiles. Accumulation order is a
// fixed sequential fold, so results are deterministic given input order.
class DiffMatrixAccumulator {
public:
    explicit DiffMatrixAccumulator(double epsilon = 1e-3) : epsilon_(epsilon) {
        if (!(epsilon > 0.0)) throw Error("diff matrix: epsilon must be > 0");
        sums_.fill(0.0);
    }

    void add_pair(const ImagePlane& gt, const ImagePlane& degraded) {
        require_same_dims(gt, degraded, "diff matrix");
        require_blockable(gt, "diff matrix");
        CoeffGrid cg = blockwise_dct(gt);
        CoeffGrid cd = blockwise_dct(degraded);
        for (size_t b = 0; b < cg.blocks.size(); ++b) {
            for (int i = 0; i < 64; ++i) {
                double g = cg.blocks[b].c[i];
                double rel = std::abs(g - cd.blocks[b].c[i]) / (std::abs(g) + epsilon_);
                sums_[i] += rel;
            }
            ++num_blocks_;
        }
    }

    // Mean over tiles, rescaled to mean(d) = 1 and floored at 1e-6 so every
    // frequency stays minimally supervised and FDPL = 0 iff planes identical.
    DiffMatrixStats finalize() const {
        if (num_blocks_ == 0) throw Error("diff matrix: no block pairs accumulated");
        DiffMatrixStats out;
        out.num_blocks = num_blocks_;
        out.epsilon = epsilon_;
        double total = 0.0;
        for (int i = 0; i < 64; ++i) {
            out.d.w[i] = sums_[i] / static_cast<double>(num_blocks_);
            total += out.d.w[i];
        }
        double mean = total / 64.0;
        if (mean > 0.0)
            for (double& v : out.d.w) v /= mean;
        for (double& v : out.d.w) v = std::max(v, 1e-6);
        return out;
    }

private:
    double epsilon_;
    std::array<double, 64> sums_{};
    uint64_t num_blocks_ = 0;
};

template <typename PairRange>
DiffMatrixStats compute_diff_matrix(const PairRange& pairs, double epsilon = 1e-3) {
    DiffMatrixAccumulator acc(epsilon);
    for (const auto& [gt, degraded] : pairs) acc.add_pair(gt, degraded);
    return acc.finalize();
}

// FDPL: mean over 8x8 blocks of the squared DCT coefficient differences
// weighted element-wise by (1/q) * d.
inline double fdpl_loss(const ImagePlane& gt, const ImagePlane& out, const WeightMatrix& q,
                        const WeightMatrix& d) {
    require_same_dims(gt, out, "fdpl_loss");
    require_blockable(gt, "fdpl_loss");
    CoeffGrid cg = blockwise_dct(gt);
    CoeffGrid co = blockwise_dct(out);
    double sum = 0.0;
    for (size_t b = 0; b < cg.blocks.size(); ++b)
        for (int i = 0; i < 64; ++i) {
            double diff = cg.blocks[b].c[i] - co.blocks[b].c[i];
            sum += diff * diff / q.w[i] * d.w[i];
        }
    return sum / static_cast<double>(cg.blocks.size());
}

// dL/d(out): the weighted coefficient residual mapped back to the pixel
// basis. The DCT is orthonormal, so the adjoint of the forward transform is
// the inverse transform.
inline ImagePlane fdpl_gradient(const ImagePlane& gt, const ImagePlane& out, const WeightMatrix& q,
                                const WeightMatrix& d) {
    require_same_dims(gt, out, "fdpl_gradient");
    require_blockable(gt, "fdpl_gradient");
    CoeffGrid cg = blockwise_dct(gt);
    CoeffGrid co = blockwise_dct(out);
    const double scale = -2.0 / static_cast<double>(cg.blocks.size());
    for (size_t b = 0; b < co.blocks.size(); ++b)
        for (int i = 0; i < 64; ++i) {
            double diff = cg.blocks[b].c[i] - co.blocks[b].c[i];
            co.blocks[b].c[i] = scale * diff / q.w[i] * d.w[i];
        }
    return blockwise_idct(co);
}

inline double mse_loss(const ImagePlane& gt, const ImagePlane& out) {
    require_same_dims(gt, out, "mse_loss");
    double sum = 0.0;
    for (size_t i = 0; i < gt.size(); ++i) {
        double diff = gt.samples[i] - out.samples[i];
        sum += diff * diff;
    }
    return sum / static_cast<double>(gt.size());
}

inline ImagePlane mse_gradient(const ImagePlane& gt, const ImagePlane& out) {
    require_same_dims(gt, out, "mse_gradient");
    ImagePlane grad(gt.width, gt.height);
    const double scale = -2.0 / static_cast<double>(gt.size());
    for (size_t i = 0; i < gt.size(); ++i)
        grad.samples[i] = scale * (gt.samples[i] - out.samples[i]);
    return grad;
}

// --- weight matrix file format: 8 lines x 8 space-separated values,
// row-major; '#' lines are comments.

inline void save_weight_matrix(const std::string& path, const WeightMatrix& m,
                               const std::vector<std::string>& header_comments = {}) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open for writing: " + path);
    for (const auto& c : header_comments) f << "# " << c << "\n";
    char buf[32];
    for (int j = 0; j < kBlock; ++j) {
        for (int k = 0; k < kBlock; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", m.at(j, k));
            f << (k ? " " : "") << buf;
        }
        f << "\n";
    }
    if (!f) throw Error("write failed: " + path);
}

inline WeightMatrix load_weight_matrix(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open: " + path);
    WeightMatrix m;
    int row = 0;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (row >= kBlock) throw Error("weight matrix file has more than 8 data rows: " + path);
        std::istringstream ss(line);
        for (int k = 0; k < kBlock; ++k)
            if (!(ss >> m.at(row, k)))
                throw Error("weight matrix row " + std::to_string(row) + " malformed in " + path);
        ++row;
    }
    if (row != kBlock) throw Error("weight matrix file has " + std::to_string(row) +
                                   " data rows, expected 8: " + path);
    for (double v : m.w)
        if (!std::isfinite(v) || v <= 0.0)
            throw Error("weight matrix entries must be finite and > 0: " + path);
    return m;
}

}  // namespace fdpl
