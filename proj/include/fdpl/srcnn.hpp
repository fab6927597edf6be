#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fdpl/core.hpp"
#include "fdpl/rng.hpp"
#include "fdpl/serialize.hpp"

namespace fdpl {

// One convolution layer: float32 parameters (the checkpoint wire type), odd
// square kernels, per-layer SGD learning rate.
struct ConvLayer {
    int out_ch = 0;
    int in_ch = 0;
    int k = 0;
    std::vector<float> weights;  // [out][in][ky][kx]
    std::vector<float> biases;   // [out]
    double learning_rate = 0.0;

    ConvLayer() = default;
    ConvLayer(int out, int in, int kernel, double lr)
        : out_ch(out),
          in_ch(in),
          k(kernel),
          weights(static_cast<size_t>(out) * in * kernel * kernel, 0.0f),
          biases(out, 0.0f),
          learning_rate(lr) {
        if (kernel % 2 == 0) throw Error("ConvLayer: kernel size must be odd");
    }

    size_t weight_count() const { return weights.size(); }
    float* kernel_at(int o, int c) { return &weights[(static_cast<size_t>(o) * in_ch + c) * k * k]; }
    const float* kernel_at(int o, int c) const {
        return &weights[(static_cast<size_t>(o) * in_ch + c) * k * k];
    }
};

// Three-layer SRCNN: 1 -> f1 (9x9) -> f2 (1x1) -> 1 (5x5), ReLU after the
// first two layers, identity after the last, same-padding throughout.
struct SrcnnModel {
    std::array<ConvLayer, 3> layers;

    size_t param_count() const {
        size_t n = 0;
        for (const auto& l : layers) n += l.weight_count() + l.biases.size();
        return n;
    }
};

inline SrcnnModel make_srcnn(int f1 = 64, int f2 = 32) {
    SrcnnModel m;
    m.layers[0] = ConvLayer(f1, 1, 9, 1e-4);
    m.layers[1] = ConvLayer(f2, f1, 1, 1e-4);
    m.layers[2] = ConvLayer(1, f2, 5, 1e-5);
    return m;
}

// Multi-channel activation tensor, channel-major planes.
struct FeatureMap {
    int ch = 0, h = 0, w = 0;
    std::vector<double> v;

    FeatureMap() = default;
    FeatureMap(int c, int hh, int ww) : ch(c), h(hh), w(ww), v(static_cast<size_t>(c) * hh * ww) {}

    double* plane(int c) { return &v[static_cast<size_t>(c) * h * w]; }
    const double* plane(int c) const { return &v[static_cast<size_t>(c) * h * w]; }
};

namespace detail {

// Same-padding cross-correlation; per-output-pixel summation order is fixed,
// so results do not depend on thread count.
inline void conv_forward(const FeatureMap& in, const ConvLayer& layer, FeatureMap& out) {
    out = FeatureMap(layer.out_ch, in.h, in.w);
    const int r = layer.k / 2;
    const int H = in.h, W = in.w;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (layer.out_ch > 1)
#endif
    for (int o = 0; o < layer.out_ch; ++o) {
        double* dst = out.plane(o);
        const double bias = layer.biases[o];
        for (size_t i = 0; i < static_cast<size_t>(H) * W; ++i) dst[i] = bias;
        for (int c = 0; c < layer.in_ch; ++c) {
            const double* src = in.plane(c);
            const float* ker = layer.kernel_at(o, c);
            for (int y = 0; y < H; ++y) {
                const int ky0 = std::max(-r, -y), ky1 = std::min(r, H - 1 - y);
                double* drow = dst + static_cast<size_t>(y) * W;
                for (int x = 0; x < W; ++x) {
                    const int kx0 = std::max(-r, -x), kx1 = std::min(r, W - 1 - x);
                    double acc = 0.0;
                    for (int ky = ky0; ky <= ky1; ++ky) {
                        const double* srow = src + static_cast<size_t>(y + ky) * W + x;
                        const float* krow = ker + (ky + r) * layer.k + r;
                        for (int kx = kx0; kx <= kx1; ++kx) acc += krow[kx] * srow[kx];
                    }
                    drow[x] += acc;
                }
            }
        }
    }
}

inline void relu(const FeatureMap& in, FeatureMap& out) {
    out = FeatureMap(in.ch, in.h, in.w);
    for (size_t i = 0; i < in.v.size(); ++i) out.v[i] = in.v[i] > 0.0 ? in.v[i] : 0.0;
}

}  // namespace detail

// Pre-activation tensors retained for backprop.
struct ForwardCache {
    FeatureMap input;  // 1 channel
    FeatureMap pre1;
    FeatureMap pre2;
};

inline ImagePlane forward(const SrcnnModel& model, const ImagePlane& input,
                          ForwardCache* cache = nullptr) {
    FeatureMap x(1, input.height, input.width);
    std::memcpy(x.v.data(), input.samples.data(), input.size() * sizeof(double));

    FeatureMap pre1, act1, pre2, act2, pre3;
    detail::conv_forward(x, model.layers[0], pre1);
    detail::relu(pre1, act1);
    detail::conv_forward(act1, model.layers[1], pre2);
    detail::relu(pre2, act2);
    detail::conv_forward(act2, model.layers[2], pre3);

    if (cache) {
        cache->input = std::move(x);
        cache->pre1 = std::move(pre1);
        cache->pre2 = std::move(pre2);
    }
    ImagePlane out(input.width, input.height);
    std::memcpy(out.samples.data(), pre3.v.data(), out.size() * sizeof(double));
    return out;
}

// Per-layer parameter gradients, double precision.
struct LayerGrads {
    std::vector<double> dw;
    std::vector<double> db;
};

struct SrcnnGrads {
    std::array<LayerGrads, 3> layers;

    static SrcnnGrads zeros_like(const SrcnnModel& m) {
        SrcnnGrads g;
        for (int i = 0; i < 3; ++i) {
            g.layers[i].dw.assign(m.layers[i].weight_count(), 0.0);
            g.layers[i].db.assign(m.layers[i].biases.size(), 0.0);
        }
        return g;
    }

    void add_scaled(const SrcnnGrads& other, double s) {
        for (int i = 0; i < 3; ++i) {
            for (size_t j = 0; j < layers[i].dw.size(); ++j) layers[i].dw[j] += s * other.layers[i].dw[j];
            for (size_t j = 0; j < layers[i].db.size(); ++j) layers[i].db[j] += s * other.layers[i].db[j];
        }
    }
};

namespace detail {

inline void conv_param_grads(const FeatureMap& in, const FeatureMap& grad_out,
                             const ConvLayer& layer, LayerGrads& grads) {
    grads.dw.assign(layer.weight_count(), 0.0);
    grads.db.assign(layer.biases.size(), 0.0);
    const int r = layer.k / 2;
    const int H = in.h, W = in.w;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (layer.out_ch > 1)
#endif
    for (int o = 0; o < layer.out_ch; ++o) {
        const double* gout = grad_out.plane(o);
        double acc_b = 0.0;
        for (size_t i = 0; i < static_cast<size_t>(H) * W; ++i) acc_b += gout[i];
        grads.db[o] = acc_b;
        for (int c = 0; c < layer.in_ch; ++c) {
            const double* src = in.plane(c);
            double* dker = &grads.dw[(static_cast<size_t>(o) * layer.in_ch + c) * layer.k * layer.k];
            for (int ky = -r; ky <= r; ++ky)
                for (int kx = -r; kx <= r; ++kx) {
                    const int y0 = std::max(0, -ky), y1 = H - 1 - std::max(0, ky);
                    const int x0 = std::max(0, -kx), x1 = W - 1 - std::max(0, kx);
                    double acc = 0.0;
                    for (int y = y0; y <= y1; ++y) {
                        const double* grow = gout + static_cast<size_t>(y) * W;
                        const double* srow = src + static_cast<size_t>(y + ky) * W + kx;
                        for (int x = x0; x <= x1; ++x) acc += grow[x] * srow[x];
                    }
                    dker[(ky + r) * layer.k + (kx + r)] = acc;
                }
        }
    }
}

// Gradient w.r.t. the layer input: correlation of grad_out with the kernel
// reflected through its center.
inline void conv_input_grad(const FeatureMap& grad_out, const ConvLayer& layer, FeatureMap& grad_in) {
    grad_in = FeatureMap(layer.in_ch, grad_out.h, grad_out.w);
    const int r = layer.k / 2;
    const int H = grad_out.h, W = grad_out.w;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (layer.in_ch > 1)
#endif
    for (int c = 0; c < layer.in_ch; ++c) {
        double* dst = grad_in.plane(c);
        std::memset(dst, 0, static_cast<size_t>(H) * W * sizeof(double));
        for (int o = 0; o < layer.out_ch; ++o) {
            const double* gout = grad_out.plane(o);
            const float* ker = layer.kernel_at(o, c);
            for (int y = 0; y < H; ++y) {
                const int ky0 = std::max(-r, y - (H - 1)), ky1 = std::min(r, y);
                double* drow = dst + static_cast<size_t>(y) * W;
                for (int x = 0; x < W; ++x) {
                    const int kx0 = std::max(-r, x - (W - 1)), kx1 = std::min(r, x);
                    double acc = 0.0;
                    for (int ky = ky0; ky <= ky1; ++ky) {
                        const double* grow = gout + static_cast<size_t>(y - ky) * W + x;
                        const float* krow = ker + (ky + r) * layer.k + r;
                        for (int kx = kx0; kx <= kx1; ++kx) acc += krow[kx] * grow[-kx];
                    }
                    drow[x] += acc;
                }
            }
        }
    }
}

inline void relu_gate(const FeatureMap& pre, FeatureMap& grad) {
    // Subgradient 0 at exactly 0.
    for (size_t i = 0; i < pre.v.size(); ++i)
        if (!(pre.v[i] > 0.0)) grad.v[i] = 0.0;
}

}  // namespace detail

// Backprop through the three layers. grad_output is dLoss/d(model output);
// the input gradient is computed only when requested.
inline SrcnnGrads backward(const SrcnnModel& model, const ForwardCache& cache,
                           const ImagePlane& grad_output, ImagePlane* input_grad = nullptr) {
    if (grad_output.height != cache.input.h || grad_output.width != cache.input.w)
        throw Error("backward: grad_output does not match cached forward dims");

    SrcnnGrads grads;
    FeatureMap g3(1, grad_output.height, grad_output.width);
    std::memcpy(g3.v.data(), grad_output.samples.data(), grad_output.size() * sizeof(double));

    FeatureMap act1, act2;
    detail::relu(cache.pre1, act1);
    detail::relu(cache.pre2, act2);

    detail::conv_param_grads(act2, g3, model.layers[2], grads.layers[2]);
    FeatureMap g2;
    detail::conv_input_grad(g3, model.layers[2], g2);
    detail::relu_gate(cache.pre2, g2);

    detail::conv_param_grads(act1, g2, model.layers[1], grads.layers[1]);
    FeatureMap g1;
    detail::conv_input_grad(g2, model.layers[1], g1);
    detail::relu_gate(cache.pre1, g1);

    detail::conv_param_grads(cache.input, g1, model.layers[0], grads.layers[0]);

    if (input_grad) {
        FeatureMap g0;
        detail::conv_input_grad(g1, model.layers[0], g0);
        *input_grad = ImagePlane(grad_output.width, grad_output.height);
        std::memcpy(input_grad->samples.data(), g0.v.data(), g0.v.size() * sizeof(double));
    }
    return grads;
}

// Plain SGD: w <- w - lr * g with each layer's own learning rate; biases use
// their layer's rate. lr_scale is a global multiplier for small-budget runs.
inline void sgd_step(SrcnnModel& model, const SrcnnGrads& grads, double lr_scale = 1.0) {
    for (int i = 0; i < 3; ++i) {
        auto& layer = model.layers[i];
        const auto& g = grads.layers[i];
        if (g.dw.size() != layer.weight_count() || g.db.size() != layer.biases.size())
            throw Error("sgd_step: gradient shape mismatch");
        const double lr = layer.learning_rate * lr_scale;
        for (size_t j = 0; j < layer.weights.size(); ++j)
            layer.weights[j] = static_cast<float>(layer.weights[j] - lr * g.dw[j]);
        for (size_t j = 0; j < layer.biases.size(); ++j)
            layer.biases[j] = static_cast<float>(layer.biases[j] - lr * g.db[j]);
    }
}

// Gaussian init, std 0.001, biases 0. Draw order is pinned (layer by layer,
// weights then biases) so a seed fully determines the model.
inline void init_gaussian(SrcnnModel& model, uint64_t seed, double stddev = 0.001) {
    Rng rng(seed);
    for (auto& layer : model.layers) {
        for (auto& w : layer.weights) w = static_cast<float>(rng.normal() * stddev);
        for (auto& b : layer.biases) b = 0.0f;
    }
}

// Exact pass-through: channel 0 carries ReLU(x), channel 1 carries ReLU(-x),
// and the last layer recombines them as x. Identity holds for all real
// inputs, including bicubic under/overshoot.
inline void make_identity(SrcnnModel& model) {
    for (auto& layer : model.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0f);
        std::fill(layer.biases.begin(), layer.biases.end(), 0.0f);
    }
    auto& l1 = model.layers[0];
    auto& l2 = model.layers[1];
    auto& l3 = model.layers[2];
    if (l1.out_ch < 2 || l2.out_ch < 2) throw Error("make_identity: needs >= 2 hidden channels");
    const int c1 = l1.k / 2 * l1.k + l1.k / 2;
    l1.kernel_at(0, 0)[c1] = 1.0f;
    l1.kernel_at(1, 0)[c1] = -1.0f;
    l2.kernel_at(0, 0)[0] = 1.0f;
    l2.kernel_at(1, 1)[0] = 1.0f;
    const int c3 = l3.k / 2 * l3.k + l3.k / 2;
    l3.kernel_at(0, 0)[c3] = 1.0f;
    l3.kernel_at(0, 1)[c3] = -1.0f;
}

// Identity pass-through plus Gaussian noise on all remaining parameters:
// starts at the bicubic baseline while seeding symmetry-broken features.
inline void init_identity_plus_noise(SrcnnModel& model, uint64_t seed, double stddev = 0.001) {
    init_gaussian(model, seed, stddev);
    auto& l1 = model.layers[0];
    auto& l2 = model.layers[1];
    auto& l3 = model.layers[2];
    if (l1.out_ch < 2 || l2.out_ch < 2) throw Error("init_identity_plus_noise: needs >= 2 hidden channels");
    const int c1 = l1.k / 2 * l1.k + l1.k / 2;
    std::fill_n(l1.kernel_at(0, 0), l1.k * l1.k, 0.0f);
    std::fill_n(l1.kernel_at(1, 0), l1.k * l1.k, 0.0f);
    l1.kernel_at(0, 0)[c1] = 1.0f;
    l1.kernel_at(1, 0)[c1] = -1.0f;
    for (int c = 0; c < 2; ++c)
        for (int o = 0; o < l2.out_ch; ++o) l2.kernel_at(o, c)[0] = 0.0f;
    l2.kernel_at(0, 0)[0] = 1.0f;
    l2.kernel_at(1, 1)[0] = 1.0f;
    const int c3 = l3.k / 2 * l3.k + l3.k / 2;
    std::fill_n(l3.kernel_at(0, 0), l3.k * l3.k, 0.0f);
    std::fill_n(l3.kernel_at(0, 1), l3.k * l3.k, 0.0f);
    l3.kernel_at(0, 0)[c3] = 1.0f;
    l3.kernel_at(0, 1)[c3] = -1.0f;
}

// --- checkpoint format: magic "SRCNN1", then per-layer out_ch/in_ch/k as
// u32 LE, then per layer weights and biases as f32 LE row-major.

inline constexpr char kCheckpointMagic[] = "SRCNN1";

inline void save_checkpoint(const SrcnnModel& model, const std::string& path) {
    std::string buf;
    buf.append(kCheckpointMagic, 6);
    for (const auto& l : model.layers) {
        detail::put_u32le(buf, static_cast<uint32_t>(l.out_ch));
        detail::put_u32le(buf, static_cast<uint32_t>(l.in_ch));
        detail::put_u32le(buf, static_cast<uint32_t>(l.k));
    }
    for (const auto& l : model.layers) {
        for (float w : l.weights) detail::put_f32le(buf, w);
        for (float b : l.biases) detail::put_f32le(buf, b);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw Error("write failed: " + path);
}

inline SrcnnModel load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open: " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < 6 || data.compare(0, 6, kCheckpointMagic) != 0)
        throw Error("bad checkpoint magic: " + path);

    detail::ByteReader rd{data, 6};
    static constexpr double kDefaultRates[3] = {1e-4, 1e-4, 1e-5};
    SrcnnModel model;
    for (int i = 0; i < 3; ++i) {
        uint32_t out = rd.u32le(), in = rd.u32le(), k = rd.u32le();
        if (out < 1 || in < 1 || k < 1 || k % 2 == 0 || out > 16384 || in > 16384 || k > 63)
            throw Error("checkpoint layer " + std::to_string(i) + " has invalid dims: " + path);
        model.layers[i] = ConvLayer(static_cast<int>(out), static_cast<int>(in), static_cast<int>(k),
                                    kDefaultRates[i]);
    }
    if (model.layers[0].in_ch != 1 || model.layers[2].out_ch != 1 ||
        model.layers[1].in_ch != model.layers[0].out_ch ||
        model.layers[2].in_ch != model.layers[1].out_ch)
        throw Error("checkpoint layer dims do not chain 1 -> f1 -> f2 -> 1: " + path);
    for (auto& l : model.layers) {
        for (float& w : l.weights) w = rd.f32le();
        for (float& b : l.biases) b = rd.f32le();
    }
    if (rd.pos != data.size()) throw Error("checkpoint has trailing bytes: " + path);
    return model;
}

}  // namespace fdpl
