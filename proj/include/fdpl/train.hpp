#pragma once

#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fdpl/core.hpp"
#include "fdpl/dataset.hpp"
#include "fdpl/loss.hpp"
#include "fdpl/srcnn.hpp"

namespace fdpl {

enum class LossKind { kMse, kFdpl, kFdplAt };

inline const char* loss_kind_name(LossKind k) {
    switch (k) {
        case LossKind::kMse: return "mse";
        case LossKind::kFdpl: return "fdpl";
        case LossKind::kFdplAt: return "fdpl-at";
    }
    return "?";
}

inline std::optional<LossKind> parse_loss_kind(const std::string& s) {
    if (s == "mse") return LossKind::kMse;
    if (s == "fdpl") return LossKind::kFdpl;
    if (s == "fdpl-at" || s == "fdpl_at") return LossKind::kFdplAt;
    return std::nullopt;
}

// Pluggable training loss: value and gradient w.r.t. the model output.
struct LossFns {
    std::function<double(const ImagePlane& gt, const ImagePlane& out)> value;
    std::function<ImagePlane(const ImagePlane& gt, const ImagePlane& out)> grad;
};

// FDPL-AT reflects q across the anti-diagonal; d is shared. MSE ignores the
// weight matrices entirely.
inline LossFns make_loss(LossKind kind, const WeightMatrix& diff_matrix = WeightMatrix::ones()) {
    if (kind == LossKind::kMse)
        return {[](const ImagePlane& gt, const ImagePlane& out) { return mse_loss(gt, out); },
                [](const ImagePlane& gt, const ImagePlane& out) { return mse_gradient(gt, out); }};
    WeightMatrix q = jpeg_luminance_qtable();
    if (kind == LossKind::kFdplAt) q = antidiagonal_transpose(q);
    WeightMatrix d = diff_matrix;
    return {[q, d](const ImagePlane& gt, const ImagePlane& out) { return fdpl_loss(gt, out, q, d); },
            [q, d](const ImagePlane& gt, const ImagePlane& out) { return fdpl_gradient(gt, out, q, d); }};
}

struct TrainConfig {
    int batch_size = 128;
    long max_steps = 1;
    LossKind loss_kind = LossKind::kMse;
    uint64_t seed = 0;
    long eval_every = 0;        // 0 = never
    long checkpoint_every = 0;  // 0 = final only
    double lr_scale = 1.0;      // global multiplier over the per-layer rates

    void validate() const {
        if (batch_size < 1) throw Error("train: batch_size must be >= 1");
        if (max_steps < 1) throw Error("train: max_steps must be >= 1");
        if (!(lr_scale > 0.0)) throw Error("train: lr_scale must be > 0");
    }
};

struct MetricsRow {
    long step = 0;
    double train_loss = 0.0;
    std::optional<double> eval_psnr;
};

// Metrics log: CSV with columns step, train_loss, eval_psnr (empty when not
// evaluated). Values use max round-trip precision so identical runs produce
// byte-identical files.
inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "step,train_loss,eval_psnr\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,", r.step, r.train_loss);
        out += buf;
        if (r.eval_psnr) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.eval_psnr);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

// Mini-batch SGD. The batch gradient is the mean of per-patch gradients;
// per-patch passes may run in parallel but are reduced in batch order, so
// results are bit-identical for any thread count.
inline std::vector<MetricsRow> train(
    SrcnnModel& model, const std::vector<PatchPair>& corpus, const TrainConfig& cfg,
    const LossFns& loss, const std::function<double(const SrcnnModel&)>& eval_fn = nullptr,
    const std::function<void(const SrcnnModel&, long)>& checkpoint_fn = nullptr) {
    cfg.validate();
    if (corpus.empty()) throw Error("train: dataset is empty");
    if (!loss.value || !loss.grad) throw Error("train: loss functions not set");

    BatchStream stream(corpus.size(), cfg.batch_size, derive_seed(cfg.seed, "shuffle"));
    std::vector<MetricsRow> log;
    log.reserve(static_cast<size_t>(cfg.max_steps));

    std::vector<SrcnnGrads> example_grads;
    std::vector<double> example_losses;
    for (long step = 1; step <= cfg.max_steps; ++step) {
        const auto& batch = stream.next_batch();
        const int bsz = static_cast<int>(batch.size());
        example_grads.resize(bsz);
        example_losses.assign(bsz, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
#endif
        for (int i = 0; i < bsz; ++i) {
            const PatchPair& pair = corpus[batch[i]];
            ForwardCache cache;
            ImagePlane out = forward(model, pair.input, &cache);
            example_losses[i] = loss.value(pair.target, out);
            ImagePlane grad_out = loss.grad(pair.target, out);
            example_grads[i] = backward(model, cache, grad_out);
        }

        SrcnnGrads mean_grads = SrcnnGrads::zeros_like(model);
        const double inv_b = 1.0 / bsz;
        for (int i = 0; i < bsz; ++i) mean_grads.add_scaled(example_grads[i], inv_b);
        double mean_loss = 0.0;
        for (int i = 0; i < bsz; ++i) mean_loss += example_losses[i];
        mean_loss *= inv_b;

        sgd_step(model, mean_grads, cfg.lr_scale);

        MetricsRow row;
        row.step = step;
        row.train_loss = mean_loss;
        if (eval_fn && cfg.eval_every > 0 && step % cfg.eval_every == 0)
            row.eval_psnr = eval_fn(model);
        log.push_back(row);

        if (checkpoint_fn && cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0)
            checkpoint_fn(model, step);
    }
    return log;
}

}  // namespace fdpl
