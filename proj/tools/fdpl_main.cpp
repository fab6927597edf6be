// fdpl: frequency-domain perceptual loss workbench for single-image super
// resolution. Subcommands: prepare, diff-matrix, train, eval, sr.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "fdpl/dataset.hpp"
#include "fdpl/image_io.hpp"
#include "fdpl/loss.hpp"
#include "fdpl/metrics.hpp"
#include "fdpl/resample.hpp"
#include "fdpl/srcnn.hpp"
#include "fdpl/train.hpp"

namespace fs = std::filesystem;

namespace {

struct DegradeFlags {
    int scale = 3;
    double blur_sigma = 1.0;
    int blur_radius = 2;

    void attach(CLI::App* cmd) {
        cmd->add_option("--scale", scale, "Super-resolution factor")->capture_default_str();
        cmd->add_option("--blur-sigma", blur_sigma, "Gaussian blur stddev (pixels)")
            ->capture_default_str();
        cmd->add_option("--blur-radius", blur_radius, "Gaussian kernel radius (taps = 2r+1)")
            ->capture_default_str();
    }
    fdpl::DegradeConfig config() const {
        fdpl::DegradeConfig cfg{scale, blur_sigma, blur_radius};
        cfg.validate();
        return cfg;
    }
};

int run_prepare(const std::string& image_dir, const std::string& out_dir,
                const DegradeFlags& deg, uint64_t seed) {
    auto manifest =
        fdpl::prepare_corpus(image_dir, deg.config(), out_dir, seed, nullptr, &std::cerr);
    std::cout << "patches: " << manifest.entries.size() << "\n";
    std::cout << "images: " << manifest.images_used << " used, " << manifest.images_skipped
              << " skipped\n";
    std::cout << "wrote " << (fs::path(out_dir) / "patches.bin").string() << " and "
              << (fs::path(out_dir) / "manifest.txt").string() << "\n";
    return 0;
}

int run_diff_matrix(const std::string& image_dir, const std::string& out_path,
                    const DegradeFlags& deg, double epsilon) {
    auto cfg = deg.config();
    auto files = fdpl::list_png_files(image_dir);
    if (files.empty()) throw fdpl::Error("no PNG images in: " + image_dir);
    fdpl::DiffMatrixAccumulator acc(epsilon);
    int used = 0;
    for (const auto& file : files) {
        fdpl::ImagePlane gt;
        try {
            gt = fdpl::crop_to_grid(fdpl::load_luminance(file), cfg.scale);
        } catch (const fdpl::Error& e) {
            std::cerr << "warning: skipping " << file << ": " << e.what() << "\n";
            continue;
        }
        acc.add_pair(gt, fdpl::degrade(gt, cfg));
        ++used;
    }
    if (used == 0) throw fdpl::Error("no readable PNG images in: " + image_dir);
    auto stats = acc.finalize();
    fdpl::save_weight_matrix(out_path, stats.d,
                             {"mean relative difference matrix",
                              "num_blocks=" + std::to_string(stats.num_blocks) +
                                  " epsilon=" + std::to_string(stats.epsilon),
                              "images=" + std::to_string(used) +
                                  " scale=" + std::to_string(cfg.scale)});
    std::cout << "accumulated " << stats.num_blocks << " block pairs from " << used
              << " images -> " << out_path << "\n";
    return 0;
}

int run_train(const std::string& corpus_path, const std::string& out_dir, const std::string& loss_name,
              long steps, int batch_size, uint64_t seed, const std::string& diff_matrix_path,
              const std::string& eval_dir, long eval_every, long checkpoint_every, double lr_scale,
              const std::string& init_kind, const DegradeFlags& deg) {
    auto kind = fdpl::parse_loss_kind(loss_name);
    if (!kind) throw fdpl::Error("unknown loss '" + loss_name + "' (want mse, fdpl, or fdpl-at)");

    fdpl::WeightMatrix d = fdpl::WeightMatrix::ones();
    if (*kind != fdpl::LossKind::kMse) {
        if (diff_matrix_path.empty())
            throw fdpl::Error("loss '" + loss_name +
                              "' needs --diff-matrix FILE; generate one with: fdpl diff-matrix "
                              "--images <train images> --out d.txt");
        d = fdpl::load_weight_matrix(diff_matrix_path);
    }

    std::string patch_file = corpus_path;
    if (fs::is_directory(corpus_path)) patch_file = (fs::path(corpus_path) / "patches.bin").string();
    auto corpus = fdpl::load_patch_file(patch_file);
    if (corpus.empty()) throw fdpl::Error("corpus has no patches: " + patch_file);

    fdpl::SrcnnModel model = fdpl::make_srcnn();
    uint64_t init_seed = fdpl::derive_seed(seed, "init");
    if (init_kind == "gaussian")
        fdpl::init_gaussian(model, init_seed);
    else if (init_kind == "identity")
        fdpl::init_identity_plus_noise(model, init_seed);
    else
        throw fdpl::Error("unknown init '" + init_kind + "' (want gaussian or identity)");

    fdpl::TrainConfig cfg;
    cfg.batch_size = batch_size;
    cfg.max_steps = steps;
    cfg.loss_kind = *kind;
    cfg.seed = seed;
    cfg.eval_every = eval_every;
    cfg.checkpoint_every = checkpoint_every;
    cfg.lr_scale = lr_scale;

    fs::create_directories(out_dir);
    std::function<double(const fdpl::SrcnnModel&)> eval_fn;
    if (!eval_dir.empty()) {
        auto dcfg = deg.config();
        eval_fn = [eval_dir, dcfg](const fdpl::SrcnnModel& m) {
            return fdpl::evaluate_set(&m, eval_dir, dcfg).mean_psnr;
        };
    }
    auto checkpoint_fn = [&out_dir](const fdpl::SrcnnModel& m, long step) {
        fdpl::save_checkpoint(m, (fs::path(out_dir) / ("model_step" + std::to_string(step) + ".srcnn"))
                                     .string());
    };

    auto log = fdpl::train(model, corpus, cfg, fdpl::make_loss(*kind, d), eval_fn, checkpoint_fn);

    std::string model_path = (fs::path(out_dir) / "model.srcnn").string();
    fdpl::save_checkpoint(model, model_path);
    std::string csv_path = (fs::path(out_dir) / "metrics.csv").string();
    std::ofstream csv(csv_path);
    if (!csv) throw fdpl::Error("cannot open for writing: " + csv_path);
    csv << fdpl::metrics_csv(log);
    if (!csv) throw fdpl::Error("write failed: " + csv_path);

    std::cout << "trained " << steps << " steps (" << loss_name << "), final train_loss "
              << log.back().train_loss << "\n";
    std::cout << "wrote " << model_path << " and " << csv_path << "\n";
    return 0;
}

int run_eval(const std::string& model_path, bool baseline, const std::string& set_dir,
             const DegradeFlags& deg, const std::string& csv_path) {
    if (baseline == !model_path.empty())
        throw fdpl::Error("pass exactly one of --model FILE or --baseline");
    fdpl::SrcnnModel model;
    if (!baseline) model = fdpl::load_checkpoint(model_path);
    auto report = fdpl::evaluate_set(baseline ? nullptr : &model, set_dir, deg.config());
    std::cout << fdpl::eval_report_table(report);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw fdpl::Error("cannot open for writing: " + csv_path);
        csv << fdpl::eval_report_csv(report);
        if (!csv) throw fdpl::Error("write failed: " + csv_path);
    }
    return 0;
}

int run_sr(const std::string& model_path, const std::string& input_path,
           const std::string& output_path, const DegradeFlags& deg, const std::string& compare_path) {
    auto model = fdpl::load_checkpoint(model_path);
    auto img = fdpl::load_image(input_path);
    auto [y, cb, cr] = fdpl::rgb_to_ycbcr(img);
    const int scale = deg.config().scale;
    const int out_w = img.width * scale, out_h = img.height * scale;
    fdpl::ImagePlane y_up = fdpl::bicubic_resize(y, out_w, out_h);
    fdpl::ImagePlane cb_up = fdpl::bicubic_resize(cb, out_w, out_h);
    fdpl::ImagePlane cr_up = fdpl::bicubic_resize(cr, out_w, out_h);

    fdpl::ImagePlane y_sr = fdpl::forward(model, y_up);
    fdpl::save_rgb_image(fdpl::ycbcr_to_rgb(y_sr, cb_up, cr_up), output_path);
    std::cout << "wrote " << output_path << " (" << out_w << "x" << out_h << ")\n";
    if (!compare_path.empty()) {
        fdpl::save_rgb_image(fdpl::ycbcr_to_rgb(y_up, cb_up, cr_up), compare_path);
        std::cout << "wrote " << compare_path << " (bicubic)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-domain perceptual loss workbench for single-image super resolution.\n"
                 "Images must be 8-bit PNG (convert JPEG sets first, e.g. with ImageMagick)."};
    app.require_subcommand(1);

    // prepare
    std::string prep_images, prep_out;
    uint64_t prep_seed = 0;
    DegradeFlags prep_deg;
    auto* prepare = app.add_subcommand("prepare", "Build a training corpus of patch pairs");
    prepare->add_option("--images", prep_images, "Directory of ground-truth PNGs")->required();
    prepare->add_option("--out", prep_out, "Output corpus directory")->required();
    prepare->add_option("--seed", prep_seed, "Seed recorded in the manifest")->capture_default_str();
    prep_deg.attach(prepare);
    prepare->set_config("--config");

    // diff-matrix
    std::string dm_images, dm_out;
    double dm_epsilon = 1e-3;
    DegradeFlags dm_deg;
    auto* diffm = app.add_subcommand("diff-matrix",
                                     "Compute the mean relative frequency difference matrix");
    diffm->add_option("--images", dm_images, "Directory of ground-truth PNGs")->required();
    diffm->add_option("--out", dm_out, "Output matrix file (8x8 text)")->required();
    diffm->add_option("--epsilon", dm_epsilon, "Denominator guard for the relative difference")
        ->capture_default_str();
    dm_deg.attach(diffm);
    diffm->set_config("--config");

    // train
    std::string tr_corpus, tr_out, tr_loss = "mse", tr_diff, tr_eval_dir, tr_init = "gaussian";
    long tr_steps = 1000, tr_eval_every = 0, tr_ckpt_every = 0;
    int tr_batch = 128;
    uint64_t tr_seed = 0;
    double tr_lr_scale = 1.0;
    DegradeFlags tr_deg;
    auto* train_cmd = app.add_subcommand("train", "Train SRCNN under a chosen loss");
    train_cmd->add_option("--corpus", tr_corpus, "Corpus directory (or patches.bin path)")->required();
    train_cmd->add_option("--out", tr_out, "Output directory for checkpoints and metrics")->required();
    train_cmd->add_option("--loss", tr_loss, "Loss: mse, fdpl, or fdpl-at")->capture_default_str();
    train_cmd->add_option("--steps", tr_steps, "Number of SGD steps")->capture_default_str();
    train_cmd->add_option("--batch", tr_batch, "Mini-batch size")->capture_default_str();
    train_cmd->add_option("--seed", tr_seed, "Seed for init and shuffling")->capture_default_str();
    train_cmd->add_option("--diff-matrix", tr_diff, "d matrix file (required for fdpl/fdpl-at)");
    train_cmd->add_option("--eval-dir", tr_eval_dir, "PNG set for periodic PSNR evaluation");
    train_cmd->add_option("--eval-every", tr_eval_every, "Evaluate every N steps (0 = never)")
        ->capture_default_str();
    train_cmd->add_option("--checkpoint-every", tr_ckpt_every, "Checkpoint every N steps (0 = final only)")
        ->capture_default_str();
    train_cmd->add_option("--lr-scale", tr_lr_scale, "Global multiplier over per-layer learning rates")
        ->capture_default_str();
    train_cmd->add_option("--init", tr_init, "Weight init: gaussian or identity")->capture_default_str();
    tr_deg.attach(train_cmd);
    train_cmd->set_config("--config");

    // eval
    std::string ev_model, ev_set, ev_csv;
    bool ev_baseline = false;
    DegradeFlags ev_deg;
    auto* eval_cmd = app.add_subcommand("eval", "Report PSNR/SSIM over a ground-truth set");
    eval_cmd->add_option("--model", ev_model, "Checkpoint to evaluate");
    eval_cmd->add_flag("--baseline", ev_baseline, "Score the degraded (bicubic) input itself");
    eval_cmd->add_option("--set", ev_set, "Directory of ground-truth PNGs")->required();
    eval_cmd->add_option("--out-csv", ev_csv, "Also write the report as CSV");
    ev_deg.attach(eval_cmd);
    eval_cmd->set_config("--config");

    // sr
    std::string sr_model, sr_in, sr_out, sr_compare;
    DegradeFlags sr_deg;
    auto* sr_cmd = app.add_subcommand("sr", "Super-resolve a PNG with a trained model");
    sr_cmd->add_option("--model", sr_model, "Checkpoint file")->required();
    sr_cmd->add_option("--input", sr_in, "Low-resolution input PNG")->required();
    sr_cmd->add_option("--output", sr_out, "Output PNG path")->required();
    sr_cmd->add_option("--compare", sr_compare, "Also write the plain bicubic upsample here");
    sr_deg.attach(sr_cmd);
    sr_cmd->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (prepare->parsed()) return run_prepare(prep_images, prep_out, prep_deg, prep_seed);
        if (diffm->parsed()) return run_diff_matrix(dm_images, dm_out, dm_deg, dm_epsilon);
        if (train_cmd->parsed())
            return run_train(tr_corpus, tr_out, tr_loss, tr_steps, tr_batch, tr_seed, tr_diff,
                             tr_eval_dir, tr_eval_every, tr_ckpt_every, tr_lr_scale, tr_init, tr_deg);
        if (eval_cmd->parsed()) return run_eval(ev_model, ev_baseline, ev_set, ev_deg, ev_csv);
        if (sr_cmd->parsed()) return run_sr(sr_model, sr_in, sr_out, sr_deg, sr_compare);
    } catch (const fdpl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
