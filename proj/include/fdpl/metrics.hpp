#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fdpl/core.hpp"
#include "fdpl/dataset.hpp"
#include "fdpl/loss.hpp"
#include "fdpl/resample.hpp"
#include "fdpl/srcnn.hpp"

namespace fdpl {

// 10*log10(peak^2 / mse) with peak 1.0; identical planes report +inf.
inline double psnr(const ImagePlane& a, const ImagePlane& b) {
    double mse = mse_loss(a, b);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
// C2 = 0.03^2 for dynamic range 1. Evaluated wherever the window fits
// entirely; no further border exclusion.
inline double ssim(const ImagePlane& a, const ImagePlane& b) {
    require_same_dims(a, b, "ssim");
    constexpr int kWin = 11;
    constexpr int kR = kWin / 2;
    if (a.width < kWin || a.height < kWin)
        throw Error("ssim: image smaller than the 11x11 window");

    static const std::array<double, kWin * kWin> window = [] {
        std::array<double, kWin * kWin> w{};
        const double sigma = 1.5;
        double total = 0.0;
        for (int y = 0; y < kWin; ++y)
            for (int x = 0; x < kWin; ++x) {
                double dy = y - kR, dx = x - kR;
                w[y * kWin + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                total += w[y * kWin + x];
            }
        for (double& v : w) v /= total;
        return w;
    }();

    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    const int out_h = a.height - kWin + 1;
    const int out_w = a.width - kWin + 1;
    std::vector<double> row_sums(out_h, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
    for (int y = 0; y < out_h; ++y) {
        double acc = 0.0;
        for (int x = 0; x < out_w; ++x) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int wy = 0; wy < kWin; ++wy)
                for (int wx = 0; wx < kWin; ++wx) {
                    double wt = window[wy * kWin + wx];
                    mu_a += wt * a.at(y + wy, x + wx);
                    mu_b += wt * b.at(y + wy, x + wx);
                }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (int wy = 0; wy < kWin; ++wy)
                for (int wx = 0; wx < kWin; ++wx) {
                    double wt = window[wy * kWin + wx];
                    double da = a.at(y + wy, x + wx) - mu_a;
                    double db = b.at(y + wy, x + wx) - mu_b;
                    var_a += wt * da * da;
                    var_b += wt * db * db;
                    cov += wt * da * db;
                }
            acc += (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2) /
                   ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
        row_sums[y] = acc;
    }
    double total = 0.0;
    for (double v : row_sums) total += v;
    return total / (static_cast<double>(out_h) * out_w);
}

struct EvalRow {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
};

// Per ground-truth image: luminance -> crop -> degrade -> model forward ->
// clamp to [0,1] -> score against the cropped ground truth. Passing nullptr
// as the model scores the degraded plane itself (the bicubic baseline row).
inline EvalReport evaluate_set(const SrcnnModel* model, const std::string& gt_dir,
                               const DegradeConfig& cfg) {
    auto files = list_png_files(gt_dir);
    if (files.empty()) throw Error("no PNG images in: " + gt_dir);
    EvalReport report;
    for (const auto& file : files) {
        ImagePlane gt = crop_to_grid(load_luminance(file), cfg.scale);
        ImagePlane deg = degrade(gt, cfg);
        // Scoring matches what save_image would emit: clamped to [0,1].
        ImagePlane pred = clamp_plane(model ? forward(*model, deg) : std::move(deg));
        EvalRow row;
        row.name = std::filesystem::path(file).stem().string();
        row.psnr = psnr(gt, pred);
        row.ssim = ssim(gt, pred);
        report.rows.push_back(std::move(row));
    }
    for (const auto& r : report.rows) {
        report.mean_psnr += r.psnr;
        report.mean_ssim += r.ssim;
    }
    report.mean_psnr /= static_cast<double>(report.rows.size());
    report.mean_ssim /= static_cast<double>(report.rows.size());
    return report;
}

namespace detail {

inline std::string fmt_metric(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace detail

inline std::string eval_report_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "name,psnr,ssim\n";
    for (const auto& r : report.rows)
        out << r.name << "," << detail::fmt_metric(r.psnr) << "," << detail::fmt_metric(r.ssim) << "\n";
    out << "mean," << detail::fmt_metric(report.mean_psnr) << "," << detail::fmt_metric(report.mean_ssim)
        << "\n";
    return out.str();
}

inline std::string eval_report_table(const EvalReport& report) {
    size_t name_w = 4;
    for (const auto& r : report.rows) name_w = std::max(name_w, r.name.size());
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-*s  %10s  %8s\n", static_cast<int>(name_w), "name", "psnr",
                  "ssim");
    out << line;
    auto put = [&](const std::string& name, double p, double s) {
        std::snprintf(line, sizeof line, "%-*s  %10s  %8s\n", static_cast<int>(name_w), name.c_str(),
                      detail::fmt_metric(p).c_str(), detail::fmt_metric(s).c_str());
        out << line;
    };
    for (const auto& r : report.rows) put(r.name, r.psnr, r.ssim);
    put("mean", report.mean_psnr, report.mean_ssim);
    return out.str();
}

}  // namespace fdpl
