#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fdpl/core.hpp"
#include "fdpl/image_io.hpp"
#include "fdpl/resample.hpp"
#include "fdpl/rng.hpp"
#include "fdpl/serialize.hpp"

namespace fdpl {

inline constexpr int kPatchSize = 32;
inline constexpr int kPatchStride = 13;

// Aligned (degraded-input, ground-truth) luminance patch pair.
struct PatchPair {
    ImagePlane input;
    ImagePlane target;
};

struct ManifestEntry {
    std::string path;
    int row = 0;
    int col = 0;
};

struct CorpusManifest {
    uint64_t seed = 0;
    DegradeConfig config;
    int images_used = 0;
    int images_skipped = 0;
    std::vector<ManifestEntry> entries;
};

// All size x size windows at origins (stride*a, stride*b) that fit entirely;
// no partial windows.
inline std::vector<PatchPair> extract_patches(const ImagePlane& gt, const ImagePlane& degraded,
                                              int size = kPatchSize, int stride = kPatchStride) {
    require_same_dims(gt, degraded, "extract_patches");
    if (gt.width < size || gt.height < size)
        throw Error("extract_patches: image " + std::to_string(gt.width) + "x" +
                    std::to_string(gt.height) + " smaller than patch size " + std::to_string(size));
    std::vector<PatchPair> pairs;
    for (int oy = 0; oy + size <= gt.height; oy += stride)
        for (int ox = 0; ox + size <= gt.width; ox += stride) {
            PatchPair p{ImagePlane(size, size), ImagePlane(size, size)};
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x) {
                    p.input.at(y, x) = degraded.at(oy + y, ox + x);
                    p.target.at(y, x) = gt.at(oy + y, ox + x);
                }
            pairs.push_back(std::move(p));
        }
    return pairs;
}

inline int patch_count_1d(int dim, int size = kPatchSize, int stride = kPatchStride) {
    return dim < size ? 0 : (dim - size) / stride + 1;
}

// --- patch file: magic "FDPLPAT1", u32 LE pair count, then per pair the
// input plane followed by the target plane, each 32x32 f32 LE row-major.

inline constexpr char kPatchMagic[] = "FDPLPAT1";

namespace detail {

inline void put_plane_f32le(std::string& buf, const ImagePlane& p) {
    for (double v : p.samples) put_f32le(buf, static_cast<float>(v));
}

}  // namespace detail

inline void save_patch_file(const std::vector<PatchPair>& pairs, const std::string& path) {
    std::string buf;
    buf.append(kPatchMagic, 8);
    detail::put_u32le(buf, static_cast<uint32_t>(pairs.size()));
    for (const auto& p : pairs) {
        detail::put_plane_f32le(buf, p.input);
        detail::put_plane_f32le(buf, p.target);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw Error("write failed: " + path);
}

inline std::vector<PatchPair> load_patch_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open: " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < 12 || data.compare(0, 8, kPatchMagic) != 0)
        throw Error("bad patch file magic: " + path);
    detail::ByteReader rd{data, 8};
    const uint32_t count = rd.u32le();
    const size_t plane_bytes = static_cast<size_t>(kPatchSize) * kPatchSize * 4;
    if (data.size() != 12 + static_cast<size_t>(count) * 2 * plane_bytes)
        throw Error("patch file size does not match pair count: " + path);
    std::vector<PatchPair> pairs(count);
    for (auto& p : pairs) {
        p.input = ImagePlane(kPatchSize, kPatchSize);
        p.target = ImagePlane(kPatchSize, kPatchSize);
        for (auto& v : p.input.samples) v = rd.f32le();
        for (auto& v : p.target.samples) v = rd.f32le();
    }
    return pairs;
}

// --- manifest: '#' header lines with seed/config, then one
// "path row col" line per patch, in patch-file order.

inline void save_manifest(const CorpusManifest& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open for writing: " + path);
    f << "# seed=" << m.seed << " scale=" << m.config.scale << " blur_sigma=" << m.config.blur_sigma
      << " blur_radius=" << m.config.blur_kernel_radius << " patch=" << kPatchSize
      << " stride=" << kPatchStride << "\n";
    f << "# images_used=" << m.images_used << " images_skipped=" << m.images_skipped
      << " patches=" << m.entries.size() << "\n";
    for (const auto& e : m.entries) f << e.path << " " << e.row << " " << e.col << "\n";
    if (!f) throw Error("write failed: " + path);
}

inline std::vector<std::string> list_png_files(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Per image: luminance -> crop to the loss grid -> degrade -> extract
// patches. Deterministic ordering: lexicographic by filename, then row-major
// origins. Unreadable files are skipped and counted.
inline CorpusManifest prepare_corpus(const std::string& image_dir, const DegradeConfig& cfg,
                                     const std::string& out_dir, uint64_t seed,
                                     std::vector<PatchPair>* out_pairs = nullptr,
                                     std::ostream* log = nullptr) {
    cfg.validate();
    namespace fs = std::filesystem;
    auto files = list_png_files(image_dir);
    if (files.empty()) throw Error("no PNG images in: " + image_dir);
    fs::create_directories(out_dir);

    CorpusManifest manifest;
    manifest.seed = seed;
    manifest.config = cfg;
    std::vector<PatchPair> pairs;
    for (const auto& file : files) {
        ImagePlane gt;
        try {
            gt = crop_to_grid(load_luminance(file), cfg.scale);
        } catch (const Error& e) {
            ++manifest.images_skipped;
            if (log) *log << "warning: skipping " << file << ": " << e.what() << "\n";
            continue;
        }
        ImagePlane deg = degrade(gt, cfg);
        auto image_pairs = extract_patches(gt, deg);
        int per_row = patch_count_1d(gt.width);
        for (size_t i = 0; i < image_pairs.size(); ++i) {
            int oy = static_cast<int>(i) / per_row * kPatchStride;
            int ox = static_cast<int>(i) % per_row * kPatchStride;
            manifest.entries.push_back({file, oy, ox});
        }
        pairs.insert(pairs.end(), std::make_move_iterator(image_pairs.begin()),
                     std::make_move_iterator(image_pairs.end()));
        ++manifest.images_used;
    }
    if (manifest.images_used == 0) throw Error("no readable PNG images in: " + image_dir);

    save_patch_file(pairs, (fs::path(out_dir) / "patches.bin").string());
    save_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());
    if (out_pairs) *out_pairs = std::move(pairs);
    return manifest;
}

// Epoch-wise shuffled index batches. Every pair appears exactly once per
// epoch; the final short batch is emitted; each epoch reshuffles with a seed
// derived from (seed, epoch) so any epoch can be regenerated independently.
class BatchStream {
public:
    BatchStream(size_t corpus_size, int batch_size, uint64_t seed)
        : n_(corpus_size), batch_size_(batch_size), seed_(seed) {
        if (corpus_size == 0) throw Error("batches: corpus is empty");
        if (batch_size < 1) throw Error("batches: batch size must be >= 1");
        order_.resize(n_);
        start_epoch(0);
    }

    const std::vector<size_t>& next_batch() {
        if (pos_ >= n_) start_epoch(epoch_ + 1);
        size_t take = std::min(static_cast<size_t>(batch_size_), n_ - pos_);
        batch_.assign(order_.begin() + pos_, order_.begin() + pos_ + take);
        pos_ += take;
        return batch_;
    }

    uint64_t epoch() const { return epoch_; }

private:
    void start_epoch(uint64_t epoch) {
        epoch_ = epoch;
        pos_ = 0;
        for (size_t i = 0; i < n_; ++i) order_[i] = i;
        Rng rng(derive_seed(seed_, "epoch-" + std::to_string(epoch)));
        rng.shuffle(order_.begin(), order_.end());
    }

    size_t n_;
    int batch_size_;
    uint64_t seed_;
    uint64_t epoch_ = 0;
    size_t pos_ = 0;
    std::vector<size_t> order_;
    std::vector<size_t> batch_;
};

}  // namespace fdpl
