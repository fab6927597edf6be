#pragma once

#include <array>
#include <cmath>

#include "fdpl/core.hpp"

namespace fdpl {

inline constexpr int kBlock = 8;

// 8x8 tile in the pixel basis.
struct Block8 {
    std::array<double, 64> s{};

    double& at(int m, int n) { return s[m * kBlock + n]; }
    double at(int m, int n) const { return s[m * kBlock + n]; }
};

// 8x8 tile in the frequency basis; (0,0) is the DC coefficient, j indexes
// vertical frequency and k horizontal.
struct CoeffBlock {
    std::array<double, 64> c{};

    double& at(int j, int k) { return c[j * kBlock + k]; }
    double at(int j, int k) const { return c[j * kBlock + k]; }
};

// Row-major grid of coefficient blocks covering a plane whose dimensions are
// multiples of 8. Block (bi, bj) covers rows 8bi..8bi+7, cols 8bj..8bj+7.
struct CoeffGrid {
    int blocks_w = 0;
    int blocks_h = 0;
    std::vector<CoeffBlock> blocks;

    CoeffBlock& at(int bi, int bj) { return blocks[static_cast<size_t>(bi) * blocks_w + bj]; }
    const CoeffBlock& at(int bi, int bj) const {
        return blocks[static_cast<size_t>(bi) * blocks_w + bj];
    }
};

namespace detail {

// Orthonormal DCT-II basis: basis[j][m] = alpha(j) * cos(pi*j*(2m+1)/16),
// alpha(0) = sqrt(1/8), alpha(j>0) = sqrt(2/8). Rows are orthonormal, so the
// inverse transform is the transpose.
inline const std::array<double, 64>& dct_basis() {
    static const std::array<double, 64> basis = [] {
        std::array<double, 64> b{};
        const double pi = 3.14159265358979323846;
        for (int j = 0; j < kBlock; ++j) {
            double alpha = j == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
            for (int m = 0; m < kBlock; ++m)
                b[j * kBlock + m] = alpha * std::cos(pi * j * (2 * m + 1) / (2.0 * kBlock));
        }
        return b;
    }();
    return basis;
}

}  // namespace detail

// Forward orthonormal 2D DCT-II, computed separably as B * X * B^T.
inline CoeffBlock dct2_8x8(const Block8& block) {
    const auto& basis = detail::dct_basis();
    double tmp[64];  // B * X
    for (int j = 0; j < kBlock; ++j)
        for (int n = 0; n < kBlock; ++n) {
            double acc = 0.0;
            for (int m = 0; m < kBlock; ++m) acc += basis[j * kBlock + m] * block.s[m * kBlock + n];
            tmp[j * kBlock + n] = acc;
        }
    CoeffBlock out;
    for (int j = 0; j < kBlock; ++j)
        for (int k = 0; k < kBlock; ++k) {
            double acc = 0.0;
            for (int n = 0; n < kBlock; ++n) acc += tmp[j * kBlock + n] * basis[k * kBlock + n];
            out.c[j * kBlock + k] = acc;
        }
    return out;
}

// Inverse transform, B^T * Y * B.
inline Block8 idct2_8x8(const CoeffBlock& coeffs) {
    const auto& basis = detail::dct_basis();
    double tmp[64];  // B^T * Y
    for (int m = 0; m < kBlock; ++m)
        for (int k = 0; k < kBlock; ++k) {
            double acc = 0.0;
            for (int j = 0; j < kBlock; ++j) acc += basis[j * kBlock + m] * coeffs.c[j * kBlock + k];
            tmp[m * kBlock + k] = acc;
        }
    Block8 out;
    for (int m = 0; m < kBlock; ++m)
        for (int n = 0; n < kBlock; ++n) {
            double acc = 0.0;
            for (int k = 0; k < kBlock; ++k) acc += tmp[m * kBlock + k] * basis[k * kBlock + n];
            out.s[m * kBlock + n] = acc;
        }
    return out;
}

inline Block8 extract_block(const ImagePlane& plane, int bi, int bj) {
    Block8 b;
    for (int m = 0; m < kBlock; ++m)
        for (int n = 0; n < kBlock; ++n) b.at(m, n) = plane.at(bi * kBlock + m, bj * kBlock + n);
    return b;
}

inline void insert_block(ImagePlane& plane, int bi, int bj, const Block8& b) {
    for (int m = 0; m < kBlock; ++m)
        for (int n = 0; n < kBlock; ++n) plane.at(bi * kBlock + m, bj * kBlock + n) = b.at(m, n);
}

inline void require_blockable(const ImagePlane& plane, const char* what) {
    if (plane.width % kBlock != 0 || plane.height % kBlock != 0)
        throw Error(std::string(what) + ": plane dimensions " + std::to_string(plane.width) + "x" +
                    std::to_string(plane.height) + " not divisible by 8");
}

// DCT of all non-overlapping 8x8 tiles, row-major.
inline CoeffGrid blockwise_dct(const ImagePlane& plane) {
    require_blockable(plane, "blockwise_dct");
    CoeffGrid grid;
    grid.blocks_w = plane.width / kBlock;
    grid.blocks_h = plane.height / kBlock;
    grid.blocks.resize(static_cast<size_t>(grid.blocks_w) * grid.blocks_h);
    for (int bi = 0; bi < grid.blocks_h; ++bi)
        for (int bj = 0; bj < grid.blocks_w; ++bj)
            grid.at(bi, bj) = dct2_8x8(extract_block(plane, bi, bj));
    return grid;
}

inline ImagePlane blockwise_idct(const CoeffGrid& grid) {
    ImagePlane plane(grid.blocks_w * kBlock, grid.blocks_h * kBlock);
    for (int bi = 0; bi < grid.blocks_h; ++bi)
        for (int bj = 0; bj < grid.blocks_w; ++bj) insert_block(plane, bi, bj, idct2_8x8(grid.at(bi, bj)));
    return plane;
}

}  // namespace fdpl
