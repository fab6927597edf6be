#pragma once

#include <cstdint>
#include <cstring>
#include <string>

#include "fdpl/core.hpp"

namespace fdpl::detail {

// Explicit little-endian packing for the binary file formats, independent of
// host byte order.

inline void put_u32le(std::string& buf, uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_f32le(std::string& buf, float f) {
    uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32le(buf, v);
}

struct ByteReader {
    const std::string& data;
    size_t pos = 0;

    uint32_t u32le() {
        if (pos + 4 > data.size()) throw Error("file truncated");
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(data[pos + i]);
        pos += 4;
        return v;
    }
    float f32le() {
        uint32_t v = u32le();
        float f;
        std::memcpy(&f, &v, 4);
        return f;
    }
};

}  // namespace fdpl::detail
