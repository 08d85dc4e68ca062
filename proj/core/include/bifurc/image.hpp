#ifndef BIFURC_IMAGE_HPP
#define BIFURC_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bifurc/errors.hpp"

namespace bifurc {

// 8-bit raster image, row-major, interleaved samples. channels is 1 or 3.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int h, int w, int c)
        : height(h), width(w), channels(c),
          pixels(static_cast<std::size_t>(h) * w * c, 0) {
        if (h <= 0 || w <= 0 || (c != 1 && c != 3))
            throw dimension_error("image: invalid dimensions " + std::to_string(h) + "x" +
                                  std::to_string(w) + "x" + std::to_string(c));
    }

    std::uint8_t& at(int y, int x, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int y, int x, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

// Per-pixel boolean map (stored as 0/1 bytes).
struct BinaryMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits;

    BinaryMap() = default;
    BinaryMap(int h, int w) : height(h), width(w), bits(static_cast<std::size_t>(h) * w, 0) {}

    bool at(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int y, int x, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits) n += b != 0;
        return n;
    }

    bool operator==(const BinaryMap&) const = default;
};

// Single-channel real-valued map in [0,1]; output of the color transforms.
struct FloatMap {
    int height = 0;
    int width = 0;
    std::vector<float> values;

    FloatMap() = default;
    FloatMap(int h, int w) : height(h), width(w), values(static_cast<std::size_t>(h) * w, 0.f) {}

    float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
    float& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Binary PGM (P5) / PPM (P6), maxval 255 only. Round-trips bit-identically.
Image load_pnm(const std::filesystem::path& path);
void save_pnm(const Image& image, const std::filesystem::path& path);

// Ground-truth mask convention: sample >= 128 reads as abnormal.
BinaryMap mask_from_image(const Image& image);

// 0/255 single-channel rendering of a map, for writing with save_pnm.
Image image_from_map(const BinaryMap& map);

} // namespace bifurc

#endif
