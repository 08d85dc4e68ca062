#ifndef BIFURC_PATCHES_HPP
#define BIFURC_PATCHES_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bifurc/color.hpp"
#include "bifurc/image.hpp"

namespace bifurc {

// Which three planes feed the network.
//   Wce3: grayscale, HSV saturation, CIELAB a* (capsule-endoscopy recipe)
//   Rgb3: normalized R, G, B (dermoscopy recipe)
enum class ChannelMode { Wce3, Rgb3 };

ChannelMode channel_mode_from_string(const std::string& s);
std::string to_string(ChannelMode mode);

// Decomposes an RGB image into the three planes of the given mode.
std::array<FloatMap, 3> make_planes(const Image& image, ChannelMode mode);

struct MaskedImage {
    Image image;
    BinaryMap mask;
    int abnormality_id = 0;
    std::string stem; // source filename stem, empty for generated images

    void validate() const {
        if (mask.height != image.height || mask.width != image.width)
            throw dimension_error("masked image: mask " + std::to_string(mask.height) + "x" +
                                  std::to_string(mask.width) + " vs image " +
                                  std::to_string(image.height) + "x" +
                                  std::to_string(image.width));
    }
};

struct PatchProvenance {
    int source = 0; // index of the source image
    int center_y = 0;
    int center_x = 0;
};

// Labeled 3x9x9 patches stored in one flat pool.
struct PatchDataset {
    static constexpr int kChannels = 3;
    static constexpr int kSize = 9;      // patch side; centers stay kSize/2 from borders
    static constexpr int kHalf = kSize / 2;
    static constexpr int kVolume = kChannels * kSize * kSize;

    int abnormality_id = 0;
    std::vector<float> values;                // count() * kVolume
    std::vector<std::uint8_t> labels;         // 0 = normal, 1 = abnormal
    std::vector<PatchProvenance> provenance;

    std::size_t count() const { return labels.size(); }
    const float* patch(std::size_t i) const { return values.data() + i * kVolume; }
    std::size_t count_label(int label) const;

    void append_from(const PatchDataset& other, std::size_t i);
};

// One patch per interior pixel (center at least 4 from every border); the
// center pixel's mask value is the label.
PatchDataset extract_patches(const MaskedImage& masked, ChannelMode mode, int source_index = 0);

// Extraction over several images into one pool; provenance.source indexes `images`.
PatchDataset extract_patches(std::span<const MaskedImage> images, ChannelMode mode);

// Keeps every abnormal patch; subsamples normals (seeded, without replacement)
// to ratio * abnormal_count, or keeps all if fewer exist. Output order is a
// seeded shuffle. Throws data_error when a label class is absent.
PatchDataset balance(const PatchDataset& dataset, double ratio, std::uint64_t seed);

// Full-image patch source for inference: one patch per pixel, borders
// handled by reflect-101 mirroring (edge pixel not duplicated), so index -1
// maps to 1 and index H maps to H-2.
class PatchGrid {
public:
    PatchGrid(const Image& image, ChannelMode mode);

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

    // Writes the PatchDataset::kVolume floats of the patch centered at (y, x).
    void patch_at(int y, int x, float* out) const;

private:
    int height_;
    int width_;
    std::array<FloatMap, 3> planes_;
};

} // namespace bifurc

#endif
