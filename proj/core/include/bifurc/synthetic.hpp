#ifndef BIFURC_SYNTHETIC_HPP
#define BIFURC_SYNTHETIC_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bifurc/patches.hpp"

namespace bifurc {

// Generator for multi-class test images: each image carries exactly one
// elliptical blob of its class color over a textured tissue-like background,
// with the mask marking the blob pixels.
struct SyntheticSpec {
    int classes = 4;
    int height = 64;
    int width = 64;
    int blob_min_radius = 8;
    int blob_max_radius = 13;
    double max_eccentricity = 2.0;   // major/minor axis ratio upper bound
    double texture_amplitude = 12.0; // uniform per-pixel noise, 8-bit units

    std::array<std::uint8_t, 3> background{148, 110, 92};
    std::vector<std::array<std::uint8_t, 3>> palette{
        {185, 32, 36},   // red
        {206, 178, 62},  // yellow
        {232, 232, 224}, // white
        {212, 150, 148}, // pale
    };
    std::vector<std::string> class_names{"red", "yellow", "white", "pale"};

    // Guarantees on the generated data, used by the tests:
    // distinct class colors are at least this far apart in RGB, and the mean
    // color inside a mask lands within kMeanColorTolerance of its class color.
    static constexpr double kMinPaletteDistance = 60.0;
    static constexpr double kMeanColorTolerance = 10.0;

    void validate() const;
};

// count_per_class images per class, deterministic in (spec, seed).
// abnormality_id of each image is its class index; stem is "<class>_<index>".
std::vector<MaskedImage> synth_generate(const SyntheticSpec& spec, int count_per_class,
                                        std::uint64_t seed);

} // namespace bifurc

#endif
