#ifndef BIFURC_COLOR_HPP
#define BIFURC_COLOR_HPP

#include "bifurc/image.hpp"

namespace bifurc {

// The three input channels used for capsule-endoscopy images: grayscale
// level, HSV saturation, and the CIELAB a* axis. Each transform maps an
// 8-bit RGB image to a FloatMap with values in [0,1].

// BT.601 luma: (0.299 R + 0.587 G + 0.114 B) / 255
FloatMap rgb_to_gray(const Image& image);

// HSV saturation: (max - min) / max over the RGB triple; 0 where max == 0
FloatMap rgb_to_hsv_s(const Image& image);

// CIELAB a* (sRGB, D65 white), clamped to [-128, 127] then mapped affinely
// to [0,1] via (a* + 128) / 255
FloatMap rgb_to_lab_a(const Image& image);

// Raw a* value for one RGB triple, before clamping/rescaling.
double lab_a_of_rgb(std::uint8_t r, std::uint8_t g, std::uint8_t b);

} // namespace bifurc

#endif
