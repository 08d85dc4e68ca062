#include "bifurc/color.hpp"

#include <algorithm>
#include <cmath>

namespace bifurc {

namespace {

void require_rgb(const Image& image, const char* op) {
    if (image.channels != 3)
        throw dimension_error(std::string(op) + ": needs a 3-channel image, got " +
                              std::to_string(image.channels) + " channel(s)");
}

double srgb_expand(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

} // namespace

FloatMap rgb_to_gray(const Image& image) {
    require_rgb(image, "rgb_to_gray");
    FloatMap out(image.height, image.width);
    const std::uint8_t* p = image.pixels.data();
    for (std::size_t i = 0; i < out.values.size(); ++i, p += 3)
        out.values[i] =
            static_cast<float>((0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0);
    return out;
}

FloatMap rgb_to_hsv_s(const Image& image) {
    require_rgb(image, "rgb_to_hsv_s");
    FloatMap out(image.height, image.width);
    const std::uint8_t* p = image.pixels.data();
    for (std::size_t i = 0; i < out.values.size(); ++i, p += 3) {
        const std::uint8_t mx = std::max({p[0], p[1], p[2]});
        const std::uint8_t mn = std::min({p[0], p[1], p[2]});
        out.values[i] = mx == 0 ? 0.f : static_cast<float>(mx - mn) / static_cast<float>(mx);
    }
    return out;
}

double lab_a_of_rgb(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = srgb_expand(r8 / 255.0);
    const double g = srgb_expand(g8 / 255.0);
    const double b = srgb_expand(b8 / 255.0);
    // linear RGB -> XYZ, D65
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    return 500.0 * (lab_f(x / 0.95047) - lab_f(y / 1.0));
}

FloatMap rgb_to_lab_a(const Image& image) {
    require_rgb(image, "rgb_to_lab_a");
    FloatMap out(image.height, image.width);
    const std::uint8_t* p = image.pixels.data();
    for (std::size_t i = 0; i < out.values.size(); ++i, p += 3) {
        const double a = std::clamp(lab_a_of_rgb(p[0], p[1], p[2]), -128.0, 127.0);
        out.values[i] = static_cast<float>((a + 128.0) / 255.0);
    }
    return out;
}

} // namespace bifurc
