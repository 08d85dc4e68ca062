#include "bifurc/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "bifurc/rng.hpp"

namespace bifurc {

void SyntheticSpec::validate() const {
    if (classes < 2) throw config_error("synthetic: need at least 2 classes");
    if (static_cast<int>(palette.size()) < classes ||
        static_cast<int>(class_names.size()) < classes)
        throw config_error("synthetic: palette/class_names smaller than class count");
    if (height < 2 * blob_max_radius + PatchDataset::kSize ||
        width < 2 * blob_max_radius + PatchDataset::kSize)
        throw config_error("synthetic: image too small for the blob radius range");
    if (blob_min_radius < 3 || blob_max_radius < blob_min_radius)
        throw config_error("synthetic: bad blob radius range");
    if (max_eccentricity < 1.0) throw config_error("synthetic: eccentricity must be >= 1");
    for (int i = 0; i < classes; ++i) {
        for (int j = i + 1; j < classes; ++j) {
            double d2 = 0;
            for (int c = 0; c < 3; ++c) {
                const double d = static_cast<double>(palette[i][c]) - palette[j][c];
                d2 += d * d;
            }
            if (std::sqrt(d2) < kMinPaletteDistance)
                throw config_error("synthetic: colors of classes " + std::to_string(i) + " and " +
                                   std::to_string(j) + " closer than the documented minimum");
        }
    }
}

namespace {

inline std::uint8_t clamp8(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

} // namespace

std::vector<MaskedImage> synth_generate(const SyntheticSpec& spec, int count_per_class,
                                        std::uint64_t seed) {
    spec.validate();
    if (count_per_class <= 0) throw config_error("synthetic: count per class must be positive");

    std::vector<MaskedImage> out;
    out.reserve(static_cast<std::size_t>(spec.classes) * count_per_class);
    const int h = spec.height, w = spec.width;

    for (int cls = 0; cls < spec.classes; ++cls) {
        for (int n = 0; n < count_per_class; ++n) {
            Rng rng(mix_seed(seed, (static_cast<std::uint64_t>(cls) << 32) | std::uint64_t(n)));

            // textured background: slow sinusoidal shading plus uniform noise
            MaskedImage mi;
            mi.image = Image(h, w, 3);
            mi.mask = BinaryMap(h, w);
            mi.abnormality_id = cls;
            mi.stem = spec.class_names[static_cast<std::size_t>(cls)] + "_" + std::to_string(n);

            const double phase_y = uniform01(rng) * 6.2831853;
            const double phase_x = uniform01(rng) * 6.2831853;
            const double shade_amp = 10.0;

            // ellipse: center, semi-axes, rotation
            const int margin = spec.blob_max_radius + 2;
            const int cy = margin + static_cast<int>(uniform_below(rng, h - 2 * margin));
            const int cx = margin + static_cast<int>(uniform_below(rng, w - 2 * margin));
            const double a = spec.blob_min_radius +
                             uniform01(rng) * (spec.blob_max_radius - spec.blob_min_radius);
            const double ecc = 1.0 + uniform01(rng) * (spec.max_eccentricity - 1.0);
            const double b = std::max(3.0, a / ecc);
            const double theta = uniform01(rng) * 3.14159265;
            const double ct = std::cos(theta), st = std::sin(theta);

            const auto& bg = spec.background;
            const auto& fg = spec.palette[static_cast<std::size_t>(cls)];
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const double dy = y - cy, dx = x - cx;
                    const double u = dx * ct + dy * st;
                    const double v = -dx * st + dy * ct;
                    const bool inside = (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
                    mi.mask.set(y, x, inside);
                    const double shade =
                        shade_amp * (std::sin(0.11 * y + phase_y) + std::sin(0.13 * x + phase_x)) / 2.0;
                    for (int c = 0; c < 3; ++c) {
                        const double base = inside ? fg[c] : bg[c] + shade;
                        const double noise = (uniform01(rng) * 2.0 - 1.0) * spec.texture_amplitude;
                        mi.image.at(y, x, c) = clamp8(base + noise);
                    }
                }
            }
            out.push_back(std::move(mi));
        }
    }
    return out;
}

} // namespace bifurc
