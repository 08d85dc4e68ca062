#include "bifurc/patches.hpp"

#include <algorithm>
#include <numeric>

#include "bifurc/rng.hpp"

namespace bifurc {

ChannelMode channel_mode_from_string(const std::string& s) {
    if (s == "wce") return ChannelMode::Wce3;
    if (s == "rgb") return ChannelMode::Rgb3;
    throw config_error("unknown channel mode '" + s + "', expected wce or rgb");
}

std::string to_string(ChannelMode mode) {
    return mode == ChannelMode::Wce3 ? "wce" : "rgb";
}

std::array<FloatMap, 3> make_planes(const Image& image, ChannelMode mode) {
    if (mode == ChannelMode::Wce3)
        return {rgb_to_gray(image), rgb_to_hsv_s(image), rgb_to_lab_a(image)};
    if (image.channels != 3)
        throw dimension_error("rgb channel mode needs a 3-channel image");
    std::array<FloatMap, 3> planes{FloatMap(image.height, image.width),
                                   FloatMap(image.height, image.width),
                                   FloatMap(image.height, image.width)};
    const std::uint8_t* p = image.pixels.data();
    const std::size_t n = static_cast<std::size_t>(image.height) * image.width;
    for (std::size_t i = 0; i < n; ++i, p += 3) {
        planes[0].values[i] = p[0] / 255.0f;
        planes[1].values[i] = p[1] / 255.0f;
        planes[2].values[i] = p[2] / 255.0f;
    }
    return planes;
}

std::size_t PatchDataset::count_label(int label) const {
    std::size_t n = 0;
    for (auto l : labels) n += l == label;
    return n;
}

void PatchDataset::append_from(const PatchDataset& other, std::size_t i) {
    const float* src = other.patch(i);
    values.insert(values.end(), src, src + kVolume);
    labels.push_back(other.labels[i]);
    provenance.push_back(other.provenance[i]);
}

namespace {

void copy_patch(const std::array<FloatMap, 3>& planes, int cy, int cx, float* out) {
    constexpr int half = PatchDataset::kHalf;
    const int w = planes[0].width;
    for (int c = 0; c < 3; ++c) {
        const float* v = planes[static_cast<std::size_t>(c)].values.data();
        for (int dy = -half; dy <= half; ++dy) {
            const float* row = v + static_cast<std::size_t>(cy + dy) * w + (cx - half);
            out = std::copy(row, row + PatchDataset::kSize, out);
        }
    }
}

} // namespace

PatchDataset extract_patches(const MaskedImage& masked, ChannelMode mode, int source_index) {
    masked.validate();
    const int h = masked.image.height, w = masked.image.width;
    if (h < PatchDataset::kSize || w < PatchDataset::kSize)
        throw dimension_error("extract_patches: image " + std::to_string(h) + "x" +
                              std::to_string(w) + " smaller than patch size " +
                              std::to_string(PatchDataset::kSize));

    const auto planes = make_planes(masked.image, mode);
    constexpr int half = PatchDataset::kHalf;

    PatchDataset ds;
    ds.abnormality_id = masked.abnormality_id;
    const std::size_t n =
        static_cast<std::size_t>(h - 2 * half) * static_cast<std::size_t>(w - 2 * half);
    ds.values.reserve(n * PatchDataset::kVolume);
    ds.labels.reserve(n);
    ds.provenance.reserve(n);
    std::vector<float> buf(PatchDataset::kVolume);
    for (int cy = half; cy < h - half; ++cy) {
        for (int cx = half; cx < w - half; ++cx) {
            copy_patch(planes, cy, cx, buf.data());
            ds.values.insert(ds.values.end(), buf.begin(), buf.end());
            ds.labels.push_back(masked.mask.at(cy, cx) ? 1 : 0);
            ds.provenance.push_back({source_index, cy, cx});
        }
    }
    return ds;
}

PatchDataset extract_patches(std::span<const MaskedImage> images, ChannelMode mode) {
    PatchDataset all;
    for (std::size_t i = 0; i < images.size(); ++i) {
        PatchDataset one = extract_patches(images[i], mode, static_cast<int>(i));
        if (i == 0) {
            all = std::move(one);
        } else {
            if (one.abnormality_id != all.abnormality_id)
                all.abnormality_id = -1; // mixed classes
            all.values.insert(all.values.end(), one.values.begin(), one.values.end());
            all.labels.insert(all.labels.end(), one.labels.begin(), one.labels.end());
            all.provenance.insert(all.provenance.end(), one.provenance.begin(),
                                  one.provenance.end());
        }
    }
    return all;
}

PatchDataset balance(const PatchDataset& dataset, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0)) throw config_error("balance: ratio must be positive");
    std::vector<std::size_t> abnormal, normal;
    for (std::size_t i = 0; i < dataset.count(); ++i)
        (dataset.labels[i] ? abnormal : normal).push_back(i);
    if (abnormal.empty()) throw data_error("balance: dataset has no abnormal patches");
    if (normal.empty()) throw data_error("balance: dataset has no normal patches");

    Rng rng(mix_seed(seed, 2));
    const std::size_t want =
        static_cast<std::size_t>(ratio * static_cast<double>(abnormal.size()));
    if (normal.size() > want) {
        // partial Fisher-Yates: the first `want` entries are a uniform draw
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j = i + uniform_below(rng, normal.size() - i);
            std::swap(normal[i], normal[j]);
        }
        normal.resize(want);
    }

    std::vector<std::size_t> keep;
    keep.reserve(abnormal.size() + normal.size());
    keep.insert(keep.end(), abnormal.begin(), abnormal.end());
    keep.insert(keep.end(), normal.begin(), normal.end());
    shuffle_indices(keep, rng);

    PatchDataset out;
    out.abnormality_id = dataset.abnormality_id;
    out.values.reserve(keep.size() * PatchDataset::kVolume);
    for (std::size_t i : keep) out.append_from(dataset, i);
    return out;
}

namespace {

// reflect-101: ... 2 1 0 | 1 2 ... (edge not duplicated)
inline int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i = std::abs(i) % period;
    return i < n ? i : period - i;
}

} // namespace

PatchGrid::PatchGrid(const Image& image, ChannelMode mode)
    : height_(image.height), width_(image.width), planes_(make_planes(image, mode)) {}

void PatchGrid::patch_at(int y, int x, float* out) const {
    constexpr int half = PatchDataset::kHalf;
    for (int c = 0; c < 3; ++c) {
        const FloatMap& plane = planes_[static_cast<std::size_t>(c)];
        for (int dy = -half; dy <= half; ++dy) {
            const int sy = mirror_index(y + dy, height_);
            const float* row = plane.values.data() + static_cast<std::size_t>(sy) * width_;
            for (int dx = -half; dx <= half; ++dx)
                *out++ = row[mirror_index(x + dx, width_)];
        }
    }
}

} // namespace bifurc
