#include "bifurc/dataset_dir.hpp"

#include <algorithm>
#include <map>

#include "bifurc/rng.hpp"

namespace bifurc {

namespace fs = std::filesystem;

void write_dataset_dir(const fs::path& root, const std::vector<MaskedImage>& images,
                       const std::vector<std::string>& class_names) {
    for (const auto& name : class_names) {
        fs::create_directories(root / name / "images");
        fs::create_directories(root / name / "masks");
    }
    for (const auto& mi : images) {
        mi.validate();
        if (mi.abnormality_id < 0 || mi.abnormality_id >= static_cast<int>(class_names.size()))
            throw index_error("write_dataset_dir: abnormality id " +
                              std::to_string(mi.abnormality_id) + " out of range");
        const auto& cls = class_names[static_cast<std::size_t>(mi.abnormality_id)];
        save_pnm(mi.image, root / cls / "images" / (mi.stem + ".ppm"));
        save_pnm(image_from_map(mi.mask), root / cls / "masks" / (mi.stem + ".pgm"));
    }
}

LoadedDataset load_dataset_dir(const fs::path& root,
                               const std::optional<std::vector<std::string>>& class_filter) {
    if (!fs::is_directory(root))
        throw data_error("dataset directory " + root.string() + " does not exist");

    std::vector<std::string> names;
    if (class_filter) {
        names = *class_filter;
        for (const auto& n : names)
            if (!fs::is_directory(root / n))
                throw data_error("dataset class '" + n + "' not found under " + root.string());
    } else {
        for (const auto& entry : fs::directory_iterator(root))
            if (entry.is_directory()) names.push_back(entry.path().filename().string());
        std::sort(names.begin(), names.end());
    }
    if (names.empty()) throw data_error("dataset directory " + root.string() + " has no classes");

    LoadedDataset out;
    out.class_names = names;
    for (std::size_t ci = 0; ci < names.size(); ++ci) {
        const fs::path img_dir = root / names[ci] / "images";
        const fs::path mask_dir = root / names[ci] / "masks";
        if (!fs::is_directory(img_dir) || !fs::is_directory(mask_dir))
            throw data_error("class '" + names[ci] + "' lacks images/ or masks/ under " +
                             root.string());
        std::map<std::string, fs::path> stems;
        for (const auto& entry : fs::directory_iterator(img_dir))
            if (entry.is_regular_file()) stems[entry.path().stem().string()] = entry.path();
        if (stems.empty()) throw data_error("class '" + names[ci] + "' has no images");
        for (const auto& [stem, img_path] : stems) {
            const fs::path mask_path = mask_dir / (stem + ".pgm");
            if (!fs::exists(mask_path))
                throw data_error("image '" + stem + "' of class '" + names[ci] +
                                 "' has no paired mask " + mask_path.string());
            MaskedImage mi;
            mi.image = load_pnm(img_path);
            mi.mask = mask_from_image(load_pnm(mask_path));
            mi.abnormality_id = static_cast<int>(ci);
            mi.stem = stem;
            mi.validate();
            out.images.push_back(std::move(mi));
        }
    }
    return out;
}

DatasetSplit split_dataset(const LoadedDataset& dataset, double test_fraction,
                           std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw config_error("split: test fraction must be in [0, 1)");
    DatasetSplit split;
    for (std::size_t ci = 0; ci < dataset.class_names.size(); ++ci) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < dataset.images.size(); ++i)
            if (dataset.images[i].abnormality_id == static_cast<int>(ci)) idx.push_back(i);
        Rng rng(mix_seed(seed, 100 + ci));
        shuffle_indices(idx, rng);
        const std::size_t n_test = static_cast<std::size_t>(test_fraction * idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_test ? split.test : split.train).push_back(dataset.images[idx[i]]);
    }
    return split;
}

} // namespace bifurc
