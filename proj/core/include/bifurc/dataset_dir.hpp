#ifndef BIFURC_DATASET_DIR_HPP
#define BIFURC_DATASET_DIR_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bifurc/patches.hpp"

namespace bifurc {

// On-disk dataset layout:
//   <root>/<class-name>/images/*.ppm
//   <root>/<class-name>/masks/*.pgm
// paired by filename stem. Class order is the sorted subdirectory order
// unless an explicit name list is given.

struct LoadedDataset {
    std::vector<std::string> class_names;
    std::vector<MaskedImage> images; // abnormality_id indexes class_names
};

void write_dataset_dir(const std::filesystem::path& root,
                       const std::vector<MaskedImage>& images,
                       const std::vector<std::string>& class_names);

LoadedDataset load_dataset_dir(const std::filesystem::path& root,
                               const std::optional<std::vector<std::string>>& class_filter = {});

// Seeded per-class split by whole image (never by patch).
struct DatasetSplit {
    std::vector<MaskedImage> train;
    std::vector<MaskedImage> test;
};
DatasetSplit split_dataset(const LoadedDataset& dataset, double test_fraction, std::uint64_t seed);

} // namespace bifurc

#endif
