#ifndef BIFURC_MNIST_HPP
#define BIFURC_MNIST_HPP

#include <filesystem>
#include <vector>

#include "bifurc/tensor.hpp"

namespace bifurc {

struct MnistData {
    TensorF images; // [N, 1, 28, 28], values scaled to [0,1]
    std::vector<int> labels;

    int count() const { return images.ndim() ? images.dim(0) : 0; }
    const float* sample(std::size_t i) const { return images.ptr() + i * 28 * 28; }
};

// IDX pair loader. Image magic must be 0x00000803, label magic 0x00000801,
// dimensions big-endian; the two files must agree on the sample count.
MnistData load_mnist(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path);

} // namespace bifurc

#endif
