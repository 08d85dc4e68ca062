#include "bifurc/mnist.hpp"

#include <cstdint>
#include <fstream>

#include "bifurc/errors.hpp"

namespace bifurc {

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::filesystem::path& path, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw format_error(path.string() + ": truncated while reading " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

} // namespace

MnistData load_mnist(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw format_error(images_path.string() + ": cannot open file");
    const std::uint32_t img_magic = read_be32(img, images_path, "magic");
    if (img_magic != 0x00000803u)
        throw format_error(images_path.string() + ": bad image magic 0x" + [&] {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%08x", img_magic);
            return std::string(buf);
        }() + ", expected 0x00000803");
    const std::uint32_t n = read_be32(img, images_path, "count");
    const std::uint32_t rows = read_be32(img, images_path, "rows");
    const std::uint32_t cols = read_be32(img, images_path, "cols");
    if (rows != 28 || cols != 28)
        throw format_error(images_path.string() + ": unsupported image size " +
                           std::to_string(rows) + "x" + std::to_string(cols) + ", expected 28x28");

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw format_error(labels_path.string() + ": cannot open file");
    const std::uint32_t lab_magic = read_be32(lab, labels_path, "magic");
    if (lab_magic != 0x00000801u)
        throw format_error(labels_path.string() + ": bad label magic, expected 0x00000801");
    const std::uint32_t n_lab = read_be32(lab, labels_path, "count");
    if (n_lab != n)
        throw format_error(labels_path.string() + ": label count " + std::to_string(n_lab) +
                           " does not match image count " + std::to_string(n));

    MnistData data;
    data.images = TensorF({static_cast<int>(n), 1, 28, 28});
    std::vector<std::uint8_t> row(784);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!img.read(reinterpret_cast<char*>(row.data()), 784))
            throw format_error(images_path.string() + ": truncated at sample " + std::to_string(i));
        float* dst = data.images.ptr() + static_cast<std::size_t>(i) * 784;
        for (std::size_t j = 0; j < 784; ++j) dst[j] = row[j] / 255.0f;
    }

    data.labels.resize(n);
    std::vector<std::uint8_t> lab_bytes(n);
    if (!lab.read(reinterpret_cast<char*>(lab_bytes.data()), static_cast<std::streamsize>(n)))
        throw format_error(labels_path.string() + ": truncated label payload");
    for (std::uint32_t i = 0; i < n; ++i) {
        if (lab_bytes[i] > 9)
            throw format_error(labels_path.string() + ": label value " +
                               std::to_string(lab_bytes[i]) + " out of range at index " +
                               std::to_string(i));
        data.labels[i] = lab_bytes[i];
    }
    return data;
}

} // namespace bifurc
