#ifndef BIFURC_MODEL_IO_HPP
#define BIFURC_MODEL_IO_HPP

#include <filesystem>

#include "bifurc/model.hpp"

namespace bifurc {

// Model container: one line of JSON manifest (format version, architecture,
// class names, tensor table with name/shape/byte offset/CRC32), then the raw
// tensor blobs as little-endian float32 in manifest order. Offsets are
// relative to the first byte after the manifest's newline.

void save_model(const MergedModel& model, const std::filesystem::path& path);
MergedModel load_model(const std::filesystem::path& path);

// Same container for one separate (single-abnormality) network.
void save_network(const Network<float>& net, const std::string& class_name,
                  const std::filesystem::path& path);
struct LoadedNetwork {
    Network<float> net;
    std::string class_name;
};
LoadedNetwork load_network(const std::filesystem::path& path);

// IEEE CRC-32 of a byte range (poly 0xEDB88320).
std::uint32_t crc32(const void* data, std::size_t size);

} // namespace bifurc

#endif
