#include "bifurc/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

namespace bifurc {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "bifurcnet-model";

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

struct NamedTensor {
    std::string name;
    const TensorF* tensor;
};

ordered_json arch_to_json(const ArchitectureSpec& a) {
    return ordered_json{{"in_channels", a.in_channels}, {"in_height", a.in_height},
                        {"in_width", a.in_width},       {"conv_widths", a.conv_widths},
                        {"kernel", a.kernel},           {"fc_widths", a.fc_widths},
                        {"outputs", a.outputs}};
}

ArchitectureSpec arch_from_json(const ordered_json& j) {
    ArchitectureSpec a;
    a.in_channels = j.at("in_channels").get<int>();
    a.in_height = j.at("in_height").get<int>();
    a.in_width = j.at("in_width").get<int>();
    a.conv_widths = j.at("conv_widths").get<std::vector<int>>();
    a.kernel = j.at("kernel").get<int>();
    a.fc_widths = j.at("fc_widths").get<std::vector<int>>();
    a.outputs = j.at("outputs").get<int>();
    return a;
}

void collect_network(const Network<float>& net, const std::string& prefix,
                     std::vector<NamedTensor>& out) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        out.push_back({prefix + "." + std::to_string(i) + ".weights", &net.layers[i].weights.weights});
        out.push_back({prefix + "." + std::to_string(i) + ".bias", &net.layers[i].weights.bias});
    }
}

void write_container(const std::filesystem::path& path, ordered_json manifest,
                     const std::vector<NamedTensor>& tensors) {
    ordered_json table = ordered_json::array();
    std::size_t offset = 0;
    for (const auto& nt : tensors) {
        const std::size_t bytes = nt.tensor->numel() * sizeof(float);
        table.push_back(ordered_json{{"name", nt.name},
                                     {"shape", nt.tensor->shape},
                                     {"offset", offset},
                                     {"bytes", bytes},
                                     {"crc32", crc32(nt.tensor->ptr(), bytes)}});
        offset += bytes;
    }
    manifest["tensors"] = std::move(table);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw format_error(path.string() + ": cannot open for writing");
    out << manifest.dump() << "\n";
    static_assert(std::endian::native == std::endian::little,
                  "model container writes little-endian float32");
    for (const auto& nt : tensors)
        out.write(reinterpret_cast<const char*>(nt.tensor->ptr()),
                  static_cast<std::streamsize>(nt.tensor->numel() * sizeof(float)));
    if (!out) throw format_error(path.string() + ": write failed");
}

struct Container {
    ordered_json manifest;
    std::string blobs;
};

Container read_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error(path.string() + ": cannot open file");
    std::string manifest_line;
    if (!std::getline(in, manifest_line))
        throw format_error(path.string() + ": missing manifest line");
    Container c;
    try {
        c.manifest = ordered_json::parse(manifest_line);
    } catch (const ordered_json::parse_error& e) {
        throw format_error(path.string() + ": manifest is not valid JSON: " + e.what());
    }
    if (c.manifest.value("format", "") != kFormatName)
        throw format_error(path.string() + ": not a " + std::string(kFormatName) + " file");
    if (c.manifest.value("version", -1) != kFormatVersion)
        throw format_error(path.string() + ": unsupported format version " +
                           std::to_string(c.manifest.value("version", -1)) + ", expected " +
                           std::to_string(kFormatVersion));
    c.blobs.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return c;
}

// Pulls one tensor out of the blob section, verifying geometry and checksum.
TensorF take_tensor(const Container& c, const ordered_json& entry,
                    const std::filesystem::path& path) {
    const std::string name = entry.at("name").get<std::string>();
    const std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    const std::size_t bytes = entry.at("bytes").get<std::size_t>();
    const std::uint32_t want_crc = entry.at("crc32").get<std::uint32_t>();

    if (offset + bytes > c.blobs.size())
        throw format_error(path.string() + ": tensor '" + name + "' extends past end of file (" +
                           std::to_string(offset + bytes) + " > " +
                           std::to_string(c.blobs.size()) + " blob bytes)");
    const std::uint32_t got_crc = crc32(c.blobs.data() + offset, bytes);
    if (got_crc != want_crc)
        throw format_error(path.string() + ": checksum mismatch for tensor '" + name + "'");

    TensorF t(shape);
    if (t.numel() * sizeof(float) != bytes)
        throw format_error(path.string() + ": tensor '" + name + "' byte count " +
                           std::to_string(bytes) + " does not match shape " + shape_str(shape));
    std::memcpy(t.ptr(), c.blobs.data() + offset, bytes);
    return t;
}

// Fills a skeleton network's tensors by name from the container.
void load_network_tensors(Network<float>& net, const std::string& prefix, const Container& c,
                          std::unordered_map<std::string, const ordered_json*>& index,
                          const std::filesystem::path& path) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        for (const char* part : {"weights", "bias"}) {
            const std::string name = prefix + "." + std::to_string(i) + "." + part;
            auto it = index.find(name);
            if (it == index.end())
                throw format_error(path.string() + ": manifest lacks tensor '" + name + "'");
            TensorF t = take_tensor(c, *it->second, path);
            TensorF& dst = std::string(part) == "weights" ? net.layers[i].weights.weights
                                                          : net.layers[i].weights.bias;
            if (t.shape != dst.shape)
                throw format_error(path.string() + ": tensor '" + name + "' has shape " +
                                   shape_str(t.shape) + ", architecture expects " +
                                   shape_str(dst.shape));
            dst = std::move(t);
        }
    }
}

std::unordered_map<std::string, const ordered_json*> tensor_index(const Container& c) {
    std::unordered_map<std::string, const ordered_json*> index;
    for (const auto& entry : c.manifest.at("tensors"))
        index[entry.at("name").get<std::string>()] = &entry;
    return index;
}

} // namespace

std::uint32_t crc32(const void* data, std::size_t size) {
    static const auto table = make_crc_table();
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < size; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void save_model(const MergedModel& model, const std::filesystem::path& path) {
    if (!model.trained()) throw state_error("save_model: model has no trained weights");
    ordered_json manifest{{"format", kFormatName},
                          {"version", kFormatVersion},
                          {"model_type", "merged"},
                          {"arch", arch_to_json(model.arch)},
                          {"channel_mode", to_string(model.mode)},
                          {"class_names", model.class_names}};
    std::vector<NamedTensor> tensors;
    collect_network(model.primary, "primary", tensors);
    for (std::size_t i = 0; i < model.seg_heads.size(); ++i)
        collect_network(model.seg_heads[i], "seg_head." + std::to_string(i), tensors);
    for (std::size_t i = 0; i < model.cls_heads.size(); ++i)
        collect_network(model.cls_heads[i], "cls_head." + std::to_string(i), tensors);
    write_container(path, std::move(manifest), tensors);
}

MergedModel load_model(const std::filesystem::path& path) {
    Container c = read_container(path);
    if (c.manifest.value("model_type", "") != "merged")
        throw format_error(path.string() + ": model_type '" +
                           c.manifest.value("model_type", "") + "', expected 'merged'");
    MergedModel model;
    model.arch = arch_from_json(c.manifest.at("arch"));
    model.arch.validate();
    if (c.manifest.contains("channel_mode"))
        model.mode = channel_mode_from_string(c.manifest.at("channel_mode").get<std::string>());
    model.class_names = c.manifest.at("class_names").get<std::vector<std::string>>();
    if (model.class_names.size() < 2)
        throw format_error(path.string() + ": merged model needs at least 2 classes");

    auto index = tensor_index(c);
    // rebuild skeletons, then fill by name
    Network<float> full = make_network<float>(model.arch, 0);
    model.primary = conv_part(full);
    const ArchitectureSpec head_arch = model.head_arch();
    model.seg_heads.assign(model.class_names.size(), Network<float>());
    model.cls_heads.assign(model.class_names.size(), Network<float>());
    load_network_tensors(model.primary, "primary", c, index, path);
    for (std::size_t i = 0; i < model.class_names.size(); ++i) {
        model.seg_heads[i] = make_network<float>(head_arch, 0);
        model.cls_heads[i] = make_network<float>(head_arch, 0);
        load_network_tensors(model.seg_heads[i], "seg_head." + std::to_string(i), c, index, path);
        load_network_tensors(model.cls_heads[i], "cls_head." + std::to_string(i), c, index, path);
    }
    return model;
}

void save_network(const Network<float>& net, const std::string& class_name,
                  const std::filesystem::path& path) {
    if (net.layers.empty()) throw state_error("save_network: network has no layers");
    ordered_json manifest{{"format", kFormatName},
                          {"version", kFormatVersion},
                          {"model_type", "separate"},
                          {"arch", arch_to_json(net.arch)},
                          {"class_names", std::vector<std::string>{class_name}}};
    std::vector<NamedTensor> tensors;
    collect_network(net, "net", tensors);
    write_container(path, std::move(manifest), tensors);
}

LoadedNetwork load_network(const std::filesystem::path& path) {
    Container c = read_container(path);
    if (c.manifest.value("model_type", "") != "separate")
        throw format_error(path.string() + ": model_type '" +
                           c.manifest.value("model_type", "") + "', expected 'separate'");
    LoadedNetwork out;
    out.net = make_network<float>(arch_from_json(c.manifest.at("arch")), 0);
    const auto names = c.manifest.at("class_names").get<std::vector<std::string>>();
    out.class_name = names.empty() ? "" : names[0];
    auto index = tensor_index(c);
    load_network_tensors(out.net, "net", c, index, path);
    return out;
}

} // namespace bifurc
