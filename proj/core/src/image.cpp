#include "bifurc/image.hpp"

#include <cctype>
#include <fstream>

namespace bifurc {

namespace {

[[noreturn]] void bad_format(const std::filesystem::path& path, std::size_t offset,
                             const std::string& what) {
    throw format_error(path.string() + ": " + what + " (byte offset " + std::to_string(offset) +
                       ")");
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& buf, std::size_t& pos,
                       const std::filesystem::path& path) {
    while (pos < buf.size()) {
        if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
            ++pos;
        } else if (buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= buf.size()) bad_format(path, pos, "truncated header");
    std::size_t start = pos;
    while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
    return buf.substr(start, pos - start);
}

int parse_dim(const std::string& tok, const std::filesystem::path& path, std::size_t offset) {
    for (char ch : tok)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            bad_format(path, offset, "non-numeric header field '" + tok + "'");
    long v = std::stol(tok);
    if (v <= 0 || v > 1 << 20) bad_format(path, offset, "dimension out of range: " + tok);
    return static_cast<int>(v);
}

} // namespace

Image load_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error(path.string() + ": cannot open file");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 2) bad_format(path, 0, "file too short for a PNM magic");
    int channels;
    if (buf[0] == 'P' && buf[1] == '5')
        channels = 1;
    else if (buf[0] == 'P' && buf[1] == '6')
        channels = 3;
    else
        bad_format(path, 0, "bad magic '" + buf.substr(0, 2) + "', expected P5 or P6");

    std::size_t pos = 2;
    const int width = parse_dim(next_token(buf, pos, path), path, pos);
    const int height = parse_dim(next_token(buf, pos, path), path, pos);
    const std::string maxval = next_token(buf, pos, path);
    if (maxval != "255") bad_format(path, pos, "maxval " + maxval + " unsupported, expected 255");
    if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos])))
        bad_format(path, pos, "missing whitespace after maxval");
    ++pos; // single whitespace byte separates header from payload

    Image img(height, width, channels);
    const std::size_t need = img.pixels.size();
    if (buf.size() - pos < need)
        bad_format(path, buf.size(), "truncated payload, need " + std::to_string(need) +
                                         " bytes from offset " + std::to_string(pos));
    std::copy_n(buf.data() + pos, need, reinterpret_cast<char*>(img.pixels.data()));
    return img;
}

void save_pnm(const Image& image, const std::filesystem::path& path) {
    if (image.channels != 1 && image.channels != 3)
        throw format_error("save_pnm: " + std::to_string(image.channels) +
                           "-channel image cannot be written as PNM");
    if (image.pixels.size() !=
        static_cast<std::size_t>(image.height) * image.width * image.channels)
        throw dimension_error("save_pnm: pixel buffer does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw format_error(path.string() + ": cannot open for writing");
    out << (image.channels == 1 ? "P5" : "P6") << "\n"
        << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw format_error(path.string() + ": write failed");
}

BinaryMap mask_from_image(const Image& image) {
    if (image.channels != 1)
        throw dimension_error("mask_from_image: expected a single-channel mask, got " +
                              std::to_string(image.channels) + " channels");
    BinaryMap map(image.height, image.width);
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        map.bits[i] = image.pixels[i] >= 128 ? 1 : 0;
    return map;
}

Image image_from_map(const BinaryMap& map) {
    Image img(map.height, map.width, 1);
    for (std::size_t i = 0; i < map.bits.size(); ++i) img.pixels[i] = map.bits[i] ? 255 : 0;
    return img;
}

} // namespace bifurc
