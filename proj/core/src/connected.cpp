#include "bifurc/connected.hpp"

#include <cstdint>
#include <vector>

namespace bifurc {

BinaryMap largest_connected_component(const BinaryMap& map) {
    const int h = map.height, w = map.width;
    const std::size_t total = static_cast<std::size_t>(h) * w;
    std::vector<std::int32_t> label(total, 0);
    std::vector<std::size_t> sizes{0}; // sizes[0] unused

    std::vector<std::size_t> stack;
    std::int32_t next = 1;
    std::int32_t best = 0;
    std::size_t best_size = 0;
    for (std::size_t start = 0; start < total; ++start) {
        if (!map.bits[start] || label[start]) continue;
        // flood fill, 8-connected
        std::size_t size = 0;
        stack.clear();
        stack.push_back(start);
        label[start] = next;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++size;
            const int y = static_cast<int>(p / w), x = static_cast<int>(p % w);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dy == 0 && dx == 0) continue;
                    const int ny = y + dy, nx = x + dx;
                    if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                    const std::size_t np = static_cast<std::size_t>(ny) * w + nx;
                    if (map.bits[np] && !label[np]) {
                        label[np] = next;
                        stack.push_back(np);
                    }
                }
            }
        }
        sizes.push_back(size);
        // strict > keeps the earliest-starting component on ties
        if (size > best_size) {
            best_size = size;
            best = next;
        }
        ++next;
    }

    if (best == 0) return map; // no true pixels
    BinaryMap out(h, w);
    for (std::size_t i = 0; i < total; ++i) out.bits[i] = label[i] == best ? 1 : 0;
    return out;
}

BinaryMap map_intersection(const BinaryMap& a, const BinaryMap& b) {
    if (a.height != b.height || a.width != b.width)
        throw dimension_error("map_intersection: " + std::to_string(a.height) + "x" +
                              std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                              std::to_string(b.width));
    BinaryMap out(a.height, a.width);
    for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = a.bits[i] & b.bits[i];
    return out;
}

} // namespace bifurc
