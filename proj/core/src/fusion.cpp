#include "bifurc/fusion.hpp"

namespace bifurc {

double similarity(const BinaryMap& seg, const BinaryMap& cls) {
    if (seg.height != cls.height || seg.width != cls.width)
        throw dimension_error("similarity: maps " + std::to_string(seg.height) + "x" +
                              std::to_string(seg.width) + " vs " + std::to_string(cls.height) +
                              "x" + std::to_string(cls.width));
    std::size_t s = 0, c = 0, both = 0;
    for (std::size_t i = 0; i < seg.bits.size(); ++i) {
        s += seg.bits[i] != 0;
        c += cls.bits[i] != 0;
        both += (seg.bits[i] & cls.bits[i]) != 0;
    }
    const double left = s == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(s);
    const double right = c == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(c);
    return (left + right) / 2.0;
}

int select_class(const BranchOutput& branch) {
    if (branch.seg.empty() || branch.seg.size() != branch.cls.size())
        throw dimension_error("select_class: need matching non-empty map sets");
    int best = 0;
    double best_sim = similarity(branch.seg[0], branch.cls[0]);
    for (std::size_t i = 1; i < branch.seg.size(); ++i) {
        const double sim = similarity(branch.seg[i], branch.cls[i]);
        if (sim > best_sim) { // strict: ties keep the smallest index
            best_sim = sim;
            best = static_cast<int>(i);
        }
    }
    return best;
}

FusionResult fuse(const BranchOutput& branch) {
    FusionResult result;
    result.similarities.reserve(branch.seg.size());
    for (std::size_t i = 0; i < branch.seg.size(); ++i)
        result.similarities.push_back(similarity(branch.seg[i], branch.cls[i]));

    const int k = select_class(branch);
    if (result.similarities[static_cast<std::size_t>(k)] > 0.0) {
        result.selected = k;
        result.final_map = largest_connected_component(branch.seg[static_cast<std::size_t>(k)]);
    } else {
        // no abnormality: all pairs fully disagree
        result.final_map = BinaryMap(branch.seg[0].height, branch.seg[0].width);
    }
    return result;
}

} // namespace bifurc
