#ifndef BIFURC_MODEL_HPP
#define BIFURC_MODEL_HPP

#include <string>
#include <vector>

#include "bifurc/network.hpp"
#include "bifurc/patches.hpp"

namespace bifurc {

// The bifurcated model: one shared convolutional primary feeding n
// segmentation heads and n classification heads. The primary is a conv-only
// Network; each head is an FC-only Network consuming the flattened primary
// output.
struct MergedModel {
    ArchitectureSpec arch;                  // full per-head architecture (outputs = 2)
    Network<float> primary;                 // conv layers only
    std::vector<Network<float>> seg_heads;  // one 2-way FC head per class
    std::vector<Network<float>> cls_heads;  // one 2-way FC head per class
    std::vector<std::string> class_names;
    ChannelMode mode = ChannelMode::Wce3;   // input recipe the model was trained on

    int classes() const { return static_cast<int>(class_names.size()); }

    bool trained() const {
        return !primary.layers.empty() && !seg_heads.empty() &&
               seg_heads.size() == class_names.size();
    }

    std::size_t parameter_count() const {
        std::size_t n = primary.parameter_count();
        for (const auto& h : seg_heads) n += h.parameter_count();
        for (const auto& h : cls_heads) n += h.parameter_count();
        return n;
    }

    // Per-head architecture of the FC part.
    ArchitectureSpec head_arch() const {
        ArchitectureSpec a;
        a.in_channels = arch.flatten_size();
        a.in_height = a.in_width = 1;
        a.conv_widths = {};
        a.fc_widths = arch.fc_widths;
        a.outputs = arch.outputs;
        return a;
    }

    // Standalone network equivalent to primary + the given head; used to
    // check that activation sharing changes nothing.
    Network<float> compose(const Network<float>& head) const {
        Network<float> net;
        net.arch = arch;
        net.layers = primary.layers;
        net.layers.insert(net.layers.end(), head.layers.begin(), head.layers.end());
        return net;
    }
    Network<float> compose_seg(int i) const { return compose(seg_heads.at(static_cast<std::size_t>(i))); }
    Network<float> compose_cls(int i) const { return compose(cls_heads.at(static_cast<std::size_t>(i))); }
};

// Splits a full separate network into its conv part (primary) and FC part.
Network<float> conv_part(const Network<float>& net);
Network<float> fc_part(const Network<float>& net);

} // namespace bifurc

#endif
