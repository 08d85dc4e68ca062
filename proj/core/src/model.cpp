#include "bifurc/model.hpp"

namespace bifurc {

Network<float> conv_part(const Network<float>& net) {
    Network<float> primary;
    primary.arch = net.arch;
    for (const auto& l : net.layers)
        if (l.weights.kind == LayerKind::Conv2d) primary.layers.push_back(l);
    return primary;
}

Network<float> fc_part(const Network<float>& net) {
    Network<float> head;
    head.arch.in_channels = net.arch.flatten_size();
    head.arch.in_height = head.arch.in_width = 1;
    head.arch.conv_widths = {};
    head.arch.fc_widths = net.arch.fc_widths;
    head.arch.outputs = net.arch.outputs;
    for (const auto& l : net.layers)
        if (l.weights.kind == LayerKind::FullyConnected) head.layers.push_back(l);
    return head;
}

} // namespace bifurc
