#ifndef BIFURC_NETWORK_HPP
#define BIFURC_NETWORK_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bifurc/layers.hpp"

namespace bifurc {

// Network shape: a convolutional primary part followed by fully connected
// layers, ReLU after every layer except the last FC. Valid padding, stride 1,
// no pooling; the last conv output is flattened before the first FC.
struct ArchitectureSpec {
    int in_channels = 3;
    int in_height = 9;
    int in_width = 9;
    std::vector<int> conv_widths{64, 32};
    int kernel = 3;
    std::vector<int> fc_widths{60, 40}; // hidden FC sizes, output layer excluded
    int outputs = 2;

    // conv 64/32 + FC 60/40 patch classifier
    static ArchitectureSpec medical(int outputs = 2) {
        ArchitectureSpec a;
        a.in_channels = 3;
        a.in_height = a.in_width = 9;
        a.conv_widths = {64, 32};
        a.fc_widths = {60, 40};
        a.outputs = outputs;
        return a;
    }

    // conv 64/32 + FC 200/100 over 28x28 grayscale
    static ArchitectureSpec mnist(int outputs = 2) {
        ArchitectureSpec a;
        a.in_channels = 1;
        a.in_height = a.in_width = 28;
        a.conv_widths = {64, 32};
        a.fc_widths = {200, 100};
        a.outputs = outputs;
        return a;
    }

    void validate() const {
        if (in_channels <= 0 || in_height <= 0 || in_width <= 0 || kernel <= 0 || outputs <= 0)
            throw config_error("architecture: all dimensions must be positive");
        for (int wdt : conv_widths)
            if (wdt <= 0) throw config_error("architecture: non-positive conv width");
        for (int wdt : fc_widths)
            if (wdt <= 0) throw config_error("architecture: non-positive fc width");
        int h = in_height, w = in_width;
        for (std::size_t i = 0; i < conv_widths.size(); ++i) {
            h -= kernel - 1;
            w -= kernel - 1;
            if (h <= 0 || w <= 0)
                throw config_error("architecture: spatial extent exhausted after conv layer " +
                                   std::to_string(i));
        }
    }

    int conv_out_height() const { return in_height - static_cast<int>(conv_widths.size()) * (kernel - 1); }
    int conv_out_width() const { return in_width - static_cast<int>(conv_widths.size()) * (kernel - 1); }

    // flattened size of the last conv output
    int flatten_size() const {
        int ch = conv_widths.empty() ? in_channels : conv_widths.back();
        return ch * conv_out_height() * conv_out_width();
    }

    bool operator==(const ArchitectureSpec&) const = default;
};

template <typename T>
struct NetLayer {
    LayerWeights<T> weights;
    bool relu_after = false;
};

template <typename T>
struct NetGradients {
    std::vector<LayerGrads<T>> layers;
};

// Per-call activation cache; forward fills it, backward consumes it.
// Keeping it outside the network means concurrent read-only inference
// never shares mutable state.
template <typename T>
struct ForwardCache {
    Tensor<T> input;              // [N, C, H, W]
    std::vector<Tensor<T>> pre;   // pre-activation output of each layer
    std::vector<Tensor<T>> post;  // post-activation (== pre where no relu)
    bool valid = false;
};

template <typename T>
struct Network {
    ArchitectureSpec arch;
    std::vector<NetLayer<T>> layers;

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.weights.parameter_count();
        return n;
    }

    std::size_t primary_layer_count() const {
        std::size_t n = 0;
        while (n < layers.size() && layers[n].weights.kind == LayerKind::Conv2d) ++n;
        return n;
    }

    template <typename U>
    Network<U> cast() const {
        Network<U> out;
        out.arch = arch;
        out.layers.reserve(layers.size());
        for (const auto& l : layers)
            out.layers.push_back({l.weights.template cast<U>(), l.relu_after});
        return out;
    }

    // batch forward: input [N, C, H, W] -> logits [N, outputs]
    Tensor<T> forward_batch(const Tensor<T>& input, ForwardCache<T>* cache = nullptr) const {
        if (input.ndim() != 4)
            throw dimension_error("forward_batch expects [N,C,H,W], got " + shape_str(input.shape));
        if (cache) {
            cache->input = input;
            cache->pre.clear();
            cache->post.clear();
            cache->valid = false;
        }
        Tensor<T> x = input;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const auto& l = layers[li];
            if (l.weights.kind == LayerKind::Conv2d) {
                x = conv2d_forward_batch(x, l.weights);
            } else {
                if (x.ndim() == 4)
                    x.reshape({x.dim(0), x.dim(1) * x.dim(2) * x.dim(3)}); // flatten
                x = fc_forward_batch(x, l.weights);
            }
            if (cache) cache->pre.push_back(x);
            if (l.relu_after) x = relu(x);
            if (cache) cache->post.push_back(x);
        }
        if (cache) cache->valid = true;
        return x;
    }

    // single-sample forward: input [C, H, W] -> logits [outputs]
    Tensor<T> forward(const Tensor<T>& input, ForwardCache<T>* cache = nullptr) const {
        Tensor<T> b = input;
        if (b.ndim() != 3)
            throw dimension_error("forward expects [C,H,W], got " + shape_str(input.shape));
        b.reshape({1, input.dim(0), input.dim(1), input.dim(2)});
        Tensor<T> y = forward_batch(b, cache);
        y.reshape({y.dim(1)});
        return y;
    }

    // grad_logits [N, outputs] -> per-layer gradients (mean-scaled by caller)
    NetGradients<T> backward_batch(const ForwardCache<T>& cache, const Tensor<T>& grad_logits) const {
        if (!cache.valid || cache.pre.size() != layers.size())
            throw state_error("backward called without a matching forward cache");
        NetGradients<T> grads;
        grads.layers.resize(layers.size());
        Tensor<T> g = grad_logits;
        for (int li = static_cast<int>(layers.size()) - 1; li >= 0; --li) {
            const auto& l = layers[static_cast<std::size_t>(li)];
            // undo the flatten when crossing the FC/conv boundary
            if (g.shape != cache.pre[static_cast<std::size_t>(li)].shape)
                g.reshape(cache.pre[static_cast<std::size_t>(li)].shape);
            if (l.relu_after) g = relu_backward(g, cache.pre[static_cast<std::size_t>(li)]);
            Tensor<T> layer_input =
                li == 0 ? cache.input : cache.post[static_cast<std::size_t>(li - 1)];
            if (l.weights.kind == LayerKind::FullyConnected) {
                if (layer_input.ndim() == 4)
                    layer_input.reshape(
                        {layer_input.dim(0),
                         layer_input.dim(1) * layer_input.dim(2) * layer_input.dim(3)});
                grads.layers[static_cast<std::size_t>(li)] =
                    fc_backward_batch(g, layer_input, l.weights);
            } else {
                grads.layers[static_cast<std::size_t>(li)] =
                    conv2d_backward_batch(g, layer_input, l.weights);
            }
            g = grads.layers[static_cast<std::size_t>(li)].input;
        }
        return grads;
    }

    void sgd_update(const NetGradients<T>& grads, T lr) {
        if (grads.layers.size() != layers.size())
            throw dimension_error("sgd_update: gradient layer count mismatch");
        for (std::size_t i = 0; i < layers.size(); ++i)
            sgd_step(layers[i].weights, grads.layers[i], lr);
    }
};

using NetworkF = Network<float>;
using NetworkD = Network<double>;

// Builds the layer list for an architecture and He-initializes it from the seed.
template <typename T>
Network<T> make_network(const ArchitectureSpec& arch, std::uint64_t seed) {
    arch.validate();
    Network<T> net;
    net.arch = arch;
    Rng rng(seed);
    int in_ch = arch.in_channels;
    for (int width : arch.conv_widths) {
        NetLayer<T> l{LayerWeights<T>::conv(width, in_ch, arch.kernel), true};
        he_init(l.weights, rng);
        net.layers.push_back(std::move(l));
        in_ch = width;
    }
    int in_units = arch.flatten_size();
    for (int width : arch.fc_widths) {
        NetLayer<T> l{LayerWeights<T>::fc(width, in_units), true};
        he_init(l.weights, rng);
        net.layers.push_back(std::move(l));
        in_units = width;
    }
    NetLayer<T> out{LayerWeights<T>::fc(arch.outputs, in_units), false};
    he_init(out.weights, rng);
    net.layers.push_back(std::move(out));
    return net;
}

// ---- training ----

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 10;
    int batch_size = 32;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(learning_rate > 0.0)) throw config_error("learning rate must be positive");
        if (epochs <= 0) throw config_error("epochs must be positive");
        if (batch_size <= 0) throw config_error("batch size must be positive");
    }
};

// One training sample: pointer to C*H*W floats plus its class label.
struct SampleRef {
    const float* values;
    int label;
};

struct EpochLog {
    int epoch;
    double mean_loss;
    double accuracy;
};

// Plain minibatch SGD. Deterministic given (net weights, samples, config):
// the per-epoch shuffle derives from config.seed. Throws numeric_error if
// the loss stops being finite.
std::vector<EpochLog> train_sgd(Network<float>& net, std::span<const SampleRef> samples,
                                const TrainConfig& config,
                                const std::function<void(const EpochLog&)>& on_epoch = {});

// Fraction of samples whose argmax logit equals the label.
double eval_accuracy(const Network<float>& net, std::span<const SampleRef> samples,
                     int batch_size = 256);

// Per-sample predicted labels.
std::vector<int> predict(const Network<float>& net, std::span<const SampleRef> samples,
                         int batch_size = 256);

// ---- gradient verification ----

// Central-difference check of every weight and bias gradient in the network.
// Relative error uses max(|analytic|, |numeric|, 1e-6) as denominator.
// Only defined for double precision; epsilon must be in [1e-6, 1e-4].
double gradient_check(const Network<double>& net, const Tensor<double>& input, int label,
                      double epsilon);

} // namespace bifurc

#endif
