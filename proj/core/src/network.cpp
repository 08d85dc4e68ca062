#include "bifurc/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bifurc {

namespace {

// Gathers samples[idx[first..first+n)] into a contiguous [n, C, H, W] batch.
TensorF gather_batch(std::span<const SampleRef> samples, const std::vector<std::size_t>& idx,
                     std::size_t first, std::size_t n, const ArchitectureSpec& arch,
                     std::vector<int>& labels) {
    TensorF batch({static_cast<int>(n), arch.in_channels, arch.in_height, arch.in_width});
    const std::size_t volume =
        static_cast<std::size_t>(arch.in_channels) * arch.in_height * arch.in_width;
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SampleRef& s = samples[idx[first + i]];
        std::copy(s.values, s.values + volume, batch.ptr() + i * volume);
        labels[i] = s.label;
    }
    return batch;
}

} // namespace

std::vector<EpochLog> train_sgd(Network<float>& net, std::span<const SampleRef> samples,
                                const TrainConfig& config,
                                const std::function<void(const EpochLog&)>& on_epoch) {
    config.validate();
    if (samples.empty()) throw data_error("train_sgd: empty sample set");

    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng shuffle_rng(mix_seed(config.seed, 1));
    std::vector<EpochLog> logs;
    std::vector<int> labels;
    const float lr = static_cast<float>(config.learning_rate);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_indices(idx, shuffle_rng);
        double loss_sum = 0.0;
        std::size_t correct = 0, seen = 0;
        for (std::size_t first = 0; first < idx.size(); first += config.batch_size) {
            const std::size_t n = std::min<std::size_t>(config.batch_size, idx.size() - first);
            TensorF batch = gather_batch(samples, idx, first, n, net.arch, labels);
            ForwardCache<float> cache;
            TensorF logits = net.forward_batch(batch, &cache);
            auto [loss, grad] = softmax_cross_entropy_batch(logits, labels);
            if (!std::isfinite(loss))
                throw numeric_error("training loss is not finite at epoch " +
                                    std::to_string(epoch + 1));
            loss_sum += static_cast<double>(loss) * n;
            for (std::size_t s = 0; s < n; ++s) {
                const float* row = logits.ptr() + s * net.arch.outputs;
                int best = 0;
                for (int j = 1; j < net.arch.outputs; ++j)
                    if (row[j] > row[best]) best = j;
                if (best == labels[s]) ++correct;
            }
            seen += n;
            NetGradients<float> grads = net.backward_batch(cache, grad);
            net.sgd_update(grads, lr);
        }
        EpochLog log{epoch + 1, loss_sum / static_cast<double>(seen),
                     static_cast<double>(correct) / static_cast<double>(seen)};
        logs.push_back(log);
        if (on_epoch) on_epoch(log);
    }
    return logs;
}

std::vector<int> predict(const Network<float>& net, std::span<const SampleRef> samples,
                         int batch_size) {
    std::vector<int> out(samples.size());
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<int> labels;
    for (std::size_t first = 0; first < samples.size(); first += batch_size) {
        const std::size_t n = std::min<std::size_t>(batch_size, samples.size() - first);
        TensorF batch = gather_batch(samples, idx, first, n, net.arch, labels);
        TensorF logits = net.forward_batch(batch);
        for (std::size_t s = 0; s < n; ++s) {
            const float* row = logits.ptr() + s * net.arch.outputs;
            int best = 0;
            for (int j = 1; j < net.arch.outputs; ++j)
                if (row[j] > row[best]) best = j;
            out[first + s] = best;
        }
    }
    return out;
}

double eval_accuracy(const Network<float>& net, std::span<const SampleRef> samples,
                     int batch_size) {
    if (samples.empty()) throw data_error("eval_accuracy: empty sample set");
    std::vector<int> pred = predict(net, samples, batch_size);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (pred[i] == samples[i].label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

namespace {

// Runs layers [from, end) on x (the cached input of layer `from`) and returns
// the loss. Used by the finite-difference loop so a perturbation of layer
// `from` only pays for the suffix of the network.
double loss_from_layer(const Network<double>& net, std::size_t from, TensorD x, int label) {
    for (std::size_t li = from; li < net.layers.size(); ++li) {
        const auto& l = net.layers[li];
        if (l.weights.kind == LayerKind::Conv2d) {
            x = conv2d_forward_batch(x, l.weights);
        } else {
            if (x.ndim() == 4) x.reshape({x.dim(0), x.dim(1) * x.dim(2) * x.dim(3)});
            x = fc_forward_batch(x, l.weights);
        }
        if (l.relu_after) x = relu(x);
    }
    x.reshape({x.dim(1)});
    auto [loss, grad] = softmax_cross_entropy(x, label);
    return loss;
}

} // namespace

double gradient_check(const Network<double>& net, const Tensor<double>& input, int label,
                      double epsilon) {
    if (epsilon < 1e-6 || epsilon > 1e-4)
        throw config_error("gradient_check: epsilon must be in [1e-6, 1e-4]");

    TensorD batch = input;
    batch.reshape({1, input.dim(0), input.dim(1), input.dim(2)});

    ForwardCache<double> cache;
    TensorD logits = net.forward_batch(batch, &cache);
    TensorD flat = logits;
    flat.reshape({logits.dim(1)});
    auto [loss, grad_logits_1d] = softmax_cross_entropy(flat, label);
    if (!std::isfinite(loss)) throw numeric_error("gradient_check: non-finite loss");
    TensorD grad_logits = grad_logits_1d;
    grad_logits.reshape({1, logits.dim(1)});
    NetGradients<double> analytic = net.backward_batch(cache, grad_logits);

    Network<double> probe = net; // perturbed copy
    double worst = 0.0;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const TensorD& layer_input = li == 0 ? cache.input : cache.post[li - 1];
        auto check_tensor = [&](TensorD& w, const TensorD& g) {
            for (std::size_t i = 0; i < w.numel(); ++i) {
                const double keep = w[i];
                w[i] = keep + epsilon;
                const double lp = loss_from_layer(probe, li, layer_input, label);
                w[i] = keep - epsilon;
                const double lm = loss_from_layer(probe, li, layer_input, label);
                w[i] = keep;
                if (!std::isfinite(lp) || !std::isfinite(lm))
                    throw numeric_error("gradient_check: non-finite loss during perturbation");
                const double numeric = (lp - lm) / (2.0 * epsilon);
                const double denom = std::max({std::abs(g[i]), std::abs(numeric), 1e-6});
                worst = std::max(worst, std::abs(g[i] - numeric) / denom);
            }
        };
        check_tensor(probe.layers[li].weights.weights, analytic.layers[li].weights);
        check_tensor(probe.layers[li].weights.bias, analytic.layers[li].bias);
    }
    return worst;
}

} // namespace bifurc
