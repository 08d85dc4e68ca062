#ifndef BIFURC_LAYERS_HPP
#define BIFURC_LAYERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bifurc/errors.hpp"
#include "bifurc/gemm.hpp"
#include "bifurc/rng.hpp"
#include "bifurc/tensor.hpp"

namespace bifurc {

enum class LayerKind { Conv2d, FullyConnected };

// Weights of one layer.
//   conv2d:          weights [out_ch, in_ch, k, k], bias [out_ch]
//   fully-connected: weights [out_units, in_units], bias [out_units]
template <typename T>
struct LayerWeights {
    LayerKind kind = LayerKind::FullyConnected;
    Tensor<T> weights;
    Tensor<T> bias;
    int kernel = 0; // conv spatial size k

    int out_units() const { return weights.dim(0); }
    int in_units() const { return weights.dim(1); }

    std::size_t parameter_count() const { return weights.numel() + bias.numel(); }

    template <typename U>
    LayerWeights<U> cast() const {
        LayerWeights<U> out;
        out.kind = kind;
        out.weights = weights.template cast<U>();
        out.bias = bias.template cast<U>();
        out.kernel = kernel;
        return out;
    }

    static LayerWeights conv(int out_ch, int in_ch, int k) {
        LayerWeights w;
        w.kind = LayerKind::Conv2d;
        w.weights = Tensor<T>({out_ch, in_ch, k, k});
        w.bias = Tensor<T>({out_ch});
        w.kernel = k;
        return w;
    }

    static LayerWeights fc(int out_units, int in_units) {
        LayerWeights w;
        w.kind = LayerKind::FullyConnected;
        w.weights = Tensor<T>({out_units, in_units});
        w.bias = Tensor<T>({out_units});
        return w;
    }
};

template <typename T>
struct LayerGrads {
    Tensor<T> input;   // gradient w.r.t. the layer input
    Tensor<T> weights; // gradient w.r.t. weights/kernels
    Tensor<T> bias;    // gradient w.r.t. bias
};

// He-style init: N(0, sqrt(2 / fan_in)) weights, zero bias.
template <typename T>
inline void he_init(LayerWeights<T>& layer, Rng& rng) {
    std::size_t fan_in = layer.kind == LayerKind::Conv2d
                             ? static_cast<std::size_t>(layer.weights.dim(1)) * layer.kernel * layer.kernel
                             : static_cast<std::size_t>(layer.weights.dim(1));
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& w : layer.weights.data) w = static_cast<T>(normal01(rng) * stddev);
    layer.bias.fill(T(0));
}

namespace detail {

// im2col for valid-padding stride-1 conv: col is [in_ch*k*k, oh*ow].
template <typename T>
inline void im2col(const T* input, int in_ch, int h, int w, int k, T* col) {
    const int oh = h - k + 1;
    const int ow = w - k + 1;
    const std::size_t ohw = static_cast<std::size_t>(oh) * ow;
    T* dst = col;
    for (int c = 0; c < in_ch; ++c) {
        const T* plane = input + static_cast<std::size_t>(c) * h * w;
        for (int ki = 0; ki < k; ++ki) {
            for (int kj = 0; kj < k; ++kj) {
                for (int y = 0; y < oh; ++y) {
                    const T* src = plane + static_cast<std::size_t>(y + ki) * w + kj;
                    for (int x = 0; x < ow; ++x) dst[static_cast<std::size_t>(y) * ow + x] = src[x];
                }
                dst += ohw;
            }
        }
    }
}

// scatter-add transpose of im2col
template <typename T>
inline void col2im_add(const T* col, int in_ch, int h, int w, int k, T* input_grad) {
    const int oh = h - k + 1;
    const int ow = w - k + 1;
    const std::size_t ohw = static_cast<std::size_t>(oh) * ow;
    const T* src = col;
    for (int c = 0; c < in_ch; ++c) {
        T* plane = input_grad + static_cast<std::size_t>(c) * h * w;
        for (int ki = 0; ki < k; ++ki) {
            for (int kj = 0; kj < k; ++kj) {
                for (int y = 0; y < oh; ++y) {
                    T* dst = plane + static_cast<std::size_t>(y + ki) * w + kj;
                    for (int x = 0; x < ow; ++x) dst[x] += src[static_cast<std::size_t>(y) * ow + x];
                }
                src += ohw;
            }
        }
    }
}

template <typename T>
inline void check_conv_input(const Tensor<T>& input, const LayerWeights<T>& layer, int batch_dims) {
    if (layer.kind != LayerKind::Conv2d)
        throw dimension_error("conv2d called on a non-conv layer");
    if (input.ndim() != 3 + batch_dims)
        throw dimension_error("conv2d expects a " + std::to_string(3 + batch_dims) +
                              "-d input, got " + shape_str(input.shape));
    const int c = input.dim(batch_dims), h = input.dim(batch_dims + 1), w = input.dim(batch_dims + 2);
    if (c != layer.weights.dim(1) || h < layer.kernel || w < layer.kernel)
        throw dimension_error("conv2d: input " + shape_str(input.shape) +
                              " incompatible with kernels " + shape_str(layer.weights.shape));
}

} // namespace detail

// ---- conv2d (valid padding, stride 1) ----

// batch forward: input [N, C, H, W] -> [N, out_ch, H-k+1, W-k+1]
template <typename T>
Tensor<T> conv2d_forward_batch(const Tensor<T>& input, const LayerWeights<T>& layer) {
    detail::check_conv_input(input, layer, 1);
    const int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int k = layer.kernel, oc = layer.weights.dim(0);
    const int oh = h - k + 1, ow = w - k + 1;
    const std::size_t ohw = static_cast<std::size_t>(oh) * ow;
    const std::size_t kk = static_cast<std::size_t>(c) * k * k;

    Tensor<T> out({n, oc, oh, ow});
    std::vector<T> col(kk * ohw);
    const std::size_t in_stride = static_cast<std::size_t>(c) * h * w;
    const std::size_t out_stride = static_cast<std::size_t>(oc) * ohw;
    for (int s = 0; s < n; ++s) {
        detail::im2col(input.ptr() + s * in_stride, c, h, w, k, col.data());
        T* o = out.ptr() + s * out_stride;
        gemm_nn<T>(oc, ohw, kk, layer.weights.ptr(), kk, col.data(), ohw, T(0), o, ohw);
        for (int m = 0; m < oc; ++m) {
            const T b = layer.bias[static_cast<std::size_t>(m)];
            T* row = o + static_cast<std::size_t>(m) * ohw;
            for (std::size_t i = 0; i < ohw; ++i) row[i] += b;
        }
    }
    return out;
}

// single-sample forward: input [C, H, W]
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const LayerWeights<T>& layer) {
    detail::check_conv_input(input, layer, 0);
    Tensor<T> batched = input;
    batched.reshape({1, input.dim(0), input.dim(1), input.dim(2)});
    Tensor<T> out = conv2d_forward_batch(batched, layer);
    out.reshape({out.dim(1), out.dim(2), out.dim(3)});
    return out;
}

// batch backward; grad_out [N, out_ch, oh, ow], input is the cached forward input
template <typename T>
LayerGrads<T> conv2d_backward_batch(const Tensor<T>& grad_out, const Tensor<T>& input,
                                    const LayerWeights<T>& layer) {
    detail::check_conv_input(input, layer, 1);
    const int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int k = layer.kernel, oc = layer.weights.dim(0);
    const int oh = h - k + 1, ow = w - k + 1;
    if (grad_out.shape != std::vector<int>{n, oc, oh, ow})
        throw dimension_error("conv2d_backward: grad " + shape_str(grad_out.shape) +
                              " does not match forward output [" + std::to_string(n) + "," +
                              std::to_string(oc) + "," + std::to_string(oh) + "," +
                              std::to_string(ow) + "]");

    const std::size_t ohw = static_cast<std::size_t>(oh) * ow;
    const std::size_t kk = static_cast<std::size_t>(c) * k * k;

    LayerGrads<T> g;
    g.input = Tensor<T>::zeros(input.shape);
    g.weights = Tensor<T>::zeros(layer.weights.shape);
    g.bias = Tensor<T>::zeros(layer.bias.shape);

    std::vector<T> col(kk * ohw), gcol(kk * ohw);
    const std::size_t in_stride = static_cast<std::size_t>(c) * h * w;
    const std::size_t out_stride = static_cast<std::size_t>(oc) * ohw;
    for (int s = 0; s < n; ++s) {
        const T* go = grad_out.ptr() + s * out_stride;
        detail::im2col(input.ptr() + s * in_stride, c, h, w, k, col.data());
        // dW += gO * col^T ; dcol = W^T * gO ; db += row sums of gO
        gemm_nt<T>(oc, kk, ohw, go, ohw, col.data(), ohw, T(1), g.weights.ptr(), kk);
        gemm_tn<T>(kk, ohw, oc, layer.weights.ptr(), kk, go, ohw, T(0), gcol.data(), ohw);
        detail::col2im_add(gcol.data(), c, h, w, k, g.input.ptr() + s * in_stride);
        for (int m = 0; m < oc; ++m) {
            const T* row = go + static_cast<std::size_t>(m) * ohw;
            T acc = T(0);
            for (std::size_t i = 0; i < ohw; ++i) acc += row[i];
            g.bias[static_cast<std::size_t>(m)] += acc;
        }
    }
    return g;
}

template <typename T>
LayerGrads<T> conv2d_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                              const LayerWeights<T>& layer) {
    Tensor<T> gb = grad_out, ib = input;
    if (gb.ndim() != 3 || ib.ndim() != 3)
        throw dimension_error("conv2d_backward expects 3-d tensors, got grad " +
                              shape_str(grad_out.shape) + " input " + shape_str(input.shape));
    gb.reshape({1, gb.dim(0), gb.dim(1), gb.dim(2)});
    ib.reshape({1, ib.dim(0), ib.dim(1), ib.dim(2)});
    LayerGrads<T> g = conv2d_backward_batch(gb, ib, layer);
    g.input.reshape({input.dim(0), input.dim(1), input.dim(2)});
    return g;
}

// ---- fully connected ----

// batch forward: input [N, in] -> [N, out]
template <typename T>
Tensor<T> fc_forward_batch(const Tensor<T>& input, const LayerWeights<T>& layer) {
    if (layer.kind != LayerKind::FullyConnected)
        throw dimension_error("fc called on a non-fc layer");
    if (input.ndim() != 2 || input.dim(1) != layer.in_units())
        throw dimension_error("fc: input " + shape_str(input.shape) + " incompatible with weights " +
                              shape_str(layer.weights.shape));
    const int n = input.dim(0), in = layer.in_units(), out = layer.out_units();
    Tensor<T> y({n, out});
    gemm_nt<T>(n, out, in, input.ptr(), in, layer.weights.ptr(), in, T(0), y.ptr(), out);
    for (int s = 0; s < n; ++s) {
        T* row = y.ptr() + static_cast<std::size_t>(s) * out;
        for (int j = 0; j < out; ++j) row[j] += layer.bias[static_cast<std::size_t>(j)];
    }
    return y;
}

template <typename T>
Tensor<T> fc_forward(const Tensor<T>& input, const LayerWeights<T>& layer) {
    if (input.ndim() != 1)
        throw dimension_error("fc_forward expects a 1-d input, got " + shape_str(input.shape));
    Tensor<T> b = input;
    b.reshape({1, input.dim(0)});
    Tensor<T> y = fc_forward_batch(b, layer);
    y.reshape({y.dim(1)});
    return y;
}

template <typename T>
LayerGrads<T> fc_backward_batch(const Tensor<T>& grad_out, const Tensor<T>& input,
                                const LayerWeights<T>& layer) {
    const int n = input.dim(0), in = layer.in_units(), out = layer.out_units();
    if (grad_out.ndim() != 2 || grad_out.dim(0) != n || grad_out.dim(1) != out)
        throw dimension_error("fc_backward: grad " + shape_str(grad_out.shape) +
                              " does not match output [" + std::to_string(n) + "," +
                              std::to_string(out) + "]");
    LayerGrads<T> g;
    g.input = Tensor<T>({n, in});
    g.weights = Tensor<T>({out, in});
    g.bias = Tensor<T>({out});
    gemm_nn<T>(n, in, out, grad_out.ptr(), out, layer.weights.ptr(), in, T(0), g.input.ptr(), in);
    gemm_tn<T>(out, in, n, grad_out.ptr(), out, input.ptr(), in, T(0), g.weights.ptr(), in);
    for (int s = 0; s < n; ++s) {
        const T* row = grad_out.ptr() + static_cast<std::size_t>(s) * out;
        for (int j = 0; j < out; ++j) g.bias[static_cast<std::size_t>(j)] += row[j];
    }
    return g;
}

template <typename T>
LayerGrads<T> fc_backward(const Tensor<T>& grad_out, const Tensor<T>& input,
                          const LayerWeights<T>& layer) {
    Tensor<T> gb = grad_out, ib = input;
    gb.reshape({1, grad_out.dim(0)});
    ib.reshape({1, input.dim(0)});
    LayerGrads<T> g = fc_backward_batch(gb, ib, layer);
    g.input.reshape({input.dim(0)});
    return g;
}

// ---- relu ----

template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
    Tensor<T> out = input;
    for (T& v : out.data) v = v > T(0) ? v : T(0);
    return out;
}

// pre_activation is the input the forward relu saw; gradient is masked by x > 0
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& pre_activation) {
    if (!grad_out.same_shape(pre_activation))
        throw dimension_error("relu_backward: grad " + shape_str(grad_out.shape) +
                              " vs activation " + shape_str(pre_activation.shape));
    Tensor<T> g = grad_out;
    for (std::size_t i = 0; i < g.numel(); ++i)
        if (!(pre_activation[i] > T(0))) g[i] = T(0);
    return g;
}

// ---- softmax cross-entropy ----

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
    Tensor<T> p = logits;
    T m = p[0];
    for (const T& v : p.data) m = std::max(m, v);
    T sum = T(0);
    for (T& v : p.data) {
        v = std::exp(v - m);
        sum += v;
    }
    for (T& v : p.data) v /= sum;
    return p;
}

// loss = -log softmax(logits)[label]; grad = softmax - onehot
template <typename T>
std::pair<T, Tensor<T>> softmax_cross_entropy(const Tensor<T>& logits, int true_label) {
    if (logits.ndim() != 1)
        throw dimension_error("softmax_cross_entropy expects 1-d logits, got " +
                              shape_str(logits.shape));
    const int k = logits.dim(0);
    if (true_label < 0 || true_label >= k)
        throw index_error("label " + std::to_string(true_label) + " out of range [0," +
                          std::to_string(k) + ")");
    Tensor<T> p = softmax(logits);
    const T eps = std::numeric_limits<T>::min();
    T loss = -std::log(std::max(p[static_cast<std::size_t>(true_label)], eps));
    p[static_cast<std::size_t>(true_label)] -= T(1);
    return {loss, std::move(p)};
}

// batch version used by the trainer: logits [N, K], one label per row.
// Returns the mean loss; grad rows are already divided by N.
template <typename T>
std::pair<T, Tensor<T>> softmax_cross_entropy_batch(const Tensor<T>& logits,
                                                    const std::vector<int>& labels) {
    const int n = logits.dim(0), k = logits.dim(1);
    if (static_cast<int>(labels.size()) != n)
        throw dimension_error("softmax batch: " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(n) + " rows");
    Tensor<T> grad({n, k});
    T total = T(0);
    const T invn = T(1) / static_cast<T>(n);
    for (int s = 0; s < n; ++s) {
        const int label = labels[static_cast<std::size_t>(s)];
        if (label < 0 || label >= k)
            throw index_error("label " + std::to_string(label) + " out of range [0," +
                              std::to_string(k) + ")");
        const T* row = logits.ptr() + static_cast<std::size_t>(s) * k;
        T m = row[0];
        for (int j = 1; j < k; ++j) m = std::max(m, row[j]);
        T sum = T(0);
        T* grow = grad.ptr() + static_cast<std::size_t>(s) * k;
        for (int j = 0; j < k; ++j) {
            grow[j] = std::exp(row[j] - m);
            sum += grow[j];
        }
        const T p = grow[label] / sum;
        total += -std::log(std::max(p, std::numeric_limits<T>::min()));
        for (int j = 0; j < k; ++j) grow[j] = grow[j] / sum * invn;
        grow[label] -= invn;
    }
    return {total * invn, std::move(grad)};
}

// ---- SGD ----

template <typename T>
void sgd_step(Tensor<T>& weights, const Tensor<T>& grads, T lr) {
    if (!weights.same_shape(grads))
        throw dimension_error("sgd_step: weights " + shape_str(weights.shape) + " vs grads " +
                              shape_str(grads.shape));
    for (std::size_t i = 0; i < weights.numel(); ++i) weights[i] -= lr * grads[i];
}

template <typename T>
void sgd_step(LayerWeights<T>& layer, const LayerGrads<T>& grads, T lr) {
    sgd_step(layer.weights, grads.weights, lr);
    sgd_step(layer.bias, grads.bias, lr);
}

} // namespace bifurc

#endif
