#include "bifurc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bifurc/gemm.hpp"
#include "bifurc/rng.hpp"

namespace bifurc {

std::vector<SampleRef> sample_refs(const PatchDataset& dataset) {
    std::vector<SampleRef> refs;
    refs.reserve(dataset.count());
    for (std::size_t i = 0; i < dataset.count(); ++i)
        refs.push_back({dataset.patch(i), dataset.labels[i]});
    return refs;
}

TrainedSeparate train_separate(const ArchitectureSpec& arch, const PatchDataset& dataset,
                               const std::string& class_name, const TrainConfig& config) {
    if (dataset.count() == 0) throw data_error("train_separate: empty dataset");
    TrainedSeparate out;
    out.class_name = class_name;
    out.net = make_network<float>(arch, config.seed);
    const std::vector<SampleRef> refs = sample_refs(dataset);
    out.log = train_sgd(out.net, refs, config);
    return out;
}

Network<float> merge_primary(std::span<const Network<float>> nets) {
    if (nets.empty()) throw data_error("merge_primary: no networks given");
    Network<float> merged = conv_part(nets[0]);
    // accumulate in double so the mean of n identical networks reproduces
    // them bit-exactly after the final cast
    std::vector<Network<double>> acc;
    acc.push_back(merged.cast<double>());
    for (std::size_t ni = 1; ni < nets.size(); ++ni) {
        const Network<float> other = conv_part(nets[ni]);
        if (other.layers.size() != merged.layers.size())
            throw dimension_error("merge_primary: primary depth mismatch between networks 0 and " +
                                  std::to_string(ni));
        for (std::size_t li = 0; li < merged.layers.size(); ++li) {
            auto& sum = acc[0].layers[li].weights;
            const auto& add = other.layers[li].weights;
            if (sum.weights.shape != add.weights.shape || sum.kernel != add.kernel)
                throw dimension_error("merge_primary: layer " + std::to_string(li) + " shape " +
                                      shape_str(add.weights.shape) + " of network " +
                                      std::to_string(ni) + " does not match " +
                                      shape_str(sum.weights.shape));
            for (std::size_t i = 0; i < sum.weights.numel(); ++i)
                sum.weights[i] += static_cast<double>(add.weights[i]);
            for (std::size_t i = 0; i < sum.bias.numel(); ++i)
                sum.bias[i] += static_cast<double>(add.bias[i]);
        }
    }
    const double inv = 1.0 / static_cast<double>(nets.size());
    for (std::size_t li = 0; li < merged.layers.size(); ++li) {
        auto& dst = merged.layers[li].weights;
        const auto& sum = acc[0].layers[li].weights;
        for (std::size_t i = 0; i < dst.weights.numel(); ++i)
            dst.weights[i] = static_cast<float>(sum.weights[i] * inv);
        for (std::size_t i = 0; i < dst.bias.numel(); ++i)
            dst.bias[i] = static_cast<float>(sum.bias[i] * inv);
    }
    return merged;
}

MergedModel make_merged(std::span<const Network<float>> separate_nets,
                        const std::vector<std::string>& class_names, std::uint64_t seed) {
    if (separate_nets.size() < 2) throw config_error("make_merged: need at least 2 networks");
    if (separate_nets.size() != class_names.size())
        throw config_error("make_merged: " + std::to_string(separate_nets.size()) +
                           " networks vs " + std::to_string(class_names.size()) + " class names");
    MergedModel model;
    model.arch = separate_nets[0].arch;
    model.class_names = class_names;
    model.primary = merge_primary(separate_nets);
    const ArchitectureSpec head_arch = model.head_arch();
    for (std::size_t i = 0; i < separate_nets.size(); ++i) {
        model.seg_heads.push_back(fc_part(separate_nets[i]));
        model.cls_heads.push_back(make_network<float>(head_arch, mix_seed(seed, 0x40 + i)));
    }
    return model;
}

namespace {

TensorF gather_patches(std::span<const SampleRef> samples, std::span<const std::size_t> idx,
                       const ArchitectureSpec& arch, std::vector<int>& labels) {
    const std::size_t n = idx.size();
    TensorF batch({static_cast<int>(n), arch.in_channels, arch.in_height, arch.in_width});
    const std::size_t volume =
        static_cast<std::size_t>(arch.in_channels) * arch.in_height * arch.in_width;
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SampleRef& s = samples[idx[i]];
        std::copy(s.values, s.values + volume, batch.ptr() + i * volume);
        labels[i] = s.label;
    }
    return batch;
}

} // namespace

void train_heads_round_robin(MergedModel& model,
                             std::span<const std::vector<SampleRef>> per_class,
                             const TrainConfig& config, bool update_primary) {
    config.validate();
    if (per_class.size() != model.seg_heads.size())
        throw config_error("head training: " + std::to_string(per_class.size()) +
                           " datasets for " + std::to_string(model.seg_heads.size()) + " heads");
    for (std::size_t i = 0; i < per_class.size(); ++i)
        if (per_class[i].empty())
            throw data_error("head training: class " + std::to_string(i) + " has no samples");

    const int n_classes = static_cast<int>(per_class.size());
    const float lr = static_cast<float>(config.learning_rate);
    std::vector<std::vector<std::size_t>> order(per_class.size());
    std::vector<Rng> rngs;
    for (std::size_t i = 0; i < per_class.size(); ++i) {
        order[i].resize(per_class[i].size());
        std::iota(order[i].begin(), order[i].end(), std::size_t{0});
        rngs.emplace_back(mix_seed(config.seed, 0x80 + i));
    }

    std::vector<int> labels;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::size_t max_batches = 0;
        for (std::size_t i = 0; i < per_class.size(); ++i) {
            shuffle_indices(order[i], rngs[i]);
            const std::size_t nb =
                (order[i].size() + config.batch_size - 1) / config.batch_size;
            max_batches = std::max(max_batches, nb);
        }
        for (std::size_t b = 0; b < max_batches; ++b) {
            for (int cls = 0; cls < n_classes; ++cls) {
                const auto& idx = order[static_cast<std::size_t>(cls)];
                const std::size_t first = b * config.batch_size;
                if (first >= idx.size()) continue;
                const std::size_t count =
                    std::min<std::size_t>(config.batch_size, idx.size() - first);
                TensorF batch = gather_patches(per_class[static_cast<std::size_t>(cls)],
                                               std::span(idx).subspan(first, count), model.arch,
                                               labels);
                ForwardCache<float> cache_p, cache_h;
                TensorF feats = model.primary.forward_batch(batch, &cache_p);
                Network<float>& head = model.seg_heads[static_cast<std::size_t>(cls)];
                TensorF logits = head.forward_batch(feats, &cache_h);
                auto [loss, grad] = softmax_cross_entropy_batch(logits, labels);
                if (!std::isfinite(loss))
                    throw numeric_error("head training: non-finite loss at epoch " +
                                        std::to_string(epoch + 1));
                NetGradients<float> hgrads = head.backward_batch(cache_h, grad);
                if (update_primary) {
                    TensorF gfeat = hgrads.layers[0].input;
                    gfeat.reshape(feats.shape);
                    NetGradients<float> pgrads = model.primary.backward_batch(cache_p, gfeat);
                    model.primary.sgd_update(pgrads, lr);
                }
                head.sgd_update(hgrads, lr);
            }
        }
    }
}

void train_seg_heads(MergedModel& model, std::span<const PatchDataset> per_class,
                     const TrainConfig& config) {
    std::vector<std::vector<SampleRef>> refs;
    refs.reserve(per_class.size());
    for (const auto& ds : per_class) refs.push_back(sample_refs(ds));
    train_heads_round_robin(model, refs, config, /*update_primary=*/true);
}

namespace {

// Flattened frozen-primary features for a set of patches, batch by batch.
TensorF primary_features(const MergedModel& model, std::span<const SampleRef> samples) {
    const int feat = model.arch.flatten_size();
    TensorF out({static_cast<int>(samples.size()), feat});
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<int> labels;
    for (std::size_t first = 0; first < samples.size(); first += kInferBatch) {
        const std::size_t count = std::min<std::size_t>(kInferBatch, samples.size() - first);
        TensorF batch = gather_patches(samples, std::span(idx).subspan(first, count), model.arch,
                                       labels);
        TensorF feats = model.primary.forward_batch(batch);
        std::copy(feats.data.begin(), feats.data.end(),
                  out.ptr() + first * static_cast<std::size_t>(feat));
    }
    return out;
}

} // namespace

void train_cls_heads(MergedModel& model, std::span<const PatchDataset> per_class,
                     const TrainConfig& config) {
    config.validate();
    if (per_class.size() != model.cls_heads.size())
        throw config_error("cls-head training: " + std::to_string(per_class.size()) +
                           " datasets for " + std::to_string(model.cls_heads.size()) + " heads");

    const int feat = model.arch.flatten_size();
    ArchitectureSpec feat_arch = model.head_arch(); // input [feat, 1, 1]

    for (std::size_t head_i = 0; head_i < model.cls_heads.size(); ++head_i) {
        // positives: abnormal patches of class head_i
        // negative pool: all normal patches + other classes' abnormal patches
        std::vector<SampleRef> positives, negative_pool;
        for (std::size_t cls = 0; cls < per_class.size(); ++cls) {
            const PatchDataset& ds = per_class[cls];
            for (std::size_t p = 0; p < ds.count(); ++p) {
                if (ds.labels[p] && cls == head_i)
                    positives.push_back({ds.patch(p), 1});
                else
                    negative_pool.push_back({ds.patch(p), 0});
            }
        }
        if (positives.empty())
            throw data_error("cls-head training: class " + std::to_string(head_i) +
                             " has no abnormal patches");
        if (negative_pool.empty())
            throw data_error("cls-head training: no negatives for class " +
                             std::to_string(head_i));

        // 2:1 negatives, seeded draw without replacement
        Rng rng(mix_seed(config.seed, 0xC0 + head_i));
        const std::size_t want = std::min(negative_pool.size(), 2 * positives.size());
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j = i + uniform_below(rng, negative_pool.size() - i);
            std::swap(negative_pool[i], negative_pool[j]);
        }
        negative_pool.resize(want);

        std::vector<SampleRef> samples = positives;
        samples.insert(samples.end(), negative_pool.begin(), negative_pool.end());

        // freeze contract: the primary is only read, never written
        TensorF feats = primary_features(model, samples);
        std::vector<SampleRef> feat_refs(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            feat_refs[i] = {feats.ptr() + i * static_cast<std::size_t>(feat), samples[i].label};

        Network<float>& head = model.cls_heads[head_i];
        head.arch = feat_arch;
        TrainConfig head_cfg = config;
        head_cfg.seed = mix_seed(config.seed, 0xD0 + head_i);
        train_sgd(head, feat_refs, head_cfg);
    }
}

namespace {

void heads_to_bits(const MergedModel& model, const TensorF& feats,
                   std::span<const std::size_t> pixel_index, std::vector<BinaryMap>& seg,
                   std::vector<BinaryMap>& cls) {
    const int n = model.classes();
    for (int branch = 0; branch < 2; ++branch) {
        const auto& heads = branch == 0 ? model.seg_heads : model.cls_heads;
        auto& maps = branch == 0 ? seg : cls;
        for (int i = 0; i < n; ++i) {
            TensorF logits = heads[static_cast<std::size_t>(i)].forward_batch(feats);
            for (std::size_t s = 0; s < pixel_index.size(); ++s) {
                const float* row = logits.ptr() + s * 2;
                maps[static_cast<std::size_t>(i)].bits[pixel_index[s]] = row[1] > row[0] ? 1 : 0;
            }
        }
    }
}

} // namespace

BranchOutput infer(const MergedModel& model, const Image& image, ChannelMode mode) {
    if (!model.trained()) throw state_error("infer: model is untrained");
    if (model.cls_heads.size() != model.seg_heads.size())
        throw state_error("infer: classification branch missing");
    if (image.height < PatchDataset::kSize || image.width < PatchDataset::kSize)
        throw dimension_error("infer: image smaller than the patch size");

    const PatchGrid grid(image, mode);
    const int n = model.classes();
    BranchOutput out;
    out.seg.assign(n, BinaryMap(image.height, image.width));
    out.cls.assign(n, BinaryMap(image.height, image.width));

    const std::size_t total = grid.pixel_count();
    const std::size_t volume = PatchDataset::kVolume;
    std::vector<std::size_t> pixel_index(kInferBatch);
    for (std::size_t first = 0; first < total; first += kInferBatch) {
        const std::size_t count = std::min<std::size_t>(kInferBatch, total - first);
        TensorF batch({static_cast<int>(count), model.arch.in_channels, model.arch.in_height,
                       model.arch.in_width});
        for (std::size_t s = 0; s < count; ++s) {
            const std::size_t p = first + s;
            pixel_index[s] = p;
            grid.patch_at(static_cast<int>(p / image.width), static_cast<int>(p % image.width),
                          batch.ptr() + s * volume);
        }
        TensorF feats = model.primary.forward_batch(batch);
        heads_to_bits(model, feats, std::span(pixel_index).first(count), out.seg, out.cls);
    }
    return out;
}

BinaryMap infer_map(const Network<float>& net, const Image& image, ChannelMode mode) {
    if (net.layers.empty()) throw state_error("infer_map: network is untrained");
    const PatchGrid grid(image, mode);
    BinaryMap map(image.height, image.width);
    const std::size_t total = grid.pixel_count();
    const std::size_t volume = PatchDataset::kVolume;
    for (std::size_t first = 0; first < total; first += kInferBatch) {
        const std::size_t count = std::min<std::size_t>(kInferBatch, total - first);
        TensorF batch({static_cast<int>(count), net.arch.in_channels, net.arch.in_height,
                       net.arch.in_width});
        for (std::size_t s = 0; s < count; ++s) {
            const std::size_t p = first + s;
            grid.patch_at(static_cast<int>(p / image.width), static_cast<int>(p % image.width),
                          batch.ptr() + s * volume);
        }
        TensorF logits = net.forward_batch(batch);
        for (std::size_t s = 0; s < count; ++s) {
            const float* row = logits.ptr() + s * 2;
            map.bits[first + s] = row[1] > row[0] ? 1 : 0;
        }
    }
    return map;
}

MulticlassPatches multiclass_patches(std::span<const PatchDataset> per_class) {
    MulticlassPatches out;
    out.classes = static_cast<int>(per_class.size());
    for (std::size_t cls = 0; cls < per_class.size(); ++cls) {
        const PatchDataset& ds = per_class[cls];
        out.values.insert(out.values.end(), ds.values.begin(), ds.values.end());
        for (std::size_t p = 0; p < ds.count(); ++p)
            out.labels.push_back(ds.labels[p] ? static_cast<int>(cls) : out.classes);
    }
    return out;
}

std::vector<SampleRef> MulticlassPatches::refs() const {
    std::vector<SampleRef> r(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        r[i] = {values.data() + i * PatchDataset::kVolume, labels[i]};
    return r;
}

TrainedMonolithic build_monolithic(const ArchitectureSpec& arch,
                                   std::span<const SampleRef> samples,
                                   const TrainConfig& config) {
    TrainedMonolithic out;
    out.net = make_network<float>(arch, config.seed);
    out.log = train_sgd(out.net, samples, config);
    return out;
}

namespace {

// y = M x for row-major M [rows, cols]
TensorD matvec(const TensorD& m, const TensorD& x) {
    TensorD y({m.dim(0)});
    gemm_nn<double>(static_cast<std::size_t>(m.dim(0)), 1, static_cast<std::size_t>(m.dim(1)),
                    m.ptr(), static_cast<std::size_t>(m.dim(1)), x.ptr(), 1, 0.0, y.ptr(), 1);
    return y;
}

} // namespace

double merge_residual_check(std::span<const LinearNet3> nets, const TensorD& merged_w1,
                            std::span<const TensorD> probes) {
    double worst = 0.0;
    for (const LinearNet3& net : nets) {
        if (net.w1.shape != merged_w1.shape)
            throw dimension_error("merge_residual_check: W1 shape mismatch");
        TensorD delta = merged_w1;
        for (std::size_t i = 0; i < delta.numel(); ++i) delta[i] -= net.w1[i];
        for (const TensorD& v : probes) {
            const TensorD y = matvec(net.w3, matvec(net.w2, matvec(net.w1, v)));
            const TensorD y_hat = matvec(net.w3, matvec(net.w2, matvec(merged_w1, v)));
            const TensorD residual = matvec(net.w3, matvec(net.w2, matvec(delta, v)));
            for (std::size_t i = 0; i < y.numel(); ++i)
                worst = std::max(worst, std::abs((y_hat[i] - y[i]) - residual[i]));
        }
    }
    return worst;
}

} // namespace bifurc
