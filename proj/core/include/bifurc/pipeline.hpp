#ifndef BIFURC_PIPELINE_HPP
#define BIFURC_PIPELINE_HPP

#include <span>

#include "bifurc/model.hpp"
#include "bifurc/patches.hpp"

namespace bifurc {

// Patch batch size used by feature caching and full-image inference. Fixed so
// that seeded runs and the shared-vs-standalone comparison see identical
// batch boundaries.
inline constexpr int kInferBatch = 256;

std::vector<SampleRef> sample_refs(const PatchDataset& dataset);

// ---- stage 1: one network per abnormality ----

struct TrainedSeparate {
    Network<float> net;
    std::vector<EpochLog> log;
    std::string class_name;
};

// Trains a full (primary + head) 2-way network on one abnormality's patches.
TrainedSeparate train_separate(const ArchitectureSpec& arch, const PatchDataset& dataset,
                               const std::string& class_name, const TrainConfig& config);

// ---- stage 2: merge primaries ----

// Elementwise mean of the conv layers across networks. All primaries must
// share one architecture.
Network<float> merge_primary(std::span<const Network<float>> nets);

// Assembles a merged model: averaged primary, segmentation heads seeded from
// the separate networks' FC layers, classification heads freshly initialized.
MergedModel make_merged(std::span<const Network<float>> separate_nets,
                        const std::vector<std::string>& class_names, std::uint64_t seed);

// ---- stage 3: retrain heads over the shared primary ----

// Round-robin minibatches across classes; a batch of class i updates head i
// and (when update_primary) the shared primary, and touches nothing else.
void train_heads_round_robin(MergedModel& model,
                             std::span<const std::vector<SampleRef>> per_class,
                             const TrainConfig& config, bool update_primary = true);

// Segmentation branch: one balanced dataset per class, primary fine-tuned.
void train_seg_heads(MergedModel& model, std::span<const PatchDataset> per_class,
                     const TrainConfig& config);

// Classification branch: the primary is frozen bit-for-bit. Head i sees
// patches of every class; positives are class-i abnormal patches, negatives
// are all normal patches plus other classes' abnormal patches, subsampled
// 2:1 against the positives. Features are computed once through the frozen
// primary and heads train on the cached features.
void train_cls_heads(MergedModel& model, std::span<const PatchDataset> per_class,
                     const TrainConfig& config);

// ---- inference ----

struct BranchOutput {
    std::vector<BinaryMap> seg; // S_1..S_n
    std::vector<BinaryMap> cls; // C_1..C_n
};

// Per-pixel dual-branch maps over the whole image (reflect-101 borders).
// Primary activations are computed once per patch batch and reused by all
// 2n heads.
BranchOutput infer(const MergedModel& model, const Image& image, ChannelMode mode);

// Binary map from one standalone 2-way patch network (used for the separate
// baselines); positive = argmax class 1.
BinaryMap infer_map(const Network<float>& net, const Image& image, ChannelMode mode);

// ---- baselines ----

// Multi-class patch dataset: abnormal patch of class i keeps label i, normal
// patches get label n. Built from per-class datasets.
struct MulticlassPatches {
    std::vector<float> values;
    std::vector<int> labels;
    int classes = 0; // abnormality classes; normal label == classes
    std::size_t count() const { return labels.size(); }
    std::vector<SampleRef> refs() const;
};
MulticlassPatches multiclass_patches(std::span<const PatchDataset> per_class);

// Single softmax network over all classes (the monolithic baseline).
struct TrainedMonolithic {
    Network<float> net;
    std::vector<EpochLog> log;
};
TrainedMonolithic build_monolithic(const ArchitectureSpec& arch,
                                   std::span<const SampleRef> samples, const TrainConfig& config);

// ---- merge residual identity ----

// Bias-free linear 3-layer network (the merge-analysis setting).
struct LinearNet3 {
    TensorD w1; // [h1, in]
    TensorD w2; // [h2, h1]
    TensorD w3; // [out, h2]
};

// Verifies y_hat - y == W3 W2 (W1_merged - W1_j) v for every net and probe;
// returns the worst absolute deviation between the two sides.
double merge_residual_check(std::span<const LinearNet3> nets, const TensorD& merged_w1,
                            std::span<const TensorD> probes);

} // namespace bifurc

#endif
