#ifndef BIFURC_MNIST_BENCH_HPP
#define BIFURC_MNIST_BENCH_HPP

#include <filesystem>

#include "bifurc/mnist.hpp"
#include "bifurc/model.hpp"
#include "bifurc/pipeline.hpp"

namespace bifurc {

// Digit-recognition experiments over the standard IDX files
// (train-images-idx3-ubyte etc.): one-vs-rest separate networks, the merged
// shared-primary network, and the single monolithic softmax network.

struct MnistSets {
    MnistData train; // truncated to train_count samples
    MnistData test;  // the full test file
};

// Loads the four standard files from a directory, keeping the first
// train_count training samples (0 = all).
MnistSets load_mnist_dir(const std::filesystem::path& dir, int train_count);

// One-vs-rest sample set for a digit: every image of the digit labeled 1,
// negatives drawn 2:1 (seeded, without replacement) from the other digits.
std::vector<SampleRef> one_vs_rest_refs(const MnistData& data, int digit, double negative_ratio,
                                        std::uint64_t seed);

std::vector<SampleRef> all_refs(const MnistData& data);

struct MnistSeparateResult {
    std::vector<Network<float>> nets;          // one per digit
    std::vector<double> binary_test_accuracy;  // one per digit
};

// Trains the ten separate one-vs-rest networks and scores each on the full
// test set as a binary task.
MnistSeparateResult mnist_separate(const MnistSets& sets, const TrainConfig& config,
                                   double negative_ratio = 2.0);

// Merges the separate primaries, retrains the ten heads round-robin with the
// primary fine-tuned, and classifies by argmax over the heads' positive
// scores.
struct MnistMergedResult {
    MergedModel model;
    double test_accuracy = 0.0;
};
MnistMergedResult mnist_merged(const MnistSets& sets, std::span<const Network<float>> separate,
                               const TrainConfig& head_config, double negative_ratio = 2.0);

// 10-way softmax baseline.
struct MnistMonolithicResult {
    Network<float> net;
    std::vector<EpochLog> log;
    double test_accuracy = 0.0;
};
MnistMonolithicResult mnist_monolithic(const MnistSets& sets, const TrainConfig& config);

// Argmax-of-heads accuracy of a merged model on labeled images.
double merged_argmax_accuracy(const MergedModel& model, const MnistData& data);

} // namespace bifurc

#endif
