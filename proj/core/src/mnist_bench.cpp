#include "bifurc/mnist_bench.hpp"

#include <algorithm>
#include <numeric>

#include "bifurc/rng.hpp"

namespace bifurc {

MnistSets load_mnist_dir(const std::filesystem::path& dir, int train_count) {
    MnistSets sets;
    sets.train = load_mnist(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
    sets.test = load_mnist(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
    if (train_count > 0 && train_count < sets.train.count()) {
        sets.train.images.data.resize(static_cast<std::size_t>(train_count) * 784);
        sets.train.images.shape = {train_count, 1, 28, 28};
        sets.train.labels.resize(static_cast<std::size_t>(train_count));
    }
    return sets;
}

std::vector<SampleRef> one_vs_rest_refs(const MnistData& data, int digit, double negative_ratio,
                                        std::uint64_t seed) {
    if (digit < 0 || digit > 9) throw index_error("one_vs_rest_refs: digit out of range");
    std::vector<SampleRef> positives, negatives;
    for (int i = 0; i < data.count(); ++i) {
        if (data.labels[static_cast<std::size_t>(i)] == digit)
            positives.push_back({data.sample(static_cast<std::size_t>(i)), 1});
        else
            negatives.push_back({data.sample(static_cast<std::size_t>(i)), 0});
    }
    if (positives.empty()) throw data_error("one_vs_rest_refs: no samples of the digit");
    Rng rng(mix_seed(seed, 0x300 + static_cast<std::uint64_t>(digit)));
    const std::size_t want = std::min(
        negatives.size(), static_cast<std::size_t>(negative_ratio * positives.size()));
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + uniform_below(rng, negatives.size() - i);
        std::swap(negatives[i], negatives[j]);
    }
    negatives.resize(want);
    positives.insert(positives.end(), negatives.begin(), negatives.end());
    return positives;
}

std::vector<SampleRef> all_refs(const MnistData& data) {
    std::vector<SampleRef> refs(static_cast<std::size_t>(data.count()));
    for (int i = 0; i < data.count(); ++i)
        refs[static_cast<std::size_t>(i)] = {data.sample(static_cast<std::size_t>(i)),
                                             data.labels[static_cast<std::size_t>(i)]};
    return refs;
}

MnistSeparateResult mnist_separate(const MnistSets& sets, const TrainConfig& config,
                                   double negative_ratio) {
    MnistSeparateResult result;
    const ArchitectureSpec arch = ArchitectureSpec::mnist(2);
    for (int digit = 0; digit < 10; ++digit) {
        std::vector<SampleRef> train =
            one_vs_rest_refs(sets.train, digit, negative_ratio, config.seed);
        TrainConfig cfg = config;
        cfg.seed = mix_seed(config.seed, 0x310 + static_cast<std::uint64_t>(digit));
        Network<float> net = make_network<float>(arch, cfg.seed);
        train_sgd(net, train, cfg);

        std::vector<SampleRef> test = all_refs(sets.test);
        for (auto& s : test) s.label = s.label == digit ? 1 : 0;
        result.binary_test_accuracy.push_back(eval_accuracy(net, test));
        result.nets.push_back(std::move(net));
    }
    return result;
}

double merged_argmax_accuracy(const MergedModel& model, const MnistData& data) {
    const int n = model.classes();
    std::size_t correct = 0;
    const int total = data.count();
    for (int first = 0; first < total; first += kInferBatch) {
        const int count = std::min(kInferBatch, total - first);
        TensorF batch({count, 1, 28, 28});
        std::copy(data.sample(static_cast<std::size_t>(first)),
                  data.sample(static_cast<std::size_t>(first)) + static_cast<std::size_t>(count) * 784,
                  batch.ptr());
        TensorF feats = model.primary.forward_batch(batch);
        // score of digit d = its head's positive-minus-negative logit margin
        std::vector<float> best_margin(static_cast<std::size_t>(count),
                                       -std::numeric_limits<float>::infinity());
        std::vector<int> best_digit(static_cast<std::size_t>(count), 0);
        for (int d = 0; d < n; ++d) {
            TensorF logits = model.seg_heads[static_cast<std::size_t>(d)].forward_batch(feats);
            for (int s = 0; s < count; ++s) {
                const float* row = logits.ptr() + static_cast<std::size_t>(s) * 2;
                const float margin = row[1] - row[0];
                if (margin > best_margin[static_cast<std::size_t>(s)]) {
                    best_margin[static_cast<std::size_t>(s)] = margin;
                    best_digit[static_cast<std::size_t>(s)] = d;
                }
            }
        }
        for (int s = 0; s < count; ++s)
            if (best_digit[static_cast<std::size_t>(s)] ==
                data.labels[static_cast<std::size_t>(first + s)])
                ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

MnistMergedResult mnist_merged(const MnistSets& sets, std::span<const Network<float>> separate,
                               const TrainConfig& head_config, double negative_ratio) {
    if (separate.size() != 10)
        throw config_error("mnist_merged: expected 10 separate networks, got " +
                           std::to_string(separate.size()));
    std::vector<std::string> names;
    for (int d = 0; d < 10; ++d) names.push_back(std::to_string(d));

    MnistMergedResult result;
    result.model = make_merged(separate, names, head_config.seed);

    std::vector<std::vector<SampleRef>> per_digit;
    per_digit.reserve(10);
    for (int d = 0; d < 10; ++d)
        per_digit.push_back(one_vs_rest_refs(sets.train, d, negative_ratio,
                                             mix_seed(head_config.seed, 0x320)));
    train_heads_round_robin(result.model, per_digit, head_config, /*update_primary=*/true);
    result.test_accuracy = merged_argmax_accuracy(result.model, sets.test);
    return result;
}

MnistMonolithicResult mnist_monolithic(const MnistSets& sets, const TrainConfig& config) {
    MnistMonolithicResult result;
    const ArchitectureSpec arch = ArchitectureSpec::mnist(10);
    result.net = make_network<float>(arch, config.seed);
    std::vector<SampleRef> train = all_refs(sets.train);
    result.log = train_sgd(result.net, train, config);
    std::vector<SampleRef> test = all_refs(sets.test);
    result.test_accuracy = eval_accuracy(result.net, test);
    return result;
}

} // namespace bifurc
