#ifndef BIFURC_METRICS_HPP
#define BIFURC_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bifurc/image.hpp"

namespace bifurc {

struct SegScores {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    double dice = 0.0;
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
};

// Pixel-level scores of a predicted map against ground truth.
// Dice = 2|P n G| / (|P| + |G|), defined as 1.0 when both maps are empty.
// Sensitivity is 0 when gt has no positives; specificity 0 when no negatives.
SegScores seg_scores(const BinaryMap& pred, const BinaryMap& gt);

// n x n image-level counts; rows = true class, columns = predicted class.
struct ConfusionMatrix {
    int n = 0;
    std::vector<std::uint64_t> counts;

    explicit ConfusionMatrix(int classes = 0)
        : n(classes), counts(static_cast<std::size_t>(classes) * classes, 0) {}

    std::uint64_t& at(int t, int p) { return counts[static_cast<std::size_t>(t) * n + p]; }
    std::uint64_t at(int t, int p) const { return counts[static_cast<std::size_t>(t) * n + p]; }

    std::uint64_t trace() const {
        std::uint64_t s = 0;
        for (int i = 0; i < n; ++i) s += at(i, i);
        return s;
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto v : counts) s += v;
        return s;
    }
    std::uint64_t row_sum(int t) const {
        std::uint64_t s = 0;
        for (int p = 0; p < n; ++p) s += at(t, p);
        return s;
    }
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int n);

// One-vs-rest image-level rates for one class of a confusion matrix.
struct ClassRates {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double accuracy = 0.0;
};
ClassRates one_vs_rest(const ConfusionMatrix& m, int cls);

} // namespace bifurc

#endif
