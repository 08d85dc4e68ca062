#include "bifurc/metrics.hpp"

#include <string>

#include "bifurc/errors.hpp"

namespace bifurc {

SegScores seg_scores(const BinaryMap& pred, const BinaryMap& gt) {
    if (pred.height != gt.height || pred.width != gt.width)
        throw dimension_error("seg_scores: prediction " + std::to_string(pred.height) + "x" +
                              std::to_string(pred.width) + " vs ground truth " +
                              std::to_string(gt.height) + "x" + std::to_string(gt.width));
    SegScores s;
    for (std::size_t i = 0; i < pred.bits.size(); ++i) {
        const bool p = pred.bits[i] != 0, g = gt.bits[i] != 0;
        s.tp += p && g;
        s.fp += p && !g;
        s.fn += !p && g;
        s.tn += !p && !g;
    }
    const std::uint64_t denom = 2 * s.tp + s.fp + s.fn; // == |P| + |G|
    s.dice = denom == 0 ? 1.0 : 2.0 * static_cast<double>(s.tp) / static_cast<double>(denom);
    s.accuracy = static_cast<double>(s.tp + s.tn) / static_cast<double>(pred.bits.size());
    s.sensitivity =
        s.tp + s.fn == 0 ? 0.0 : static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    s.specificity =
        s.tn + s.fp == 0 ? 0.0 : static_cast<double>(s.tn) / static_cast<double>(s.tn + s.fp);
    return s;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int n) {
    if (truth.size() != predicted.size())
        throw dimension_error("confusion: " + std::to_string(truth.size()) + " true labels vs " +
                              std::to_string(predicted.size()) + " predictions");
    if (n <= 0) throw config_error("confusion: class count must be positive");
    ConfusionMatrix m(n);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= n || predicted[i] < 0 || predicted[i] >= n)
            throw index_error("confusion: label out of range at index " + std::to_string(i));
        ++m.at(truth[i], predicted[i]);
    }
    return m;
}

ClassRates one_vs_rest(const ConfusionMatrix& m, int cls) {
    if (cls < 0 || cls >= m.n) throw index_error("one_vs_rest: class out of range");
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (int t = 0; t < m.n; ++t) {
        for (int p = 0; p < m.n; ++p) {
            const std::uint64_t c = m.at(t, p);
            if (t == cls && p == cls)
                tp += c;
            else if (t == cls)
                fn += c;
            else if (p == cls)
                fp += c;
            else
                tn += c;
        }
    }
    ClassRates r;
    r.sensitivity = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.specificity = tn + fp == 0 ? 0.0 : static_cast<double>(tn) / static_cast<double>(tn + fp);
    const std::uint64_t total = tp + fp + tn + fn;
    r.accuracy = total == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total);
    return r;
}

} // namespace bifurc
