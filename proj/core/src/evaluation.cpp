#include "bifurc/evaluation.hpp"

namespace bifurc {

EvaluationResult evaluate_model(const MergedModel& model, std::span<const MaskedImage> images,
                                ChannelMode mode) {
    if (images.empty()) throw data_error("evaluate: empty test set");
    const int n = model.classes();

    EvaluationResult result;
    result.seg.assign(static_cast<std::size_t>(n), ClassSegStats{});
    result.matrix = ConfusionMatrix(n);

    std::size_t correct = 0;
    for (const MaskedImage& mi : images) {
        if (mi.abnormality_id < 0 || mi.abnormality_id >= n)
            throw index_error("evaluate: image class " + std::to_string(mi.abnormality_id) +
                              " out of range for a " + std::to_string(n) + "-class model");
        BranchOutput branch = infer(model, mi.image, mode);

        // segmentation score of the image's own head
        const auto cls = static_cast<std::size_t>(mi.abnormality_id);
        SegScores s =
            seg_scores(largest_connected_component(branch.seg[cls]), mi.mask);
        ClassSegStats& stats = result.seg[cls];
        ++stats.images;
        stats.mean_dice += s.dice;
        stats.mean_accuracy += s.accuracy;
        stats.mean_sensitivity += s.sensitivity;
        stats.mean_specificity += s.specificity;

        FusionResult fused = fuse(branch);
        if (!fused.selected) {
            ++result.unclassified;
            continue;
        }
        result.true_labels.push_back(mi.abnormality_id);
        result.predicted_labels.push_back(*fused.selected);
        if (*fused.selected == mi.abnormality_id) ++correct;
    }

    for (auto& stats : result.seg) {
        if (stats.images == 0) continue;
        const double inv = 1.0 / stats.images;
        stats.mean_dice *= inv;
        stats.mean_accuracy *= inv;
        stats.mean_sensitivity *= inv;
        stats.mean_specificity *= inv;
    }
    result.matrix = confusion(result.true_labels, result.predicted_labels, n);
    result.classification_accuracy =
        static_cast<double>(correct) / static_cast<double>(images.size());
    return result;
}

double mean_dice_standalone(const Network<float>& net, std::span<const MaskedImage> images,
                            ChannelMode mode) {
    if (images.empty()) throw data_error("mean_dice_standalone: no images");
    double sum = 0;
    for (const MaskedImage& mi : images) {
        BinaryMap map = largest_connected_component(infer_map(net, mi.image, mode));
        sum += seg_scores(map, mi.mask).dice;
    }
    return sum / static_cast<double>(images.size());
}

} // namespace bifurc
