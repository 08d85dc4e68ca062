#ifndef BIFURC_EVALUATION_HPP
#define BIFURC_EVALUATION_HPP

#include <span>

#include "bifurc/fusion.hpp"
#include "bifurc/metrics.hpp"
#include "bifurc/model.hpp"
#include "bifurc/patches.hpp"

namespace bifurc {

struct ClassSegStats {
    int images = 0;
    double mean_dice = 0.0;
    double mean_accuracy = 0.0;
    double mean_sensitivity = 0.0;
    double mean_specificity = 0.0;
};

struct EvaluationResult {
    // segmentation branch: head i scored on class-i images, maps post-
    // processed with the largest connected component, per-image Dice averaged
    std::vector<ClassSegStats> seg;
    // fused classification at image level
    ConfusionMatrix matrix;
    int unclassified = 0; // fusion returned "no abnormality"
    double classification_accuracy = 0.0; // trace / all images; unclassified count as wrong
    std::vector<int> true_labels;     // classified images only
    std::vector<int> predicted_labels;
};

EvaluationResult evaluate_model(const MergedModel& model, std::span<const MaskedImage> images,
                                ChannelMode mode);

// Mean per-image Dice of one standalone 2-way network over images of its own
// class, with the same largest-component post-processing.
double mean_dice_standalone(const Network<float>& net, std::span<const MaskedImage> images,
                            ChannelMode mode);

} // namespace bifurc

#endif
