#ifndef BIFURC_FUSION_HPP
#define BIFURC_FUSION_HPP

#include <optional>
#include <vector>

#include "bifurc/connected.hpp"
#include "bifurc/pipeline.hpp"

namespace bifurc {

// similarity = (|S n C| / |S| + |S n C| / |C|) / 2.
// A ratio with a zero denominator contributes 0, so empty branches can never
// beat a genuine match; two empty maps score 0.
double similarity(const BinaryMap& seg, const BinaryMap& cls);

// Index maximizing similarity over the S_i/C_i pairs; ties break to the
// smallest index.
int select_class(const BranchOutput& branch);

struct FusionResult {
    std::vector<double> similarities;
    std::optional<int> selected;  // empty when every similarity is 0 ("no abnormality")
    BinaryMap final_map;          // largest connected component of S_k, or all-false
};

FusionResult fuse(const BranchOutput& branch);

} // namespace bifurc

#endif
