#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mseg/label.hpp"

namespace mseg {

using Record = std::vector<double>;
using ForestSet = std::vector<std::pair<Record, int>>;  // class in 0..5

// Per-class centroid over a node's sampled feature subset.
struct ClassCenter {
    int cls = 0;
    std::vector<double> center;  // in subset coordinates
};

// Node of a center-split tree: records are routed to the branch of the
// nearest class center by Manhattan distance over the node's feature subset.
struct CenterSplitNode {
    bool leaf = true;
    int leaf_class = 0;
    std::vector<std::size_t> feature_subset;
    std::vector<ClassCenter> centers;          // sorted by class index
    std::vector<std::uint32_t> children;       // parallel to centers
};

struct CenterSplitTree {
    std::vector<CenterSplitNode> nodes;  // nodes[0] is the root
    int predict(const Record& record) const;
};

struct RandomForestModel {
    std::vector<CenterSplitTree> trees;
    std::size_t feature_dim = 0;
    std::size_t subset_size = 0;
};

// Per-class means of the records over the given feature subset; classes
// absent at the node get no center. Output sorted by class index.
std::vector<ClassCenter> rf_node_centers(const ForestSet& records,
                                         const std::vector<std::size_t>& feature_subset);

// Index into `centers` of the nearest center by Manhattan distance over the
// subset coordinates; ties go to the lowest class index.
std::size_t rf_route(const std::vector<double>& record_subset,
                     const std::vector<ClassCenter>& centers);

RandomForestModel rf_train(const ForestSet& dataset, std::size_t n_trees,
                           std::size_t subset_size, std::uint64_t seed);

// Vote fraction per class across all trees.
std::array<double, kNumEventClasses> rf_predict(const RandomForestModel& model,
                                                const Record& record);

}  // namespace mseg
