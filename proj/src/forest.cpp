#include "mseg/forest.hpp"

#include <algorithm>
#include <cmath>

#include "mseg/errors.hpp"
#include "mseg/rng.hpp"

namespace mseg {

std::vector<ClassCenter> rf_node_centers(const ForestSet& records,
                                         const std::vector<std::size_t>& feature_subset) {
    if (records.empty()) return {};
    std::array<std::size_t, kNumEventClasses> counts{};
    std::array<std::vector<double>, kNumEventClasses> sums;
    for (const auto& [rec, cls] : records) {
        auto c = static_cast<std::size_t>(cls);
        if (sums[c].empty()) sums[c].assign(feature_subset.size(), 0.0);
        for (std::size_t k = 0; k < feature_subset.size(); ++k) {
            sums[c][k] += rec[feature_subset[k]];
        }
        ++counts[c];
    }
    std::vector<ClassCenter> centers;
    for (std::size_t c = 0; c < kNumEventClasses; ++c) {
        if (counts[c] == 0) continue;
        ClassCenter cc;
        cc.cls = static_cast<int>(c);
        cc.center = sums[c];
        for (double& v : cc.center) v /= static_cast<double>(counts[c]);
        centers.push_back(std::move(cc));
    }
    return centers;
}

std::size_t rf_route(const std::vector<double>& record_subset,
                     const std::vector<ClassCenter>& centers) {
    if (centers.empty()) throw EmptyDataset("rf_route: no centers");
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        double d = 0.0;
        for (std::size_t k = 0; k < record_subset.size(); ++k) {
            d += std::abs(centers[i].center[k] - record_subset[k]);
        }
        if (d < best_d) {  // strict: ties keep the lowest class index
            best_d = d;
            best = i;
        }
    }
    return best;
}

namespace {

std::vector<double> project(const Record& record, const std::vector<std::size_t>& subset) {
    std::vector<double> out(subset.size());
    for (std::size_t k = 0; k < subset.size(); ++k) out[k] = record[subset[k]];
    return out;
}

int majority_class(const ForestSet& records) {
    std::array<std::size_t, kNumEventClasses> counts{};
    for (const auto& [rec, cls] : records) ++counts[static_cast<std::size_t>(cls)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return static_cast<int>(best);
}

bool is_pure(const ForestSet& records) {
    for (const auto& [rec, cls] : records) {
        if (cls != records.front().second) return false;
    }
    return true;
}

// Sorted sample of `k` distinct feature indices.
std::vector<std::size_t> sample_subset(std::size_t dim, std::size_t k, Rng& rng) {
    std::vector<std::size_t> all(dim);
    for (std::size_t i = 0; i < dim; ++i) all[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(dim - i));
        std::swap(all[i], all[j]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

std::uint32_t build_node(CenterSplitTree& tree, const ForestSet& records, std::size_t subset_size,
                         std::size_t dim, Rng& rng) {
    auto idx = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (records.size() < 2 || is_pure(records)) {
        tree.nodes[idx].leaf = true;
        tree.nodes[idx].leaf_class = majority_class(records);
        return idx;
    }
    std::vector<std::size_t> subset = sample_subset(dim, subset_size, rng);
    std::vector<ClassCenter> centers = rf_node_centers(records, subset);
    std::vector<ForestSet> branches(centers.size());
    for (const auto& rec : records) {
        branches[rf_route(project(rec.first, subset), centers)].push_back(rec);
    }
    std::size_t nonempty = 0;
    for (const auto& b : branches) {
        if (!b.empty()) ++nonempty;
    }
    if (nonempty < 2) {  // split failed to separate anything
        tree.nodes[idx].leaf = true;
        tree.nodes[idx].leaf_class = majority_class(records);
        return idx;
    }
    tree.nodes[idx].leaf = false;
    tree.nodes[idx].feature_subset = std::move(subset);
    tree.nodes[idx].centers = std::move(centers);
    tree.nodes[idx].children.resize(tree.nodes[idx].centers.size());
    for (std::size_t b = 0; b < branches.size(); ++b) {
        std::uint32_t child;
        if (branches[b].empty()) {
            // Route-to-empty cannot happen at train time (each center owns at
            // least its own records' nearest point), but keep a leaf anyway.
            child = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes[child].leaf = true;
            tree.nodes[child].leaf_class = tree.nodes[idx].centers[b].cls;
        } else {
            child = build_node(tree, branches[b], subset_size, dim, rng);
        }
        tree.nodes[idx].children[b] = child;
    }
    return idx;
}

}  // namespace

int CenterSplitTree::predict(const Record& record) const {
    std::uint32_t idx = 0;
    while (!nodes[idx].leaf) {
        const CenterSplitNode& node = nodes[idx];
        idx = node.children[rf_route(project(record, node.feature_subset), node.centers)];
    }
    return nodes[idx].leaf_class;
}

RandomForestModel rf_train(const ForestSet& dataset, std::size_t n_trees,
                           std::size_t subset_size, std::uint64_t seed) {
    if (dataset.empty()) throw EmptyDataset("rf_train: empty dataset");
    if (n_trees < 1) throw ConfigError("rf_train: n_trees must be >= 1");
    const std::size_t dim = dataset.front().first.size();
    if (subset_size < 1 || subset_size > dim) {
        throw ConfigError("rf_train: subset_size must be in [1, feature_dim]");
    }
    RandomForestModel model;
    model.feature_dim = dim;
    model.subset_size = subset_size;
    Rng master(seed);
    for (std::size_t t = 0; t < n_trees; ++t) {
        Rng rng(master.fork_seed());
        ForestSet sample;  // bootstrap
        sample.reserve(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            sample.push_back(dataset[static_cast<std::size_t>(rng.uniform_index(dataset.size()))]);
        }
        CenterSplitTree tree;
        build_node(tree, sample, subset_size, dim, rng);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::array<double, kNumEventClasses> rf_predict(const RandomForestModel& model,
                                                const Record& record) {
    if (model.trees.empty()) throw EmptyDataset("rf_predict: model has no trees");
    std::array<double, kNumEventClasses> votes{};
    for (const CenterSplitTree& tree : model.trees) {
        votes[static_cast<std::size_t>(tree.predict(record))] += 1.0;
    }
    for (double& v : votes) v /= static_cast<double>(model.trees.size());
    return votes;
}

}  // namespace mseg
