#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "../dataset.hpp"
#include "../discretize.hpp"
#include "../rng.hpp"
#include "../serialize.hpp"
#include "spec.hpp"

namespace credit {

struct TreeNode {
    static constexpr std::size_t leaf = static_cast<std::size_t>(-1);

    std::size_t feature = leaf;          // split feature, or leaf
    std::array<std::size_t, 2> counts{}; // training class counts reaching the node
    std::vector<std::size_t> children;   // one per category of the split feature
    std::size_t majority_child = 0;      // route for missing values

    bool is_leaf() const { return feature == leaf; }
    std::size_t total() const { return counts[0] + counts[1]; }

    bool operator==(const TreeNode&) const = default;
};

/// Multiway decision tree over nominal inputs. Node 0 is the root.
struct TreeModel {
    std::vector<TreeNode> nodes;
    double laplace = 1.0;

    const TreeNode& leaf_for(const Instance& inst) const {
        const TreeNode* node = &nodes.at(0);
        const TreeNode* populated = node;
        while (!node->is_leaf()) {
            const auto& v = inst.values.at(node->feature);
            std::size_t child = node->majority_child;
            if (const auto* c = std::get_if<Category>(&v)) {
                if (c->index >= node->children.size())
                    throw ModelError("tree: category out of range");
                child = c->index;
            }
            node = &nodes[node->children[child]];
            if (node->total() > 0)
                populated = node;
        }
        // A branch no training instance reached scores with its nearest populated ancestor.
        return node->total() > 0 ? *node : *populated;
    }

    /// Laplace-smoothed good fraction of the leaf reached.
    double score(const Instance& inst) const {
        const auto& leaf = leaf_for(inst);
        return (static_cast<double>(leaf.counts[1]) + laplace) / (static_cast<double>(leaf.total()) + 2.0 * laplace);
    }

    std::size_t depth(std::size_t node = 0) const {
        std::size_t d = 0;
        for (auto c : nodes[node].children)
            d = std::max(d, 1 + depth(c));
        return d;
    }

    void write(RecordWriter& w) const {
        w.numbers("laplace", {laplace});
        w.line("nodes", {std::to_string(nodes.size())});
        for (const auto& n : nodes) {
            std::vector<std::string> f{n.is_leaf() ? "-" : std::to_string(n.feature), std::to_string(n.counts[0]),
                                       std::to_string(n.counts[1]), std::to_string(n.majority_child)};
            for (auto c : n.children)
                f.push_back(std::to_string(c));
            w.line("node", f);
        }
    }

    static TreeModel read(RecordReader& r) {
        TreeModel t;
        t.laplace = r.number("laplace");
        const auto n = r.count("nodes");
        t.nodes.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto f = r.next("node");
            if (f.size() < 4)
                throw ModelError("model file: malformed tree node");
            TreeNode node;
            if (f[0] != "-")
                node.feature = RecordReader::to_size(f[0]);
            node.counts = {RecordReader::to_size(f[1]), RecordReader::to_size(f[2])};
            node.majority_child = RecordReader::to_size(f[3]);
            for (std::size_t c = 4; c < f.size(); ++c) {
                const auto child = RecordReader::to_size(f[c]);
                if (child <= i || child >= n)
                    throw ModelError("model file: tree child index out of order");
                node.children.push_back(child);
            }
            if (!node.is_leaf() && node.majority_child >= node.children.size())
                throw ModelError("model file: bad missing-value route");
            t.nodes.push_back(std::move(node));
        }
        if (t.nodes.empty())
            throw ModelError("model file: empty tree");
        return t;
    }

    bool operator==(const TreeModel&) const = default;
};

namespace detail {

struct TreeGrowth {
    const Dataset& data;
    std::size_t min_leaf;
    std::size_t features_per_split; // >= available means every feature is a candidate
    Rng* rng;                       // required only when subsampling features
    TreeModel model;

    std::size_t grow(const std::vector<std::size_t>& rows, std::vector<std::size_t> available) {
        const std::size_t id = model.nodes.size();
        model.nodes.emplace_back();
        std::array<std::size_t, 2> counts{0, 0};
        for (auto r : rows)
            ++counts[label_index(data.instances[r].label)];
        model.nodes[id].counts = counts;

        const bool pure = counts[0] == 0 || counts[1] == 0;
        if (pure || rows.size() < 2 * min_leaf || available.empty())
            return id;

        std::vector<std::size_t> candidates = available;
        if (features_per_split < candidates.size()) {
            // partial Fisher-Yates
            for (std::size_t i = 0; i < features_per_split; ++i)
                std::swap(candidates[i], candidates[i + rng->index(candidates.size() - i)]);
            candidates.resize(features_per_split);
        }

        std::optional<std::size_t> best;
        double best_gain = 0.0;
        for (auto j : candidates) {
            const auto bins = data.schema.features[j].categories.size();
            std::vector<std::array<std::size_t, 2>> table(bins, {0, 0});
            std::array<std::size_t, 2> known{0, 0};
            for (auto r : rows)
                if (const auto* c = std::get_if<Category>(&data.instances[r].values[j])) {
                    ++table[c->index][label_index(data.instances[r].label)];
                    ++known[label_index(data.instances[r].label)];
                }
            std::size_t large_children = 0;
            for (const auto& t : table)
                if (t[0] + t[1] >= min_leaf)
                    ++large_children;
            if (large_children < 2)
                continue;
            const double n_known = static_cast<double>(known[0] + known[1]);
            double conditional = 0.0;
            for (const auto& t : table)
                if (t[0] + t[1] > 0)
                    conditional += static_cast<double>(t[0] + t[1]) / n_known * entropy(t);
            const double gain = n_known / static_cast<double>(rows.size()) * (entropy(known) - conditional);
            if (!best || gain > best_gain) {
                best = j;
                best_gain = gain;
            }
        }
        if (!best)
            return id;

        const auto feature = *best;
        const auto bins = data.schema.features[feature].categories.size();
        std::vector<std::vector<std::size_t>> parts(bins);
        std::vector<std::size_t> missing;
        for (auto r : rows) {
            if (const auto* c = std::get_if<Category>(&data.instances[r].values[feature]))
                parts[c->index].push_back(r);
            else
                missing.push_back(r);
        }
        std::size_t majority = 0;
        for (std::size_t b = 1; b < bins; ++b)
            if (parts[b].size() > parts[majority].size())
                majority = b;
        parts[majority].insert(parts[majority].end(), missing.begin(), missing.end());

        std::erase(available, feature);
        std::vector<std::size_t> children;
        for (const auto& part : parts)
            children.push_back(grow(part, available));
        auto& node = model.nodes[id];
        node.feature = feature;
        node.children = std::move(children);
        node.majority_child = majority;
        return id;
    }
};

// Pessimistic error of a leaf: misclassified training instances + 1/2.
inline double leaf_error(const TreeNode& n) {
    return n.total() == 0 ? 0.0 : static_cast<double>(std::min(n.counts[0], n.counts[1])) + 0.5;
}

inline double prune(TreeModel& t, std::size_t id) {
    auto& node = t.nodes[id];
    if (node.is_leaf())
        return leaf_error(node);
    double subtree = 0.0;
    for (auto c : std::vector<std::size_t>(node.children))
        subtree += prune(t, c);
    auto& again = t.nodes[id];
    const double as_leaf = leaf_error(again);
    if (as_leaf <= subtree) {
        again.feature = TreeNode::leaf;
        again.children.clear();
        again.majority_child = 0;
        return as_leaf;
    }
    return subtree;
}

/// Drops nodes no longer reachable from the root, renumbering in preorder.
inline TreeModel compact(const TreeModel& t) {
    TreeModel out;
    out.laplace = t.laplace;
    auto copy = [&](auto&& self, std::size_t id) -> std::size_t {
        const std::size_t nid = out.nodes.size();
        out.nodes.push_back(t.nodes[id]);
        std::vector<std::size_t> kids;
        for (auto c : t.nodes[id].children)
            kids.push_back(self(self, c));
        out.nodes[nid].children = std::move(kids);
        return nid;
    };
    copy(copy, 0);
    return out;
}

inline TreeModel grow_tree(const Dataset& d, const std::vector<std::size_t>& rows, std::size_t min_leaf,
                           std::size_t features_per_split, Rng* rng, bool prune_tree, double laplace) {
    for (const auto& f : d.schema.features)
        if (f.kind != FeatureKind::nominal)
            throw ModelError("tree: feature '" + f.name + "' must be discretized");
    std::vector<std::size_t> available(d.schema.size());
    for (std::size_t j = 0; j < available.size(); ++j)
        available[j] = j;
    TreeGrowth g{d, min_leaf, features_per_split, rng, {}};
    g.model.laplace = laplace;
    g.grow(rows, available);
    if (prune_tree) {
        prune(g.model, 0);
        return compact(g.model);
    }
    return std::move(g.model);
}

} // namespace detail

/// Recursive partitioning on the highest information gain feature, one branch
/// per bin. A node becomes a leaf when it is pure, holds fewer than 2*min_leaf
/// instances, or no feature yields at least two branches of min_leaf instances.
inline TreeModel fit_tree(const Dataset& train, const ClassifierSpec& spec) {
    std::vector<std::size_t> rows(train.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = i;
    return detail::grow_tree(train, rows, spec.min_leaf, train.schema.size(), nullptr, spec.prune, spec.laplace);
}

} // namespace credit
