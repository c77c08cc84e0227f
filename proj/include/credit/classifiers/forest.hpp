#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "../parallel.hpp"
#include "../rng.hpp"
#include "tree.hpp"

namespace credit {

/// Bagged multiway trees with per-node random feature subsets.
struct ForestModel {
    std::vector<TreeModel> trees;
    std::vector<std::uint64_t> seeds; // per-tree seed, derived from the master seed

    /// Mean of the trees' smoothed leaf scores.
    double score(const Instance& inst) const {
        double sum = 0.0;
        for (const auto& t : trees)
            sum += t.score(inst);
        return sum / static_cast<double>(trees.size());
    }

    void write(RecordWriter& w) const {
        w.line("trees", {std::to_string(trees.size())});
        for (std::size_t i = 0; i < trees.size(); ++i) {
            w.line("tree_seed", {std::to_string(seeds[i])});
            trees[i].write(w);
        }
    }

    static ForestModel read(RecordReader& r) {
        ForestModel f;
        const auto n = r.count("trees");
        if (n == 0)
            throw ModelError("model file: forest without trees");
        for (std::size_t i = 0; i < n; ++i) {
            auto s = r.next("tree_seed");
            if (s.size() != 1)
                throw ModelError("model file: malformed tree seed");
            auto v = parse_int<std::uint64_t>(s[0]);
            if (!v)
                throw ModelError("model file: malformed tree seed");
            f.seeds.push_back(*v);
            f.trees.push_back(TreeModel::read(r));
        }
        return f;
    }

    bool operator==(const ForestModel&) const = default;
};

inline std::size_t default_features_per_split(std::size_t m) {
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
}

/// Tree i is grown from seed mix(seed, i) alone, so results do not depend on
/// how many threads grow the forest.
inline ForestModel fit_forest(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed) {
    const std::size_t m = train.schema.size();
    const std::size_t per_split = spec.features_per_split ? spec.features_per_split : default_features_per_split(m);
    ForestModel forest;
    for (std::size_t i = 0; i < spec.trees; ++i)
        forest.seeds.push_back(derive_seed(seed, "tree", i));
    forest.trees = parallel_map(spec.trees, spec.threads, [&](std::size_t i) {
        Rng rng(forest.seeds[i]);
        std::vector<std::size_t> rows(train.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            rows[r] = spec.bootstrap ? rng.index(train.size()) : r;
        return detail::grow_tree(train, rows, spec.forest_min_leaf, per_split, &rng, false, spec.laplace);
    });
    return forest;
}

} // namespace credit
