#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"

namespace credit {

enum class ClassifierKind { naive_bayes, logistic, nn1, tree, forest, svm_linear, constant };

inline constexpr ClassifierKind all_classifier_kinds[] = {
    ClassifierKind::naive_bayes, ClassifierKind::logistic, ClassifierKind::svm_linear,
    ClassifierKind::nn1,         ClassifierKind::tree,     ClassifierKind::forest,
};

inline std::string_view to_string(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::naive_bayes: return "naive_bayes";
    case ClassifierKind::logistic: return "logistic";
    case ClassifierKind::nn1: return "nn1";
    case ClassifierKind::tree: return "tree";
    case ClassifierKind::forest: return "forest";
    case ClassifierKind::svm_linear: return "svm_linear";
    case ClassifierKind::constant: return "constant";
    }
    return "?";
}

inline ClassifierKind parse_classifier_kind(std::string_view s) {
    for (auto k : {ClassifierKind::naive_bayes, ClassifierKind::logistic, ClassifierKind::nn1, ClassifierKind::tree,
                   ClassifierKind::forest, ClassifierKind::svm_linear, ClassifierKind::constant})
        if (to_string(k) == s)
            return k;
    if (s == "svm")
        return ClassifierKind::svm_linear;
    throw UsageError("unknown classifier '" + std::string(s) + "'");
}

/// Classifier kind plus every hyperparameter; fields irrelevant to the kind are ignored.
struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::naive_bayes;

    // naive Bayes, tree and forest leaves
    double laplace = 1.0;

    // logistic regression
    double ridge = 1e-8;
    std::size_t max_iterations = 100;
    double tolerance = 1e-8; // on the per-instance gradient, infinity norm

    // nearest neighbour
    bool normalize = true;

    // decision tree
    std::size_t min_leaf = 2;
    bool prune = false;

    // random forest
    std::size_t trees = 100;
    std::size_t features_per_split = 0; // 0: ceil(sqrt(m))
    bool bootstrap = true;
    std::size_t forest_min_leaf = 1;

    // linear SVM
    double complexity = 1.0;
    std::size_t epochs = 100;

    // worker threads for forest growth
    std::size_t threads = 1;

    void validate() const {
        if (!(laplace > 0.0))
            throw UsageError("laplace smoothing must be positive");
        if (!(ridge > 0.0) || !(tolerance > 0.0))
            throw UsageError("ridge and tolerance must be positive");
        if (min_leaf == 0 || forest_min_leaf == 0)
            throw UsageError("minimum leaf size must be positive");
        if (trees == 0)
            throw UsageError("forest needs at least one tree");
        if (!(complexity > 0.0) || epochs == 0)
            throw UsageError("svm complexity and epochs must be positive");
    }

    bool operator==(const ClassifierSpec&) const = default;
};

} // namespace credit
