#pragma once

#include <cmath>
#include <cstdint>
#include <variant>

#include "../dataset.hpp"
#include "../serialize.hpp"
#include "forest.hpp"
#include "logistic.hpp"
#include "naive_bayes.hpp"
#include "nn1.hpp"
#include "spec.hpp"
#include "svm.hpp"
#include "tree.hpp"

namespace credit {

/// Baseline scoring every instance with the same probability.
struct ConstantModel {
    double value = 0.5;

    double score(const Instance&) const { return value; }
    void write(RecordWriter& w) const { w.numbers("value", {value}); }
    static ConstantModel read(RecordReader& r) { return {r.number("value")}; }
    bool operator==(const ConstantModel&) const = default;
};

using ClassifierModel =
    std::variant<ConstantModel, NaiveBayesModel, LogisticModel, Nn1Model, TreeModel, ForestModel, SvmModel>;

inline ClassifierKind kind_of(const ClassifierModel& m) {
    constexpr ClassifierKind kinds[] = {ClassifierKind::constant, ClassifierKind::naive_bayes, ClassifierKind::logistic,
                                        ClassifierKind::nn1,      ClassifierKind::tree,        ClassifierKind::forest,
                                        ClassifierKind::svm_linear};
    return kinds[m.index()];
}

/// Whether the kind consumes discretized bins (everything except nn1).
inline bool uses_discretized_inputs(ClassifierKind k) { return k != ClassifierKind::nn1; }

inline ClassifierModel fit_classifier(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto [n_good, n_bad] = class_counts(train);
    if (spec.kind != ClassifierKind::constant && (n_good == 0 || n_bad == 0))
        throw ModelError("cannot fit " + std::string(to_string(spec.kind)) + ": training data has a single class");
    switch (spec.kind) {
    case ClassifierKind::constant: return ConstantModel{};
    case ClassifierKind::naive_bayes: return fit_naive_bayes(train, spec);
    case ClassifierKind::logistic: return fit_logistic(train, spec);
    case ClassifierKind::nn1: return fit_nn1(train, spec);
    case ClassifierKind::tree: return fit_tree(train, spec);
    case ClassifierKind::forest: return fit_forest(train, spec, seed);
    case ClassifierKind::svm_linear: return fit_svm(train, spec);
    }
    throw UsageError("unknown classifier kind");
}

/// P(good | x) for any model kind, clamped into [0,1].
inline double score(const ClassifierModel& m, const Instance& inst) {
    const double s = std::visit([&](const auto& model) { return model.score(inst); }, m);
    if (!std::isfinite(s))
        throw ModelError("classifier produced a non-finite score");
    return std::clamp(s, 0.0, 1.0);
}

inline void write_model(RecordWriter& w, const ClassifierModel& m) {
    w.line("classifier", {std::string(to_string(kind_of(m)))});
    std::visit([&](const auto& model) { model.write(w); }, m);
}

inline ClassifierModel read_model(RecordReader& r) {
    auto f = r.next("classifier");
    if (f.size() != 1)
        throw ModelError("model file: malformed classifier line");
    ClassifierKind kind;
    try {
        kind = parse_classifier_kind(f[0]);
    } catch (const UsageError& e) {
        throw ModelError(std::string("model file: ") + e.what());
    }
    switch (kind) {
    case ClassifierKind::constant: return ConstantModel::read(r);
    case ClassifierKind::naive_bayes: return NaiveBayesModel::read(r);
    case ClassifierKind::logistic: return LogisticModel::read(r);
    case ClassifierKind::nn1: return Nn1Model::read(r);
    case ClassifierKind::tree: return TreeModel::read(r);
    case ClassifierKind::forest: return ForestModel::read(r);
    case ClassifierKind::svm_linear: return SvmModel::read(r);
    }
    throw ModelError("model file: unknown classifier");
}

} // namespace credit
