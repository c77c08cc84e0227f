#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "../dataset.hpp"
#include "../serialize.hpp"

namespace credit {

/// Dense design-matrix encoding for the linear models: one indicator column per
/// category except the first (reference) bin, numeric features passed through.
/// Missing values encode to the column's fill value (0 for indicators, the
/// training mean for numerics).
struct EncodedColumn {
    std::size_t feature = 0;
    std::optional<std::uint32_t> category; // indicator column when set
    double center = 0.0;
    double scale = 1.0;
    double fill = 0.0; // raw value used when the feature is missing

    bool operator==(const EncodedColumn&) const = default;
};

struct Encoder {
    std::size_t input_width = 0;
    std::vector<EncodedColumn> columns;

    std::size_t width() const { return columns.size(); }

    void encode(const Instance& inst, std::span<double> out) const {
        if (inst.values.size() != input_width)
            throw ModelError("encoder: instance has " + std::to_string(inst.values.size()) + " values, expected " +
                             std::to_string(input_width));
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const auto& col = columns[c];
            const auto& v = inst.values[col.feature];
            double raw = col.fill;
            if (col.category) {
                if (const auto* cat = std::get_if<Category>(&v))
                    raw = cat->index == *col.category ? 1.0 : 0.0;
            } else if (const auto* d = std::get_if<double>(&v)) {
                raw = *d;
            }
            out[c] = (raw - col.center) / col.scale;
        }
    }

    Eigen::VectorXd encode(const Instance& inst) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(width()));
        encode(inst, std::span<double>(x.data(), width()));
        return x;
    }

    /// Row-per-instance design matrix.
    Eigen::MatrixXd encode(const Dataset& d) const {
        Eigen::MatrixXd X(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(width()));
        Eigen::VectorXd row(static_cast<Eigen::Index>(width()));
        for (std::size_t i = 0; i < d.size(); ++i) {
            encode(d.instances[i], std::span<double>(row.data(), width()));
            X.row(static_cast<Eigen::Index>(i)) = row.transpose();
        }
        return X;
    }

    void write(RecordWriter& w) const {
        w.line("encoder", {std::to_string(input_width), std::to_string(columns.size())});
        for (const auto& c : columns)
            w.line("column", {std::to_string(c.feature), c.category ? std::to_string(*c.category) : "-",
                              format_double(c.center), format_double(c.scale), format_double(c.fill)});
    }

    static Encoder read(RecordReader& r) {
        auto head = r.next("encoder");
        if (head.size() != 2)
            throw ModelError("model file: malformed encoder header");
        Encoder e;
        e.input_width = RecordReader::to_size(head[0]);
        const auto n = RecordReader::to_size(head[1]);
        for (std::size_t i = 0; i < n; ++i) {
            auto f = r.next("column");
            if (f.size() != 5)
                throw ModelError("model file: malformed encoder column");
            EncodedColumn c;
            c.feature = RecordReader::to_size(f[0]);
            if (f[1] != "-")
                c.category = static_cast<std::uint32_t>(RecordReader::to_size(f[1]));
            c.center = RecordReader::to_double(f[2]);
            c.scale = RecordReader::to_double(f[3]);
            c.fill = RecordReader::to_double(f[4]);
            if (c.feature >= e.input_width)
                throw ModelError("model file: encoder column out of range");
            e.columns.push_back(c);
        }
        return e;
    }

    bool operator==(const Encoder&) const = default;
};

/// Builds the encoding from training data; `standardize` z-scores every column.
inline Encoder fit_encoder(const Dataset& d, bool standardize) {
    Encoder e;
    e.input_width = d.schema.size();
    for (std::size_t j = 0; j < d.schema.size(); ++j) {
        const auto& f = d.schema.features[j];
        if (f.kind == FeatureKind::nominal) {
            for (std::uint32_t c = 1; c < f.categories.size(); ++c)
                e.columns.push_back({j, c, 0.0, 1.0, 0.0});
        } else {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& inst : d.instances)
                if (const auto* v = std::get_if<double>(&inst.values[j])) {
                    sum += *v;
                    ++n;
                }
            e.columns.push_back({j, std::nullopt, 0.0, 1.0, n ? sum / static_cast<double>(n) : 0.0});
        }
    }
    if (standardize) {
        const Eigen::MatrixXd X = e.encode(d);
        const double n = static_cast<double>(d.size());
        for (std::size_t c = 0; c < e.columns.size(); ++c) {
            const auto col = X.col(static_cast<Eigen::Index>(c));
            const double mean = n > 0 ? col.sum() / n : 0.0;
            const double var = n > 0 ? (col.array() - mean).square().sum() / n : 0.0;
            e.columns[c].center = mean;
            e.columns[c].scale = var > 0.0 ? std::sqrt(var) : 1.0;
        }
    }
    return e;
}

} // namespace credit
