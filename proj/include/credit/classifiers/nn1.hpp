#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "../dataset.hpp"
#include "../serialize.hpp"
#include "spec.hpp"

namespace credit {

/// One nearest neighbour over raw inputs: numeric features min-max scaled to
/// [0,1] with training statistics, nominal features as 0/1 mismatch.
struct Nn1Model {
    std::vector<FeatureKind> kinds;
    std::vector<double> low;  // numeric features: training minimum
    std::vector<double> high; // numeric features: training maximum
    std::vector<double> fill; // numeric features: training mean, used for missing values
    bool normalize = true;
    std::vector<Instance> rows;

    double coordinate(std::size_t j, const Value& v) const {
        double x = fill[j];
        if (const auto* d = std::get_if<double>(&v))
            x = *d;
        if (!normalize)
            return x;
        const double range = high[j] - low[j];
        return range > 0.0 ? (x - low[j]) / range : 0.0;
    }

    /// Squared distance; missing nominal values count as their own category.
    double distance2(const Instance& a, const Instance& b) const {
        double d2 = 0.0;
        for (std::size_t j = 0; j < kinds.size(); ++j) {
            if (kinds[j] == FeatureKind::numeric) {
                const double diff = coordinate(j, a.values[j]) - coordinate(j, b.values[j]);
                d2 += diff * diff;
            } else if (!(a.values[j] == b.values[j])) {
                d2 += 1.0;
            }
        }
        return d2;
    }

    /// Index of the nearest stored row; ties go to the earliest row.
    std::size_t nearest(const Instance& inst) const {
        if (rows.empty())
            throw ModelError("nn1: empty model");
        if (inst.values.size() != kinds.size())
            throw ModelError("nn1: instance width mismatch");
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double d2 = distance2(inst, rows[i]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        return best;
    }

    double score(const Instance& inst) const { return rows[nearest(inst)].label == Label::good ? 1.0 : 0.0; }

    void write(RecordWriter& w) const {
        std::vector<std::string> k;
        for (auto kind : kinds)
            k.emplace_back(to_string(kind));
        w.line("kinds", k);
        w.numbers("low", low);
        w.numbers("high", high);
        w.numbers("fill", fill);
        w.line("normalize", {normalize ? "1" : "0"});
        w.line("rows", {std::to_string(rows.size())});
        for (const auto& r : rows) {
            std::vector<std::string> f{r.label == Label::good ? "good" : "bad"};
            for (const auto& v : r.values) {
                if (is_missing(v))
                    f.emplace_back("?");
                else if (const auto* d = std::get_if<double>(&v))
                    f.push_back(format_double(*d));
                else
                    f.push_back("#" + std::to_string(std::get<Category>(v).index));
            }
            w.line("row", f);
        }
    }

    static Nn1Model read(RecordReader& r) {
        Nn1Model m;
        for (const auto& k : r.next("kinds")) {
            if (k == "numeric")
                m.kinds.push_back(FeatureKind::numeric);
            else if (k == "nominal")
                m.kinds.push_back(FeatureKind::nominal);
            else
                throw ModelError("model file: bad feature kind '" + k + "'");
        }
        const auto width = m.kinds.size();
        m.low = r.numbers("low", width);
        m.high = r.numbers("high", width);
        m.fill = r.numbers("fill", width);
        m.normalize = r.count("normalize") != 0;
        const auto n = r.count("rows");
        m.rows.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto f = r.next("row");
            if (f.size() != width + 1)
                throw ModelError("model file: malformed nn1 row");
            Instance inst;
            inst.label = f[0] == "good" ? Label::good : Label::bad;
            for (std::size_t j = 0; j < width; ++j) {
                const auto& cell = f[j + 1];
                if (cell == "?")
                    inst.values.emplace_back(Missing{});
                else if (cell.starts_with("#"))
                    inst.values.emplace_back(Category{static_cast<std::uint32_t>(RecordReader::to_size(cell.substr(1)))});
                else
                    inst.values.emplace_back(RecordReader::to_double(cell));
            }
            m.rows.push_back(std::move(inst));
        }
        return m;
    }

    bool operator==(const Nn1Model&) const = default;
};

inline Nn1Model fit_nn1(const Dataset& train, const ClassifierSpec& spec) {
    Nn1Model m;
    m.normalize = spec.normalize;
    const auto width = train.schema.size();
    m.low.assign(width, 0.0);
    m.high.assign(width, 0.0);
    m.fill.assign(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
        m.kinds.push_back(train.schema.features[j].kind);
        if (m.kinds[j] != FeatureKind::numeric)
            continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& inst : train.instances)
            if (const auto* v = std::get_if<double>(&inst.values[j])) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
                sum += *v;
                ++n;
            }
        if (n > 0) {
            m.low[j] = lo;
            m.high[j] = hi;
            m.fill[j] = sum / static_cast<double>(n);
        }
    }
    m.rows = train.instances;
    if (m.rows.empty())
        throw ModelError("nn1: no training instances");
    return m;
}

} // namespace credit
