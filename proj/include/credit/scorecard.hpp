#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "rank.hpp"

namespace credit {

/// ln(share_good / share_bad); positive for good-leaning bins.
inline double woe(double share_good, double share_bad) {
    if (!(share_good > 0.0) || !(share_bad > 0.0))
        throw UsageError("woe: shares must be positive");
    return std::log(share_good / share_bad);
}

struct WoeRow {
    std::string feature;
    std::string bin;
    std::size_t good_count = 0;
    std::size_t bad_count = 0;
    double share_good = 0.0;
    double share_bad = 0.0;
    double woe = 0.0;
    bool smoothed = false;
};

inline constexpr double woe_smoothing = 0.5;

/// Per feature, per bin weight of evidence over a discretized dataset, in schema
/// then bin order. A feature with any zero good or bad cell gets 0.5 added to
/// every cell before shares are formed.
inline std::vector<WoeRow> woe_table(const Dataset& d, const std::vector<std::size_t>& features) {
    const auto [n_good, n_bad] = class_counts(d);
    if (n_good == 0 || n_bad == 0)
        throw DataError("woe_table: dataset must contain both classes");
    std::vector<std::size_t> order = features;
    std::sort(order.begin(), order.end());
    std::vector<WoeRow> rows;
    for (auto j : order) {
        const auto table = contingency(d, j);
        const auto& f = d.schema.features[j];
        const bool smooth = std::any_of(table.begin(), table.end(), [](const auto& r) { return r[0] == 0 || r[1] == 0; });
        const double add = smooth ? woe_smoothing : 0.0;
        std::size_t known_good = 0, known_bad = 0;
        for (const auto& r : table) {
            known_bad += r[0];
            known_good += r[1];
        }
        const double bins = static_cast<double>(table.size());
        const double total_good = static_cast<double>(known_good) + add * bins;
        const double total_bad = static_cast<double>(known_bad) + add * bins;
        for (std::size_t b = 0; b < table.size(); ++b) {
            WoeRow row;
            row.feature = f.name;
            row.bin = f.categories[b];
            row.good_count = table[b][1];
            row.bad_count = table[b][0];
            row.share_good = (static_cast<double>(row.good_count) + add) / total_good;
            row.share_bad = (static_cast<double>(row.bad_count) + add) / total_bad;
            row.woe = woe(row.share_good, row.share_bad);
            row.smoothed = smooth;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline void write_woe_csv(std::ostream& out, const std::vector<WoeRow>& rows) {
    out << "feature,bin,good_count,bad_count,share_good,share_bad,woe,smoothed\n";
    for (const auto& r : rows)
        out << csv_escape(r.feature) << ',' << csv_escape(r.bin) << ',' << r.good_count << ',' << r.bad_count << ','
            << format_double(r.share_good) << ',' << format_double(r.share_bad) << ',' << format_double(r.woe) << ','
            << (r.smoothed ? 1 : 0) << '\n';
}

/// Aligned plain-text scorecard: attribute, bin, WOE, then counts and shares.
inline void write_woe_report(std::ostream& out, const std::vector<WoeRow>& rows, const std::string& header_note) {
    std::size_t wf = std::string("Attribute").size(), wb = std::string("Bin").size();
    for (const auto& r : rows) {
        wf = std::max(wf, r.feature.size());
        wb = std::max(wb, r.bin.size());
    }
    out << "# Weight of evidence report\n# " << header_note << "\n\n";
    auto cell = [&](const std::string& s, std::size_t w) { out << std::left << std::setw(static_cast<int>(w + 2)) << s; };
    auto num = [&](const std::string& s, std::size_t w) { out << std::right << std::setw(static_cast<int>(w)) << s; };
    cell("Attribute", wf);
    cell("Bin", wb);
    num("WOE", 9);
    num("Goods", 9);
    num("Bads", 7);
    num("%Good", 9);
    num("%Bad", 9);
    out << '\n';
    std::string last;
    for (const auto& r : rows) {
        cell(r.feature == last ? "" : r.feature, wf);
        last = r.feature;
        cell(r.bin, wb);
        num(format_fixed(r.woe, 3), 9);
        num(std::to_string(r.good_count), 9);
        num(std::to_string(r.bad_count), 7);
        num(format_fixed(100.0 * r.share_good, 2), 9);
        num(format_fixed(100.0 * r.share_bad, 2), 9);
        out << (r.smoothed ? "  *" : "") << '\n';
    }
    out << "\n* counts smoothed by +0.5 per cell (feature has an empty class cell)\n";
}

} // namespace credit
