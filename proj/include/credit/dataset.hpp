#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace credit {

enum class Label : std::uint8_t { bad = 0, good = 1 };

inline constexpr std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }

enum class FeatureKind { numeric, nominal };
enum class FeatureGroup { form, bank };

inline std::string_view to_string(FeatureKind k) { return k == FeatureKind::numeric ? "numeric" : "nominal"; }
inline std::string_view to_string(FeatureGroup g) { return g == FeatureGroup::form ? "form" : "bank"; }

struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    FeatureGroup group = FeatureGroup::form;
    std::vector<std::string> categories; // nominal only

    std::optional<std::uint32_t> category_index(std::string_view value) const {
        for (std::size_t i = 0; i < categories.size(); ++i)
            if (categories[i] == value)
                return static_cast<std::uint32_t>(i);
        return std::nullopt;
    }

    bool operator==(const Feature&) const = default;
};

struct Schema {
    std::vector<Feature> features;
    std::string class_name = "class";
    std::string good_label = "good";
    std::string bad_label = "bad";

    std::size_t size() const { return features.size(); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i].name == name)
                return i;
        return std::nullopt;
    }

    const std::string& label_name(Label l) const { return l == Label::good ? good_label : bad_label; }

    void validate() const {
        std::unordered_set<std::string> names;
        for (const auto& f : features) {
            if (f.name.empty())
                throw DataError("schema: empty feature name");
            if (!names.insert(f.name).second)
                throw DataError("schema: duplicate feature name '" + f.name + "'");
            if (f.name == class_name)
                throw DataError("schema: feature name '" + f.name + "' collides with the class column");
            if (f.kind == FeatureKind::nominal) {
                if (f.categories.empty())
                    throw DataError("schema: nominal feature '" + f.name + "' has an empty domain");
                std::unordered_set<std::string> cats(f.categories.begin(), f.categories.end());
                if (cats.size() != f.categories.size())
                    throw DataError("schema: nominal feature '" + f.name + "' has duplicate categories");
            } else if (!f.categories.empty()) {
                throw DataError("schema: numeric feature '" + f.name + "' lists categories");
            }
        }
        if (good_label == bad_label)
            throw DataError("schema: good and bad labels must differ");
    }

    bool operator==(const Schema&) const = default;
};

struct Missing {
    bool operator==(const Missing&) const = default;
};

struct Category {
    std::uint32_t index = 0;
    bool operator==(const Category&) const = default;
};

/// A cell: missing, a numeric value, or a category index into the feature's domain.
using Value = std::variant<Missing, double, Category>;

inline bool is_missing(const Value& v) { return std::holds_alternative<Missing>(v); }

struct Instance {
    std::vector<Value> values;
    Label label = Label::good;
    bool operator==(const Instance&) const = default;
};

struct Dataset {
    Schema schema;
    std::vector<Instance> instances;

    std::size_t size() const { return instances.size(); }
    bool operator==(const Dataset&) const = default;
};

/// Checks an instance against a schema; returns a diagnostic or nothing.
inline std::optional<std::string> conformance_error(const Schema& schema, const Instance& inst) {
    if (inst.values.size() != schema.size())
        return "expected " + std::to_string(schema.size()) + " values, got " +
               std::to_string(inst.values.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
        const auto& f = schema.features[j];
        const auto& v = inst.values[j];
        if (is_missing(v))
            continue;
        if (f.kind == FeatureKind::numeric && !std::holds_alternative<double>(v))
            return "feature '" + f.name + "' expects a numeric value";
        if (f.kind == FeatureKind::nominal) {
            const auto* c = std::get_if<Category>(&v);
            if (!c || c->index >= f.categories.size())
                return "feature '" + f.name + "' expects a category of its domain";
        }
    }
    return std::nullopt;
}

inline std::array<std::size_t, 2> class_counts(const Dataset& d) {
    std::array<std::size_t, 2> counts{0, 0};
    for (const auto& inst : d.instances)
        ++counts[label_index(inst.label)];
    return {counts[label_index(Label::good)], counts[label_index(Label::bad)]};
}

// ---------------------------------------------------------------------------
// Schema sidecar: one line per feature `name,kind,group[,cat1|cat2|...]`
// and one `class,<name>,<good_label>,<bad_label>` line. '#' starts a comment.

inline Schema parse_schema(std::istream& in) {
    Schema schema;
    bool have_class = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#')
            continue;
        auto fields = split(body, ',');
        for (auto& f : fields)
            f = std::string(trim(f));
        const auto where = "schema line " + std::to_string(line_no) + ": ";
        if (fields[0] == "class") {
            if (fields.size() != 4)
                throw DataError(where + "expected class,<name>,<good_label>,<bad_label>");
            if (have_class)
                throw DataError(where + "duplicate class line");
            schema.class_name = fields[1];
            schema.good_label = fields[2];
            schema.bad_label = fields[3];
            have_class = true;
            continue;
        }
        if (fields.size() < 3 || fields.size() > 4)
            throw DataError(where + "expected name,kind,group[,categories]");
        Feature f;
        f.name = fields[0];
        if (fields[1] == "numeric")
            f.kind = FeatureKind::numeric;
        else if (fields[1] == "nominal")
            f.kind = FeatureKind::nominal;
        else
            throw DataError(where + "unknown kind '" + fields[1] + "'");
        if (fields[2] == "form")
            f.group = FeatureGroup::form;
        else if (fields[2] == "bank")
            f.group = FeatureGroup::bank;
        else
            throw DataError(where + "unknown group '" + fields[2] + "'");
        if (fields.size() == 4) {
            for (auto& c : split(fields[3], '|'))
                f.categories.emplace_back(trim(c));
        }
        if (f.kind == FeatureKind::nominal && f.categories.empty())
            throw DataError(where + "nominal feature '" + f.name + "' needs a category list");
        schema.features.push_back(std::move(f));
    }
    if (!have_class)
        throw DataError("schema: missing class line");
    schema.validate();
    return schema;
}

inline void write_schema(std::ostream& out, const Schema& schema) {
    for (const auto& f : schema.features) {
        out << f.name << ',' << to_string(f.kind) << ',' << to_string(f.group);
        if (f.kind == FeatureKind::nominal) {
            out << ',';
            for (std::size_t i = 0; i < f.categories.size(); ++i)
                out << (i ? "|" : "") << f.categories[i];
        }
        out << '\n';
    }
    out << "class," << schema.class_name << ',' << schema.good_label << ',' << schema.bad_label << '\n';
}

// ---------------------------------------------------------------------------
// RFC-4180 CSV

/// Reads one record; returns false at end of input. Quoted fields may span lines.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof())
        return false;
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty() && !was_quoted) {
            in_quotes = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n')
                in.get(c);
            break;
        } else {
            field += c;
        }
    }
    if (in_quotes)
        throw DataError("csv: unterminated quoted field");
    fields.push_back(std::move(field));
    return true;
}

inline std::string csv_escape(std::string_view s) {
    const bool needs = s.find_first_of(",\"\r\n") != std::string_view::npos ||
                       (!s.empty() && (s.front() == ' ' || s.back() == ' '));
    if (!needs)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvOptions {
    std::string missing_token = "?";
};

struct RowError {
    std::size_t row = 0; // 1-based data row
    std::string message;
};

struct ParseResult {
    Dataset dataset;
    std::vector<RowError> errors;
};

/// Parses a header-rowed CSV against a schema. Bad rows are reported, not dropped
/// silently: rows read == instances + errors.
inline ParseResult parse_csv(std::istream& in, const Schema& schema, const CsvOptions& opts = {}) {
    schema.validate();
    ParseResult result;
    result.dataset.schema = schema;

    std::vector<std::string> header;
    if (!read_csv_record(in, header))
        throw DataError("csv: missing header row");
    for (auto& h : header)
        h = std::string(trim(h));

    // column -> feature index, or npos for the class column
    constexpr auto class_col = static_cast<std::size_t>(-1);
    std::vector<std::size_t> column_feature(header.size());
    std::vector<bool> seen(schema.size(), false);
    bool seen_class = false;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == schema.class_name) {
            if (seen_class)
                throw DataError("csv: duplicate class column '" + header[c] + "'");
            seen_class = true;
            column_feature[c] = class_col;
            continue;
        }
        auto idx = schema.index_of(header[c]);
        if (!idx)
            throw DataError("csv: header column '" + header[c] + "' is not in the schema");
        if (seen[*idx])
            throw DataError("csv: duplicate column '" + header[c] + "'");
        seen[*idx] = true;
        column_feature[c] = *idx;
    }
    if (!seen_class)
        throw DataError("csv: class column '" + schema.class_name + "' missing from header");
    for (std::size_t j = 0; j < schema.size(); ++j)
        if (!seen[j])
            throw DataError("csv: feature '" + schema.features[j].name + "' missing from header");

    std::vector<std::string> fields;
    std::size_t row = 0;
    while (read_csv_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && trim(fields[0]).empty())
            continue; // blank line
        if (fields.size() != header.size()) {
            result.errors.push_back({row, "expected " + std::to_string(header.size()) + " fields, got " +
                                              std::to_string(fields.size())});
            continue;
        }
        Instance inst;
        inst.values.assign(schema.size(), Missing{});
        std::optional<std::string> err;
        for (std::size_t c = 0; c < fields.size() && !err; ++c) {
            const auto cell = trim(fields[c]);
            if (column_feature[c] == class_col) {
                if (cell == schema.good_label)
                    inst.label = Label::good;
                else if (cell == schema.bad_label)
                    inst.label = Label::bad;
                else
                    err = "unknown class label '" + std::string(cell) + "'";
                continue;
            }
            const auto& f = schema.features[column_feature[c]];
            if (cell.empty() || cell == opts.missing_token)
                continue;
            if (f.kind == FeatureKind::numeric) {
                auto v = parse_double(cell);
                if (!v || !std::isfinite(*v))
                    err = "feature '" + f.name + "': unparseable numeric '" + std::string(cell) + "'";
                else
                    inst.values[column_feature[c]] = *v;
            } else {
                auto idx = f.category_index(cell);
                if (!idx)
                    err = "feature '" + f.name + "': unknown category '" + std::string(cell) + "'";
                else
                    inst.values[column_feature[c]] = Category{*idx};
            }
        }
        if (err)
            result.errors.push_back({row, *err});
        else
            result.dataset.instances.push_back(std::move(inst));
    }
    return result;
}

/// Parses and throws a DataError listing every bad row if any were found.
inline Dataset read_csv_strict(std::istream& in, const Schema& schema, const CsvOptions& opts = {}) {
    auto result = parse_csv(in, schema, opts);
    if (!result.errors.empty()) {
        std::string msg = "csv: " + std::to_string(result.errors.size()) + " bad row(s)";
        const std::size_t shown = std::min<std::size_t>(result.errors.size(), 10);
        for (std::size_t i = 0; i < shown; ++i)
            msg += "\n  row " + std::to_string(result.errors[i].row) + ": " + result.errors[i].message;
        throw DataError(msg);
    }
    return std::move(result.dataset);
}

inline std::string render_value(const Feature& f, const Value& v, const CsvOptions& opts = {}) {
    if (is_missing(v))
        return opts.missing_token;
    if (const auto* d = std::get_if<double>(&v))
        return format_double(*d);
    return f.categories.at(std::get<Category>(v).index);
}

inline void write_csv(std::ostream& out, const Dataset& d, const CsvOptions& opts = {}) {
    for (const auto& f : d.schema.features)
        out << csv_escape(f.name) << ',';
    out << csv_escape(d.schema.class_name) << '\n';
    for (const auto& inst : d.instances) {
        for (std::size_t j = 0; j < d.schema.size(); ++j)
            out << csv_escape(render_value(d.schema.features[j], inst.values[j], opts)) << ',';
        out << csv_escape(d.schema.label_name(inst.label)) << '\n';
    }
}

inline std::string dataset_fingerprint(const Dataset& d) {
    std::ostringstream os;
    write_schema(os, d.schema);
    write_csv(os, d);
    return fnv1a_hex(os.str());
}

// ---------------------------------------------------------------------------
// Views

inline Dataset subset(const Dataset& d, const std::vector<std::size_t>& rows) {
    Dataset out{d.schema, {}};
    out.instances.reserve(rows.size());
    for (auto r : rows)
        out.instances.push_back(d.instances.at(r));
    return out;
}

/// Keeps only the listed feature columns, in the given order.
inline Dataset project(const Dataset& d, const std::vector<std::size_t>& features) {
    Dataset out;
    out.schema.class_name = d.schema.class_name;
    out.schema.good_label = d.schema.good_label;
    out.schema.bad_label = d.schema.bad_label;
    for (auto j : features)
        out.schema.features.push_back(d.schema.features.at(j));
    out.instances.reserve(d.size());
    for (const auto& inst : d.instances) {
        Instance p;
        p.label = inst.label;
        p.values.reserve(features.size());
        for (auto j : features)
            p.values.push_back(inst.values[j]);
        out.instances.push_back(std::move(p));
    }
    return out;
}

enum class GroupSelection { form, bank, combined };

inline std::vector<std::size_t> group_features(const Schema& s, GroupSelection g) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const auto grp = s.features[j].group;
        if (g == GroupSelection::combined || (g == GroupSelection::form && grp == FeatureGroup::form) ||
            (g == GroupSelection::bank && grp == FeatureGroup::bank))
            out.push_back(j);
    }
    return out;
}

inline Dataset project_group(const Dataset& d, GroupSelection g) {
    auto features = group_features(d.schema, g);
    if (features.empty())
        throw DataError("no features in the selected group");
    return project(d, features);
}

// ---------------------------------------------------------------------------
// Stratified folds

struct FoldAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> fold; // per instance, in [0, k)

    std::vector<std::size_t> members(std::size_t f) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fold.size(); ++i)
            if (fold[i] == f)
                out.push_back(i);
        return out;
    }
    std::vector<std::size_t> complement(std::size_t f) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fold.size(); ++i)
            if (fold[i] != f)
                out.push_back(i);
        return out;
    }
};

/// Shuffles each class with a seed-derived permutation and deals round-robin,
/// continuing the deal position across classes.
inline FoldAssignment stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
    if (k < 2)
        throw UsageError("stratified_folds: k must be at least 2");
    FoldAssignment out;
    out.k = k;
    out.fold.assign(d.size(), 0);
    std::size_t next = 0;
    for (Label cls : {Label::good, Label::bad}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d.instances[i].label == cls)
                members.push_back(i);
        if (members.size() < k)
            throw DataError("stratified_folds: class '" + d.schema.label_name(cls) + "' has " +
                            std::to_string(members.size()) + " instances, fewer than k=" + std::to_string(k));
        Rng rng(derive_seed(seed, "folds", label_index(cls)));
        rng.shuffle(members);
        for (auto i : members) {
            out.fold[i] = next;
            next = (next + 1) % k;
        }
    }
    return out;
}

} // namespace credit
