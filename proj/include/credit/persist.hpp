#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pipeline.hpp"
#include "serialize.hpp"

namespace credit {

// Pipeline file, one record per line:
//
//   credit-pipeline,<version>
//   section,schema      schema,<n> then n lines `s,<schema sidecar line>`
//   section,cuts        cuts,<feature index>[,cut...]   (numeric features only)
//   section,selection   metric,<chi2|infogain> / selected,<index>...
//   section,classifier  classifier,<kind> then kind-specific records
//   section,threshold   threshold,<value>,<provenance>
//   section,meta        seed,<u64> / fingerprint,<hex>
//   end
//   checksum,<fnv1a-64 hex of every preceding byte>

inline constexpr int pipeline_format_version = 1;
inline constexpr std::string_view pipeline_magic = "credit-pipeline";

inline std::string serialize_pipeline(const FittedPipeline& p) {
    RecordWriter w;
    w.line(pipeline_magic, {std::to_string(pipeline_format_version)});

    w.line("section", {"schema"});
    std::ostringstream schema_text;
    write_schema(schema_text, p.schema);
    const auto schema_lines = split(schema_text.str(), '\n');
    w.line("schema", {std::to_string(schema_lines.size() - 1)}); // trailing newline leaves one empty piece
    for (std::size_t i = 0; i + 1 < schema_lines.size(); ++i)
        w.line("s", {schema_lines[i]});

    w.line("section", {"cuts"});
    for (std::size_t j = 0; j < p.cuts.cuts.size(); ++j) {
        if (!p.cuts.cuts[j])
            continue;
        std::vector<std::string> fields{std::to_string(j)};
        for (double c : *p.cuts.cuts[j])
            fields.push_back(format_double(c));
        w.line("cuts", fields);
    }

    w.line("section", {"selection"});
    w.line("metric", {std::string(to_string(p.metric))});
    std::vector<std::string> sel;
    for (auto j : p.selected)
        sel.push_back(std::to_string(j));
    w.line("selected", sel);

    w.line("section", {"classifier"});
    write_model(w, p.model);

    w.line("section", {"threshold"});
    w.line("threshold", {format_double(p.threshold.value), std::string(to_string(p.threshold.provenance))});

    w.line("section", {"meta"});
    w.line("seed", {std::to_string(p.seed)});
    w.line("fingerprint", {p.fingerprint});
    w.line("end");

    std::string text = w.text();
    text += "checksum," + fnv1a_hex(text) + "\n";
    return text;
}

namespace detail {

inline void expect_section(RecordReader& r, std::string_view name) {
    const auto f = r.next("section");
    if (f.size() != 1 || f[0] != name)
        throw ModelError("pipeline file: expected section '" + std::string(name) + "'");
}

inline ThresholdProvenance parse_provenance(std::string_view s) {
    for (auto p : {ThresholdProvenance::default_half, ThresholdProvenance::f1_optimized, ThresholdProvenance::cost_ratio})
        if (to_string(p) == s)
            return p;
    throw ModelError("pipeline file: unknown threshold provenance '" + std::string(s) + "'");
}

} // namespace detail

inline FittedPipeline deserialize_pipeline(std::string_view text) {
    // Version first, so an old file reports a version mismatch rather than a checksum failure.
    const auto first_end = text.find('\n');
    const auto first = split(text.substr(0, first_end), ',');
    if (first.size() != 2 || first[0] != pipeline_magic)
        throw ModelError("not a pipeline file");
    if (first[1] != std::to_string(pipeline_format_version))
        throw ModelError("pipeline file version " + first[1] + " is not supported (expected " +
                         std::to_string(pipeline_format_version) + ")");

    const auto tail = text.rfind("checksum,");
    if (tail == std::string_view::npos || (tail > 0 && text[tail - 1] != '\n'))
        throw ModelError("pipeline file: missing checksum");
    const auto stored = trim(text.substr(tail + 9));
    const auto body = text.substr(0, tail);
    if (stored != fnv1a_hex(body))
        throw ModelError("pipeline file: checksum mismatch (file is corrupt or was edited)");

    RecordReader r(body);
    r.next(pipeline_magic);
    FittedPipeline p;

    detail::expect_section(r, "schema");
    const auto n_lines = r.count("schema");
    std::string schema_text;
    for (std::size_t i = 0; i < n_lines; ++i) {
        const auto f = r.next("s");
        for (std::size_t k = 0; k < f.size(); ++k)
            schema_text += (k ? "," : "") + f[k];
        schema_text += '\n';
    }
    try {
        std::istringstream in(schema_text);
        p.schema = parse_schema(in);
    } catch (const DataError& e) {
        throw ModelError(std::string("pipeline file: ") + e.what());
    }

    detail::expect_section(r, "cuts");
    p.cuts.cuts.resize(p.schema.size());
    while (r.peek_key() == "cuts") {
        const auto f = r.next("cuts");
        if (f.empty())
            throw ModelError("pipeline file: malformed cuts line");
        const auto j = RecordReader::to_size(f[0]);
        if (j >= p.schema.size() || p.schema.features[j].kind != FeatureKind::numeric || p.cuts.cuts[j])
            throw ModelError("pipeline file: cuts for invalid feature " + f[0]);
        std::vector<double> cuts;
        for (std::size_t k = 1; k < f.size(); ++k)
            cuts.push_back(RecordReader::to_double(f[k]));
        p.cuts.cuts[j] = std::move(cuts);
    }
    try {
        check_model_covers(p.schema, p.cuts);
    } catch (const Error& e) {
        throw ModelError(std::string("pipeline file: ") + e.what());
    }

    detail::expect_section(r, "selection");
    const auto metric = r.next("metric");
    if (metric.size() != 1 || (metric[0] != "chi2" && metric[0] != "infogain"))
        throw ModelError("pipeline file: bad metric line");
    p.metric = metric[0] == "chi2" ? RankMetric::chi2 : RankMetric::infogain;
    for (const auto& s : r.next("selected")) {
        const auto j = RecordReader::to_size(s);
        if (j >= p.schema.size() || (!p.selected.empty() && j <= p.selected.back()))
            throw ModelError("pipeline file: bad selected feature list");
        p.selected.push_back(j);
    }
    if (p.selected.empty())
        throw ModelError("pipeline file: no selected features");

    detail::expect_section(r, "classifier");
    p.model = read_model(r);

    detail::expect_section(r, "threshold");
    const auto t = r.next("threshold");
    if (t.size() != 2)
        throw ModelError("pipeline file: bad threshold line");
    p.threshold = {RecordReader::to_double(t[0]), detail::parse_provenance(t[1])};

    detail::expect_section(r, "meta");
    const auto seed = r.next("seed");
    const auto sv = seed.size() == 1 ? parse_int<std::uint64_t>(seed[0]) : std::nullopt;
    if (!sv)
        throw ModelError("pipeline file: bad seed line");
    p.seed = *sv;
    const auto fp = r.next("fingerprint");
    if (fp.size() != 1)
        throw ModelError("pipeline file: bad fingerprint line");
    p.fingerprint = fp[0];
    r.next("end");
    if (!r.at_end())
        throw ModelError("pipeline file: trailing records before checksum");
    return p;
}

inline void save_pipeline(const FittedPipeline& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + path.string());
    out << serialize_pipeline(p);
    if (!out)
        throw UsageError("write failed: " + path.string());
}

inline FittedPipeline load_pipeline(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_pipeline(buf.str());
}

} // namespace credit
