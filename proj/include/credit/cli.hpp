#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "evaluate.hpp"
#include "persist.hpp"
#include "pipeline.hpp"
#include "rank.hpp"
#include "scorecard.hpp"
#include "synth.hpp"

namespace credit::cli {

inline constexpr std::string_view tool_version = "credit-toolkit 1.0.0";

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_model = 4;

/// Every flag any command accepts. Strings are parsed after CLI11 so the
/// library's own errors carry the diagnostics.
struct Options {
    std::string data;
    std::string schema;
    std::string out;
    std::string model;
    std::uint64_t seed = 1;
    std::string classifier = "naive_bayes";
    std::string metric = "chi2";
    std::string features = "all";
    std::size_t folds = 10;
    std::string threshold = "half";
    std::string ratios = "1,2,5,10,20,50";
    std::string group = "combined";
    std::size_t threads = 1;
    std::size_t trees = 100;
    std::size_t n_good = 7401;
    std::size_t n_bad = 121;
    double form_signal = 1.0;
    double bank_signal = 1.0;
    double correlation = 0.0;
};

/// Artifacts are staged in memory and written together with the manifest once
/// the command has succeeded.
class RunOutput {
public:
    RunOutput(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {}

    void flag(std::string name, std::string value) { flags_[std::move(name)] = std::move(value); }
    void input(const std::string& path, const std::string& bytes) { inputs_.emplace_back(path, fnv1a_hex(bytes)); }
    void artifact(std::string name, std::string bytes) { artifacts_.emplace_back(std::move(name), std::move(bytes)); }

    std::string manifest() const {
        std::ostringstream m;
        m << "# run manifest\n";
        m << "command," << command_ << '\n';
        m << "tool," << tool_version << '\n';
        m << "pipeline_format," << pipeline_format_version << '\n';
        for (const auto& [k, v] : flags_)
            m << "flag," << k << ',' << v << '\n';
        for (const auto& [path, hash] : inputs_)
            m << "input," << path << ',' << hash << '\n';
        for (const auto& [name, bytes] : artifacts_)
            m << "artifact," << name << ',' << fnv1a_hex(bytes) << '\n';
        return m.str();
    }

    void commit(std::ostream& log) const {
        if (opt_.out.empty())
            throw UsageError("--out is required");
        const std::filesystem::path dir(opt_.out);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
        auto write = [&](const std::string& name, const std::string& bytes) {
            std::ofstream f(dir / name, std::ios::binary);
            f << bytes;
            if (!f)
                throw UsageError("cannot write " + (dir / name).string());
            log << "wrote " << (dir / name).string() << '\n';
        };
        for (const auto& [name, bytes] : artifacts_)
            write(name, bytes);
        write("manifest.txt", manifest());
    }

private:
    std::string command_;
    const Options& opt_;
    std::map<std::string, std::string> flags_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::pair<std::string, std::string>> artifacts_;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string schema_path(const Options& opt) {
    if (!opt.schema.empty())
        return opt.schema;
    return (std::filesystem::path(opt.data).parent_path() / "schema.csv").string();
}

inline Dataset load_dataset(const Options& opt, RunOutput& run) {
    if (opt.data.empty())
        throw UsageError("--data is required");
    const auto sp = schema_path(opt);
    const auto schema_bytes = read_file(sp);
    std::istringstream schema_in(schema_bytes);
    const auto schema = parse_schema(schema_in);
    const auto data_bytes = read_file(opt.data);
    std::istringstream data_in(data_bytes);
    auto d = read_csv_strict(data_in, schema);
    run.input(opt.data, data_bytes);
    run.input(sp, schema_bytes);
    return d;
}

inline GroupSelection parse_group(const std::string& s) {
    if (s == "form")
        return GroupSelection::form;
    if (s == "bank")
        return GroupSelection::bank;
    if (s == "combined")
        return GroupSelection::combined;
    throw UsageError("--group must be form, bank or combined");
}

inline RankMetric parse_metric(const std::string& s) {
    if (s == "chi2")
        return RankMetric::chi2;
    if (s == "infogain")
        return RankMetric::infogain;
    throw UsageError("--metric must be chi2 or infogain");
}

inline std::optional<std::size_t> parse_feature_count(const std::string& s) {
    if (s == "all")
        return std::nullopt;
    auto n = parse_int<std::size_t>(s);
    if (!n || *n == 0)
        throw UsageError("--features must be a positive integer, 'all' or 'sweep'");
    return *n;
}

inline std::vector<double> parse_ratios(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) {
        auto v = parse_double(trim(part));
        if (!v || !std::isfinite(*v))
            throw UsageError("--ratios: bad number '" + part + "'");
        out.push_back(*v);
    }
    return out;
}

inline ClassifierSpec classifier_spec(const std::string& name, const Options& opt) {
    ClassifierSpec spec;
    spec.kind = parse_classifier_kind(name);
    spec.trees = opt.trees;
    spec.threads = opt.threads;
    spec.validate();
    return spec;
}

inline PipelineSpec pipeline_spec(const Options& opt) {
    PipelineSpec spec;
    spec.metric = parse_metric(opt.metric);
    spec.n_features = parse_feature_count(opt.features);
    spec.classifier = classifier_spec(opt.classifier, opt);
    spec.threshold = parse_threshold_spec(opt.threshold);
    return spec;
}

/// Projects `d` onto the pipeline's features by name.
inline Dataset align_to(const Dataset& d, const Schema& target) {
    if (d.schema == target)
        return d;
    std::vector<std::size_t> cols;
    for (const auto& f : target.features) {
        const auto j = d.schema.index_of(f.name);
        if (!j)
            throw DataError("data lacks model feature '" + f.name + "'");
        cols.push_back(*j);
    }
    auto projected = project(d, cols);
    if (!(projected.schema == target))
        throw DataError("data schema is incompatible with the model schema");
    return projected;
}

inline std::string to_text(auto&& writer) {
    std::ostringstream s;
    writer(s);
    return s.str();
}

// ---------------------------------------------------------------------------
// Commands

inline void cmd_synth(const Options& opt, RunOutput& run) {
    auto spec = default_synth_spec(opt.seed);
    spec.n_good = opt.n_good;
    spec.n_bad = opt.n_bad;
    spec.form_signal = opt.form_signal;
    spec.bank_signal = opt.bank_signal;
    spec.correlation = opt.correlation;
    const auto d = generate(spec);
    run.flag("seed", std::to_string(opt.seed));
    run.flag("n_good", std::to_string(opt.n_good));
    run.flag("n_bad", std::to_string(opt.n_bad));
    run.flag("form_signal", format_double(opt.form_signal));
    run.flag("bank_signal", format_double(opt.bank_signal));
    run.flag("correlation", format_double(opt.correlation));
    run.artifact("data.csv", to_text([&](std::ostream& o) { write_csv(o, d); }));
    run.artifact("schema.csv", to_text([&](std::ostream& o) { write_schema(o, d.schema); }));
}

inline void cmd_rank(const Options& opt, RunOutput& run) {
    const auto d = project_group(load_dataset(opt, run), parse_group(opt.group));
    const auto metric = parse_metric(opt.metric);
    run.flag("metric", opt.metric);
    run.flag("group", opt.group);
    const auto prep = prepare_training(d, metric);
    run.artifact("ranking.csv", to_text([&](std::ostream& o) { write_ranking_csv(o, prep.ranking, d.schema); }));
}

inline void cmd_train(const Options& opt, RunOutput& run) {
    const auto d = project_group(load_dataset(opt, run), parse_group(opt.group));
    const auto spec = pipeline_spec(opt);
    for (auto [k, v] : {std::pair{"classifier", opt.classifier}, {"metric", opt.metric}, {"features", opt.features},
                        {"threshold", opt.threshold}, {"group", opt.group}, {"trees", std::to_string(opt.trees)}})
        run.flag(k, v);
    run.flag("seed", std::to_string(opt.seed));
    const auto p = fit_pipeline(d, spec, opt.seed);
    run.artifact("pipeline.txt", serialize_pipeline(p));
}

inline void cmd_sweep_features(const Options& opt, RunOutput& run) {
    const auto d = project_group(load_dataset(opt, run), parse_group(opt.group));
    std::vector<ClassifierSpec> classifiers;
    for (const auto& name : split(opt.classifier, ','))
        classifiers.push_back(classifier_spec(std::string(trim(name)), opt));
    for (auto [k, v] : {std::pair{"classifier", opt.classifier}, {"metric", opt.metric}, {"group", opt.group},
                        {"folds", std::to_string(opt.folds)}, {"trees", std::to_string(opt.trees)}})
        run.flag(k, v);
    run.flag("seed", std::to_string(opt.seed));
    const auto sweep = feature_sweep(d, classifiers, parse_metric(opt.metric), opt.folds, opt.seed, opt.threads);
    run.artifact("feature_sweep.csv", to_text([&](std::ostream& o) { write_feature_sweep_csv(o, sweep); }));
}

inline void cmd_evaluate(const Options& opt, RunOutput& run) {
    if (opt.features == "sweep") {
        cmd_sweep_features(opt, run);
        return;
    }
    const auto d = project_group(load_dataset(opt, run), parse_group(opt.group));
    const auto spec = pipeline_spec(opt);
    for (auto [k, v] : {std::pair{"classifier", opt.classifier}, {"metric", opt.metric}, {"features", opt.features},
                        {"threshold", opt.threshold}, {"group", opt.group}, {"folds", std::to_string(opt.folds)},
                        {"trees", std::to_string(opt.trees)}})
        run.flag(k, v);
    run.flag("seed", std::to_string(opt.seed));
    const auto cv = cross_validate(d, spec, opt.folds, opt.seed, opt.threads);
    run.artifact("metrics.csv", to_text([&](std::ostream& o) { write_metrics_csv(o, cv); }));
    run.artifact("roc.csv", to_text([&](std::ostream& o) { write_roc_csv(o, cv.pooled_curve); }));
}

inline FittedPipeline load_model(const Options& opt, RunOutput& run) {
    if (opt.model.empty())
        throw UsageError("--model is required");
    const auto bytes = read_file(opt.model);
    run.input(opt.model, bytes);
    return deserialize_pipeline(bytes);
}

inline void cmd_sweep_costs(const Options& opt, RunOutput& run) {
    const auto p = load_model(opt, run);
    const auto d = align_to(load_dataset(opt, run), p.schema);
    run.flag("ratios", opt.ratios);
    const auto rows = cost_sweep(p, d, parse_ratios(opt.ratios));
    run.artifact("cost_sweep.csv", to_text([&](std::ostream& o) { write_cost_sweep_csv(o, rows); }));
}

inline void cmd_score(const Options& opt, RunOutput& run) {
    const auto p = load_model(opt, run);
    const auto d = align_to(load_dataset(opt, run), p.schema);
    const auto scored = score_dataset(p, d);
    run.artifact("scores.csv", to_text([&](std::ostream& o) {
                     o << "row,score,predicted,actual\n";
                     for (std::size_t i = 0; i < scored.size(); ++i)
                         o << i << ',' << format_double(scored[i].score) << ','
                           << csv_escape(d.schema.label_name(classify(scored[i].score, p.threshold))) << ','
                           << csv_escape(d.schema.label_name(scored[i].label)) << '\n';
                 }));
}

/// WOE over the whole dataset. With --model the pipeline's cut points and
/// selected features are used; otherwise cuts are fitted here and --features
/// keeps the top-ranked features.
inline void cmd_woe_report(const Options& opt, RunOutput& run) {
    Dataset raw;
    CutPointModel cuts;
    std::vector<std::size_t> features;
    std::string note;
    if (!opt.model.empty()) {
        const auto p = load_model(opt, run);
        raw = align_to(load_dataset(opt, run), p.schema);
        cuts = p.cuts;
        features = p.selected;
        note = "cut points and features from the supplied model; counts from the full dataset";
    } else {
        raw = project_group(load_dataset(opt, run), parse_group(opt.group));
        const auto prep = prepare_training(raw, parse_metric(opt.metric));
        cuts = prep.cuts;
        features = select_top(prep.ranking, parse_feature_count(opt.features).value_or(raw.schema.size()));
        note = "cut points, ranking and counts all computed on the full dataset (not training folds)";
        run.flag("group", opt.group);
        run.flag("metric", opt.metric);
        run.flag("features", opt.features);
    }
    const auto rows = woe_table(apply_discretization(raw, cuts), features);
    run.artifact("woe.csv", to_text([&](std::ostream& o) { write_woe_csv(o, rows); }));
    run.artifact("woe_report.txt", to_text([&](std::ostream& o) { write_woe_report(o, rows, note); }));
}

} // namespace detail

/// Runs one command; `args` excludes the program name. Returns the exit status.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Credit scoring toolkit", "credit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version));
    Options opt;

    auto data_flags = [&](CLI::App* c) {
        c->add_option("--data", opt.data, "dataset CSV");
        c->add_option("--schema", opt.schema, "schema sidecar (default: schema.csv next to --data)");
        c->add_option("--group", opt.group, "feature group: form, bank or combined");
    };
    auto model_flags = [&](CLI::App* c) {
        c->add_option("--classifier", opt.classifier,
                      "naive_bayes, logistic, svm_linear, nn1, tree, forest (comma list for sweeps)");
        c->add_option("--metric", opt.metric, "ranking metric: chi2 or infogain");
        c->add_option("--trees", opt.trees, "forest size");
        c->add_option("--seed", opt.seed, "master seed");
    };
    auto out_flag = [&](CLI::App* c) { c->add_option("--out", opt.out, "output directory")->required(); };

    std::map<std::string, std::function<void(const Options&, RunOutput&)>> handlers;
    auto add = [&](const std::string& name, const std::string& help, auto handler) {
        handlers[name] = handler;
        return app.add_subcommand(name, help);
    };

    auto* synth = add("synth", "generate a synthetic dataset and schema", detail::cmd_synth);
    synth->add_option("--seed", opt.seed);
    synth->add_option("--n-good", opt.n_good);
    synth->add_option("--n-bad", opt.n_bad);
    synth->add_option("--form-signal", opt.form_signal);
    synth->add_option("--bank-signal", opt.bank_signal);
    synth->add_option("--correlation", opt.correlation);
    out_flag(synth);

    auto* rank = add("rank", "discretize and rank features", detail::cmd_rank);
    data_flags(rank);
    rank->add_option("--metric", opt.metric);
    out_flag(rank);

    auto* train = add("train", "fit and save a pipeline", detail::cmd_train);
    data_flags(train);
    model_flags(train);
    train->add_option("--features", opt.features, "number of top-ranked features, or all");
    train->add_option("--threshold", opt.threshold, "half, f1 or cost:X");
    train->add_option("--threads", opt.threads);
    out_flag(train);

    auto* evaluate = add("evaluate", "stratified cross-validation", detail::cmd_evaluate);
    data_flags(evaluate);
    model_flags(evaluate);
    evaluate->add_option("--features", opt.features, "number of features, all, or sweep");
    evaluate->add_option("--folds", opt.folds);
    evaluate->add_option("--threshold", opt.threshold);
    evaluate->add_option("--threads", opt.threads);
    out_flag(evaluate);

    auto* sweep_f = add("sweep-features", "cross-validated AUC for every feature count", detail::cmd_sweep_features);
    data_flags(sweep_f);
    model_flags(sweep_f);
    sweep_f->add_option("--folds", opt.folds);
    sweep_f->add_option("--threads", opt.threads);
    out_flag(sweep_f);

    auto* sweep_c = add("sweep-costs", "confusion counts across cost ratios", detail::cmd_sweep_costs);
    sweep_c->add_option("--model", opt.model)->required();
    data_flags(sweep_c);
    sweep_c->add_option("--ratios", opt.ratios, "ascending cost ratios");
    out_flag(sweep_c);

    auto* score_c = add("score", "score a dataset with a saved pipeline", detail::cmd_score);
    score_c->add_option("--model", opt.model)->required();
    data_flags(score_c);
    out_flag(score_c);

    auto* woe_c = add("woe-report", "weight of evidence table", detail::cmd_woe_report);
    data_flags(woe_c);
    woe_c->add_option("--model", opt.model);
    woe_c->add_option("--metric", opt.metric);
    woe_c->add_option("--features", opt.features);
    out_flag(woe_c);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
    }

    for (const auto* sub : app.get_subcommands()) {
        RunOutput run(sub->get_name(), opt);
        try {
            if (opt.threads == 0)
                throw UsageError("--threads must be at least 1");
            handlers.at(sub->get_name())(opt, run);
            run.commit(out);
        } catch (const UsageError& e) {
            err << "usage error: " << e.what() << '\n';
            return exit_usage;
        } catch (const DataError& e) {
            err << "data error: " << e.what() << '\n';
            return exit_data;
        } catch (const ModelError& e) {
            err << "model error: " << e.what() << '\n';
            return exit_model;
        }
    }
    return exit_ok;
}

} // namespace credit::cli
