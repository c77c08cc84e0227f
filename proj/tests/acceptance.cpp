// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "fixtures.hpp"
#include "oracles.hpp"

#include <credit/cli.hpp>

#include <bit>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

using namespace credit;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Verdict()>& body, double budget_seconds = 0.0) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_seconds > 0.0 && seconds > budget_seconds) {
        v.pass = false;
        v.detail += " (took " + format_fixed(seconds, 1) + " s, budget " + format_fixed(budget_seconds, 0) + " s)";
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << id << "  " << name << "  [" << format_fixed(seconds, 2)
              << " s]";
    if (!v.detail.empty())
        std::cout << "  " << v.detail;
    std::cout << std::endl;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

int cli_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0)
        std::cerr << err.str();
    return code;
}

bool bitwise_equal(const Instance& a, const Instance& b) {
    if (a.label != b.label || a.values.size() != b.values.size())
        return false;
    for (std::size_t j = 0; j < a.values.size(); ++j) {
        if (a.values[j].index() != b.values[j].index())
            return false;
        if (const auto* x = std::get_if<double>(&a.values[j])) {
            if (std::bit_cast<std::uint64_t>(*x) != std::bit_cast<std::uint64_t>(std::get<double>(b.values[j])))
                return false;
        } else if (!(a.values[j] == b.values[j])) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

Verdict auc_duality() {
    Verdict v;
    Rng rng(20240101);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(999);
        const double levels = static_cast<double>(1 + rng.index(100));
        std::vector<ScoredLabel> s;
        for (std::size_t i = 0; i < n; ++i)
            s.push_back({std::floor(rng.uniform() * levels) / levels, rng.uniform() < 0.25 ? Label::bad : Label::good});
        s[0].label = Label::good;
        s[1].label = Label::bad;
        worst = std::max(worst, std::abs(auc(s) - oracle::mann_whitney(s)));
    }
    v.require(worst <= 1e-12, "max |AUC - Mann-Whitney| = " + format_double(worst));
    if (v.pass)
        v.detail = "200 sets, max difference " + format_double(worst);
    return v;
}

Verdict mdlp_oracle() {
    Verdict v;
    const std::vector<Label> bbgg{Label::bad, Label::bad, Label::good, Label::good};
    const std::vector<Label> gbgb{Label::good, Label::bad, Label::good, Label::bad};
    v.require(fit_cut_points(std::vector<double>{1, 2, 3, 4}, bbgg) == std::vector<double>{2.5}, "separable example");
    v.require(fit_cut_points(std::vector<double>{1, 2, 3, 4}, gbgb).empty(), "alternating example");
    Rng rng(77);
    int with_cuts = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.index(30);
        const double levels = static_cast<double>(2 + rng.index(20));
        const double bias = rng.uniform();
        std::vector<double> values;
        std::vector<Label> labels;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::floor(rng.uniform() * levels);
            values.push_back(x);
            labels.push_back(rng.uniform() < bias * x / levels + (1 - bias) * 0.5 ? Label::good : Label::bad);
        }
        const auto got = fit_cut_points(values, labels);
        with_cuts += !got.empty();
        v.require(got == oracle::mdlp_cuts(values, labels), "mismatch on trial " + std::to_string(trial));
    }
    if (v.pass)
        v.detail = "500 datasets agree (" + std::to_string(with_cuts) + " with at least one cut)";
    return v;
}

Verdict table_recomputation() {
    Verdict v;
    const ConfusionMatrix m{7059, 71, 50, 342};
    v.require(m.goods() == 7401 && m.bads() == 121, "class totals");
    const auto s = metrics(m);
    v.require(std::abs(*s.tp_rate - 0.953) <= 1e-3, "tp_rate " + format_double(*s.tp_rate));
    v.require(std::abs(*s.tn_rate - 0.413) <= 1e-3, "tn_rate " + format_double(*s.tn_rate));
    if (v.pass)
        v.detail = "tp_rate " + format_fixed(*s.tp_rate, 4) + ", tn_rate " + format_fixed(*s.tn_rate, 4) +
                   "; accuracy from counts " + format_fixed(*s.accuracy, 4) + " vs printed 0.944 (printed value does "
                   "not follow from the counts)";
    return v;
}

Verdict cost_sweep_monotone() {
    Verdict v;
    const std::vector<double> ratios{1, 2, 5, 10, 20, 50};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto d = generate(default_synth_spec(seed));
        const auto folds = stratified_folds(d, 3, seed);
        const auto p = fit_pipeline(subset(d, folds.complement(0)), PipelineSpec{}, seed);
        for (const auto& test : {subset(d, folds.members(0)), d}) {
            const auto rows = cost_sweep(p, test, ratios);
            v.require(rows.size() == ratios.size(), "row count");
            for (std::size_t i = 1; i < rows.size(); ++i) {
                v.require(rows[i].bads_correct >= rows[i - 1].bads_correct,
                          "bads_correct decreased at seed " + std::to_string(seed));
                v.require(rows[i].goods_correct <= rows[i - 1].goods_correct,
                          "goods_correct increased at seed " + std::to_string(seed));
            }
        }
    }
    if (v.pass)
        v.detail = "10 seeds, held-out and full data";
    return v;
}

Verdict three_way() {
    Verdict v;
    int wins = 0;
    double sums[3] = {0, 0, 0};
    std::string losses;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto d = generate(default_synth_spec(seed));
        double a[3];
        int g = 0;
        for (auto group : {GroupSelection::form, GroupSelection::bank, GroupSelection::combined}) {
            a[g] = cross_validate(project_group(d, group), PipelineSpec{}, 10, seed).mean_auc;
            sums[g] += a[g];
            ++g;
        }
        if (a[2] > a[0] && a[2] > a[1])
            ++wins;
        else
            losses += " seed " + std::to_string(seed);
    }
    v.require(wins >= 9, std::to_string(wins) + "/10 wins; lost:" + losses);
    v.detail = std::to_string(wins) + "/10 seeds; mean AUC form " + format_fixed(sums[0] / 10, 4) + ", bank " +
               format_fixed(sums[1] / 10, 4) + ", combined " + format_fixed(sums[2] / 10, 4);
    return v;
}

Verdict logistic_gradient() {
    Verdict v;
    Rng rng(6);
    double worst = 0.0;
    for (int set = 0; set < 5; ++set) {
        const Eigen::Index n = 40 + static_cast<Eigen::Index>(rng.index(100));
        const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.index(6));
        Eigen::MatrixXd X(n, p);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            X(i, 0) = 1.0;
            for (Eigen::Index j = 1; j < p; ++j)
                X(i, j) = rng.uniform() < 0.5 ? rng.normal() : static_cast<double>(rng.index(2));
            y[i] = rng.uniform() < 0.3 ? 1.0 : 0.0;
        }
        auto f = [&](const Eigen::VectorXd& b) { return logistic::log_likelihood(X, y, b, 1e-8); };
        for (int point = 0; point < 10; ++point) {
            Eigen::VectorXd beta(p);
            for (Eigen::Index j = 0; j < p; ++j)
                beta[j] = rng.normal();
            const auto a = logistic::gradient(X, y, beta, 1e-8);
            const auto num = oracle::numeric_gradient(f, beta);
            worst = std::max(worst, (a - num).norm() / std::max(1e-12, num.norm()));
        }
    }
    v.require(worst <= 1e-4, "relative error " + format_double(worst));
    v.detail = "50 points, max relative error " + format_double(worst);
    return v;
}

Verdict nb_normalization() {
    Verdict v;
    NaiveBayesModel hand;
    hand.prior = {0.4, 0.6};
    hand.conditional = {{{0.4, 0.75}, {0.6, 0.25}}};
    const double p = hand.score({{Category{0}}, Label::good});
    v.require(std::abs(p - 0.7377) < 5e-5, "hand posterior " + format_double(p));

    const auto raw = fixture::random_mixed(2000, 4, 4, 3, 0.3, 0.05);
    const auto d = apply_discretization(raw, fit_discretizer(raw));
    const auto m = fit_naive_bayes(d, {});
    Rng rng(12);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        Instance inst;
        for (const auto& f : d.schema.features) {
            if (rng.uniform() < 0.1)
                inst.values.emplace_back(Missing{});
            else
                inst.values.emplace_back(Category{static_cast<std::uint32_t>(rng.index(f.categories.size()))});
        }
        const auto post = m.posterior(inst);
        worst = std::max(worst, std::abs(post[0] + post[1] - 1.0));
    }
    v.require(worst <= 1e-12, "posterior sum off by " + format_double(worst));
    if (v.pass)
        v.detail = "hand posterior " + format_fixed(p, 4) + "; 10000 instances, max |sum - 1| " + format_double(worst);
    return v;
}

Verdict leakage(const fs::path& work) {
    Verdict v;
    const auto d = generate(default_synth_spec(5));
    const auto folds = stratified_folds(d, 10, 5);
    auto poison = [&](std::size_t fold) {
        auto p = d;
        Rng rng(fold + 100);
        for (auto i : folds.members(fold)) {
            auto& inst = p.instances[i];
            inst.label = rng.uniform() < 0.5 ? Label::good : Label::bad;
            for (auto& value : inst.values)
                if (auto* x = std::get_if<double>(&value))
                    *x = std::round(rng.normal() * 1e6);
        }
        return p;
    };

    // in memory: every fold, both cutoff modes
    PipelineSpec half, f1;
    f1.threshold.mode = ThresholdMode::f1_optimized;
    f1.n_features = 16;
    for (std::size_t f = 0; f < 10; ++f) {
        const auto poisoned = poison(f);
        for (const auto& spec : {half, f1}) {
            const auto clean = serialize_pipeline(fit_pipeline(subset(d, folds.complement(f)), spec, 9));
            const auto dirty = serialize_pipeline(fit_pipeline(subset(poisoned, folds.complement(f)), spec, 9));
            v.require(clean == dirty, "in-memory pipeline differs for fold " + std::to_string(f));
        }
    }

    // on disk: training file next to a test file that is then poisoned
    fs::create_directories(work / "leak");
    std::ostringstream schema;
    write_schema(schema, d.schema);
    spit(work / "leak/schema.csv", schema.str());
    auto write_split = [&](const Dataset& source) {
        std::ostringstream tr, te;
        write_csv(tr, subset(source, folds.complement(0)));
        write_csv(te, subset(source, folds.members(0)));
        spit(work / "leak/train.csv", tr.str());
        spit(work / "leak/test.csv", te.str());
    };
    auto train_cli = [&](const std::string& out) {
        return cli_run({"train", "--data", (work / "leak/train.csv").string(), "--threshold", "f1", "--features", "16",
                        "--out", (work / out).string()});
    };
    write_split(d);
    v.require(train_cli("leak_clean") == 0, "train failed");
    write_split(poison(0));
    v.require(train_cli("leak_dirty") == 0, "train failed");
    v.require(slurp(work / "leak_clean/pipeline.txt") == slurp(work / "leak_dirty/pipeline.txt"),
              "persisted pipeline changed after poisoning the test file");
    v.require(slurp(work / "leak/test.csv") != [&] {
        std::ostringstream te;
        write_csv(te, subset(d, folds.members(0)));
        return te.str();
    }(), "poisoning did not change the test file");
    if (v.pass)
        v.detail = "10 folds x 2 cutoff modes in memory, plus persisted files via the CLI";
    return v;
}

Verdict rank_hand_values() {
    Verdict v;
    const ContingencyTable t{{10, 30}, {40, 20}};
    const double chi = chi_squared(t), ig = info_gain(t);
    v.require(std::abs(chi - 16.667) <= 1e-3, "chi2 " + format_double(chi));
    v.require(std::abs(ig - 0.1245) <= 1e-3, "info gain " + format_double(ig));
    v.detail = "chi2 " + format_fixed(chi, 4) + ", info gain " + format_fixed(ig, 4) + " bits";
    return v;
}

Verdict smote_contract() {
    Verdict v;
    const auto d = generate(default_synth_spec(1));
    const std::size_t k = 5;
    const auto out = smote(d, {100, k}, 3);
    v.require(class_counts(out)[1] == 242, "minority count " + std::to_string(class_counts(out)[1]));
    v.require(class_counts(out)[0] == 7401, "majority changed");
    for (std::size_t i = 0; i < d.size(); ++i)
        v.require(bitwise_equal(out.instances[i], d.instances[i]), "original " + std::to_string(i) + " changed");

    // independent neighbour search: min-max scaled numerics over the whole dataset
    const auto width = d.schema.size();
    std::vector<double> lo(width, INFINITY), hi(width, -INFINITY);
    for (const auto& inst : d.instances)
        for (std::size_t j = 0; j < width; ++j)
            if (const auto* x = std::get_if<double>(&inst.values[j])) {
                lo[j] = std::min(lo[j], *x);
                hi[j] = std::max(hi[j], *x);
            }
    auto dist = [&](const Instance& a, const Instance& b) {
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j)
            if (d.schema.features[j].kind == FeatureKind::numeric) {
                const double z = (std::get<double>(a.values[j]) - std::get<double>(b.values[j])) / (hi[j] - lo[j]);
                s += z * z;
            }
        return s;
    };
    std::vector<std::size_t> bads;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d.instances[i].label == Label::bad)
            bads.push_back(i);
    for (std::size_t s = 0; s < bads.size(); ++s) {
        const auto& base = d.instances[bads[s]];
        const auto& syn = out.instances[d.size() + s];
        std::vector<double> ds;
        for (auto o : bads)
            if (o != bads[s])
                ds.push_back(dist(base, d.instances[o]));
        std::nth_element(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(k - 1), ds.end());
        const double kth = ds[k - 1];
        bool found = false;
        for (auto o : bads) {
            if (o == bads[s] || dist(base, d.instances[o]) > kth)
                continue;
            bool inside = true;
            for (std::size_t j = 0; j < width; ++j) {
                if (d.schema.features[j].kind == FeatureKind::numeric) {
                    const double x = std::get<double>(base.values[j]), y = std::get<double>(d.instances[o].values[j]);
                    const double z = std::get<double>(syn.values[j]);
                    inside = inside && z >= std::min(x, y) && z <= std::max(x, y);
                } else {
                    inside = inside && syn.values[j] == base.values[j];
                }
            }
            found = found || inside;
        }
        v.require(found, "synthetic " + std::to_string(s) + " is outside every parental interval");
    }
    if (v.pass)
        v.detail = "121 -> 242 bads, every synthetic within its parents' intervals, originals bit-identical";
    return v;
}

Verdict determinism(const fs::path& work) {
    Verdict v;
    const auto data_dir = work / "det_data";
    v.require(cli_run({"synth", "--seed", "11", "--out", data_dir.string()}) == 0, "synth failed");
    const auto data = (data_dir / "data.csv").string();
    v.require(cli_run({"train", "--data", data, "--features", "16", "--out", (work / "det_model").string()}) == 0,
              "train failed");
    const auto model = (work / "det_model/pipeline.txt").string();

    struct Cmd {
        std::vector<std::string> args;
        std::vector<std::string> files;
        bool threaded;
    };
    const std::vector<Cmd> commands{
        {{"evaluate", "--data", data, "--features", "16", "--folds", "10", "--seed", "1"},
         {"metrics.csv", "roc.csv", "manifest.txt"},
         true},
        {{"evaluate", "--data", data, "--classifier", "forest", "--trees", "20", "--folds", "5", "--seed", "2"},
         {"metrics.csv", "roc.csv", "manifest.txt"},
         true},
        {{"sweep-features", "--data", data, "--classifier", "naive_bayes,logistic", "--folds", "5", "--seed", "3"},
         {"feature_sweep.csv", "manifest.txt"},
         true},
        {{"sweep-costs", "--model", model, "--data", data}, {"cost_sweep.csv", "manifest.txt"}, false},
    };
    int run_id = 0;
    std::size_t compared = 0;
    for (const auto& c : commands) {
        std::vector<fs::path> outs;
        for (const char* threads : {"1", "1", "4", "4"}) {
            outs.push_back(work / ("det_run" + std::to_string(run_id++)));
            auto args = c.args;
            if (c.threaded) {
                args.push_back("--threads");
                args.push_back(threads);
            }
            args.push_back("--out");
            args.push_back(outs.back().string());
            v.require(cli_run(args) == 0, c.args[0] + " failed");
        }
        for (const auto& f : c.files) {
            const auto first = slurp(outs[0] / f);
            v.require(!first.empty(), f + " is empty");
            for (std::size_t i = 1; i < outs.size(); ++i) {
                v.require(slurp(outs[i] / f) == first, c.args[0] + ": " + f + " differs between runs");
                ++compared;
            }
        }
    }
    if (v.pass)
        v.detail = std::to_string(compared) + " file comparisons identical (1 and 4 threads, repeated)";
    return v;
}

} // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / ("credit_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);

    criterion(1, "AUC equals Mann-Whitney pair counting", auc_duality, 10);
    criterion(2, "MDLP cut points match the exhaustive oracle", mdlp_oracle, 10);
    criterion(3, "Cost table x=1 rates recomputed from counts", table_recomputation);
    criterion(4, "Cost sweep monotone on trained naive Bayes", cost_sweep_monotone);
    criterion(5, "Combined features beat either group alone", three_way, 300);
    criterion(6, "Logistic gradient matches finite differences", logistic_gradient);
    criterion(7, "Naive Bayes posterior normalization and hand value", nb_normalization);
    criterion(8, "Pipeline fitting ignores held-out data", [&] { return leakage(work); });
    criterion(9, "Chi-squared and information gain hand values", rank_hand_values);
    criterion(10, "SMOTE contract", smote_contract);
    criterion(11, "Byte-identical outputs across runs and threads", [&] { return determinism(work); });

    fs::remove_all(work);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
