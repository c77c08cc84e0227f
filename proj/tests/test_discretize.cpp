#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <set>

using namespace credit;
constexpr Label G = Label::good;
constexpr Label B = Label::bad;

TEST(Entropy, HandValues) {
    EXPECT_DOUBLE_EQ(entropy({5, 0}), 0.0);
    EXPECT_DOUBLE_EQ(entropy({5, 5}), 1.0);
    EXPECT_NEAR(entropy({3, 1}), 0.8113, 1e-4);
    EXPECT_THROW(entropy({0, 0}), UsageError);
}

TEST(Mdlp, SeparableExampleCutsAtMidpoint) {
    EXPECT_EQ(fit_cut_points(std::vector<double>{1, 2, 3, 4}, std::vector<Label>{B, B, G, G}),
              (std::vector<double>{2.5}));
}

TEST(Mdlp, AlternatingExampleHasNoCut) {
    EXPECT_TRUE(fit_cut_points(std::vector<double>{1, 2, 3, 4}, std::vector<Label>{G, B, G, B}).empty());
    // Best split {1} | {2,3,4}: gain 0.311, against a bound of (log2 3 + delta) / 4.
    const double h = entropy({2, 2});
    const double gain = h - 0.75 * entropy({2, 1});
    EXPECT_NEAR(gain, 0.311, 1e-3);
    const double delta = std::log2(7.0) - (2 * h - 1 * 0.0 - 2 * entropy({2, 1}));
    EXPECT_LT(gain, (std::log2(3.0) + delta) / 4.0);
}

TEST(Mdlp, SingleClassOrSingleValue) {
    EXPECT_TRUE(fit_cut_points(std::vector<double>{1, 5, 9}, std::vector<Label>{G, G, G}).empty());
    EXPECT_TRUE(fit_cut_points(std::vector<double>{2, 2, 2, 2}, std::vector<Label>{G, B, G, B}).empty());
    EXPECT_TRUE(fit_cut_points(std::vector<double>{7}, std::vector<Label>{B}).empty());
}

TEST(Mdlp, MatchesExhaustiveOracle) {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.index(30);
        const double levels = static_cast<double>(2 + rng.index(20));
        const double bias = rng.uniform();
        std::vector<double> v;
        std::vector<Label> l;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::floor(rng.uniform() * levels);
            v.push_back(x);
            // labels lean with x so that some cuts are accepted
            l.push_back(rng.uniform() < bias * x / levels + (1 - bias) * 0.5 ? G : B);
        }
        ASSERT_EQ(fit_cut_points(v, l), oracle::mdlp_cuts(v, l)) << "trial " << trial;
    }
}

TEST(Mdlp, CutsAreSortedBoundaryPoints) {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v;
        std::vector<Label> l;
        for (int i = 0; i < 200; ++i) {
            const double x = std::round(rng.normal() * 10.0);
            v.push_back(x);
            l.push_back(rng.uniform() < 1.0 / (1.0 + std::exp(-x / 5.0)) ? G : B);
        }
        const auto cuts = fit_cut_points(v, l);
        for (std::size_t i = 1; i < cuts.size(); ++i)
            ASSERT_LT(cuts[i - 1], cuts[i]);
        for (double c : cuts) {
            double below = -INFINITY, above = INFINITY;
            for (double x : v) {
                if (x < c)
                    below = std::max(below, x);
                if (x > c)
                    above = std::min(above, x);
            }
            ASSERT_EQ(c, (below + above) / 2.0);
            std::set<Label> labels;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v[i] == below || v[i] == above)
                    labels.insert(l[i]);
            EXPECT_EQ(labels.size(), 2u) << "cut " << c << " is not a boundary point";
        }
    }
}

TEST(Bins, LabelsAndMembership) {
    const std::vector<double> one{2.5}, two{10, 20};
    EXPECT_EQ(bin_label(one, bin_index(one, 2.5)), "(-inf,2.5]");
    EXPECT_EQ(bin_label(one, bin_index(one, 2.6)), "(2.5,+inf)");
    EXPECT_EQ(bin_label({}, bin_index({}, 123.0)), "all");
    EXPECT_EQ(bin_label(two, bin_index(two, 15)), "(10,20]");
    EXPECT_EQ(bin_index(two, 10), 0u);
    EXPECT_EQ(bin_index(two, 20), 1u);
    EXPECT_EQ(bin_index(two, 20.000001), 2u);
}

TEST(Discretizer, AppliesToMixedDataset) {
    auto d = fixture::random_mixed(400, 2, 1, 5, 0.4, 0.05);
    const auto m = fit_discretizer(d);
    ASSERT_TRUE(m.cuts[0] && m.cuts[1]);
    EXPECT_FALSE(m.cuts[2]);
    const auto out = apply_discretization(d, m);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_EQ(out.schema.features[j].kind, FeatureKind::nominal);
        EXPECT_EQ(out.schema.features[j].categories.size(), m.cuts[j]->size() + 1);
    }
    EXPECT_EQ(out.schema.features[2], d.schema.features[2]);
    for (std::size_t i = 0; i < d.size(); ++i) {
        // in-range bins, missing preserved
        EXPECT_FALSE(conformance_error(out.schema, out.instances[i]));
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_EQ(is_missing(out.instances[i].values[j]), is_missing(d.instances[i].values[j]));
    }
}

TEST(Discretizer, AllMissingFeatureGetsSingleBin) {
    Dataset d{fixture::schema({fixture::numeric("x")}), {}};
    d.instances = {{{Missing{}}, G}, {{Missing{}}, B}};
    const auto m = fit_discretizer(d);
    ASSERT_TRUE(m.cuts[0]);
    EXPECT_TRUE(m.cuts[0]->empty());
    EXPECT_EQ(discretized_schema(d.schema, m).features[0].categories, (std::vector<std::string>{"all"}));
}

TEST(Discretizer, ModelSchemaMismatch) {
    const auto d = fixture::random_mixed(50, 2, 1, 5);
    auto m = fit_discretizer(d);
    m.cuts.pop_back();
    EXPECT_THROW(apply_discretization(d, m), ModelError);
    m = fit_discretizer(d);
    m.cuts[2] = std::vector<double>{};
    EXPECT_THROW(apply_discretization(d, m), ModelError);
}

TEST(Discretizer, FitUsesOnlyGivenRows) {
    auto d = fixture::random_mixed(300, 1, 0, 12);
    const auto folds = stratified_folds(d, 3, 1);
    const auto train = subset(d, folds.complement(0));
    const auto m = fit_discretizer(train);
    auto poisoned = d;
    for (auto i : folds.members(0))
        poisoned.instances[i].values[0] = 1e9;
    EXPECT_EQ(fit_discretizer(subset(poisoned, folds.complement(0))), m);
}
