#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "unrest/features/intervals.hpp"
#include "unrest/labeling/labeling.hpp"

using namespace unrest;
using namespace unrest::labeling;

namespace {

IntervalFeatureRow feature_row(double mct, double theta_value, Date end = Date(2019, 3, 3)) {
    IntervalFeatureRow r;
    r.mct = mct;
    r.theta = theta_value;
    r.end_date = end;
    r.start_date = end - 2;
    r.month = static_cast<int>(end.month());
    return r;
}

LabeledDataset dataset_from(const std::vector<double>& counts, double delta, Date first = Date(2014, 1, 1)) {
    features::FeatureConfig cfg;
    auto rows = features::build_features(test::series_from_counts(counts, first), cfg).rows;
    return assemble_dataset(rows, delta, "PK");
}

std::vector<double> poisson_counts(std::uint64_t seed, std::size_t n, double rate) {
    std::mt19937_64 rng(seed);
    std::poisson_distribution<int> p(rate);
    std::bernoulli_distribution spike(0.03);
    std::vector<double> xs(n);
    for (auto& x : xs) x = p(rng) * (spike(rng) ? 10 : 1);
    return xs;
}

} // namespace

TEST(LabelInterval, Examples) {
    // theta chain: mct_bar=5, comp=-2, z=2.576 gives 16.032.
    EXPECT_EQ(label_interval(feature_row(30, 22.336), 0), 1);
    EXPECT_EQ(label_interval(feature_row(10, 16.032), 0), 0);
    EXPECT_EQ(label_interval(feature_row(16.032, 16.032), 0), 0);
}

TEST(LabelInterval, LiteralStatisticCompares) {
    auto r = feature_row(10, 1);
    r.mct_bar_comp = -2;
    EXPECT_EQ(label_interval(r, 0, LabelStat::literal_mct_comp), 0);
    EXPECT_EQ(label_interval(r, -3, LabelStat::literal_mct_comp), 1);
}

TEST(AssembleDataset, LabelsInOrder) {
    std::vector<IntervalFeatureRow> rows{feature_row(1, 5), feature_row(9, 5), feature_row(5, 5)};
    auto ds = assemble_dataset(rows, 0.5, "PK");
    EXPECT_EQ(labels_of(ds), (std::vector<int>{0, 1, 0}));
    EXPECT_EQ(ds.country, "PK");
    EXPECT_TRUE(assemble_dataset({}, 0).empty());
}

TEST(LabeledCsv, RoundTrip) {
    auto ds = dataset_from(poisson_counts(1, 600, 5), 0);
    ASSERT_FALSE(ds.empty());
    auto back = read_labeled_csv(write_labeled_csv(ds), "PK");
    EXPECT_EQ(back, ds);
}

TEST(LabeledCsv, EmptyDatasetRoundTrips) {
    LabeledDataset ds;
    ds.country = "EG";
    EXPECT_EQ(read_labeled_csv(write_labeled_csv(ds), "EG"), ds);
}

TEST(LabeledCsv, RejectsBadLabel) {
    auto text = write_labeled_csv(dataset_from(poisson_counts(2, 200, 5), 0));
    text[text.size() - 2] = '2';
    EXPECT_THROW(read_labeled_csv(text), FormatError);
    EXPECT_THROW(read_labeled_csv(features::feature_csv_header(7) + "\n"), FormatError);
}

TEST(SplitByYear, Examples) {
    LabeledDataset ds;
    for (Date d : {Date(2017, 11, 4), Date(2019, 6, 20), Date(2020, 4, 15), Date(2013, 5, 1)})
        ds.rows.push_back({feature_row(0, 1, d), 0});
    auto s = split_by_year(ds, SplitSpec{});
    ASSERT_EQ(s.train.size(), 1u);
    EXPECT_EQ(s.train.rows[0].features.end_date, Date(2017, 11, 4));
    ASSERT_EQ(s.test.size(), 1u);
    EXPECT_EQ(s.test.rows[0].features.end_date, Date(2019, 6, 20));
    EXPECT_EQ(s.discarded, 1u);
    EXPECT_EQ(s.out_of_range, 1u);
    EXPECT_TRUE(s.warnings.empty());
}

TEST(SplitByYear, WarnsOnEmptySide) {
    LabeledDataset ds;
    ds.rows.push_back({feature_row(0, 1, Date(2016, 1, 3)), 0});
    auto s = split_by_year(ds, SplitSpec{});
    ASSERT_EQ(s.warnings.size(), 1u);
    EXPECT_NE(s.warnings[0].find("EmptySplit"), std::string::npos);
}

TEST(SplitByYear, OverlappingSetsRejected) {
    SplitSpec spec;
    spec.test_years.insert(2016);
    EXPECT_THROW(split_by_year(LabeledDataset{}, spec), InvalidValue);
}

TEST(SplitByYear, PartitionAndNoLeakageProperty) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto ds = dataset_from(poisson_counts(seed, 365 * 9, 6), 0, Date(2013, 7, 1));
        auto s = split_by_year(ds, SplitSpec{});
        EXPECT_EQ(s.train.size() + s.test.size() + s.discarded + s.out_of_range, ds.size());
        ASSERT_FALSE(s.train.empty());
        ASSERT_FALSE(s.test.empty());
        EXPECT_LT(s.train.rows.back().features.end_date, s.test.rows.front().features.end_date);
        std::set<int> train_ids, test_ids;
        for (const auto& r : s.train.rows) train_ids.insert(r.features.interval_index);
        for (const auto& r : s.test.rows) EXPECT_FALSE(train_ids.contains(r.features.interval_index));
    }
}

TEST(Labels, DeterministicAndAntitoneInDelta) {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        auto counts = poisson_counts(seed, 1500, 5);
        auto once = dataset_from(counts, 0);
        EXPECT_EQ(once, dataset_from(counts, 0));
        std::vector<int> prev = labels_of(once);
        for (double delta : {0.5, 1.0, 3.0, 10.0, 50.0}) {
            auto next = labels_of(dataset_from(counts, delta));
            for (std::size_t i = 0; i < next.size(); ++i) ASSERT_LE(next[i], prev[i]);
            prev = next;
        }
    }
}

TEST(Labels, MatchMarginRule) {
    auto ds = dataset_from(poisson_counts(77, 2000, 5), 0.25);
    std::size_t positives = 0;
    for (const auto& r : ds.rows) {
        EXPECT_EQ(r.label, r.features.mct - r.features.theta > 0.25 ? 1 : 0);
        positives += static_cast<std::size_t>(r.label);
    }
    EXPECT_GT(positives, 0u);
}
