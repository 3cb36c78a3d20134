#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "unrest/features/daily_series.hpp"
#include "unrest/features/feature_csv.hpp"
#include "unrest/features/intervals.hpp"
#include "unrest/features/rolling.hpp"

using namespace unrest;
using namespace unrest::features;

namespace {

ingest::EventRecord row(Date day, int root, std::optional<double> tone = {}, std::optional<double> gold = {}) {
    ingest::EventRecord r;
    r.global_event_id = 1;
    r.day = day;
    r.month_year = day.month_year();
    r.event_root_code = root;
    r.action_country = "PK";
    r.avg_tone = tone;
    r.goldstein_scale = gold;
    return r;
}

double brute_mean(const std::vector<double>& xs, std::size_t end, std::size_t w) {
    long double s = 0;
    for (std::size_t j = end + 1 - w; j <= end; ++j) s += xs[j];
    return static_cast<double>(s / w);
}

FeatureConfig small_cfg() {
    FeatureConfig cfg;
    cfg.window = 5;
    cfg.interval = 3;
    cfg.max_lag = 2;
    return cfg;
}

} // namespace

// ---- daily_counts ----------------------------------------------------------

TEST(DailyCounts, FiltersByRootCode) {
    const Date d(2019, 3, 1);
    std::vector<ingest::EventRecord> rows{row(d, 14), row(d, 14), row(d, 14), row(d, 10)};
    auto s = daily_counts(rows, FeatureConfig{});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.first, d);
    EXPECT_EQ(s.count[0], 3.0);
    EXPECT_EQ(s.country, "PK");
}

TEST(DailyCounts, ZeroFillsGaps) {
    const Date d(2019, 3, 1);
    std::vector<ingest::EventRecord> rows{row(d + 2, 14), row(d, 14)};
    auto s = daily_counts(rows, FeatureConfig{});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.count, (std::vector<double>{1, 0, 1}));
    EXPECT_EQ(s.last(), d + 2);
}

TEST(DailyCounts, EmptyInputGivesEmptySeries) {
    std::vector<ingest::EventRecord> rows;
    EXPECT_TRUE(daily_counts(rows, FeatureConfig{}).empty());
}

TEST(DailyCounts, AccumulatesOnlyPresentValues) {
    const Date d(2019, 3, 1);
    std::vector<ingest::EventRecord> rows{row(d, 14, 2.0, -5.0), row(d, 14), row(d, 10, 100.0, 9.0)};
    auto s = daily_counts(rows, FeatureConfig{});
    EXPECT_EQ(s.tone_sum[0], 2.0);
    EXPECT_EQ(s.tone_n[0], 1);
    EXPECT_EQ(s.goldstein_sum[0], -5.0);
    EXPECT_EQ(s.goldstein_n[0], 1);
}

// ---- moving_average ----------------------------------------------------------

TEST(MovingAverage, Examples) {
    std::vector<double> a{1, 2, 3};
    auto m = moving_average(a, 3);
    ASSERT_EQ(m.values.size(), 1u);
    EXPECT_EQ(m.at(2), 2.0);
    EXPECT_FALSE(m.defined_at(1));

    std::vector<double> b{0, 0, 9};
    EXPECT_EQ(moving_average(b, 3).at(2), 3.0);

    std::vector<double> c(50, 7.0);
    for (std::size_t w : {1u, 4u, 50u})
        for (double v : moving_average(c, w).values) EXPECT_EQ(v, 7.0);
}

TEST(MovingAverage, ShortSeriesIsWarmUpOnly) {
    std::vector<double> a{1, 2};
    auto m = moving_average(a, 3);
    EXPECT_TRUE(m.warm_up_only);
    EXPECT_TRUE(m.values.empty());
    EXPECT_THROW(moving_average(a, 0), InvalidValue);
}

TEST(MovingAverage, MatchesBruteForceProperty) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> len(1, 3000), win(1, 90);
    std::poisson_distribution<int> counts(40);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = len(rng), w = std::min(n, win(rng));
        std::vector<double> xs(n);
        for (auto& x : xs) x = counts(rng);
        auto m = moving_average(xs, w);
        ASSERT_EQ(m.values.size(), n - w + 1);
        for (std::size_t i = w - 1; i < n; ++i) ASSERT_LT(std::abs(m.at(i) - brute_mean(xs, i, w)), 1e-12);
    }
}

// ---- make_intervals ------------------------------------------------------------

TEST(MakeIntervals, TruncatesTrailingPartial) {
    FeatureConfig cfg;  // W=90, L=7: warm-up 89 days
    for (auto [post, want] : {std::pair{9, 3}, std::pair{10, 3}, std::pair{2, 0}}) {
        auto s = test::series_from_counts(std::vector<double>(89 + post, 1.0));
        auto iv = make_intervals(s, cfg);
        EXPECT_EQ(iv.size(), static_cast<std::size_t>(want)) << post;
        if (!iv.empty()) {
            EXPECT_EQ(iv.front().start, 89u);
            EXPECT_EQ(iv.front().end, 91u);
        }
    }
}

TEST(MakeIntervals, LagHistoryCanDominateWarmUp) {
    FeatureConfig cfg;
    cfg.window = 3;
    cfg.max_lag = 7;
    EXPECT_EQ(cfg.warm_up(), 7);
    auto s = test::series_from_counts(std::vector<double>(13, 1.0));
    auto iv = make_intervals(s, cfg);
    ASSERT_EQ(iv.size(), 2u);
    EXPECT_EQ(iv[0].start, 7u);
}

// ---- scalar formulas -----------------------------------------------------------

TEST(MctBarComp, Examples) {
    EXPECT_EQ(mct_bar_comp(10, 5), -2.0);
    EXPECT_EQ(mct_bar_comp(0, 5), 0.0);
    EXPECT_FALSE(std::signbit(mct_bar_comp(0, 5)));
    EXPECT_EQ(mct_bar_comp(3, 0), 0.0);
}

TEST(Theta, Examples) {
    // Independent evaluation: -2 + 2.576 * 7.
    EXPECT_NEAR(theta(5, -2, 2.576), 16.032, 1e-12);
    EXPECT_EQ(theta(0, 0, 2.576), 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-100, 100), zs(0.01, 10);
    for (int n = 0; n < 1000; ++n) {
        const double c = u(rng);
        EXPECT_EQ(theta(c, c, zs(rng)), c);
    }
}

TEST(Theta, ThresholdPredicateMonotoneInMct) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> base(1.6, 500);
    for (int n = 0; n < 300; ++n) {
        const double ma = base(rng);
        bool seen = false;
        for (double mct = 0; mct <= 40 * ma; mct += ma / 64) {
            const bool above = mct > theta(ma, mct_bar_comp(mct, ma), 2.576);
            if (seen) ASSERT_TRUE(above) << "ma=" << ma << " mct=" << mct;
            seen = seen || above;
        }
    }
}

// ---- build_features ------------------------------------------------------------

TEST(BuildFeatures, MeanCountOverInterval) {
    auto cfg = small_cfg();  // warm-up 4 days
    auto s = test::series_from_counts({1, 1, 1, 1, 4, 5, 6});
    auto out = build_features(s, cfg);
    ASSERT_EQ(out.rows.size(), 1u);
    EXPECT_EQ(out.rows[0].mct, 5.0);
    EXPECT_EQ(out.rows[0].mct_bar, (1 + 1 + 4 + 5 + 6) / 5.0);
    EXPECT_EQ(out.rows[0].lags, (std::vector<double>{5, 4}));
}

TEST(BuildFeatures, CarriesConfiguredLagCount) {
    FeatureConfig cfg;
    auto s = test::series_from_counts(std::vector<double>(300, 3.0));
    auto out = build_features(s, cfg);
    ASSERT_FALSE(out.rows.empty());
    for (const auto& r : out.rows) EXPECT_EQ(r.lags.size(), 7u);
}

TEST(BuildFeatures, ToneMeanSkipsAbsentDays) {
    auto cfg = small_cfg();
    auto s = test::series_from_counts({1, 1, 1, 1, 1, 1, 1});
    s.tone_sum[4] = 2.0;
    s.tone_n[4] = 1;
    s.tone_sum[5] = 4.0;
    s.tone_n[5] = 1;
    auto out = build_features(s, cfg);
    ASSERT_EQ(out.rows.size(), 1u);
    ASSERT_TRUE(out.rows[0].mean_tone);
    EXPECT_EQ(*out.rows[0].mean_tone, 3.0);
    EXPECT_FALSE(out.rows[0].mean_goldstein);
}

TEST(BuildFeatures, ShortSeriesGivesDiagnostic) {
    auto out = build_features(test::series_from_counts(std::vector<double>(91, 1.0)), FeatureConfig{});
    EXPECT_TRUE(out.rows.empty());
    ASSERT_TRUE(out.diagnostic);
    EXPECT_NE(out.diagnostic->find("InsufficientHistory"), std::string::npos);
}

TEST(BuildFeatures, MonthOfEndDate) {
    auto cfg = small_cfg();
    auto s = test::series_from_counts(std::vector<double>(7, 1.0), Date(2019, 1, 26));
    auto out = build_features(s, cfg);
    ASSERT_EQ(out.rows.size(), 1u);
    EXPECT_EQ(out.rows[0].end_date, Date(2019, 2, 1));
    EXPECT_EQ(out.rows[0].month, 2);
}

TEST(BuildFeatures, RejectsInvalidConfig) {
    FeatureConfig cfg;
    cfg.interval = 8;
    EXPECT_THROW(build_features(test::series_from_counts({1}), cfg), InvalidValue);
    cfg = {};
    cfg.z = 0;
    EXPECT_THROW(cfg.validate(), InvalidValue);
    cfg = {};
    cfg.window = 2;
    EXPECT_THROW(cfg.validate(), InvalidValue);
}

TEST(BuildFeatures, StructuralInvariantsProperty) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> w(3, 90), k(3, 7), l(0, 7), len(1, 600);
    std::poisson_distribution<int> counts(8);
    for (int trial = 0; trial < 60; ++trial) {
        FeatureConfig cfg;
        cfg.window = w(rng);
        cfg.interval = std::min(k(rng), cfg.window);
        cfg.max_lag = l(rng);
        std::vector<double> xs(static_cast<std::size_t>(len(rng)));
        for (auto& x : xs) x = counts(rng);
        auto s = test::series_from_counts(xs, Date(2016, 2, 20));
        auto out = build_features(s, cfg);
        auto ivs = make_intervals(s, cfg);
        ASSERT_EQ(out.rows.size(), ivs.size());
        for (std::size_t n = 0; n < out.rows.size(); ++n) {
            const auto& r = out.rows[n];
            const auto end = static_cast<std::size_t>(r.end_date - s.first);
            // Full baseline window and full lag history exist before end_date.
            ASSERT_GE(end + 1, static_cast<std::size_t>(cfg.window));
            ASSERT_GE(end, static_cast<std::size_t>(cfg.max_lag));
            ASSERT_EQ(r.end_date - r.start_date, cfg.interval - 1);
            ASSERT_EQ(r.interval_index, static_cast<int>(n));
            ASSERT_EQ(r.lags.size(), static_cast<std::size_t>(cfg.max_lag));
            EXPECT_LT(std::abs(r.mct_bar - brute_mean(xs, end, static_cast<std::size_t>(cfg.window))), 1e-12);
            if (n > 0) ASSERT_EQ(r.start_date, out.rows[n - 1].end_date + 1);
        }
        if (!out.rows.empty()) {
            ASSERT_EQ(out.rows.front().start_date - s.first, cfg.warm_up());
            ASSERT_LT(s.last() - out.rows.back().end_date, cfg.interval);
        }
    }
}

TEST(BuildFeatures, RowsNeverReadTheFuture) {
    std::mt19937_64 rng(3);
    std::poisson_distribution<int> counts(10);
    auto cfg = small_cfg();
    std::vector<double> xs(200);
    for (auto& x : xs) x = counts(rng);
    auto base = build_features(test::series_from_counts(xs), cfg).rows;
    for (std::size_t n = 0; n < base.size(); ++n) {
        auto poisoned = xs;
        const auto end = static_cast<std::size_t>(base[n].end_date - Date(2015, 1, 1));
        for (std::size_t i = end + 1; i < poisoned.size(); ++i) poisoned[i] = 1e6;
        auto again = build_features(test::series_from_counts(poisoned), cfg).rows;
        ASSERT_EQ(again[n], base[n]);
    }
}

// ---- CSV -------------------------------------------------------------------

TEST(FeatureCsv, HeaderLayout) {
    EXPECT_EQ(feature_csv_header(2),
              "interval_index,start_date,end_date,mct,mct_bar,mct_bar_comp,theta,lag_1,lag_2,mean_tone,"
              "mean_goldstein,month");
    EXPECT_EQ(lag_count_from_header(feature_csv_header(7)), 7);
    EXPECT_EQ(lag_count_from_header("a,b,c"), -1);
}

TEST(FeatureCsv, RoundTripProperty) {
    std::mt19937_64 rng(8);
    std::poisson_distribution<int> counts(6);
    std::normal_distribution<double> tone(-2, 3);
    FeatureConfig cfg;
    cfg.window = 10;
    std::vector<double> xs(400);
    for (auto& x : xs) x = counts(rng);
    auto s = test::series_from_counts(xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (i % 5) {
            s.tone_sum[i] = tone(rng);
            s.tone_n[i] = 1;
        }
    auto rows = build_features(s, cfg).rows;
    ASSERT_FALSE(rows.empty());
    const auto text = write_feature_csv(rows, 7);
    EXPECT_EQ(read_feature_csv(text), rows);
    EXPECT_EQ(write_feature_csv(read_feature_csv(text), 7), text);
}

TEST(FeatureCsv, RejectsDamagedInput) {
    EXPECT_THROW(read_feature_csv(""), FormatError);
    EXPECT_THROW(read_feature_csv("x,y\n"), FormatError);
    const std::string h = feature_csv_header(0) + "\n";
    EXPECT_THROW(read_feature_csv(h + "0,2019-01-01,2019-01-03,1,1,-1,1,,,13\n"), FormatError);
    EXPECT_THROW(read_feature_csv(h + "0,2019-01-01,2019-01-03,1,1,-1,1,,\n"), FormatError);
    EXPECT_EQ(read_feature_csv(h + "0,2019-01-01,2019-01-03,1,1,-1,1,,,1\n").size(), 1u);
}
