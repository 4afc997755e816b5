#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "tfsi/error.hpp"
#include "tfsi/index.hpp"

using namespace tfsi;
using namespace tfsi::index;
using sentiment::Label;
using sentiment::SentimentScore;

namespace {

Date day(const char* s) { return parse_date(s); }

ScoredTweet tweet(const std::string& id, LocalSeconds t, double c) {
    ScoredTweet s;
    s.id = id;
    s.local = t;
    s.score.compound = c;
    s.score.label = c >= 0.1 ? Label::kPositive : c <= -0.1 ? Label::kNegative : Label::kNeutral;
    return s;
}

std::vector<ScoredTweet> random_corpus(std::mt19937& rng, int days, int per_day, bool ternary) {
    std::vector<ScoredTweet> out;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Date start = day("2021-01-01");
    int id = 0;
    for (int d = 0; d < days; ++d) {
        const int n = static_cast<int>(rng() % static_cast<unsigned>(2 * per_day + 1));
        for (int i = 0; i < n; ++i) {
            double c = u(rng);
            if (ternary) c = std::round(c * 1.4);
            out.push_back(tweet(std::to_string(id++), at_local(add_days(start, d), 0) + std::chrono::seconds(rng() % 86400), c));
        }
    }
    return out;
}

}  // namespace

TEST(Window, HandArithmetic) {
    const auto t0 = at_local(day("2022-03-01"), 10);
    const std::vector<ScoredTweet> ts{tweet("a", t0, 0.5), tweet("b", t0 + std::chrono::minutes(1), -0.9),
                                      tweet("c", t0 + std::chrono::minutes(2), 0.0)};
    const auto w = window_sentiment(ts, {t0, t0 + std::chrono::hours(1)});
    EXPECT_EQ(w.n, 3u);
    EXPECT_NEAR(*w.tfsi, 0.4 / 3.0, 1e-15);
    const auto end_excluded = window_sentiment(ts, {t0, t0 + std::chrono::minutes(2)});
    EXPECT_EQ(end_excluded.n, 2u);
    const auto empty = window_sentiment(ts, {t0 + std::chrono::hours(2), t0 + std::chrono::hours(3)});
    EXPECT_EQ(empty.n, 0u);
    EXPECT_FALSE(empty.tfsi);
    EXPECT_THROW(window_sentiment(ts, {t0, t0}), Error);
}

TEST(Window, AllNeutralIsZeroNotMissing) {
    const auto t0 = at_local(day("2022-03-01"), 10);
    const std::vector<ScoredTweet> ts{tweet("a", t0, 0.05), tweet("b", t0, -0.02)};
    const auto w = window_sentiment(ts, {t0, t0 + std::chrono::hours(1)});
    EXPECT_EQ(w.n, 2u);
    EXPECT_EQ(*w.tfsi, 0.0);
    const auto d = window_sentiment(ts, {t0, t0 + std::chrono::hours(1)}, {0.1, sentiment::NeutralMode::kDrop});
    EXPECT_EQ(d.n, 0u);
    EXPECT_FALSE(d.tfsi);
}

TEST(Window, SignConventionRaisingACompoundNeverRaisesTfsi) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto t0 = at_local(day("2022-03-01"), 0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<ScoredTweet> ts;
        for (int i = 0; i < 10; ++i) ts.push_back(tweet(std::to_string(i), t0 + std::chrono::minutes(i), u(rng)));
        const TimeWindow w{t0, t0 + std::chrono::hours(1)};
        const double before = *window_sentiment(ts, w).tfsi;
        auto& t = ts[rng() % ts.size()];
        t.score.compound = std::min(1.0, t.score.compound + std::fabs(u(rng)));
        EXPECT_LE(*window_sentiment(ts, w).tfsi, before + 1e-15);
    }
}

TEST(Aggregate, DailyCounts) {
    const std::vector<ScoredTweet> ts{tweet("a", at_local(day("2022-03-01"), 1), 0.5), tweet("b", at_local(day("2022-03-01"), 2), 0.5),
                                      tweet("c", at_local(day("2022-03-01"), 23), 0.5), tweet("d", at_local(day("2022-03-02"), 0), 0.5),
                                      tweet("e", at_local(day("2022-03-02"), 5), 0.5)};
    const auto s = aggregate_series(ts, Frequency::kDaily);
    ASSERT_EQ(s.points.size(), 2u);
    EXPECT_EQ(s.points[0].n, 3u);
    EXPECT_EQ(s.points[1].n, 2u);
    const auto m = aggregate_series(ts, Frequency::kMonthly);
    ASSERT_EQ(m.points.size(), 1u);
    const auto w = window_sentiment(ts, {at_local(day("2022-03-01"), 0), at_local(day("2022-04-01"), 0)});
    EXPECT_EQ(m.points[0].tfsi, w.tfsi);
}

TEST(Aggregate, WeeksRunMondayToSunday) {
    const std::vector<ScoredTweet> ts{tweet("a", at_local(day("2022-03-06"), 23), 0.5), tweet("b", at_local(day("2022-03-07"), 0), 0.5)};
    const auto s = aggregate_series(ts, Frequency::kWeekly);
    ASSERT_EQ(s.points.size(), 2u);
    EXPECT_EQ(s.points[0].date, day("2022-02-28"));
    EXPECT_EQ(s.points[1].date, day("2022-03-07"));
}

TEST(Aggregate, MonthlyMatchesBruteForce) {
    std::mt19937 rng(2);
    const auto ts = random_corpus(rng, 90, 20, false);
    const auto s = aggregate_series(ts, Frequency::kMonthly);
    std::map<Date, std::vector<double>> buckets;
    for (const auto& t : ts) buckets[month_start(local_date(t.local))].push_back(t.score.compound < 0.1 && t.score.compound > -0.1 ? 0.0 : t.score.compound);
    ASSERT_EQ(s.points.size(), buckets.size());
    size_t i = 0;
    for (const auto& [d, v] : buckets) {
        // Brute force: exact rational-free recomputation with a compensated loop.
        long double sum = 0.0L;
        for (double c : v) sum += c;
        EXPECT_EQ(s.points[i].date, d);
        EXPECT_EQ(s.points[i].n, v.size());
        EXPECT_NEAR(*s.points[i].tfsi, static_cast<double>(-sum / v.size()), 1e-15);
        ++i;
    }
}

TEST(Aggregate, ShuffleInvariant) {
    std::mt19937 rng(3);
    auto ts = random_corpus(rng, 60, 30, false);
    const auto base = aggregate_series(ts, Frequency::kDaily);
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(ts.begin(), ts.end(), rng);
        const auto s = aggregate_series(ts, Frequency::kDaily);
        ASSERT_EQ(s.points.size(), base.points.size());
        for (size_t i = 0; i < s.points.size(); ++i) EXPECT_NEAR(*s.points[i].tfsi, *base.points[i].tfsi, 1e-12);
    }
}

TEST(Aggregate, TernaryIdentityAndSharesSumToOne) {
    std::mt19937 rng(4);
    const auto ts = random_corpus(rng, 120, 15, true);
    for (auto f : {Frequency::kDaily, Frequency::kWeekly, Frequency::kMonthly}) {
        for (const auto& p : aggregate_series(ts, f).points) {
            ASSERT_TRUE(p.tfsi);
            EXPECT_EQ(*p.tfsi, *p.net_negative);
            EXPECT_NEAR(p.share_pos + p.share_neg + p.share_neu, 1.0, 1e-15);
        }
    }
}

TEST(Aggregate, MonthlyIsNWeightedDaily) {
    std::mt19937 rng(5);
    const auto ts = random_corpus(rng, 200, 25, false);
    const auto daily = aggregate_series(ts, Frequency::kDaily);
    const auto monthly = aggregate_series(ts, Frequency::kMonthly);
    std::map<Date, std::pair<double, double>> acc;
    for (const auto& p : daily.points) {
        acc[month_start(p.date)].first += *p.tfsi * static_cast<double>(p.n);
        acc[month_start(p.date)].second += static_cast<double>(p.n);
    }
    for (const auto& p : monthly.points) EXPECT_NEAR(*p.tfsi, acc[p.date].first / acc[p.date].second, 1e-12);
}

TEST(MovingAverage, Examples) {
    IndexSeries s;
    for (int i = 0; i < 10; ++i) s.points.push_back(make_point(add_days(day("2022-01-01"), i), WindowStats{-static_cast<double>(i + 1), 1, 0, 1, 0}));
    const auto ma = moving_average(s, 7);
    ASSERT_EQ(ma.points.size(), 10u);
    for (int i = 0; i < 6; ++i) EXPECT_FALSE(ma.points[static_cast<size_t>(i)].tfsi);
    EXPECT_DOUBLE_EQ(*ma.points[6].tfsi, -4.0);
    EXPECT_EQ(ma.points[6].n, 7u);
    for (auto& p : s.points) p.tfsi = 2.5;
    for (size_t i = 6; i < 10; ++i) EXPECT_DOUBLE_EQ(*moving_average(s, 7).points[i].tfsi, 2.5);
    EXPECT_THROW(moving_average(s, 0), Error);
}

TEST(MovingAverage, GapsMatchNaiveLoop) {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(-1, 1);
    IndexSeries s;
    std::map<Date, double> truth;
    for (int i = 0; i < 120; ++i) {
        if (rng() % 4 == 0) continue;
        const Date d = add_days(day("2022-01-01"), i);
        const double v = u(rng);
        truth[d] = v;
        WindowStats w;
        w.tfsi = v;
        w.n = 1;
        s.points.push_back(make_point(d, w));
    }
    const auto ma = moving_average(s, 7);
    for (const auto& p : ma.points) {
        if (days_between(s.points.front().date, p.date) < 6) {
            EXPECT_FALSE(p.tfsi);
            continue;
        }
        double sum = 0;
        int n = 0;
        for (int k = 0; k < 7; ++k) {
            const auto it = truth.find(add_days(p.date, -k));
            if (it != truth.end()) sum += it->second, ++n;
        }
        if (n == 0) {
            EXPECT_FALSE(p.tfsi);
        } else {
            EXPECT_NEAR(*p.tfsi, sum / n, 1e-12);
            EXPECT_EQ(p.n, static_cast<size_t>(n));
        }
    }
}

TEST(Decomposition, Examples) {
    WindowStats w;
    w.tfsi = 0.0;
    w.n = 4;
    w.n_pos = 1;
    w.n_neg = 1;
    w.n_neu = 2;
    IndexSeries s;
    s.points.push_back(make_point(day("2022-01-01"), w));
    EXPECT_EQ(*engagement_decomposition(s)[0].second, 0.0);
}

TEST(Decomposition, TracksTfsiWhenScoresAreNearTernary) {
    // A year with drifting negativity and compounds close to +-1.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<ScoredTweet> ts;
    int id = 0;
    for (int d = 0; d < 365; ++d) {
        const double p_neg = 0.2 + 0.6 * d / 365.0;
        for (int i = 0; i < 40; ++i) {
            const double r = u(rng);
            const double c = r < p_neg ? -0.95 - 0.05 * u(rng) : r < p_neg + 0.15 ? 0.0 : 0.95 + 0.05 * u(rng);
            ts.push_back(tweet(std::to_string(id++), at_local(add_days(day("2021-01-01"), d), 12), c));
        }
    }
    const auto s = aggregate_series(ts, Frequency::kDaily);
    const auto r = correlate(standardize(tfsi_values(s)), standardize(engagement_decomposition(s)));
    EXPECT_GT(r.r, 0.95);
}

TEST(Standardize, Examples) {
    const auto z = standardize(std::vector<double>{1, 3});
    EXPECT_NEAR(z[0], -1.0, 1e-15);
    EXPECT_NEAR(z[1], 1.0, 1e-15);
    const auto zs = standardize(std::vector<double>{1, 3}, Standardization::kSample);
    EXPECT_NEAR(zs[0], -1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_THROW(standardize(std::vector<double>{2, 2, 2}), Error);
    EXPECT_THROW(standardize(std::vector<double>{2}), Error);
}

TEST(Standardize, MeanZeroUnitSdAndIdempotent) {
    std::mt19937 rng(8);
    std::normal_distribution<double> n(3.0, 7.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::optional<double>> v(2 + rng() % 100);
        for (auto& x : v) {
            if (rng() % 5) x = n(rng);
        }
        if (std::count_if(v.begin(), v.end(), [](auto& x) { return x.has_value(); }) < 2) continue;
        for (auto conv : {Standardization::kPopulation, Standardization::kSample}) {
            const auto z = standardize(v, conv);
            double sum = 0, sq = 0, k = 0;
            for (size_t i = 0; i < z.size(); ++i) {
                ASSERT_EQ(z[i].has_value(), v[i].has_value());
                if (z[i]) sum += *z[i], sq += *z[i] * *z[i], ++k;
            }
            EXPECT_NEAR(sum / k, 0.0, 1e-12);
            EXPECT_NEAR(std::sqrt(sq / (conv == Standardization::kPopulation ? k : k - 1)), 1.0, 1e-12);
            const auto zz = standardize(z, conv);
            for (size_t i = 0; i < z.size(); ++i) {
                if (z[i]) EXPECT_NEAR(*zz[i], *z[i], 1e-12);
            }
        }
    }
}

TEST(Correlate, ExamplesAndFormulaOracle) {
    DatedValues a, b, neg;
    std::mt19937 rng(9);
    std::normal_distribution<double> n(0, 1);
    for (int m = 0; m < 24; ++m) {
        const Date d = Date{std::chrono::year{2020 + m / 12}, std::chrono::month{static_cast<unsigned>(m % 12 + 1)}, std::chrono::day{1}};
        const double x = n(rng);
        a.emplace_back(d, x);
        neg.emplace_back(d, -x);
        b.emplace_back(d, 0.5 * x + n(rng));
    }
    EXPECT_NEAR(correlate(a, a).r, 1.0, 1e-15);
    EXPECT_NEAR(correlate(a, neg).r, -1.0, 1e-15);
    double ma = 0, mb = 0;
    for (size_t i = 0; i < 24; ++i) ma += *a[i].second / 24, mb += *b[i].second / 24;
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < 24; ++i) {
        sab += (*a[i].second - ma) * (*b[i].second - mb);
        saa += (*a[i].second - ma) * (*a[i].second - ma);
        sbb += (*b[i].second - mb) * (*b[i].second - mb);
    }
    const auto r = correlate(a, b);
    EXPECT_EQ(r.overlap, 24u);
    EXPECT_NEAR(r.r, sab / std::sqrt(saa * sbb), 1e-12);
    DatedValues shifted(b.begin() + 22, b.end());
    EXPECT_THROW(correlate(a, shifted), Error);
}

TEST(Windows, TradingWindowBoundaries) {
    const auto on = trading_window(day("2022-03-04"), day("2022-03-07"), WindowKind::kOvernight);
    EXPECT_EQ(on.start, at_local(day("2022-03-04"), 16));
    EXPECT_EQ(on.end, at_local(day("2022-03-07"), 9));
    const auto dw = trading_window(day("2022-03-04"), day("2022-03-07"), WindowKind::kDaily);
    EXPECT_EQ(dw.end, at_local(day("2022-03-07"), 16));
}

TEST(Windows, SeriesCoversEveryTradingDayWithMissingMarkers) {
    const std::vector<ScoredTweet> ts{tweet("a", at_local(day("2022-03-05"), 12), -0.5),  // Saturday -> Monday
                                      tweet("b", at_local(day("2022-03-07"), 9), 0.5)};   // 09:00 is intraday
    const Timeline tl(ts);
    const std::vector<Date> days{day("2022-03-07"), day("2022-03-08")};
    const auto s = window_series(tl, days, WindowKind::kOvernight);
    ASSERT_EQ(s.points.size(), 2u);
    EXPECT_EQ(s.points[0].n, 1u);
    EXPECT_DOUBLE_EQ(*s.points[0].tfsi, 0.5);
    EXPECT_FALSE(s.points[1].tfsi);
    const auto d = window_series(tl, days, WindowKind::kDaily);
    EXPECT_EQ(d.points[0].n, 2u);
}

TEST(Csv, SeriesRoundTrip) {
    std::mt19937 rng(10);
    const auto ts = random_corpus(rng, 30, 5, false);
    auto s = aggregate_series(ts, Frequency::kDaily);
    s.points.push_back(make_point(day("2030-01-01"), WindowStats{}));
    const std::string csv = series_csv(s);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "date,tfsi,n,share_pos,share_neg,share_neu");
    EXPECT_EQ(series_csv(parse_series_csv(csv, Frequency::kDaily)), csv);
    EXPECT_NE(csv.find("2030-01-01,,0,"), std::string::npos);
}
