#include <gtest/gtest.h>

#include <random>

#include "tfsi/error.hpp"
#include "tfsi/events.hpp"

using namespace tfsi;
using namespace tfsi::events;

namespace {

index::ScoredTweet scored(const std::string& id, LocalSeconds t, double compound) {
    index::ScoredTweet s;
    s.id = id;
    s.local = t;
    s.score.compound = compound;
    s.score.label = compound >= 0.05 ? sentiment::Label::kPositive
                    : compound <= -0.05 ? sentiment::Label::kNegative
                                        : sentiment::Label::kNeutral;
    return s;
}

FomcEvent event_on(const char* date) {
    FomcEvent e;
    e.statement_date = parse_date(date);
    return e;
}

}  // namespace

TEST(FedRelated, Examples) {
    const auto& t = default_tenures();
    const Date d2019 = parse_date("2019-06-01"), d2012 = parse_date("2012-06-01");
    EXPECT_TRUE(is_fed_related("the Fed hikes again", d2012, t));
    EXPECT_TRUE(is_fed_related("the Fed hikes again", d2019, t));
    EXPECT_TRUE(is_fed_related("Powell presser at 2:30", d2019, t));
    EXPECT_FALSE(is_fed_related("Powell presser at 2:30", d2012, t));
    EXPECT_TRUE(is_fed_related("monetary policy pivot", d2019, t));
    EXPECT_FALSE(is_fed_related("fedora hats", d2019, t));
    EXPECT_FALSE(is_fed_related("federal funds", d2019, t));
    EXPECT_TRUE(is_fed_related("Federal Reserve", d2019, t));
    EXPECT_TRUE(is_fed_related("Fed's move", d2019, t));
    EXPECT_TRUE(is_fed_related("yellen speaks", parse_date("2015-03-01"), t));
    EXPECT_FALSE(is_fed_related("yellen speaks", parse_date("2019-03-01"), t));
}

TEST(Tenures, ParseAndOverlap) {
    const auto t = parse_tenures("name,start_date,end_date\nA,2010-01-01,2011-01-01\nA,2012-01-01,\nB,2010-06-01,2010-07-01\n");
    ASSERT_EQ(t.size(), 3u);
    EXPECT_FALSE(t[1].end.has_value());
    EXPECT_TRUE(t[1].covers(parse_date("2030-01-01")));
    EXPECT_EQ(parse_tenures(tenures_csv(t)).size(), 3u);
    EXPECT_THROW(parse_tenures("name,start_date,end_date\nA,2010-01-01,2011-01-01\na,2010-12-01,\n"), Error);
    EXPECT_THROW(parse_tenures("name,start_date,end_date\nA,2011-01-01,2010-01-01\n"), Error);
}

TEST(Calendar, ParseDefaultsAndRoundTrip) {
    const auto cal = parse_calendar(
        "statement_date,statement_time,meeting_day1_date\n2019-07-31,,2019-07-30\n2019-09-18,14:00,\n");
    ASSERT_EQ(cal.size(), 2u);
    EXPECT_EQ(cal[0].statement_seconds, 14 * 3600);
    EXPECT_TRUE(cal[0].meeting_day1.has_value());
    EXPECT_EQ(cal[0].statement_time(), at_local(parse_date("2019-07-31"), 14));
    const auto again = parse_calendar(calendar_csv(cal));
    EXPECT_EQ(calendar_csv(again), calendar_csv(cal));
    EXPECT_THROW(parse_calendar("statement_date,statement_time,meeting_day1_date\n2019-07-31,,\n2019-07-31,,\n"), Error);
    EXPECT_THROW(parse_calendar("statement_date,statement_time,meeting_day1_date\n2019-07-31,25:00,\n"), Error);
}

TEST(Windows, HalfOpenBoundaries) {
    const FomcEvent e = event_on("2019-07-31");
    const Date d = e.statement_date;
    std::vector<index::ScoredTweet> tw{
        scored("1", at_local(d, 13, 59, 59), 0.5),
        scored("2", at_local(d, 14), -0.7),
    };
    const index::Timeline tl(tw);
    const auto pre = event_window_sentiment(tl, e, WindowSide::kPre);
    const auto post = event_window_sentiment(tl, e, WindowSide::kPost);
    EXPECT_EQ(pre.n, 1u);
    EXPECT_DOUBLE_EQ(*pre.tfsi, -0.5);
    EXPECT_EQ(post.n, 1u);
    EXPECT_DOUBLE_EQ(*post.tfsi, 0.7);

    const auto w = event_window(e, WindowSide::kPre);
    EXPECT_EQ(w.start, at_local(parse_date("2019-07-30"), 16));
    // Monday statement: pre window opens on the preceding Friday.
    EXPECT_EQ(event_window(event_on("2020-03-16"), WindowSide::kPre).start, at_local(parse_date("2020-03-13"), 16));
}

TEST(Windows, OnlyPostTweetsLeavePreMissing) {
    const FomcEvent e = event_on("2019-07-31");
    const index::Timeline tl(std::vector<index::ScoredTweet>{scored("1", at_local(e.statement_date, 14, 30), 0.4),
                                                              scored("2", at_local(e.statement_date, 15), 0.2)});
    const auto pre = event_window_sentiment(tl, e, WindowSide::kPre);
    EXPECT_FALSE(pre.tfsi.has_value());
    EXPECT_FALSE(pre.reason.empty());
    EXPECT_TRUE(event_window_sentiment(tl, e, WindowSide::kPost).tfsi.has_value());
    const auto far = event_window_sentiment(tl, event_on("2021-01-27"), WindowSide::kPost);
    EXPECT_FALSE(far.tfsi.has_value());
    EXPECT_EQ(far.reason, "outside corpus coverage");
}

TEST(Windows, HandComputedEventDay) {
    const FomcEvent e = event_on("2019-07-31");
    const Date d = e.statement_date, prev = parse_date("2019-07-30");
    std::vector<index::ScoredTweet> tw{
        scored("a", at_local(prev, 15, 59), 0.9),   // before pre window
        scored("b", at_local(prev, 16), 0.5),       // pre
        scored("c", at_local(d, 9), -0.3),          // pre
        scored("d", at_local(d, 14, 10), 0.8),      // post
        scored("e", at_local(d, 15, 30), 0.05),     // post, neutralized to 0
        scored("f", at_local(d, 16), -0.9),         // after post window
    };
    const index::Timeline tl(tw);
    EXPECT_NEAR(*event_window_sentiment(tl, e, WindowSide::kPre).tfsi, -(0.5 - 0.3) / 2, 1e-15);
    EXPECT_NEAR(*event_window_sentiment(tl, e, WindowSide::kPost).tfsi, -(0.8 + 0.0) / 2, 1e-15);
    const index::NeutralPolicy drop{0.1, sentiment::NeutralMode::kDrop};
    const auto post_drop = event_window_sentiment(tl, e, WindowSide::kPost, drop);
    EXPECT_EQ(post_drop.n, 1u);
    EXPECT_NEAR(*post_drop.tfsi, -0.8, 1e-15);
}

TEST(Windows, PreAndPostNeverShareATweet) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> sec(0, 5 * 86400);
    const FomcEvent e = event_on("2019-07-31");
    const LocalSeconds base = at_local(parse_date("2019-07-28"), 0);
    std::vector<index::ScoredTweet> tw;
    for (int i = 0; i < 5000; ++i) tw.push_back(scored(std::to_string(i), base + std::chrono::seconds(sec(rng)), 0.5));
    const index::Timeline tl(tw);
    const auto pre = tl.range(event_window(e, WindowSide::kPre));
    const auto post = tl.range(event_window(e, WindowSide::kPost));
    std::set<std::string> ids;
    for (const auto& t : pre) ids.insert(t.id);
    for (const auto& t : post) EXPECT_FALSE(ids.count(t.id));
    EXPECT_GT(pre.size(), 0u);
    EXPECT_GT(post.size(), 0u);
}

TEST(Profile, FlatShare) {
    std::vector<TaggedTweet> tw;
    const Date start = parse_date("2019-01-01");
    for (int day = 0; day < 60; ++day) {
        for (int i = 0; i < 10; ++i) tw.push_back({at_local(add_days(start, day), 10 + i), i < 3});
    }
    const auto p = fed_share_profile(daily_fed_counts(tw), {event_on("2019-01-20"), event_on("2019-02-10")});
    ASSERT_EQ(p.offsets.size(), 15u);
    EXPECT_EQ(p.offsets.front(), -7);
    for (const auto& s : p.mean_share) EXPECT_NEAR(*s, 0.3, 1e-15);
    EXPECT_NEAR(p.sample_mean, 0.3, 1e-15);
    EXPECT_FALSE(p.partial_coverage);
    EXPECT_TRUE(fed_share_profile(daily_fed_counts(tw), {event_on("2019-01-03")}).partial_coverage);
    EXPECT_THROW(fed_share_profile(daily_fed_counts(tw), {}), Error);
}

TEST(Profile, RecoversPlantedSpike) {
    const std::vector<FomcEvent> events{event_on("2019-02-06"), event_on("2019-03-20"), event_on("2019-05-01")};
    std::set<Date> spike;
    for (const auto& e : events) spike.insert(e.statement_date);
    std::vector<TaggedTweet> tw;
    const Date start = parse_date("2019-01-01");
    for (int day = 0; day < 150; ++day) {
        const Date d = add_days(start, day);
        const int fed = spike.count(d) ? 3 : 1;
        for (int i = 0; i < 10; ++i) tw.push_back({at_local(d, 8 + i), i < fed});
    }
    const auto p = fed_share_profile(daily_fed_counts(tw), events);
    for (size_t i = 0; i < p.offsets.size(); ++i) EXPECT_DOUBLE_EQ(*p.mean_share[i], p.offsets[i] == 0 ? 0.3 : 0.1);
}

TEST(Profile, BoundsAndTweetWeightedMean) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(0, 40);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<TaggedTweet> tw;
    const Date start = parse_date("2020-01-01");
    for (int day = 0; day < 120; ++day) {
        const int n = count(rng);
        const double share = u(rng);
        for (int i = 0; i < n; ++i) tw.push_back({at_local(add_days(start, day), 12), u(rng) < share});
    }
    const auto daily = daily_fed_counts(tw);
    const auto p = fed_share_profile(daily, {event_on("2020-02-05"), event_on("2020-03-18"), event_on("2020-04-29")});
    for (const auto& s : p.mean_share) {
        if (!s) continue;
        EXPECT_GE(*s, 0.0);
        EXPECT_LE(*s, 1.0);
    }
    double num = 0, den = 0;
    for (const auto& d : daily) {
        num += d.share() * static_cast<double>(d.total);
        den += static_cast<double>(d.total);
    }
    EXPECT_NEAR(p.sample_mean, num / den, 1e-12);
}

TEST(Shocks, ParseAndOffCalendar) {
    const auto s = parse_shocks("date,kind,value\n2019-07-31,MAR,0.1\n2019-09-18,mar,-0.2\n2019-07-31,JK,0.05\n");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.at("mar").points.size(), 2u);
    EXPECT_EQ(shocks_csv(parse_shocks(shocks_csv(s))), shocks_csv(s));
    const auto off = off_calendar_dates(s.at("mar"), {event_on("2019-07-31")});
    ASSERT_EQ(off.size(), 1u);
    EXPECT_EQ(off[0], parse_date("2019-09-18"));
    EXPECT_THROW(parse_shocks("date,kind,value\n2019-07-31,mar,1\n2019-07-31,MAR,2\n"), Error);
    EXPECT_THROW(parse_shocks("date,kind,value\n2019-07-31,mar,abc\n"), Error);
}

TEST(Split, SignRuleAndZeros) {
    ShockSeries s{"mar", {{parse_date("2019-07-31"), 0.1}, {parse_date("2019-09-18"), -0.2}, {parse_date("2019-10-30"), 0.0}}};
    std::vector<EventSentiment> sent;
    for (const auto& [d, v] : s.points) sent.push_back({d, 0.1, 0.2, 3, 4});
    const auto r = align_and_split(s, sent);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.rows[0].regime, Regime::kTight);
    EXPECT_EQ(r.rows[1].regime, Regime::kEase);
    EXPECT_EQ(r.n_zero, 1u);
    EXPECT_EQ(r.n_total, 3u);
    EXPECT_THROW(align_and_split(s, {}), Error);
}

TEST(Split, ConservationOnSixtyEvents) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> pick(-2, 2);
    ShockSeries s{"jk", {}};
    std::vector<EventSentiment> sent;
    Date d = parse_date("2010-01-27");
    for (int i = 0; i < 60; ++i) {
        s.points[d] = 0.05 * pick(rng);
        if (i % 7 != 3) sent.push_back({d, 0.0, 0.0, 1, 1});
        d = add_days(d, 42);
    }
    const auto r = align_and_split(s, sent);
    EXPECT_EQ(r.n_tight() + r.n_ease() + r.n_zero, r.n_total);
    EXPECT_EQ(r.n_total + r.n_unmatched, 60u);
}

TEST(Frequencies, TopTokens) {
    const std::vector<std::string_view> texts{"The Fed cuts rates, rates fall", "rates and 2019 a b inflation", "Fed"};
    const auto f = token_frequencies(texts, 3);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[0], (std::pair<std::string, size_t>{"rates", 3}));
    EXPECT_EQ(f[1], (std::pair<std::string, size_t>{"fed", 2}));
    EXPECT_EQ(f[2].first, "cuts");
    EXPECT_EQ(frequency_csv(f).substr(0, 12), "token,count\n");
}
