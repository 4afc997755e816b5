#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tfsi/sentiment.hpp"
#include "tfsi/timeutil.hpp"

namespace tfsi::index {

struct ScoredTweet {
    std::string id;
    LocalSeconds local{};  // Eastern wall clock
    sentiment::SentimentScore score;
};

struct NeutralPolicy {
    double band = 0.1;
    sentiment::NeutralMode mode = sentiment::NeutralMode::kZero;
};

/// Half-open [start, end) in Eastern wall-clock time.
struct TimeWindow {
    LocalSeconds start{};
    LocalSeconds end{};
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct WindowStats {
    std::optional<double> tfsi;  // missing when n == 0
    std::size_t n = 0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::size_t n_neu = 0;
};

/// Accumulates tweets after the neutral policy has been applied.
class BucketAccumulator {
public:
    void add(const sentiment::SentimentScore& s, const NeutralPolicy& policy);
    WindowStats stats() const;

private:
    CompensatedSum sum_;
    std::size_t n_ = 0, pos_ = 0, neg_ = 0, neu_ = 0;
};

/// tfsi = -(sum of compounds) / N over start <= t < end.
WindowStats window_sentiment(std::span<const ScoredTweet> tweets, TimeWindow w, const NeutralPolicy& policy = {});

/// Tweets sorted by (time, id) for repeated window queries.
class Timeline {
public:
    explicit Timeline(std::vector<ScoredTweet> tweets);

    WindowStats window(TimeWindow w, const NeutralPolicy& policy = {}) const;
    std::span<const ScoredTweet> range(TimeWindow w) const;
    const std::vector<ScoredTweet>& tweets() const { return tweets_; }
    bool empty() const { return tweets_.empty(); }
    LocalSeconds first() const;
    LocalSeconds last() const;

private:
    std::vector<ScoredTweet> tweets_;
};

enum class Frequency { kDaily, kWeekly, kMonthly, kCustom };
const char* to_string(Frequency f);
Frequency parse_frequency(std::string_view s);

struct IndexPoint {
    Date date{};  // bucket start (custom: the trading day the window belongs to)
    std::optional<double> tfsi;
    std::size_t n = 0;  // tweets; for smoothed series the contributing days
    double share_pos = 0.0;
    double share_neg = 0.0;
    double share_neu = 0.0;
    /// share_neg - share_pos, computed from counts so the ternary identity is exact.
    std::optional<double> net_negative;
};

struct IndexSeries {
    Frequency frequency = Frequency::kDaily;
    std::vector<IndexPoint> points;
};

IndexPoint make_point(Date date, const WindowStats& w);

/// Calendar bucketing on the Eastern date: days, Monday-Sunday weeks, months.
IndexSeries aggregate_series(std::span<const ScoredTweet> tweets, Frequency f, const NeutralPolicy& policy = {});

enum class WindowKind {
    kOvernight,  // [previous trading day 16:00, day 09:00)
    kDaily,      // [previous trading day 16:00, day 16:00)
};

TimeWindow trading_window(Date prev_trading_day, Date day, WindowKind kind);

/// One point per trading day. The first day's predecessor is the previous weekday.
IndexSeries window_series(const Timeline& timeline, const std::vector<Date>& trading_days, WindowKind kind,
                          const NeutralPolicy& policy = {});

/// Trailing k-calendar-day mean of the present points. The output is dense from
/// the first to the last date; the first k-1 days are missing.
IndexSeries moving_average(const IndexSeries& daily, int k = 7);

using DatedValues = std::vector<std::pair<Date, std::optional<double>>>;

DatedValues tfsi_values(const IndexSeries& s);
/// share_neg - share_pos per point.
DatedValues engagement_decomposition(const IndexSeries& s);

enum class Standardization { kPopulation, kSample };
const char* to_string(Standardization s);
Standardization parse_standardization(std::string_view s);

/// (x - mean) / sd over the present values. Throws kNumeric on zero variance
/// or fewer than two values.
std::vector<std::optional<double>> standardize(const std::vector<std::optional<double>>& values,
                                               Standardization conv = Standardization::kPopulation);
std::vector<double> standardize(const std::vector<double>& values, Standardization conv = Standardization::kPopulation);
DatedValues standardize(const DatedValues& values, Standardization conv = Standardization::kPopulation);

struct Correlation {
    double r = 0.0;
    std::size_t overlap = 0;
};

/// Pearson correlation on the dates present in both series (>= 3 required).
Correlation correlate(const DatedValues& a, const DatedValues& b);

std::string series_csv(const IndexSeries& s);
IndexSeries parse_series_csv(std::string_view text, Frequency f = Frequency::kCustom);

/// "date,value" (or another named value column); empty field = missing.
DatedValues parse_dated_csv(std::string_view text, std::string_view value_column = "value");
std::string dated_csv(const DatedValues& v, std::string_view value_column = "value");

}  // namespace tfsi::index
