#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tfsi/index.hpp"
#include "tfsi/timeutil.hpp"

namespace tfsi::events {

struct FomcEvent {
    Date statement_date{};
    int statement_seconds = 14 * 3600;  // Eastern wall clock
    std::optional<Date> meeting_day1;   // stored, not used by the windows

    LocalSeconds statement_time() const;
};

/// "statement_date,statement_time,meeting_day1_date"; an empty time means 14:00.
std::vector<FomcEvent> parse_calendar(std::string_view text);
std::vector<FomcEvent> load_calendar(const std::string& path);
std::string calendar_csv(const std::vector<FomcEvent>& events);

struct ChairTenure {
    std::string name;
    Date start{};
    std::optional<Date> end;  // open-ended when unset

    bool covers(Date d) const { return d >= start && (!end || d <= *end); }
};

const std::vector<ChairTenure>& default_tenures();
/// "name,start_date,end_date"; ranges for one name must not overlap.
std::vector<ChairTenure> parse_tenures(std::string_view text);
std::string tenures_csv(const std::vector<ChairTenure>& t);

/// "Fed" as a case-sensitive token, "Reserve"/"monetary" as case-insensitive
/// tokens, or a chair name whose tenure covers `date`.
bool is_fed_related(std::string_view text, Date date, const std::vector<ChairTenure>& tenures);

struct TaggedTweet {
    LocalSeconds local{};
    bool fed = false;
};

struct DailyShare {
    Date date{};
    std::size_t total = 0;
    std::size_t fed = 0;
    double share() const { return total ? static_cast<double>(fed) / static_cast<double>(total) : 0.0; }
};

std::vector<DailyShare> daily_fed_counts(std::span<const TaggedTweet> tweets);

struct FedShareProfile {
    std::vector<int> offsets;
    std::vector<std::optional<double>> mean_share;  // mean over events with tweets that day
    std::vector<std::size_t> n_events;
    /// Total Fed-related tweets over total tweets.
    double sample_mean = 0.0;
    /// Some event offset fell outside the covered date range.
    bool partial_coverage = false;
};

FedShareProfile fed_share_profile(const std::vector<DailyShare>& daily, const std::vector<FomcEvent>& events,
                                  int lo = -7, int hi = 7);
std::string profile_csv(const FedShareProfile& p);

enum class WindowSide { kPre, kPost };

/// pre: [previous weekday 16:00, statement); post: [statement, 16:00).
index::TimeWindow event_window(const FomcEvent& e, WindowSide side);

struct EventWindowResult {
    std::optional<double> tfsi;
    std::size_t n = 0;
    std::string reason;  // why the value is missing
};

EventWindowResult event_window_sentiment(const index::Timeline& timeline, const FomcEvent& e, WindowSide side,
                                         const index::NeutralPolicy& policy = {});

struct ShockSeries {
    std::string kind;  // mar, jk, bs
    std::map<Date, double> points;
};

/// "date,kind,value" grouped by lower-cased kind.
std::map<std::string, ShockSeries> parse_shocks(std::string_view text);
std::string shocks_csv(const std::map<std::string, ShockSeries>& shocks);
/// Shock dates that are not statement dates.
std::vector<Date> off_calendar_dates(const ShockSeries& s, const std::vector<FomcEvent>& events);

struct EventSentiment {
    Date date{};
    std::optional<double> pre;
    std::optional<double> post;
    std::size_t n_pre = 0;
    std::size_t n_post = 0;
};

enum class Regime { kTight, kEase };
const char* to_string(Regime r);

struct PanelRow {
    Date date{};
    std::string kind;
    double shock = 0.0;
    std::optional<double> tfsi_pre;
    std::optional<double> tfsi_post;
    std::size_t n_pre = 0;
    std::size_t n_post = 0;
    Regime regime = Regime::kTight;
};

struct SplitResult {
    std::vector<PanelRow> rows;
    std::size_t n_total = 0;      // shocks joined to an event
    std::size_t n_zero = 0;       // excluded exact zeros
    std::size_t n_unmatched = 0;  // shocks without an event
    std::size_t n_tight() const;
    std::size_t n_ease() const;
};

/// tight iff shock > 0, ease iff shock < 0; zeros are excluded and counted.
SplitResult align_and_split(const ShockSeries& shocks, const std::vector<EventSentiment>& sentiment);

std::string panel_csv(const std::vector<PanelRow>& rows);

using TokenCounts = std::vector<std::pair<std::string, std::size_t>>;

/// Top-n lower-cased tokens (stop words, numbers and one-letter tokens removed),
/// by count then alphabetically.
TokenCounts token_frequencies(const std::vector<std::string_view>& texts, std::size_t top_n = 100);
std::string frequency_csv(const TokenCounts& counts);

}  // namespace tfsi::events
