#include "tfsi/events.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"
#include "tfsi/keywords.hpp"

namespace tfsi::events {

LocalSeconds FomcEvent::statement_time() const {
    return at_local(statement_date, 0) + std::chrono::seconds(statement_seconds);
}

std::vector<FomcEvent> parse_calendar(std::string_view text) {
    const CsvTable t = parse_csv(text);
    const size_t c_date = t.column("statement_date");
    const auto c_time = t.find_column("statement_time");
    const auto c_day1 = t.find_column("meeting_day1_date");
    std::vector<FomcEvent> out;
    std::set<Date> seen;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            FomcEvent e;
            e.statement_date = parse_date(row.at(c_date));
            if (c_time && !trim(row.at(*c_time)).empty()) e.statement_seconds = parse_clock(trim(row.at(*c_time)));
            if (c_day1 && !trim(row.at(*c_day1)).empty()) e.meeting_day1 = parse_date(row.at(*c_day1));
            if (!seen.insert(e.statement_date).second) throw Error(ErrorKind::kParse, "duplicate statement date");
            out.push_back(e);
        } catch (const std::exception& ex) {
            throw Error(ErrorKind::kParse, "calendar line " + std::to_string(t.line_numbers[r]) + ": " + ex.what());
        }
    }
    std::sort(out.begin(), out.end(), [](const FomcEvent& a, const FomcEvent& b) { return a.statement_date < b.statement_date; });
    return out;
}

std::vector<FomcEvent> load_calendar(const std::string& path) { return parse_calendar(read_text_file(path)); }

std::string calendar_csv(const std::vector<FomcEvent>& events) {
    std::string out = "statement_date,statement_time,meeting_day1_date\n";
    for (const auto& e : events) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d:%02d", e.statement_seconds / 3600, e.statement_seconds / 60 % 60);
        out += format_date(e.statement_date) + ',' + buf + ',' + (e.meeting_day1 ? format_date(*e.meeting_day1) : "") + '\n';
    }
    return out;
}

const std::vector<ChairTenure>& default_tenures() {
    static const std::vector<ChairTenure> t{
        {"Bernanke", parse_date("2006-02-01"), parse_date("2014-01-31")},
        {"Yellen", parse_date("2014-02-03"), parse_date("2018-02-03")},
        {"Powell", parse_date("2018-02-05"), std::nullopt},
    };
    return t;
}

std::vector<ChairTenure> parse_tenures(std::string_view text) {
    const CsvTable t = parse_csv(text);
    const size_t c_name = t.column("name"), c_start = t.column("start_date"), c_end = t.column("end_date");
    std::vector<ChairTenure> out;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            ChairTenure c;
            c.name = trim(row.at(c_name));
            if (c.name.empty()) throw Error(ErrorKind::kParse, "empty name");
            c.start = parse_date(row.at(c_start));
            if (!trim(row.at(c_end)).empty()) c.end = parse_date(row.at(c_end));
            if (c.end && *c.end < c.start) throw Error(ErrorKind::kParse, "tenure ends before it starts");
            for (const auto& o : out) {
                if (to_lower(o.name) != to_lower(c.name)) continue;
                const bool disjoint = (o.end && *o.end < c.start) || (c.end && *c.end < o.start);
                if (!disjoint) throw Error(ErrorKind::kParse, "overlapping tenures for " + c.name);
            }
            out.push_back(c);
        } catch (const std::exception& ex) {
            throw Error(ErrorKind::kParse, "tenure line " + std::to_string(t.line_numbers[r]) + ": " + ex.what());
        }
    }
    return out;
}

std::string tenures_csv(const std::vector<ChairTenure>& t) {
    std::string out = "name,start_date,end_date\n";
    for (const auto& c : t) out += c.name + ',' + format_date(c.start) + ',' + (c.end ? format_date(*c.end) : "") + '\n';
    return out;
}

namespace {

// Case-preserving alphanumeric runs: "Fed's" -> "Fed", "s".
std::vector<std::string_view> raw_tokens(std::string_view text) {
    std::vector<std::string_view> out;
    size_t i = 0;
    const auto word = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
    while (i < text.size()) {
        while (i < text.size() && !word(static_cast<unsigned char>(text[i]))) ++i;
        size_t j = i;
        while (j < text.size() && word(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) out.push_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

bool is_fed_related(std::string_view text, Date date, const std::vector<ChairTenure>& tenures) {
    for (const auto tok : raw_tokens(text)) {
        if (tok == "Fed") return true;
        const std::string lower = to_lower(tok);
        if (lower == "reserve" || lower == "monetary") return true;
        for (const auto& c : tenures) {
            if (lower == to_lower(c.name) && c.covers(date)) return true;
        }
    }
    return false;
}

std::vector<DailyShare> daily_fed_counts(std::span<const TaggedTweet> tweets) {
    std::map<Date, DailyShare> days;
    for (const auto& t : tweets) {
        const Date d = local_date(t.local);
        auto& s = days[d];
        s.date = d;
        ++s.total;
        if (t.fed) ++s.fed;
    }
    std::vector<DailyShare> out;
    out.reserve(days.size());
    for (const auto& [d, s] : days) out.push_back(s);
    return out;
}

FedShareProfile fed_share_profile(const std::vector<DailyShare>& daily, const std::vector<FomcEvent>& events, int lo,
                                  int hi) {
    if (events.empty()) throw Error(ErrorKind::kInvalidArgument, "fed share profile needs at least one event");
    if (lo > hi) throw Error(ErrorKind::kInvalidArgument, "empty offset range");
    std::map<Date, const DailyShare*> by_date;
    size_t total = 0, fed = 0;
    for (const auto& d : daily) {
        by_date[d.date] = &d;
        total += d.total;
        fed += d.fed;
    }
    if (total == 0) throw Error(ErrorKind::kInvalidArgument, "fed share profile needs tweets");
    FedShareProfile p;
    p.sample_mean = static_cast<double>(fed) / static_cast<double>(total);
    const Date first = by_date.begin()->first;
    const Date last = by_date.rbegin()->first;
    for (int off = lo; off <= hi; ++off) {
        index::CompensatedSum sum;
        size_t n = 0;
        for (const auto& e : events) {
            const Date d = add_days(e.statement_date, off);
            if (d < first || last < d) {
                p.partial_coverage = true;
                continue;
            }
            const auto it = by_date.find(d);
            if (it == by_date.end() || it->second->total == 0) continue;
            sum.add(it->second->share());
            ++n;
        }
        p.offsets.push_back(off);
        p.n_events.push_back(n);
        p.mean_share.push_back(n ? std::optional<double>(sum.value() / static_cast<double>(n)) : std::nullopt);
    }
    return p;
}

std::string profile_csv(const FedShareProfile& p) {
    std::string out = "offset,mean_share,n_events,sample_mean\n";
    for (size_t i = 0; i < p.offsets.size(); ++i) {
        out += std::to_string(p.offsets[i]) + ',' + (p.mean_share[i] ? format_double(*p.mean_share[i]) : "") + ',' +
               std::to_string(p.n_events[i]) + ',' + format_double(p.sample_mean) + '\n';
    }
    return out;
}

index::TimeWindow event_window(const FomcEvent& e, WindowSide side) {
    const LocalSeconds stmt = e.statement_time();
    if (side == WindowSide::kPre) return {at_local(previous_weekday(e.statement_date), 16), stmt};
    const LocalSeconds close = at_local(e.statement_date, 16);
    if (!(stmt < close)) throw Error(ErrorKind::kInvalidArgument, "statement at or after 16:00 leaves no post window");
    return {stmt, close};
}

EventWindowResult event_window_sentiment(const index::Timeline& timeline, const FomcEvent& e, WindowSide side,
                                         const index::NeutralPolicy& policy) {
    EventWindowResult r;
    const auto w = event_window(e, side);
    if (timeline.empty() || w.end <= timeline.first() || timeline.last() < w.start) {
        r.reason = "outside corpus coverage";
        return r;
    }
    const auto s = timeline.window(w, policy);
    r.tfsi = s.tfsi;
    r.n = s.n;
    if (!s.tfsi) r.reason = "no tweets in window";
    return r;
}

std::map<std::string, ShockSeries> parse_shocks(std::string_view text) {
    const CsvTable t = parse_csv(text);
    const size_t c_date = t.column("date"), c_kind = t.column("kind"), c_val = t.column("value");
    std::map<std::string, ShockSeries> out;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            const std::string kind = to_lower(trim(row.at(c_kind)));
            if (kind.empty()) throw Error(ErrorKind::kParse, "empty kind");
            auto& s = out[kind];
            s.kind = kind;
            const Date d = parse_date(row.at(c_date));
            if (!s.points.emplace(d, parse_double(row.at(c_val))).second) {
                throw Error(ErrorKind::kParse, "duplicate " + kind + " shock date");
            }
        } catch (const std::exception& ex) {
            throw Error(ErrorKind::kParse, "shocks line " + std::to_string(t.line_numbers[r]) + ": " + ex.what());
        }
    }
    return out;
}

std::string shocks_csv(const std::map<std::string, ShockSeries>& shocks) {
    std::string out = "date,kind,value\n";
    for (const auto& [kind, s] : shocks) {
        for (const auto& [d, v] : s.points) out += format_date(d) + ',' + kind + ',' + format_double(v) + '\n';
    }
    return out;
}

std::vector<Date> off_calendar_dates(const ShockSeries& s, const std::vector<FomcEvent>& events) {
    std::set<Date> cal;
    for (const auto& e : events) cal.insert(e.statement_date);
    std::vector<Date> out;
    for (const auto& [d, v] : s.points) {
        if (!cal.count(d)) out.push_back(d);
    }
    return out;
}

const char* to_string(Regime r) { return r == Regime::kTight ? "tight" : "ease"; }

size_t SplitResult::n_tight() const {
    return static_cast<size_t>(std::count_if(rows.begin(), rows.end(), [](const PanelRow& r) { return r.regime == Regime::kTight; }));
}

size_t SplitResult::n_ease() const { return rows.size() - n_tight(); }

SplitResult align_and_split(const ShockSeries& shocks, const std::vector<EventSentiment>& sentiment) {
    std::map<Date, const EventSentiment*> by_date;
    for (const auto& s : sentiment) by_date[s.date] = &s;
    SplitResult out;
    for (const auto& [d, v] : shocks.points) {
        const auto it = by_date.find(d);
        if (it == by_date.end()) {
            ++out.n_unmatched;
            continue;
        }
        ++out.n_total;
        if (v == 0.0) {
            ++out.n_zero;
            continue;
        }
        PanelRow row;
        row.date = d;
        row.kind = shocks.kind;
        row.shock = v;
        row.tfsi_pre = it->second->pre;
        row.tfsi_post = it->second->post;
        row.n_pre = it->second->n_pre;
        row.n_post = it->second->n_post;
        row.regime = v > 0.0 ? Regime::kTight : Regime::kEase;
        out.rows.push_back(row);
    }
    if (out.n_total == 0) {
        throw Error(ErrorKind::kStage, "no " + shocks.kind + " shock date matches an FOMC event with sentiment");
    }
    return out;
}

std::string panel_csv(const std::vector<PanelRow>& rows) {
    std::string out = "date,kind,shock,tfsi_pre,tfsi_post,n_pre,n_post,regime\n";
    for (const auto& r : rows) {
        out += format_date(r.date) + ',' + r.kind + ',' + format_double(r.shock) + ',' +
               (r.tfsi_pre ? format_double(*r.tfsi_pre) : "") + ',' + (r.tfsi_post ? format_double(*r.tfsi_post) : "") +
               ',' + std::to_string(r.n_pre) + ',' + std::to_string(r.n_post) + ',' + to_string(r.regime) + '\n';
    }
    return out;
}

namespace {

const std::unordered_set<std::string>& stop_words() {
    static const std::unordered_set<std::string> s{
        "a",    "an",   "and",  "are",   "as",   "at",   "be",   "been", "but",  "by",   "for",  "from", "has",
        "have", "he",   "her",  "his",   "i",    "if",   "in",   "into", "is",   "it",   "its",  "me",   "my",
        "not",  "of",   "on",   "or",    "our",  "she",  "so",   "that", "the",  "their", "them", "there", "they",
        "this", "to",   "up",   "was",   "we",   "were", "what", "when", "which", "who",  "will", "with", "you",
        "your", "all",  "just", "about", "than", "then", "too",  "very", "can",  "do",   "does", "did",  "s",
        "t",    "amp",  "rt",   "out",   "more", "no",   "now",  "new",  "how",  "why",  "get",  "got",  "one"};
    return s;
}

}  // namespace

TokenCounts token_frequencies(const std::vector<std::string_view>& texts, size_t top_n) {
    std::unordered_map<std::string, size_t> counts;
    for (const auto text : texts) {
        for (auto& tok : keywords::tokenize(text)) {
            if (tok.size() < 2 || stop_words().count(tok)) continue;
            if (std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
            ++counts[tok];
        }
    }
    TokenCounts out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (out.size() > top_n) out.resize(top_n);
    return out;
}

std::string frequency_csv(const TokenCounts& counts) {
    std::string out = "token,count\n";
    for (const auto& [tok, n] : counts) out += csv_escape(tok) + ',' + std::to_string(n) + '\n';
    return out;
}

}  // namespace tfsi::events
