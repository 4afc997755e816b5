#include "tfsi/index.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"

namespace tfsi::index {

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

void BucketAccumulator::add(const sentiment::SentimentScore& s, const NeutralPolicy& policy) {
    const auto kept = sentiment::apply_neutral_policy(s, policy.band, policy.mode);
    if (!kept) return;
    ++n_;
    sum_.add(kept->compound);
    switch (kept->label) {
        case sentiment::Label::kPositive: ++pos_; break;
        case sentiment::Label::kNegative: ++neg_; break;
        case sentiment::Label::kNeutral: ++neu_; break;
    }
}

WindowStats BucketAccumulator::stats() const {
    WindowStats w;
    w.n = n_;
    w.n_pos = pos_;
    w.n_neg = neg_;
    w.n_neu = neu_;
    if (n_ > 0) w.tfsi = -sum_.value() / static_cast<double>(n_);
    return w;
}

WindowStats window_sentiment(std::span<const ScoredTweet> tweets, TimeWindow w, const NeutralPolicy& policy) {
    if (!(w.start < w.end)) throw Error(ErrorKind::kInvalidArgument, "window start must precede its end");
    // Sum in (time, id) order so the result does not depend on input order.
    std::vector<const ScoredTweet*> in;
    for (const auto& t : tweets) {
        if (t.local >= w.start && t.local < w.end) in.push_back(&t);
    }
    std::sort(in.begin(), in.end(), [](const ScoredTweet* a, const ScoredTweet* b) {
        return a->local != b->local ? a->local < b->local : a->id < b->id;
    });
    BucketAccumulator acc;
    for (const auto* t : in) acc.add(t->score, policy);
    return acc.stats();
}

Timeline::Timeline(std::vector<ScoredTweet> tweets) : tweets_(std::move(tweets)) {
    std::sort(tweets_.begin(), tweets_.end(), [](const ScoredTweet& a, const ScoredTweet& b) {
        return a.local != b.local ? a.local < b.local : a.id < b.id;
    });
}

std::span<const ScoredTweet> Timeline::range(TimeWindow w) const {
    const auto cmp = [](const ScoredTweet& t, LocalSeconds v) { return t.local < v; };
    const auto lo = std::lower_bound(tweets_.begin(), tweets_.end(), w.start, cmp);
    const auto hi = std::lower_bound(lo, tweets_.end(), w.end, cmp);
    return {lo, hi};
}

WindowStats Timeline::window(TimeWindow w, const NeutralPolicy& policy) const {
    if (!(w.start < w.end)) throw Error(ErrorKind::kInvalidArgument, "window start must precede its end");
    BucketAccumulator acc;
    for (const auto& t : range(w)) acc.add(t.score, policy);
    return acc.stats();
}

LocalSeconds Timeline::first() const {
    if (tweets_.empty()) throw Error(ErrorKind::kInvalidArgument, "empty timeline");
    return tweets_.front().local;
}

LocalSeconds Timeline::last() const {
    if (tweets_.empty()) throw Error(ErrorKind::kInvalidArgument, "empty timeline");
    return tweets_.back().local;
}

const char* to_string(Frequency f) {
    switch (f) {
        case Frequency::kDaily: return "daily";
        case Frequency::kWeekly: return "weekly";
        case Frequency::kMonthly: return "monthly";
        case Frequency::kCustom: return "custom";
    }
    return "custom";
}

Frequency parse_frequency(std::string_view s) {
    if (s == "daily") return Frequency::kDaily;
    if (s == "weekly") return Frequency::kWeekly;
    if (s == "monthly") return Frequency::kMonthly;
    if (s == "custom") return Frequency::kCustom;
    throw Error(ErrorKind::kConfig, "unknown frequency '" + std::string(s) + "'");
}

IndexPoint make_point(Date date, const WindowStats& w) {
    IndexPoint p;
    p.date = date;
    p.n = w.n;
    p.tfsi = w.tfsi;
    if (w.n > 0) {
        const auto n = static_cast<double>(w.n);
        p.share_pos = static_cast<double>(w.n_pos) / n;
        p.share_neg = static_cast<double>(w.n_neg) / n;
        p.share_neu = static_cast<double>(w.n_neu) / n;
        p.net_negative = (static_cast<double>(w.n_neg) - static_cast<double>(w.n_pos)) / n;
    }
    return p;
}

IndexSeries aggregate_series(std::span<const ScoredTweet> tweets, Frequency f, const NeutralPolicy& policy) {
    const auto bucket = [f](LocalSeconds t) {
        const Date d = local_date(t);
        switch (f) {
            case Frequency::kDaily: return d;
            case Frequency::kWeekly: return week_start(d);
            case Frequency::kMonthly: return month_start(d);
            case Frequency::kCustom: break;
        }
        throw Error(ErrorKind::kInvalidArgument, "aggregate_series needs daily, weekly or monthly frequency");
    };
    std::vector<const ScoredTweet*> sorted;
    sorted.reserve(tweets.size());
    for (const auto& t : tweets) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(), [](const ScoredTweet* a, const ScoredTweet* b) {
        return a->local != b->local ? a->local < b->local : a->id < b->id;
    });
    std::map<Date, BucketAccumulator> buckets;
    for (const auto* t : sorted) buckets[bucket(t->local)].add(t->score, policy);
    IndexSeries out;
    out.frequency = f;
    for (const auto& [d, acc] : buckets) out.points.push_back(make_point(d, acc.stats()));
    return out;
}

TimeWindow trading_window(Date prev_trading_day, Date day, WindowKind kind) {
    return {at_local(prev_trading_day, 16), at_local(day, kind == WindowKind::kOvernight ? 9 : 16)};
}

IndexSeries window_series(const Timeline& timeline, const std::vector<Date>& trading_days, WindowKind kind,
                          const NeutralPolicy& policy) {
    IndexSeries out;
    out.frequency = Frequency::kCustom;
    for (size_t i = 0; i < trading_days.size(); ++i) {
        const Date prev = i == 0 ? previous_weekday(trading_days[0]) : trading_days[i - 1];
        if (!(prev < trading_days[i])) throw Error(ErrorKind::kInvalidArgument, "trading days must be increasing");
        out.points.push_back(make_point(trading_days[i], timeline.window(trading_window(prev, trading_days[i], kind), policy)));
    }
    return out;
}

IndexSeries moving_average(const IndexSeries& daily, int k) {
    if (k < 1) throw Error(ErrorKind::kInvalidArgument, "moving-average window must be at least 1");
    if (daily.frequency != Frequency::kDaily) throw Error(ErrorKind::kInvalidArgument, "moving average needs a daily series");
    IndexSeries out;
    out.frequency = Frequency::kDaily;
    if (daily.points.empty()) return out;
    std::map<Date, const IndexPoint*> by_date;
    for (const auto& p : daily.points) by_date[p.date] = &p;
    const Date first = by_date.begin()->first;
    const int span_days = days_between(first, by_date.rbegin()->first);
    for (int i = 0; i <= span_days; ++i) {
        IndexPoint p;
        p.date = add_days(first, i);
        if (i >= k - 1) {
            CompensatedSum tfsi, pos, neg, neu, net;
            size_t present = 0;
            for (int j = i - k + 1; j <= i; ++j) {
                const auto it = by_date.find(add_days(first, j));
                if (it == by_date.end() || !it->second->tfsi) continue;
                ++present;
                tfsi.add(*it->second->tfsi);
                pos.add(it->second->share_pos);
                neg.add(it->second->share_neg);
                neu.add(it->second->share_neu);
                net.add(it->second->net_negative.value_or(0.0));
            }
            if (present > 0) {
                const auto m = static_cast<double>(present);
                p.n = present;
                p.tfsi = tfsi.value() / m;
                p.share_pos = pos.value() / m;
                p.share_neg = neg.value() / m;
                p.share_neu = neu.value() / m;
                p.net_negative = net.value() / m;
            }
        }
        out.points.push_back(p);
    }
    return out;
}

DatedValues tfsi_values(const IndexSeries& s) {
    DatedValues out;
    for (const auto& p : s.points) out.emplace_back(p.date, p.tfsi);
    return out;
}

DatedValues engagement_decomposition(const IndexSeries& s) {
    DatedValues out;
    for (const auto& p : s.points) out.emplace_back(p.date, p.net_negative);
    return out;
}

const char* to_string(Standardization s) { return s == Standardization::kPopulation ? "population" : "sample"; }

Standardization parse_standardization(std::string_view s) {
    if (s == "population") return Standardization::kPopulation;
    if (s == "sample") return Standardization::kSample;
    throw Error(ErrorKind::kConfig, "standardization must be 'population' or 'sample'");
}

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& x, Standardization conv) {
    if (x.size() < 2) throw Error(ErrorKind::kNumeric, "standardize needs at least two values");
    CompensatedSum s;
    for (double v : x) s.add(v);
    const double mean = s.value() / static_cast<double>(x.size());
    CompensatedSum ss;
    for (double v : x) ss.add((v - mean) * (v - mean));
    const double denom = static_cast<double>(x.size()) - (conv == Standardization::kSample ? 1.0 : 0.0);
    const double sd = std::sqrt(ss.value() / denom);
    if (!(sd > 0.0) || !std::isfinite(sd)) throw Error(ErrorKind::kNumeric, "standardize: zero variance");
    return {mean, sd};
}

}  // namespace

std::vector<double> standardize(const std::vector<double>& values, Standardization conv) {
    const auto [mean, sd] = mean_sd(values, conv);
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back((v - mean) / sd);
    return out;
}

std::vector<std::optional<double>> standardize(const std::vector<std::optional<double>>& values, Standardization conv) {
    std::vector<double> present;
    for (const auto& v : values) {
        if (v) present.push_back(*v);
    }
    const auto [mean, sd] = mean_sd(present, conv);
    std::vector<std::optional<double>> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v ? std::optional<double>((*v - mean) / sd) : std::nullopt);
    return out;
}

DatedValues standardize(const DatedValues& values, Standardization conv) {
    std::vector<std::optional<double>> v;
    for (const auto& [d, x] : values) v.push_back(x);
    const auto z = standardize(v, conv);
    DatedValues out;
    for (size_t i = 0; i < values.size(); ++i) out.emplace_back(values[i].first, z[i]);
    return out;
}

Correlation correlate(const DatedValues& a, const DatedValues& b) {
    std::map<Date, double> bm;
    for (const auto& [d, v] : b) {
        if (v) bm[d] = *v;
    }
    std::vector<double> x, y;
    for (const auto& [d, v] : a) {
        if (!v) continue;
        if (const auto it = bm.find(d); it != bm.end()) {
            x.push_back(*v);
            y.push_back(it->second);
        }
    }
    if (x.size() < 3) {
        throw Error(ErrorKind::kInvalidArgument,
                    "correlation needs at least 3 overlapping points, got " + std::to_string(x.size()));
    }
    const auto n = static_cast<double>(x.size());
    CompensatedSum sx, sy;
    for (size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    CompensatedSum sxy, sxx, syy;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy.add((x[i] - mx) * (y[i] - my));
        sxx.add((x[i] - mx) * (x[i] - mx));
        syy.add((y[i] - my) * (y[i] - my));
    }
    if (sxx.value() <= 0.0 || syy.value() <= 0.0) throw Error(ErrorKind::kNumeric, "correlation of a constant series");
    return {std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0), x.size()};
}

std::string series_csv(const IndexSeries& s) {
    std::string out = "date,tfsi,n,share_pos,share_neg,share_neu\n";
    for (const auto& p : s.points) {
        out += format_date(p.date);
        out += ',';
        if (p.tfsi) out += format_double(*p.tfsi);
        out += ',' + std::to_string(p.n) + ',';
        if (p.tfsi) {
            out += format_double(p.share_pos) + ',' + format_double(p.share_neg) + ',' + format_double(p.share_neu);
        } else {
            out += ",,";
        }
        out += '\n';
    }
    return out;
}

IndexSeries parse_series_csv(std::string_view text, Frequency f) {
    const CsvTable t = parse_csv(text);
    const size_t c_date = t.column("date"), c_tfsi = t.column("tfsi"), c_n = t.column("n");
    const size_t c_pos = t.column("share_pos"), c_neg = t.column("share_neg"), c_neu = t.column("share_neu");
    IndexSeries s;
    s.frequency = f;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            IndexPoint p;
            p.date = parse_date(row.at(c_date));
            p.tfsi = parse_optional_double(row.at(c_tfsi));
            p.n = static_cast<size_t>(parse_int(row.at(c_n)));
            if (p.tfsi) {
                p.share_pos = parse_double(row.at(c_pos));
                p.share_neg = parse_double(row.at(c_neg));
                p.share_neu = parse_double(row.at(c_neu));
                p.net_negative = p.share_neg - p.share_pos;
            }
            s.points.push_back(p);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::kParse, "series line " + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return s;
}

DatedValues parse_dated_csv(std::string_view text, std::string_view value_column) {
    const CsvTable t = parse_csv(text);
    const size_t c_date = t.column("date"), c_val = t.column(value_column);
    DatedValues out;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        try {
            const Date d = parse_date(t.rows[r].at(c_date));
            if (!out.empty() && !(out.back().first < d)) {
                throw Error(ErrorKind::kParse, "dates must be unique and increasing");
            }
            out.emplace_back(d, parse_optional_double(t.rows[r].at(c_val)));
        } catch (const std::exception& e) {
            throw Error(ErrorKind::kParse, "line " + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return out;
}

std::string dated_csv(const DatedValues& v, std::string_view value_column) {
    std::string out = "date," + std::string(value_column) + "\n";
    for (const auto& [d, x] : v) out += format_date(d) + ',' + (x ? format_double(*x) : std::string()) + '\n';
    return out;
}

}  // namespace tfsi::index
