#include "tfsi/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"
#include "tfsi/index.hpp"

namespace tfsi::synthgen {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::kInvalidArgument, "Rng::below(0)");
    return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
}

int Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "poisson mean must be >= 0");
    int k = 0;
    double t = 0.0;
    while (true) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        t += -std::log(u);
        if (t > mean) return k;
        ++k;
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

const Vocabulary& vocabulary() {
    static const Vocabulary v{
        {"corporate", "company", "municipal", "sovereign", "junk", "high yield", "investment grade", "money markets",
         "subsidiary", "collateral"},
        {"bond", "bonds", "loan", "loans", "mortgage", "mortgages", "pension", "portfolio", "fund", "funds", "financing",
         "debenture", "cash", "currency"},
        {"coupon", "coupons", "rate", "rates", "yield", "yields", "downgrade", "upgrade", "liquidity", "repayment",
         "lending", "default", "term"},
        {"great news and strong demand", "excellent progress, happy investors", "feeling confident and optimistic",
         "very good outlook, great momentum", "strong recovery, excellent results", "happy traders, solid gains"},
        {"terrible news and weak demand", "awful numbers, worried investors", "panic spreading, ugly selloff",
         "very bad outlook, fear is rising", "weak recovery, terrible results", "worried traders, painful losses"},
        {"details at noon", "report released", "scheduled review", "levels unchanged", "numbers out this morning",
         "analysts publish notes"},
        {"{a} {o} {m} {s}", "{s}: {a} {o} {m} this week", "watching {a} {o} {m} today, {s}", "{a} {o} {m} update, {s}",
         "{s} as {a} {o} {m} moves"},
        {"Fed watch: {a} {o} {m} {s}", "the Fed and {a} {o} {m}, {s}", "{a} {o} {m} after the Fed, {s}",
         "monetary policy and {a} {o} {m}: {s}"},
    };
    return v;
}

std::string fill(const std::string& pattern, const std::string& a, const std::string& o, const std::string& m,
                 const std::string& s) {
    std::string out;
    out.reserve(pattern.size() + a.size() + o.size() + m.size() + s.size());
    for (size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] == '{' && i + 2 < pattern.size() && pattern[i + 2] == '}') {
            switch (pattern[i + 1]) {
                case 'a': out += a; i += 2; continue;
                case 'o': out += o; i += 2; continue;
                case 'm': out += m; i += 2; continue;
                case 's': out += s; i += 2; continue;
                default: break;
            }
        }
        out += pattern[i];
    }
    return out;
}

namespace {

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[rng.below(v.size())];
}

std::vector<Date> make_trading_days(Date start, int n) {
    if (n < 2) throw Error(ErrorKind::kConfig, "synth: n_days must be at least 2");
    std::vector<Date> out;
    Date d = start;
    while (static_cast<int>(out.size()) < n) {
        if (is_weekday(d)) out.push_back(d);
        d = add_days(d, 1);
    }
    return out;
}

std::vector<events::FomcEvent> make_events(Rng& rng, const std::vector<Date>& days) {
    std::vector<events::FomcEvent> out;
    Date d = add_days(days.front(), 14);
    while (std::chrono::weekday{std::chrono::sys_days{d}} != std::chrono::Wednesday) d = add_days(d, 1);
    while (!(days.back() < d)) {
        events::FomcEvent e;
        e.statement_date = d;
        e.meeting_day1 = add_days(d, -1);
        out.push_back(e);
        d = add_days(d, rng.bernoulli(0.5) ? 42 : 49);
    }
    return out;
}

std::string safe_digits(Rng& rng, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += static_cast<char>('0' + rng.below(10));
    return s;
}

void validate(const GeneratorConfig& cfg) {
    const auto prob = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kConfig, std::string("synth: ") + what + " must lie in [0, 1]");
    };
    prob(cfg.overnight_mass, "overnight_mass");
    prob(cfg.neutral_share, "neutral_share");
    prob(cfg.fed_share_base, "fed_share_base");
    prob(cfg.fomc_spike, "fomc_spike");
    prob(cfg.duplicate_rate, "duplicate_rate");
    prob(cfg.retweet_rate, "retweet_rate");
    prob(cfg.excluded_rate, "excluded_rate");
    prob(cfg.clutter_rate, "clutter_rate");
    if (!(cfg.tweets_per_day >= 0.0)) throw Error(ErrorKind::kConfig, "synth: tweets_per_day must be >= 0");
    if (!(std::fabs(cfg.latent_phi) < 1.0)) throw Error(ErrorKind::kConfig, "synth: latent_phi must lie in (-1, 1)");
    if (!(cfg.latent_sd > 0.0)) throw Error(ErrorKind::kConfig, "synth: latent_sd must be > 0");
}

}  // namespace

SynthCorpus generate_corpus(const GeneratorConfig& cfg) {
    validate(cfg);
    const Vocabulary& voc = vocabulary();
    SynthCorpus out;
    out.trading_days = make_trading_days(cfg.start_date, cfg.n_days);
    const size_t n = out.trading_days.size();

    Rng latent_rng(mix_seed(cfg.seed, 0));
    out.latent.resize(n + 1);
    out.latent[0] = cfg.latent_mean + cfg.latent_sd / std::sqrt(1.0 - cfg.latent_phi * cfg.latent_phi) * latent_rng.normal();
    for (size_t t = 1; t <= n; ++t) {
        out.latent[t] = cfg.latent_mean + cfg.latent_phi * (out.latent[t - 1] - cfg.latent_mean) + cfg.latent_sd * latent_rng.normal();
    }
    std::vector<double> neg(n);
    for (size_t t = 0; t < n; ++t) neg[t] = -out.latent[t];
    out.latent_tfsi = index::standardize(neg);
    out.latent.resize(n);

    Rng event_rng(mix_seed(cfg.seed, 1));
    out.events = make_events(event_rng, out.trading_days);
    std::vector<Date> statement_dates;
    for (const auto& e : out.events) statement_dates.push_back(e.statement_date);

    std::vector<LocalSeconds> closes;
    closes.reserve(n);
    for (const auto& d : out.trading_days) closes.push_back(at_local(d, 16));

    Rng rng(mix_seed(cfg.seed, 2));
    std::uint64_t serial = 0;
    const auto next_id = [&serial] { return std::to_string(1000000000ULL + serial++); };
    const auto engagement = [&rng](corpus::RawTweet& t) {
        t.retweet_count = rng.poisson(2.0);
        t.reply_count = rng.poisson(1.0);
        t.like_count = rng.poisson(5.0);
    };

    const Date first = previous_weekday(out.trading_days.front());
    const int span = days_between(first, out.trading_days.back());
    for (int di = 0; di <= span; ++di) {
        const Date day = add_days(first, di);
        const bool weekday = is_weekday(day);
        const int count = cfg.fixed_daily_count ? static_cast<int>(std::lround(cfg.tweets_per_day)) : rng.poisson(cfg.tweets_per_day);
        const bool fomc = std::binary_search(statement_dates.begin(), statement_dates.end(), day);
        const double share = fomc ? cfg.fomc_spike : cfg.fed_share_base;
        const auto n_fed = static_cast<size_t>(std::llround(share * count));

        std::vector<size_t> order(static_cast<size_t>(count));
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (size_t i = 0; i < n_fed && i + 1 < order.size(); ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
        std::vector<bool> is_fed(order.size(), false);
        for (size_t i = 0; i < n_fed && i < order.size(); ++i) is_fed[order[i]] = true;

        out.day_truth.push_back({day, static_cast<size_t>(count), std::min(n_fed, static_cast<size_t>(count))});

        for (int i = 0; i < count; ++i) {
            int secs = 0;
            if (!weekday) {
                secs = static_cast<int>(rng.uniform() * 86400.0);
            } else if (rng.bernoulli(cfg.overnight_mass)) {
                secs = static_cast<int>(rng.uniform() * 17.0 * 3600.0);
                if (secs >= 9 * 3600) secs += 7 * 3600;
            } else {
                secs = 9 * 3600 + static_cast<int>(rng.uniform() * 7.0 * 3600.0);
            }
            const LocalSeconds local = at_local(day, 0) + std::chrono::seconds(secs);
            const auto period = static_cast<size_t>(std::upper_bound(closes.begin(), closes.end(), local) - closes.begin());
            const double z = period < n ? out.latent[period] : out.latent[n - 1];

            const std::string* phrase = nullptr;
            if (rng.bernoulli(cfg.neutral_share)) {
                phrase = &pick(rng, voc.neutral);
            } else if (rng.bernoulli(1.0 / (1.0 + std::exp(-z)))) {
                phrase = &pick(rng, voc.positive);
            } else {
                phrase = &pick(rng, voc.negative);
            }
            const auto& pattern = is_fed[static_cast<size_t>(i)] ? pick(rng, voc.fed_patterns) : pick(rng, voc.patterns);
            const auto& a = pick(rng, voc.actors);
            const auto& o = pick(rng, voc.objects);
            const auto& m = pick(rng, voc.modifiers);
            corpus::RawTweet t;
            t.id = next_id();
            std::string text = fill(pattern, a, o, m, *phrase) + " #" + std::to_string(serial);
            if (rng.bernoulli(cfg.clutter_rate)) {
                switch (rng.below(4)) {
                    case 0: text = "@macro_desk " + text; break;
                    case 1: text += " https://t.co/" + safe_digits(rng, 8); break;
                    case 2: text = "&quot;" + text + "&quot;"; break;
                    default: text = "  " + text + "   via @rates_wire"; break;
                }
            }
            t.text = std::move(text);
            t.created_at = from_eastern(local, cfg.tz);
            t.author_id = "u" + std::to_string(rng.below(5000));
            engagement(t);
            if (rng.bernoulli(0.3)) t.possibly_sensitive = false;

            if (rng.bernoulli(cfg.retweet_rate)) {
                corpus::RawTweet rt = t;
                rt.id = next_id();
                rt.is_retweet = true;
                rt.text = "RT " + t.text;
                out.tweets.push_back(std::move(rt));
            }
            if (rng.bernoulli(cfg.duplicate_rate)) {
                corpus::RawTweet dup = t;
                dup.id = next_id();
                dup.created_at = t.created_at + std::chrono::seconds(60 + static_cast<int>(rng.uniform() * 6 * 3600));
                dup.author_id = "u" + std::to_string(rng.below(5000));
                out.tweets.push_back(std::move(dup));
            }
            if (rng.bernoulli(cfg.excluded_rate)) {
                corpus::RawTweet ex = t;
                ex.id = next_id();
                ex.text = rng.bernoulli(0.5) ? fill("{a} {o} {m} crypto pump", a, o, m, "")
                                             : fill("credit card {o} {m} offer for {a} clients", a, o, m, "");
                ex.text += " #" + std::to_string(serial);
                out.tweets.push_back(std::move(ex));
            }
            out.tweets.push_back(std::move(t));
        }
    }
    std::sort(out.tweets.begin(), out.tweets.end(), [](const corpus::RawTweet& x, const corpus::RawTweet& y) {
        return x.created_at != y.created_at ? x.created_at < y.created_at : x.id < y.id;
    });
    return out;
}

SynthMarket generate_market_and_shocks(const GeneratorConfig& cfg, const SynthCorpus& corpus) {
    SynthMarket out;
    const size_t n = corpus.trading_days.size();
    if (corpus.latent_tfsi.size() != n) throw Error(ErrorKind::kInvalidArgument, "synth: latent path does not match trading days");

    Rng mkt(mix_seed(cfg.seed, 3));
    double close = 2000.0;
    for (size_t t = 0; t < n; ++t) {
        const double overnight = cfg.overnight_return_sd * mkt.normal();
        const double o2c = cfg.planted_beta_overnight * corpus.latent_tfsi[t] + cfg.return_noise_sd * mkt.normal();
        const double open = close * (1.0 + overnight / 100.0);
        close = open * (1.0 + o2c / 100.0);
        out.prices.push_back({corpus.trading_days[t], open, close});
    }

    Rng ctl(mix_seed(cfg.seed, 4));
    double news = 0.0, vix = 18.0;
    for (size_t t = 0; t < n; ++t) {
        news = 0.8 * news + 0.6 * ctl.normal();
        vix = std::max(9.0, 18.0 + 0.95 * (vix - 18.0) + 1.0 * ctl.normal());
        ControlRow c;
        c.date = corpus.trading_days[t];
        c.news = news;
        c.hml = 0.5 * ctl.normal();
        c.smb = 0.5 * ctl.normal();
        c.mom = 0.5 * ctl.normal();
        c.vix = vix;
        out.controls.push_back(c);
    }

    Rng shk(mix_seed(cfg.seed, 5));
    for (const char* kind : {"mar", "jk", "bs"}) out.shocks[kind].kind = kind;
    for (const auto& e : corpus.events) {
        const auto it = std::lower_bound(corpus.trading_days.begin(), corpus.trading_days.end(), e.statement_date);
        if (it == corpus.trading_days.end() || *it != e.statement_date) continue;
        const double x = corpus.latent_tfsi[static_cast<size_t>(it - corpus.trading_days.begin())];
        const bool tight = shk.bernoulli(0.5);
        for (const char* kind : {"mar", "jk", "bs"}) {
            const double noise = cfg.shock_noise_sd * shk.normal();
            const double v = tight ? std::fabs(cfg.shock_base + cfg.planted_shock_link * x + noise)
                                   : -std::fabs(cfg.shock_base + noise);
            out.shocks[kind].points[e.statement_date] = v;
        }
    }

    Rng cmp(mix_seed(cfg.seed, 6));
    std::map<Date, std::pair<double, int>> months;
    for (size_t t = 0; t < n; ++t) {
        auto& m = months[month_start(corpus.trading_days[t])];
        m.first += corpus.latent_tfsi[t];
        ++m.second;
    }
    for (const auto& [d, m] : months) out.comparison.emplace_back(d, m.first / m.second + 0.3 * cmp.normal());
    return out;
}

std::string market_csv(const SynthMarket& market) {
    std::string out = "date,open,close\n";
    for (const auto& p : market.prices) out += format_date(p.date) + ',' + format_double(p.open) + ',' + format_double(p.close) + '\n';
    return out;
}

std::string controls_csv(const SynthMarket& market) {
    std::string out = "date,news,hml,smb,mom,vix\n";
    for (const auto& c : market.controls) {
        out += format_date(c.date) + ',' + format_double(c.news) + ',' + format_double(c.hml) + ',' +
               format_double(c.smb) + ',' + format_double(c.mom) + ',' + format_double(c.vix) + '\n';
    }
    return out;
}

void write_synth(const std::string& dir, const SynthCorpus& corpus, const SynthMarket& market) {
    std::filesystem::create_directories(dir);
    std::string tweets;
    for (const auto& t : corpus.tweets) tweets += corpus::serialize_raw_tweet(t) + '\n';
    write_text_file(dir + "/tweets.jsonl", tweets);

    write_text_file(dir + "/market.csv", market_csv(market));
    write_text_file(dir + "/controls.csv", controls_csv(market));

    write_text_file(dir + "/calendar.csv", events::calendar_csv(corpus.events));
    write_text_file(dir + "/shocks.csv", events::shocks_csv(market.shocks));
    write_text_file(dir + "/tenures.csv", events::tenures_csv(events::default_tenures()));

    std::string latent = "date,latent,latent_tfsi\n";
    for (size_t t = 0; t < corpus.trading_days.size(); ++t) {
        latent += format_date(corpus.trading_days[t]) + ',' + format_double(corpus.latent[t]) + ',' +
                  format_double(corpus.latent_tfsi[t]) + '\n';
    }
    write_text_file(dir + "/latent.csv", latent);

    std::string truth = "date,tweets,fed\n";
    for (const auto& d : corpus.day_truth) truth += format_date(d.date) + ',' + std::to_string(d.tweets) + ',' + std::to_string(d.fed) + '\n';
    write_text_file(dir + "/daily_truth.csv", truth);

    std::string comparison = "date,value\n";
    for (const auto& [d, v] : market.comparison) comparison += format_date(d) + ',' + format_double(v) + '\n';
    write_text_file(dir + "/comparison.csv", comparison);
}

}  // namespace tfsi::synthgen
