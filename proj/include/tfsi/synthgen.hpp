#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tfsi/corpus.hpp"
#include "tfsi/events.hpp"
#include "tfsi/timeutil.hpp"

namespace tfsi::synthgen {

/// mt19937_64 with explicitly specified transforms so draws are identical on
/// every platform (std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    /// [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    /// Box-Muller.
    double normal();
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);
    /// Count of unit-rate exponential arrivals before `mean`.
    int poisson(double mean);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer; derives independent stream seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct GeneratorConfig {
    std::uint64_t seed = 1;
    Date start_date = Date{std::chrono::year{2014}, std::chrono::month{9}, std::chrono::day{1}};
    int n_days = 1000;  // trading days (weekdays)
    double tweets_per_day = 35.0;
    bool fixed_daily_count = false;  // exact count instead of Poisson
    /// Share of a weekday's tweets outside 09:00-16:00.
    double overnight_mass = 0.7;

    // Latent positivity per trading-day period, rolling over at 16:00.
    double latent_mean = 0.0;
    double latent_phi = 0.9;
    double latent_sd = 0.7;
    double neutral_share = 0.2;

    double planted_beta_overnight = -0.06;  // % per 1 s.d. of overnight latent TFSI
    double return_noise_sd = 1.0;
    double overnight_return_sd = 0.5;

    double planted_shock_link = 0.5;  // tight shocks per 1 s.d. of pre-window latent TFSI
    double shock_base = 1.5;
    double shock_noise_sd = 0.5;

    double fed_share_base = 0.10;
    double fomc_spike = 0.30;

    // Records that ingestion must remove.
    double duplicate_rate = 0.01;
    double retweet_rate = 0.01;
    double excluded_rate = 0.005;
    /// Share of tweets decorated with mentions, links and HTML entities.
    double clutter_rate = 0.2;

    TzRule tz = TzRule::kNewYork;
};

struct DayTruth {
    Date date{};
    std::size_t tweets = 0;  // tweets that survive ingestion
    std::size_t fed = 0;
};

struct SynthCorpus {
    std::vector<corpus::RawTweet> tweets;  // ordered by (created_at, id)
    std::vector<Date> trading_days;
    std::vector<double> latent;       // positivity per trading day
    std::vector<double> latent_tfsi;  // standardized -latent
    std::vector<DayTruth> day_truth;
    std::vector<events::FomcEvent> events;
};

struct MarketRow {
    Date date{};
    double open = 0.0;
    double close = 0.0;
};

struct ControlRow {
    Date date{};
    double news = 0.0, hml = 0.0, smb = 0.0, mom = 0.0, vix = 0.0;
};

struct SynthMarket {
    std::vector<MarketRow> prices;
    std::vector<ControlRow> controls;
    std::map<std::string, events::ShockSeries> shocks;
    /// Monthly comparison series loosely tracking the latent index.
    std::vector<std::pair<Date, double>> comparison;
};

SynthCorpus generate_corpus(const GeneratorConfig& cfg);
SynthMarket generate_market_and_shocks(const GeneratorConfig& cfg, const SynthCorpus& corpus);

/// Template vocabulary, exposed for tests.
struct Vocabulary {
    std::vector<std::string> actors, objects, modifiers;
    std::vector<std::string> positive, negative, neutral;
    std::vector<std::string> patterns, fed_patterns;  // {a} {o} {m} {s} placeholders
};
const Vocabulary& vocabulary();
std::string fill(const std::string& pattern, const std::string& a, const std::string& o, const std::string& m,
                 const std::string& s);

/// "date,open,close" and "date,news,hml,smb,mom,vix" as written to disk.
std::string market_csv(const SynthMarket& market);
std::string controls_csv(const SynthMarket& market);

/// Writes tweets.jsonl, market.csv, controls.csv, calendar.csv, shocks.csv,
/// tenures.csv, latent.csv, daily_truth.csv and comparison.csv into `dir`.
void write_synth(const std::string& dir, const SynthCorpus& corpus, const SynthMarket& market);

}  // namespace tfsi::synthgen
