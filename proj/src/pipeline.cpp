#include "tfsi/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <set>
#include <unordered_map>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tfsi::pipeline {

namespace {

[[noreturn]] void bad_value(std::string_view section, std::string_view key, std::string_view value) {
    throw Error(ErrorKind::kConfig,
                "[" + std::string(section) + "] " + std::string(key) + ": invalid value '" + std::string(value) + "'");
}

bool parse_bool(std::string_view section, std::string_view key, std::string_view v) {
    const std::string s = to_lower(v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    bad_value(section, key, v);
}

double parse_number(std::string_view section, std::string_view key, std::string_view v) {
    try {
        return parse_double(v);
    } catch (const Error&) {
        bad_value(section, key, v);
    }
}

long long parse_integer(std::string_view section, std::string_view key, std::string_view v) {
    try {
        return parse_int(v);
    } catch (const Error&) {
        bad_value(section, key, v);
    }
}

Date parse_day(std::string_view section, std::string_view key, std::string_view v) {
    try {
        return parse_date(v);
    } catch (const Error&) {
        bad_value(section, key, v);
    }
}

TzRule parse_tz(std::string_view section, std::string_view key, std::string_view v) {
    if (v == "new_york" || v == "america/new_york") return TzRule::kNewYork;
    if (v == "fixed_est" || v == "est") return TzRule::kFixedEst;
    bad_value(section, key, v);
}

template <class F>
auto parse_enum(std::string_view section, std::string_view key, std::string_view v, F f) {
    try {
        return f(v);
    } catch (const Error&) {
        bad_value(section, key, v);
    }
}

econometrics::CovarianceType parse_covariance(std::string_view section, std::string_view key, std::string_view v) {
    if (v == "classical") return econometrics::CovarianceType::kClassical;
    if (v == "hac") return econometrics::CovarianceType::kHac;
    if (v == "white") return econometrics::CovarianceType::kWhite;
    bad_value(section, key, v);
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    for (const auto& part : split(v, ',')) {
        std::string p = trim(part);
        if (!p.empty()) out.push_back(std::move(p));
    }
    return out;
}

bool exists(const std::string& p) { return !p.empty() && fs::is_regular_file(p); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, std::string_view file) { return (fs::path(dir) / file).string(); }

void write_json(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace

void set_option(PipelineConfig& cfg, std::string_view section, std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    const auto unknown = [&]() -> void {
        throw Error(ErrorKind::kConfig, "unknown option [" + std::string(section) + "] " + std::string(key));
    };
    if (section == "paths") {
        Paths& p = cfg.paths;
        if (key == "out") cfg.out = v;
        else if (key == "corpus") p.corpus = v;
        else if (key == "lexicon") p.lexicon = v;
        else if (key == "clusters") p.clusters = v;
        else if (key == "embeddings") p.embeddings = split_list(v);
        else if (key == "market") p.market = v;
        else if (key == "controls") p.controls = v;
        else if (key == "shocks") p.shocks = v;
        else if (key == "calendar") p.calendar = v;
        else if (key == "tenures") p.tenures = v;
        else if (key == "external_scores") p.external_scores = v;
        else if (key == "comparison") p.comparison = v;
        else unknown();
    } else if (section == "corpus") {
        if (key == "dedup") {
            if (v == "exact") cfg.dedup = corpus::DedupMode::kExact;
            else if (v == "near") cfg.dedup = corpus::DedupMode::kNear;
            else bad_value(section, key, v);
        } else if (key == "timezone") {
            cfg.tz = parse_tz(section, key, v);
        } else if (key == "malformed_budget") {
            cfg.malformed_budget = parse_number(section, key, v);
            if (!(cfg.malformed_budget >= 0.0 && cfg.malformed_budget <= 1.0)) bad_value(section, key, v);
        } else if (key == "match_mode") {
            if (v == "whole_word") cfg.match_mode = keywords::MatchMode::kWholeWord;
            else if (v == "root_prefix") cfg.match_mode = keywords::MatchMode::kRootPrefix;
            else bad_value(section, key, v);
        } else {
            unknown();
        }
    } else if (section == "sentiment") {
        if (key == "neutral_mode") cfg.neutral_mode = parse_enum(section, key, v, sentiment::parse_neutral_mode);
        else if (key == "neutral_band") {
            cfg.neutral_band = parse_number(section, key, v);
            if (!(cfg.neutral_band >= 0.0 && cfg.neutral_band < 1.0)) bad_value(section, key, v);
        } else if (key == "desentencize") cfg.desentencize = parse_bool(section, key, v);
        else unknown();
    } else if (section == "index") {
        if (key == "standardization") cfg.standardization = parse_enum(section, key, v, index::parse_standardization);
        else if (key == "ma_window") {
            cfg.ma_window = static_cast<int>(parse_integer(section, key, v));
            if (cfg.ma_window < 1) bad_value(section, key, v);
        } else if (key == "frequency") {
            const auto f = parse_enum(section, key, v, index::parse_frequency);
            if (f == index::Frequency::kCustom) bad_value(section, key, v);
            cfg.frequency = f;
        } else unknown();
    } else if (section == "econometrics") {
        if (key == "kernel") cfg.hac.kernel = parse_enum(section, key, v, econometrics::parse_kernel);
        else if (key == "bandwidth") {
            if (v.empty() || v == "auto") cfg.hac.bandwidth.reset();
            else cfg.hac.bandwidth = parse_number(section, key, v);
        } else if (key == "event_covariance") cfg.event_covariance = parse_covariance(section, key, v);
        else if (key == "spec") {
            if (!econometrics::is_known_spec(v)) bad_value(section, key, v);
            cfg.spec = v;
        } else unknown();
    } else if (section == "backtest") {
        auto& b = cfg.backtest;
        if (key == "tau") {
            b.tau = parse_number(section, key, v);
            if (!(b.tau >= 0.0)) bad_value(section, key, v);
        } else if (key == "post_cli_date") b.post_cli_start = parse_day(section, key, v);
        else if (key == "benchmark") {
            if (v == "close_to_close") b.benchmark = backtest::Benchmark::kCloseToClose;
            else if (v == "open_to_close") b.benchmark = backtest::Benchmark::kOpenToClose;
            else bad_value(section, key, v);
        } else if (key == "var_rule") {
            if (v == "lower_order") b.stats.var_rule = backtest::VarRule::kLowerOrder;
            else if (v == "interpolated") b.stats.var_rule = backtest::VarRule::kInterpolated;
            else bad_value(section, key, v);
        } else if (key == "include_flat_days") b.include_flat_days = parse_bool(section, key, v);
        else unknown();
    } else if (section == "synth") {
        auto& s = cfg.synth;
        const auto num = [&] { return parse_number(section, key, v); };
        if (key == "seed") {
            const long long n = parse_integer(section, key, v);
            if (n < 0) bad_value(section, key, v);
            s.seed = static_cast<std::uint64_t>(n);
        } else if (key == "start_date") s.start_date = parse_day(section, key, v);
        else if (key == "n_days") {
            s.n_days = static_cast<int>(parse_integer(section, key, v));
            if (s.n_days < 2) bad_value(section, key, v);
        } else if (key == "tweets_per_day") s.tweets_per_day = num();
        else if (key == "fixed_daily_count") s.fixed_daily_count = parse_bool(section, key, v);
        else if (key == "overnight_mass") s.overnight_mass = num();
        else if (key == "latent_mean") s.latent_mean = num();
        else if (key == "latent_phi") s.latent_phi = num();
        else if (key == "latent_sd") s.latent_sd = num();
        else if (key == "neutral_share") s.neutral_share = num();
        else if (key == "planted_beta_overnight") s.planted_beta_overnight = num();
        else if (key == "return_noise_sd") s.return_noise_sd = num();
        else if (key == "overnight_return_sd") s.overnight_return_sd = num();
        else if (key == "planted_shock_link") s.planted_shock_link = num();
        else if (key == "shock_base") s.shock_base = num();
        else if (key == "shock_noise_sd") s.shock_noise_sd = num();
        else if (key == "fed_share_base") s.fed_share_base = num();
        else if (key == "fomc_spike") s.fomc_spike = num();
        else if (key == "duplicate_rate") s.duplicate_rate = num();
        else if (key == "retweet_rate") s.retweet_rate = num();
        else if (key == "excluded_rate") s.excluded_rate = num();
        else if (key == "clutter_rate") s.clutter_rate = num();
        else if (key == "timezone") s.tz = parse_tz(section, key, v);
        else unknown();
    } else {
        throw Error(ErrorKind::kConfig, "unknown config section [" + std::string(section) + "]");
    }
}

PipelineConfig parse_config(std::string_view text) {
    PipelineConfig cfg;
    std::string section;
    size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = "config line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw Error(ErrorKind::kConfig, where + "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            static const std::set<std::string> known{"paths", "corpus", "sentiment", "index", "econometrics", "backtest", "synth"};
            if (!known.count(section)) throw Error(ErrorKind::kConfig, where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::kConfig, where + "expected key = value");
        if (section.empty()) throw Error(ErrorKind::kConfig, where + "option outside a section");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        try {
            set_option(cfg, section, key, std::string_view(line).substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorKind::kConfig, where + e.what());
        }
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    if (!exists(path)) throw Error(ErrorKind::kConfig, "config file not found: " + path);
    return parse_config(read_text_file(path));
}

std::string stage_dir(const PipelineConfig& cfg, std::string_view stage) { return join(cfg.out, stage); }

std::string input_path(const PipelineConfig& cfg, std::string_view name) {
    const Paths& p = cfg.paths;
    const std::string synth = stage_dir(cfg, "synth");
    const auto pick = [&](const std::string& explicit_path, std::string_view file) {
        return explicit_path.empty() ? join(synth, file) : explicit_path;
    };
    if (name == "corpus") return pick(p.corpus, "tweets.jsonl");
    if (name == "market") return pick(p.market, "market.csv");
    if (name == "controls") return pick(p.controls, "controls.csv");
    if (name == "shocks") return pick(p.shocks, "shocks.csv");
    if (name == "calendar") return pick(p.calendar, "calendar.csv");
    if (name == "tenures") return pick(p.tenures, "tenures.csv");
    if (name == "comparison") return pick(p.comparison, "comparison.csv");
    if (name == "lexicon") return p.lexicon;
    if (name == "external_scores") return p.external_scores;
    if (name == "clusters") return p.clusters.empty() ? join(stage_dir(cfg, "cluster"), "clusters.txt") : p.clusters;
    throw Error(ErrorKind::kInvalidArgument, "unknown input '" + std::string(name) + "'");
}

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"synth", "ingest", "cluster", "score", "index", "events",
                                                "regress", "backtest", "report", "all"};
    return names;
}

namespace {

// An input is "explicit" when configured by path; defaults under out/synth are
// only artifacts of the synth stage.
bool is_explicit(const PipelineConfig& cfg, std::string_view name) {
    const Paths& p = cfg.paths;
    if (name == "corpus") return !p.corpus.empty();
    if (name == "market") return !p.market.empty();
    if (name == "controls") return !p.controls.empty();
    if (name == "shocks") return !p.shocks.empty();
    if (name == "calendar") return !p.calendar.empty();
    if (name == "tenures") return !p.tenures.empty();
    if (name == "comparison") return !p.comparison.empty();
    if (name == "clusters") return !p.clusters.empty();
    return true;
}

void require_input(const PipelineConfig& cfg, std::string_view name, std::string_view stage) {
    const std::string path = input_path(cfg, name);
    if (exists(path)) return;
    // HTTP sources are checked when fetched.
    if (name == "corpus" && (path.rfind("http://", 0) == 0 || path.rfind("https://", 0) == 0)) return;
    const std::string msg = std::string(stage) + ": " + std::string(name) + " input not found: " + path;
    throw Error(ErrorKind::kConfig, msg);
}

void optional_input(const PipelineConfig& cfg, std::string_view name, std::string_view stage) {
    if (is_explicit(cfg, name) && !input_path(cfg, name).empty()) require_input(cfg, name, stage);
}

void require_artifact(const std::string& path, std::string_view stage, std::string_view producer) {
    if (!exists(path)) {
        throw Error(ErrorKind::kMissingInput, std::string(stage) + ": missing " + path + " (run '" +
                                                  std::string(producer) + "' first)");
    }
}

std::optional<std::string> present(const PipelineConfig& cfg, std::string_view name) {
    const std::string p = input_path(cfg, name);
    if (exists(p)) return p;
    return std::nullopt;
}

bool wants(const PipelineConfig& cfg, int table) {
    return !cfg.spec || cfg.spec->rfind("table" + std::to_string(table) + ".", 0) == 0;
}

}  // namespace

void validate_stage(const PipelineConfig& cfg, std::string_view stage) {
    const auto art = [&](std::string_view producer, std::string_view file) {
        require_artifact(join(stage_dir(cfg, producer), file), stage, producer);
    };
    if (stage == "synth") return;
    if (stage == "ingest") {
        require_input(cfg, "corpus", stage);
    } else if (stage == "cluster") {
        for (const auto& e : cfg.paths.embeddings) {
            if (!exists(e)) throw Error(ErrorKind::kConfig, "cluster: embeddings not found: " + e);
        }
    } else if (stage == "score") {
        optional_input(cfg, "lexicon", stage);
        optional_input(cfg, "external_scores", stage);
        if (is_explicit(cfg, "clusters")) require_input(cfg, "clusters", stage);
        else art("cluster", "clusters.txt");
        art("ingest", "clean.jsonl");
    } else if (stage == "index") {
        optional_input(cfg, "market", stage);
        optional_input(cfg, "comparison", stage);
        art("score", "scores.csv");
    } else if (stage == "events") {
        require_input(cfg, "calendar", stage);
        optional_input(cfg, "tenures", stage);
        optional_input(cfg, "shocks", stage);
        art("score", "scores.csv");
        art("ingest", "clean.jsonl");
    } else if (stage == "regress") {
        if (wants(cfg, 1) || wants(cfg, 2)) {
            require_input(cfg, "market", stage);
            require_input(cfg, "calendar", stage);
            optional_input(cfg, "controls", stage);
            art("index", "overnight.csv");
            art("index", "daily_window.csv");
        }
        if (wants(cfg, 3) || wants(cfg, 4)) art("events", "event_panel.csv");
    } else if (stage == "backtest") {
        require_input(cfg, "market", stage);
        art("index", "overnight.csv");
    } else if (stage == "report") {
        art("regress", "table1.txt");
        art("backtest", "table5.txt");
        art("index", "daily_ma7.csv");
        art("events", "fed_share_profile.csv");
    } else if (stage == "all") {
        require_input(cfg, "corpus", stage);
        require_input(cfg, "market", stage);
        require_input(cfg, "calendar", stage);
        for (const char* name : {"lexicon", "external_scores", "controls", "shocks", "tenures", "comparison", "clusters"}) {
            optional_input(cfg, name, stage);
        }
        for (const auto& e : cfg.paths.embeddings) {
            if (!exists(e)) throw Error(ErrorKind::kConfig, "all: embeddings not found: " + e);
        }
    } else {
        throw Error(ErrorKind::kConfig, "unknown stage '" + std::string(stage) + "'");
    }
}

// ---------------------------------------------------------------------------
// In-memory helpers

std::vector<index::ScoredTweet> score_tweets(const std::vector<corpus::CleanTweet>& tweets,
                                             const keywords::QueryMatcher& matcher, const sentiment::RuleScorer& scorer,
                                             bool desentencize) {
    std::vector<index::ScoredTweet> out;
    out.reserve(tweets.size());
    for (const auto& t : tweets) {
        if (!t.kept() || !matcher.matches(t.text_clean)) continue;
        const auto s = desentencize ? scorer.score(sentiment::desentencize(t.text_clean)) : scorer.score(t.text_clean);
        out.push_back({t.id(), t.eastern.local, s});
    }
    return out;
}

std::vector<Date> trading_days(const std::vector<backtest::MarketDay>& market, const index::Timeline& timeline) {
    std::vector<Date> out;
    if (!market.empty()) {
        for (const auto& m : market) out.push_back(m.date);
        return out;
    }
    if (timeline.empty()) return out;
    const Date last = local_date(timeline.last());
    for (Date d = local_date(timeline.first()); !(last < d); d = add_days(d, 1)) {
        if (is_weekday(d)) out.push_back(d);
    }
    return out;
}

econometrics::Dataset build_dataset(const std::vector<backtest::MarketDay>& market, const index::IndexSeries& overnight,
                                    const index::IndexSeries& daily, const econometrics::Dataset* controls,
                                    const std::vector<events::FomcEvent>& calendar) {
    econometrics::Dataset ds;
    for (const auto& name : econometrics::dataset_columns()) ds.columns[name];
    std::map<Date, std::optional<double>> on, dw;
    for (const auto& p : overnight.points) on[p.date] = p.tfsi;
    for (const auto& p : daily.points) dw[p.date] = p.tfsi;
    std::map<Date, size_t> ctl_row;
    if (controls) {
        for (size_t i = 0; i < controls->rows(); ++i) ctl_row[controls->dates[i]] = i;
    }
    std::set<Date> fomc;
    for (const auto& e : calendar) fomc.insert(e.statement_date);

    const auto lookup = [](const std::map<Date, std::optional<double>>& m, Date d) -> std::optional<double> {
        const auto it = m.find(d);
        return it == m.end() ? std::nullopt : it->second;
    };
    for (const auto& m : market) {
        ds.dates.push_back(m.date);
        ds.columns["sp500_open_to_close"].push_back(m.open_to_close);
        ds.columns["sp500_close_to_close"].push_back(m.has_close_to_close ? std::optional<double>(m.close_to_close) : std::nullopt);
        ds.columns["sp500_overnight"].push_back(m.has_close_to_close ? std::optional<double>(m.overnight) : std::nullopt);
        ds.columns["tfsi_overnight"].push_back(lookup(on, m.date));
        ds.columns["tfsi_daily"].push_back(lookup(dw, m.date));
        ds.columns["fomc"].push_back(fomc.count(m.date) ? 1.0 : 0.0);
        const auto it = ctl_row.find(m.date);
        for (const char* c : {"news", "hml", "smb", "mom", "vix"}) {
            std::optional<double> v;
            if (it != ctl_row.end() && controls->has(c)) v = controls->column(c)[it->second];
            ds.columns[c].push_back(v);
        }
    }
    return ds;
}

std::vector<events::EventSentiment> event_sentiment(const index::Timeline& timeline,
                                                    const std::vector<events::FomcEvent>& calendar,
                                                    const index::NeutralPolicy& policy) {
    std::vector<events::EventSentiment> out;
    for (const auto& e : calendar) {
        const auto pre = events::event_window_sentiment(timeline, e, events::WindowSide::kPre, policy);
        const auto post = events::event_window_sentiment(timeline, e, events::WindowSide::kPost, policy);
        out.push_back({e.statement_date, pre.tfsi, post.tfsi, pre.n, post.n});
    }
    return out;
}

econometrics::EventPanels event_panels(const std::vector<events::PanelRow>& rows) {
    econometrics::EventPanels out;
    for (const auto& r : rows) {
        auto& ds = out[r.kind];
        ds.dates.push_back(r.date);
        ds.columns["shock"].push_back(r.shock);
        ds.columns["tfsi_pre"].push_back(r.tfsi_pre);
        ds.columns["tfsi_post"].push_back(r.tfsi_post);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

index::NeutralPolicy policy_of(const PipelineConfig& cfg) { return {cfg.neutral_band, cfg.neutral_mode}; }

void stage_synth(const PipelineConfig& cfg) {
    const auto corpus = synthgen::generate_corpus(cfg.synth);
    const auto market = synthgen::generate_market_and_shocks(cfg.synth, corpus);
    synthgen::write_synth(stage_dir(cfg, "synth"), corpus, market);
}

void stage_ingest(const PipelineConfig& cfg) {
    corpus::LoadOptions lo;
    lo.malformed_budget = cfg.malformed_budget;
    const auto loaded = corpus::load_source(input_path(cfg, "corpus"), lo);
    corpus::IngestOptions io;
    io.tz = cfg.tz;
    io.dedup = cfg.dedup;
    const auto result = corpus::ingest(loaded, io);
    const std::string dir = stage_dir(cfg, "ingest");
    ensure_dir(dir);
    write_text_file(join(dir, "clean.jsonl"), corpus::write_clean_jsonl(result.tweets));
    write_text_file(join(dir, "stats.json"), corpus::stats_json(result.stats));
    if (!loaded.malformed_examples.empty()) {
        std::string log;
        for (const auto& m : loaded.malformed_examples) log += m + "\n";
        write_text_file(join(dir, "malformed.log"), log);
    }
}

void stage_cluster(const PipelineConfig& cfg) {
    const std::string dir = stage_dir(cfg, "cluster");
    ensure_dir(dir);
    if (cfg.paths.embeddings.empty()) {
        write_text_file(join(dir, "clusters.txt"), keywords::write_clusters(keywords::builtin_clusters()));
        std::string log = "source: built-in keyword groups\n";
        for (const auto& c : keywords::builtin_cluster_conflicts()) log += c + "\n";
        write_text_file(join(dir, "clusters.log"), log);
        return;
    }
    const auto words = keywords::all_keywords(keywords::builtin_clusters());
    std::vector<keywords::SimilarityMatrix> mats;
    std::string log;
    for (size_t i = 0; i < cfg.paths.embeddings.size(); ++i) {
        const auto table = keywords::load_embeddings(cfg.paths.embeddings[i]);
        auto m = keywords::build_similarity(table, words);
        write_text_file(join(dir, "similarity_" + std::to_string(i + 1) + ".csv"), keywords::similarity_csv(m));
        log += "source " + std::to_string(i + 1) + ": " + cfg.paths.embeddings[i] + " (" +
               std::to_string(m.words.size()) + " keywords, mean similarity " + format_fixed(m.mean, 4) + ")\n";
        for (const auto& w : m.missing) log += "  missing vector: " + w + "\n";
        mats.push_back(std::move(m));
    }
    const auto clusters = keywords::cluster_three(mats);
    write_text_file(join(dir, "clusters.txt"), keywords::write_clusters(clusters));
    write_text_file(join(dir, "clusters.log"), log);
}

std::string scores_header() { return "id,created_at_eastern,compound,pos,neg,neu,label,source\n"; }

void stage_score(const PipelineConfig& cfg) {
    const auto clean = corpus::read_clean_jsonl(join(stage_dir(cfg, "ingest"), "clean.jsonl"));
    keywords::Query q;
    q.groups = keywords::load_clusters(input_path(cfg, "clusters"));
    q.mode = cfg.match_mode;
    const keywords::QueryMatcher matcher(q);

    std::vector<const corpus::CleanTweet*> matched;
    size_t kept = 0;
    for (const auto& t : clean) {
        if (!t.kept()) continue;
        ++kept;
        if (matcher.matches(t.text_clean)) matched.push_back(&t);
    }

    std::string csv = scores_header();
    std::map<std::string, size_t> labels;
    json summary;
    const auto emit = [&](const corpus::CleanTweet& t, const sentiment::SentimentScore& s) {
        csv += csv_escape(t.id()) + ',' + format_eastern(t.eastern) + ',' + format_double(s.compound) + ',' +
               format_double(s.pos) + ',' + format_double(s.neg) + ',' + format_double(s.neu) + ',' +
               sentiment::to_string(s.label) + ',' + sentiment::to_string(s.source) + '\n';
        ++labels[sentiment::to_string(s.label)];
    };

    const std::string ext_path = input_path(cfg, "external_scores");
    if (!ext_path.empty()) {
        const auto ext = sentiment::load_external_scores(ext_path);
        std::vector<std::string> ids;
        for (const auto* t : matched) ids.push_back(t->id());
        const auto report = sentiment::join_report(ext, ids);
        for (const auto* t : matched) {
            const auto it = ext.by_id.find(t->id());
            if (it != ext.by_id.end()) emit(*t, it->second);
        }
        summary["source"] = "external";
        summary["unknown_ids"] = report.unknown_ids.size();
        summary["missing_ids"] = report.missing_ids.size();
        std::string log = "kind,id\n";
        for (const auto& id : report.missing_ids) log += "missing," + csv_escape(id) + "\n";
        for (const auto& id : report.unknown_ids) log += "unknown," + csv_escape(id) + "\n";
        ensure_dir(stage_dir(cfg, "score"));
        write_text_file(join(stage_dir(cfg, "score"), "join_report.csv"), log);
    } else {
        const sentiment::Lexicon base =
            cfg.paths.lexicon.empty() ? sentiment::default_lexicon() : sentiment::load_lexicon(cfg.paths.lexicon);
        const sentiment::Lexicon lex = sentiment::neutralize_query_terms(base, q);
        const sentiment::RuleScorer scorer(lex, {}, cfg.neutral_band);
        for (const auto* t : matched) {
            emit(*t, cfg.desentencize ? scorer.score(sentiment::desentencize(t->text_clean)) : scorer.score(t->text_clean));
        }
        summary["source"] = "rule";
    }
    summary["kept"] = kept;
    summary["matched"] = matched.size();
    summary["labels"] = labels;
    const std::string dir = stage_dir(cfg, "score");
    ensure_dir(dir);
    write_text_file(join(dir, "scores.csv"), csv);
    write_json(join(dir, "summary.json"), summary);
}

std::vector<index::ScoredTweet> read_scores(const std::string& path) {
    const CsvTable t = read_csv(path);
    const size_t c_id = t.column("id"), c_time = t.column("created_at_eastern"), c_comp = t.column("compound"),
                 c_pos = t.column("pos"), c_neg = t.column("neg"), c_neu = t.column("neu"), c_label = t.column("label"),
                 c_src = t.column("source");
    std::vector<index::ScoredTweet> out;
    out.reserve(t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        try {
            index::ScoredTweet s;
            s.id = r.at(c_id);
            s.local = parse_local(r.at(c_time));
            s.score.compound = parse_double(r.at(c_comp));
            s.score.pos = parse_double(r.at(c_pos));
            s.score.neg = parse_double(r.at(c_neg));
            s.score.neu = parse_double(r.at(c_neu));
            const auto label = sentiment::parse_label(r.at(c_label));
            if (!label) throw Error(ErrorKind::kParse, "bad label '" + r.at(c_label) + "'");
            s.score.label = *label;
            s.score.source = r.at(c_src) == "external" ? sentiment::Source::kExternal : sentiment::Source::kRule;
            out.push_back(std::move(s));
        } catch (const Error& e) {
            throw Error(ErrorKind::kParse, path + " line " + std::to_string(t.line_numbers[i]) + ": " + e.what());
        }
    }
    return out;
}

std::vector<backtest::MarketDay> read_market(const std::string& path) {
    return backtest::parse_market_csv(read_text_file(path));
}

index::DatedValues try_standardize(const index::DatedValues& v, index::Standardization conv) {
    try {
        return index::standardize(v, conv);
    } catch (const Error&) {
        index::DatedValues out = v;
        for (auto& p : out) p.second.reset();
        return out;
    }
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void stage_index(const PipelineConfig& cfg) {
    const auto scored = read_scores(join(stage_dir(cfg, "score"), "scores.csv"));
    const auto policy = policy_of(cfg);
    const std::string dir = stage_dir(cfg, "index");
    ensure_dir(dir);

    if (cfg.frequency) {
        const auto s = index::aggregate_series(scored, *cfg.frequency, policy);
        write_text_file(join(dir, std::string(index::to_string(*cfg.frequency)) + ".csv"), index::series_csv(s));
        return;
    }

    const auto daily = index::aggregate_series(scored, index::Frequency::kDaily, policy);
    const auto weekly = index::aggregate_series(scored, index::Frequency::kWeekly, policy);
    const auto monthly = index::aggregate_series(scored, index::Frequency::kMonthly, policy);
    write_text_file(join(dir, "daily.csv"), index::series_csv(daily));
    write_text_file(join(dir, "weekly.csv"), index::series_csv(weekly));
    write_text_file(join(dir, "monthly.csv"), index::series_csv(monthly));
    write_text_file(join(dir, "daily_ma7.csv"), index::series_csv(index::moving_average(daily, cfg.ma_window)));

    const index::Timeline timeline(scored);
    std::vector<backtest::MarketDay> market;
    if (const auto m = present(cfg, "market")) market = read_market(*m);
    const auto days = trading_days(market, timeline);
    write_text_file(join(dir, "overnight.csv"),
                    index::series_csv(index::window_series(timeline, days, index::WindowKind::kOvernight, policy)));
    write_text_file(join(dir, "daily_window.csv"),
                    index::series_csv(index::window_series(timeline, days, index::WindowKind::kDaily, policy)));

    // Extensive-margin decomposition against the index, both standardized.
    const auto tfsi = index::tfsi_values(monthly);
    const auto decomposition = index::engagement_decomposition(monthly);
    const auto tfsi_std = try_standardize(tfsi, cfg.standardization);
    const auto dec_std = try_standardize(decomposition, cfg.standardization);
    std::string dec = "date,tfsi,net_negative,tfsi_std,net_negative_std\n";
    for (size_t i = 0; i < tfsi.size(); ++i) {
        dec += format_date(tfsi[i].first) + ',' + opt_str(tfsi[i].second) + ',' + opt_str(decomposition[i].second) + ',' +
               opt_str(tfsi_std[i].second) + ',' + opt_str(dec_std[i].second) + '\n';
    }
    write_text_file(join(dir, "decomposition.csv"), dec);

    if (const auto c = present(cfg, "comparison")) {
        const auto other = index::parse_dated_csv(read_text_file(*c));
        const auto other_std = try_standardize(other, cfg.standardization);
        std::map<Date, std::optional<double>> o;
        for (const auto& [d, v] : other_std) o[d] = v;
        std::string cmp = "date,tfsi_std,comparison_std\n";
        for (const auto& [d, v] : tfsi_std) {
            const auto it = o.find(d);
            cmp += format_date(d) + ',' + opt_str(v) + ',' + (it == o.end() ? std::string() : opt_str(it->second)) + '\n';
        }
        write_text_file(join(dir, "comparison.csv"), cmp);
        json j;
        try {
            const auto r = index::correlate(tfsi, other);
            j["correlation"] = r.r;
            j["overlap"] = r.overlap;
        } catch (const Error& e) {
            j["correlation"] = nullptr;
            j["error"] = e.what();
        }
        write_json(join(dir, "comparison.json"), j);
    }
}

std::vector<events::ChairTenure> read_tenures(const PipelineConfig& cfg) {
    if (const auto p = present(cfg, "tenures")) return events::parse_tenures(read_text_file(*p));
    return events::default_tenures();
}

void stage_events(const PipelineConfig& cfg) {
    const auto scored = read_scores(join(stage_dir(cfg, "score"), "scores.csv"));
    const auto clean = corpus::read_clean_jsonl(join(stage_dir(cfg, "ingest"), "clean.jsonl"));
    const auto calendar = events::load_calendar(input_path(cfg, "calendar"));
    const auto tenures = read_tenures(cfg);
    const auto policy = policy_of(cfg);
    std::unordered_map<std::string, const corpus::CleanTweet*> by_id;
    for (const auto& t : clean) {
        if (t.kept()) by_id.emplace(t.id(), &t);
    }

    std::set<Date> statement_days;
    for (const auto& e : calendar) statement_days.insert(e.statement_date);
    std::vector<events::TaggedTweet> tagged;
    std::vector<std::string_view> all_texts, fomc_texts;
    for (const auto& s : scored) {
        const auto it = by_id.find(s.id);
        if (it == by_id.end()) throw Error(ErrorKind::kStage, "events: scored tweet " + s.id + " not in the clean corpus");
        const Date d = local_date(s.local);
        const std::string& text = it->second->text_clean;
        tagged.push_back({s.local, events::is_fed_related(text, d, tenures)});
        all_texts.push_back(text);
        if (statement_days.count(d)) fomc_texts.push_back(text);
    }

    const std::string dir = stage_dir(cfg, "events");
    ensure_dir(dir);
    const auto daily = events::daily_fed_counts(tagged);
    const auto profile = events::fed_share_profile(daily, calendar);
    write_text_file(join(dir, "fed_share_profile.csv"), events::profile_csv(profile));
    write_text_file(join(dir, "word_freq_all.csv"), events::frequency_csv(events::token_frequencies(all_texts)));
    write_text_file(join(dir, "word_freq_fomc.csv"), events::frequency_csv(events::token_frequencies(fomc_texts)));

    const index::Timeline timeline(scored);
    std::string ev = "date,tfsi_pre,tfsi_post,n_pre,n_post,reason_pre,reason_post\n";
    std::vector<events::EventSentiment> sentiment;
    for (const auto& e : calendar) {
        const auto pre = events::event_window_sentiment(timeline, e, events::WindowSide::kPre, policy);
        const auto post = events::event_window_sentiment(timeline, e, events::WindowSide::kPost, policy);
        sentiment.push_back({e.statement_date, pre.tfsi, post.tfsi, pre.n, post.n});
        ev += format_date(e.statement_date) + ',' + opt_str(pre.tfsi) + ',' + opt_str(post.tfsi) + ',' +
              std::to_string(pre.n) + ',' + std::to_string(post.n) + ',' + csv_escape(pre.reason) + ',' +
              csv_escape(post.reason) + '\n';
    }
    write_text_file(join(dir, "event_sentiment.csv"), ev);

    json summary;
    summary["events"] = calendar.size();
    summary["fed_share_sample_mean"] = profile.sample_mean;
    summary["partial_coverage"] = profile.partial_coverage;
    std::vector<events::PanelRow> rows;
    if (const auto p = present(cfg, "shocks")) {
        const auto shocks = events::parse_shocks(read_text_file(*p));
        for (const auto& [kind, series] : shocks) {
            const auto split = events::align_and_split(series, sentiment);
            rows.insert(rows.end(), split.rows.begin(), split.rows.end());
            json k;
            k["total"] = split.n_total;
            k["tight"] = split.n_tight();
            k["ease"] = split.n_ease();
            k["zero"] = split.n_zero;
            k["unmatched"] = split.n_unmatched;
            std::vector<std::string> off;
            for (const auto& d : events::off_calendar_dates(series, calendar)) off.push_back(format_date(d));
            k["off_calendar"] = off;
            summary["shocks"][kind] = k;
        }
    }
    write_text_file(join(dir, "event_panel.csv"), events::panel_csv(rows));
    write_json(join(dir, "summary.json"), summary);
}

econometrics::SpecOptions spec_options(const PipelineConfig& cfg) {
    econometrics::SpecOptions o;
    o.hac = cfg.hac;
    o.standardization = cfg.standardization;
    o.event_covariance = cfg.event_covariance;
    return o;
}

void stage_regress(const PipelineConfig& cfg) {
    const std::string dir = stage_dir(cfg, "regress");
    const auto opts = spec_options(cfg);
    econometrics::Dataset daily;
    econometrics::EventPanels panels;
    const bool need_daily = wants(cfg, 1) || wants(cfg, 2);
    const bool need_events = wants(cfg, 3) || wants(cfg, 4);
    if (need_daily) {
        const auto market = read_market(input_path(cfg, "market"));
        const auto overnight = index::parse_series_csv(read_text_file(join(stage_dir(cfg, "index"), "overnight.csv")));
        const auto window = index::parse_series_csv(read_text_file(join(stage_dir(cfg, "index"), "daily_window.csv")));
        const auto calendar = events::load_calendar(input_path(cfg, "calendar"));
        std::optional<econometrics::Dataset> controls;
        if (const auto p = present(cfg, "controls")) {
            controls = econometrics::parse_dataset_csv(read_text_file(*p), {"news", "hml", "smb", "mom", "vix"});
        }
        daily = build_dataset(market, overnight, window, controls ? &*controls : nullptr, calendar);
    }
    if (need_events) panels = econometrics::parse_event_panel(read_text_file(join(stage_dir(cfg, "events"), "event_panel.csv")));
    ensure_dir(dir);
    if (need_daily) write_text_file(join(dir, "dataset.csv"), econometrics::dataset_csv(daily));

    const econometrics::SpecInputs in{&daily, &panels};
    if (cfg.spec) {
        const auto r = econometrics::run_spec(*cfg.spec, in, opts);
        write_text_file(join(dir, *cfg.spec + ".csv"), econometrics::results_csv({r}));
        write_text_file(join(dir, *cfg.spec + ".txt"), econometrics::results_text(*cfg.spec, {r}));
        return;
    }

    std::string skipped = "spec,reason\n";
    std::string white = "spec,statistic,df,p_value,dropped\n";
    static const char* titles[] = {"", "Overnight sentiment and open-to-close returns",
                                   "Daily sentiment and close-to-close returns",
                                   "Pre-announcement sentiment and monetary policy shocks",
                                   "Announcement shocks and post-announcement sentiment"};
    for (int table = 1; table <= 4; ++table) {
        std::vector<econometrics::RegressionResult> results;
        for (const auto& spec : econometrics::table_spec_names(table)) {
            try {
                results.push_back(econometrics::run_spec(spec, in, opts));
            } catch (const Error& e) {
                skipped += spec + ',' + csv_escape(e.what()) + '\n';
                continue;
            }
            if (table <= 2) {
                const auto& r = results.back();
                const auto w = econometrics::white_test(r.X, r.residuals, r.names);
                std::string dropped;
                for (const auto& d : w.dropped) dropped += (dropped.empty() ? "" : ";") + d;
                white += spec + ',' + format_double(w.statistic) + ',' + std::to_string(w.df) + ',' +
                         format_double(w.p_value) + ',' + csv_escape(dropped) + '\n';
            }
        }
        const std::string name = "table" + std::to_string(table);
        write_text_file(join(dir, name + ".csv"), econometrics::results_csv(results));
        write_text_file(join(dir, name + ".txt"), econometrics::results_text(titles[table], results));
    }
    write_text_file(join(dir, "white_tests.csv"), white);
    write_text_file(join(dir, "skipped.csv"), skipped);
}

void stage_backtest(const PipelineConfig& cfg) {
    const auto market = read_market(input_path(cfg, "market"));
    const auto overnight = index::parse_series_csv(read_text_file(join(stage_dir(cfg, "index"), "overnight.csv")));
    std::vector<Date> dates;
    std::vector<std::optional<double>> values;
    for (const auto& p : overnight.points) {
        dates.push_back(p.date);
        values.push_back(p.tfsi);
    }
    const auto t5 = backtest::run_table5(market, dates, values, cfg.backtest);
    const std::string dir = stage_dir(cfg, "backtest");
    ensure_dir(dir);
    write_text_file(join(dir, "table5.csv"), backtest::table5_csv(t5));
    write_text_file(join(dir, "table5.txt"), backtest::table5_text(t5));
    std::string rets = "date,threshold,unrestricted\n";
    for (size_t i = 0; i < t5.dates.size(); ++i) {
        rets += format_date(t5.dates[i]) + ',' + format_double(t5.threshold_returns[i]) + ',' +
                format_double(t5.unrestricted_returns[i]) + '\n';
    }
    write_text_file(join(dir, "strategy_returns.csv"), rets);
    json j;
    j["days"] = t5.dates.size();
    j["tau"] = cfg.backtest.tau;
    j["post_cli_start"] = format_date(cfg.backtest.post_cli_start);
    j["post_cli_available"] = !t5.post_cli.empty();
    for (const auto& c : t5.full) {
        if (c.trade_fraction) j["trade_fraction"][c.name] = *c.trade_fraction;
    }
    write_json(join(dir, "summary.json"), j);
}

void stage_report(const PipelineConfig& cfg) {
    const std::string dir = stage_dir(cfg, "report");
    ensure_dir(dir);
    const std::vector<std::pair<std::string, std::string>> files{
        {"regress/table1.txt", "table1.txt"},
        {"regress/table2.txt", "table2.txt"},
        {"regress/table3.txt", "table3.txt"},
        {"regress/table4.txt", "table4.txt"},
        {"regress/white_tests.csv", "white_tests.csv"},
        {"backtest/table5.txt", "table5.txt"},
        {"backtest/table5.csv", "table5.csv"},
        {"index/daily_ma7.csv", "figure_daily_ma7.csv"},
        {"index/weekly.csv", "figure_weekly.csv"},
        {"index/monthly.csv", "figure_monthly.csv"},
        {"index/decomposition.csv", "figure_decomposition.csv"},
        {"index/comparison.csv", "figure_comparison.csv"},
        {"events/word_freq_all.csv", "figure_word_freq_all.csv"},
        {"events/word_freq_fomc.csv", "figure_word_freq_fomc.csv"},
        {"events/fed_share_profile.csv", "figure_fed_share_profile.csv"},
    };
    std::string manifest = "file,source\n";
    for (const auto& [src, dst] : files) {
        const std::string from = join(cfg.out, src);
        if (!exists(from)) continue;
        write_text_file(join(dir, dst), read_text_file(from));
        manifest += dst + ',' + src + '\n';
    }
    write_text_file(join(dir, "manifest.csv"), manifest);
}

}  // namespace

void run_stage(const PipelineConfig& cfg, std::string_view stage) {
    if (stage == "all") return run_all(cfg);
    validate_stage(cfg, stage);
    if (stage == "synth") stage_synth(cfg);
    else if (stage == "ingest") stage_ingest(cfg);
    else if (stage == "cluster") stage_cluster(cfg);
    else if (stage == "score") stage_score(cfg);
    else if (stage == "index") stage_index(cfg);
    else if (stage == "events") stage_events(cfg);
    else if (stage == "regress") stage_regress(cfg);
    else if (stage == "backtest") stage_backtest(cfg);
    else if (stage == "report") stage_report(cfg);
}

void run_all(const PipelineConfig& cfg) {
    validate_stage(cfg, "all");
    PipelineConfig c = cfg;
    // A restricted index or a single spec would starve later stages.
    c.frequency.reset();
    c.spec.reset();
    for (const char* s : {"ingest", "cluster", "score", "index", "events", "regress", "backtest", "report"}) run_stage(c, s);
}

}  // namespace tfsi::pipeline
