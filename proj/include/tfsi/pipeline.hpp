#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfsi/backtest.hpp"
#include "tfsi/corpus.hpp"
#include "tfsi/econometrics.hpp"
#include "tfsi/events.hpp"
#include "tfsi/index.hpp"
#include "tfsi/keywords.hpp"
#include "tfsi/sentiment.hpp"
#include "tfsi/synthgen.hpp"

namespace tfsi::pipeline {

/// Input locations. Empty = the default under <out>/synth (optional inputs are
/// skipped when the default file is absent).
struct Paths {
    std::string corpus, lexicon, clusters, market, controls, shocks, calendar, tenures, external_scores, comparison;
    std::vector<std::string> embeddings;
};

struct PipelineConfig {
    std::string out = "out";
    Paths paths;

    corpus::DedupMode dedup = corpus::DedupMode::kExact;
    TzRule tz = TzRule::kNewYork;
    double malformed_budget = 0.01;
    keywords::MatchMode match_mode = keywords::MatchMode::kWholeWord;

    sentiment::NeutralMode neutral_mode = sentiment::NeutralMode::kZero;
    double neutral_band = 0.1;
    bool desentencize = false;

    index::Standardization standardization = index::Standardization::kPopulation;
    int ma_window = 7;
    std::optional<index::Frequency> frequency;  // restricts the index stage to one calendar series

    econometrics::HacOptions hac;
    econometrics::CovarianceType event_covariance = econometrics::CovarianceType::kClassical;
    std::optional<std::string> spec;

    backtest::Table5Options backtest;

    synthgen::GeneratorConfig synth;
};

/// "key = value" lines under [paths], [corpus], [sentiment], [index],
/// [econometrics], [backtest], [synth]; '#' starts a comment. Unknown sections
/// or keys throw kConfig.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::string& path);
/// Applies one option, as from the file; used for command-line overrides too.
void set_option(PipelineConfig& cfg, std::string_view section, std::string_view key, std::string_view value);

/// Resolved input path (explicit or default).
std::string input_path(const PipelineConfig& cfg, std::string_view name);
/// Directory of a stage's artifacts: <out>/<stage>.
std::string stage_dir(const PipelineConfig& cfg, std::string_view stage);

const std::vector<std::string>& stage_names();
/// Checks every input the stage needs before any work: explicitly configured
/// external inputs that are absent throw kConfig, missing artifacts of an
/// earlier stage throw kMissingInput.
void validate_stage(const PipelineConfig& cfg, std::string_view stage);
void run_stage(const PipelineConfig& cfg, std::string_view stage);
/// ingest, cluster, score, index, events, regress, backtest, report.
void run_all(const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// In-memory building blocks shared by the stages and the simulations.

/// Kept tweets matching the query, scored by the rule engine.
std::vector<index::ScoredTweet> score_tweets(const std::vector<corpus::CleanTweet>& tweets,
                                             const keywords::QueryMatcher& matcher, const sentiment::RuleScorer& scorer,
                                             bool desentencize = false);

/// Trading days of the market file, or weekdays spanning the timeline.
std::vector<Date> trading_days(const std::vector<backtest::MarketDay>& market, const index::Timeline& timeline);

/// Daily analysis dataset on the market's trading days.
econometrics::Dataset build_dataset(const std::vector<backtest::MarketDay>& market, const index::IndexSeries& overnight,
                                    const index::IndexSeries& daily, const econometrics::Dataset* controls,
                                    const std::vector<events::FomcEvent>& calendar);

/// Pre/post announcement sentiment for every calendar event.
std::vector<events::EventSentiment> event_sentiment(const index::Timeline& timeline,
                                                    const std::vector<events::FomcEvent>& calendar,
                                                    const index::NeutralPolicy& policy);

/// Converts aligned panel rows to the regression panels keyed by kind.
econometrics::EventPanels event_panels(const std::vector<events::PanelRow>& rows);

}  // namespace tfsi::pipeline
