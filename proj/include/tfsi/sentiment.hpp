#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tfsi/keywords.hpp"

namespace tfsi::sentiment {

enum class Label { kPositive, kNegative, kNeutral };
enum class Source { kRule, kExternal };

const char* to_string(Label l);
const char* to_string(Source s);
std::optional<Label> parse_label(std::string_view s);

struct SentimentScore {
    double pos = 0.0;
    double neg = 0.0;
    double neu = 0.0;
    double compound = 0.0;
    Label label = Label::kNeutral;
    Source source = Source::kRule;
};

/// Heuristic constants of the rule engine.
struct RuleConstants {
    double booster_increment = 0.293;
    double negation_scalar = -0.74;
    /// Added to the magnitude of an ALL-CAPS word when other words are not all caps.
    double caps_increment = 0.733;
    double alpha = 15.0;
    double exclamation_increment = 0.292;
    int max_exclamations = 4;
    double question_increment = 0.18;
    double question_cap = 0.96;
    double but_before = 0.5;
    double but_after = 1.5;
};

/// Token tables of the rule engine. All keys are lower case.
struct Lexicon {
    std::unordered_map<std::string, double> valences;
    std::unordered_map<std::string, double> boosters;
    std::unordered_set<std::string> negations;
    std::unordered_map<std::string, double> emoticons;
    /// Multi-word special cases ("bad ass", "kiss of death") that override valence.
    std::unordered_map<std::string, double> special_cases;
    /// Tokens neutralized for query terms; they contribute 0 and take no modifiers.
    std::unordered_set<std::string> neutralized;

    /// Valence of a token (word or emoticon), nullptr when absent.
    const double* find(std::string_view token_lower) const;
};

Lexicon parse_lexicon(std::string_view text);
Lexicon load_lexicon(const std::string& path);
/// The lexicon shipped in data/lexicon.tsv.
const Lexicon& default_lexicon();

/// pos - neg, validated.
double compound_from_probs(double pos, double neg);

class RuleScorer {
public:
    explicit RuleScorer(const Lexicon& lex, RuleConstants constants = {}, double neutral_band = 0.1);

    SentimentScore score(std::string_view text) const;

private:
    const Lexicon& lex_;
    RuleConstants c_;
    double band_;
};

SentimentScore score_rule_based(std::string_view text_clean, const Lexicon& lex);

/// Words the query draws on that carry valence in the default lexicon but are
/// not part of the three keyword groups.
const std::vector<std::string>& extra_neutral_terms();

/// Sets every query keyword (each token of a phrase, with its inflected forms)
/// and the extra terms to valence 0.
Lexicon neutralize_query_terms(const Lexicon& lex, const keywords::Query& q);

enum class NeutralMode { kZero, kDrop };
const char* to_string(NeutralMode m);
NeutralMode parse_neutral_mode(std::string_view s);

/// |compound| < band (or an external neutral argmax) -> zeroed or dropped.
std::optional<SentimentScore> apply_neutral_policy(const SentimentScore& s, double band, NeutralMode mode);

/// Replaces sentence-ending '.' with ';' except between two digits.
std::string desentencize(std::string_view text);

struct ExternalScores {
    std::unordered_map<std::string, SentimentScore> by_id;
    std::vector<std::string> order;  // file order
};

ExternalScores parse_external_scores(std::string_view csv_text);
ExternalScores load_external_scores(const std::string& path);

struct JoinReport {
    std::vector<std::string> unknown_ids;  // scored but not in the corpus
    std::vector<std::string> missing_ids;  // in the corpus without a score
};

JoinReport join_report(const ExternalScores& scores, const std::vector<std::string>& corpus_ids);

}  // namespace tfsi::sentiment
