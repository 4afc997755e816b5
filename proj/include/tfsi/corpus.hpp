#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfsi/timeutil.hpp"

namespace tfsi::corpus {

struct RawTweet {
    std::string id;
    std::string text;
    SysSeconds created_at{};
    std::string author_id;
    bool is_retweet = false;
    std::int64_t retweet_count = 0;
    std::int64_t reply_count = 0;
    std::int64_t like_count = 0;
    std::optional<bool> possibly_sensitive;
};

enum class ExcludedReason { kCrypto, kAdPhrase, kEmptyAfterClean };

const char* to_string(ExcludedReason r);
std::optional<ExcludedReason> parse_excluded_reason(std::string_view s);

struct CleanTweet {
    RawTweet raw;
    std::string text_clean;
    EasternTime eastern;
    std::optional<std::string> duplicate_of;
    std::optional<ExcludedReason> excluded_reason;

    const std::string& id() const { return raw.id; }
    bool kept() const { return !duplicate_of && !excluded_reason; }
};

// ---------------------------------------------------------------------------
// Loading

struct LoadOptions {
    /// Fraction of malformed records tolerated before the load aborts. At least
    /// one malformed record is always tolerated so tiny files are not fatal.
    double malformed_budget = 0.01;
    bool drop_retweets = true;
    /// Page size hint sent to HTTP sources.
    int page_size = 100;
};

struct LoadResult {
    std::vector<RawTweet> tweets;
    std::size_t total_records = 0;
    std::size_t malformed = 0;
    std::size_t retweets = 0;
    std::vector<std::string> malformed_examples;  // first few diagnostics
};

/// Parses one line of the archive schema. Throws Error(kParse) on violation.
RawTweet parse_raw_tweet(std::string_view json_line);
std::string serialize_raw_tweet(const RawTweet& t);

/// Line-delimited JSON from memory.
LoadResult load_jsonl_text(std::string_view text, const LoadOptions& opts = {});

/// Already-decoded records, under the same id, retweet and budget rules.
LoadResult load_records(std::vector<RawTweet> records, const LoadOptions& opts = {});

/// `source` is a file path or an "http://host[:port]/path" paginated endpoint.
/// Throws kIo when unreachable and kParse when the malformed budget is exceeded.
LoadResult load_source(const std::string& source, const LoadOptions& opts = {});

// ---------------------------------------------------------------------------
// Cleaning

std::string normalize_text(std::string_view text);

struct ExclusionRules {
    std::vector<std::string> ad_phrases{"social security", "credit card"};
    std::vector<std::string> crypto_terms{"crypto", "token", "nft", "inu", "shiba", "defi"};
};

/// Case-insensitive substring test; ad phrases are checked before crypto terms.
std::optional<ExcludedReason> exclusion_filter(std::string_view text_clean, const ExclusionRules& rules);

enum class DedupMode { kExact, kNear };

/// Key used to detect replicas: the text itself, or case-folded with ASCII
/// punctuation stripped and whitespace collapsed.
std::string dedup_key(std::string_view text_clean, DedupMode mode);

/// Sorts by (created_at, id) and marks later replicas of non-excluded tweets.
void deduplicate(std::vector<CleanTweet>& tweets, DedupMode mode);

struct IngestOptions {
    TzRule tz = TzRule::kNewYork;
    DedupMode dedup = DedupMode::kExact;
    ExclusionRules rules;
};

struct IngestStats {
    std::size_t total_records = 0;
    std::size_t malformed = 0;
    std::size_t retweets = 0;
    std::size_t excluded_crypto = 0;
    std::size_t excluded_ad = 0;
    std::size_t excluded_empty = 0;
    std::size_t duplicates = 0;
    std::size_t kept = 0;

    std::size_t excluded() const { return retweets + excluded_crypto + excluded_ad + excluded_empty; }
    bool conserved() const { return kept + duplicates + excluded() + malformed == total_records; }
};

struct IngestResult {
    std::vector<CleanTweet> tweets;  // sorted by (created_at, id); includes duplicates and exclusions
    IngestStats stats;
};

IngestResult ingest(const LoadResult& loaded, const IngestOptions& opts = {});

std::string serialize_clean_tweet(const CleanTweet& t);
std::string write_clean_jsonl(const std::vector<CleanTweet>& tweets);
std::vector<CleanTweet> read_clean_jsonl(const std::string& path);
std::string stats_json(const IngestStats& s);

}  // namespace tfsi::corpus
